use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use chunglu::census::components;
use chunglu::experiment::sweep::parse_list;
use chunglu::experiment::{
    fit, read_csv, run_analytic_sweep, run_explore, run_sweep, write_csv, ExploreSpec, FitMode,
    ModelKind, Quantity, SweepSpec, ThetaGrid,
};
use chunglu::kernel::{er_rho, solve_a_theta, theta_c, DEFAULT_ROOT_TOL};
use chunglu::{sample_graph, Error, ModelParams, QuadratureConfig, Result, Root, SparseGraph};

#[derive(Parser)]
#[command(
    name = "chunglu",
    version,
    about = "Chung-Lu random graphs: theory, sampling and experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the fixed-point equation and print the giant fraction.
    Solve(SolveArgs),
    /// Sample a graph and write it as an edge list.
    Gen(GenArgs),
    /// Component census of an edge-list file.
    Components(ComponentsArgs),
    /// Run a parameter sweep and write one row per point.
    Sweep(SweepArgs),
    /// Fit a scaling law to a sweep file.
    Fit(FitArgs),
    /// Monte-Carlo statistics of the exploration walk.
    Explore(ExploreArgs),
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    /// Erdős–Rényi mean degree; replaces --gamma/--theta.
    #[arg(long, conflicts_with_all = ["gamma", "theta"])]
    lambda: Option<f64>,
}

impl ModelArgs {
    fn params(&self) -> Result<ModelParams> {
        match (self.lambda, self.gamma, self.theta) {
            (Some(l), _, _) => ModelParams::erdos_renyi(l),
            (None, Some(g), Some(t)) => ModelParams::chung_lu(g, t),
            _ => Err(Error::Domain(
                "need --gamma and --theta, or --lambda".into(),
            )),
        }
    }
}

#[derive(Args)]
struct QuadArgs {
    #[arg(long, default_value_t = 1e-12)]
    abs_tol: f64,
    #[arg(long, default_value_t = 1e-10)]
    rel_tol: f64,
    #[arg(long, default_value_t = 60)]
    max_subdivisions: u32,
}

impl QuadArgs {
    fn config(&self) -> Result<QuadratureConfig> {
        Ok(QuadratureConfig::new(
            self.abs_tol,
            self.rel_tol,
            self.max_subdivisions,
        )?)
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct ComponentsArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Also report c1 / n^(1/(γ-1)).
    #[arg(long)]
    gamma: Option<f64>,
    /// Include the full list of component sizes.
    #[arg(long)]
    sizes: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    gamma: Option<f64>,
    /// θ values: `a,b,c`, `log:lo:hi:k` or `lin:lo:hi:k`.
    #[arg(long, conflicts_with = "lambda")]
    theta: Option<String>,
    /// Erdős–Rényi λ values, same syntax as --theta.
    #[arg(long)]
    lambda: Option<String>,
    /// Comma-separated vertex counts.
    #[arg(long, default_value = "100000")]
    n: String,
    #[arg(long, default_value_t = 1)]
    seeds_per_point: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Only the analytic columns, one row per θ and no graphs.
    #[arg(long)]
    analytic: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum)]
    mode: FitMode,
    #[arg(long, value_enum, default_value_t = Quantity::Auto)]
    quantity: Quantity,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExploreArgs {
    #[arg(long)]
    gamma: f64,
    #[arg(long)]
    theta: f64,
    #[arg(long, default_value_t = 100_000)]
    runs: u64,
    #[arg(long, default_value_t = 100_000)]
    step_cap: u64,
    /// `size-biased` or `fixed:<a>`.
    #[arg(long, default_value = "size-biased")]
    root: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Offspring draws for the mean and tail estimates; defaults to --runs.
    #[arg(long)]
    offspring_draws: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    quad: QuadArgs,
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn print_json<T: Serialize>(value: &T, path: &Option<PathBuf>) -> Result<()> {
    let mut out = output(path)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(io::Error::from)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SolveReport {
    gamma: Option<f64>,
    theta: f64,
    theta_c: f64,
    a_theta: Option<f64>,
    rho_bar: f64,
    residual: Option<f64>,
    iterations: Option<u32>,
    converged: bool,
}

fn solve(args: SolveArgs) -> Result<()> {
    let params = args.model.params()?;
    let cfg = args.quad.config()?;
    let report = if params.is_chung_lu() {
        let sol = solve_a_theta(&params, &cfg, DEFAULT_ROOT_TOL)?;
        if !sol.converged {
            return Err(Error::Domain(format!(
                "fixed point did not converge: residual {:e} at A = {}",
                sol.residual, sol.a_theta
            )));
        }
        SolveReport {
            gamma: Some(params.gamma),
            theta: params.theta,
            theta_c: theta_c(params.gamma)?,
            a_theta: Some(sol.a_theta),
            rho_bar: sol.rho_bar,
            residual: Some(sol.residual),
            iterations: Some(sol.iterations),
            converged: true,
        }
    } else {
        SolveReport {
            gamma: None,
            theta: params.theta,
            theta_c: 1.0,
            a_theta: None,
            rho_bar: er_rho(params.theta, 1e-14)?,
            residual: None,
            iterations: None,
            converged: true,
        }
    };
    print_json(&report, &None)
}

fn gen(args: GenArgs) -> Result<()> {
    let params = args.model.params()?;
    let (graph, report) = sample_graph(&params, args.n, args.seed)?;
    graph.write_edge_list_file(&args.out)?;
    if report.capped() {
        eprintln!(
            "warning: {} vertex pairs had kappa/n >= 1 and were clamped to probability 1",
            report.capped_pairs
        );
    }
    print_json(&report, &None)
}

#[derive(Serialize)]
struct ComponentsReport {
    n: usize,
    m: usize,
    components: usize,
    c1: usize,
    c2: usize,
    giant_fraction: f64,
    max_cluster_normalized: Option<f64>,
    sizes: Option<Vec<usize>>,
}

fn census(args: ComponentsArgs) -> Result<()> {
    let graph = SparseGraph::read_edge_list_file(&args.input)?;
    let stats = components(&graph);
    let report = ComponentsReport {
        n: stats.n,
        m: graph.m(),
        components: stats.component_count(),
        c1: stats.c1,
        c2: stats.c2,
        giant_fraction: stats.giant_fraction,
        max_cluster_normalized: args.gamma.map(|g| stats.normalized_max(g)),
        sizes: args.sizes.then(|| stats.sizes.clone()),
    };
    print_json(&report, &None)
}

/// Returns whether every point succeeded.
fn sweep(args: SweepArgs) -> Result<bool> {
    let (kind, grid) = match (&args.lambda, &args.theta, args.gamma) {
        (Some(l), _, _) => (ModelKind::ErdosRenyi, l),
        (None, Some(t), Some(_)) => (ModelKind::ChungLu, t),
        _ => {
            return Err(Error::Domain(
                "need --gamma and --theta, or --lambda".into(),
            ))
        }
    };
    let spec = SweepSpec {
        kind,
        gamma: args.gamma.unwrap_or(f64::NAN),
        theta_values: grid.parse::<ThetaGrid>()?.values(),
        n_values: parse_list(&args.n)
            .map_err(|_| Error::Domain(format!("bad --n list {:?}", args.n)))?,
        seeds_per_point: args.seeds_per_point,
        base_seed: args.seed,
    };
    let cfg = args.quad.config()?;
    let rows = if args.analytic {
        run_analytic_sweep(&spec, &cfg)?
    } else {
        run_sweep(&spec, &cfg)?
    };
    match args.format {
        Format::Csv => {
            let mut out = output(&args.out)?;
            write_csv(&rows, &mut out)?;
            out.flush()?;
        }
        Format::Json => print_json(&rows, &args.out)?,
    }
    let failed: Vec<_> = rows.iter().filter(|r| !r.is_ok()).collect();
    for r in &failed {
        eprintln!(
            "point {} (theta={}, n={:?}) failed: {}",
            r.row, r.theta, r.n, r.error
        );
    }
    Ok(failed.is_empty())
}

fn fit_cmd(args: FitArgs) -> Result<()> {
    let rows = read_csv(File::open(&args.input)?)?;
    let report = fit(&rows, args.mode, args.quantity)?;
    print_json(&report, &args.out)
}

fn explore_cmd(args: ExploreArgs) -> Result<()> {
    let spec = ExploreSpec {
        params: ModelParams::chung_lu(args.gamma, args.theta)?,
        runs: args.runs,
        step_cap: args.step_cap,
        root: args.root.parse::<Root>()?,
        seed: args.seed,
        offspring_draws: args.offspring_draws.unwrap_or(args.runs),
    };
    let report = run_explore(&spec, &args.quad.config()?)?;
    print_json(&report, &args.out)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve(a) => solve(a)?,
        Command::Gen(a) => gen(a)?,
        Command::Components(a) => census(a)?,
        Command::Sweep(a) => {
            if !sweep(a)? {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Fit(a) => fit_cmd(a)?,
        Command::Explore(a) => explore_cmd(a)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
