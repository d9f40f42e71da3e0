//! Parameter sweeps over `(θ, n, replicate)` and their CSV form.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::census::components;
use crate::error::{Error, Result};
use crate::kernel::{analytic_giant_fraction, check_gamma, ModelParams};
use crate::quadrature::QuadratureConfig;
use crate::rng::derive_seed;
use crate::sampler::sample_graph;

/// Name of the first CSV column; readers reject any other value.
pub const SCHEMA_ID: &str = "chunglu-sweep-v1";

/// A list of θ values, or `log:lo:hi:k` / `lin:lo:hi:k` for `k` points
/// spaced evenly in `log θ` or `θ`, endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub enum ThetaGrid {
    List(Vec<f64>),
    Log { lo: f64, hi: f64, points: usize },
    Linear { lo: f64, hi: f64, points: usize },
}

impl ThetaGrid {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            ThetaGrid::List(ref v) => v.clone(),
            ThetaGrid::Log { lo, hi, points } => spaced(lo.ln(), hi.ln(), points)
                .into_iter()
                .map(f64::exp)
                .collect(),
            ThetaGrid::Linear { lo, hi, points } => spaced(lo, hi, points),
        }
    }
}

fn spaced(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    if k == 1 {
        return vec![lo];
    }
    (0..k)
        .map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64)
        .collect()
}

impl FromStr for ThetaGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |what: &str| Error::domain(format!("bad theta grid {s:?}: {what}"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() == 1 {
            let values = parse_list::<f64>(s).map_err(|_| bad("expected numbers"))?;
            if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(bad("values must be finite and >= 0"));
            }
            return Ok(ThetaGrid::List(values));
        }
        if parts.len() != 4 {
            return Err(bad("expected log:lo:hi:k or lin:lo:hi:k"));
        }
        let lo: f64 = parts[1].parse().map_err(|_| bad("lo"))?;
        let hi: f64 = parts[2].parse().map_err(|_| bad("hi"))?;
        let points: usize = parts[3].parse().map_err(|_| bad("k"))?;
        if points == 0 || !(lo.is_finite() && hi.is_finite() && lo <= hi && lo >= 0.0) {
            return Err(bad("need 0 <= lo <= hi and k >= 1"));
        }
        match parts[0] {
            "log" if lo > 0.0 => Ok(ThetaGrid::Log { lo, hi, points }),
            "log" => Err(bad("log grid needs lo > 0")),
            "lin" => Ok(ThetaGrid::Linear { lo, hi, points }),
            _ => Err(bad("unknown spacing")),
        }
    }
}

/// Comma-separated values, e.g. `10000,100000`.
pub fn parse_list<T: FromStr>(s: &str) -> std::result::Result<Vec<T>, T::Err> {
    s.split(',').map(|p| p.trim().parse()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    ChungLu,
    ErdosRenyi,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub kind: ModelKind,
    /// Ignored for Erdős–Rényi.
    pub gamma: f64,
    /// θ values, or λ values for Erdős–Rényi.
    pub theta_values: Vec<f64>,
    pub n_values: Vec<usize>,
    pub seeds_per_point: u32,
    pub base_seed: u64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.kind == ModelKind::ChungLu {
            check_gamma(self.gamma)?;
        }
        if self.theta_values.is_empty() {
            return Err(Error::domain("theta grid is empty"));
        }
        for &t in &self.theta_values {
            self.params(t)?;
        }
        if self.n_values.is_empty() || self.n_values.contains(&0) {
            return Err(Error::domain("n values must be nonempty and >= 1"));
        }
        if self.seeds_per_point == 0 {
            return Err(Error::domain("seeds_per_point must be >= 1"));
        }
        Ok(())
    }

    pub fn params(&self, theta: f64) -> Result<ModelParams> {
        match self.kind {
            ModelKind::ChungLu => ModelParams::chung_lu(self.gamma, theta),
            ModelKind::ErdosRenyi => ModelParams::erdos_renyi(theta),
        }
    }

    /// `derive_seed(base_seed, [γ bits, θ bits, n, replicate])`, with the
    /// γ slot set to `u64::MAX` for Erdős–Rényi. The seed depends only on
    /// the point itself, not on its position in the grid.
    pub fn point_seed(&self, theta: f64, n: usize, replicate: u32) -> u64 {
        let gamma_bits = match self.kind {
            ModelKind::ChungLu => self.gamma.to_bits(),
            ModelKind::ErdosRenyi => u64::MAX,
        };
        derive_seed(
            self.base_seed,
            &[gamma_bits, theta.to_bits(), n as u64, replicate as u64],
        )
    }
}

/// One CSV row. Simulation columns are empty on analytic rows, and the
/// rank-1 columns are empty for Erdős–Rényi.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "chunglu-sweep-v1")]
    pub row: usize,
    pub kind: ModelKind,
    pub gamma: Option<f64>,
    pub theta: f64,
    pub n: Option<u64>,
    pub replicate: Option<u32>,
    pub seed: Option<u64>,
    pub m: Option<u64>,
    pub c1: Option<u64>,
    pub c2: Option<u64>,
    pub giant_fraction: Option<f64>,
    pub rho_bar_analytic: Option<f64>,
    pub a_theta: Option<f64>,
    pub max_cluster_normalized: Option<f64>,
    pub capped_pairs: Option<u64>,
    pub elapsed_secs: f64,
    pub status: Status,
    pub error: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Failed,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.status == Status::Ok
    }

    pub fn is_simulated(&self) -> bool {
        self.n.is_some()
    }
}

/// CSV cell for a real: decimal notation with 17 significant digits,
/// enough to round-trip any `f64`. Zero prints as `0`, non-finite values as `NaN`/`inf`/`-inf`.
pub fn format_real(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "NaN".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let exp10 = v.abs().log10().floor() as i32;
    let decimals = (16 - exp10).max(0) as usize;
    let mut s = String::new();
    write!(s, "{v:.decimals$}").unwrap();
    s
}

fn opt_real(v: Option<f64>) -> String {
    v.map(format_real).unwrap_or_default()
}

fn opt_int<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn record(r: &SweepRow) -> [String; 18] {
    [
        r.row.to_string(),
        match r.kind {
            ModelKind::ChungLu => "chung_lu".into(),
            ModelKind::ErdosRenyi => "erdos_renyi".into(),
        },
        opt_real(r.gamma),
        format_real(r.theta),
        opt_int(r.n),
        opt_int(r.replicate),
        opt_int(r.seed),
        opt_int(r.m),
        opt_int(r.c1),
        opt_int(r.c2),
        opt_real(r.giant_fraction),
        opt_real(r.rho_bar_analytic),
        opt_real(r.a_theta),
        opt_real(r.max_cluster_normalized),
        opt_int(r.capped_pairs),
        format_real(r.elapsed_secs),
        match r.status {
            Status::Ok => "ok".into(),
            Status::Failed => "failed".into(),
        },
        r.error.clone(),
    ]
}

#[derive(Debug, Clone, Copy)]
struct Analytic {
    rho: f64,
    a_theta: Option<f64>,
}

fn analytic(params: &ModelParams, cfg: &QuadratureConfig) -> Result<Analytic> {
    let (rho, sol) = analytic_giant_fraction(params, cfg)?;
    Ok(Analytic {
        rho,
        a_theta: sol.map(|s| s.a_theta),
    })
}

fn blank_row(spec: &SweepSpec, theta: f64) -> SweepRow {
    SweepRow {
        row: 0,
        kind: spec.kind,
        gamma: (spec.kind == ModelKind::ChungLu).then_some(spec.gamma),
        theta,
        n: None,
        replicate: None,
        seed: None,
        m: None,
        c1: None,
        c2: None,
        giant_fraction: None,
        rho_bar_analytic: None,
        a_theta: None,
        max_cluster_normalized: None,
        capped_pairs: None,
        elapsed_secs: 0.0,
        status: Status::Ok,
        error: String::new(),
    }
}

fn fill_analytic(row: &mut SweepRow, a: &Result<Analytic>) {
    match a {
        Ok(a) => {
            row.rho_bar_analytic = Some(a.rho);
            row.a_theta = a.a_theta;
        }
        Err(e) => fail(row, &format!("analytic: {e}")),
    }
}

fn fail(row: &mut SweepRow, msg: &str) {
    row.status = Status::Failed;
    if !row.error.is_empty() {
        row.error.push_str("; ");
    }
    row.error.push_str(msg);
}

fn simulate(row: &mut SweepRow, spec: &SweepSpec, n: usize) -> Result<()> {
    let params = spec.params(row.theta)?;
    let seed = row.seed.expect("simulated rows carry a seed");
    let (graph, report) = sample_graph(&params, n, seed)?;
    let stats = components(&graph);
    drop(graph);
    row.m = Some(report.m as u64);
    row.c1 = Some(stats.c1 as u64);
    row.c2 = Some(stats.c2 as u64);
    row.giant_fraction = Some(stats.giant_fraction);
    row.capped_pairs = Some(report.capped_pairs);
    if spec.kind == ModelKind::ChungLu {
        row.max_cluster_normalized = Some(stats.normalized_max(spec.gamma));
    }
    Ok(())
}

/// Sample and census one graph per `(θ, n, replicate)`, rows ordered by
/// grid index. A failing point yields a row with `status = failed` and
/// the message in `error`; the other points are unaffected.
pub fn run_sweep(spec: &SweepSpec, cfg: &QuadratureConfig) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let analytic: Vec<Result<Analytic>> = spec
        .theta_values
        .par_iter()
        .map(|&t| analytic(&spec.params(t)?, cfg))
        .collect();

    let mut points = Vec::new();
    for (ti, &theta) in spec.theta_values.iter().enumerate() {
        for &n in &spec.n_values {
            for rep in 0..spec.seeds_per_point {
                points.push((ti, theta, n, rep));
            }
        }
    }

    let mut rows: Vec<SweepRow> = points
        .into_par_iter()
        .map(|(ti, theta, n, rep)| {
            let start = Instant::now();
            let mut row = blank_row(spec, theta);
            row.n = Some(n as u64);
            row.replicate = Some(rep);
            row.seed = Some(spec.point_seed(theta, n, rep));
            fill_analytic(&mut row, &analytic[ti]);
            let outcome = catch_unwind(AssertUnwindSafe(|| simulate(&mut row, spec, n)));
            match outcome {
                Ok(Ok(())) => {}
                Ok(Err(e)) => fail(&mut row, &e.to_string()),
                Err(_) => fail(&mut row, "simulation panicked"),
            }
            row.elapsed_secs = start.elapsed().as_secs_f64();
            row
        })
        .collect();
    for (i, row) in rows.iter_mut().enumerate() {
        row.row = i;
    }
    Ok(rows)
}

/// One row per θ with the analytic giant fraction and no graphs.
pub fn run_analytic_sweep(spec: &SweepSpec, cfg: &QuadratureConfig) -> Result<Vec<SweepRow>> {
    if spec.kind == ModelKind::ChungLu {
        check_gamma(spec.gamma)?;
    }
    if spec.theta_values.is_empty() {
        return Err(Error::domain("theta grid is empty"));
    }
    Ok(spec
        .theta_values
        .par_iter()
        .enumerate()
        .map(|(i, &theta)| {
            let start = Instant::now();
            let mut row = blank_row(spec, theta);
            row.row = i;
            let a = spec.params(theta).and_then(|p| analytic(&p, cfg));
            fill_analytic(&mut row, &a);
            row.elapsed_secs = start.elapsed().as_secs_f64();
            row
        })
        .collect())
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(header())?;
    for row in rows {
        w.write_record(record(row))?;
    }
    w.flush()?;
    Ok(())
}

/// Column names in file order.
pub fn header() -> [&'static str; 18] {
    [
        SCHEMA_ID,
        "kind",
        "gamma",
        "theta",
        "n",
        "replicate",
        "seed",
        "m",
        "c1",
        "c2",
        "giant_fraction",
        "rho_bar_analytic",
        "a_theta",
        "max_cluster_normalized",
        "capped_pairs",
        "elapsed_secs",
        "status",
        "error",
    ]
}

/// Read rows written by [`write_csv`]. The header must match exactly,
/// starting with the schema id.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut r = csv::ReaderBuilder::new().from_reader(input);
    let headers = r.headers()?.clone();
    let first = headers.get(0).unwrap_or("");
    if first != SCHEMA_ID {
        return Err(Error::Schema(format!(
            "unknown schema id {first:?}, expected {SCHEMA_ID:?}"
        )));
    }
    let expected = header();
    if headers.len() != expected.len() || headers.iter().zip(expected).any(|(a, b)| a != b) {
        return Err(Error::Schema(format!(
            "columns {:?} do not match {SCHEMA_ID}",
            headers.iter().collect::<Vec<_>>()
        )));
    }
    let mut rows = Vec::new();
    for rec in r.deserialize() {
        rows.push(rec?);
    }
    Ok(rows)
}
