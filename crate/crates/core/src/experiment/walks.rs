//! Batch statistics of the exploration walk.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exploration::{explore_with, OffspringLaw, Root, TailCounter, TailFit, TAIL_MIN_COUNT};
use crate::kernel::{b_constant, s_infinity, solve_a_theta, ModelParams, DEFAULT_ROOT_TOL};
use crate::quadrature::QuadratureConfig;
use crate::rng::StreamFactory;
use crate::stats::proportion;

const CHUNK: u64 = 1024;
// offspring draws use stream ids above this offset
const DRAW_STREAMS: u64 = 1 << 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExploreSpec {
    pub params: ModelParams,
    pub runs: u64,
    pub step_cap: u64,
    pub root: Root,
    pub seed: u64,
    /// Independent offspring draws for the mean and tail estimates.
    pub offspring_draws: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramCell {
    pub size: u64,
    pub count: u64,
    pub frequency: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailReport {
    pub draws: u64,
    /// `(x, #{ξ > x})` on the threshold grid.
    pub exceedances: Vec<(f64, u64)>,
    pub fit: Option<TailFit>,
    pub fit_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExploreReport {
    pub gamma: f64,
    pub theta: f64,
    pub runs: u64,
    pub step_cap: u64,
    pub root: Root,
    pub seed: u64,
    pub survived: u64,
    pub survival_frequency: f64,
    pub survival_se: f64,
    /// `A_θ/(θB)` for a size-biased root, `S∞(a)` for a fixed one.
    pub survival_predicted: Option<f64>,
    pub mean_finite_cluster: Option<f64>,
    pub mean_finite_cluster_se: Option<f64>,
    /// Absorbed walks by cluster size, sizes up to the histogram limit.
    pub histogram: Vec<HistogramCell>,
    /// Absorbed walks larger than the histogram limit.
    pub histogram_overflow: u64,
    pub offspring_mean: f64,
    pub offspring_mean_se: f64,
    /// `θ ∫ψ²`; infinite for `γ <= 3`.
    pub offspring_mean_predicted: f64,
    pub tail: TailReport,
}

pub const HISTOGRAM_LIMIT: u64 = 1000;

#[derive(Default)]
struct WalkTally {
    survived: u64,
    sizes: BTreeMap<u64, u64>,
    finite: u64,
    sum: f64,
    sum_sq: f64,
}

struct DrawTally {
    tail: TailCounter,
    sum: f64,
    sum_sq: f64,
}

pub fn run_explore(spec: &ExploreSpec, cfg: &QuadratureConfig) -> Result<ExploreReport> {
    if spec.runs == 0 {
        return Err(Error::domain("runs must be >= 1"));
    }
    if spec.step_cap == 0 {
        return Err(Error::domain("step_cap must be >= 1"));
    }
    let law = OffspringLaw::new(&spec.params)?;
    let streams = StreamFactory::new(spec.seed);

    let walks = (0..spec.runs.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| -> Result<WalkTally> {
            let mut rng = streams.stream(c);
            let mut t = WalkTally::default();
            for _ in c * CHUNK..((c + 1) * CHUNK).min(spec.runs) {
                let out = explore_with(&law, spec.root, spec.step_cap, &mut rng)?;
                match out.cluster_size {
                    None => t.survived += 1,
                    Some(s) => {
                        t.finite += 1;
                        t.sum += s as f64;
                        t.sum_sq += (s as f64).powi(2);
                        *t.sizes.entry(s.min(HISTOGRAM_LIMIT + 1)).or_default() += 1;
                    }
                }
            }
            Ok(t)
        })
        .try_reduce(WalkTally::default, |mut a, b| {
            a.survived += b.survived;
            a.finite += b.finite;
            a.sum += b.sum;
            a.sum_sq += b.sum_sq;
            for (k, v) in b.sizes {
                *a.sizes.entry(k).or_default() += v;
            }
            Ok(a)
        })?;

    let draws = (0..spec.offspring_draws.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut rng = streams.stream(DRAW_STREAMS + c);
            let mut t = DrawTally {
                tail: TailCounter::standard(),
                sum: 0.0,
                sum_sq: 0.0,
            };
            for _ in c * CHUNK..((c + 1) * CHUNK).min(spec.offspring_draws) {
                let k = law.sample(&mut rng).count;
                t.tail.record(k);
                t.sum += k as f64;
                t.sum_sq += (k as f64).powi(2);
            }
            t
        })
        .reduce(
            || DrawTally {
                tail: TailCounter::standard(),
                sum: 0.0,
                sum_sq: 0.0,
            },
            |mut a, b| {
                a.tail.merge(&b.tail);
                a.sum += b.sum;
                a.sum_sq += b.sum_sq;
                a
            },
        );

    let (survival_frequency, survival_se) = proportion(walks.survived, spec.runs);
    let (mean_finite_cluster, mean_finite_cluster_se) =
        moments(walks.sum, walks.sum_sq, walks.finite);
    let (offspring_mean, offspring_mean_se) =
        moments(draws.sum, draws.sum_sq, spec.offspring_draws);
    let mut histogram_overflow = 0;
    let histogram = walks
        .sizes
        .iter()
        .filter_map(|(&size, &count)| {
            if size > HISTOGRAM_LIMIT {
                histogram_overflow = count;
                return None;
            }
            let (frequency, se) = proportion(count, spec.runs);
            Some(HistogramCell {
                size,
                count,
                frequency,
                se,
            })
        })
        .collect();

    let (fit, fit_error) = match draws.tail.fit(TAIL_MIN_COUNT) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };

    Ok(ExploreReport {
        gamma: spec.params.gamma,
        theta: spec.params.theta,
        runs: spec.runs,
        step_cap: spec.step_cap,
        root: spec.root,
        seed: spec.seed,
        survived: walks.survived,
        survival_frequency,
        survival_se,
        survival_predicted: predicted_survival(&spec.params, spec.root, cfg).ok(),
        mean_finite_cluster,
        mean_finite_cluster_se,
        histogram,
        histogram_overflow,
        offspring_mean: offspring_mean.unwrap_or(f64::NAN),
        offspring_mean_se: offspring_mean_se.unwrap_or(f64::NAN),
        offspring_mean_predicted: law.mixture_mean(),
        tail: TailReport {
            draws: spec.offspring_draws,
            exceedances: draws.tail.exceedances(),
            fit,
            fit_error,
        },
    })
}

fn moments(sum: f64, sum_sq: f64, k: u64) -> (Option<f64>, Option<f64>) {
    if k == 0 {
        return (None, None);
    }
    let kf = k as f64;
    let mean = sum / kf;
    if k == 1 {
        return (Some(mean), None);
    }
    let var = ((sum_sq - kf * mean * mean) / (kf - 1.0)).max(0.0);
    (Some(mean), Some((var / kf).sqrt()))
}

/// Limit survival probability of the walk: `∫ψ̄ S∞ = A_θ/(θB)` from a
/// size-biased root, `S∞(a)` from type `a`.
pub fn predicted_survival(params: &ModelParams, root: Root, cfg: &QuadratureConfig) -> Result<f64> {
    let sol = solve_a_theta(params, cfg, DEFAULT_ROOT_TOL)?;
    if sol.a_theta == 0.0 {
        return Ok(0.0);
    }
    match root {
        Root::SizeBiased => Ok(sol.a_theta / (params.theta * b_constant(params.gamma)?)),
        Root::FixedType(a) => s_infinity(a, &sol, params),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_kernel_report() {
        let spec = ExploreSpec {
            params: ModelParams::chung_lu(4.0, 0.0).unwrap(),
            runs: 500,
            step_cap: 100,
            root: Root::SizeBiased,
            seed: 1,
            offspring_draws: 500,
        };
        let r = run_explore(&spec, &QuadratureConfig::default()).unwrap();
        assert_eq!(r.survived, 0);
        assert_eq!(r.histogram.len(), 1);
        assert_eq!((r.histogram[0].size, r.histogram[0].count), (1, 500));
        assert_eq!(r.offspring_mean, 0.0);
        assert!(r.tail.fit.is_none());
        assert_eq!(r.survival_predicted, Some(0.0));
    }

    #[test]
    fn deterministic_given_seed() {
        let spec = ExploreSpec {
            params: ModelParams::chung_lu(3.5, 0.3).unwrap(),
            runs: 3000,
            step_cap: 1000,
            root: Root::SizeBiased,
            seed: 11,
            offspring_draws: 3000,
        };
        let cfg = QuadratureConfig::default();
        assert_eq!(
            run_explore(&spec, &cfg).unwrap(),
            run_explore(&spec, &cfg).unwrap()
        );
    }
}
