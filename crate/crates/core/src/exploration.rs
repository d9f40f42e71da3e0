//! The exploration walk of a cluster in the local branching limit.
//!
//! A vertex of type `y ∈ (0, 1)` has `Poisson(θ ψ(y) B)` neighbours whose
//! types are i.i.d. with the size-biased density `ψ̄(z) = ψ(z)/B`. Revealing
//! one vertex per step gives `A_0 = 1`, `A_1 = N(x_0)` and
//! `A_{t+1} = A_t - 1 + ξ_t` with `ξ_t` drawn from the Poisson mixture
//! `∫ ψ̄(y) Poisson(θ ψ(y) B) dy`. The cluster size is the absorption time
//! `τ = inf{t : A_t = 0}`.

use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{b_constant, ModelParams};
use crate::stats::{least_squares, LinearFit};

/// Type of the first explored vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Root {
    FixedType(f64),
    #[default]
    SizeBiased,
}

impl FromStr for Root {
    type Err = Error;

    /// `size-biased` or `fixed:<a>` with `0 < a <= 1`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "size-biased" {
            return Ok(Root::SizeBiased);
        }
        if let Some(a) = s.strip_prefix("fixed:") {
            let a: f64 = a
                .parse()
                .map_err(|_| Error::domain(format!("bad root type {a:?}")))?;
            check_type(a)?;
            return Ok(Root::FixedType(a));
        }
        Err(Error::domain(format!(
            "root must be `size-biased` or `fixed:<a>`, got {s:?}"
        )))
    }
}

fn check_type(a: f64) -> Result<()> {
    if a > 0.0 && a <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "vertex type must lie in (0, 1], got {a}"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExplorationOutcome {
    /// Absorption time `τ`; `None` when the walk survived.
    pub cluster_size: Option<u64>,
    /// The walk cannot reach zero within the step cap.
    pub survived: bool,
    pub steps: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OffspringSample {
    pub type_x: f64,
    pub count: u64,
}

/// Inverse CDF of the size-biased type density `ψ(z)/B` on `(0, 1]`.
/// The CDF is `z^((γ-2)/(γ-1))`, so `F⁻¹(u) = u^((γ-1)/(γ-2))`.
pub fn sample_size_biased_type(gamma: f64, u: f64) -> Result<f64> {
    crate::kernel::check_gamma(gamma)?;
    if !(u > 0.0 && u <= 1.0) {
        return Err(Error::domain(format!("u must lie in (0, 1], got {u}")));
    }
    Ok(u.powf((gamma - 1.0) / (gamma - 2.0)))
}

// Beyond 2^53 a Poisson draw is no longer representable exactly in f64.
const POISSON_GAUSSIAN_LIMIT: f64 = 9_007_199_254_740_992.0;

/// One `Poisson(mean)` draw. Knuth's method below mean 12, Ahrens-Dieter
/// rejection above (both via `rand_distr`). Means beyond `2^53` use the
/// Gaussian limit, whose relative error there is below `1e-8`.
pub fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if !(mean > 0.0) {
        return 0;
    }
    if mean < POISSON_GAUSSIAN_LIMIT {
        let d = Poisson::new(mean).expect("mean is positive and below the Poisson limit");
        return d.sample(rng) as u64;
    }
    let z: f64 = StandardNormal.sample(rng);
    (mean + mean.sqrt() * z).round().max(0.0) as u64
}

/// Offspring law of the walk for one parameter set.
#[derive(Debug, Clone, Copy)]
pub struct OffspringLaw {
    gamma: f64,
    theta_b: f64,
    type_exponent: f64,
    mean_exponent: f64,
}

impl OffspringLaw {
    pub fn new(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        if !params.is_chung_lu() {
            return Err(Error::domain(
                "exploration is defined for the Chung-Lu kernel",
            ));
        }
        let gamma = params.gamma;
        Ok(OffspringLaw {
            gamma,
            theta_b: params.theta * b_constant(gamma)?,
            type_exponent: (gamma - 1.0) / (gamma - 2.0),
            mean_exponent: -1.0 / (gamma - 2.0),
        })
    }

    /// `θ ψ(x) B`, the mean neighbour count of a type-`x` vertex.
    pub fn mean_for_type(&self, x: f64) -> f64 {
        self.theta_b * x.powf(-1.0 / (self.gamma - 1.0))
    }

    /// Mean of the mixture, `θ ∫ψ² = θ (γ-1)/(γ-3)`; infinite for `γ <= 3`.
    pub fn mixture_mean(&self) -> f64 {
        if self.gamma <= 3.0 {
            f64::INFINITY
        } else {
            self.theta_b / b_constant(self.gamma).unwrap_or(f64::NAN) * (self.gamma - 1.0)
                / (self.gamma - 3.0)
        }
    }

    /// Draw a size-biased type; returns it with `θ ψ(x) B`. The mean is
    /// formed from `u` directly (`ψ(F⁻¹(u)) = u^(-1/(γ-2))`) so that it
    /// stays finite when the type underflows.
    #[inline]
    fn draw_type<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let u = 1.0 - rng.random::<f64>();
        let x = u.powf(self.type_exponent).max(f64::MIN_POSITIVE);
        (x, self.theta_b * u.powf(self.mean_exponent))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> OffspringSample {
        let (type_x, mean) = self.draw_type(rng);
        OffspringSample {
            type_x,
            count: poisson(mean, rng),
        }
    }

    /// Sum of `k` offspring draws. Given the types, the counts are
    /// independent Poissons, so the sum is one Poisson draw with the
    /// summed mean.
    fn sample_sum<R: Rng + ?Sized>(&self, k: u64, rng: &mut R) -> u64 {
        let mut mean = 0.0;
        for _ in 0..k {
            mean += self.draw_type(rng).1;
        }
        poisson(mean, rng)
    }
}

/// One draw of `ξ`: a size-biased type `X` and `N(X) ~ Poisson(θ ψ(X) B)`.
pub fn sample_offspring<R: Rng + ?Sized>(
    params: &ModelParams,
    rng: &mut R,
) -> Result<OffspringSample> {
    Ok(OffspringLaw::new(params)?.sample(rng))
}

/// Run the walk until absorption or until absorption within `step_cap`
/// steps has become impossible.
///
/// From `A_t = a`, the walk needs at least `a` more steps to reach zero.
/// So once `t + a > step_cap` the outcome is survival, and the next
/// `a - 1` steps can be taken together: their offspring total is one
/// Poisson draw with the summed mean.
pub fn explore<R: Rng + ?Sized>(
    params: &ModelParams,
    root: Root,
    step_cap: u64,
    rng: &mut R,
) -> Result<ExplorationOutcome> {
    let law = OffspringLaw::new(params)?;
    explore_with(&law, root, step_cap, rng)
}

pub fn explore_with<R: Rng + ?Sized>(
    law: &OffspringLaw,
    root: Root,
    step_cap: u64,
    rng: &mut R,
) -> Result<ExplorationOutcome> {
    if step_cap == 0 {
        return Err(Error::domain("step_cap must be >= 1"));
    }
    let root_mean = match root {
        Root::FixedType(a) => {
            check_type(a)?;
            law.mean_for_type(a)
        }
        Root::SizeBiased => law.draw_type(rng).1,
    };
    let mut active = poisson(root_mean, rng);
    let mut t: u64 = 1;

    loop {
        if active == 0 {
            return Ok(ExplorationOutcome {
                cluster_size: Some(t),
                survived: false,
                steps: t,
            });
        }
        if t.saturating_add(active) > step_cap {
            return Ok(ExplorationOutcome {
                cluster_size: None,
                survived: true,
                steps: t,
            });
        }
        let k = active.saturating_sub(1).max(1);
        active = (active - k).saturating_add(law.sample_sum(k, rng));
        t += k;
    }
}

/// Empirical tail `P(ξ > x)` on a fixed threshold grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailCounter {
    thresholds: Vec<f64>,
    // bucket[k]: draws exceeding exactly the first k thresholds
    buckets: Vec<u64>,
    total: u64,
}

/// Weighted log-log regression of the empirical tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailFit {
    pub slope: f64,
    pub slope_se: f64,
    pub points: usize,
}

/// Thresholds at `10^(k/per_decade)` from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, per_decade: u32) -> Vec<f64> {
    let start = (lo.log10() * per_decade as f64).round() as i64;
    let end = (hi.log10() * per_decade as f64).round() as i64;
    (start..=end)
        .map(|k| 10f64.powf(k as f64 / per_decade as f64))
        .collect()
}

/// Default tail grid: 10 to 1000, ten points per decade.
pub const TAIL_LO: f64 = 10.0;
pub const TAIL_HI: f64 = 1000.0;
pub const TAIL_PER_DECADE: u32 = 10;
/// Grid points with fewer exceedances are left out of the fit.
pub const TAIL_MIN_COUNT: u64 = 20;

impl TailCounter {
    pub fn new(thresholds: Vec<f64>) -> Self {
        let k = thresholds.len();
        TailCounter {
            thresholds,
            buckets: vec![0; k + 1],
            total: 0,
        }
    }

    pub fn standard() -> Self {
        Self::new(log_grid(TAIL_LO, TAIL_HI, TAIL_PER_DECADE))
    }

    pub fn record(&mut self, value: u64) {
        let v = value as f64;
        let k = self.thresholds.partition_point(|&t| t < v);
        self.buckets[k] += 1;
        self.total += 1;
    }

    pub fn merge(&mut self, other: &TailCounter) {
        assert_eq!(self.thresholds, other.thresholds, "tail grids differ");
        for (a, b) in self.buckets.iter_mut().zip(&other.buckets) {
            *a += b;
        }
        self.total += other.total;
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// `(x, #{ξ > x})` for every threshold.
    pub fn exceedances(&self) -> Vec<(f64, u64)> {
        let mut out = Vec::with_capacity(self.thresholds.len());
        let mut above: u64 = self.buckets.iter().sum();
        for (j, &x) in self.thresholds.iter().enumerate() {
            above -= self.buckets[j];
            out.push((x, above));
        }
        out
    }

    /// Slope of `log P̂(ξ > x)` against `log x` over grid points with at
    /// least `min_count` exceedances, weighted by the exceedance count
    /// (the inverse variance of `log P̂`).
    pub fn fit(&self, min_count: u64) -> Result<TailFit> {
        let pts: Vec<(f64, u64)> = self
            .exceedances()
            .into_iter()
            .filter(|&(_, c)| c >= min_count.max(1))
            .collect();
        if pts.len() < 3 {
            return Err(Error::Fit(format!(
                "only {} tail points with >= {min_count} exceedances",
                pts.len()
            )));
        }
        let total = self.total as f64;
        let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
        let ys: Vec<f64> = pts.iter().map(|p| (p.1 as f64 / total).ln()).collect();
        let ws: Vec<f64> = pts.iter().map(|p| p.1 as f64).collect();
        let LinearFit {
            slope, slope_se, ..
        } = least_squares(&xs, &ys, Some(&ws))?;
        Ok(TailFit {
            slope,
            slope_se,
            points: pts.len(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn size_biased_inverse_cdf() {
        assert_eq!(sample_size_biased_type(4.0, 1.0).unwrap(), 1.0);
        let x = sample_size_biased_type(3.0, 0.5).unwrap();
        assert!((x - 0.25).abs() < 1e-15);
        // F(x) = x^{(γ-2)/(γ-1)} returns u
        assert!((x.powf(0.5) - 0.5).abs() < 1e-15);
        assert!(sample_size_biased_type(3.0, 0.0).is_err());
        assert!(sample_size_biased_type(2.0, 0.5).is_err());
    }

    #[test]
    fn zero_kernel_walks() {
        let p = ModelParams::chung_lu(4.0, 0.0).unwrap();
        let mut rng = stream(1, 0);
        for _ in 0..100 {
            assert_eq!(sample_offspring(&p, &mut rng).unwrap().count, 0);
            let out = explore(&p, Root::SizeBiased, 100, &mut rng).unwrap();
            assert_eq!(out.cluster_size, Some(1));
            assert!(!out.survived);
        }
    }

    #[test]
    fn root_parsing() {
        assert_eq!("size-biased".parse::<Root>().unwrap(), Root::SizeBiased);
        assert_eq!("fixed:0.5".parse::<Root>().unwrap(), Root::FixedType(0.5));
        assert!("fixed:0".parse::<Root>().is_err());
        assert!("fixed:abc".parse::<Root>().is_err());
        assert!("uniform".parse::<Root>().is_err());
    }

    #[test]
    fn step_cap_validation() {
        let p = ModelParams::chung_lu(4.0, 0.5).unwrap();
        let mut rng = stream(1, 0);
        assert!(explore(&p, Root::SizeBiased, 0, &mut rng).is_err());
        assert!(explore(&p, Root::FixedType(1.5), 10, &mut rng).is_err());
    }

    #[test]
    fn outcome_invariants() {
        let p = ModelParams::chung_lu(3.5, 0.4).unwrap();
        let mut rng = stream(5, 0);
        for _ in 0..2000 {
            let out = explore(&p, Root::SizeBiased, 500, &mut rng).unwrap();
            if out.survived {
                assert_eq!(out.cluster_size, None);
                assert!(out.steps <= 500);
            } else {
                assert_eq!(out.cluster_size, Some(out.steps));
                assert!(out.steps >= 1 && out.steps <= 500);
            }
        }
    }

    #[test]
    fn poisson_edge_cases() {
        let mut rng = stream(2, 0);
        assert_eq!(poisson(0.0, &mut rng), 0);
        assert_eq!(poisson(-1.0, &mut rng), 0);
        let big = 1e18;
        let draw = poisson(big, &mut rng) as f64;
        assert!((draw - big).abs() < 10.0 * big.sqrt());
        let huge = poisson(1e300, &mut rng);
        assert_eq!(huge, u64::MAX);
    }

    #[test]
    fn tail_counter_counts_strict_exceedances() {
        let mut t = TailCounter::new(vec![1.0, 2.0, 5.0]);
        for v in [0, 1, 2, 3, 5, 6, 100] {
            t.record(v);
        }
        assert_eq!(t.exceedances(), vec![(1.0, 5), (2.0, 4), (5.0, 2)]);
        assert_eq!(t.total(), 7);
    }

    #[test]
    fn tail_fit_recovers_exact_power_law() {
        // counts following 1e6 * x^{-2} exactly
        let grid = log_grid(10.0, 1000.0, 10);
        assert_eq!(grid.len(), 21);
        let mut t = TailCounter::new(grid.clone());
        t.total = 1_000_000_000;
        let mut prev = t.total;
        for (k, &x) in grid.iter().enumerate() {
            let above = (1e9 * x.powi(-2)).round() as u64;
            t.buckets[k] = prev - above;
            prev = above;
        }
        t.buckets[grid.len()] = prev;
        let fit = t.fit(20).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-3, "{fit:?}");
    }
}
