//! One-dimensional quadrature.
//!
//! Two independent schemes live here:
//!
//! * [`integrate`]: globally adaptive 15-point Gauss-Kronrod with interval
//!   halving (QUADPACK's QAG strategy, error estimate rescaled the same way).
//!   [`integrate_power_weighted`] puts an algebraic endpoint weight `z^alpha`
//!   in front of it by mapping `s = z^(alpha+1)`, which turns an integrable
//!   endpoint singularity into a bounded integrand.
//! * [`tanh_sinh`]: double-exponential quadrature. It copes with algebraic
//!   endpoint singularities directly, so it is used wherever a second,
//!   structurally different evaluation of the same integral is wanted.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerances for the adaptive schemes. A result is accepted once its
/// estimated absolute error is at most `max(abs_tol, rel_tol * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of times a single interval may be halved.
    pub max_subdivisions: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 60,
        }
    }
}

impl QuadratureConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: u32) -> Result<Self, QuadratureError> {
        let cfg = QuadratureConfig {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        let ok = |t: f64| t.is_finite() && t > 0.0;
        if ok(self.abs_tol) && ok(self.rel_tol) {
            Ok(())
        } else {
            Err(QuadratureError::InvalidConfig {
                abs_tol: self.abs_tol,
                rel_tol: self.rel_tol,
            })
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    /// Intervals (Gauss-Kronrod) or nodes (tanh-sinh) used.
    pub evaluations: usize,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum QuadratureError {
    #[error(
        "quadrature did not converge: estimated error {achieved:e} exceeds requested {requested:e} \
         (value {value:e}, {evaluations} evaluations)"
    )]
    NotConverged {
        value: f64,
        achieved: f64,
        requested: f64,
        evaluations: usize,
    },

    #[error("integrand is not finite at x = {at:e}")]
    NonFinite { at: f64 },

    #[error("tolerances must be positive and finite (abs_tol={abs_tol:e}, rel_tol={rel_tol:e})")]
    InvalidConfig { abs_tol: f64, rel_tol: f64 },

    #[error("power weight exponent {alpha} must exceed -1")]
    NonIntegrableWeight { alpha: f64 },
}

// Hard ceiling on live intervals so that a pathological integrand cannot
// exhaust memory before max_subdivisions trips.
const MAX_INTERVALS: usize = 1 << 16;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn checked<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64, QuadratureError> {
    let y = f(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(QuadratureError::NonFinite { at: x })
    }
}

fn gauss_kronrod_15<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    depth: u32,
) -> Result<Segment, QuadratureError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = checked(f, center)?;

    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    #[allow(clippy::needless_range_loop)]
    for j in 0..3 {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let f1 = checked(f, center - dx)?;
        let f2 = checked(f, center + dx)?;
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_g += WG[j] * (f1 + f2);
        res_k += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let f1 = checked(f, center - dx)?;
        let f2 = checked(f, center + dx)?;
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_k += WGK[jtwm1] * (f1 + f2);
        res_abs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }

    Ok(Segment {
        a,
        b,
        value,
        error,
        depth,
    })
}

/// Integrate `f` over `[a, b]` by globally adaptive Gauss-Kronrod: the
/// interval with the largest error estimate is halved until the summed
/// error meets the configured tolerance.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate, QuadratureError> {
    cfg.validate()?;
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }

    let first = gauss_kronrod_15(&f, a, b, 0)?;
    let mut total_value = first.value;
    let mut total_error = first.error;
    let mut live = BinaryHeap::new();
    live.push(first);
    let mut frozen: Vec<Segment> = Vec::new();
    let mut frozen_error = 0.0;
    let mut evaluations = 1;

    loop {
        let requested = cfg.target(total_value);
        if total_error <= requested {
            break;
        }
        if frozen_error > requested || live.is_empty() {
            return Err(QuadratureError::NotConverged {
                value: total_value,
                achieved: total_error,
                requested,
                evaluations,
            });
        }

        let worst = live.pop().expect("live heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        let splittable = worst.depth < cfg.max_subdivisions
            && live.len() + frozen.len() < MAX_INTERVALS
            && mid > worst.a
            && mid < worst.b;
        if !splittable {
            frozen_error += worst.error;
            frozen.push(worst);
            continue;
        }

        let left = gauss_kronrod_15(&f, worst.a, mid, worst.depth + 1)?;
        let right = gauss_kronrod_15(&f, mid, worst.b, worst.depth + 1)?;
        evaluations += 2;
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        live.push(left);
        live.push(right);
    }

    // Re-sum to shed the drift of the running totals.
    let value = live.iter().chain(frozen.iter()).map(|s| s.value).sum();
    let error = live.iter().chain(frozen.iter()).map(|s| s.error).sum();
    Ok(Estimate {
        value,
        error,
        evaluations,
    })
}

/// `∫₀¹ z^alpha f(z) dz` for `alpha > -1`, computed as
/// `(1/p) ∫₀¹ f(s^(1/p)) ds` with `p = alpha + 1`.
///
/// `f` may be evaluated at `z = 0` when `s^(1/p)` underflows.
pub fn integrate_power_weighted<F: Fn(f64) -> f64>(
    f: F,
    alpha: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate, QuadratureError> {
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(QuadratureError::NonIntegrableWeight { alpha });
    }
    let p = alpha + 1.0;
    let inv_p = 1.0 / p;
    let est = integrate(|s: f64| f(s.powf(inv_p)), 0.0, 1.0, cfg)?;
    Ok(Estimate {
        value: est.value * inv_p,
        error: est.error * inv_p,
        evaluations: est.evaluations,
    })
}

// Abscissae beyond |t| = 6 sit closer than ~1e-300 to the endpoints.
const TANH_SINH_T_MAX: f64 = 6.0;
const TANH_SINH_MAX_LEVEL: u32 = 12;

/// Double-exponential (tanh-sinh) quadrature over `[a, b]`.
///
/// Nodes are placed by their distance to the nearer endpoint, so integrands
/// with algebraic endpoint singularities are sampled without cancellation.
/// The step is halved until successive levels agree to the configured
/// tolerance; the returned error is that difference.
pub fn tanh_sinh<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate, QuadratureError> {
    cfg.validate()?;
    let width = b - a;
    if width == 0.0 {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }

    let term = |t: f64| -> Result<f64, QuadratureError> {
        let u = FRAC_PI_2 * t.sinh();
        // sigma and its complement, each computed without cancellation
        let sigma = 1.0 / (1.0 + (-2.0 * u).exp());
        let sigma_c = 1.0 / (1.0 + (2.0 * u).exp());
        let weight = width * 2.0 * sigma * sigma_c * FRAC_PI_2 * t.cosh();
        let x = if t < 0.0 {
            a + width * sigma
        } else {
            b - width * sigma_c
        };
        if weight == 0.0 || x <= a || x >= b {
            return Ok(0.0);
        }
        let y = f(x);
        if y.is_finite() {
            Ok(weight * y)
        } else {
            Err(QuadratureError::NonFinite { at: x })
        }
    };

    let mut h = 1.0;
    let mut sum = term(0.0)?;
    let mut evaluations = 1;
    let mut k = 1.0;
    while k * h <= TANH_SINH_T_MAX {
        sum += term(k * h)? + term(-k * h)?;
        evaluations += 2;
        k += 1.0;
    }
    let mut estimate = h * sum;
    let mut error = f64::INFINITY;

    for _ in 1..=TANH_SINH_MAX_LEVEL {
        h *= 0.5;
        let mut k = 1.0;
        while k * h <= TANH_SINH_T_MAX {
            sum += term(k * h)? + term(-k * h)?;
            evaluations += 2;
            k += 2.0;
        }
        let next = h * sum;
        error = (next - estimate).abs();
        estimate = next;
        if error <= cfg.target(estimate) {
            return Ok(Estimate {
                value: estimate,
                error,
                evaluations,
            });
        }
    }

    Err(QuadratureError::NotConverged {
        value: estimate,
        achieved: error,
        requested: cfg.target(estimate),
        evaluations,
    })
}
