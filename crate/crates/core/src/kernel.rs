//! Deterministic mathematics of the rank-1 kernel `κ(x, y) = θ ψ(x) ψ(y)`
//! with `ψ(x) = x^(-1/(γ-1))`: the critical strength, the function `g`, the
//! fixed point `A = θ g(A)`, the survival profile and the giant fraction,
//! plus the near-critical laws and the Erdős–Rényi fixed point.
//!
//! Everything here is a pure function of its arguments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_power_weighted, tanh_sinh, QuadratureConfig};

/// Default absolute tolerance on `|A - θ g(A)|`.
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;

// |γ - 3| below this is treated as the logarithmic γ = 3 regime.
const GAMMA_THREE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Variant {
    ChungLu,
    ErdosRenyi { lambda: f64 },
}

/// Kernel parameters. For [`Variant::ErdosRenyi`] the kernel is the constant
/// `λ`, `gamma` is NaN and `theta` mirrors `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub gamma: f64,
    pub theta: f64,
    pub variant: Variant,
}

impl ModelParams {
    pub fn chung_lu(gamma: f64, theta: f64) -> Result<Self> {
        let params = ModelParams {
            gamma,
            theta,
            variant: Variant::ChungLu,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn erdos_renyi(lambda: f64) -> Result<Self> {
        let params = ModelParams {
            gamma: f64::NAN,
            theta: lambda,
            variant: Variant::ErdosRenyi { lambda },
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        match self.variant {
            Variant::ChungLu => {
                check_gamma(self.gamma)?;
                if !(self.theta >= 0.0 && self.theta.is_finite()) {
                    return Err(Error::domain(format!(
                        "theta must be finite and >= 0, got {}",
                        self.theta
                    )));
                }
            }
            Variant::ErdosRenyi { lambda } => {
                if !(lambda >= 0.0 && lambda.is_finite()) {
                    return Err(Error::domain(format!(
                        "lambda must be finite and >= 0, got {lambda}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_chung_lu(&self) -> bool {
        matches!(self.variant, Variant::ChungLu)
    }

    /// `κ(x, y)` on `(0, 1]²`.
    pub fn kernel(&self, x: f64, y: f64) -> f64 {
        match self.variant {
            Variant::ChungLu => {
                let e = -1.0 / (self.gamma - 1.0);
                self.theta * x.powf(e) * y.powf(e)
            }
            Variant::ErdosRenyi { lambda } => lambda,
        }
    }
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 2.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "gamma must be finite and > 2, got {gamma}"
        )))
    }
}

fn require_chung_lu(params: &ModelParams) -> Result<()> {
    params.validate()?;
    if params.is_chung_lu() {
        Ok(())
    } else {
        Err(Error::domain(
            "operation is defined for the Chung-Lu kernel only",
        ))
    }
}

/// `ψ(x) = x^(-1/(γ-1))` for `0 < x ≤ 1`.
pub fn psi(x: f64, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::domain(format!("psi needs 0 < x <= 1, got {x}")));
    }
    Ok(x.powf(-1.0 / (gamma - 1.0)))
}

/// `B = ∫₀¹ ψ = (γ-1)/(γ-2)`, the mean degree per unit θ.
pub fn b_constant(gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok((gamma - 1.0) / (gamma - 2.0))
}

/// `∫₀¹ ψ(x)^k dx` by tanh-sinh quadrature on the raw singular integrand.
/// Diverges (domain error) unless `k < γ - 1`.
pub fn psi_moment(k: f64, gamma: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_gamma(gamma)?;
    let exponent = -k / (gamma - 1.0);
    if !(exponent > -1.0) {
        return Err(Error::domain(format!(
            "∫ψ^{k} diverges for gamma = {gamma} (needs k < gamma - 1)"
        )));
    }
    Ok(tanh_sinh(|x: f64| x.powf(exponent), 0.0, 1.0, cfg)?.value)
}

/// [`b_constant`] evaluated by quadrature instead of the closed form.
pub fn b_constant_quadrature(gamma: f64, cfg: &QuadratureConfig) -> Result<f64> {
    psi_moment(1.0, gamma, cfg)
}

/// Critical kernel strength `θ_c = 1/∫ψ²`: `(γ-3)/(γ-1)` for `γ > 3` and
/// exactly zero for `2 < γ ≤ 3`, where `∫ψ²` diverges.
pub fn theta_c(gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if gamma <= 3.0 {
        Ok(0.0)
    } else {
        Ok((gamma - 3.0) / (gamma - 1.0))
    }
}

/// [`theta_c`] with `∫ψ²` computed by quadrature.
pub fn theta_c_quadrature(gamma: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_gamma(gamma)?;
    if gamma <= 3.0 {
        return Ok(0.0);
    }
    Ok(1.0 / psi_moment(2.0, gamma, cfg)?)
}

fn check_x(x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("g needs a finite x >= 0, got {x}")))
    }
}

/// `g(x) = ∫₀¹ ψ(b) (1 - exp(-x ψ(b))) db`, evaluated in the form
/// `(γ-1) ∫₀¹ z^(γ-3) (1 - exp(-x/z)) dz` obtained from `z = b^(1/(γ-1))`.
/// The algebraic weight `z^(γ-3)` is handled by the power-weighted rule.
pub fn g(x: f64, gamma: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_gamma(gamma)?;
    check_x(x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    let est = integrate_power_weighted(|z: f64| -(-x / z).exp_m1(), gamma - 3.0, cfg)?;
    Ok((gamma - 1.0) * est.value)
}

/// `g` evaluated directly on the singular `b`-integrand with tanh-sinh
/// quadrature. Used to cross-check [`g`].
pub fn g_raw(x: f64, gamma: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_gamma(gamma)?;
    check_x(x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    let e = -1.0 / (gamma - 1.0);
    let est = tanh_sinh(
        |b: f64| {
            let p = b.powf(e);
            -p * (-x * p).exp_m1()
        },
        0.0,
        1.0,
        cfg,
    )?;
    Ok(est.value)
}

/// `C_γ = ∫₀^∞ y^(1-γ) (1 - e^(-y)) dy` for `2 < γ < 3`, split at `y = 1`.
///
/// The piece on `[1, ∞)` is mapped to `(0, 1]` by `y = 1/t`. Both pieces
/// carry an algebraic endpoint weight. The closed form is `-Γ(2-γ)`.
pub fn c_gamma(gamma: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(gamma > 2.0 && gamma < 3.0) {
        return Err(Error::domain(format!(
            "C_gamma is finite only for 2 < gamma < 3, got {gamma}"
        )));
    }
    // (1 - e^{-y}) / y, continuous at 0
    let near = |y: f64| {
        if y < 1e-8 {
            1.0 - 0.5 * y
        } else {
            -(-y).exp_m1() / y
        }
    };
    let head = integrate_power_weighted(near, 2.0 - gamma, cfg)?;
    let tail = integrate_power_weighted(
        |t: f64| {
            if t == 0.0 {
                1.0
            } else {
                -(-1.0 / t).exp_m1()
            }
        },
        gamma - 3.0,
        cfg,
    )?;
    Ok(head.value + tail.value)
}

/// Output of [`solve_a_theta`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointSolution {
    pub a_theta: f64,
    pub rho_bar: f64,
    pub theta_c: f64,
    /// `|A - θ g(A)|` at the returned `A`.
    pub residual: f64,
    pub iterations: u32,
    pub converged: bool,
}

impl FixedPointSolution {
    fn zero(theta_c: f64) -> Self {
        FixedPointSolution {
            a_theta: 0.0,
            rho_bar: 0.0,
            theta_c,
            residual: 0.0,
            iterations: 0,
            converged: true,
        }
    }
}

const MAX_BISECTIONS: u32 = 400;

/// Largest nonnegative root of `A = θ g(A)` and the giant fraction it implies.
///
/// For `θ ≤ θ_c` zero is the largest fixed point and is returned without a
/// search. Above `θ_c`, `f(A) = θ g(A) - A` is positive on `(0, A*)` and
/// negative beyond (g is concave with `g(0) = 0`), and `f(θB) < 0` because
/// `g < B`. The lower end of the bracket is found by shrinking from `θB`
/// until `f` turns positive; bisection then runs to floating-point
/// resolution.
pub fn solve_a_theta(
    params: &ModelParams,
    cfg: &QuadratureConfig,
    root_tol: f64,
) -> Result<FixedPointSolution> {
    require_chung_lu(params)?;
    if !(root_tol > 0.0) {
        return Err(Error::domain(format!(
            "root_tol must be > 0, got {root_tol}"
        )));
    }
    let ModelParams { gamma, theta, .. } = *params;
    let tc = theta_c(gamma)?;
    if theta <= tc {
        return Ok(FixedPointSolution::zero(tc));
    }

    let f = |a: f64| -> Result<f64> { Ok(theta * g(a, gamma, cfg)? - a) };
    let mut hi = theta * b_constant(gamma)?;
    let f_hi = f(hi)?;
    if !(f_hi < 0.0) {
        return Err(Error::Bracket {
            gamma,
            theta,
            lo: hi,
            hi,
            f_lo: f_hi,
            f_hi,
        });
    }

    let mut lo = hi;
    let mut f_lo = f_hi;
    let mut iterations = 0;
    while f_lo <= 0.0 {
        let next = lo * (1.0 / 256.0);
        if next < 1e-300 {
            return Err(Error::Bracket {
                gamma,
                theta,
                lo,
                hi,
                f_lo,
                f_hi,
            });
        }
        hi = lo;
        lo = next;
        f_lo = f(lo)?;
        iterations += 1;
    }

    while iterations < MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let (r_lo, r_hi) = (f(lo)?.abs(), f(hi)?.abs());
    let (a_theta, residual) = if r_lo <= r_hi { (lo, r_lo) } else { (hi, r_hi) };
    Ok(FixedPointSolution {
        a_theta,
        rho_bar: rho_bar_from_a(a_theta, gamma, cfg)?,
        theta_c: tc,
        residual,
        iterations,
        converged: residual <= root_tol,
    })
}

/// `ρ̄ = ∫₀¹ (1 - exp(-A ψ(a))) da` for a given `A`.
///
/// The integrand is bounded and smooth on `[0, 1]`: it tends to 1 with
/// all derivatives vanishing as `a → 0`.
pub fn rho_bar_from_a(a_theta: f64, gamma: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_gamma(gamma)?;
    if !(a_theta >= 0.0 && a_theta.is_finite()) {
        return Err(Error::domain(format!(
            "A must be finite and >= 0, got {a_theta}"
        )));
    }
    if a_theta == 0.0 {
        return Ok(0.0);
    }
    let e = -1.0 / (gamma - 1.0);
    let est = integrate(|a: f64| -(-a_theta * a.powf(e)).exp_m1(), 0.0, 1.0, cfg)?;
    Ok(est.value.clamp(0.0, 1.0))
}

/// Survival probability of the exploration started from type `a`:
/// `S∞(a) = 1 - exp(-A ψ(a))`.
pub fn s_infinity(a: f64, solution: &FixedPointSolution, params: &ModelParams) -> Result<f64> {
    require_chung_lu(params)?;
    let p = psi(a, params.gamma)?;
    Ok(-(-solution.a_theta * p).exp_m1())
}

/// Leading-order giant fraction near criticality.
///
/// * `2 < γ < 3`: `B ((γ-1) C_γ θ)^(1/(3-γ))`, from
///   `g(x) ~ (γ-1) C_γ x^(γ-2)` as `x → 0` and `ρ̄ ~ B A`.
/// * `γ = 3`: `exp(-1/(2θ))` with unit prefactor; the constant is left to
///   the caller.
/// * `γ > 4`: `B · 2 g'(0)² / (-g''(0)) · (θ - θ_c)`, with `g'(0) = ∫ψ²` and
///   `g''(0) = -∫ψ³` computed by quadrature. The second-order expansion
///   `A = θ g'(0) A + θ g''(0) A²/2` gives `A = 2(θ g'(0) - 1)/(-θ g''(0))`,
///   and `θ → θ_c = 1/g'(0)` turns this into the coefficient above.
/// * `3 < γ ≤ 4`: `g''(0)` is infinite and no closed law is offered.
pub fn asymptotic_rho_bar(params: &ModelParams, cfg: &QuadratureConfig) -> Result<f64> {
    require_chung_lu(params)?;
    let ModelParams { gamma, theta, .. } = *params;
    let b = b_constant(gamma)?;
    if (gamma - 3.0).abs() <= GAMMA_THREE_TOL {
        if theta <= 0.0 {
            return Err(Error::domain("near-critical law needs theta > theta_c = 0"));
        }
        return Ok((-1.0 / (2.0 * theta)).exp());
    }
    if gamma < 3.0 {
        if theta <= 0.0 {
            return Err(Error::domain("near-critical law needs theta > theta_c = 0"));
        }
        let c = c_gamma(gamma, cfg)?;
        return Ok(b * ((gamma - 1.0) * c * theta).powf(1.0 / (3.0 - gamma)));
    }
    if gamma <= 4.0 {
        return Err(Error::UnsupportedRegime { gamma });
    }
    let tc = theta_c(gamma)?;
    if theta <= tc {
        return Err(Error::domain(format!(
            "near-critical law needs theta > theta_c = {tc}, got {theta}"
        )));
    }
    let g1 = psi_moment(2.0, gamma, cfg)?;
    let g2 = -psi_moment(3.0, gamma, cfg)?;
    Ok(b * 2.0 * g1 * g1 / (-g2) * (theta - tc))
}

/// Giant fraction of the Erdős–Rényi graph `G(n, λ/n)`: `ρ = 1 - ζ` where
/// `ζ = exp(-λ(1 - ζ))` is the smallest fixed point in `[0, 1]`.
///
/// Bisection on `h(ρ) = 1 - ρ - exp(-λρ)`, which is positive on `(0, ρ)`
/// and negative beyond when `λ > 1`.
pub fn er_rho(lambda: f64, tol: f64) -> Result<f64> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::domain(format!(
            "lambda must be finite and >= 0, got {lambda}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tol must be > 0, got {tol}")));
    }
    if lambda <= 1.0 {
        return Ok(0.0);
    }
    let h = |rho: f64| -(-lambda * rho).exp_m1() - rho;
    // |h'| <= max(λ - 1, 1) on [0, 1]
    let slope_bound = (lambda - 1.0).max(1.0);
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || (hi - lo) * slope_bound <= tol {
            break;
        }
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if h(lo).abs() <= h(hi).abs() { lo } else { hi })
}

/// Analytic giant fraction for either variant, with the fixed point when
/// the kernel is rank-1.
pub fn analytic_giant_fraction(
    params: &ModelParams,
    cfg: &QuadratureConfig,
) -> Result<(f64, Option<FixedPointSolution>)> {
    params.validate()?;
    match params.variant {
        Variant::ErdosRenyi { lambda } => Ok((er_rho(lambda, 1e-14)?, None)),
        Variant::ChungLu => {
            let sol = solve_a_theta(params, cfg, DEFAULT_ROOT_TOL)?;
            Ok((sol.rho_bar, Some(sol)))
        }
    }
}
