use chunglu::kernel::{
    asymptotic_rho_bar, b_constant, b_constant_quadrature, c_gamma, er_rho, g, g_raw, psi_moment,
    rho_bar_from_a, s_infinity, solve_a_theta, theta_c, theta_c_quadrature, DEFAULT_ROOT_TOL,
};
use chunglu::quadrature::tanh_sinh;
use chunglu::{ModelParams, QuadratureConfig};
use proptest::prelude::*;
use statrs::function::gamma::gamma as gamma_fn;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

const GAMMAS: [f64; 7] = [2.2, 2.5, 2.8, 3.0, 3.5, 4.0, 5.0];

#[test]
fn g_substituted_and_raw_forms_agree() {
    for &gamma in &GAMMAS {
        for &x in &[1e-6, 1e-3, 0.05, 0.3, 1.0, 4.0, 20.0] {
            let a = g(x, gamma, &cfg()).unwrap();
            let b = g_raw(x, gamma, &cfg()).unwrap();
            assert!((a - b).abs() <= 1e-8, "gamma={gamma} x={x}: {a} vs {b}");
        }
    }
}

#[test]
fn theta_c_matches_quadrature() {
    for &gamma in &[3.2, 3.5, 4.0, 5.0, 7.0] {
        let closed = theta_c(gamma).unwrap();
        let quad = theta_c_quadrature(gamma, &cfg()).unwrap();
        assert!(
            (closed - quad).abs() <= 1e-10,
            "gamma={gamma}: {closed} vs {quad}"
        );
    }
    assert_eq!(theta_c(2.5).unwrap(), 0.0);
    assert_eq!(theta_c(3.0).unwrap(), 0.0);
}

#[test]
fn b_matches_quadrature() {
    for &gamma in &GAMMAS {
        let closed = b_constant(gamma).unwrap();
        let quad = b_constant_quadrature(gamma, &cfg()).unwrap();
        assert!((closed - quad).abs() <= 1e-10 * closed, "gamma={gamma}");
    }
}

#[test]
fn c_gamma_matches_gamma_function() {
    let c = c_gamma(2.5, &cfg()).unwrap();
    assert!((c - 2.0 * std::f64::consts::PI.sqrt()).abs() <= 1e-8, "{c}");
    for &gamma in &[2.1, 2.3, 2.7, 2.9] {
        let c = c_gamma(gamma, &cfg()).unwrap();
        let oracle = -gamma_fn(2.0 - gamma);
        assert!(
            (c - oracle).abs() <= 1e-8 * oracle,
            "gamma={gamma}: {c} vs {oracle}"
        );
    }
}

#[test]
fn g_small_x_follows_power_law() {
    // g(x) = (γ-1) x^(γ-2) ∫_x^∞ y^(1-γ)(1 - e^(-y)) dy
    let x = 1e-6;
    for &gamma in &[2.3, 2.5] {
        let ratio = g(x, gamma, &cfg()).unwrap() / x.powf(gamma - 2.0);
        let c = (gamma - 1.0) * c_gamma(gamma, &cfg()).unwrap();
        assert!(
            (ratio / c - 1.0).abs() < 0.02,
            "gamma={gamma}: {ratio} vs {c}"
        );
    }
    // near γ = 3 the missing piece ∫_0^x ≈ x^(3-γ)/(3-γ) is still a few percent
    for &gamma in &[2.8, 2.9] {
        let ratio = g(x, gamma, &cfg()).unwrap() / x.powf(gamma - 2.0);
        let c = c_gamma(gamma, &cfg()).unwrap() - x.powf(3.0 - gamma) / (3.0 - gamma);
        let c = (gamma - 1.0) * c;
        assert!(
            (ratio / c - 1.0).abs() < 1e-3,
            "gamma={gamma}: {ratio} vs {c}"
        );
    }
}

#[test]
fn g_derivative_at_zero_is_second_moment() {
    // g'(0) = ∫ψ² for γ > 3
    for &gamma in &[3.5, 4.0, 5.0] {
        let x = 1e-7;
        let slope = g(x, gamma, &cfg()).unwrap() / x;
        let m2 = psi_moment(2.0, gamma, &cfg()).unwrap();
        assert!((slope / m2 - 1.0).abs() < 1e-3, "gamma={gamma}");
    }
}

#[test]
fn solver_residual_and_fixed_point() {
    for &gamma in &GAMMAS {
        for &theta in &[0.05, 0.2, 0.5, 1.0, 3.0] {
            let p = ModelParams::chung_lu(gamma, theta).unwrap();
            let sol = solve_a_theta(&p, &cfg(), DEFAULT_ROOT_TOL).unwrap();
            assert!(
                sol.residual <= 1e-10,
                "gamma={gamma} theta={theta}: {sol:?}"
            );
            if theta <= theta_c(gamma).unwrap() {
                assert_eq!(sol.rho_bar, 0.0);
            } else {
                assert!(sol.a_theta > 0.0 && sol.rho_bar > 0.0 && sol.rho_bar < 1.0);
                let again = theta * g(sol.a_theta, gamma, &cfg()).unwrap();
                assert!((again - sol.a_theta).abs() <= 1e-10);
            }
        }
    }
}

#[test]
fn rho_bar_matches_independent_quadrature() {
    let p = ModelParams::chung_lu(2.5, 0.3).unwrap();
    let sol = solve_a_theta(&p, &cfg(), DEFAULT_ROOT_TOL).unwrap();
    let a = sol.a_theta;
    let oracle = tanh_sinh(
        |u: f64| -(-a * u.powf(-1.0 / 1.5)).exp_m1(),
        0.0,
        1.0,
        &cfg(),
    )
    .unwrap()
    .value;
    assert!((sol.rho_bar - oracle).abs() < 1e-9);
    assert_eq!(rho_bar_from_a(a, 2.5, &cfg()).unwrap(), sol.rho_bar);
}

#[test]
fn survival_profile_averages_to_rho_bar() {
    let p = ModelParams::chung_lu(4.0, 0.5).unwrap();
    let sol = solve_a_theta(&p, &cfg(), DEFAULT_ROOT_TOL).unwrap();
    let avg = tanh_sinh(
        |a: f64| s_infinity(a.max(1e-300), &sol, &p).unwrap(),
        0.0,
        1.0,
        &cfg(),
    )
    .unwrap()
    .value;
    assert!((avg - sol.rho_bar).abs() < 1e-9);
    // A_θ = θ ∫ψ S∞
    let weighted = tanh_sinh(
        |a: f64| {
            let a = a.max(1e-300);
            a.powf(-1.0 / 3.0) * s_infinity(a, &sol, &p).unwrap()
        },
        0.0,
        1.0,
        &cfg(),
    )
    .unwrap()
    .value;
    assert!((0.5 * weighted - sol.a_theta).abs() < 1e-9);
}

#[test]
fn near_critical_laws() {
    // 2 < γ < 3 and γ > 4: solver over asymptotic tends to 1
    for (gamma, thetas) in [(2.5, [1e-3, 1e-4, 1e-5]), (5.0, [0.505, 0.5005, 0.50005])] {
        let mut last = f64::INFINITY;
        for theta in thetas {
            let p = ModelParams::chung_lu(gamma, theta).unwrap();
            let solved = solve_a_theta(&p, &cfg(), DEFAULT_ROOT_TOL).unwrap().rho_bar;
            let approx = asymptotic_rho_bar(&p, &cfg()).unwrap();
            let err = (solved / approx - 1.0).abs();
            assert!(err < last, "gamma={gamma} theta={theta}: ratio error {err}");
            last = err;
        }
        assert!(last < 0.01, "gamma={gamma}: {last}");
    }
    // γ = 3: log ρ̄ + 1/(2θ) stays bounded as θ shrinks
    let offsets: Vec<f64> = [0.1, 0.07, 0.05]
        .iter()
        .map(|&theta| {
            let p = ModelParams::chung_lu(3.0, theta).unwrap();
            let rho = solve_a_theta(&p, &cfg(), DEFAULT_ROOT_TOL).unwrap().rho_bar;
            rho.ln() + 0.5 / theta
        })
        .collect();
    assert!((offsets[0] - offsets[2]).abs() < 1.5, "{offsets:?}");
    let p = ModelParams::chung_lu(3.5, 0.5).unwrap();
    assert!(asymptotic_rho_bar(&p, &cfg()).is_err());
}

#[test]
fn er_fixed_point() {
    let rho = er_rho(2.0, 1e-14).unwrap();
    assert!((rho - 0.796_812_130_020_022_2).abs() < 1e-12);
    assert!((1.0 - rho - (-2.0 * rho).exp()).abs() < 1e-13);
    assert_eq!(er_rho(1.0, 1e-12).unwrap(), 0.0);
    assert_eq!(er_rho(0.5, 1e-12).unwrap(), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn g_is_increasing_concave_and_bounded(gamma in 2.05f64..6.0, x in 1e-4f64..50.0) {
        let c = cfg();
        let (g0, g1, g2) = (
            g(x, gamma, &c).unwrap(),
            g(1.5 * x, gamma, &c).unwrap(),
            g(2.0 * x, gamma, &c).unwrap(),
        );
        let b = b_constant(gamma).unwrap();
        // g saturates at B to machine precision for large x
        let slack = 1e-12 * b;
        prop_assert!(g0 > 0.0 && g0 <= g1 + slack && g1 <= g2 + slack);
        prop_assert!(g2 <= b + slack);
        // concavity along x, 1.5x, 2x
        prop_assert!(g1 >= 0.5 * (g0 + g2) - slack);
    }

    #[test]
    fn rho_bar_increases_with_theta(gamma in 2.1f64..5.5, t in 0.01f64..2.0) {
        let c = cfg();
        let a = solve_a_theta(&ModelParams::chung_lu(gamma, t).unwrap(), &c, DEFAULT_ROOT_TOL).unwrap();
        let b = solve_a_theta(&ModelParams::chung_lu(gamma, 1.1 * t).unwrap(), &c, DEFAULT_ROOT_TOL).unwrap();
        prop_assert!(a.rho_bar <= b.rho_bar);
        prop_assert!((0.0..=1.0).contains(&a.rho_bar));
        if t > theta_c(gamma).unwrap() {
            prop_assert!(a.rho_bar < b.rho_bar);
        }
    }
}
