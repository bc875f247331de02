use std::f64::consts::PI;

use tclfano::bath::SpectralParams;
use tclfano::coefficients::{coefficients, gamma4, noise_integral, omega_r4, steady_state, Order};
use tclfano::green::ExactGreen;
use tclfano::numerics::{build_frequency_quadrature, solve_volterra, QuadratureOptions, TimeGrid};
use tclfano::Complex64;

fn weak() -> SpectralParams {
    SpectralParams::default()
}

fn quad(params: &SpectralParams, horizon: f64) -> tclfano::numerics::FrequencyQuadrature {
    build_frequency_quadrature(params, &QuadratureOptions::default().with_horizon(horizon)).unwrap()
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    rec(
        f,
        a,
        b,
        fa,
        fm,
        fb,
        (b - a) / 6.0 * (fa + 4.0 * fm + fb),
        tol,
        50,
    )
}

#[test]
fn quadrature_reproduces_lorentzian_mass_on_truncated_range() {
    let p = weak();
    let q = quad(&p, 20.0);
    let numeric = q.integrate(|w| p.lorentzian_density(w));
    let (lo, hi) = (0.0 - p.peak(), q.cutoff() - p.peak());
    let arctan =
        p.gamma0 / (2.0 * PI) * p.lambda * ((hi / p.lambda).atan() - (lo / p.lambda).atan());
    let simpson = adaptive_simpson(&|w| p.lorentzian_density(w), 0.0, q.cutoff(), 1e-14);
    assert!((arctan - 0.095908).abs() < 5e-7, "{arctan}");
    assert!((numeric - arctan).abs() < 1e-12, "{numeric} vs {arctan}");
    assert!((numeric - simpson).abs() < 1e-11, "{numeric} vs {simpson}");
}

#[test]
fn thermal_weight_is_finite_in_the_infrared() {
    let p = weak();
    let mut prev = f64::INFINITY;
    for k in 1..=12 {
        let w = 10f64.powi(-k);
        let v = p.thermal_weight(w);
        assert!(v.is_finite() && v >= 0.0 && v < prev);
        prev = v;
    }
    assert!(prev < 1e-10);
    let ohmic = SpectralParams {
        big_omega: 1.0,
        ..p
    };
    let limit = ohmic.lorentzian_density(0.0) * ohmic.temperature / ohmic.omega_m;
    assert!((ohmic.thermal_weight(1e-9) - limit).abs() < 1e-9 * limit.max(1.0) + 1e-10);
    assert_eq!(ohmic.thermal_weight(0.0), limit);
}

#[test]
fn volterra_self_convergence_is_second_order() {
    let p = SpectralParams {
        delta: 0.0,
        ..weak()
    };
    let kernel = |t: f64| Complex64::new(0.5 * p.gamma0 * p.lambda * (-p.lambda * t).exp(), 0.0);
    // Kernel in the frame rotating at ω₀: pass omega0 = 0 so only the slow part remains.
    let solve =
        |n: usize| solve_volterra(kernel, 0.0, &TimeGrid::from_zero(10.0, n).unwrap()).unwrap();
    let (g1, g2, g4) = (solve(100), solve(200), solve(400));
    let d1 = (0..=100)
        .map(|k| (g1.values()[k] - g2.values()[2 * k]).norm())
        .fold(0.0, f64::max);
    let d2 = (0..=200)
        .map(|k| (g2.values()[k] - g4.values()[2 * k]).norm())
        .fold(0.0, f64::max);
    assert!(d1 / d2 >= 3.5, "ratio {}", d1 / d2);
    let g = ExactGreen::new(&p);
    let err = |sol: &tclfano::numerics::ComplexTrajectory| {
        sol.grid()
            .times()
            .zip(sol.values())
            .map(|(t, v)| (v - g.reduced(t)).norm())
            .fold(0.0, f64::max)
    };
    assert!(err(&g2) / err(&g4) >= 3.5, "{} {}", err(&g2), err(&g4));
}

#[test]
fn noise_integral_starts_at_zero_for_every_order() {
    let p = weak();
    let grid = TimeGrid::from_zero(2.0, 400).unwrap();
    let q = quad(&p, 2.0);
    for order in Order::ALL {
        let n = noise_integral(&p, &grid, order, &q).unwrap();
        assert_eq!(n.value.values()[0], 0.0, "{order}");
    }
}

#[test]
fn second_order_absorption_rate_reaches_golden_rule_value() {
    let p = weak();
    let grid = TimeGrid::default();
    let n = noise_integral(&p, &grid, Order::Tcl2, &quad(&p, grid.t_end())).unwrap();
    let golden =
        p.gamma0 * p.lambda.powi(2) / (p.lambda.powi(2) + p.delta.powi(2)) / (1f64.exp() - 1.0);
    assert!((golden - 0.1003408).abs() < 1e-7);
    let last = n.derivative.last();
    assert!((last - golden).abs() < 0.02 * golden, "{last} vs {golden}");
}

#[test]
fn second_order_noise_integral_grows_monotonically_at_resonance() {
    let p = SpectralParams {
        delta: 0.0,
        ..weak()
    };
    let grid = TimeGrid::from_zero(20.0, 4000).unwrap();
    let n = noise_integral(&p, &grid, Order::Tcl2, &quad(&p, 20.0)).unwrap();
    assert!(n.value.values().windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn noise_derivative_matches_finite_differences_at_each_order() {
    let p = weak();
    let grid = TimeGrid::from_zero(10.0, 4000).unwrap();
    let q = quad(&p, 10.0);
    let h = grid.step();
    for order in Order::ALL {
        let n = noise_integral(&p, &grid, order, &q).unwrap();
        let (v, d) = (n.value.values(), n.derivative.values());
        let worst = (1..grid.n_steps())
            .map(|k| ((v[k + 1] - v[k - 1]) / (2.0 * h) - d[k]).abs())
            .fold(0.0, f64::max);
        assert!(worst < 5e-4, "{order}: {worst}");
    }
}

#[test]
fn fourth_order_coefficients_add_closed_form_increments() {
    let p = weak();
    let grid = TimeGrid::from_zero(10.0, 2000).unwrap();
    let q = quad(&p, 10.0);
    let c2 = coefficients(&p, &grid, Order::Tcl2, &q).unwrap();
    let c4 = coefficients(&p, &grid, Order::Tcl4, &q).unwrap();
    for (k, t) in grid.times().enumerate() {
        let dg = c4.gamma.values()[k] - c2.gamma.values()[k];
        let dw = c4.omega_r.values()[k] - c2.omega_r.values()[k];
        assert!((dg - gamma4(&p, t)).abs() < 1e-10);
        assert!((dw - omega_r4(&p, t)).abs() < 1e-10);
    }
}

#[test]
fn emission_rate_is_decay_plus_absorption_at_every_order() {
    let p = SpectralParams {
        gamma0: 2.0,
        ..weak()
    };
    let grid = TimeGrid::from_zero(10.0, 2000).unwrap();
    let q = quad(&p, 10.0);
    for order in Order::ALL {
        let c = coefficients(&p, &grid, order, &q).unwrap();
        for k in 0..grid.len() {
            let sum = c.gamma.values()[k] + c.gamma_plus.values()[k];
            assert_eq!(c.gamma_minus.values()[k], sum);
        }
    }
}

#[test]
fn exact_coefficients_start_from_bare_values() {
    let p = weak();
    let grid = TimeGrid::from_zero(1.0, 100).unwrap();
    let c = coefficients(&p, &grid, Order::Exact, &quad(&p, 1.0)).unwrap();
    assert_eq!(c.omega_r.values()[0], p.omega0);
    assert_eq!(c.gamma.values()[0], 0.0);
    assert_eq!(c.gamma_plus.values()[0], 0.0);
}

#[test]
fn markov_limit_rate_approaches_bare_emission_rate() {
    let p = SpectralParams {
        lambda: 50.0,
        delta: 0.0,
        ..weak()
    };
    let grid = TimeGrid::from_zero(5.0, 4000).unwrap();
    let c = coefficients(&p, &grid, Order::Exact, &quad(&p, 5.0)).unwrap();
    for (k, t) in grid.times().enumerate().filter(|&(_, t)| t > 0.5) {
        let g = c.gamma.values()[k];
        assert!((g - p.gamma0).abs() < 0.02 * p.gamma0, "t = {t}: {g}");
    }
}

#[test]
fn exact_weak_resonance_has_no_frequency_shift() {
    for gamma0 in [0.1, 0.3, 0.5] {
        let s = steady_state(
            &SpectralParams {
                gamma0,
                delta: 0.0,
                ..weak()
            },
            Order::Exact,
        )
        .unwrap();
        assert!(
            (s.omega_r_st - 10.0).abs() < 1e-12,
            "{gamma0}: {}",
            s.omega_r_st
        );
    }
}

#[test]
fn resonance_jump_in_strong_coupling() {
    let at = |delta| {
        steady_state(
            &SpectralParams {
                gamma0: 2.0,
                delta,
                ..weak()
            },
            Order::Exact,
        )
        .unwrap()
    };
    let jump = at(0.01).omega_r_st - at(-0.01).omega_r_st;
    let expected = 3f64.sqrt();
    assert!((jump - expected).abs() < 0.05 * expected, "{jump}");
}
