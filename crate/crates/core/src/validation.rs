//! Oracle suite: each check compares a production code path against an
//! independent reference and reports the measured discrepancy.

use std::fmt;

use num_complex::Complex64;

use crate::bath::SpectralParams;
use crate::coefficients::{exact_coefficients, gamma2, gamma4, noise_integral, Order};
use crate::dynamics::{moments_to_gaussian, propagate_exact_many, Moments};
use crate::error::Result;
use crate::green::{exact_green, ExactGreen};
use crate::metrics::{bures_trajectory, gaussian_fidelity, StatePair};
use crate::numerics::{build_frequency_quadrature, solve_volterra, QuadratureOptions, TimeGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    /// Failed where failure is the correct physics (divergent expansion).
    ExpectedFail,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::ExpectedFail => "XFAIL",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub measured: String,
    pub requirement: String,
    pub outcome: Outcome,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: {} (required {})",
            self.outcome, self.name, self.measured, self.requirement
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.outcome != Outcome::Fail)
    }
}

fn check(name: &'static str, ok: bool, measured: String, requirement: String) -> Check {
    Check {
        name,
        measured,
        requirement,
        outcome: if ok { Outcome::Pass } else { Outcome::Fail },
    }
}

fn scaled(params: &SpectralParams, factor: f64) -> SpectralParams {
    SpectralParams {
        gamma0: factor * params.gamma0,
        ..*params
    }
}

/// `max_t |G_Volterra − G_closed|`.
pub fn volterra_error(params: &SpectralParams, grid: &TimeGrid) -> Result<f64> {
    let numeric = solve_volterra(|t| params.memory_kernel(t), params.omega0, grid)?;
    let closed = exact_green(params, grid)?;
    Ok(numeric
        .values()
        .iter()
        .zip(closed.values())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

/// `(max_t |γ_exact − γ⁽²⁾|, max_t |γ_exact − γ⁽²⁾ − γ⁽⁴⁾|)` from closed forms.
pub fn rate_residuals(params: &SpectralParams, grid: &TimeGrid) -> (f64, f64) {
    let g = ExactGreen::new(params);
    grid.times().fold((0.0f64, 0.0f64), |(r2, r4), t| {
        let exact = -2.0 * g.log_derivative(t).re;
        if !exact.is_finite() {
            return (r2, r4);
        }
        let d2 = exact - gamma2(params, t);
        (r2.max(d2.abs()), r4.max((d2 - gamma4(params, t)).abs()))
    })
}

/// `max_k |ℐ̇_k − (ℐ_{k+1} − ℐ_{k−1})/2h|` for the exact noise integral.
pub fn noise_derivative_error(
    params: &SpectralParams,
    grid: &TimeGrid,
    quad_opts: &QuadratureOptions,
) -> Result<f64> {
    let quad = build_frequency_quadrature(params, &quad_opts.with_horizon(grid.t_end()))?;
    let n = noise_integral(params, grid, Order::Exact, &quad)?;
    let (v, d) = (n.value.values(), n.derivative.values());
    let h = grid.step();
    Ok((1..grid.n_steps())
        .map(|k| ((v[k + 1] - v[k - 1]) / (2.0 * h) - d[k]).abs())
        .fold(0.0, f64::max))
}

/// Fidelity of two Fock-diagonal states, `(Σ √(p_n q_n))²`.
pub fn diagonal_fidelity(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(a, b)| (a * b).sqrt())
        .sum::<f64>()
        .powi(2)
}

/// Thermal populations `n̄ⁿ/(n̄+1)ⁿ⁺¹`, truncated to `dim` levels.
pub fn thermal_populations(n_bar: f64, dim: usize) -> Vec<f64> {
    (0..dim)
        .map(|n| n_bar.powi(n as i32) / (n_bar + 1.0).powi(n as i32 + 1))
        .collect()
}

/// `|⟨α|β⟩|²` from the truncated Fock expansion of both coherent states.
pub fn coherent_overlap_fock(alpha: Complex64, beta: Complex64, dim: usize) -> f64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for n in 1..dim {
        term *= alpha.conj() * beta / n as f64;
        sum += term;
    }
    ((-(alpha.norm_sqr() + beta.norm_sqr()) / 2.0).exp() * sum).norm_sqr()
}

/// Largest per-step Bures increase of the exact pair run restricted to steps
/// where `γ₊ ≥ 0` and `γ₋ ≥ 0` at both ends; `None` if there are none.
pub fn cp_divisible_max_increase(
    params: &SpectralParams,
    grid: &TimeGrid,
    quad_opts: &QuadratureOptions,
    pair: &StatePair,
) -> Result<Option<f64>> {
    let quad = build_frequency_quadrature(params, &quad_opts.with_horizon(grid.t_end()))?;
    let coeffs = exact_coefficients(params, grid, &quad)?;
    let runs = propagate_exact_many(params, &pair.moments(), grid, &quad)?;
    let d = bures_trajectory(&runs[0].gaussian_states(), &runs[1].gaussian_states(), grid)?;
    let (gp, gm) = (coeffs.gamma_plus.values(), coeffs.gamma_minus.values());
    let cp = |k: usize| gp[k] >= 0.0 && gm[k] >= 0.0;
    let v = d.values.values();
    Ok((0..grid.n_steps())
        .filter(|&k| cp(k) && cp(k + 1))
        .map(|k| v[k + 1] - v[k])
        .reduce(f64::max))
}

/// Runs every oracle for one configuration.
pub fn run_suite(
    params: &SpectralParams,
    grid: &TimeGrid,
    quad_opts: &QuadratureOptions,
) -> Result<Report> {
    params.validate()?;
    let mut checks = Vec::new();

    let err = volterra_error(params, grid)?;
    checks.push(check(
        "volterra solver vs closed-form G",
        err < 1e-5,
        format!("max |dG| = {err:.3e}"),
        "< 1e-5".into(),
    ));

    // One halving past the configured coupling: at γ₀ itself the next order
    // still distorts the fourth-order ratio by up to 30% inside the radius.
    let (a2, a4) = rate_residuals(&scaled(params, 0.5), grid);
    let (b2, b4) = rate_residuals(&scaled(params, 0.25), grid);
    let (q2, q4) = (a2 / b2, a4 / b4);
    let ok = (3.0..=5.0).contains(&q2) && (6.0..=10.0).contains(&q4);
    let mut scaling = check(
        "order scaling of rate residuals, gamma0/2 -> gamma0/4",
        ok,
        format!("second-order ratio {q2:.3}, fourth-order ratio {q4:.3}"),
        "[3, 5] and [6, 10]".into(),
    );
    if !ok && !params.coupling_regime().is_weak() {
        scaling.outcome = Outcome::ExpectedFail;
        scaling.requirement += " (divergent regime: failure expected)";
    }
    checks.push(scaling);

    let fd = noise_derivative_error(params, grid, quad_opts)?;
    checks.push(check(
        "analytic noise derivative vs finite differences",
        fd < 5e-4,
        format!("max discrepancy {fd:.3e}"),
        "< 5e-4".into(),
    ));

    let s = moments_to_gaussian(&Moments {
        a_mean: Complex64::new(0.3, -0.2),
        aa_mean: Complex64::new(0.1, 0.05),
        n_mean: 0.4,
    });
    let f_self = gaussian_fidelity(&s, &s)?.value;
    checks.push(check(
        "fidelity of a state with itself",
        (f_self - 1.0).abs() < 1e-10,
        format!("|F - 1| = {:.3e}", (f_self - 1.0).abs()),
        "< 1e-10".into(),
    ));

    let alpha = Complex64::new(0.11, 0.22);
    let f_coh = gaussian_fidelity(
        &moments_to_gaussian(&Moments::coherent(alpha)),
        &moments_to_gaussian(&Moments::coherent(-alpha)),
    )?
    .value;
    let f_ref = coherent_overlap_fock(alpha, -alpha, 60);
    checks.push(check(
        "coherent-state fidelity vs Fock overlap",
        (f_coh - f_ref).abs() < 1e-6,
        format!("F = {f_coh:.7}, overlap = {f_ref:.7}"),
        "|diff| < 1e-6".into(),
    ));

    let f_th = gaussian_fidelity(
        &moments_to_gaussian(&Moments::vacuum()),
        &moments_to_gaussian(&Moments::thermal(1.0)),
    )?
    .value;
    let mut vac = vec![0.0; 60];
    vac[0] = 1.0;
    let f_fock = diagonal_fidelity(&vac, &thermal_populations(1.0, 60));
    checks.push(check(
        "vacuum-thermal fidelity vs Fock-diagonal computation",
        (f_th - f_fock).abs() < 1e-4,
        format!("F = {f_th:.7}, Fock = {f_fock:.7}"),
        "|diff| < 1e-4".into(),
    ));

    let inc = cp_divisible_max_increase(params, grid, quad_opts, &StatePair::default())?;
    checks.push(match inc {
        Some(v) => check(
            "Bures contraction where both rates are non-negative",
            v < 1e-4,
            format!("max step increase {v:.3e}"),
            "< 1e-4".into(),
        ),
        None => check(
            "Bures contraction where both rates are non-negative",
            true,
            "no CP-divisible steps".into(),
            "< 1e-4".into(),
        ),
    });

    Ok(Report { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fock_references() {
        let mut vac = vec![0.0; 60];
        vac[0] = 1.0;
        assert!((diagonal_fidelity(&vac, &thermal_populations(1.0, 60)) - 0.5).abs() < 1e-15);
        let th = thermal_populations(0.7, 60);
        assert!((diagonal_fidelity(&th, &th) - 1.0).abs() < 1e-12);
        let a = Complex64::new(0.3, 0.1);
        assert!((coherent_overlap_fock(a, a, 60) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn strong_resonance_marks_scaling_as_expected_failure() {
        let params = SpectralParams {
            gamma0: 2.0,
            delta: 0.0,
            ..SpectralParams::default()
        };
        let grid = TimeGrid::default();
        let (a2, a4) = rate_residuals(&params, &grid);
        let (b2, b4) = rate_residuals(
            &SpectralParams {
                gamma0: 1.0,
                ..params
            },
            &grid,
        );
        let ok = (3.0..=5.0).contains(&(a2 / b2)) && (6.0..=10.0).contains(&(a4 / b4));
        assert!(!ok);
    }
}
