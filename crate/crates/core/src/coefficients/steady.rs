use std::f64::consts::PI;

use num_complex::Complex64;

use super::{gamma4, omega_r4, Order};
use crate::bath::SpectralParams;
use crate::error::Result;
use crate::green::{roots, Expansion};
use crate::numerics::{
    build_frequency_quadrature, clustered_edges, composite_gauss_legendre, normalize_edges,
    FrequencyQuadrature, QuadratureOptions, PANEL_ORDER,
};

/// Long-time limits of the coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub order: Order,
    pub omega_r_st: f64,
    pub gamma_st: f64,
    pub gamma_plus_st: f64,
    /// Term-by-term split of the fourth-order absorption rate.
    pub absorption: Option<AbsorptionBreakdown>,
}

/// Stationary absorption rate at fourth order, `f = J n`, `A = Ġ̃⁽²⁾(∞)`,
/// `c = −λ + iΔ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsorptionBreakdown {
    /// `2π f(ω₀)`.
    pub second_order: f64,
    /// `4π Re(A/c) f(ω₀)`.
    pub resonant: f64,
    /// `−2π Im(A) f'(ω₀)`.
    pub detuning_slope: f64,
    /// `−2Re(A) · FP∫ f(ω)/(ω−ω₀)² dω`, the non-local remainder.
    pub finite_part: f64,
}

impl AbsorptionBreakdown {
    /// Sum of the local terms only.
    pub fn local(&self) -> f64 {
        self.second_order + self.resonant + self.detuning_slope
    }

    pub fn total(&self) -> f64 {
        self.local() + self.finite_part
    }
}

fn default_quadrature(params: &SpectralParams) -> Result<FrequencyQuadrature> {
    build_frequency_quadrature(params, &QuadratureOptions::default())
}

/// Hadamard finite part of `∫₀^{ω_cut} f(ω)/(ω−ω₀)² dω`, `f = J n`,
/// via `PV∫ f'/(ω−ω₀) − [f/(ω−ω₀)]₀^{ω_cut}` with the principal value
/// taken by subtracting `f'(ω₀)`.
pub fn finite_part_integral(params: &SpectralParams, quad: &FrequencyQuadrature) -> f64 {
    let w0 = params.omega0;
    let wc = quad.cutoff();
    let d0 = params.thermal_weight_derivative(w0);
    let smooth = quad.integrate(|w| (params.thermal_weight_derivative(w) - d0) / (w - w0));
    let pv = smooth + d0 * ((wc - w0) / w0).ln();
    pv - params.thermal_weight(wc) / (wc - w0) - params.thermal_weight(0.0) / w0
}

/// Exact stationary `ℐ_st = ∫ f |Ĝ(ω−ω₀)|² dω`, `Ĝ(ν) = 1/(z + k/(z − c))`,
/// `z = −iν`, integrated with panels clustered on both poles.
fn exact_stationary_noise(params: &SpectralParams, quad: &FrequencyQuadrature) -> f64 {
    let e = Expansion::new(params);
    let r = roots(params);
    let mut edges = quad.edges().to_vec();
    for s in [r.s1, r.s2] {
        let center = params.omega0 + s.im;
        let width = s.re.abs().max(1e-6 * params.lambda);
        edges.extend(clustered_edges(center, width, 0.0, quad.cutoff(), 256));
    }
    let edges = normalize_edges(edges);
    composite_gauss_legendre(&edges, PANEL_ORDER, |w| {
        let z = Complex64::new(0.0, -(w - params.omega0));
        let g = 1.0 / (z + e.k / (z - e.c));
        params.thermal_weight(w) * g.norm_sqr()
    })
}

/// Stationary `(ω_r, γ, γ₊)` at `order`.
///
/// Frequency integrals use the default quadrature cutoff. At fourth order
/// `γ₊` includes the non-local finite-part term, which the long-time tail of
/// `ℐ̇⁽⁴⁾ + γ⁽²⁾ℐ⁽²⁾` converges to; the local terms alone are available as
/// [`AbsorptionBreakdown::local`].
pub fn steady_state(params: &SpectralParams, order: Order) -> Result<SteadyState> {
    params.validate()?;
    let SpectralParams {
        gamma0,
        lambda,
        delta,
        omega0,
        ..
    } = *params;
    let q = lambda * lambda + delta * delta;
    let gamma2 = gamma0 * lambda * lambda / q;
    let shift2 = gamma0 * lambda * delta / (2.0 * q);
    let f0 = params.thermal_weight(omega0);
    let quad = default_quadrature(params)?;
    Ok(match order {
        Order::Exact => {
            let s1 = roots(params).s1;
            let gamma_st = -2.0 * s1.re;
            SteadyState {
                order,
                omega_r_st: omega0 - s1.im,
                gamma_st,
                gamma_plus_st: gamma_st * exact_stationary_noise(params, &quad),
                absorption: None,
            }
        }
        Order::Tcl2 => SteadyState {
            order,
            omega_r_st: omega0 + shift2,
            gamma_st: gamma2,
            gamma_plus_st: 2.0 * PI * f0,
            absorption: None,
        },
        Order::Tcl4 => {
            let e = Expansion::new(params);
            let a = e.gt2_dot_limit();
            let b = AbsorptionBreakdown {
                second_order: 2.0 * PI * f0,
                resonant: 4.0 * PI * (a / e.c).re * f0,
                detuning_slope: -2.0 * PI * a.im * params.thermal_weight_derivative(omega0),
                finite_part: -2.0 * a.re * finite_part_integral(params, &quad),
            };
            // The fourth-order closed forms have reached their limit once
            // e^{−λt} t underflows.
            let t_inf = 800.0 / lambda;
            SteadyState {
                order,
                omega_r_st: omega0 + shift2 + omega_r4(params, t_inf),
                gamma_st: gamma2 + gamma4(params, t_inf),
                gamma_plus_st: b.total(),
                absorption: Some(b),
            }
        }
    })
}
