//! Time-local master-equation coefficients.
//!
//! For each order the coefficients are the renormalised frequency `ω_r(t)`,
//! the total rate `γ(t)`, the absorption rate `γ₊(t) = γℐ + ℐ̇` and the
//! emission rate `γ₋ = γ + γ₊`, where `ℐ(t)` is the thermal noise integral.

mod noise;
mod steady;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::bath::SpectralParams;
use crate::error::{Error, Result};
use crate::green::{ExactGreen, Expansion};
use crate::numerics::{FrequencyQuadrature, RealTrajectory, TimeGrid};

pub use steady::{finite_part_integral, steady_state, AbsorptionBreakdown, SteadyState};

/// Below this `|G|` the exact coefficients are treated as singular.
pub const SINGULAR_GREEN: f64 = 1e-10;

/// Expansion order of the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Order {
    Exact,
    Tcl2,
    Tcl4,
}

impl Order {
    pub const ALL: [Order; 3] = [Order::Exact, Order::Tcl2, Order::Tcl4];

    pub fn name(self) -> &'static str {
        match self {
            Order::Exact => "exact",
            Order::Tcl2 => "tcl2",
            Order::Tcl4 => "tcl4",
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(Order::Exact),
            "tcl2" | "2" => Ok(Order::Tcl2),
            "tcl4" | "4" => Ok(Order::Tcl4),
            other => Err(Error::UnknownModel {
                name: other.to_string(),
                available: "exact, tcl2, tcl4".into(),
            }),
        }
    }
}

/// Sampled coefficients at one order.
///
/// Invariant: `gamma_minus[k] == gamma[k] + gamma_plus[k]`.
#[derive(Debug, Clone)]
pub struct MasterEqCoefficients {
    pub grid: TimeGrid,
    pub order: Order,
    pub omega_r: RealTrajectory,
    pub gamma: RealTrajectory,
    pub gamma_plus: RealTrajectory,
    pub gamma_minus: RealTrajectory,
    /// Indices where `|G| < SINGULAR_GREEN`; values there are bridged.
    pub singular_nodes: Vec<usize>,
}

impl MasterEqCoefficients {
    fn assemble(
        grid: &TimeGrid,
        order: Order,
        omega_r: Vec<f64>,
        gamma: Vec<f64>,
        gamma_plus: Vec<f64>,
        singular_nodes: Vec<usize>,
    ) -> Result<Self> {
        let gamma_minus = gamma.iter().zip(&gamma_plus).map(|(g, p)| g + p).collect();
        Ok(Self {
            grid: *grid,
            order,
            omega_r: RealTrajectory::new(*grid, omega_r)?,
            gamma: RealTrajectory::new(*grid, gamma)?,
            gamma_plus: RealTrajectory::new(*grid, gamma_plus)?,
            gamma_minus: RealTrajectory::new(*grid, gamma_minus)?,
            singular_nodes,
        })
    }

    /// Effective occupation `γ₊/γ`, undefined where `|γ| ≤ 1e-12`.
    pub fn n_eff(&self) -> Vec<Option<f64>> {
        self.gamma
            .values()
            .iter()
            .zip(self.gamma_plus.values())
            .map(|(&g, &p)| (g.abs() > 1e-12).then(|| p / g))
            .collect()
    }
}

/// Noise integral `ℐ(t)` and its time derivative.
#[derive(Debug, Clone)]
pub struct NoiseIntegral {
    pub value: RealTrajectory,
    pub derivative: RealTrajectory,
}

/// Second-order rate `γ⁽²⁾(t)`.
pub fn gamma2(params: &SpectralParams, t: f64) -> f64 {
    let SpectralParams {
        gamma0,
        lambda,
        delta,
        ..
    } = *params;
    let q = lambda * lambda + delta * delta;
    let e = (-lambda * t).exp();
    gamma0 * lambda * delta / q * (delta * t).sin() * e
        + gamma0 * lambda * lambda / q * (1.0 - (delta * t).cos() * e)
}

/// Second-order frequency shift `ω_r⁽²⁾(t)`.
pub fn omega_r2(params: &SpectralParams, t: f64) -> f64 {
    let SpectralParams {
        gamma0,
        lambda,
        delta,
        ..
    } = *params;
    let q = lambda * lambda + delta * delta;
    let e = (-lambda * t).exp();
    gamma0 * lambda * delta / (2.0 * q) * (1.0 - (delta * t).cos() * e)
        - gamma0 * lambda * lambda / (2.0 * q) * (delta * t).sin() * e
}

/// Fourth-order rate increment `γ⁽⁴⁾(t)`, written with `e^{−λt}` factors only
/// so that it stays finite for any t.
pub fn gamma4(params: &SpectralParams, t: f64) -> f64 {
    let SpectralParams {
        gamma0,
        lambda: l,
        delta: d,
        ..
    } = *params;
    let q = l * l + d * d;
    let e = (-l * t).exp();
    let r = d / l;
    let (s1, c1) = (d * t).sin_cos();
    let (s2, c2) = (2.0 * d * t).sin_cos();
    gamma0 * gamma0 * l.powi(5) / (2.0 * q.powi(3))
        * ((1.0 - e * e * c2) * (1.0 - 3.0 * r * r)
            + e * (-2.0 * l * t * c1 * (1.0 - r.powi(4)) + 4.0 * d * t * (1.0 + r * r) * s1)
            + r * e * e * s2 * (3.0 - r * r))
}

/// Fourth-order frequency-shift increment `ω_r⁽⁴⁾(t)`; identically zero at Δ = 0.
pub fn omega_r4(params: &SpectralParams, t: f64) -> f64 {
    let SpectralParams {
        gamma0,
        lambda: l,
        delta: d,
        ..
    } = *params;
    let q = l * l + d * d;
    let e = (-l * t).exp();
    let (s1, c1) = (d * t).sin_cos();
    let (s2, c2) = (2.0 * d * t).sin_cos();
    let (l2, d2) = (l * l, d * d);
    -gamma0 * gamma0 * l2 / (4.0 * q.powi(3))
        * ((1.0 - e * e * c2) * (d * d2 - 3.0 * l2 * d)
            + e * (-2.0 * t * s1 * (d2 * d2 - l2 * l2) + 4.0 * l * t * (d * d2 + l2 * d) * c1)
            - l * e * e * s2 * (3.0 * d2 - l2))
}

fn check_grid(grid: &TimeGrid) -> Result<()> {
    if grid.t_start() != 0.0 {
        return Err(Error::InvalidGrid(
            "coefficient trajectories start at t = 0".into(),
        ));
    }
    Ok(())
}

/// Exact reduced Green function `G̃` on the grid.
fn exact_reduced(params: &SpectralParams, grid: &TimeGrid) -> Vec<Complex64> {
    let g = ExactGreen::new(params);
    grid.times().map(|t| g.reduced(t)).collect()
}

/// `ℐ(t)` and `ℐ̇(t)` at the requested order.
pub fn noise_integral(
    params: &SpectralParams,
    grid: &TimeGrid,
    order: Order,
    quad: &FrequencyQuadrature,
) -> Result<NoiseIntegral> {
    check_grid(grid)?;
    let (value, derivative) = match order {
        Order::Exact => {
            let g = exact_reduced(params, grid);
            let s = noise::single_source(params, grid, quad, &g, true)?;
            (s.value, s.derivative.unwrap_or_default())
        }
        Order::Tcl2 => {
            let ones = vec![Complex64::new(1.0, 0.0); grid.len()];
            let s = noise::single_source(params, grid, quad, &ones, true)?;
            (s.value, s.derivative.unwrap_or_default())
        }
        Order::Tcl4 => {
            let p = tcl4_noise(params, grid, quad)?;
            (
                p.i2.iter().zip(&p.i4).map(|(a, b)| a + b).collect(),
                p.i2_dot.iter().zip(&p.i4_dot).map(|(a, b)| a + b).collect(),
            )
        }
    };
    Ok(NoiseIntegral {
        value: RealTrajectory::new(*grid, value)?,
        derivative: RealTrajectory::new(*grid, derivative)?,
    })
}

/// Exact `ℐ(t)` without the derivative (all that moment propagation needs).
pub(crate) fn exact_noise_value(
    params: &SpectralParams,
    grid: &TimeGrid,
    quad: &FrequencyQuadrature,
) -> Result<Vec<f64>> {
    check_grid(grid)?;
    let g = exact_reduced(params, grid);
    Ok(noise::single_source(params, grid, quad, &g, false)?.value)
}

fn tcl4_noise(
    params: &SpectralParams,
    grid: &TimeGrid,
    quad: &FrequencyQuadrature,
) -> Result<noise::PairSums> {
    let e = Expansion::new(params);
    let g2: Vec<Complex64> = grid.times().map(|t| e.gt2(t)).collect();
    noise::second_and_fourth(params, grid, quad, &g2)
}

/// Replaces flagged entries by linear interpolation between the nearest
/// unflagged neighbours (constant extrapolation at the ends).
fn bridge(values: &mut [f64], flagged: &[usize]) {
    if flagged.is_empty() || flagged.len() == values.len() {
        return;
    }
    let mut bad = vec![false; values.len()];
    flagged.iter().for_each(|&k| bad[k] = true);
    let mut k = 0;
    while k < values.len() {
        if !bad[k] {
            k += 1;
            continue;
        }
        let start = k;
        while k < values.len() && bad[k] {
            k += 1;
        }
        let left = start.checked_sub(1).map(|i| (i, values[i]));
        let right = (k < values.len()).then(|| (k, values[k]));
        for (j, v) in values.iter_mut().enumerate().take(k).skip(start) {
            *v = match (left, right) {
                (Some((i0, v0)), Some((i1, v1))) => {
                    v0 + (v1 - v0) * (j - i0) as f64 / (i1 - i0) as f64
                }
                (Some((_, v0)), None) => v0,
                (None, Some((_, v1))) => v1,
                (None, None) => unreachable!(),
            };
        }
    }
}

/// Exact coefficients from the closed-form log-derivative of `G`.
pub fn exact_coefficients(
    params: &SpectralParams,
    grid: &TimeGrid,
    quad: &FrequencyQuadrature,
) -> Result<MasterEqCoefficients> {
    check_grid(grid)?;
    let g = ExactGreen::new(params);
    let mut omega_r = Vec::with_capacity(grid.len());
    let mut gamma = Vec::with_capacity(grid.len());
    let mut singular = Vec::new();
    for (k, t) in grid.times().enumerate() {
        let r = g.log_derivative(t);
        let ok = g.reduced(t).norm() >= SINGULAR_GREEN && r.re.is_finite() && r.im.is_finite();
        if !ok {
            singular.push(k);
        }
        omega_r.push(if ok { params.omega0 - r.im } else { 0.0 });
        gamma.push(if ok { -2.0 * r.re } else { 0.0 });
    }
    bridge(&mut omega_r, &singular);
    bridge(&mut gamma, &singular);
    let noise = noise_integral(params, grid, Order::Exact, quad)?;
    let gamma_plus = gamma
        .iter()
        .zip(noise.value.values().iter().zip(noise.derivative.values()))
        .map(|(g, (i, di))| g * i + di)
        .collect();
    MasterEqCoefficients::assemble(grid, Order::Exact, omega_r, gamma, gamma_plus, singular)
}

/// Second-order coefficients.
pub fn tcl2_coefficients(
    params: &SpectralParams,
    grid: &TimeGrid,
    quad: &FrequencyQuadrature,
) -> Result<MasterEqCoefficients> {
    let noise = noise_integral(params, grid, Order::Tcl2, quad)?;
    let omega_r = grid
        .times()
        .map(|t| params.omega0 + omega_r2(params, t))
        .collect();
    let gamma = grid.times().map(|t| gamma2(params, t)).collect();
    MasterEqCoefficients::assemble(
        grid,
        Order::Tcl2,
        omega_r,
        gamma,
        noise.derivative.into_values(),
        Vec::new(),
    )
}

/// Fourth-order coefficients: the second-order values plus the fourth-order
/// increments, with `γ₊ = ℐ̇⁽²⁾ + ℐ̇⁽⁴⁾ + γ⁽²⁾ℐ⁽²⁾`.
pub fn tcl4_coefficients(
    params: &SpectralParams,
    grid: &TimeGrid,
    quad: &FrequencyQuadrature,
) -> Result<MasterEqCoefficients> {
    check_grid(grid)?;
    let p = tcl4_noise(params, grid, quad)?;
    let mut omega_r = Vec::with_capacity(grid.len());
    let mut gamma = Vec::with_capacity(grid.len());
    let mut gamma_plus = Vec::with_capacity(grid.len());
    for (k, t) in grid.times().enumerate() {
        let g2 = gamma2(params, t);
        omega_r.push(params.omega0 + omega_r2(params, t) + omega_r4(params, t));
        gamma.push(g2 + gamma4(params, t));
        gamma_plus.push(p.i2_dot[k] + p.i4_dot[k] + g2 * p.i2[k]);
    }
    MasterEqCoefficients::assemble(grid, Order::Tcl4, omega_r, gamma, gamma_plus, Vec::new())
}

/// Coefficients at `order`.
pub fn coefficients(
    params: &SpectralParams,
    grid: &TimeGrid,
    order: Order,
    quad: &FrequencyQuadrature,
) -> Result<MasterEqCoefficients> {
    match order {
        Order::Exact => exact_coefficients(params, grid, quad),
        Order::Tcl2 => tcl2_coefficients(params, grid, quad),
        Order::Tcl4 => tcl4_coefficients(params, grid, quad),
    }
}
