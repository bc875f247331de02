//! Gaussian fidelity, Bures distance, the non-Markovianity measure 𝒩 and
//! parameter sweeps of 𝒩.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bath::{radius_of_convergence, SpectralParams};
use crate::dynamics::{GaussianState, Moments};
use crate::error::{Error, Result};
use crate::models::OrderModel;
use crate::numerics::{
    build_frequency_quadrature, forward_rate, positive_part_integral, QuadratureOptions,
    RealTrajectory, TimeGrid,
};

/// Fidelity with bookkeeping of numerical repairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fidelity {
    /// In `[0, 1 + 1e-9]`.
    pub value: f64,
    /// The raw value fell outside `[0, 1 + 1e-9]`.
    pub clamped: bool,
    /// One of the states violates the uncertainty relation.
    pub unphysical: bool,
}

/// Fidelity of two single-mode Gaussian states,
/// `F = 2/(√(Δ_F + δ_F) − √δ_F) · exp(−½ dᵀ(V₁+V₂)⁻¹d)` with
/// `Δ_F = 4 det(V₁+V₂)`, `δ_F = 16(det V₁ − ¼)(det V₂ − ¼)`.
pub fn gaussian_fidelity(s1: &GaussianState, s2: &GaussianState) -> Result<Fidelity> {
    let sum = [
        [s1.cov[0][0] + s2.cov[0][0], s1.cov[0][1] + s2.cov[0][1]],
        [s1.cov[1][0] + s2.cov[1][0], s1.cov[1][1] + s2.cov[1][1]],
    ];
    let det_sum = sum[0][0] * sum[1][1] - sum[0][1] * sum[1][0];
    if det_sum.is_nan() || det_sum.abs() < 1e-15 {
        return Err(Error::SingularCovariance { det: det_sum });
    }
    let d = [s2.d[0] - s1.d[0], s2.d[1] - s1.d[1]];
    // dᵀ sum⁻¹ d with the adjugate inverse
    let quad_form = (sum[1][1] * d[0] * d[0] - (sum[0][1] + sum[1][0]) * d[0] * d[1]
        + sum[0][0] * d[1] * d[1])
        / det_sum;
    let big = 4.0 * det_sum;
    let small_raw = 16.0 * (s1.det() - 0.25) * (s2.det() - 0.25);
    let unphysical = small_raw < -1e-9 || !s1.is_physical() || !s2.is_physical();
    let small = small_raw.max(0.0);
    let raw = 2.0 / ((big + small).sqrt() - small.sqrt()) * (-0.5 * quad_form).exp();
    let upper = 1.0 + 1e-9;
    let clamped = !(0.0..=upper).contains(&raw);
    let value = if raw.is_nan() {
        0.0
    } else {
        raw.clamp(0.0, upper)
    };
    Ok(Fidelity {
        value,
        clamped,
        unphysical,
    })
}

/// `D_B = √(2 − 2√F)`, with `F` capped at 1.
pub fn bures_distance(fidelity: f64) -> f64 {
    (2.0 - 2.0 * fidelity.clamp(0.0, 1.0).sqrt())
        .max(0.0)
        .sqrt()
}

/// Bures distance between two state paths.
#[derive(Debug, Clone)]
pub struct DistanceTrajectory {
    pub grid: TimeGrid,
    pub values: RealTrajectory,
    /// Forward-difference rate σ(t).
    pub sigma: Vec<f64>,
    /// Nodes whose fidelity had to be clamped.
    pub clamped_nodes: usize,
    /// Nodes with at least one unphysical state.
    pub unphysical_nodes: usize,
}

impl DistanceTrajectory {
    pub fn non_markovianity(&self) -> f64 {
        positive_part_integral(&self.values)
    }

    /// Running total of positive increments, 𝒩 restricted to `[t_0, t_k]`.
    pub fn cumulative_non_markovianity(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = vec![0.0];
        for w in self.values.values().windows(2) {
            acc += (w[1] - w[0]).max(0.0);
            out.push(acc);
        }
        out
    }

    /// Largest single-step increase of the distance.
    pub fn max_increment(&self) -> f64 {
        self.values
            .values()
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn bures_trajectory(
    path_a: &[GaussianState],
    path_b: &[GaussianState],
    grid: &TimeGrid,
) -> Result<DistanceTrajectory> {
    if path_a.len() != grid.len() || path_b.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            got: if path_a.len() != grid.len() {
                path_a.len()
            } else {
                path_b.len()
            },
        });
    }
    let mut values = Vec::with_capacity(grid.len());
    let (mut clamped, mut unphysical) = (0, 0);
    for (a, b) in path_a.iter().zip(path_b) {
        let f = gaussian_fidelity(a, b)?;
        clamped += usize::from(f.clamped);
        unphysical += usize::from(f.unphysical);
        values.push(bures_distance(f.value));
    }
    let values = RealTrajectory::new(*grid, values)?;
    Ok(DistanceTrajectory {
        grid: *grid,
        sigma: forward_rate(&values),
        values,
        clamped_nodes: clamped,
        unphysical_nodes: unphysical,
    })
}

/// 𝒩: total positive variation of the Bures distance.
pub fn non_markovianity(
    path_a: &[GaussianState],
    path_b: &[GaussianState],
    grid: &TimeGrid,
) -> Result<f64> {
    Ok(bures_trajectory(path_a, path_b, grid)?.non_markovianity())
}

/// Coherent pair `α₁, α₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatePair {
    pub alpha1: Complex64,
    pub alpha2: Complex64,
}

impl Default for StatePair {
    fn default() -> Self {
        Self {
            alpha1: Complex64::new(0.11, 0.22),
            alpha2: Complex64::new(0.11, -0.22),
        }
    }
}

impl StatePair {
    pub fn moments(&self) -> [Moments; 2] {
        [
            Moments::coherent(self.alpha1),
            Moments::coherent(self.alpha2),
        ]
    }
}

/// Distance trajectory of a pair under one model, with diagnostics.
#[derive(Debug, Clone)]
pub struct PairRun {
    pub distance: DistanceTrajectory,
    pub n_measure: f64,
    pub singular_nodes: usize,
    pub positivity_violations: usize,
}

impl PairRun {
    /// Unphysical states, positivity violations, clamped fidelities or
    /// singular coefficient nodes.
    pub fn flagged(&self) -> bool {
        self.distance.unphysical_nodes > 0
            || self.distance.clamped_nodes > 0
            || self.singular_nodes > 0
            || self.positivity_violations > 0
    }
}

/// Full pipeline: coefficients → moments → Gaussian states → Bures → 𝒩.
pub fn run_pair(
    model: &dyn OrderModel,
    params: &SpectralParams,
    pair: &StatePair,
    grid: &TimeGrid,
    quad_opts: &QuadratureOptions,
) -> Result<PairRun> {
    params.validate()?;
    let quad = build_frequency_quadrature(params, &quad_opts.with_horizon(grid.t_end()))?;
    let evo = model.evolve(params, &pair.moments(), grid, &quad)?;
    let positivity_violations = evo
        .trajectories
        .iter()
        .map(|t| t.positivity_violations().len())
        .sum();
    let distance = bures_trajectory(
        &evo.trajectories[0].gaussian_states(),
        &evo.trajectories[1].gaussian_states(),
        grid,
    )?;
    Ok(PairRun {
        n_measure: distance.non_markovianity(),
        distance,
        singular_nodes: evo.singular_nodes,
        positivity_violations,
    })
}

/// Sweep configuration shared by all cells.
#[derive(Debug, Clone, Copy, Default)]
pub struct SweepSettings {
    pub grid: TimeGrid,
    pub quadrature: QuadratureOptions,
    pub pair: StatePair,
}

/// Outcome of one sweep cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub delta: f64,
    pub coupling: f64,
    /// `None` when the pipeline returned an error.
    pub n_measure: Option<f64>,
    pub flagged: bool,
    pub error: Option<String>,
}

/// 𝒩 over a (Δ, γ₀/λ) grid; cells are stored Δ-major.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub model: String,
    pub deltas: Vec<f64>,
    pub couplings: Vec<f64>,
    pub cells: Vec<Cell>,
}

impl SweepResult {
    pub fn cell(&self, i_delta: usize, i_coupling: usize) -> &Cell {
        &self.cells[i_delta * self.couplings.len() + i_coupling]
    }

    /// Cells that errored or were flagged.
    pub fn failures(&self) -> impl Iterator<Item = &Cell> {
        self.cells
            .iter()
            .filter(|c| c.flagged || c.n_measure.is_none())
    }

    /// `max |𝒩(Δ) − 𝒩(−Δ)|` over mirrored detunings present on the axis.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, &d) in self.deltas.iter().enumerate() {
            let Some(m) = self.deltas.iter().position(|&x| (x + d).abs() < 1e-9) else {
                continue;
            };
            for j in 0..self.couplings.len() {
                if let (Some(a), Some(b)) = (self.cell(i, j).n_measure, self.cell(m, j).n_measure) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
        worst
    }
}

/// Evaluates every cell (in parallel); failures are recorded, never fatal.
pub fn heatmap(
    base: &SpectralParams,
    deltas: &[f64],
    couplings: &[f64],
    model: &dyn OrderModel,
    settings: &SweepSettings,
) -> Result<SweepResult> {
    if deltas.is_empty() || couplings.is_empty() {
        return Err(Error::InvalidGrid("sweep axes must be non-empty".into()));
    }
    let nc = couplings.len();
    let cells = (0..deltas.len() * nc)
        .into_par_iter()
        .map(|idx| {
            let (delta, coupling) = (deltas[idx / nc], couplings[idx % nc]);
            let params = base.with_cell(delta, coupling);
            match run_pair(
                model,
                &params,
                &settings.pair,
                &settings.grid,
                &settings.quadrature,
            ) {
                Ok(run) => Cell {
                    delta,
                    coupling,
                    n_measure: Some(run.n_measure),
                    flagged: run.flagged(),
                    error: None,
                },
                Err(e) => Cell {
                    delta,
                    coupling,
                    n_measure: None,
                    flagged: true,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(SweepResult {
        model: model.name().to_string(),
        deltas: deltas.to_vec(),
        couplings: couplings.to_vec(),
        cells,
    })
}

/// Convergence boundary `γ₀/λ = R(Δ)` sampled on `deltas`.
pub fn boundary_curve(lambda: f64, deltas: &[f64]) -> Vec<(f64, f64)> {
    deltas
        .iter()
        .map(|&d| (d, radius_of_convergence(lambda, d)))
        .collect()
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}
