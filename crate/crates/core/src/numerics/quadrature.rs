use crate::bath::SpectralParams;
use crate::error::{invalid, Result};

/// Gauss-Legendre rule order used on every panel.
pub const PANEL_ORDER: usize = 16;

/// Largest admissible `panel width * horizon`, i.e. the phase `e^{i nu t}`
/// may wind through at most this many radians across one panel.
const PANEL_PHASE: f64 = 16.0;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pnm1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Integrates `f` over consecutive panels `[edges[j], edges[j+1]]` with an
/// `order`-point Gauss-Legendre rule on each.
pub fn composite_gauss_legendre(edges: &[f64], order: usize, f: impl Fn(f64) -> f64) -> f64 {
    let (x, w) = gauss_legendre(order);
    edges
        .windows(2)
        .map(|e| {
            let (mid, half) = (0.5 * (e[0] + e[1]), 0.5 * (e[1] - e[0]));
            half * x
                .iter()
                .zip(&w)
                .map(|(xi, wi)| wi * f(mid + half * xi))
                .sum::<f64>()
        })
        .sum()
}

/// Panel edges on `[lo, hi]` from `ω = center + width·tan θ` with θ uniform.
pub fn clustered_edges(center: f64, width: f64, lo: f64, hi: f64, panels: usize) -> Vec<f64> {
    let th_lo = ((lo - center) / width).atan();
    let th_hi = ((hi - center) / width).atan();
    let mut edges: Vec<f64> = (0..=panels)
        .map(|j| {
            let th = th_lo + (th_hi - th_lo) * j as f64 / panels as f64;
            (center + width * th.tan()).clamp(lo, hi)
        })
        .collect();
    edges[0] = lo;
    edges[panels] = hi;
    edges
}

/// Sorts edges and drops near-duplicates.
pub fn normalize_edges(mut edges: Vec<f64>) -> Vec<f64> {
    edges.sort_by(f64::total_cmp);
    let scale = edges.iter().fold(0.0f64, |m, e| m.max(e.abs())).max(1.0);
    edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * scale);
    edges
}

/// Sizing knobs for [`build_frequency_quadrature`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// Nominal node budget for the peak-clustered panels.
    pub n_nodes: usize,
    /// Distance of the cutoff beyond the upper reference frequency, in units of λ.
    pub cutoff_widths: f64,
    /// Longest time at which the frequency integrals will be evaluated.
    pub horizon: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            n_nodes: 2000,
            cutoff_widths: 40.0,
            horizon: 20.0,
        }
    }
}

impl QuadratureOptions {
    pub fn with_horizon(self, horizon: f64) -> Self {
        Self { horizon, ..self }
    }
}

/// Positive-weight rule on `[0, cutoff]` clustered around `peak`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyQuadrature {
    edges: Vec<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    peak: f64,
    cutoff: f64,
}

impl FrequencyQuadrature {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Panel boundaries, including 0 and the cutoff.
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn peak(&self) -> f64 {
        self.peak
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Builds composite Gauss-Legendre panels on `[0, ω_cut]`.
///
/// Panel edges follow `ω = peak + λ tan θ` with θ uniform, so they cluster on
/// the Lorentzian peak `ω₀ − Δ`. `ω_m` and `ω₀` are added as breakpoints
/// (kinks of the modified density, resonance of the time integrals), and any
/// panel wider than `PANEL_PHASE / horizon` is subdivided so that oscillations
/// `e^{i(ω−ω₀)t}` for `t ≤ horizon` stay resolved in the tails.
pub fn build_frequency_quadrature(
    params: &SpectralParams,
    opts: &QuadratureOptions,
) -> Result<FrequencyQuadrature> {
    if opts.n_nodes < 64 {
        return Err(invalid(
            "n_nodes",
            format!("need at least 64 nodes, got {}", opts.n_nodes),
        ));
    }
    if !(opts.horizon > 0.0 && opts.horizon.is_finite()) {
        return Err(invalid(
            "horizon",
            format!("must be positive, got {}", opts.horizon),
        ));
    }
    let lambda = params.lambda;
    let peak = params.omega0 - params.delta;
    let cutoff = peak.max(params.omega0) + opts.cutoff_widths * lambda;
    if !(cutoff > peak && cutoff > 0.0) {
        return Err(invalid(
            "cutoff_widths",
            format!("cutoff {cutoff} does not lie above the peak {peak}"),
        ));
    }

    let mut edges = clustered_edges(
        peak,
        lambda,
        0.0,
        cutoff,
        opts.n_nodes.div_ceil(PANEL_ORDER),
    );
    for extra in [params.omega_m, params.omega0] {
        if extra > 0.0 && extra < cutoff {
            edges.push(extra);
        }
    }
    let edges = normalize_edges(edges);

    let cap = PANEL_PHASE / opts.horizon;
    let mut fine = vec![edges[0]];
    for e in edges.windows(2) {
        let pieces = ((e[1] - e[0]) / cap).ceil().max(1.0) as usize;
        for p in 1..=pieces {
            fine.push(if p == pieces {
                e[1]
            } else {
                e[0] + (e[1] - e[0]) * p as f64 / pieces as f64
            });
        }
    }

    let (x, w) = gauss_legendre(PANEL_ORDER);
    let mut nodes = Vec::with_capacity(PANEL_ORDER * (fine.len() - 1));
    let mut weights = Vec::with_capacity(nodes.capacity());
    for e in fine.windows(2) {
        let (mid, half) = (0.5 * (e[0] + e[1]), 0.5 * (e[1] - e[0]));
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(mid + half * xi);
            weights.push(half * wi);
        }
    }
    Ok(FrequencyQuadrature {
        edges: fine,
        nodes,
        weights,
        peak,
        cutoff,
    })
}
