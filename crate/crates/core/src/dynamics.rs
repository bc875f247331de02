//! Moment propagation and Gaussian states of the system mode.
//!
//! The reduced dynamics is Gaussian, so `⟨a⟩`, `⟨aa⟩` and `⟨a†a⟩` determine
//! the state completely. Exact propagation uses `G(t)` and `ℐ(t)` directly;
//! TCL propagation integrates the moment equations with sampled
//! coefficients.

use num_complex::Complex64;

use crate::bath::SpectralParams;
use crate::coefficients::{exact_noise_value, MasterEqCoefficients};
use crate::error::{Error, Result};
use crate::green::ExactGreen;
use crate::numerics::{integrate_ode, FrequencyQuadrature, TimeGrid};

/// Occupations below `−POSITIVITY_SLACK` count as positivity violations.
pub const POSITIVITY_SLACK: f64 = 1e-6;

/// First and second moments `⟨a⟩`, `⟨aa⟩`, `⟨a†a⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub a_mean: Complex64,
    pub aa_mean: Complex64,
    pub n_mean: f64,
}

impl Moments {
    pub fn vacuum() -> Self {
        Self::coherent(Complex64::new(0.0, 0.0))
    }

    pub fn coherent(alpha: Complex64) -> Self {
        Self {
            a_mean: alpha,
            aa_mean: alpha * alpha,
            n_mean: alpha.norm_sqr(),
        }
    }

    pub fn thermal(n_bar: f64) -> Self {
        Self {
            a_mean: Complex64::new(0.0, 0.0),
            aa_mean: Complex64::new(0.0, 0.0),
            n_mean: n_bar,
        }
    }
}

/// Moments on every grid node.
#[derive(Debug, Clone)]
pub struct MomentTrajectory {
    pub grid: TimeGrid,
    pub moments: Vec<Moments>,
}

impl MomentTrajectory {
    /// Nodes where `⟨a†a⟩ < −POSITIVITY_SLACK`.
    pub fn positivity_violations(&self) -> Vec<usize> {
        self.moments
            .iter()
            .enumerate()
            .filter(|(_, m)| m.n_mean < -POSITIVITY_SLACK)
            .map(|(k, _)| k)
            .collect()
    }

    pub fn gaussian_states(&self) -> Vec<GaussianState> {
        self.moments.iter().map(moments_to_gaussian).collect()
    }
}

/// Displacement `(⟨X⟩, ⟨P⟩)` and symmetric covariance of one mode, with
/// `X = (a + a†)/√2`, `P = (a − a†)/(√2 i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    pub d: [f64; 2],
    pub cov: [[f64; 2]; 2],
}

impl GaussianState {
    pub fn det(&self) -> f64 {
        self.cov[0][0] * self.cov[1][1] - self.cov[0][1] * self.cov[1][0]
    }

    /// Uncertainty relation `det cov ≥ ¼` up to `1e-6`.
    pub fn is_physical(&self) -> bool {
        self.det() >= 0.25 - 1e-6 && self.cov[0][0] > 0.0 && self.cov[1][1] > 0.0
    }

    /// Both displacement and covariance rotated by `theta` in phase space.
    pub fn rotated(&self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let r = [[c, -s], [s, c]];
        let d = [
            r[0][0] * self.d[0] + r[0][1] * self.d[1],
            r[1][0] * self.d[0] + r[1][1] * self.d[1],
        ];
        let mut cov = [[0.0; 2]; 2];
        for (i, row) in cov.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..2)
                    .flat_map(|k| (0..2).map(move |l| (k, l)))
                    .map(|(k, l)| r[i][k] * self.cov[k][l] * r[j][l])
                    .sum();
            }
        }
        Self { d, cov }
    }
}

pub fn moments_to_gaussian(m: &Moments) -> GaussianState {
    let (ar, ai) = (m.a_mean.re, m.a_mean.im);
    let s2 = std::f64::consts::SQRT_2;
    let var_x = m.aa_mean.re + m.n_mean + 0.5 - 2.0 * ar * ar;
    let var_p = -m.aa_mean.re + m.n_mean + 0.5 - 2.0 * ai * ai;
    let cov_xp = m.aa_mean.im - 2.0 * ar * ai;
    GaussianState {
        d: [s2 * ar, s2 * ai],
        cov: [[var_x, cov_xp], [cov_xp, var_p]],
    }
}

/// Exact moments for several initial states sharing one `G` and one `ℐ`:
/// `⟨a⟩ = G⟨a⟩₀`, `⟨aa⟩ = G²⟨aa⟩₀`, `⟨a†a⟩ = |G|²⟨a†a⟩₀ + ℐ`.
pub fn propagate_exact_many(
    params: &SpectralParams,
    initial: &[Moments],
    grid: &TimeGrid,
    quad: &FrequencyQuadrature,
) -> Result<Vec<MomentTrajectory>> {
    let g = ExactGreen::new(params);
    let noise = exact_noise_value(params, grid, quad)?;
    let gs: Vec<Complex64> = grid.times().map(|t| g.full(t)).collect();
    Ok(initial
        .iter()
        .map(|m0| MomentTrajectory {
            grid: *grid,
            moments: gs
                .iter()
                .zip(&noise)
                .map(|(&gk, &ik)| Moments {
                    a_mean: gk * m0.a_mean,
                    aa_mean: gk * gk * m0.aa_mean,
                    n_mean: gk.norm_sqr() * m0.n_mean + ik,
                })
                .collect(),
        })
        .collect())
}

pub fn propagate_exact(
    params: &SpectralParams,
    m0: &Moments,
    grid: &TimeGrid,
    quad: &FrequencyQuadrature,
) -> Result<MomentTrajectory> {
    Ok(propagate_exact_many(params, std::slice::from_ref(m0), grid, quad)?.remove(0))
}

/// Integrates
/// `d⟨a⟩/dt = −(iω_r + γ/2)⟨a⟩`, `d⟨aa⟩/dt = −(2iω_r + γ)⟨aa⟩`,
/// `d⟨a†a⟩/dt = −γ⟨a†a⟩ + γ₊` with RK4, interpolating coefficients linearly.
pub fn propagate_tcl(
    coeffs: &MasterEqCoefficients,
    m0: &Moments,
    grid: &TimeGrid,
) -> Result<MomentTrajectory> {
    if coeffs.grid != *grid {
        return Err(Error::InvalidGrid(
            "coefficients must be sampled on the propagation grid".into(),
        ));
    }
    let i = Complex64::i();
    let y0 = [m0.a_mean, m0.aa_mean, Complex64::new(m0.n_mean, 0.0)];
    let states = integrate_ode(
        |t, y, dy| {
            let w = coeffs.omega_r.interpolate(t);
            let g = coeffs.gamma.interpolate(t);
            let gp = coeffs.gamma_plus.interpolate(t);
            dy[0] = -(i * w + 0.5 * g) * y[0];
            dy[1] = -(2.0 * i * w + g) * y[1];
            dy[2] = -g * y[2] + gp;
        },
        &y0,
        grid,
    )?;
    Ok(MomentTrajectory {
        grid: *grid,
        moments: states
            .into_iter()
            .map(|y| Moments {
                a_mean: y[0],
                aa_mean: y[1],
                n_mean: y[2].re,
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{exact_coefficients, MasterEqCoefficients, Order};
    use crate::numerics::{build_frequency_quadrature, QuadratureOptions, RealTrajectory};

    fn p() -> SpectralParams {
        SpectralParams::default()
    }

    fn quad(p: &SpectralParams) -> FrequencyQuadrature {
        build_frequency_quadrature(p, &QuadratureOptions::default()).unwrap()
    }

    fn constant_coeffs(grid: &TimeGrid, w: f64, g: f64, gp: f64) -> MasterEqCoefficients {
        let c = |v: f64| RealTrajectory::from_fn(*grid, |_| v).unwrap();
        MasterEqCoefficients {
            grid: *grid,
            order: Order::Tcl2,
            omega_r: c(w),
            gamma: c(g),
            gamma_plus: c(gp),
            gamma_minus: c(g + gp),
            singular_nodes: vec![],
        }
    }

    #[test]
    fn gaussian_mapping_of_reference_states() {
        let v = moments_to_gaussian(&Moments::vacuum());
        assert_eq!(v.d, [0.0, 0.0]);
        assert_eq!(v.cov, [[0.5, 0.0], [0.0, 0.5]]);
        assert_eq!(v.det(), 0.25);

        let c = moments_to_gaussian(&Moments::coherent(Complex64::new(0.11, 0.22)));
        assert!((c.d[0] - 0.1555635).abs() < 1e-7);
        assert!((c.d[1] - 0.3111270).abs() < 1e-7);
        for (i, row) in c.cov.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let expected = if i == j { 0.5 } else { 0.0 };
                assert!((v - expected).abs() < 1e-15);
            }
        }

        let t = moments_to_gaussian(&Moments::thermal(1.3));
        assert_eq!(t.cov, [[1.8, 0.0], [0.0, 1.8]]);
    }

    #[test]
    fn vacuum_occupation_equals_noise_integral() {
        let grid = TimeGrid::from_zero(5.0, 1000).unwrap();
        let p = p();
        let q = quad(&p);
        let tr = propagate_exact(&p, &Moments::vacuum(), &grid, &q).unwrap();
        let noise = crate::coefficients::noise_integral(&p, &grid, Order::Exact, &q).unwrap();
        for (m, i) in tr.moments.iter().zip(noise.value.values()) {
            assert_eq!(m.a_mean, Complex64::new(0.0, 0.0));
            assert_eq!(m.aa_mean, Complex64::new(0.0, 0.0));
            assert!((m.n_mean - i).abs() < 1e-14);
        }
    }

    #[test]
    fn thermalisation_is_independent_of_initial_state() {
        let grid = TimeGrid::from_zero(60.0, 12_000).unwrap();
        let p = p();
        let q = build_frequency_quadrature(&p, &QuadratureOptions::default().with_horizon(60.0))
            .unwrap();
        let trs = propagate_exact_many(
            &p,
            &[
                Moments::coherent(Complex64::new(1.0, -2.0)),
                Moments::thermal(3.0),
            ],
            &grid,
            &q,
        )
        .unwrap();
        let (a, b) = (
            trs[0].moments.last().unwrap(),
            trs[1].moments.last().unwrap(),
        );
        assert!((a.n_mean - b.n_mean).abs() < 1e-3);
        assert!(a.a_mean.norm() < 1e-2 * 5f64.sqrt());
    }

    #[test]
    fn constant_rates_thermalise_to_fixed_point() {
        let grid = TimeGrid::from_zero(60.0, 6000).unwrap();
        let n_bar = 0.58;
        let coeffs = constant_coeffs(&grid, 10.0, 0.2, 0.2 * n_bar);
        let tr = propagate_tcl(&coeffs, &Moments::vacuum(), &grid).unwrap();
        for (t, m) in grid.times().zip(&tr.moments) {
            assert!((m.n_mean - n_bar * (1.0 - (-0.2 * t).exp())).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_rates_keep_moments_constant() {
        let grid = TimeGrid::from_zero(2.0, 200).unwrap();
        let coeffs = constant_coeffs(&grid, 0.0, 0.0, 0.0);
        let m0 = Moments::coherent(Complex64::new(0.3, 0.1));
        let tr = propagate_tcl(&coeffs, &m0, &grid).unwrap();
        assert!(tr.moments.iter().all(|m| *m == m0));
    }

    #[test]
    fn tcl_with_exact_coefficients_reproduces_closed_form() {
        let grid = TimeGrid::default();
        let p = p();
        let q = quad(&p);
        let coeffs = exact_coefficients(&p, &grid, &q).unwrap();
        let m0 = Moments::coherent(Complex64::new(0.11, 0.22));
        let ode = propagate_tcl(&coeffs, &m0, &grid).unwrap();
        let exact = propagate_exact(&p, &m0, &grid, &q).unwrap();
        for (a, b) in ode.moments.iter().zip(&exact.moments) {
            assert!((a.a_mean - b.a_mean).norm() <= 1e-4 * b.a_mean.norm());
            assert!((a.aa_mean - b.aa_mean).norm() <= 1e-4 * b.aa_mean.norm());
            assert!((a.n_mean - b.n_mean).abs() <= 1e-4 * b.n_mean);
        }
    }

    #[test]
    fn exact_amplitude_ratio_is_green_modulus() {
        let grid = TimeGrid::from_zero(10.0, 500).unwrap();
        let p = SpectralParams { gamma0: 2.0, ..p() };
        let q = quad(&p);
        let g = ExactGreen::new(&p);
        for alpha in [Complex64::new(0.1, 0.0), Complex64::new(-2.0, 3.0)] {
            let tr = propagate_exact(&p, &Moments::coherent(alpha), &grid, &q).unwrap();
            for (t, m) in grid.times().zip(&tr.moments) {
                assert!((m.a_mean.norm() / alpha.norm() - g.full(t).norm()).abs() < 1e-14);
                assert!(moments_to_gaussian(m).det() >= 0.25 - 1e-12);
            }
        }
    }

    #[test]
    fn free_evolution_is_a_pure_phase() {
        let grid = TimeGrid::from_zero(3.0, 300).unwrap();
        let p = SpectralParams {
            gamma0: 1e-300,
            ..p()
        };
        let q = quad(&p);
        let alpha = Complex64::new(0.4, -0.7);
        let tr = propagate_exact(&p, &Moments::coherent(alpha), &grid, &q).unwrap();
        for (t, m) in grid.times().zip(&tr.moments) {
            assert!((m.a_mean - alpha * Complex64::from_polar(1.0, -10.0 * t)).norm() < 1e-13);
            assert!((m.n_mean - alpha.norm_sqr()).abs() < 1e-13);
        }
    }
}
