//! Green function of the damped mode and its perturbative pieces.
//!
//! With `G(t) = e^{−iω₀t} G̃(t)` the reduced function obeys
//! `G̃' = −∫₀ᵗ K̃(t−τ) G̃(τ) dτ`, `K̃(s) = k e^{cs}`, `k = γ₀λ/2`,
//! `c = −λ + iΔ`. Expanding `G̃ = 1 + G̃⁽²⁾ + G̃⁽⁴⁾ + …` in powers of `k`
//! gives the closed forms implemented here.

use num_complex::Complex64;

use crate::bath::SpectralParams;
use crate::error::Result;
use crate::numerics::{expm1_complex, phi_expm1, ComplexTrajectory, TimeGrid};

/// Roots of `s² + (λ − iΔ)s + γ₀λ/2 = 0`, ordered so `Re s1 ≥ Re s2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootPair {
    pub s1: Complex64,
    pub s2: Complex64,
}

pub fn roots(params: &SpectralParams) -> RootPair {
    let b = Complex64::new(params.lambda, -params.delta);
    let disc = (b * b - 2.0 * params.gamma0 * params.lambda).sqrt();
    let (mut s1, mut s2) = (0.5 * (-b + disc), 0.5 * (-b - disc));
    if s1.re < s2.re {
        std::mem::swap(&mut s1, &mut s2);
    }
    RootPair { s1, s2 }
}

/// Pointwise evaluator for the exact reduced Green function.
///
/// Uses `G̃ = e^{s1 t}(1 − s1 φ)`, `φ = (e^{(s2−s1)t} − 1)/(s2 − s1)`, which
/// stays finite at late times and reduces to the confluent form
/// `e^{st}(1 − st)` when the roots coincide.
#[derive(Debug, Clone, Copy)]
pub struct ExactGreen {
    pub roots: RootPair,
    pub omega0: f64,
}

impl ExactGreen {
    pub fn new(params: &SpectralParams) -> Self {
        Self {
            roots: roots(params),
            omega0: params.omega0,
        }
    }

    fn phi(&self, t: f64) -> Complex64 {
        phi_expm1(self.roots.s2 - self.roots.s1, t)
    }

    pub fn reduced(&self, t: f64) -> Complex64 {
        let s1 = self.roots.s1;
        (s1 * t).exp() * (1.0 - s1 * self.phi(t))
    }

    pub fn full(&self, t: f64) -> Complex64 {
        self.reduced(t) * Complex64::from_polar(1.0, -self.omega0 * t)
    }

    /// `G̃'/G̃ = −s1 s2 φ / (1 − s1 φ)`; the exponential prefactor cancels.
    pub fn log_derivative(&self, t: f64) -> Complex64 {
        let RootPair { s1, s2 } = self.roots;
        let phi = self.phi(t);
        -s1 * s2 * phi / (1.0 - s1 * phi)
    }
}

/// Closed forms of the second- and fourth-order reduced Green functions.
#[derive(Debug, Clone, Copy)]
pub struct Expansion {
    /// `c = −λ + iΔ`.
    pub c: Complex64,
    /// `k = γ₀λ/2`.
    pub k: f64,
}

impl Expansion {
    pub fn new(params: &SpectralParams) -> Self {
        Self {
            c: Complex64::new(-params.lambda, params.delta),
            k: 0.5 * params.gamma0 * params.lambda,
        }
    }

    /// `Ġ̃⁽²⁾ = (k/c)(1 − e^{ct})`.
    pub fn gt2_dot(&self, t: f64) -> Complex64 {
        -(self.k / self.c) * expm1_complex(self.c * t)
    }

    /// `G̃⁽²⁾ = (k/c)(t − (e^{ct} − 1)/c)`.
    pub fn gt2(&self, t: f64) -> Complex64 {
        (self.k / self.c) * (t - phi_expm1(self.c, t))
    }

    /// `Ġ̃⁽⁴⁾ = (k²/c²)[t(1 + e^{ct}) + (2/c)(1 − e^{ct})]`, the solution of
    /// `Ġ̃⁽⁴⁾ = −∫₀ᵗ K̃(t−τ) G̃⁽²⁾(τ) dτ`.
    pub fn gt4_dot(&self, t: f64) -> Complex64 {
        let c = self.c;
        let em1 = expm1_complex(c * t);
        (self.k * self.k / (c * c)) * (t * (2.0 + em1) - 2.0 * em1 / c)
    }

    /// `Ġ̃(∞)` at second order, `k/c`.
    pub fn gt2_dot_limit(&self) -> Complex64 {
        self.k / self.c
    }
}

/// `G(t)` on the grid (time measured from `grid.t_start()`).
pub fn exact_green(params: &SpectralParams, grid: &TimeGrid) -> Result<ComplexTrajectory> {
    let g = ExactGreen::new(params);
    let t0 = grid.t_start();
    ComplexTrajectory::from_fn(*grid, |t| g.full(t - t0))
}

/// `(G̃⁽²⁾, Ġ̃⁽²⁾)` on the grid.
pub fn gtilde2(
    params: &SpectralParams,
    grid: &TimeGrid,
) -> Result<(ComplexTrajectory, ComplexTrajectory)> {
    let e = Expansion::new(params);
    let t0 = grid.t_start();
    Ok((
        ComplexTrajectory::from_fn(*grid, |t| e.gt2(t - t0))?,
        ComplexTrajectory::from_fn(*grid, |t| e.gt2_dot(t - t0))?,
    ))
}

/// `Ġ̃⁽⁴⁾` on the grid.
pub fn gtilde4_dot(params: &SpectralParams, grid: &TimeGrid) -> Result<ComplexTrajectory> {
    let e = Expansion::new(params);
    let t0 = grid.t_start();
    ComplexTrajectory::from_fn(*grid, |t| e.gt4_dot(t - t0))
}

/// All Green-function trajectories for one parameter set.
#[derive(Debug, Clone)]
pub struct GreenSet {
    pub grid: TimeGrid,
    pub exact: ComplexTrajectory,
    pub g0: ComplexTrajectory,
    pub gt2: ComplexTrajectory,
    pub gt2_dot: ComplexTrajectory,
    pub gt4_dot: ComplexTrajectory,
    /// Cumulative trapezoidal integral of `gt4_dot`.
    pub gt4: ComplexTrajectory,
}

impl GreenSet {
    pub fn compute(params: &SpectralParams, grid: &TimeGrid) -> Result<Self> {
        let t0 = grid.t_start();
        let omega0 = params.omega0;
        let (gt2, gt2_dot) = gtilde2(params, grid)?;
        let gt4_dot = gtilde4_dot(params, grid)?;
        let gt4 = gt4_dot.cumulative_integral()?;
        Ok(Self {
            grid: *grid,
            exact: exact_green(params, grid)?,
            g0: ComplexTrajectory::from_fn(*grid, |t| {
                Complex64::from_polar(1.0, -omega0 * (t - t0))
            })?,
            gt2,
            gt2_dot,
            gt4_dot,
            gt4,
        })
    }

    /// `max_t |G − G⁽⁰⁾(1 + G̃⁽²⁾ + G̃⁽⁴⁾)|`.
    pub fn fourth_order_residual(&self) -> f64 {
        (0..self.grid.len())
            .map(|k| {
                let approx =
                    self.g0.values()[k] * (1.0 + self.gt2.values()[k] + self.gt4.values()[k]);
                (self.exact.values()[k] - approx).norm()
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> SpectralParams {
        SpectralParams::default()
    }

    #[test]
    fn real_roots_at_resonance() {
        let r = roots(&SpectralParams { delta: 0.0, ..p() });
        assert!((r.s1 - Complex64::new(-0.1127017, 0.0)).norm() < 1e-7);
        assert!((r.s2 - Complex64::new(-0.8872983, 0.0)).norm() < 1e-7);
    }

    #[test]
    fn vieta_relations() {
        let params = SpectralParams { gamma0: 2.0, ..p() };
        let r = roots(&params);
        assert!((r.s1 * r.s2 - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((r.s1 + r.s2 - Complex64::new(-1.0, 0.4)).norm() < 1e-12);
        assert!(r.s1.re >= r.s2.re);
    }

    #[test]
    fn weak_coupling_root_limits() {
        let r = roots(&SpectralParams {
            gamma0: 1e-9,
            ..p()
        });
        assert!(r.s1.norm() < 1e-8);
        assert!((r.s2 - Complex64::new(-1.0, 0.4)).norm() < 1e-8);
    }

    #[test]
    fn exact_green_starts_at_one_and_reduces_to_free_rotation() {
        let grid = TimeGrid::from_zero(5.0, 500).unwrap();
        let g = exact_green(&p(), &grid).unwrap();
        assert_eq!(g.values()[0], Complex64::new(1.0, 0.0));
        let free = ExactGreen::new(&SpectralParams {
            gamma0: 1e-300,
            ..p()
        });
        for t in [0.0, 1.0, 3.3] {
            assert!((free.full(t) - Complex64::from_polar(1.0, -10.0 * t)).norm() < 1e-14);
        }
    }

    #[test]
    fn critical_damping_matches_confluent_limit() {
        let params = SpectralParams {
            gamma0: 0.5,
            delta: 0.0,
            ..p()
        };
        let g = ExactGreen::new(&params);
        assert!((g.roots.s1 - g.roots.s2).norm() < 1e-7);
        let s = Complex64::new(-0.5, 0.0);
        for t in [0.5, 2.0, 7.0] {
            let confluent = (s * t).exp() * (1.0 - s * t);
            assert!((g.reduced(t) - confluent).norm() < 1e-7);
        }
    }

    #[test]
    fn log_derivative_matches_ratio_of_exponentials() {
        let g = ExactGreen::new(&SpectralParams { gamma0: 2.0, ..p() });
        let RootPair { s1, s2 } = g.roots;
        for t in [0.0, 0.2, 1.0, 4.0] {
            let num = s1 * s2 * ((s1 * t).exp() - (s2 * t).exp());
            let den = s2 * (s1 * t).exp() - s1 * (s2 * t).exp();
            let expected = if t == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                num / den
            };
            assert!((g.log_derivative(t) - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn second_order_values() {
        let e = Expansion::new(&p());
        assert_eq!(e.gt2_dot(0.0), Complex64::new(0.0, 0.0));
        assert_eq!(e.gt2(0.0), Complex64::new(0.0, 0.0));
        let lim = e.gt2_dot_limit();
        assert!((lim.re + 0.0862069).abs() < 1e-7);
        assert!((lim.im + 0.0344828).abs() < 1e-7);
        assert!((e.gt2_dot(60.0) - lim).norm() < 1e-15);
    }

    #[test]
    fn gt2_derivative_by_finite_differences() {
        let grid = TimeGrid::from_zero(10.0, 4000).unwrap();
        let (gt2, gt2_dot) = gtilde2(&p(), &grid).unwrap();
        let h = grid.step();
        let v = gt2.values();
        let worst = (1..grid.n_steps())
            .map(|k| ((v[k + 1] - v[k - 1]) / (2.0 * h) - gt2_dot.values()[k]).norm())
            .fold(0.0, f64::max);
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn fourth_order_scales_with_gamma0_squared() {
        let a = Expansion::new(&p());
        let b = Expansion::new(&SpectralParams { gamma0: 0.4, ..p() });
        assert_eq!(a.gt4_dot(0.0), Complex64::new(0.0, 0.0));
        for t in [0.1, 1.0, 5.0] {
            assert!((b.gt4_dot(t) - 4.0 * a.gt4_dot(t)).norm() < 1e-15);
        }
    }

    #[test]
    fn gt4_dot_equals_defining_convolution() {
        // Independent route: Ġ̃⁽⁴⁾(t) = −∫₀ᵗ K(t−τ) e^{iω₀(t−τ)} G̃⁽²⁾(τ) dτ by
        // composite Simpson on a fine grid.
        let params = p();
        let e = Expansion::new(&params);
        let n = 20_000;
        for t in [0.5, 2.0, 6.0, 10.0] {
            let h = t / n as f64;
            let f = |tau: f64| {
                params.memory_kernel(t - tau)
                    * Complex64::from_polar(1.0, params.omega0 * (t - tau))
                    * e.gt2(tau)
            };
            let mut acc = f(0.0) + f(t);
            for j in 1..n {
                acc += f(j as f64 * h) * if j % 2 == 1 { 4.0 } else { 2.0 };
            }
            let conv = -acc * h / 3.0;
            assert!((conv - e.gt4_dot(t)).norm() < 1e-10, "t = {t}");
        }
    }

    #[test]
    fn residual_is_third_order_in_weak_coupling() {
        let grid = TimeGrid::from_zero(20.0, 8000).unwrap();
        let r1 = GreenSet::compute(&p(), &grid)
            .unwrap()
            .fourth_order_residual();
        let r2 = GreenSet::compute(&SpectralParams { gamma0: 0.1, ..p() }, &grid)
            .unwrap()
            .fourth_order_residual();
        let ratio = r1 / r2;
        assert!((6.0..=10.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn modulus_bounded_and_late_decay_rate() {
        for params in [p(), SpectralParams { gamma0: 2.0, ..p() }] {
            let g = ExactGreen::new(&params);
            let rate = -2.0 * g.roots.s1.re;
            assert!((g.roots.s1.re + g.roots.s2.re + params.lambda).abs() < 1e-12);
            for k in 0..400 {
                assert!(g.full(0.05 * k as f64).norm() <= 1.0 + 1e-12);
            }
            let (t1, t2) = (60.0, 61.0);
            let fit = -(g.full(t2).norm_sqr() / g.full(t1).norm_sqr()).ln() / (t2 - t1);
            assert!((fit - rate).abs() < 1e-4 * rate, "{fit} vs {rate}");
        }
    }
}
