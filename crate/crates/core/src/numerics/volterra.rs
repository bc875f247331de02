use num_complex::Complex64;

use super::{ComplexTrajectory, TimeGrid};
use crate::error::{Error, Result};

/// Solves `Ġ + iω₀G + ∫₀ᵗ K(t−τ) G(τ) dτ = 0` with `G(t_start) = 1`.
///
/// Time is measured from `grid.t_start()`. The free rotation is removed
/// first: with `G = e^{−iω₀t} G̃` and `K̃(s) = K(s) e^{iω₀s}` the reduced
/// equation `G̃' = −∫ K̃(t−τ) G̃(τ) dτ` has no fast phase. The memory integral
/// uses the product trapezoid rule and each step is a Heun predictor plus one
/// corrector pass, giving O(h²) global error.
pub fn solve_volterra(
    kernel: impl Fn(f64) -> Complex64,
    omega0: f64,
    grid: &TimeGrid,
) -> Result<ComplexTrajectory> {
    let n = grid.n_steps();
    let h = grid.step();
    let mut kt = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let s = k as f64 * h;
        let v = kernel(s);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFiniteAtTime {
                time: grid.time(k),
                what: format!("memory kernel sample at lag {s}"),
            });
        }
        kt.push(v * Complex64::from_polar(1.0, omega0 * s));
    }

    let mut g = Vec::with_capacity(n + 1);
    g.push(Complex64::new(1.0, 0.0));
    // memory[k] = trapezoid approximation of ∫₀^{t_k} K̃(t_k − τ) G̃(τ) dτ
    let mut memory_k = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let f_k = -memory_k;
        let predicted = g[k] + f_k * h;
        // Interior and left-end contributions of the trapezoid at t_{k+1}.
        let mut partial = 0.5 * kt[k + 1] * g[0];
        for j in 1..=k {
            partial += kt[k + 1 - j] * g[j];
        }
        let mem_pred = h * (partial + 0.5 * kt[0] * predicted);
        let corrected = g[k] + 0.5 * h * (f_k - mem_pred);
        memory_k = h * (partial + 0.5 * kt[0] * corrected);
        g.push(corrected);
    }

    let values = g
        .into_iter()
        .enumerate()
        .map(|(k, gt)| gt * Complex64::from_polar(1.0, -omega0 * k as f64 * h))
        .collect();
    ComplexTrajectory::new(*grid, values)
}
