use num_complex::Complex64;

use super::TimeGrid;
use crate::error::{Error, Result};

/// Classical fourth-order Runge-Kutta on a fixed grid.
///
/// `rhs(t, y, dy)` writes the derivative into `dy`. Returns one state per
/// grid node, the first being `y0`.
pub fn integrate_ode(
    mut rhs: impl FnMut(f64, &[Complex64], &mut [Complex64]),
    y0: &[Complex64],
    grid: &TimeGrid,
) -> Result<Vec<Vec<Complex64>>> {
    let dim = y0.len();
    let h = grid.step();
    let mut out = Vec::with_capacity(grid.len());
    out.push(y0.to_vec());
    let (mut k1, mut k2, mut k3, mut k4) = (
        vec![Complex64::default(); dim],
        vec![Complex64::default(); dim],
        vec![Complex64::default(); dim],
        vec![Complex64::default(); dim],
    );
    let mut tmp = vec![Complex64::default(); dim];
    for step in 0..grid.n_steps() {
        let t = grid.time(step);
        let y = &out[step];
        rhs(t, y, &mut k1);
        for i in 0..dim {
            tmp[i] = y[i] + k1[i] * (0.5 * h);
        }
        rhs(t + 0.5 * h, &tmp, &mut k2);
        for i in 0..dim {
            tmp[i] = y[i] + k2[i] * (0.5 * h);
        }
        rhs(t + 0.5 * h, &tmp, &mut k3);
        for i in 0..dim {
            tmp[i] = y[i] + k3[i] * h;
        }
        rhs(t + h, &tmp, &mut k4);
        let next: Vec<Complex64> = (0..dim)
            .map(|i| y[i] + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0))
            .collect();
        if next.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFiniteStep { step: step + 1 });
        }
        out.push(next);
    }
    Ok(out)
}
