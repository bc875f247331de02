//! Frequency-resolved time integrals `F(ω,t) = ∫₀ᵗ g(τ) e^{i(ω−ω₀)τ} dτ` and
//! the thermally weighted sums built from them.
//!
//! `g` is piecewise linear in τ between grid nodes and the oscillating factor
//! is integrated exactly (Filon-trapezoid), so the accumulation stays accurate
//! for detunings `|ω−ω₀| h` of order one. Nodes are processed in fixed blocks
//! whose partial sums are combined in block order, so results do not depend
//! on the number of worker threads.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bath::SpectralParams;
use crate::error::{Error, Result};
use crate::numerics::{FrequencyQuadrature, TimeGrid};

const BLOCK: usize = 256;
const LANES: usize = 4;

/// Per-node constants, structure-of-arrays, padded to a multiple of `LANES`
/// with zero-weight nodes.
struct NodeBlock {
    first: usize,
    len: usize,
    wf: Vec<f64>,
    ar: Vec<f64>,
    ai: Vec<f64>,
    br: Vec<f64>,
    bi: Vec<f64>,
    rr: Vec<f64>,
    ri: Vec<f64>,
}

/// Filon weights `h∫₀¹(1−u)e^{iθu}du` and `h∫₀¹u e^{iθu}du`.
pub(crate) fn filon_weights(theta: f64, h: f64) -> (Complex64, Complex64) {
    let i = Complex64::i();
    let (a, b) = if theta.abs() < 1e-2 {
        let t = theta;
        let t2 = t * t;
        // ∫₀¹ e^{iθu} du and ∫₀¹ u e^{iθu} du through θ⁵
        let m0 = Complex64::new(
            1.0 - t2 / 6.0 + t2 * t2 / 120.0,
            t / 2.0 - t * t2 / 24.0 + t * t2 * t2 / 720.0,
        );
        let m1 = Complex64::new(
            0.5 - t2 / 8.0 + t2 * t2 / 144.0,
            t / 3.0 - t * t2 / 30.0 + t * t2 * t2 / 840.0,
        );
        (m0 - m1, m1)
    } else {
        let e = Complex64::from_polar(1.0, theta);
        let m0 = (e - 1.0) / (i * theta);
        let m1 = e / (i * theta) + (e - 1.0) / (theta * theta);
        (m0 - m1, m1)
    };
    (a * h, b * h)
}

fn build_blocks(
    params: &SpectralParams,
    grid: &TimeGrid,
    quad: &FrequencyQuadrature,
) -> Vec<NodeBlock> {
    let h = grid.step();
    let n = quad.len();
    (0..n)
        .step_by(BLOCK)
        .map(|first| {
            let len = BLOCK.min(n - first);
            let padded = len.div_ceil(LANES) * LANES;
            let mut b = NodeBlock {
                first,
                len,
                wf: vec![0.0; padded],
                ar: vec![0.0; padded],
                ai: vec![0.0; padded],
                br: vec![0.0; padded],
                bi: vec![0.0; padded],
                rr: vec![1.0; padded],
                ri: vec![0.0; padded],
            };
            for j in 0..len {
                let omega = quad.nodes()[first + j];
                let nu = omega - params.omega0;
                let (a, bw) = filon_weights(nu * h, h);
                let rot = Complex64::from_polar(1.0, nu * h);
                b.wf[j] = quad.weights()[first + j] * params.thermal_weight(omega);
                b.ar[j] = a.re;
                b.ai[j] = a.im;
                b.br[j] = bw.re;
                b.bi[j] = bw.im;
                b.rr[j] = rot.re;
                b.ri[j] = rot.im;
            }
            b
        })
        .collect()
}

fn lane_sum(x: &[f64]) -> f64 {
    let mut acc = [0.0; LANES];
    for c in x.chunks_exact(LANES) {
        for l in 0..LANES {
            acc[l] += c[l];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3])
}

fn check_finite(block: &NodeBlock, state: &[&[f64]], quad: &FrequencyQuadrature) -> Result<()> {
    for j in 0..block.len {
        if state.iter().any(|s| !s[j].is_finite()) {
            let index = block.first + j;
            return Err(Error::NonFiniteNode {
                index,
                omega: quad.nodes()[index],
            });
        }
    }
    Ok(())
}

/// Output of a single-source accumulation.
pub(crate) struct SingleSums {
    pub value: Vec<f64>,
    pub derivative: Option<Vec<f64>>,
}

/// `ℐ = Σ w f |F|²` and optionally `ℐ̇ = Σ w f 2Re(F̄ g(t) e^{iνt})` for one
/// source function `g` sampled on the grid.
pub(crate) fn single_source(
    params: &SpectralParams,
    grid: &TimeGrid,
    quad: &FrequencyQuadrature,
    g: &[Complex64],
    with_derivative: bool,
) -> Result<SingleSums> {
    let nt = grid.len();
    let blocks = build_blocks(params, grid, quad);
    let partials: Vec<Result<(Vec<f64>, Vec<f64>)>> = blocks
        .par_iter()
        .map(|b| {
            let m = b.wf.len();
            let (mut fr, mut fi) = (vec![0.0; m], vec![0.0; m]);
            let (mut er, mut ei) = (vec![1.0; m], vec![0.0; m]);
            let mut c_val = vec![0.0; m];
            let mut c_der = vec![0.0; m];
            let mut val = vec![0.0; nt];
            let mut der = vec![0.0; if with_derivative { nt } else { 0 }];
            let (ar, ai, br, bi) = (&b.ar[..m], &b.ai[..m], &b.br[..m], &b.bi[..m]);
            let (rr, ri, wf) = (&b.rr[..m], &b.ri[..m], &b.wf[..m]);
            for k in 0..nt - 1 {
                let (g0, g1) = (g[k], g[k + 1]);
                let (fr, fi) = (&mut fr[..m], &mut fi[..m]);
                let (er, ei) = (&mut er[..m], &mut ei[..m]);
                let cv = &mut c_val[..m];
                for j in 0..m {
                    let cr = g0.re * ar[j] - g0.im * ai[j] + g1.re * br[j] - g1.im * bi[j];
                    let ci = g0.re * ai[j] + g0.im * ar[j] + g1.re * bi[j] + g1.im * br[j];
                    let (e_r, e_i) = (er[j], ei[j]);
                    let f_r = fr[j] + e_r * cr - e_i * ci;
                    let f_i = fi[j] + e_r * ci + e_i * cr;
                    fr[j] = f_r;
                    fi[j] = f_i;
                    er[j] = e_r * rr[j] - e_i * ri[j];
                    ei[j] = e_r * ri[j] + e_i * rr[j];
                    cv[j] = wf[j] * (f_r * f_r + f_i * f_i);
                }
                val[k + 1] = lane_sum(cv);
                if with_derivative {
                    let cd = &mut c_der[..m];
                    for j in 0..m {
                        let qr = g1.re * er[j] - g1.im * ei[j];
                        let qi = g1.re * ei[j] + g1.im * er[j];
                        cd[j] = 2.0 * wf[j] * (fr[j] * qr + fi[j] * qi);
                    }
                    der[k + 1] = lane_sum(cd);
                }
            }
            check_finite(b, &[&fr, &fi], quad)?;
            Ok((val, der))
        })
        .collect();

    let mut value = vec![0.0; nt];
    let mut derivative = vec![0.0; if with_derivative { nt } else { 0 }];
    for p in partials {
        let (v, d) = p?;
        value.iter_mut().zip(&v).for_each(|(a, b)| *a += b);
        derivative.iter_mut().zip(&d).for_each(|(a, b)| *a += b);
    }
    Ok(SingleSums {
        value,
        derivative: with_derivative.then_some(derivative),
    })
}

/// Second- and fourth-order noise sums.
pub(crate) struct PairSums {
    pub i2: Vec<f64>,
    pub i2_dot: Vec<f64>,
    pub i4: Vec<f64>,
    pub i4_dot: Vec<f64>,
}

/// Accumulates `F₀` (source 1) and `F₂` (source `G̃⁽²⁾`) together and forms
/// `ℐ⁽²⁾ = Σ wf|F₀|²`, `ℐ⁽⁴⁾ = Σ wf 2Re(F₂F̄₀)` and their time derivatives.
pub(crate) fn second_and_fourth(
    params: &SpectralParams,
    grid: &TimeGrid,
    quad: &FrequencyQuadrature,
    g2: &[Complex64],
) -> Result<PairSums> {
    let nt = grid.len();
    let blocks = build_blocks(params, grid, quad);
    let partials: Vec<Result<[Vec<f64>; 4]>> = blocks
        .par_iter()
        .map(|b| {
            let m = b.wf.len();
            let sr: Vec<f64> = (0..m).map(|j| b.ar[j] + b.br[j]).collect();
            let si: Vec<f64> = (0..m).map(|j| b.ai[j] + b.bi[j]).collect();
            let (mut f0r, mut f0i) = (vec![0.0; m], vec![0.0; m]);
            let (mut f2r, mut f2i) = (vec![0.0; m], vec![0.0; m]);
            let (mut er, mut ei) = (vec![1.0; m], vec![0.0; m]);
            let mut scratch = [vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]];
            let mut out = [vec![0.0; nt], vec![0.0; nt], vec![0.0; nt], vec![0.0; nt]];
            let (ar, ai, br, bi) = (&b.ar[..m], &b.ai[..m], &b.br[..m], &b.bi[..m]);
            let (rr, ri, wf) = (&b.rr[..m], &b.ri[..m], &b.wf[..m]);
            let (sr, si) = (&sr[..m], &si[..m]);
            for k in 0..nt - 1 {
                let (g0, g1) = (g2[k], g2[k + 1]);
                let (f0r, f0i) = (&mut f0r[..m], &mut f0i[..m]);
                let (f2r, f2i) = (&mut f2r[..m], &mut f2i[..m]);
                let (er, ei) = (&mut er[..m], &mut ei[..m]);
                let [s_i2, s_i2d, s_i4, s_i4d] = &mut scratch;
                let (s_i2, s_i2d) = (&mut s_i2[..m], &mut s_i2d[..m]);
                let (s_i4, s_i4d) = (&mut s_i4[..m], &mut s_i4d[..m]);
                for j in 0..m {
                    let (e_r, e_i) = (er[j], ei[j]);
                    f0r[j] += e_r * sr[j] - e_i * si[j];
                    f0i[j] += e_r * si[j] + e_i * sr[j];
                    let cr = g0.re * ar[j] - g0.im * ai[j] + g1.re * br[j] - g1.im * bi[j];
                    let ci = g0.re * ai[j] + g0.im * ar[j] + g1.re * bi[j] + g1.im * br[j];
                    f2r[j] += e_r * cr - e_i * ci;
                    f2i[j] += e_r * ci + e_i * cr;
                    er[j] = e_r * rr[j] - e_i * ri[j];
                    ei[j] = e_r * ri[j] + e_i * rr[j];
                }
                for j in 0..m {
                    let (a_r, a_i, b_r, b_i) = (f0r[j], f0i[j], f2r[j], f2i[j]);
                    let (nr, ni) = (er[j], ei[j]);
                    let w = wf[j];
                    s_i2[j] = w * (a_r * a_r + a_i * a_i);
                    // Re(F̄₀ E)
                    s_i2d[j] = 2.0 * w * (a_r * nr + a_i * ni);
                    // Re(F₂ F̄₀)
                    s_i4[j] = 2.0 * w * (b_r * a_r + b_i * a_i);
                    // Re(g₂ E F̄₀) + Re(F₂ Ē)
                    let qr = g1.re * nr - g1.im * ni;
                    let qi = g1.re * ni + g1.im * nr;
                    s_i4d[j] = 2.0 * w * ((qr * a_r + qi * a_i) + (b_r * nr + b_i * ni));
                }
                for (o, s) in out.iter_mut().zip(scratch.iter()) {
                    o[k + 1] = lane_sum(s);
                }
            }
            check_finite(b, &[&f0r, &f0i, &f2r, &f2i], quad)?;
            Ok(out)
        })
        .collect();

    let mut acc = [vec![0.0; nt], vec![0.0; nt], vec![0.0; nt], vec![0.0; nt]];
    for p in partials {
        let part = p?;
        for (a, v) in acc.iter_mut().zip(part.iter()) {
            a.iter_mut().zip(v).for_each(|(x, y)| *x += y);
        }
    }
    let [i2, i2_dot, i4, i4_dot] = acc;
    Ok(PairSums {
        i2,
        i2_dot,
        i4,
        i4_dot,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filon_weights_series_and_closed_form_agree_at_switch() {
        let h = 0.01;
        for theta in [0.0099999, 0.0100001, -0.0100001] {
            let (a, b) = filon_weights(theta, h);
            // direct Simpson on the defining integrals
            let n = 2000;
            let mut sa = Complex64::new(0.0, 0.0);
            let mut sb = Complex64::new(0.0, 0.0);
            for j in 0..=n {
                let u = j as f64 / n as f64;
                let w = if j == 0 || j == n {
                    1.0
                } else if j % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                let e = Complex64::from_polar(1.0, theta * u);
                sa += w * (1.0 - u) * e;
                sb += w * u * e;
            }
            let scale = h / (3.0 * n as f64);
            assert!((a - sa * scale).norm() < 1e-15);
            assert!((b - sb * scale).norm() < 1e-15);
        }
    }

    #[test]
    fn filon_rule_integrates_linear_times_oscillation_exactly() {
        // ∫₀^h (p + q τ) e^{iντ} dτ for linear g is reproduced to rounding.
        let (nu, h) = (37.0, 0.1);
        let (a, b) = filon_weights(nu * h, h);
        let (p, q) = (Complex64::new(0.3, -1.0), Complex64::new(2.0, 0.5));
        let approx = p * a + (p + q * h) * b;
        let i = Complex64::i();
        let e = Complex64::from_polar(1.0, nu * h);
        let exact = p * (e - 1.0) / (i * nu) + q * (h * e / (i * nu) + (e - 1.0) / (nu * nu));
        assert!((approx - exact).norm() < 1e-15);
    }
}
