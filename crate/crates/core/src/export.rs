//! CSV emission. Every file has a header row; numbers use 17 significant
//! digits; missing values are empty fields.

use std::io::Write;

use crate::coefficients::{MasterEqCoefficients, SteadyState};
use crate::dynamics::MomentTrajectory;
use crate::error::Result;
use crate::metrics::{DistanceTrajectory, SweepResult};

/// 17 significant digits in scientific notation.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn writer<W: Write>(w: W, header: &[&str]) -> Result<csv::Writer<W>> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    Ok(out)
}

/// `t, omega_r, gamma, gamma_plus, gamma_minus, order`
pub fn write_coefficients<W: Write>(w: W, c: &MasterEqCoefficients) -> Result<()> {
    let mut out = writer(
        w,
        &[
            "t",
            "omega_r",
            "gamma",
            "gamma_plus",
            "gamma_minus",
            "order",
        ],
    )?;
    for (k, t) in c.grid.times().enumerate() {
        out.write_record([
            num(t),
            num(c.omega_r.values()[k]),
            num(c.gamma.values()[k]),
            num(c.gamma_plus.values()[k]),
            num(c.gamma_minus.values()[k]),
            c.order.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `t, re_a, im_a, re_aa, im_aa, n, order`, one block per `(order, trajectory)`.
pub fn write_moments<W: Write>(w: W, runs: &[(&str, &MomentTrajectory)]) -> Result<()> {
    let mut out = writer(w, &["t", "re_a", "im_a", "re_aa", "im_aa", "n", "order"])?;
    for (order, tr) in runs {
        for (t, m) in tr.grid.times().zip(&tr.moments) {
            out.write_record([
                num(t),
                num(m.a_mean.re),
                num(m.a_mean.im),
                num(m.aa_mean.re),
                num(m.aa_mean.im),
                num(m.n_mean),
                order.to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// `t, x, p, order, state_label` phase-space trace of the displacement.
pub fn write_phase<W: Write>(w: W, runs: &[(&str, &str, &MomentTrajectory)]) -> Result<()> {
    let mut out = writer(w, &["t", "x", "p", "order", "state_label"])?;
    for (order, label, tr) in runs {
        for (t, g) in tr.grid.times().zip(tr.gaussian_states()) {
            out.write_record([
                num(t),
                num(g.d[0]),
                num(g.d[1]),
                order.to_string(),
                label.to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// `t, d_bures, sigma, order`
pub fn write_bures<W: Write>(w: W, runs: &[(&str, &DistanceTrajectory)]) -> Result<()> {
    let mut out = writer(w, &["t", "d_bures", "sigma", "order"])?;
    for (order, d) in runs {
        for (k, t) in d.grid.times().enumerate() {
            out.write_record([
                num(t),
                num(d.values.values()[k]),
                num(d.sigma[k]),
                order.to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// `t, n_cumulative, order`
pub fn write_nonmarkov<W: Write>(w: W, runs: &[(&str, &DistanceTrajectory)]) -> Result<()> {
    let mut out = writer(w, &["t", "n_cumulative", "order"])?;
    for (order, d) in runs {
        for (t, n) in d.grid.times().zip(d.cumulative_non_markovianity()) {
            out.write_record([num(t), num(n), order.to_string()])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// `delta, coupling, n_measure, order, flagged`; failed or flagged cells
/// leave `n_measure` empty.
pub fn write_heatmap<W: Write>(w: W, sweeps: &[&SweepResult]) -> Result<()> {
    let mut out = writer(w, &["delta", "coupling", "n_measure", "order", "flagged"])?;
    for s in sweeps {
        for c in &s.cells {
            let value = if c.flagged { None } else { c.n_measure };
            out.write_record([
                num(c.delta),
                num(c.coupling),
                opt(value),
                s.model.clone(),
                u8::from(c.flagged).to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// `delta, r_of_delta`
pub fn write_boundary<W: Write>(w: W, curve: &[(f64, f64)]) -> Result<()> {
    let mut out = writer(w, &["delta", "r_of_delta"])?;
    for &(d, r) in curve {
        out.write_record([num(d), num(r)])?;
    }
    out.flush()?;
    Ok(())
}

/// One stationary row of a parameter sweep.
#[derive(Debug, Clone, Copy)]
pub struct SteadyRow {
    pub delta: f64,
    pub gamma0: f64,
    pub state: SteadyState,
}

/// `delta, gamma0, order, omega_r_st, gamma_st, gamma_plus_st,
/// gamma_plus_local, gamma_plus_finite_part` (last two only at fourth order).
pub fn write_steady<W: Write>(w: W, rows: &[SteadyRow]) -> Result<()> {
    let mut out = writer(
        w,
        &[
            "delta",
            "gamma0",
            "order",
            "omega_r_st",
            "gamma_st",
            "gamma_plus_st",
            "gamma_plus_local",
            "gamma_plus_finite_part",
        ],
    )?;
    for r in rows {
        let s = &r.state;
        out.write_record([
            num(r.delta),
            num(r.gamma0),
            s.order.to_string(),
            num(s.omega_r_st),
            num(s.gamma_st),
            num(s.gamma_plus_st),
            opt(s.absorption.map(|b| b.local())),
            opt(s.absorption.map(|b| b.finite_part)),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `gamma0, delta_boundary` markers `±√(λ(2γ₀−λ))`.
pub fn write_steady_boundary<W: Write>(w: W, markers: &[(f64, f64)]) -> Result<()> {
    let mut out = writer(w, &["gamma0", "delta_boundary"])?;
    for &(g, d) in markers {
        out.write_record([num(g), num(d)])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{RealTrajectory, TimeGrid};

    #[test]
    fn numbers_carry_seventeen_significant_digits() {
        let s = num(0.1);
        assert_eq!(s, "1.0000000000000001e-1");
        assert_eq!(s.parse::<f64>().unwrap(), 0.1);
        assert_eq!(num(-2.5), "-2.5000000000000000e0");
    }

    #[test]
    fn boundary_csv_layout() {
        let mut buf = Vec::new();
        write_boundary(&mut buf, &[(0.0, 0.5)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "delta,r_of_delta\n0.0000000000000000e0,5.0000000000000000e-1\n"
        );
    }

    #[test]
    fn bures_csv_has_one_row_per_node() {
        let grid = TimeGrid::from_zero(1.0, 4).unwrap();
        let values = RealTrajectory::from_fn(grid, |t| t).unwrap();
        let d = DistanceTrajectory {
            grid,
            sigma: crate::numerics::forward_rate(&values),
            values,
            clamped_nodes: 0,
            unphysical_nodes: 0,
        };
        let mut buf = Vec::new();
        write_bures(&mut buf, &[("exact", &d)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "t,d_bures,sigma,order");
        assert_eq!(lines.len(), 6);
        assert!(lines[5].ends_with(",exact"));
    }
}
