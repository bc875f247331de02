use super::RealTrajectory;

/// Sum of the positive increments of `traj`, i.e. `Σ h·max(σ_k, 0)` with
/// forward-difference rates σ_k.
pub fn positive_part_integral(traj: &RealTrajectory) -> f64 {
    traj.values()
        .windows(2)
        .map(|w| (w[1] - w[0]).max(0.0))
        .sum()
}

/// Discrete total variation `Σ |x_{k+1} − x_k|`.
pub fn total_variation(traj: &RealTrajectory) -> f64 {
    traj.values().windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Forward-difference rate per node; the last node repeats the final interval.
pub fn forward_rate(traj: &RealTrajectory) -> Vec<f64> {
    let h = traj.grid().step();
    let v = traj.values();
    let mut out: Vec<f64> = v.windows(2).map(|w| (w[1] - w[0]) / h).collect();
    out.push(*out.last().unwrap_or(&0.0));
    out
}

/// Mean over the final `fraction` of the samples (at least one).
pub fn tail_mean(values: &[f64], fraction: f64) -> f64 {
    let n = ((values.len() as f64 * fraction).ceil() as usize).clamp(1, values.len());
    values[values.len() - n..].iter().sum::<f64>() / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::TimeGrid;

    #[test]
    fn monotone_decrease_has_no_positive_part() {
        let g = TimeGrid::from_zero(5.0, 50).unwrap();
        let tr = RealTrajectory::from_fn(g, |t| (-t).exp()).unwrap();
        assert_eq!(positive_part_integral(&tr), 0.0);
    }

    #[test]
    fn tent_rises_once() {
        let g = TimeGrid::from_zero(2.0, 2).unwrap();
        let tr = RealTrajectory::new(g, vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(positive_part_integral(&tr), 1.0);
        assert_eq!(forward_rate(&tr), vec![1.0, -1.0, -1.0]);
    }

    #[test]
    fn sine_over_full_period() {
        let g = TimeGrid::from_zero(2.0 * std::f64::consts::PI, 10_000).unwrap();
        let tr = RealTrajectory::from_fn(g, f64::sin).unwrap();
        assert!((positive_part_integral(&tr) - 2.0).abs() < 1e-3);
    }

    #[test]
    fn tail_mean_uses_final_fraction() {
        let v: Vec<f64> = (0..10).map(f64::from).collect();
        assert_eq!(tail_mean(&v, 0.2), 8.5);
        assert_eq!(tail_mean(&v, 0.0), 9.0);
    }
}
