use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::TimeGrid;
use crate::error::{Error, Result};

/// Scalar types that can be sampled on a grid and linearly interpolated.
pub trait Sample:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn is_finite_sample(&self) -> bool;
}

impl Sample for f64 {
    fn is_finite_sample(&self) -> bool {
        self.is_finite()
    }
}

impl Sample for Complex64 {
    fn is_finite_sample(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Function of time sampled on every node of a [`TimeGrid`].
///
/// Invariant: one finite value per node.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    grid: TimeGrid,
    values: Vec<T>,
}

pub type ComplexTrajectory = Trajectory<Complex64>;
pub type RealTrajectory = Trajectory<f64>;

impl<T: Sample> Trajectory<T> {
    pub fn new(grid: TimeGrid, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite_sample()) {
            return Err(Error::NonFiniteAtTime {
                time: grid.time(k),
                what: "trajectory sample".into(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: TimeGrid, f: impl FnMut(f64) -> T) -> Result<Self> {
        let values = grid.times().map(f).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn last(&self) -> T {
        self.values[self.values.len() - 1]
    }

    /// Linear interpolation, clamped to the grid span.
    pub fn interpolate(&self, t: f64) -> T {
        let h = self.grid.step();
        let x = ((t - self.grid.t_start()) / h).clamp(0.0, self.grid.n_steps() as f64);
        let k = (x.floor() as usize).min(self.grid.n_steps() - 1);
        let frac = x - k as f64;
        let (a, b) = (self.values[k], self.values[k + 1]);
        a + (b - a) * frac
    }

    pub fn map<U: Sample>(&self, f: impl FnMut(&T) -> U) -> Result<Trajectory<U>> {
        Trajectory::new(self.grid, self.values.iter().map(f).collect())
    }

    /// Cumulative trapezoidal antiderivative starting from zero.
    pub fn cumulative_integral(&self) -> Result<Self> {
        let h = self.grid.step();
        let mut out = Vec::with_capacity(self.values.len());
        let mut acc = self.values[0] * 0.0;
        out.push(acc);
        for w in self.values.windows(2) {
            acc = acc + (w[0] + w[1]) * (0.5 * h);
            out.push(acc);
        }
        Self::new(self.grid, out)
    }
}

impl ComplexTrajectory {
    pub fn re(&self) -> RealTrajectory {
        Trajectory {
            grid: self.grid,
            values: self.values.iter().map(|z| z.re).collect(),
        }
    }

    pub fn im(&self) -> RealTrajectory {
        Trajectory {
            grid: self.grid,
            values: self.values.iter().map(|z| z.im).collect(),
        }
    }

    pub fn norm(&self) -> RealTrajectory {
        Trajectory {
            grid: self.grid,
            values: self.values.iter().map(|z| z.norm()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_wrong_length_and_nan() {
        let g = TimeGrid::new(0.0, 1.0, 2).unwrap();
        assert!(matches!(
            RealTrajectory::new(g, vec![0.0; 2]),
            Err(Error::LengthMismatch {
                expected: 3,
                got: 2
            })
        ));
        let err = RealTrajectory::new(g, vec![0.0, f64::NAN, 0.0]).unwrap_err();
        assert!(matches!(err, Error::NonFiniteAtTime { time, .. } if time == 0.5));
    }

    #[test]
    fn interpolation_is_exact_for_linear_data() {
        let g = TimeGrid::new(0.0, 2.0, 8).unwrap();
        let tr = RealTrajectory::from_fn(g, |t| 3.0 * t - 1.0).unwrap();
        for t in [0.0, 0.1, 0.7, 1.3333, 2.0] {
            assert!((tr.interpolate(t) - (3.0 * t - 1.0)).abs() < 1e-12);
        }
        assert_eq!(tr.interpolate(5.0), 5.0);
    }

    #[test]
    fn cumulative_integral_of_linear_function() {
        let g = TimeGrid::new(0.0, 1.0, 10).unwrap();
        let tr = RealTrajectory::from_fn(g, |t| 2.0 * t).unwrap();
        let int = tr.cumulative_integral().unwrap();
        for (t, v) in g.times().zip(int.values()) {
            assert!((v - t * t).abs() < 1e-12);
        }
    }
}
