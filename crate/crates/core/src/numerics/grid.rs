use crate::error::{Error, Result};

/// Uniform time grid with `n_steps + 1` samples `t_k = t_start + k h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_start: f64,
    t_end: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_steps: usize) -> Result<Self> {
        if !(t_start.is_finite() && t_end.is_finite()) {
            return Err(Error::InvalidGrid("endpoints must be finite".into()));
        }
        if t_end <= t_start {
            return Err(Error::InvalidGrid(format!(
                "t_end ({t_end}) must exceed t_start ({t_start})"
            )));
        }
        if n_steps < 2 {
            return Err(Error::InvalidGrid(format!(
                "n_steps must be at least 2, got {n_steps}"
            )));
        }
        Ok(Self {
            t_start,
            t_end,
            n_steps,
        })
    }

    /// Grid on `[0, t_end]`.
    pub fn from_zero(t_end: f64, n_steps: usize) -> Result<Self> {
        Self::new(0.0, t_end, n_steps)
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn step(&self) -> f64 {
        (self.t_end - self.t_start) / self.n_steps as f64
    }

    /// Number of samples, `n_steps + 1`.
    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, k: usize) -> f64 {
        if k == self.n_steps {
            self.t_end
        } else {
            self.t_start + k as f64 * self.step()
        }
    }

    pub fn times(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.len()).map(move |k| self.time(k))
    }

    /// Same span with twice as many steps.
    pub fn refined(&self) -> Self {
        Self {
            n_steps: 2 * self.n_steps,
            ..*self
        }
    }
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self {
            t_start: 0.0,
            t_end: 20.0,
            n_steps: 8000,
        }
    }
}
