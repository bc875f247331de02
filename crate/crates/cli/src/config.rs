//! Flat `key = value` run configuration. Files and command-line flags go
//! through the same [`Config::set`], so both are validated identically.

use std::fmt;
use std::path::{Path, PathBuf};

use tclfano::bath::SpectralParams;
use tclfano::metrics::{linspace, StatePair};
use tclfano::numerics::{QuadratureOptions, TimeGrid};
use tclfano::Complex64;

/// Environment variable consulted when no output directory is configured.
pub const OUT_ENV: &str = "TCLFANO_OUT";
const DEFAULT_OUT: &str = "tclfano-out";

/// Every key accepted in a config file.
pub const KEYS: &[&str] = &[
    "gamma0",
    "lambda",
    "delta",
    "omega0",
    "temperature",
    "omega_m",
    "big_omega",
    "t_end",
    "steps",
    "orders",
    "workers",
    "out",
    "n_nodes",
    "cutoff_widths",
    "alpha1_re",
    "alpha1_im",
    "alpha2_re",
    "alpha2_im",
    "delta_min",
    "delta_max",
    "delta_points",
    "coupling_min",
    "coupling_max",
    "coupling_points",
    "sweep",
    "sweep_min",
    "sweep_max",
    "sweep_points",
    "sweep_fixed",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    /// 1-based line in the config file; `None` for command-line values.
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Evenly spaced axis, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.points)
    }
}

/// Variable swept by `steady`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Delta,
    Gamma0,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub params: SpectralParams,
    pub t_end: f64,
    pub steps: usize,
    pub orders: String,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub quadrature: QuadratureOptions,
    pub pair: StatePair,
    /// Heatmap axes: detuning and coupling γ₀/λ.
    pub delta_axis: Axis,
    pub coupling_axis: Axis,
    pub sweep: SweepKind,
    /// `None` picks a range suited to `sweep`.
    pub sweep_axis: Option<Axis>,
    /// Values of the non-swept variable; empty means the configured one.
    pub sweep_fixed: Vec<f64>,
}

impl Default for Config {
    fn default() -> Self {
        let grid = TimeGrid::default();
        Self {
            params: SpectralParams::default(),
            t_end: grid.t_end(),
            steps: grid.n_steps(),
            orders: "exact,tcl2,tcl4".into(),
            workers: None,
            out: None,
            quadrature: QuadratureOptions::default(),
            pair: StatePair::default(),
            delta_axis: Axis {
                min: -5.0,
                max: 5.0,
                points: 41,
            },
            coupling_axis: Axis {
                min: 0.1,
                max: 3.0,
                points: 30,
            },
            sweep: SweepKind::Delta,
            sweep_axis: None,
            sweep_fixed: Vec::new(),
        }
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, String> {
    let x: f64 = value
        .parse()
        .map_err(|_| format!("{key}: expected a number, got {value:?}"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("{key}: value must be finite"))
    }
}

fn parse_usize(key: &str, value: &str) -> Result<usize, String> {
    value
        .parse()
        .map_err(|_| format!("{key}: expected a non-negative integer, got {value:?}"))
}

impl Config {
    /// Parses a config file on top of the defaults.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            line: None,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let at = |message: String| ConfigError {
                line: Some(i + 1),
                message,
            };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| at(format!("expected `key = value`, got {line:?}")))?;
            self.set(key.trim(), value.trim()).map_err(at)?;
        }
        Ok(())
    }

    /// Sets one key. Unknown keys and malformed values are errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let f = || parse_f64(key, value);
        let u = || parse_usize(key, value);
        let p = &mut self.params;
        match key {
            "gamma0" => p.gamma0 = f()?,
            "lambda" => p.lambda = f()?,
            "delta" => p.delta = f()?,
            "omega0" => p.omega0 = f()?,
            "temperature" => p.temperature = f()?,
            "omega_m" => p.omega_m = f()?,
            "big_omega" => p.big_omega = f()?,
            "t_end" => self.t_end = f()?,
            "steps" => self.steps = u()?,
            "orders" => self.orders = value.to_string(),
            "workers" => match u()? {
                0 => return Err("workers: must be at least 1".into()),
                n => self.workers = Some(n),
            },
            "out" => self.out = Some(PathBuf::from(value)),
            "n_nodes" => self.quadrature.n_nodes = u()?,
            "cutoff_widths" => self.quadrature.cutoff_widths = f()?,
            "alpha1_re" => self.pair.alpha1.re = f()?,
            "alpha1_im" => self.pair.alpha1.im = f()?,
            "alpha2_re" => self.pair.alpha2.re = f()?,
            "alpha2_im" => self.pair.alpha2.im = f()?,
            "delta_min" => self.delta_axis.min = f()?,
            "delta_max" => self.delta_axis.max = f()?,
            "delta_points" => self.delta_axis.points = u()?,
            "coupling_min" => self.coupling_axis.min = f()?,
            "coupling_max" => self.coupling_axis.max = f()?,
            "coupling_points" => self.coupling_axis.points = u()?,
            "sweep" => {
                self.sweep = match value.to_ascii_lowercase().as_str() {
                    "delta" => SweepKind::Delta,
                    "gamma0" => SweepKind::Gamma0,
                    _ => {
                        return Err(format!(
                            "sweep: expected `delta` or `gamma0`, got {value:?}"
                        ))
                    }
                }
            }
            "sweep_min" => self.sweep_axis_mut().min = f()?,
            "sweep_max" => self.sweep_axis_mut().max = f()?,
            "sweep_points" => self.sweep_axis_mut().points = u()?,
            "sweep_fixed" => {
                self.sweep_fixed = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| parse_f64(key, s))
                    .collect::<Result<_, _>>()?
            }
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    fn default_sweep_axis(kind: SweepKind) -> Axis {
        match kind {
            SweepKind::Delta => Axis {
                min: -3.0,
                max: 3.0,
                points: 121,
            },
            SweepKind::Gamma0 => Axis {
                min: 0.05,
                max: 3.0,
                points: 60,
            },
        }
    }

    fn sweep_axis_mut(&mut self) -> &mut Axis {
        let kind = self.sweep;
        self.sweep_axis
            .get_or_insert_with(|| Self::default_sweep_axis(kind))
    }

    pub fn sweep_axis(&self) -> Axis {
        self.sweep_axis
            .unwrap_or_else(|| Self::default_sweep_axis(self.sweep))
    }

    pub fn grid(&self) -> tclfano::Result<TimeGrid> {
        TimeGrid::from_zero(self.t_end, self.steps)
    }

    /// `out` key, then `TCLFANO_OUT`, then `./tclfano-out`.
    pub fn output_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }

    pub fn alphas(&self) -> [Complex64; 2] {
        [self.pair.alpha1, self.pair.alpha2]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_documented_key_is_accepted() {
        for key in KEYS {
            let value = match *key {
                "orders" => "exact",
                "out" => "dir",
                "sweep" => "gamma0",
                "sweep_fixed" => "0.1, 0.2",
                _ => "3",
            };
            Config::default()
                .set(key, value)
                .unwrap_or_else(|e| panic!("{key}: {e}"));
        }
    }
}
