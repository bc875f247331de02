//! Bath description: Lorentzian and infrared-modified spectral densities,
//! Bose occupation, the memory kernel, and the convergence-radius
//! classification of the coupling strength.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Bath and system parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParams {
    /// Born-Markov emission rate γ₀.
    pub gamma0: f64,
    /// Lorentzian width λ.
    pub lambda: f64,
    /// Detuning Δ; the spectral peak sits at ω₀ − Δ.
    pub delta: f64,
    /// System frequency ω₀.
    pub omega0: f64,
    /// Low-frequency exponent Ω.
    pub big_omega: f64,
    /// Frequency below which the density is suppressed as (ω/ω_m)^Ω.
    pub omega_m: f64,
    pub temperature: f64,
}

impl Default for SpectralParams {
    fn default() -> Self {
        Self {
            gamma0: 0.2,
            lambda: 1.0,
            delta: 0.4,
            omega0: 10.0,
            big_omega: 2.0,
            omega_m: 1.0,
            temperature: 10.0,
        }
    }
}

impl SpectralParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("gamma0", self.gamma0),
            ("lambda", self.lambda),
            ("delta", self.delta),
            ("omega0", self.omega0),
            ("big_omega", self.big_omega),
            ("omega_m", self.omega_m),
            ("temperature", self.temperature),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        if self.gamma0 <= 0.0 {
            return Err(invalid("gamma0", "must be positive"));
        }
        if self.lambda <= 0.0 {
            return Err(invalid("lambda", "must be positive"));
        }
        if self.omega0 <= 0.0 {
            return Err(invalid("omega0", "must be positive"));
        }
        if self.big_omega < 1.0 {
            return Err(invalid("big_omega", "must be at least 1"));
        }
        if !(self.omega_m > 0.0 && self.omega_m < self.omega0) {
            return Err(invalid("omega_m", "must lie in (0, omega0)"));
        }
        if self.temperature <= 0.0 {
            return Err(invalid("temperature", "must be positive"));
        }
        Ok(())
    }

    pub fn beta(&self) -> f64 {
        1.0 / self.temperature
    }

    /// Centre of the Lorentzian, ω₀ − Δ.
    pub fn peak(&self) -> f64 {
        self.omega0 - self.delta
    }

    /// Full-line Lorentzian `(γ₀/2π) λ² / (λ² + (ω − ω₀ + Δ)²)`.
    pub fn lorentzian_density(&self, omega: f64) -> f64 {
        let x = omega - self.peak();
        self.gamma0 / (2.0 * PI) * self.lambda * self.lambda / (self.lambda * self.lambda + x * x)
    }

    /// Lorentzian suppressed as `(ω/ω_m)^Ω` below `ω_m`.
    pub fn modified_density(&self, omega: f64) -> Result<f64> {
        if omega.is_nan() || omega < 0.0 {
            return Err(invalid(
                "omega",
                format!("density needs omega >= 0, got {omega}"),
            ));
        }
        Ok(self.modified_density_unchecked(omega))
    }

    pub(crate) fn modified_density_unchecked(&self, omega: f64) -> f64 {
        let jl = self.lorentzian_density(omega);
        if omega <= self.omega_m {
            (omega / self.omega_m).powf(self.big_omega) * jl
        } else {
            jl
        }
    }

    /// Bose-Einstein occupation `1/(e^{βω} − 1)`.
    pub fn bose_occupation(&self, omega: f64) -> Result<f64> {
        if omega.is_nan() || omega <= 0.0 {
            return Err(invalid(
                "omega",
                format!("occupation needs omega > 0, got {omega}"),
            ));
        }
        Ok(1.0 / (omega * self.beta()).exp_m1())
    }

    /// `J(ω) n(ω)`, with the removable point ω = 0 mapped to its limit
    /// (zero for Ω > 1).
    pub fn thermal_weight(&self, omega: f64) -> f64 {
        if omega <= 0.0 {
            return if self.big_omega == 1.0 {
                self.lorentzian_density(0.0) * self.temperature / self.omega_m
            } else {
                0.0
            };
        }
        let n = 1.0 / (omega * self.beta()).exp_m1();
        self.modified_density_unchecked(omega) * n
    }

    /// Derivative of [`Self::thermal_weight`] with respect to ω (ω > 0).
    pub fn thermal_weight_derivative(&self, omega: f64) -> f64 {
        let x = omega - self.peak();
        let l2 = self.lambda * self.lambda;
        let jl = self.lorentzian_density(omega);
        let djl = -2.0 * x / (l2 + x * x) * jl;
        let (j, dj) = if omega <= self.omega_m {
            let s = (omega / self.omega_m).powf(self.big_omega);
            (s * jl, s * (self.big_omega / omega * jl + djl))
        } else {
            (jl, djl)
        };
        let n = 1.0 / (omega * self.beta()).exp_m1();
        let dn = -self.beta() * n * (n + 1.0);
        dj * n + j * dn
    }

    /// Memory kernel `(γ₀λ/2) e^{−(λ + i(ω₀−Δ))t}`.
    pub fn memory_kernel(&self, t: f64) -> Complex64 {
        let rate = Complex64::new(self.lambda, self.peak());
        0.5 * self.gamma0 * self.lambda * (-rate * t).exp()
    }

    /// Expansion parameter and convergence radius.
    pub fn coupling_regime(&self) -> CouplingRegime {
        CouplingRegime::new(
            self.gamma0 / self.lambda,
            radius_of_convergence(self.lambda, self.delta),
        )
    }

    /// Copy with Δ and γ₀ = `coupling`·λ replaced.
    pub fn with_cell(&self, delta: f64, coupling: f64) -> Self {
        Self {
            delta,
            gamma0: coupling * self.lambda,
            ..*self
        }
    }
}

/// `R(Δ) = ½(1 + Δ²/λ²)`.
pub fn radius_of_convergence(lambda: f64, delta: f64) -> f64 {
    0.5 * (1.0 + delta * delta / (lambda * lambda))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Weak,
    Strong,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Weak => "Weak",
            Regime::Strong => "Strong",
        })
    }
}

/// α² = γ₀/λ against the radius R; the boundary itself counts as Strong.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingRegime {
    pub alpha_sq: f64,
    pub radius: f64,
    pub classification: Regime,
}

impl CouplingRegime {
    pub fn new(alpha_sq: f64, radius: f64) -> Self {
        let classification = if alpha_sq < radius {
            Regime::Weak
        } else {
            Regime::Strong
        };
        Self {
            alpha_sq,
            radius,
            classification,
        }
    }

    pub fn is_weak(&self) -> bool {
        self.classification == Regime::Weak
    }
}
