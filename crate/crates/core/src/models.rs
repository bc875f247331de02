//! The three orders as interchangeable strategies selected by name.
//!
//! Every consumer that runs "a model" (coefficient export, steady-state
//! sweeps, moment propagation, heatmaps) goes through [`OrderModel`], and the
//! CLI resolves `--orders` against a [`ModelRegistry`].

use std::collections::BTreeMap;

use crate::bath::SpectralParams;
use crate::coefficients::{self, MasterEqCoefficients, Order, SteadyState};
use crate::dynamics::{propagate_exact_many, propagate_tcl, MomentTrajectory, Moments};
use crate::error::{Error, Result};
use crate::numerics::{FrequencyQuadrature, TimeGrid};

/// Moment trajectories for a batch of initial states.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub trajectories: Vec<MomentTrajectory>,
    /// Coefficient nodes bridged because `G` vanished there.
    pub singular_nodes: usize,
}

pub trait OrderModel: Send + Sync {
    fn name(&self) -> &'static str;

    fn order(&self) -> Order;

    fn coefficients(
        &self,
        params: &SpectralParams,
        grid: &TimeGrid,
        quad: &FrequencyQuadrature,
    ) -> Result<MasterEqCoefficients> {
        coefficients::coefficients(params, grid, self.order(), quad)
    }

    fn steady_state(&self, params: &SpectralParams) -> Result<SteadyState> {
        coefficients::steady_state(params, self.order())
    }

    fn evolve(
        &self,
        params: &SpectralParams,
        initial: &[Moments],
        grid: &TimeGrid,
        quad: &FrequencyQuadrature,
    ) -> Result<Evolution>;
}

/// Closed-form propagation with the exact `G` and `ℐ`.
#[derive(Debug, Default)]
pub struct ExactModel;

impl OrderModel for ExactModel {
    fn name(&self) -> &'static str {
        "exact"
    }

    fn order(&self) -> Order {
        Order::Exact
    }

    fn evolve(
        &self,
        params: &SpectralParams,
        initial: &[Moments],
        grid: &TimeGrid,
        quad: &FrequencyQuadrature,
    ) -> Result<Evolution> {
        Ok(Evolution {
            trajectories: propagate_exact_many(params, initial, grid, quad)?,
            singular_nodes: 0,
        })
    }
}

/// RK4 propagation with perturbative coefficients of a fixed order.
#[derive(Debug)]
pub struct TclModel {
    order: Order,
}

impl TclModel {
    pub fn second() -> Self {
        Self { order: Order::Tcl2 }
    }

    pub fn fourth() -> Self {
        Self { order: Order::Tcl4 }
    }
}

impl OrderModel for TclModel {
    fn name(&self) -> &'static str {
        self.order.name()
    }

    fn order(&self) -> Order {
        self.order
    }

    fn evolve(
        &self,
        params: &SpectralParams,
        initial: &[Moments],
        grid: &TimeGrid,
        quad: &FrequencyQuadrature,
    ) -> Result<Evolution> {
        let coeffs = self.coefficients(params, grid, quad)?;
        let trajectories = initial
            .iter()
            .map(|m0| propagate_tcl(&coeffs, m0, grid))
            .collect::<Result<_>>()?;
        Ok(Evolution {
            trajectories,
            singular_nodes: coeffs.singular_nodes.len(),
        })
    }
}

/// Name → model table.
#[derive(Default)]
pub struct ModelRegistry {
    models: BTreeMap<String, Box<dyn OrderModel>>,
}

impl ModelRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry holding `exact`, `tcl2` and `tcl4`.
    pub fn standard() -> Self {
        let mut r = Self::new();
        r.register(Box::new(ExactModel));
        r.register(Box::new(TclModel::second()));
        r.register(Box::new(TclModel::fourth()));
        r
    }

    /// Adds `model`, replacing any model of the same name.
    pub fn register(&mut self, model: Box<dyn OrderModel>) {
        self.models.insert(model.name().to_string(), model);
    }

    pub fn names(&self) -> Vec<&str> {
        self.models.keys().map(String::as_str).collect()
    }

    pub fn get(&self, name: &str) -> Result<&dyn OrderModel> {
        let key = name.trim().to_ascii_lowercase();
        self.models
            .get(&key)
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::UnknownModel {
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn for_order(&self, order: Order) -> Result<&dyn OrderModel> {
        self.get(order.name())
    }

    /// Resolves a comma-separated list such as `"exact,tcl4"`.
    pub fn resolve_list(&self, list: &str) -> Result<Vec<&dyn OrderModel>> {
        let names: Vec<&str> = list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .collect();
        if names.is_empty() {
            return Err(Error::UnknownModel {
                name: list.to_string(),
                available: self.names().join(", "),
            });
        }
        names.into_iter().map(|n| self.get(n)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_registry_resolves_names() {
        let r = ModelRegistry::standard();
        assert_eq!(r.names(), vec!["exact", "tcl2", "tcl4"]);
        assert_eq!(r.get("TCL4").unwrap().order(), Order::Tcl4);
        let list = r.resolve_list("exact, tcl2").unwrap();
        assert_eq!(
            list.iter().map(|m| m.name()).collect::<Vec<_>>(),
            vec!["exact", "tcl2"]
        );
        assert!(r.resolve_list("").is_err());
        let err = r.get("tcl6").err().unwrap().to_string();
        assert!(err.contains("exact, tcl2, tcl4"), "{err}");
    }

    #[test]
    fn custom_models_can_be_registered() {
        struct Frozen;
        impl OrderModel for Frozen {
            fn name(&self) -> &'static str {
                "frozen"
            }
            fn order(&self) -> Order {
                Order::Tcl2
            }
            fn evolve(
                &self,
                _: &SpectralParams,
                initial: &[Moments],
                grid: &TimeGrid,
                _: &FrequencyQuadrature,
            ) -> Result<Evolution> {
                Ok(Evolution {
                    trajectories: initial
                        .iter()
                        .map(|m| MomentTrajectory {
                            grid: *grid,
                            moments: vec![*m; grid.len()],
                        })
                        .collect(),
                    singular_nodes: 0,
                })
            }
        }
        let mut r = ModelRegistry::standard();
        r.register(Box::new(Frozen));
        assert!(r.get("frozen").is_ok());
        assert_eq!(r.names().len(), 4);
    }
}
