//! Shared numerical infrastructure.
//!
//! Everything here is independent of the physical model: uniform time grids,
//! sampled trajectories, composite Gauss-Legendre frequency quadrature, a
//! Volterra integro-differential solver, classical RK4, and the
//! positive-variation functional used by the non-Markovianity measure.

mod grid;
mod ode;
mod quadrature;
mod special;
mod trajectory;
mod variation;
mod volterra;

pub use grid::TimeGrid;
pub use ode::integrate_ode;
pub use quadrature::{
    build_frequency_quadrature, clustered_edges, composite_gauss_legendre, gauss_legendre,
    normalize_edges, FrequencyQuadrature, QuadratureOptions, PANEL_ORDER,
};
pub use special::{expm1_complex, phi_expm1};
pub use trajectory::{ComplexTrajectory, RealTrajectory, Sample, Trajectory};
pub use variation::{forward_rate, positive_part_integral, tail_mean, total_variation};
pub use volterra::solve_volterra;
