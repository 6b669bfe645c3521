//! Direct integration of the reduced one-degree-of-freedom system and of the
//! two-degree-of-freedom chart system on `T*S²` with its magnetic term.

mod chart;
mod integrator;
mod probe;
mod reduced;

pub use chart::{embed_zero_level, momentum_map, ChartState, ChartSystem};
pub use integrator::{integrate, integrate_until, IntegratorConfig, Trajectory};
pub use probe::{stability_probe, ProbeVerdict, PROBE_RAYS};
pub use reduced::{ReducedState, ReducedSystem};

use crate::{Result, Scalar};

/// An autonomous Hamiltonian vector field on an `N`-dimensional chart.
pub trait HamiltonianFlow<T: Scalar, const N: usize> {
    fn field(&self, y: &[T; N]) -> Result<[T; N]>;

    fn energy(&self, y: &[T; N]) -> Result<T>;

    /// Conserved momentum recorded alongside the energy, if the system has one.
    fn momentum(&self, _y: &[T; N]) -> Option<Result<T>> {
        None
    }

    /// Whether `y` is still inside the region the integrator may visit.
    fn inside(&self, y: &[T; N]) -> bool;
}
