//! Stability and spin-driven bifurcation analysis for symmetric tops.
//!
//! Starting from a rotationally invariant potential `V(s)` with `s = u²`, the
//! crate builds the effective potential `U_λ(u)` of the zero-momentum reduced
//! system, classifies the fast/slow transition at the pole, traces the
//! bifurcating branch of relative equilibria, and checks every verdict by
//! integrating the reduced and chart Hamiltonian systems directly.
//!
//! The numerical core is generic over the scalar type ([`Scalar`]); the
//! aliases at the crate root fix it to `f64`, which is what the CLI uses.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bifurcation;
pub mod cli;
pub mod critical;
pub mod dynamics;
pub mod effective;
mod error;
pub mod expr;
pub mod jet;
pub mod potential;
pub mod roots;
pub mod selftest;

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

pub use error::{Error, Result};

/// Floating-point scalar the analysis runs on: `f32` or `f64`.
pub trait Scalar: Float + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Stability label shared by critical points, branch samples and the toy family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stability {
    Minimum,
    Maximum,
    Degenerate,
}

impl Stability {
    /// Label from a second derivative, treating `|d2| <= tol` as zero.
    pub fn from_curvature<T: Scalar>(d2: T, tol: T) -> Self {
        if d2.abs() <= tol {
            Stability::Degenerate
        } else if d2 > T::zero() {
            Stability::Minimum
        } else {
            Stability::Maximum
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Stability::Minimum => "Minimum",
            Stability::Maximum => "Maximum",
            Stability::Degenerate => "Degenerate",
        }
    }
}

impl Display for Stability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub use bifurcation::{BifurcationReport, BranchSample, Scenario};
pub use critical::CriticalPoint;
pub use dynamics::{ChartState, IntegratorConfig, ProbeVerdict, ReducedState, Trajectory};
pub use potential::{NormalFormCoeffs, PotentialSpec};

pub type Jet = jet::Jet2<f64>;
pub type InvariantPotential = potential::InvariantPotential<f64>;
pub type EffectivePotential = effective::EffectivePotential<f64>;
pub type ChartSystem = dynamics::ChartSystem<f64>;
pub type ReducedSystem = dynamics::ReducedSystem<f64>;
pub type Report = BifurcationReport<f64>;

/// Shared configuration for the randomized suites: 1000 cases, fixed seed.
#[cfg(test)]
pub(crate) fn prop_config() -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        rng_seed: proptest::test_runner::RngSeed::Fixed(0x5eed_5eed),
        failure_persistence: None,
        ..proptest::test_runner::Config::with_cases(1000)
    }
}
