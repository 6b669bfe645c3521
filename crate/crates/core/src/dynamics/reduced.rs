use crate::effective::EffectivePotential;
use crate::potential::InvariantPotential;
use crate::{Result, Scalar};

use super::HamiltonianFlow;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct ReducedState<T> {
    pub u: T,
    pub p_u: T,
}

impl<T: Scalar> ReducedState<T> {
    pub fn new(u: T, p_u: T) -> Self {
        Self { u, p_u }
    }

    pub fn to_array(self) -> [T; 2] {
        [self.u, self.p_u]
    }

    pub fn from_array(a: [T; 2]) -> Self {
        Self { u: a[0], p_u: a[1] }
    }
}

/// `H_λ(u, p_u) = ½(1 - u²)p_u² + U_λ(u)`.
#[derive(Clone, Debug)]
pub struct ReducedSystem<T> {
    effective: EffectivePotential<T>,
}

impl<T: Scalar> ReducedSystem<T> {
    pub fn new(potential: InvariantPotential<T>, lambda: T) -> Result<Self> {
        Ok(Self {
            effective: EffectivePotential::new(potential, lambda)?,
        })
    }

    pub fn with_edge_guard(mut self, eps: T) -> Self {
        self.effective = self.effective.with_edge_guard(eps);
        self
    }

    pub fn effective(&self) -> &EffectivePotential<T> {
        &self.effective
    }

    pub fn lambda(&self) -> T {
        self.effective.lambda()
    }

    pub fn hamiltonian(&self, s: ReducedState<T>) -> Result<T> {
        let g = T::one() - s.u * s.u;
        let kinetic = T::lit(0.5) * g * s.p_u * s.p_u;
        Ok(kinetic + self.effective.value(s.u)?)
    }

    /// `(u̇, ṗ_u) = (G p_u, u p_u² - U'_λ(u))` with `G = 1 - u²`.
    pub fn vector_field(&self, s: ReducedState<T>) -> Result<(T, T)> {
        let g = T::one() - s.u * s.u;
        let slope = self.effective.slope(s.u)?;
        Ok((g * s.p_u, s.u * s.p_u * s.p_u - slope))
    }
}

impl<T: Scalar> HamiltonianFlow<T, 2> for ReducedSystem<T> {
    fn field(&self, y: &[T; 2]) -> Result<[T; 2]> {
        let (du, dp) = self.vector_field(ReducedState::from_array(*y))?;
        Ok([du, dp])
    }

    fn energy(&self, y: &[T; 2]) -> Result<T> {
        self.hamiltonian(ReducedState::from_array(*y))
    }

    fn inside(&self, y: &[T; 2]) -> bool {
        self.effective.check_u(y[0]).is_ok()
    }
}
