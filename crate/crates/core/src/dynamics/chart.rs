//! The upper-hemisphere chart `(x, y) ↦ (x, y, z)`, `z = √(1 - x² - y²)`,
//! with symplectic form `dx∧dp_x + dy∧dp_y + (λ/z) dx∧dy`.

use crate::effective::{half_angle_factor, DEFAULT_EDGE_GUARD};
use crate::jet::Jet2;
use crate::potential::InvariantPotential;
use crate::{Error, Result, Scalar};

use super::{HamiltonianFlow, ReducedState};

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct ChartState<T> {
    pub x: T,
    pub y: T,
    pub p_x: T,
    pub p_y: T,
}

impl<T: Scalar> ChartState<T> {
    pub fn new(x: T, y: T, p_x: T, p_y: T) -> Self {
        Self { x, y, p_x, p_y }
    }

    pub fn to_array(self) -> [T; 4] {
        [self.x, self.y, self.p_x, self.p_y]
    }

    pub fn from_array(a: [T; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn radius_sq(&self) -> T {
        self.x * self.x + self.y * self.y
    }

    /// Height on the sphere; errors outside the open chart.
    pub fn z(&self) -> Result<T> {
        let r2 = self.radius_sq();
        if !(r2 < T::one()) {
            return Err(Error::Domain {
                what: "x^2 + y^2",
                value: r2.to_f64_lossy(),
                domain: "[0, 1)",
            });
        }
        Ok((T::one() - r2).sqrt())
    }
}

#[derive(Clone, Debug)]
pub struct ChartSystem<T> {
    potential: InvariantPotential<T>,
    lambda: T,
    edge_guard: T,
}

impl<T: Scalar> ChartSystem<T> {
    pub fn new(potential: InvariantPotential<T>, lambda: T) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!("spin must be finite, got {lambda}")));
        }
        Ok(Self {
            potential,
            lambda: lambda.abs(),
            edge_guard: T::lit(DEFAULT_EDGE_GUARD),
        })
    }

    pub fn with_edge_guard(mut self, eps: T) -> Self {
        self.edge_guard = eps;
        self
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    /// Coefficient `λ/z` of the area form.
    pub fn magnetic_factor(&self, c: &ChartState<T>) -> Result<T> {
        Ok(self.lambda / c.z()?)
    }

    fn hamiltonian_jet(&self, q: [Jet2<T>; 4]) -> Result<Jet2<T>> {
        let [x, y, px, py] = q;
        let half = T::lit(0.5);
        // g⁻¹ = [[1 - x², -xy], [-xy, 1 - y²]]
        let kinetic = (-(x * x) + T::one()) * px * px - x * y * px * py * T::lit(2.0)
            + (-(y * y) + T::one()) * py * py;
        let v = self.potential.eval_jet(x * x + y * y)?;
        Ok(kinetic * half + v)
    }

    /// `½ pᵀ g⁻¹ p + V(x² + y²)` for the metric induced by the embedding.
    pub fn hamiltonian(&self, c: &ChartState<T>) -> Result<T> {
        c.z()?;
        let q = c.to_array().map(Jet2::constant);
        Ok(self.hamiltonian_jet(q)?.v)
    }

    /// `(∂H/∂x, ∂H/∂y, ∂H/∂p_x, ∂H/∂p_y)` by forward differentiation.
    pub fn gradient(&self, c: &ChartState<T>) -> Result<[T; 4]> {
        c.z()?;
        let a = c.to_array();
        let mut grad = [T::zero(); 4];
        for (i, g) in grad.iter_mut().enumerate() {
            let mut q = a.map(Jet2::constant);
            q[i] = Jet2::var(a[i]);
            *g = self.hamiltonian_jet(q)?.d1;
        }
        Ok(grad)
    }

    /// Hamilton's equations for the twisted form: the magnetic term couples
    /// each momentum to the other velocity.
    pub fn vector_field(&self, c: &ChartState<T>) -> Result<[T; 4]> {
        let [hx, hy, hpx, hpy] = self.gradient(c)?;
        let b = self.magnetic_factor(c)?;
        Ok([hpx, hpy, -hx - b * hpy, -hy + b * hpx])
    }

    pub fn momentum_map(&self, c: &ChartState<T>) -> Result<T> {
        momentum_map(self.lambda, c)
    }
}

/// `Φ_λ = y p_x - x p_y - λz + λ`.
pub fn momentum_map<T: Scalar>(lambda: T, c: &ChartState<T>) -> Result<T> {
    let z = c.z()?;
    Ok(c.y * c.p_x - c.x * c.p_y + lambda * (T::one() - z))
}

/// Lift a reduced state into the zero level of `Φ_λ`:
/// `(u, p_u) ↦ (u, 0, p_u, λ m(u))`.
pub fn embed_zero_level<T: Scalar>(lambda: T, s: ReducedState<T>) -> Result<ChartState<T>> {
    let (m, _) = half_angle_factor(s.u)?;
    Ok(ChartState::new(s.u, T::zero(), s.p_u, lambda * m))
}

impl<T: Scalar> HamiltonianFlow<T, 4> for ChartSystem<T> {
    fn field(&self, y: &[T; 4]) -> Result<[T; 4]> {
        self.vector_field(&ChartState::from_array(*y))
    }

    fn energy(&self, y: &[T; 4]) -> Result<T> {
        self.hamiltonian(&ChartState::from_array(*y))
    }

    fn momentum(&self, y: &[T; 4]) -> Option<Result<T>> {
        Some(self.momentum_map(&ChartState::from_array(*y)))
    }

    fn inside(&self, y: &[T; 4]) -> bool {
        let r = T::one() - self.edge_guard;
        ChartState::from_array(*y).radius_sq() <= r * r
    }
}
