//! The effective potential `U_λ(u) = ½λ²m(u)² + V(u²)` with
//! `m(u) = (1 - √(1-u²)) / u`.
//!
//! `m` is evaluated in the rationalized form `u / (1 + √(1-u²))`, which has
//! no removable singularity at the pole and is exactly odd in `u`.

use crate::jet::Jet2;
use crate::potential::InvariantPotential;
use crate::{Error, Result, Scalar};

pub const DEFAULT_EDGE_GUARD: f64 = 1e-6;

/// Derivative order accepted by [`EffectivePotential::eval_u`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    Value,
    First,
    Second,
}

impl TryFrom<u8> for Order {
    type Error = Error;
    fn try_from(n: u8) -> Result<Self> {
        match n {
            0 => Ok(Order::Value),
            1 => Ok(Order::First),
            2 => Ok(Order::Second),
            _ => Err(Error::InvalidArgument(format!("derivative order {n} not in 0..=2"))),
        }
    }
}

/// `(m(u), m'(u))` with `m'(u) = 1 / (z (1 + z))`, `z = √(1-u²)`.
pub fn half_angle_factor<T: Scalar>(u: T) -> Result<(T, T)> {
    if !(u.abs() < T::one()) {
        return Err(Error::Domain {
            what: "u",
            value: u.to_f64_lossy(),
            domain: "(-1, 1)",
        });
    }
    let z = (T::one() - u * u).sqrt();
    Ok((u / (T::one() + z), T::one() / (z * (T::one() + z))))
}

/// Jet of `m` along whatever direction `u` is seeded in.
pub fn half_angle_jet<T: Scalar>(u: Jet2<T>) -> Jet2<T> {
    let z = (-(u * u) + T::one()).sqrt();
    u / (z + T::one())
}

#[derive(Clone, Debug)]
pub struct EffectivePotential<T> {
    potential: InvariantPotential<T>,
    lambda: T,
    edge_guard: T,
}

impl<T: Scalar> EffectivePotential<T> {
    /// The spin enters only through `λ²`; its sign is dropped.
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

    pub fn potential(&self) -> &InvariantPotential<T> {
        &self.potential
    }

    pub fn edge_guard(&self) -> T {
        self.edge_guard
    }

    pub fn check_u(&self, u: T) -> Result<()> {
        if u.abs() <= T::one() - self.edge_guard {
            Ok(())
        } else {
            Err(Error::Domain {
                what: "u",
                value: u.to_f64_lossy(),
                domain: "|u| <= 1 - eps",
            })
        }
    }

    /// `U_λ` on a jet in `u`.
    pub fn eval_jet(&self, u: Jet2<T>) -> Result<Jet2<T>> {
        self.check_u(u.v)?;
        let m = half_angle_jet(u);
        let v = self.potential.eval_jet(u * u)?;
        let half_l2 = T::lit(0.5) * self.lambda * self.lambda;
        Ok(m.square() * half_l2 + v)
    }

    /// `(U, U', U'')` at `u`.
    pub fn eval_all(&self, u: T) -> Result<(T, T, T)> {
        let j = self.eval_jet(Jet2::var(u))?;
        Ok((j.v, j.d1, j.d2))
    }

    pub fn eval_u(&self, u: T, order: Order) -> Result<T> {
        let (v, d1, d2) = self.eval_all(u)?;
        Ok(match order {
            Order::Value => v,
            Order::First => d1,
            Order::Second => d2,
        })
    }

    pub fn value(&self, u: T) -> Result<T> {
        self.eval_u(u, Order::Value)
    }

    pub fn slope(&self, u: T) -> Result<T> {
        self.eval_u(u, Order::First)
    }

    pub fn curvature(&self, u: T) -> Result<T> {
        self.eval_u(u, Order::Second)
    }

    /// `U''_λ(0) = λ²/4 + 2V'(0)`.
    pub fn pole_hessian(&self) -> Result<T> {
        let (_, vp0, _) = self.potential.eval(T::zero())?;
        Ok(self.lambda * self.lambda / T::lit(4.0) + T::lit(2.0) * vp0)
    }
}

/// Convenience wrapper matching the `(E, u, order)` calling convention.
pub fn eval_u<T: Scalar>(e: &EffectivePotential<T>, u: T, order: u8) -> Result<T> {
    e.eval_u(u, Order::try_from(order)?)
}
