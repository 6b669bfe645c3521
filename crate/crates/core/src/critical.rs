//! Critical points of `U_λ` on `[0, u_max]` and spin sweeps over them.

use crate::effective::{EffectivePotential, DEFAULT_EDGE_GUARD};
use crate::potential::InvariantPotential;
use crate::roots::bisect;
use crate::{Error, Result, Scalar, Stability};

pub const DEFAULT_U_MAX: f64 = 0.95;
pub const DEFAULT_GRID: usize = 512;
pub const MIN_GRID: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalPoint<T> {
    pub u: T,
    pub lambda: T,
    pub label: Stability,
    pub value: T,
}

/// The pole plus every sign change of `U'_λ` on a uniform grid over
/// `(0, u_max]`, refined by bisection. Refinement runs down to adjacent
/// floats rather than stopping at width `tol`: where `U''` is large a
/// `tol`-wide bracket still leaves a visible residual slope. Roots closer
/// together than the grid spacing can be missed.
pub fn find_critical_points<T: Scalar>(
    p: &InvariantPotential<T>,
    lambda: T,
    u_max: T,
    grid: usize,
    tol: T,
) -> Result<Vec<CriticalPoint<T>>> {
    if !(u_max > T::zero() && u_max < T::one()) {
        return Err(Error::InvalidArgument(format!("u_max = {u_max} not in (0, 1)")));
    }
    if grid < MIN_GRID {
        return Err(Error::InvalidArgument(format!(
            "grid = {grid} below minimum {MIN_GRID}"
        )));
    }
    if !(tol > T::zero()) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let guard = T::lit(DEFAULT_EDGE_GUARD).min(T::one() - u_max);
    let e = EffectivePotential::new(p.clone(), lambda)?.with_edge_guard(guard);
    let lambda = e.lambda();
    let label_tol = tol * T::one().max(lambda * lambda);
    let classify = |u: T| -> Result<CriticalPoint<T>> {
        let (value, _, d2) = e.eval_all(u)?;
        Ok(CriticalPoint {
            u,
            lambda,
            label: Stability::from_curvature(d2, label_tol),
            value,
        })
    };

    let mut out = vec![CriticalPoint {
        u: T::zero(),
        lambda,
        label: Stability::from_curvature(e.pole_hessian()?, label_tol),
        value: e.value(T::zero())?,
    }];

    let n = T::from_usize(grid).unwrap();
    let at = |k: usize| {
        if k == grid {
            u_max
        } else {
            u_max * T::from_usize(k).unwrap() / n
        }
    };
    let mut prev: Option<(T, T)> = None;
    for k in 1..=grid {
        let u = at(k);
        let d = e.slope(u)?;
        if d == T::zero() {
            out.push(classify(u)?);
            prev = None;
            continue;
        }
        if let Some((a, da)) = prev {
            if (da > T::zero()) != (d > T::zero()) {
                let root = bisect(|x| e.slope(x), a, u, T::zero())?;
                out.push(classify(root)?);
            }
        }
        prev = Some((u, d));
    }
    Ok(out)
}

/// [`find_critical_points`] for each spin, concatenated in grid order.
pub fn sweep<T: Scalar>(
    p: &InvariantPotential<T>,
    lambda_grid: &[T],
    u_max: T,
    grid: usize,
    tol: T,
) -> Result<Vec<CriticalPoint<T>>> {
    if lambda_grid.is_empty() {
        return Err(Error::InvalidArgument("empty spin grid".into()));
    }
    let mut rows = Vec::new();
    for &lambda in lambda_grid {
        if !(lambda >= T::zero()) {
            return Err(Error::InvalidArgument(format!("spin {lambda} must be >= 0")));
        }
        rows.extend(find_critical_points(p, lambda, u_max, grid, tol)?);
    }
    Ok(rows)
}
