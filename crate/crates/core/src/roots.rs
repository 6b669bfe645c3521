//! Bracketing root refinement.

use crate::{Error, Result, Scalar};

/// Bisect `f` on `[a, b]`, which must bracket a sign change, until the
/// bracket is no wider than `tol` or stops shrinking. Returns the midpoint.
pub fn bisect<T, F>(mut f: F, mut a: T, mut b: T, tol: T) -> Result<T>
where
    T: Scalar,
    F: FnMut(T) -> Result<T>,
{
    let mut fa = f(a)?;
    let fb = f(b)?;
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if (fa > T::zero()) == (fb > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "no sign change on [{a}, {b}]"
        )));
    }
    let two = T::lit(2.0);
    while (b - a).abs() > tol {
        let mid = a + (b - a) / two;
        if mid <= a.min(b) || mid >= a.max(b) {
            break;
        }
        let fm = f(mid)?;
        if fm == T::zero() {
            return Ok(mid);
        }
        if (fm > T::zero()) == (fa > T::zero()) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(a + (b - a) / two)
}
