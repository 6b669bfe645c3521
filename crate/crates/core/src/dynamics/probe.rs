//! Dynamical check of a stability verdict: perturb an equilibrium of the
//! reduced system in every direction and watch whether the orbits stay close.

use std::fmt;

use crate::potential::InvariantPotential;
use crate::{Error, Result, Scalar};

use super::integrator::{integrate_until, IntegratorConfig};
use super::reduced::ReducedSystem;

/// Number of perturbation directions around the equilibrium.
pub const PROBE_RAYS: usize = 8;

const CRITICAL_SLOPE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeVerdict {
    Stable,
    Unstable,
}

impl fmt::Display for ProbeVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProbeVerdict::Stable => "Stable",
            ProbeVerdict::Unstable => "Unstable",
        })
    }
}

/// Start [`PROBE_RAYS`] orbits on the circle of radius `eps` around
/// `(u_star, 0)` in the `(u, p_u)` plane.
///
/// Stable if every orbit stays within `10·eps`; unstable as soon as one
/// moves farther than `0.5·√eps` or leaves the domain. Anything in between
/// is [`Error::Inconclusive`].
pub fn stability_probe<T: Scalar>(
    p: &InvariantPotential<T>,
    lambda: T,
    u_star: T,
    eps: T,
    cfg: &IntegratorConfig,
) -> Result<ProbeVerdict> {
    if !(eps > T::zero() && eps < T::lit(0.1)) {
        return Err(Error::InvalidArgument(format!("probe radius {eps} not in (0, 0.1)")));
    }
    let sys = ReducedSystem::new(p.clone(), lambda)?;
    let slope = sys.effective().slope(u_star)?;
    if slope.abs() > T::lit(CRITICAL_SLOPE_TOL) {
        return Err(Error::InvalidArgument(format!(
            "u = {u_star} is not a critical point (U' = {slope})"
        )));
    }
    let stable_bound = T::lit(10.0) * eps;
    let escape_bound = T::lit(0.5) * eps.sqrt();
    let mut worst = T::zero();
    for k in 0..PROBE_RAYS {
        let theta = T::lit(std::f64::consts::TAU) * T::from_usize(k).unwrap()
            / T::from_usize(PROBE_RAYS).unwrap();
        let start = [u_star + eps * theta.cos(), eps * theta.sin()];
        let mut max_dev = T::zero();
        let run = integrate_until(&sys, start, cfg, |_, y| {
            let d = ((y[0] - u_star).powi(2) + y[1] * y[1]).sqrt();
            max_dev = max_dev.max(d);
            d > escape_bound
        });
        match run {
            Ok(tr) if tr.stopped_at.is_some() => return Ok(ProbeVerdict::Unstable),
            Ok(_) => worst = worst.max(max_dev),
            Err(Error::BoundaryEscape { .. }) => return Ok(ProbeVerdict::Unstable),
            Err(e) => return Err(e),
        }
    }
    if worst <= stable_bound {
        Ok(ProbeVerdict::Stable)
    } else {
        Err(Error::Inconclusive {
            deviation: worst.to_f64_lossy(),
            stable_bound: stable_bound.to_f64_lossy(),
            escape_bound: escape_bound.to_f64_lossy(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> IntegratorConfig {
        IntegratorConfig {
            t_final: 100.0,
            ..Default::default()
        }
    }

    #[test]
    fn lagrange_verdicts() {
        let p = InvariantPotential::<f64>::lagrange();
        assert_eq!(stability_probe(&p, 1.6, 0.8, 1e-3, &cfg()).unwrap(), ProbeVerdict::Stable);
        assert_eq!(stability_probe(&p, 1.6, 0.0, 1e-3, &cfg()).unwrap(), ProbeVerdict::Unstable);
        assert_eq!(stability_probe(&p, 3.0, 0.0, 1e-3, &cfg()).unwrap(), ProbeVerdict::Stable);
    }

    #[test]
    fn rejects_non_equilibria() {
        let p = InvariantPotential::<f64>::lagrange();
        assert!(matches!(
            stability_probe(&p, 1.6, 0.5, 1e-3, &cfg()),
            Err(Error::InvalidArgument(_))
        ));
        assert!(stability_probe(&p, 1.6, 0.0, 0.0, &cfg()).is_err());
    }
}
