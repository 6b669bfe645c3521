//! Classification of the spin-driven transition at the pole and tracing of
//! the bifurcating branch of relative equilibria.
//!
//! In the normal-form coordinate `v` (with `u = τ(v)`), the reduced potential
//! is `F_λ(v) = ½λ²v² + f(v²)`, and `f'(0) = 4V'(0)`, `f''(0) = 8(V''(0) - V'(0))`.
//! The pole changes type where `λ² = -2f'(0) = -8V'(0)`; the sign of `f''(0)`
//! decides which side the branch lives on and whether it consists of minima
//! or maxima.

use std::fmt;

use crate::effective::{half_angle_factor, EffectivePotential, DEFAULT_EDGE_GUARD};
use crate::potential::{InvariantPotential, NormalFormCoeffs};
use crate::{Error, Result, Scalar, Stability};

pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    /// `V'(0) > 0`: the pole is a minimum for every spin.
    NoBifurcation,
    /// `V'(0) < 0`, `V''(0) > V'(0)`: below `λ₀` the pole turns into a
    /// maximum and a branch of minima splits off.
    AlternativeOne,
    /// `V'(0) < 0`, `V''(0) < V'(0)`: above `λ₀` the pole turns into a
    /// minimum and a branch of maxima splits off.
    AlternativeTwo,
    /// One of the deciding quantities vanishes to tolerance.
    Degenerate,
}

impl Scenario {
    pub fn has_bifurcation(self) -> bool {
        matches!(self, Scenario::AlternativeOne | Scenario::AlternativeTwo)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::NoBifurcation => "NoBifurcation",
            Scenario::AlternativeOne => "AlternativeOne",
            Scenario::AlternativeTwo => "AlternativeTwo",
            Scenario::Degenerate => "Degenerate",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchSample<T> {
    pub lambda: T,
    pub u: T,
    pub stability: Stability,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BifurcationReport<T> {
    pub coeffs: NormalFormCoeffs<T>,
    pub scenario: Scenario,
    pub lambda0: Option<T>,
    pub branch: Vec<BranchSample<T>>,
    pub holder_fit: Option<T>,
}

/// Scenario and critical spin `λ₀ = √(-8V'(0))`.
pub fn classify<T: Scalar>(p: &InvariantPotential<T>, tol: T) -> Result<(Scenario, Option<T>)> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let nf = p.normal_form_coeffs()?;
    let vp = nf.vp0;
    let gap = nf.vpp0 - nf.vp0;
    let scenario = if vp.abs() <= tol {
        Scenario::Degenerate
    } else if vp > T::zero() {
        Scenario::NoBifurcation
    } else if gap.abs() <= tol {
        Scenario::Degenerate
    } else if gap > T::zero() {
        Scenario::AlternativeOne
    } else {
        Scenario::AlternativeTwo
    };
    let lambda0 = scenario
        .has_bifurcation()
        .then(|| (-T::lit(8.0) * vp).sqrt());
    Ok((scenario, lambda0))
}

/// The spin at which `u` is an equilibrium: `λ² = -2u V'(u²) / (m m')`.
pub fn branch_lambda_of_u<T: Scalar>(p: &InvariantPotential<T>, u: T) -> Result<T> {
    if !(u > T::zero() && u < T::one()) {
        return Err(Error::Domain {
            what: "u",
            value: u.to_f64_lossy(),
            domain: "(0, 1)",
        });
    }
    let (m, dm) = half_angle_factor(u)?;
    let (_, vp, _) = p.eval(u * u)?;
    let radicand = -T::lit(2.0) * u * vp / (m * dm);
    if radicand < T::zero() {
        return Err(Error::NoRealSpin { u: u.to_f64_lossy() });
    }
    Ok(radicand.sqrt())
}

fn branch_label<T: Scalar>(p: &InvariantPotential<T>, lambda: T, u: T, tol: T) -> Result<Stability> {
    let guard = T::lit(DEFAULT_EDGE_GUARD).min(T::one() - u);
    let e = EffectivePotential::new(p.clone(), lambda)?.with_edge_guard(guard);
    let d2 = e.curvature(u)?;
    Ok(Stability::from_curvature(d2, tol * T::one().max(lambda * lambda)))
}

/// Sample the branch on a geometric `u`-grid spanning three decades below
/// `u_max`. Rows come back sorted by spin; grid points with no real spin are
/// skipped.
pub fn trace_branch<T: Scalar>(
    p: &InvariantPotential<T>,
    u_max: T,
    n: usize,
    tol: T,
) -> Result<Vec<BranchSample<T>>> {
    if !(u_max > T::zero() && u_max < T::one()) {
        return Err(Error::InvalidArgument(format!("u_max = {u_max} not in (0, 1)")));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 branch samples, got {n}")));
    }
    let ratio = T::lit(1e-3);
    let last = T::from_usize(n - 1).unwrap();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let frac = T::from_usize(n - 1 - k).unwrap() / last;
        let u = if k == n - 1 { u_max } else { u_max * ratio.powf(frac) };
        let lambda = match branch_lambda_of_u(p, u) {
            Ok(l) => l,
            Err(Error::NoRealSpin { .. }) => continue,
            Err(e) => return Err(e),
        };
        let stability = branch_label(p, lambda, u, tol)?;
        out.push(BranchSample { lambda, u, stability });
    }
    out.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

const SCALING_MIN_SAMPLES: usize = 8;

/// Least-squares slope of `ln u` against `ln|λ₀ - λ|` for branch samples
/// whose spin gap lies in `[1e-6, 1e-3]`. A square-root branch gives 1/2.
pub fn verify_branch_scaling<T: Scalar>(p: &InvariantPotential<T>) -> Result<T> {
    let (scenario, lambda0) = classify(p, T::lit(DEFAULT_DEGENERACY_TOL))?;
    let lambda0 = match (scenario.has_bifurcation(), lambda0) {
        (true, Some(l)) => l,
        _ => {
            return Err(Error::NotApplicable(format!(
                "branch scaling needs a generic bifurcation, scenario is {scenario}"
            )))
        }
    };
    let (lo, hi) = (T::lit(1e-6), T::lit(1e-3));
    let n = 400;
    let (u_lo, u_hi) = (T::lit(1e-6), T::lit(0.5));
    let step = (u_hi / u_lo).ln() / T::from_usize(n - 1).unwrap();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in 0..n {
        let u = u_lo * (step * T::from_usize(k).unwrap()).exp();
        let lambda = match branch_lambda_of_u(p, u) {
            Ok(l) => l,
            Err(Error::NoRealSpin { .. }) => continue,
            Err(e) => return Err(e),
        };
        let gap = (lambda0 - lambda).abs();
        if gap >= lo && gap <= hi {
            xs.push(gap.ln());
            ys.push(u.ln());
        }
    }
    if xs.len() < SCALING_MIN_SAMPLES {
        return Err(Error::InsufficientSamples {
            found: xs.len(),
            needed: SCALING_MIN_SAMPLES,
        });
    }
    Ok(least_squares_slope(&xs, &ys))
}

fn least_squares_slope<T: Scalar>(xs: &[T], ys: &[T]) -> T {
    let n = T::from_usize(xs.len()).unwrap();
    let mx = xs.iter().fold(T::zero(), |a, &x| a + x) / n;
    let my = ys.iter().fold(T::zero(), |a, &y| a + y) / n;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        sxy = sxy + (x - mx) * (y - my);
        sxx = sxx + (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Full report: coefficients, scenario, `λ₀`, sampled branch and, when the
/// bifurcation is generic, the fitted branch exponent.
pub fn analyze<T: Scalar>(
    p: &InvariantPotential<T>,
    tol: T,
    u_max: T,
    samples: usize,
) -> Result<BifurcationReport<T>> {
    let coeffs = p.normal_form_coeffs()?;
    let (scenario, lambda0) = classify(p, tol)?;
    let branch = trace_branch(p, u_max, samples, tol)?;
    let holder_fit = if scenario.has_bifurcation() {
        Some(verify_branch_scaling(p)?)
    } else {
        None
    };
    Ok(BifurcationReport {
        coeffs,
        scenario,
        lambda0,
        branch,
        holder_fit,
    })
}

/// Critical points of the one-dimensional model `x⁴/6 - x² + λ²x²`, ascending in `x`.
pub fn toy_family_critical_points<T: Scalar>(lambda: T) -> Vec<(T, Stability)> {
    let one = T::one();
    let shift = lambda * lambda - one;
    // f''(0) = 2(λ² - 1)
    let origin = Stability::from_curvature(T::lit(2.0) * shift, T::lit(4.0) * T::epsilon());
    if origin != Stability::Maximum {
        return vec![(T::zero(), origin)];
    }
    // nonzero roots of (2/3)x³ + 2(λ² - 1)x; curvature there is 4(1 - λ²) > 0
    let x = (-T::lit(3.0) * shift).sqrt();
    vec![
        (-x, Stability::Minimum),
        (T::zero(), Stability::Maximum),
        (x, Stability::Minimum),
    ]
}
