//! Built-in checks that reproduce the headline results for the Lagrange and
//! Kirchhoff tops and the toy collision model. Run with `spintop selftest`.

use crate::bifurcation::{classify, toy_family_critical_points, trace_branch, verify_branch_scaling};
use crate::dynamics::{embed_zero_level, integrate, stability_probe, ChartSystem, ReducedState, ReducedSystem};
use crate::effective::EffectivePotential;
use crate::potential::InvariantPotential;
use crate::roots::bisect;
use crate::{IntegratorConfig, ProbeVerdict, Result, Scenario, Stability};

type P = InvariantPotential<f64>;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type CheckFn = fn() -> Result<(bool, String)>;

const CHECKS: &[(&str, CheckFn)] = &[
    ("lagrange critical spin", lagrange_critical_spin),
    ("kirchhoff alternatives", kirchhoff_alternatives),
    ("lagrange branch closed form", lagrange_branch),
    ("square-root branch exponent", holder_exponent),
    ("toy family collision", toy_family),
    ("reduction correspondence", reduction_correspondence),
    ("chart conservation", chart_conservation),
    ("probe agrees with theory", probe_agreement),
];

/// Run every check in order; failures never short-circuit.
pub fn run() -> Vec<Check> {
    CHECKS
        .iter()
        .map(|(name, f)| match f() {
            Ok((passed, detail)) => Check { name, passed, detail },
            Err(e) => Check {
                name,
                passed: false,
                detail: format!("error: {e}"),
            },
        })
        .collect()
}

fn lagrange_critical_spin() -> Result<(bool, String)> {
    let p = P::lagrange();
    let (scenario, lambda0) = classify(&p, 1e-10)?;
    let lambda0 = lambda0.unwrap_or(f64::NAN);
    let hessian = |l: f64| EffectivePotential::new(p.clone(), l)?.pole_hessian();
    let scanned = bisect(hessian, 1.0, 3.0, 1e-12)?;
    let ok = scenario == Scenario::AlternativeOne && (lambda0 - 2.0).abs() <= 1e-12 && (scanned - 2.0).abs() <= 1e-9;
    Ok((ok, format!("{scenario}, lambda0 = {lambda0}, bisection = {scanned}")))
}

fn kirchhoff_alternatives() -> Result<(bool, String)> {
    let mut ok = true;
    let mut worst = 0.0f64;
    for c in [0.2, 0.5, 0.99] {
        let (s, _) = classify(&P::kirchhoff(c)?, 1e-10)?;
        ok &= s == Scenario::NoBifurcation;
    }
    for c in [1.01, 2.0, 5.0] {
        let (s, l) = classify(&P::kirchhoff(c)?, 1e-10)?;
        let err = (l.unwrap_or(f64::NAN) - (8.0 * (c - 1.0)).sqrt()).abs();
        worst = worst.max(err);
        ok &= s == Scenario::AlternativeOne && err <= 1e-12;
    }
    Ok((ok, format!("max lambda0 error {worst:e}")))
}

fn lagrange_branch() -> Result<(bool, String)> {
    let samples = trace_branch(&P::lagrange(), 0.95, 200, 1e-10)?;
    let worst = samples
        .iter()
        .map(|b| (b.lambda - (1.0 + (1.0 - b.u * b.u).sqrt())).abs())
        .fold(0.0, f64::max);
    let minima = samples.iter().all(|b| b.stability == Stability::Minimum);
    let ok = !samples.is_empty() && worst <= 1e-10 && minima;
    Ok((ok, format!("{} samples, max error {worst:e}, all minima: {minima}", samples.len())))
}

fn holder_exponent() -> Result<(bool, String)> {
    let a = verify_branch_scaling(&P::lagrange())?;
    let b = verify_branch_scaling(&P::kirchhoff(2.0)?)?;
    let ok = (a - 0.5).abs() <= 0.02 && (b - 0.5).abs() <= 0.02;
    Ok((ok, format!("lagrange {a:.6}, kirchhoff(2) {b:.6}")))
}

fn toy_family() -> Result<(bool, String)> {
    let nonzero = |l: f64| toy_family_critical_points(l).iter().any(|&(x, _)| x != 0.0);
    let origin = |l: f64| {
        toy_family_critical_points(l)
            .into_iter()
            .find(|&(x, _)| x == 0.0)
            .map(|(_, s)| s)
    };
    let below = [0.0, 0.5, 0.9, 0.99].iter().all(|&l| nonzero(l) && origin(l) == Some(Stability::Maximum));
    let above = [1.01, 1.5].iter().all(|&l| !nonzero(l) && origin(l) == Some(Stability::Minimum));
    Ok((below && above, format!("branches below 1: {below}, none above 1: {above}")))
}

fn reduction_correspondence() -> Result<(bool, String)> {
    // Kronecker sequence: deterministic, well spread over the sample box
    const ALPHA: [f64; 3] = [0.618_033_988_749_894_9, 0.414_213_562_373_095_1, 0.732_050_807_568_877_2];
    let mut dh = 0.0f64;
    let mut phi = 0.0f64;
    for p in [P::lagrange(), P::kirchhoff(2.0)?] {
        for k in 1..=1000 {
            let frac = |a: f64| (k as f64 * a).fract();
            let u = -0.9 + 1.8 * frac(ALPHA[0]);
            let p_u = -2.0 + 4.0 * frac(ALPHA[1]);
            let lambda = 4.0 * frac(ALPHA[2]);
            let reduced = ReducedSystem::new(p.clone(), lambda)?;
            let chart = ChartSystem::new(p.clone(), lambda)?;
            let c = embed_zero_level(lambda, ReducedState::new(u, p_u))?;
            dh = dh.max((chart.hamiltonian(&c)? - reduced.hamiltonian(ReducedState::new(u, p_u))?).abs());
            phi = phi.max(chart.momentum_map(&c)?.abs());
        }
    }
    Ok((dh <= 1e-12 && phi <= 1e-13, format!("max |dH| {dh:e}, max |Phi| {phi:e}")))
}

fn chart_conservation() -> Result<(bool, String)> {
    let lambda = 1.8;
    let sys = ChartSystem::new(P::lagrange(), lambda)?;
    let start = embed_zero_level(lambda, ReducedState::new(0.59, 0.0))?;
    let traj = integrate(&sys, start.to_array(), &IntegratorConfig::default())?;
    let dh = traj.max_energy_drift();
    let phi = traj
        .momentum
        .as_deref()
        .unwrap_or(&[])
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    Ok((dh <= 1e-8 && phi <= 1e-8, format!("max |dH| {dh:e}, max |Phi| {phi:e}, {} steps", traj.steps)))
}

fn probe_agreement() -> Result<(bool, String)> {
    let p = P::lagrange();
    let cfg = IntegratorConfig::default();
    let mut cases: Vec<(f64, f64, ProbeVerdict)> = Vec::new();
    for l in [1.0, 1.6, 1.9] {
        cases.push((l, 0.0, ProbeVerdict::Unstable));
    }
    for l in [2.1, 2.4, 3.0] {
        cases.push((l, 0.0, ProbeVerdict::Stable));
    }
    for l in [1.4f64, 1.6, 1.8] {
        cases.push((l, (1.0 - (l - 1.0).powi(2)).sqrt(), ProbeVerdict::Stable));
    }
    let mut mismatches = Vec::new();
    for &(lambda, u, want) in &cases {
        let got = stability_probe(&p, lambda, u, 1e-3, &cfg)?;
        if got != want {
            mismatches.push(format!("lambda {lambda} u {u:.6}: {got}"));
        }
    }
    let detail = if mismatches.is_empty() {
        format!("{} equilibria as predicted", cases.len())
    } else {
        mismatches.join("; ")
    };
    Ok((mismatches.is_empty(), detail))
}
