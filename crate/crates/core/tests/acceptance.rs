//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Reference values come from closed forms written out here, independently
//! of the library code paths they check.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spintop::bifurcation::{classify, toy_family_critical_points, trace_branch, verify_branch_scaling};
use spintop::critical::find_critical_points;
use spintop::dynamics::{embed_zero_level, integrate, stability_probe};
use spintop::{
    ChartState, ChartSystem, EffectivePotential, Error, IntegratorConfig, InvariantPotential, ProbeVerdict,
    ReducedState, ReducedSystem, Scenario, Stability,
};

const SEED: u64 = 0x5eed_5eed;

type Outcome = Result<String, String>;
type Fixture = (InvariantPotential, fn(f64) -> f64);
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

// --- independent references -------------------------------------------------

fn lagrange_v(s: f64) -> f64 {
    (1.0 - s).sqrt()
}

fn kirchhoff_v(c: f64, s: f64) -> f64 {
    1.0 + (c - 1.0) * (1.0 - s)
}

/// Half-angle factor in its textbook form `(1 - cos θ) / sin θ`.
fn half_angle(u: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        (1.0 - (1.0 - u * u).sqrt()) / u
    }
}

fn reduced_energy(v: impl Fn(f64) -> f64, lambda: f64, u: f64, p: f64) -> f64 {
    let m = half_angle(u);
    0.5 * (1.0 - u * u) * p * p + 0.5 * lambda * lambda * m * m + v(u * u)
}

/// Kinetic energy of the round metric in the `(x, y)` projection chart.
fn chart_energy(v: impl Fn(f64) -> f64, c: [f64; 4]) -> f64 {
    let [x, y, px, py] = c;
    0.5 * ((1.0 - x * x) * px * px - 2.0 * x * y * px * py + (1.0 - y * y) * py * py) + v(x * x + y * y)
}

fn lagrange_branch_spin(u: f64) -> f64 {
    1.0 + (1.0 - u * u).sqrt()
}

fn lagrange_branch_point(lambda: f64) -> f64 {
    (1.0 - (lambda - 1.0).powi(2)).sqrt()
}

fn richardson(f: impl Fn(f64) -> f64, x: f64, h: f64) -> (f64, f64) {
    let d1 = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    let d2 = |h: f64| (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    ((4.0 * d1(h / 2.0) - d1(h)) / 3.0, (4.0 * d2(h / 2.0) - d2(h)) / 3.0)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1.0)
}

// --- criteria ---------------------------------------------------------------

fn lagrange_critical_spin() -> Outcome {
    let t0 = Instant::now();
    let p = InvariantPotential::lagrange();
    let (scenario, lambda0) = classify(&p, 1e-10).map_err(|e| e.to_string())?;
    ensure(scenario == Scenario::AlternativeOne, || format!("scenario {scenario}"))?;
    let lambda0 = lambda0.ok_or("no critical spin")?;
    ensure((lambda0 - 2.0).abs() <= 1e-12, || format!("lambda0 = {lambda0}"))?;

    let hessian = |l: f64| EffectivePotential::new(p.clone(), l).unwrap().pole_hessian().unwrap();
    let (mut a, mut b) = (1.0, 3.0);
    ensure(hessian(a) < 0.0 && hessian(b) > 0.0, || "pole Hessian does not change sign".into())?;
    while b - a > 1e-12 {
        let mid = 0.5 * (a + b);
        if hessian(mid) < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let scanned = 0.5 * (a + b);
    ensure((scanned - 2.0).abs() <= 1e-9, || format!("bisection gave {scanned}"))?;
    within(t0.elapsed(), Duration::from_millis(500))?;
    Ok(format!("AlternativeOne, lambda0 = {lambda0}, bisection {scanned}"))
}

fn kirchhoff_alternatives() -> Outcome {
    for c in [0.2, 0.5, 0.99] {
        let (s, _) = classify(&InvariantPotential::kirchhoff(c).unwrap(), 1e-10).map_err(|e| e.to_string())?;
        ensure(s == Scenario::NoBifurcation, || format!("c = {c}: {s}"))?;
    }
    let mut worst = 0.0f64;
    for c in [1.01, 2.0, 5.0] {
        let (s, l) = classify(&InvariantPotential::kirchhoff(c).unwrap(), 1e-10).map_err(|e| e.to_string())?;
        ensure(s == Scenario::AlternativeOne, || format!("c = {c}: {s}"))?;
        let err = (l.ok_or("no critical spin")? - (8.0 * (c - 1.0)).sqrt()).abs();
        worst = worst.max(err);
        ensure(err <= 1e-12, || format!("c = {c}: lambda0 error {err:e}"))?;
    }
    Ok(format!("c < 1 no bifurcation, c > 1 first alternative, max lambda0 error {worst:e}"))
}

fn lagrange_branch_oracle() -> Outcome {
    let t0 = Instant::now();
    let samples = trace_branch(&InvariantPotential::lagrange(), 0.95, 500, 1e-10).map_err(|e| e.to_string())?;
    ensure(samples.len() == 500, || format!("{} samples", samples.len()))?;
    let mut worst = 0.0f64;
    for b in &samples {
        worst = worst.max((b.lambda - lagrange_branch_spin(b.u)).abs());
        ensure(b.stability == Stability::Minimum, || format!("u = {}: {}", b.u, b.stability))?;
    }
    ensure(worst <= 1e-10, || format!("max error {worst:e}"))?;
    within(t0.elapsed(), Duration::from_secs(1))?;
    Ok(format!("{} samples, max |lambda - (1 + sqrt(1 - u^2))| = {worst:e}, all minima", samples.len()))
}

fn holder_exponent() -> Outcome {
    let a = verify_branch_scaling(&InvariantPotential::lagrange()).map_err(|e| e.to_string())?;
    let b = verify_branch_scaling(&InvariantPotential::kirchhoff(2.0).unwrap()).map_err(|e| e.to_string())?;
    ensure((a - 0.5).abs() <= 0.02, || format!("lagrange exponent {a}"))?;
    ensure((b - 0.5).abs() <= 0.02, || format!("kirchhoff exponent {b}"))?;
    Ok(format!("lagrange {a:.6}, kirchhoff(2) {b:.6}"))
}

fn toy_collision() -> Outcome {
    let origin = |l: f64| {
        toy_family_critical_points(l)
            .into_iter()
            .find(|&(x, _)| x == 0.0)
            .map(|(_, s)| s)
    };
    for l in [0.0f64, 0.5, 0.9, 0.99] {
        let pts = toy_family_critical_points(l);
        let nonzero: Vec<f64> = pts.iter().map(|&(x, _)| x).filter(|&x| x != 0.0).collect();
        // x⁴/6 - x² + λ²x² has f'(x) = (2/3)x³ + 2(λ² - 1)x
        let expected = (3.0 * (1.0 - l * l)).sqrt();
        ensure(nonzero.len() == 2, || format!("lambda = {l}: {pts:?}"))?;
        for x in nonzero {
            ensure((x.abs() - expected).abs() <= 1e-12, || format!("lambda = {l}: x = {x}"))?;
        }
        ensure(origin(l) == Some(Stability::Maximum), || format!("lambda = {l}: origin {:?}", origin(l)))?;
    }
    for l in [1.01, 1.5] {
        let pts = toy_family_critical_points(l);
        ensure(pts.iter().all(|&(x, _)| x == 0.0), || format!("lambda = {l}: {pts:?}"))?;
        ensure(origin(l) == Some(Stability::Minimum), || format!("lambda = {l}: origin {:?}", origin(l)))?;
    }
    Ok("two nonzero points below |lambda| = 1, none above; origin Maximum -> Minimum".into())
}

fn reduction_correspondence() -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut dh = 0.0f64;
    let mut phi = 0.0f64;
    let fixtures: [Fixture; 2] = [
        (InvariantPotential::lagrange(), lagrange_v),
        (InvariantPotential::kirchhoff(2.0).unwrap(), |s| kirchhoff_v(2.0, s)),
    ];
    for (pot, v) in &fixtures {
        for _ in 0..1000 {
            let u: f64 = rng.gen_range(-0.9..=0.9);
            let p_u: f64 = rng.gen_range(-3.0..=3.0);
            let lambda: f64 = rng.gen_range(0.0..=4.0);
            let chart = ChartSystem::new(pot.clone(), lambda).unwrap();
            let reduced = ReducedSystem::new(pot.clone(), lambda).unwrap();
            let s = ReducedState::new(u, p_u);
            let c = embed_zero_level(lambda, s).unwrap();
            let h_chart = chart.hamiltonian(&c).unwrap();
            let h_reduced = reduced.hamiltonian(s).unwrap();
            dh = dh.max((h_chart - h_reduced).abs());
            phi = phi.max(chart.momentum_map(&c).unwrap().abs());
            // both sides also agree with the hand-written formulas
            let want = reduced_energy(v, lambda, u, p_u);
            ensure(close(h_reduced, want, 1e-12), || format!("reduced H {h_reduced} vs {want}"))?;
            let want = chart_energy(v, c.to_array());
            ensure(close(h_chart, want, 1e-12), || format!("chart H {h_chart} vs {want}"))?;
        }
    }
    ensure(dh <= 1e-12, || format!("max |dH| {dh:e}"))?;
    ensure(phi <= 1e-13, || format!("max |Phi| {phi:e}"))?;
    within(t0.elapsed(), Duration::from_secs(1))?;
    Ok(format!("2000 samples, max |dH| {dh:e}, max |Phi| {phi:e}"))
}

fn conservation() -> Outcome {
    let t0 = Instant::now();
    let lambda = 1.8;
    let sys = ChartSystem::new(InvariantPotential::lagrange(), lambda).unwrap();
    let start = embed_zero_level(lambda, ReducedState::new(0.59, 0.0)).unwrap();
    let cfg = IntegratorConfig {
        rel_tol: 1e-10,
        abs_tol: 1e-10,
        t_final: 100.0,
        ..Default::default()
    };
    let traj = integrate(&sys, start.to_array(), &cfg).map_err(|e| e.to_string())?;
    ensure((traj.times.last().copied().unwrap_or(0.0) - 100.0).abs() < 1e-9, || "run ended early".into())?;
    let h0 = traj.energy[0];
    let dh = traj.energy.iter().fold(0.0f64, |m, h| m.max((h - h0).abs()));
    let phi = traj
        .momentum
        .as_ref()
        .ok_or("no momentum record")?
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    // recompute the invariants from the raw states as well
    let mut phi_raw = 0.0f64;
    for s in &traj.states {
        let [x, y, px, py] = *s;
        let z = (1.0 - x * x - y * y).sqrt();
        phi_raw = phi_raw.max((y * px - x * py + lambda * (1.0 - z)).abs());
    }
    ensure(dh <= 1e-8, || format!("max |dH| {dh:e}"))?;
    ensure(phi <= 1e-8 && phi_raw <= 1e-8, || format!("max |Phi| {phi:e} / {phi_raw:e}"))?;
    within(t0.elapsed(), Duration::from_secs(30))?;
    Ok(format!("max |dH| {dh:e}, max |Phi| {phi_raw:e}, {} steps", traj.steps))
}

fn probe_agreement() -> Outcome {
    let t0 = Instant::now();
    let p = InvariantPotential::lagrange();
    let cfg = IntegratorConfig::default();
    let mut cases = Vec::new();
    for l in [1.0, 1.6, 1.9] {
        cases.push((l, 0.0, ProbeVerdict::Unstable));
    }
    for l in [2.1, 2.4, 3.0] {
        cases.push((l, 0.0, ProbeVerdict::Stable));
    }
    for l in [1.4, 1.6, 1.8] {
        cases.push((l, lagrange_branch_point(l), ProbeVerdict::Stable));
    }
    for (lambda, u, want) in cases {
        let got = stability_probe(&p, lambda, u, 1e-3, &cfg).map_err(|e| format!("lambda {lambda}, u {u}: {e}"))?;
        ensure(got == want, || format!("lambda {lambda}, u {u}: {got}, expected {want}"))?;
    }
    within(t0.elapsed(), Duration::from_secs(120))?;
    Ok(format!("9 equilibria match the pole Hessian / branch prediction in {:?}", t0.elapsed()))
}

/// Randomized invariants across modules, 1000 cases each from one seed.
fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let n = 1000;

    // potentials and effective potential: AD against finite differences
    for _ in 0..n {
        let c: f64 = rng.gen_range(0.0..4.0);
        let lambda: f64 = rng.gen_range(0.0..4.0);
        let s: f64 = rng.gen_range(0.01..0.9);
        for (pot, v) in [
            (InvariantPotential::lagrange(), Box::new(lagrange_v) as Box<dyn Fn(f64) -> f64>),
            (InvariantPotential::kirchhoff(c).unwrap(), Box::new(move |s| kirchhoff_v(c, s))),
        ] {
            let (val, d1, d2) = pot.eval(s).unwrap();
            ensure(close(val, v(s), 1e-14), || format!("V({s}) = {val} vs {}", v(s)))?;
            let (f1, _) = richardson(&v, s, 1e-5);
            let (_, f2) = richardson(&v, s, 1e-3);
            ensure(close(d1, f1, 1e-6) && close(d2, f2, 1e-6), || {
                format!("V derivatives at s = {s}: ({d1}, {d2}) vs ({f1}, {f2})")
            })?;

            let e = EffectivePotential::new(pot.clone(), lambda).unwrap();
            let u = s;
            let f = |x: f64| reduced_energy(&v, lambda, x, 0.0);
            let (val, d1, d2) = e.eval_all(u).unwrap();
            ensure(close(val, f(u), 1e-13), || format!("U({u}) = {val} vs {}", f(u)))?;
            let (f1, _) = richardson(f, u, 1e-5);
            let (_, f2) = richardson(f, u, 1e-3);
            ensure(close(d1, f1, 1e-6) && close(d2, f2, 1e-6), || {
                format!("U derivatives at u = {u}: ({d1}, {d2}) vs ({f1}, {f2})")
            })?;

            // parity of the value and slope, and the Z2 symmetry of the reduced energy
            let (w, e1, e2) = e.eval_all(-u).unwrap();
            ensure(w == val && e1 == -d1 && e2 == d2, || format!("parity broken at u = {u}"))?;
            let r = ReducedSystem::new(pot, lambda).unwrap();
            let p_u: f64 = rng.gen_range(-3.0..3.0);
            let h = r.hamiltonian(ReducedState::new(u, p_u)).unwrap();
            ensure(h == r.hamiltonian(ReducedState::new(-u, -p_u)).unwrap(), || "Z2 symmetry broken".into())?;
        }
    }

    // expression parser against a polynomial evaluated by hand
    for _ in 0..n {
        let coeffs: Vec<f64> = (0..rng.gen_range(1..=5)).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let source = coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| format!("({a:?})*s^{k}"))
            .collect::<Vec<_>>()
            .join(" + ");
        let pot = InvariantPotential::expression(&source).map_err(|e| format!("{source}: {e}"))?;
        let poly = InvariantPotential::polynomial(&coeffs).unwrap();
        let s: f64 = rng.gen_range(0.0..0.99);
        let horner = |cs: &[f64]| cs.iter().rev().fold(0.0, |acc, a| acc * s + a);
        let d1: Vec<f64> = coeffs.iter().enumerate().skip(1).map(|(k, a)| k as f64 * a).collect();
        let d2: Vec<f64> = d1.iter().enumerate().skip(1).map(|(k, a)| k as f64 * a).collect();
        let want = (horner(&coeffs), horner(&d1), horner(&d2));
        for got in [pot.eval(s).unwrap(), poly.eval(s).unwrap()] {
            ensure(
                close(got.0, want.0, 1e-12) && close(got.1, want.1, 1e-12) && close(got.2, want.2, 1e-12),
                || format!("{source} at s = {s}: {got:?} vs {want:?}"),
            )?;
        }
    }

    // critical points are zeros of the slope with curvature-consistent labels
    for _ in 0..n {
        let lambda: f64 = rng.gen_range(0.0..4.0);
        let c: f64 = rng.gen_range(0.0..4.0);
        let pot = if rng.gen_bool(0.5) {
            InvariantPotential::lagrange()
        } else {
            InvariantPotential::kirchhoff(c).unwrap()
        };
        let e = EffectivePotential::new(pot.clone(), lambda).unwrap();
        for cp in find_critical_points(&pot, lambda, 0.95, 128, 1e-10).unwrap() {
            let (_, d1, d2) = e.eval_all(cp.u).unwrap();
            ensure(d1.abs() <= 1e-9, || format!("U'({}) = {d1}", cp.u))?;
            let want = if d2.abs() <= 1e-10 * lambda.max(1.0).powi(2) {
                Stability::Degenerate
            } else if d2 > 0.0 {
                Stability::Minimum
            } else {
                Stability::Maximum
            };
            ensure(cp.label == want, || format!("label at u = {}: {} vs {want}", cp.u, cp.label))?;
        }
    }

    // toy family: reported points are zeros of f'
    for _ in 0..n {
        let l: f64 = rng.gen_range(0.0..2.0);
        for (x, _) in toy_family_critical_points(l) {
            let slope = 2.0 / 3.0 * x.powi(3) + 2.0 * (l * l - 1.0) * x;
            ensure(slope.abs() <= 1e-12, || format!("toy slope {slope} at x = {x}"))?;
        }
    }

    // chart field satisfies i_X ω = dH (100 points)
    for _ in 0..100 {
        let lambda: f64 = rng.gen_range(0.0..4.0);
        let sys = ChartSystem::new(InvariantPotential::lagrange(), lambda).unwrap();
        let r: f64 = rng.gen_range(0.0..0.9);
        let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let a = [r * th.cos(), r * th.sin(), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let h = |i: usize, d: f64| {
            let mut b = a;
            b[i] += d;
            chart_energy(lagrange_v, b)
        };
        let dh: Vec<f64> = (0..4).map(|i| (h(i, 1e-6) - h(i, -1e-6)) / 2e-6).collect();
        let [xd, yd, pxd, pyd] = sys.vector_field(&ChartState::from_array(a)).unwrap();
        let b = lambda / (1.0 - r * r).sqrt();
        let contraction = [-pxd - b * yd, -pyd + b * xd, xd, yd];
        for i in 0..4 {
            ensure(close(contraction[i], dh[i], 1e-6), || {
                format!("i_X w component {i}: {} vs {}", contraction[i], dh[i])
            })?;
        }
    }

    // energy conservation on the reduced system
    let cfg = IntegratorConfig::default();
    let mut runs = 0;
    let mut worst = 0.0f64;
    while runs < 20 {
        let lambda: f64 = rng.gen_range(0.0..4.0);
        let s = [rng.gen_range(-0.8..0.8), rng.gen_range(-0.5..0.5)];
        let sys = ReducedSystem::new(InvariantPotential::lagrange(), lambda).unwrap();
        match integrate(&sys, s, &cfg) {
            Ok(t) => {
                worst = worst.max(t.max_energy_drift());
                runs += 1;
            }
            Err(Error::BoundaryEscape { .. }) => continue,
            Err(e) => return Err(e.to_string()),
        }
    }
    ensure(worst <= 1e-8, || format!("reduced energy drift {worst:e}"))?;

    Ok(format!("{n} cases per property, seed {SEED:#x}; reduced drift {worst:e}"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("Lagrange critical spin", lagrange_critical_spin),
        ("Kirchhoff alternatives", kirchhoff_alternatives),
        ("Lagrange branch oracle", lagrange_branch_oracle),
        ("Hoelder exponent", holder_exponent),
        ("toy-family collision", toy_collision),
        ("reduction correspondence", reduction_correspondence),
        ("conservation", conservation),
        ("probe/theory agreement", probe_agreement),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name} -- {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name} -- {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
