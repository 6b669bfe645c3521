//! Adaptive Dormand–Prince 5(4) with steps clipped onto the sampling grid,
//! so samples are taken at exact times without interpolation.

use crate::{Error, Result, Scalar};

use super::HamiltonianFlow;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub t_final: f64,
    pub max_steps: usize,
    pub sample_interval: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-10,
            t_final: 100.0,
            max_steps: 10_000_000,
            sample_interval: 0.1,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.rel_tol) || !positive(self.abs_tol) {
            return Err(Error::InvalidArgument("integrator tolerances must be positive".into()));
        }
        if !positive(self.t_final) {
            return Err(Error::InvalidArgument("t_final must be positive".into()));
        }
        if !positive(self.sample_interval) {
            return Err(Error::InvalidArgument("sample_interval must be positive".into()));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidArgument("max_steps must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T, const N: usize> {
    pub times: Vec<T>,
    pub states: Vec<[T; N]>,
    pub energy: Vec<T>,
    /// Present for systems with a conserved momentum.
    pub momentum: Option<Vec<T>>,
    /// Set when a stop predicate ended the run before `t_final`.
    pub stopped_at: Option<T>,
    pub steps: usize,
}

impl<T: Scalar, const N: usize> Trajectory<T, N> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_energy_drift(&self) -> T {
        let e0 = self.energy[0];
        self.energy.iter().fold(T::zero(), |m, &e| m.max((e - e0).abs()))
    }

    pub fn max_momentum_drift(&self) -> Option<T> {
        self.momentum.as_ref().map(|m| {
            let m0 = m[0];
            m.iter().fold(T::zero(), |acc, &v| acc.max((v - m0).abs()))
        })
    }

    fn record<F: HamiltonianFlow<T, N>>(&mut self, flow: &F, t: T, y: [T; N]) -> Result<()> {
        self.times.push(t);
        self.states.push(y);
        self.energy.push(flow.energy(&y)?);
        if let Some(m) = self.momentum.as_mut() {
            m.push(flow.momentum(&y).expect("momentum channel")?);
        }
        Ok(())
    }
}

// Dormand–Prince tableau; the system is autonomous so the nodes are unused.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// Fifth-order weights (equal to the last row of A) minus the embedded
// fourth-order weights.
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

struct Step<T, const N: usize> {
    y: [T; N],
    k_end: [T; N],
    err: T,
}

fn try_step<T: Scalar, const N: usize, F: HamiltonianFlow<T, N>>(
    flow: &F,
    y: &[T; N],
    k1: &[T; N],
    h: T,
    rtol: T,
    atol: T,
) -> Result<Step<T, N>> {
    let mut k = [[T::zero(); N]; 7];
    k[0] = *k1;
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = T::lit(A[s][j]);
            if a != T::zero() {
                for i in 0..N {
                    ys[i] = ys[i] + h * a * kj[i];
                }
            }
        }
        k[s] = flow.field(&ys)?;
        if s == 6 {
            // stage 7 is evaluated at the fifth-order solution itself
            let mut sum = T::zero();
            for i in 0..N {
                let mut e = T::zero();
                for (j, kj) in k.iter().enumerate() {
                    e = e + T::lit(E[j]) * kj[i];
                }
                let scale = atol + rtol * y[i].abs().max(ys[i].abs());
                let r = h * e / scale;
                sum = sum + r * r;
            }
            let err = (sum / T::from_usize(N).unwrap()).sqrt();
            return Ok(Step { y: ys, k_end: k[6], err });
        }
    }
    unreachable!("seven stages")
}

/// Integrate to `cfg.t_final`, sampling every `cfg.sample_interval`.
pub fn integrate<T, F, const N: usize>(flow: &F, start: [T; N], cfg: &IntegratorConfig) -> Result<Trajectory<T, N>>
where
    T: Scalar,
    F: HamiltonianFlow<T, N>,
{
    integrate_until(flow, start, cfg, |_, _| false)
}

/// As [`integrate`], but `stop` is consulted after every accepted step; when
/// it returns true the current state is recorded and the run ends.
///
/// Leaving the region reported by [`HamiltonianFlow::inside`] is an
/// [`Error::BoundaryEscape`] carrying the escape time.
pub fn integrate_until<T, F, S, const N: usize>(
    flow: &F,
    start: [T; N],
    cfg: &IntegratorConfig,
    mut stop: S,
) -> Result<Trajectory<T, N>>
where
    T: Scalar,
    F: HamiltonianFlow<T, N>,
    S: FnMut(T, &[T; N]) -> bool,
{
    cfg.validate()?;
    if !flow.inside(&start) {
        return Err(Error::BoundaryEscape { time: 0.0 });
    }
    let rtol = T::lit(cfg.rel_tol);
    let atol = T::lit(cfg.abs_tol);
    let t_final = T::lit(cfg.t_final);
    let dt = T::lit(cfg.sample_interval);

    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        energy: Vec::new(),
        momentum: flow.momentum(&start).map(|_| Vec::new()),
        stopped_at: None,
        steps: 0,
    };
    let mut t = T::zero();
    let mut y = start;
    traj.record(flow, t, y)?;

    let mut k1 = flow.field(&y)?;
    let mut h = initial_step(&y, &k1, rtol, atol).min(dt);
    let mut sample_index = 1usize;
    let safety = T::lit(0.9);
    let (fac_min, fac_max) = (T::lit(0.2), T::lit(5.0));
    let exponent = T::lit(-0.2);

    while t < t_final {
        let target = (dt * T::from_usize(sample_index).unwrap()).min(t_final);
        let mut lands = false;
        let mut h_try = h;
        if t + h_try * T::lit(1.01) >= target {
            h_try = target - t;
            lands = true;
        }
        if h_try <= T::lit(1e-14) * t.abs().max(T::one()) {
            return Err(Error::StepUnderflow { time: t.to_f64_lossy() });
        }
        if traj.steps >= cfg.max_steps {
            return Err(Error::MaxSteps(cfg.max_steps));
        }
        traj.steps += 1;

        let step = match try_step(flow, &y, &k1, h_try, rtol, atol) {
            Ok(s) => s,
            Err(Error::Domain { .. }) => {
                // a stage left the chart: shrink, and call it an escape once
                // the step can no longer shrink
                h = h_try * T::lit(0.25);
                if h <= T::lit(1e-12) * t.abs().max(T::one()) {
                    return Err(Error::BoundaryEscape { time: t.to_f64_lossy() });
                }
                continue;
            }
            Err(e) => return Err(e),
        };

        if !(step.err <= T::one()) {
            let fac = if step.err.is_finite() {
                (safety * step.err.powf(exponent)).max(fac_min)
            } else {
                fac_min
            };
            h = h_try * fac.min(T::one());
            continue;
        }

        t = if lands { target } else { t + h_try };
        y = step.y;
        k1 = step.k_end;
        if !flow.inside(&y) {
            return Err(Error::BoundaryEscape { time: t.to_f64_lossy() });
        }

        let fac = if step.err == T::zero() {
            fac_max
        } else {
            (safety * step.err.powf(exponent)).max(fac_min).min(fac_max)
        };
        let proposed = h_try * fac;
        // a step clipped onto a sample time says little about the scale
        h = if lands { proposed.max(h) } else { proposed };

        if stop(t, &y) {
            traj.record(flow, t, y)?;
            traj.stopped_at = Some(t);
            return Ok(traj);
        }
        if lands {
            traj.record(flow, t, y)?;
            sample_index += 1;
        }
    }
    Ok(traj)
}

fn initial_step<T: Scalar, const N: usize>(y: &[T; N], f: &[T; N], rtol: T, atol: T) -> T {
    let mut d0 = T::zero();
    let mut d1 = T::zero();
    for i in 0..N {
        let sc = atol + rtol * y[i].abs();
        d0 = d0 + (y[i] / sc).powi(2);
        d1 = d1 + (f[i] / sc).powi(2);
    }
    let n = T::from_usize(N).unwrap();
    let (d0, d1) = ((d0 / n).sqrt(), (d1 / n).sqrt());
    if d0 < T::lit(1e-5) || d1 < T::lit(1e-5) {
        T::lit(1e-6)
    } else {
        T::lit(0.01) * d0 / d1
    }
}
