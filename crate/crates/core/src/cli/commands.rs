use std::fmt::Write as _;
use std::io::Write;

use crate::bifurcation::{analyze, trace_branch};
use crate::critical::{find_critical_points, sweep};
use crate::dynamics::{embed_zero_level, integrate, stability_probe, ChartState, ChartSystem, ReducedSystem};
use crate::{selftest, Error, ReducedState, Result};

use super::config::{RunConfig, SystemKind};
use super::output::{fmt_num, write_file, Csv, Field};
use super::{Command, EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, EXIT_SELFTEST};

fn exit_code(e: &Error) -> i32 {
    if e.is_config() {
        EXIT_CONFIG
    } else {
        EXIT_NUMERIC
    }
}

/// Run one subcommand. `cfg` is required for everything except `selftest`.
pub fn run_subcommand(cmd: &Command, cfg: Option<&RunConfig>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if let Command::Selftest = cmd {
        return run_selftest(out);
    }
    let Some(cfg) = cfg else {
        let _ = writeln!(err, "spintop {}: a config file is required", cmd.name());
        return EXIT_CONFIG;
    };
    let result = match cmd {
        Command::Classify { .. } => classify(cfg, out),
        Command::Branch { .. } => branch(cfg, out),
        Command::Sweep { .. } => diagram(cfg, out),
        Command::Simulate { .. } => simulate(cfg, out),
        Command::Probe { .. } => probe(cfg, out, err),
        Command::Selftest => unreachable!(),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "spintop {}: {e}", cmd.name());
            exit_code(&e)
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(Error::from)
}

fn classify(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let p = cfg.build_potential()?;
    let r = analyze(&p, cfg.tol, cfg.u_max, cfg.branch_samples)?;
    let opt = |x: Option<f64>| x.map_or_else(|| "none".to_string(), fmt_num);
    let mut text = String::new();
    let _ = writeln!(text, "potential = {}", p.spec().describe());
    let _ = writeln!(text, "scenario = {}", r.scenario);
    let _ = writeln!(text, "lambda0 = {}", opt(r.lambda0));
    let _ = writeln!(text, "V'(0) = {}", fmt_num(r.coeffs.vp0));
    let _ = writeln!(text, "V''(0) = {}", fmt_num(r.coeffs.vpp0));
    let _ = writeln!(text, "f'(0) = {}", fmt_num(r.coeffs.fp0));
    let _ = writeln!(text, "f''(0) = {}", fmt_num(r.coeffs.fpp0));
    let _ = writeln!(text, "branch_exponent = {}", opt(r.holder_fit));
    let _ = writeln!(text, "branch_samples = {}", r.branch.len());
    if let (Some(first), Some(last)) = (r.branch.first(), r.branch.last()) {
        let _ = writeln!(
            text,
            "branch_lambda_range = {} .. {}",
            fmt_num(first.lambda),
            fmt_num(last.lambda)
        );
        let _ = writeln!(text, "branch_label = {}", first.stability);
    }
    let path = write_file(&cfg.output_dir, "report.txt", &text)?;
    emit(out, &text)?;
    emit(out, &format!("wrote {}\n", path.display()))?;
    Ok(EXIT_OK)
}

fn branch(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let p = cfg.build_potential()?;
    let rows = trace_branch(&p, cfg.u_max, cfg.branch_samples, cfg.tol)?;
    let mut csv = Csv::new(&["lambda", "u", "label"]);
    for r in &rows {
        csv.row(&[Field::Num(r.lambda), Field::Num(r.u), Field::Text(r.stability.as_str())]);
    }
    let path = write_file(&cfg.output_dir, "branch.csv", csv.as_str())?;
    emit(out, &format!("{} branch samples\nwrote {}\n", rows.len(), path.display()))?;
    Ok(EXIT_OK)
}

fn diagram(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let p = cfg.build_potential()?;
    let rows = sweep(&p, &cfg.lambda_grid, cfg.u_max, cfg.grid, cfg.tol)?;
    let mut csv = Csv::new(&["lambda", "u", "label", "U"]);
    for r in &rows {
        csv.row(&[
            Field::Num(r.lambda),
            Field::Num(r.u),
            Field::Text(r.label.as_str()),
            Field::Num(r.value),
        ]);
    }
    let path = write_file(&cfg.output_dir, "diagram.csv", csv.as_str())?;
    emit(
        out,
        &format!(
            "{} critical points over {} spins\nwrote {}\n",
            rows.len(),
            cfg.lambda_grid.len(),
            path.display()
        ),
    )?;
    Ok(EXIT_OK)
}

fn single_lambda(cfg: &RunConfig) -> Result<f64> {
    match cfg.lambda_grid.as_slice() {
        [l] => Ok(*l),
        g => Err(Error::config(format!("simulate needs exactly one spin in lambda_grid, got {}", g.len()))),
    }
}

fn simulate(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let p = cfg.build_potential()?;
    let lambda = single_lambda(cfg)?;
    let initial = cfg
        .initial
        .as_deref()
        .ok_or_else(|| Error::config("simulate needs `initial`"))?;
    let (csv, summary) = match (cfg.system, initial) {
        (SystemKind::Reduced, &[u, p_u]) => {
            let sys = ReducedSystem::new(p, lambda)?.with_edge_guard(cfg.eps);
            let traj = integrate(&sys, ReducedState::new(u, p_u).to_array(), &cfg.integrator)?;
            let mut csv = Csv::new(&["t", "u", "p_u", "H"]);
            for ((t, s), h) in traj.times.iter().zip(&traj.states).zip(&traj.energy) {
                csv.row(&[Field::Num(*t), Field::Num(s[0]), Field::Num(s[1]), Field::Num(*h)]);
            }
            let summary = format!(
                "system = reduced\nsamples = {}\nsteps = {}\nmax_energy_drift = {}\n",
                traj.len(),
                traj.steps,
                fmt_num(traj.max_energy_drift())
            );
            (csv, summary)
        }
        (SystemKind::Chart, init) if init.len() == 2 || init.len() == 4 => {
            let start = if let &[u, p_u] = init {
                embed_zero_level(lambda, ReducedState::new(u, p_u))?
            } else {
                ChartState::new(init[0], init[1], init[2], init[3])
            };
            let sys = ChartSystem::new(p, lambda)?.with_edge_guard(cfg.eps);
            let traj = integrate(&sys, start.to_array(), &cfg.integrator)?;
            let phi = traj.momentum.clone().unwrap_or_default();
            let mut csv = Csv::new(&["t", "x", "y", "p_x", "p_y", "H", "Phi"]);
            for (i, (t, s)) in traj.times.iter().zip(&traj.states).enumerate() {
                csv.row(&[
                    Field::Num(*t),
                    Field::Num(s[0]),
                    Field::Num(s[1]),
                    Field::Num(s[2]),
                    Field::Num(s[3]),
                    Field::Num(traj.energy[i]),
                    Field::Num(phi.get(i).copied().unwrap_or(f64::NAN)),
                ]);
            }
            let summary = format!(
                "system = chart\nsamples = {}\nsteps = {}\nmax_energy_drift = {}\nmax_momentum_drift = {}\n",
                traj.len(),
                traj.steps,
                fmt_num(traj.max_energy_drift()),
                fmt_num(traj.max_momentum_drift().unwrap_or(f64::NAN))
            );
            (csv, summary)
        }
        (kind, init) => {
            let want = if kind == SystemKind::Reduced { "2" } else { "2 or 4" };
            return Err(Error::config(format!(
                "`initial` needs {want} values for this system, got {}",
                init.len()
            )));
        }
    };
    let path = write_file(&cfg.output_dir, "trajectory.csv", csv.as_str())?;
    emit(out, &summary)?;
    emit(out, &format!("wrote {}\n", path.display()))?;
    Ok(EXIT_OK)
}

fn probe(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let p = cfg.build_potential()?;
    let mut code = EXIT_OK;
    for &lambda in &cfg.lambda_grid {
        let targets: Vec<f64> = match &cfg.probe_u {
            Some(us) => us.clone(),
            None => find_critical_points(&p, lambda, cfg.u_max, cfg.grid, cfg.tol)?
                .iter()
                .map(|c| c.u)
                .collect(),
        };
        for u in targets {
            match stability_probe(&p, lambda, u, cfg.probe_eps, &cfg.integrator) {
                Ok(v) => emit(out, &format!("lambda = {}, u = {}: {v}\n", fmt_num(lambda), fmt_num(u)))?,
                Err(e @ Error::Inconclusive { .. }) => {
                    emit(out, &format!("lambda = {}, u = {}: Inconclusive\n", fmt_num(lambda), fmt_num(u)))?;
                    let _ = writeln!(err, "spintop probe: lambda = {lambda}, u = {u}: {e}");
                    code = EXIT_NUMERIC;
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(code)
}

fn run_selftest(out: &mut dyn Write) -> i32 {
    let checks = selftest::run();
    let mut failed = 0;
    for c in &checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        failed += usize::from(!c.passed);
        let _ = writeln!(out, "{tag} {}: {}", c.name, c.detail);
    }
    let _ = writeln!(out, "{} of {} checks passed", checks.len() - failed, checks.len());
    if failed == 0 {
        EXIT_OK
    } else {
        EXIT_SELFTEST
    }
}
