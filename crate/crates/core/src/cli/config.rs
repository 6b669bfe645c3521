//! Flat `key = value` run configuration.
//!
//! ```text
//! # Lagrange top, slow-to-fast sweep
//! potential   = lagrange          # lagrange | kirchhoff | polynomial | expr
//! lambda_grid = 0:4:0.1           # start:stop:step, a comma list, or one value
//! u_max       = 0.95
//! ```
//!
//! Potential-specific keys: `c` (kirchhoff), `coefficients` (polynomial,
//! ascending powers of `s`), `expr` plus `param.<name>` bindings (expr).

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use crate::critical::{DEFAULT_GRID, DEFAULT_U_MAX};
use crate::dynamics::IntegratorConfig;
use crate::effective::DEFAULT_EDGE_GUARD;
use crate::expr::parse_potential_expr;
use crate::potential::{InvariantPotential, PotentialSpec};
use crate::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_BRANCH_SAMPLES: usize = 64;
pub const DEFAULT_PROBE_EPS: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SystemKind {
    Reduced,
    Chart,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub potential: PotentialSpec,
    pub lambda_grid: Vec<f64>,
    pub u_max: f64,
    pub grid: usize,
    /// Distance kept from `|u| = 1` and from the chart boundary.
    pub eps: f64,
    /// Root-bracket width and degeneracy threshold.
    pub tol: f64,
    pub integrator: IntegratorConfig,
    pub output_dir: PathBuf,
    pub branch_samples: usize,
    pub system: SystemKind,
    pub initial: Option<Vec<f64>>,
    pub probe_u: Option<Vec<f64>>,
    pub probe_eps: f64,
}

impl RunConfig {
    pub fn build_potential(&self) -> Result<InvariantPotential<f64>> {
        InvariantPotential::new(self.potential.clone())
    }
}

const KEYS: &[&str] = &[
    "potential",
    "c",
    "coefficients",
    "expr",
    "lambda_grid",
    "u_max",
    "grid",
    "eps",
    "tol",
    "rel_tol",
    "abs_tol",
    "t_final",
    "max_steps",
    "sample_interval",
    "output_dir",
    "branch_samples",
    "system",
    "initial",
    "probe_u",
    "probe_eps",
];

struct Entry {
    value: String,
    line: usize,
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut entries: BTreeMap<String, Entry> = BTreeMap::new();
    let mut params: BTreeMap<String, f64> = BTreeMap::new();
    let mut param_lines: BTreeMap<String, usize> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::config_at(line, format!("expected `key = value`, got `{content}`")))?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() {
            return Err(Error::config_at(line, "missing key"));
        }
        if value.is_empty() {
            return Err(Error::config_at(line, format!("missing value for `{key}`")));
        }
        if let Some(name) = key.strip_prefix("param.") {
            if !is_identifier(name) || name == "s" || name == "sqrt" {
                return Err(Error::config_at(line, format!("invalid parameter name `{name}`")));
            }
            if param_lines.insert(name.to_string(), line).is_some() {
                return Err(Error::config_at(line, format!("duplicate key `{key}`")));
            }
            params.insert(name.to_string(), parse_f64(value, line)?);
            continue;
        }
        if !KEYS.contains(&key) {
            return Err(Error::config_at(line, format!("unknown key `{key}`")));
        }
        let prev = entries.insert(
            key.to_string(),
            Entry {
                value: value.to_string(),
                line,
            },
        );
        if prev.is_some() {
            return Err(Error::config_at(line, format!("duplicate key `{key}`")));
        }
    }

    let mut used: HashSet<&str> = HashSet::new();
    let mut take = |k: &'static str| -> Option<&Entry> {
        used.insert(k);
        entries.get(k)
    };

    let kind = take("potential").ok_or_else(|| Error::config("missing mandatory key `potential`"))?;
    let kind_line = kind.line;
    let potential = match kind.value.as_str() {
        "lagrange" => PotentialSpec::BuiltinLagrange,
        "kirchhoff" => {
            let c = take("c").ok_or_else(|| Error::config_at(kind_line, "kirchhoff needs `c`"))?;
            PotentialSpec::BuiltinKirchhoff {
                c: parse_f64(&c.value, c.line)?,
            }
        }
        "polynomial" => {
            let e = take("coefficients")
                .ok_or_else(|| Error::config_at(kind_line, "polynomial needs `coefficients`"))?;
            PotentialSpec::PolynomialInS {
                coefficients: parse_list(&e.value, e.line)?,
            }
        }
        "expr" => {
            let e = take("expr").ok_or_else(|| Error::config_at(kind_line, "expr potential needs `expr`"))?;
            let names: Vec<&str> = params.keys().map(String::as_str).collect();
            match parse_potential_expr(&e.value, &names) {
                Ok(_) => {}
                Err(Error::UnknownIdentifier { name, .. }) => {
                    return Err(Error::config_at(e.line, format!("unbound expression parameter `{name}`")))
                }
                Err(err) => return Err(Error::config_at(e.line, err.to_string())),
            }
            PotentialSpec::Expression {
                source: e.value.clone(),
                params: params.clone(),
            }
        }
        other => {
            return Err(Error::config_at(
                kind_line,
                format!("unknown potential `{other}` (lagrange, kirchhoff, polynomial, expr)"),
            ))
        }
    };
    if !params.is_empty() && !matches!(potential, PotentialSpec::Expression { .. }) {
        let (name, line) = param_lines.iter().next().expect("non-empty");
        return Err(Error::config_at(*line, format!("`param.{name}` only applies to expr potentials")));
    }

    let lambda_grid = {
        let e = take("lambda_grid").ok_or_else(|| Error::config("missing mandatory key `lambda_grid`"))?;
        parse_grid(&e.value, e.line)?
            .into_iter()
            .map(f64::abs)
            .collect::<Vec<_>>()
    };

    let f64_or = |e: Option<&Entry>, default: f64| -> Result<f64> {
        e.map_or(Ok(default), |e| parse_f64(&e.value, e.line))
    };
    let usize_or = |e: Option<&Entry>, default: usize| -> Result<usize> {
        e.map_or(Ok(default), |e| parse_usize(&e.value, e.line))
    };

    let u_max = f64_or(take("u_max"), DEFAULT_U_MAX)?;
    let grid = usize_or(take("grid"), DEFAULT_GRID)?;
    let eps = f64_or(take("eps"), DEFAULT_EDGE_GUARD)?;
    let tol = f64_or(take("tol"), DEFAULT_TOL)?;
    let defaults = IntegratorConfig::default();
    let integrator = IntegratorConfig {
        rel_tol: f64_or(take("rel_tol"), defaults.rel_tol)?,
        abs_tol: f64_or(take("abs_tol"), defaults.abs_tol)?,
        t_final: f64_or(take("t_final"), defaults.t_final)?,
        max_steps: usize_or(take("max_steps"), defaults.max_steps)?,
        sample_interval: f64_or(take("sample_interval"), defaults.sample_interval)?,
    };
    let output_dir = take("output_dir").map_or_else(|| PathBuf::from("."), |e| PathBuf::from(&e.value));
    let branch_samples = usize_or(take("branch_samples"), DEFAULT_BRANCH_SAMPLES)?;
    let system = match take("system") {
        None => SystemKind::Reduced,
        Some(e) => match e.value.as_str() {
            "reduced" => SystemKind::Reduced,
            "chart" => SystemKind::Chart,
            other => return Err(Error::config_at(e.line, format!("unknown system `{other}` (reduced, chart)"))),
        },
    };
    let initial = take("initial").map(|e| parse_list(&e.value, e.line)).transpose()?;
    let probe_u = take("probe_u").map(|e| parse_list(&e.value, e.line)).transpose()?;
    let probe_eps = f64_or(take("probe_eps"), DEFAULT_PROBE_EPS)?;

    for (key, e) in &entries {
        if !used.contains(key.as_str()) {
            return Err(Error::config_at(
                e.line,
                format!("`{key}` does not apply to potential = {}", kind.value),
            ));
        }
    }

    let cfg = RunConfig {
        potential,
        lambda_grid,
        u_max,
        grid,
        eps,
        tol,
        integrator,
        output_dir,
        branch_samples,
        system,
        initial,
        probe_u,
        probe_eps,
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Result<()> {
    InvariantPotential::<f64>::new(cfg.potential.clone()).map_err(|e| Error::config(e.to_string()))?;
    if !(cfg.u_max > 0.0 && cfg.u_max < 1.0) {
        return Err(Error::config(format!("u_max = {} must lie in (0, 1)", cfg.u_max)));
    }
    if cfg.grid < crate::critical::MIN_GRID {
        return Err(Error::config(format!(
            "grid = {} must be at least {}",
            cfg.grid,
            crate::critical::MIN_GRID
        )));
    }
    if !(cfg.eps > 0.0 && cfg.eps < 0.5) {
        return Err(Error::config(format!("eps = {} must lie in (0, 0.5)", cfg.eps)));
    }
    if !(cfg.tol > 0.0 && cfg.tol.is_finite()) {
        return Err(Error::config(format!("tol = {} must be positive", cfg.tol)));
    }
    if cfg.branch_samples < 2 {
        return Err(Error::config("branch_samples must be at least 2"));
    }
    if !(cfg.probe_eps > 0.0 && cfg.probe_eps < 0.1) {
        return Err(Error::config(format!("probe_eps = {} must lie in (0, 0.1)", cfg.probe_eps)));
    }
    cfg.integrator.validate().map_err(|e| Error::config(e.to_string()))?;
    Ok(())
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::config_at(line, format!("expected a number, got `{}`", s.trim())))?;
    if !v.is_finite() {
        return Err(Error::config_at(line, format!("non-finite number `{}`", s.trim())));
    }
    Ok(v)
}

fn parse_usize(s: &str, line: usize) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::config_at(line, format!("expected a non-negative integer, got `{}`", s.trim())))
}

fn parse_list(s: &str, line: usize) -> Result<Vec<f64>> {
    s.split(',').map(|t| parse_f64(t, line)).collect()
}

/// `start:stop:step` (inclusive of `stop` up to rounding), a comma list, or
/// a single value.
pub fn parse_grid(s: &str, line: usize) -> Result<Vec<f64>> {
    if !s.contains(':') {
        return parse_list(s, line);
    }
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::config_at(line, format!("range must be start:stop:step, got `{s}`")));
    }
    let start = parse_f64(parts[0], line)?;
    let stop = parse_f64(parts[1], line)?;
    let step = parse_f64(parts[2], line)?;
    if !(step > 0.0) {
        return Err(Error::config_at(line, "range step must be positive"));
    }
    if stop < start {
        return Err(Error::config_at(line, "range stop is below start"));
    }
    let span = (stop - start) / step;
    let n = (span + 1e-9).floor();
    if n > 1e7 {
        return Err(Error::config_at(line, "range has too many points"));
    }
    Ok((0..=n as usize).map(|k| start + k as f64 * step).collect())
}
