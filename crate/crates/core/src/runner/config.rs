//! Flat `key = value` configuration with `#` comments.
//!
//! Numeric values accept products and quotients of numbers and `pi`, such as
//! `2*pi/7000` or `-pi/7`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use super::{halving_steps, RunConfig, PRESET_BREATHER};
use crate::breather::BreatherParams;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::newton::JacobianMode;
use crate::schemes::{SchemeKind, Variant};

pub type Settings = BTreeMap<String, String>;

const KEYS: &[&str] = &[
    "preset",
    "scheme.variant",
    "scheme.omega",
    "breather.beta",
    "breather.omega",
    "grid.a",
    "grid.b",
    "grid.dx",
    "grid.dx_numerator",
    "grid.dx_denominator",
    "grid.t_final",
    "grid.dt",
    "sweep.max_k",
    "sweep.dts",
    "solver.tol",
    "solver.tol_increment",
    "solver.max_iters",
    "solver.jacobian",
    "output.dir",
];

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Parses the file format into a map; later lines override earlier ones.
pub fn parse_settings(text: &str) -> Result<Settings> {
    let mut out = Settings::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| config_err(format!("line {}: expected key = value", i + 1)))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(config_err(format!("line {}: unknown key '{key}'", i + 1)));
        }
        out.insert(key.to_string(), value.trim().to_string());
    }
    Ok(out)
}

/// Evaluates `[-]term (('*' | '/') term)*` where a term is a number or `pi`.
pub fn eval_number(expr: &str) -> Result<f64> {
    let bad = || config_err(format!("cannot read number '{expr}'"));
    let s = expr.trim();
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, s),
    };
    let mut value = 1.0;
    let mut op = '*';
    let mut rest = body;
    loop {
        let end = rest.find(['*', '/']).unwrap_or(rest.len());
        let term = rest[..end].trim();
        let x = match term {
            "pi" => std::f64::consts::PI,
            _ => term.parse::<f64>().map_err(|_| bad())?,
        };
        value = if op == '*' { value * x } else { value / x };
        if end == rest.len() {
            break;
        }
        op = rest.as_bytes()[end] as char;
        rest = &rest[end + 1..];
    }
    let v = sign * value;
    if v.is_finite() { Ok(v) } else { Err(bad()) }
}

fn number(settings: &Settings, key: &str) -> Result<Option<f64>> {
    settings.get(key).map(|v| eval_number(v).map_err(|e| config_err(format!("{key}: {e}")))).transpose()
}

fn count(settings: &Settings, key: &str) -> Result<Option<u32>> {
    settings
        .get(key)
        .map(|v| v.trim().parse::<u32>().map_err(|_| config_err(format!("{key}: expected a nonnegative integer, got '{v}'"))))
        .transpose()
}

impl RunConfig {
    /// Builds a config from the preset named by `preset` (default
    /// `breather-paper`) with every other key overriding it.
    pub fn from_settings(settings: &Settings) -> Result<RunConfig> {
        if let Some(key) = settings.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(config_err(format!("unknown key '{key}'")));
        }
        let preset = settings.get("preset").map(String::as_str).unwrap_or(PRESET_BREATHER);
        if preset != PRESET_BREATHER {
            return Err(config_err(format!("unknown preset '{preset}'")));
        }
        let variant = match settings.get("scheme.variant") {
            Some(v) => v.parse::<Variant>()?,
            None => Variant::Dvd,
        };
        let mut cfg = RunConfig::benchmark(variant);

        let beta = number(settings, "breather.beta")?.unwrap_or(cfg.breather.beta);
        let omega = number(settings, "breather.omega")?.unwrap_or(cfg.breather.omega);
        cfg.breather = BreatherParams::new(beta, omega).map_err(|e| config_err(e.to_string()))?;
        cfg.scheme = SchemeKind::new(variant, number(settings, "scheme.omega")?.unwrap_or(omega));

        let g = &cfg.grid;
        let a = number(settings, "grid.a")?.unwrap_or(g.a);
        let b = number(settings, "grid.b")?.unwrap_or(g.b);
        let dx = match (number(settings, "grid.dx")?, number(settings, "grid.dx_numerator")?) {
            (Some(dx), None) => dx,
            (None, Some(num)) => num / number(settings, "grid.dx_denominator")?.unwrap_or(1.0),
            (None, None) => g.dx,
            (Some(_), Some(_)) => return Err(config_err("give either grid.dx or grid.dx_numerator, not both")),
        };
        let t_final = number(settings, "grid.t_final")?.unwrap_or(g.t_final);
        let dt = number(settings, "grid.dt")?.unwrap_or(g.dt);
        cfg.grid = GridSpec::from_spacing(a, b, dx, t_final, dt).map_err(|e| config_err(e.to_string()))?;

        cfg.sweep = match (settings.get("sweep.dts"), count(settings, "sweep.max_k")?) {
            (Some(list), None) => Some(list.split(',').map(eval_number).collect::<Result<Vec<_>>>()?),
            (None, Some(k)) => Some(halving_steps(dt, k)),
            (None, None) => Some(halving_steps(dt, 5)),
            (Some(_), Some(_)) => return Err(config_err("give either sweep.dts or sweep.max_k, not both")),
        };

        if let Some(tol) = number(settings, "solver.tol")? {
            cfg.solver.tol_residual = tol;
        }
        if let Some(tol) = number(settings, "solver.tol_increment")? {
            cfg.solver.tol_increment = tol;
        }
        if let Some(iters) = count(settings, "solver.max_iters")? {
            cfg.solver.max_iters = iters as usize;
        }
        cfg.solver.jacobian_mode = match settings.get("solver.jacobian").map(String::as_str) {
            None | Some("analytic") => JacobianMode::Analytic,
            Some("fd-check") => JacobianMode::FiniteDifferenceCheck,
            Some(other) => return Err(config_err(format!("solver.jacobian: expected analytic or fd-check, got '{other}'"))),
        };
        if let Some(dir) = settings.get("output.dir") {
            cfg.output_path = PathBuf::from(dir);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
