//! Flat `key = value` run configuration.
//!
//! One pair per line, `#` starts a comment, blank lines are ignored. Every
//! key has a default, so an empty file is a complete configuration. Unknown
//! keys are rejected.

use std::fmt;

use serde_json::{json, Value};
use tricycle::numerics::{linspace, logspace, CompositeGaussLegendre};
use tricycle::optimize::{AllocationGrid, CurveOptions, EnvelopeOptions};
use tricycle::{TricycleConfig, TricycleParams};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "config line {n}: {}", self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

fn err(message: impl Into<String>) -> ConfigError {
    ConfigError {
        line: None,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(err(format!("format must be `csv` or `json`, got `{other}`"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Everything a subcommand may read. Grids are stored as (min, max, points).
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: TricycleParams,
    pub tau_c: f64,
    /// `None` balances the heats.
    pub tau_h: Option<f64>,
    pub tau_p: f64,
    pub heat_model: String,

    pub curve_tau_c_min: f64,
    pub curve_tau_c_max: f64,
    pub curve_points: usize,
    pub scan_tau_p_min: f64,
    pub scan_tau_p_max: f64,
    pub scan_points: usize,

    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_points: usize,
    pub envelope_alpha_points: usize,
    pub envelope_psi_points: usize,
    pub psi_min: Option<f64>,
    pub psi_max: Option<f64>,
    pub profile_points: usize,

    pub sweep_tau_c_min: f64,
    pub sweep_tau_c_max: f64,
    pub sweep_tau_p_min: f64,
    pub sweep_tau_p_max: f64,
    pub sweep_points: usize,

    pub delta_min: f64,
    pub delta_max: f64,
    pub delta_points: usize,

    pub ts_samples: usize,
    pub oracle_taus: Vec<f64>,
    pub oracle_steps: Option<usize>,

    pub quad_rel_tol: f64,
    pub refine_tol: f64,

    pub out: Option<String>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: TricycleParams::default(),
            tau_c: 9.0,
            tau_h: None,
            tau_p: 11.0,
            heat_model: "slow-driving".into(),
            curve_tau_c_min: 1.0,
            curve_tau_c_max: 1e3,
            curve_points: 200,
            scan_tau_p_min: 1e-2,
            scan_tau_p_max: 1e5,
            scan_points: 200,
            alpha_min: -0.5,
            alpha_max: 1.5,
            alpha_points: 101,
            envelope_alpha_points: 41,
            envelope_psi_points: 41,
            psi_min: None,
            psi_max: None,
            profile_points: 21,
            sweep_tau_c_min: 1.0,
            sweep_tau_c_max: 100.0,
            sweep_tau_p_min: 1.0,
            sweep_tau_p_max: 100.0,
            sweep_points: 61,
            delta_min: 0.01,
            delta_max: 2.0,
            delta_points: 400,
            ts_samples: 101,
            oracle_taus: vec![100.0, 200.0, 400.0, 800.0],
            oracle_steps: None,
            quad_rel_tol: 1e-9,
            refine_tol: 1e-9,
            out: None,
            format: Format::Csv,
        }
    }
}

fn float(key: &str, v: &str) -> Result<f64, ConfigError> {
    v.parse::<f64>()
        .map_err(|_| err(format!("`{key}` expects a number, got `{v}`")))
}

fn count(key: &str, v: &str) -> Result<usize, ConfigError> {
    v.parse::<usize>()
        .map_err(|_| err(format!("`{key}` expects a non-negative integer, got `{v}`")))
}

fn optional<T>(v: &str, parse: impl Fn(&str) -> Result<T, ConfigError>) -> Result<Option<T>, ConfigError> {
    if v == "auto" {
        Ok(None)
    } else {
        parse(v).map(Some)
    }
}

fn float_list(key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    v.split(',').map(|s| float(key, s.trim())).collect()
}

fn opt_value<T: Into<Value>>(v: Option<T>) -> Value {
    v.map_or(Value::String("auto".into()), Into::into)
}

impl RunConfig {
    pub fn set(&mut self, key: &str, v: &str) -> Result<(), ConfigError> {
        let p = &mut self.params;
        match key {
            "t_c" => p.t_c = float(key, v)?,
            "t_h" => p.t_h = float(key, v)?,
            "t_p" => p.t_p = float(key, v)?,
            "zeta_c" => p.zeta_c = float(key, v)?,
            "zeta_h" => p.zeta_h = float(key, v)?,
            "delta_c" => p.delta_c = float(key, v)?,
            "gamma0" => p.gamma0 = float(key, v)?,
            "alpha" => p.alpha = float(key, v)?,
            "tau_c" => self.tau_c = float(key, v)?,
            "tau_h" => self.tau_h = optional(v, |s| float(key, s))?,
            "tau_p" => self.tau_p = float(key, v)?,
            "heat_model" => self.heat_model = v.to_string(),
            "curve_tau_c_min" => self.curve_tau_c_min = float(key, v)?,
            "curve_tau_c_max" => self.curve_tau_c_max = float(key, v)?,
            "curve_points" => self.curve_points = count(key, v)?,
            "scan_tau_p_min" => self.scan_tau_p_min = float(key, v)?,
            "scan_tau_p_max" => self.scan_tau_p_max = float(key, v)?,
            "scan_points" => self.scan_points = count(key, v)?,
            "alpha_min" => self.alpha_min = float(key, v)?,
            "alpha_max" => self.alpha_max = float(key, v)?,
            "alpha_points" => self.alpha_points = count(key, v)?,
            "envelope_alpha_points" => self.envelope_alpha_points = count(key, v)?,
            "envelope_psi_points" => self.envelope_psi_points = count(key, v)?,
            "psi_min" => self.psi_min = optional(v, |s| float(key, s))?,
            "psi_max" => self.psi_max = optional(v, |s| float(key, s))?,
            "profile_points" => self.profile_points = count(key, v)?,
            "sweep_tau_c_min" => self.sweep_tau_c_min = float(key, v)?,
            "sweep_tau_c_max" => self.sweep_tau_c_max = float(key, v)?,
            "sweep_tau_p_min" => self.sweep_tau_p_min = float(key, v)?,
            "sweep_tau_p_max" => self.sweep_tau_p_max = float(key, v)?,
            "sweep_points" => self.sweep_points = count(key, v)?,
            "delta_min" => self.delta_min = float(key, v)?,
            "delta_max" => self.delta_max = float(key, v)?,
            "delta_points" => self.delta_points = count(key, v)?,
            "ts_samples" => self.ts_samples = count(key, v)?,
            "oracle_taus" => self.oracle_taus = float_list(key, v)?,
            "oracle_steps" => self.oracle_steps = optional(v, |s| count(key, s))?,
            "quad_rel_tol" => self.quad_rel_tol = float(key, v)?,
            "refine_tol" => self.refine_tol = float(key, v)?,
            "out" => self.out = Some(v.to_string()),
            "format" => self.format = Format::parse(v)?,
            _ => return Err(err(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Applies one `key=value` assignment, as given to `--set`.
    pub fn assign(&mut self, pair: &str) -> Result<(), ConfigError> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| err(format!("expected key=value, got `{pair}`")))?;
        self.set(k.trim(), v.trim())
    }

    /// Overlays the pairs of a config file on `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            self.assign(line).map_err(|e| ConfigError {
                line: Some(i + 1),
                message: e.message,
            })?;
        }
        Ok(())
    }

    /// Checks the model invariants and the basic shape of every grid.
    pub fn validate(&self) -> Result<TricycleConfig, ConfigError> {
        let cfg = TricycleConfig::new(self.params).map_err(|e| err(e.to_string()))?;
        let positive = [
            ("tau_c", self.tau_c),
            ("tau_p", self.tau_p),
            ("quad_rel_tol", self.quad_rel_tol),
            ("refine_tol", self.refine_tol),
        ];
        for (k, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(err(format!("`{k}` must be positive and finite, got {v}")));
            }
        }
        if let Some(t) = self.tau_h {
            if !(t > 0.0 && t.is_finite()) {
                return Err(err(format!("`tau_h` must be positive and finite, got {t}")));
            }
        }
        let ranges = [
            ("curve_tau_c", self.curve_tau_c_min, self.curve_tau_c_max, true),
            ("scan_tau_p", self.scan_tau_p_min, self.scan_tau_p_max, true),
            ("sweep_tau_c", self.sweep_tau_c_min, self.sweep_tau_c_max, true),
            ("sweep_tau_p", self.sweep_tau_p_min, self.sweep_tau_p_max, true),
            ("delta", self.delta_min, self.delta_max, true),
            ("alpha", self.alpha_min, self.alpha_max, false),
        ];
        for (k, lo, hi, need_positive) in ranges {
            if !(lo < hi && lo.is_finite() && hi.is_finite()) || (need_positive && !(lo > 0.0)) {
                return Err(err(format!("`{k}_min` = {lo} and `{k}_max` = {hi} do not form a valid range")));
            }
        }
        let counts = [
            ("curve_points", self.curve_points, 2),
            ("scan_points", self.scan_points, 2),
            ("alpha_points", self.alpha_points, 3),
            ("envelope_alpha_points", self.envelope_alpha_points, 3),
            ("envelope_psi_points", self.envelope_psi_points, 3),
            ("profile_points", self.profile_points, 2),
            ("sweep_points", self.sweep_points, 2),
            ("delta_points", self.delta_points, 2),
            ("ts_samples", self.ts_samples, 2),
        ];
        for (k, n, min) in counts {
            if n < min {
                return Err(err(format!("`{k}` must be at least {min}, got {n}")));
            }
        }
        if self.oracle_taus.iter().any(|t| !(*t > 0.0 && t.is_finite())) || self.oracle_taus.is_empty() {
            return Err(err("`oracle_taus` must be a non-empty list of positive durations"));
        }
        if let (Some(lo), Some(hi)) = (self.psi_min, self.psi_max) {
            if !(lo < hi) {
                return Err(err(format!("`psi_min` = {lo} must be below `psi_max` = {hi}")));
            }
        }
        tricycle::heat_models()
            .get(&self.heat_model)
            .map_err(|e| err(e.to_string()))?;
        Ok(cfg)
    }

    pub fn quadrature(&self) -> CompositeGaussLegendre {
        CompositeGaussLegendre::default().with_rel_tol(self.quad_rel_tol)
    }

    pub fn curve_options(&self) -> CurveOptions {
        CurveOptions {
            tau_c_min: self.curve_tau_c_min,
            tau_c_max: self.curve_tau_c_max,
            points: self.curve_points,
            allocation: AllocationGrid {
                tau_p_min: self.scan_tau_p_min,
                tau_p_max: self.scan_tau_p_max,
                points: self.scan_points,
            },
            quadrature: self.quadrature(),
            refine_tol: self.refine_tol,
        }
    }

    pub fn envelope_options(&self) -> EnvelopeOptions {
        EnvelopeOptions {
            alpha_min: self.alpha_min,
            alpha_max: self.alpha_max,
            alpha_points: self.envelope_alpha_points,
            psi_points: self.envelope_psi_points,
            curve: self.curve_options(),
            ..EnvelopeOptions::default()
        }
    }

    pub fn alpha_grid(&self) -> Vec<f64> {
        linspace(self.alpha_min, self.alpha_max, self.alpha_points)
    }

    pub fn sweep_grids(&self) -> (Vec<f64>, Vec<f64>) {
        (
            logspace(self.sweep_tau_c_min, self.sweep_tau_c_max, self.sweep_points),
            logspace(self.sweep_tau_p_min, self.sweep_tau_p_max, self.sweep_points),
        )
    }

    pub fn delta_grid(&self) -> Vec<f64> {
        linspace(self.delta_min, self.delta_max, self.delta_points)
    }

    /// Every resolved setting, for the report header.
    pub fn to_json(&self) -> Value {
        let p = &self.params;
        json!({
            "t_c": p.t_c, "t_h": p.t_h, "t_p": p.t_p,
            "zeta_c": p.zeta_c, "zeta_h": p.zeta_h, "delta_c": p.delta_c,
            "gamma0": p.gamma0, "alpha": p.alpha,
            "tau_c": self.tau_c, "tau_h": opt_value(self.tau_h), "tau_p": self.tau_p,
            "heat_model": self.heat_model,
            "curve_tau_c_min": self.curve_tau_c_min, "curve_tau_c_max": self.curve_tau_c_max,
            "curve_points": self.curve_points,
            "scan_tau_p_min": self.scan_tau_p_min, "scan_tau_p_max": self.scan_tau_p_max,
            "scan_points": self.scan_points,
            "alpha_min": self.alpha_min, "alpha_max": self.alpha_max, "alpha_points": self.alpha_points,
            "envelope_alpha_points": self.envelope_alpha_points,
            "envelope_psi_points": self.envelope_psi_points,
            "psi_min": opt_value(self.psi_min), "psi_max": opt_value(self.psi_max),
            "profile_points": self.profile_points,
            "sweep_tau_c_min": self.sweep_tau_c_min, "sweep_tau_c_max": self.sweep_tau_c_max,
            "sweep_tau_p_min": self.sweep_tau_p_min, "sweep_tau_p_max": self.sweep_tau_p_max,
            "sweep_points": self.sweep_points,
            "delta_min": self.delta_min, "delta_max": self.delta_max, "delta_points": self.delta_points,
            "ts_samples": self.ts_samples,
            "oracle_taus": self.oracle_taus,
            "oracle_steps": opt_value(self.oracle_steps),
            "quad_rel_tol": self.quad_rel_tol, "refine_tol": self.refine_tol,
            "format": self.format.as_str(),
        })
    }
}

/// Defaults overlaid with `text`, validated.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    cfg.apply_text(text)?;
    cfg.validate()?;
    Ok(cfg)
}
