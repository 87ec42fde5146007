//! JSON run configuration with unit-suffixed keys.
//!
//! ```json
//! {
//!   "scenario": { "lambda_B_per_m2": 0.02, "P_t_dBm": 20, "sigma_m": 0.2 },
//!   "placement": { "kind": "ring", "r_in_m": 10, "r_out_m": 15, "mu_h_m": 25 },
//!   "sweep": { "variable": "sigma_m", "grid": [0, 0.1, 0.2],
//!              "metrics": ["rel_multi"], "mode": "both" },
//!   "simulation": { "n_trials": 100000, "seed": 7 }
//! }
//! ```
//!
//! Every section and key is optional; omitted scenario keys take the
//! default scenario values. Unknown keys are rejected.

use serde_json::{Map, Value};
use std::path::Path;

use super::sweep::{Mode, SweepMetric, SweepSpec, SweepVariable};
use crate::error::{Error, Result};
use crate::scenario::{db_to_linear, dbm_to_watts, ScenarioParams};
use crate::simcore::{AvailabilityBackend, EstimateOptions, PhiMode, PlacementSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ScenarioParams,
    pub placement: PlacementSpec,
    pub sweep: SweepSpec,
    pub estimate: EstimateOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: ScenarioParams::default(),
            placement: PlacementSpec::single(10.0, 25.0),
            sweep: SweepSpec::default(),
            estimate: EstimateOptions::default(),
        }
    }
}

fn cfg_err(path: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        reason: reason.into(),
    }
}

enum Unit {
    Plain,
    Db,
    Dbm,
}

// (key, stem, field, unit)
const SCENARIO_KEYS: &[(&str, &str, &str, Unit)] = &[
    ("lambda_T_per_m2", "lambda_T", "lambda_t", Unit::Plain),
    ("lambda_B_per_m2", "lambda_B", "lambda_b", Unit::Plain),
    ("lambda_S_per_m2", "lambda_S", "lambda_s", Unit::Plain),
    ("v_mps", "v", "v", Unit::Plain),
    ("h_B_m", "h_B", "h_b", Unit::Plain),
    ("h_R_m", "h_R", "h_r", Unit::Plain),
    ("omega_per_s", "omega", "omega", Unit::Plain),
    ("theta_rad", "theta", "theta", Unit::Plain),
    ("E_l_m", "E_l", "e_l", Unit::Plain),
    ("E_w_m", "E_w", "e_w", Unit::Plain),
    ("R_m", "R", "r_cell", Unit::Plain),
    ("sigma_m", "sigma", "sigma", Unit::Plain),
    ("P_t_dBm", "P_t", "p_t", Unit::Dbm),
    ("N_0_dBm", "N_0", "n_0", Unit::Dbm),
    ("beta_0", "beta_0", "beta_0", Unit::Plain),
    ("alpha", "alpha", "alpha", Unit::Plain),
    ("gamma_0_dB", "gamma_0", "gamma_0", Unit::Db),
    ("p_th", "p_th", "p_th", Unit::Plain),
    ("K", "K", "k", Unit::Plain),
];

fn set_field(p: &mut ScenarioParams, field: &str, v: f64) {
    match field {
        "lambda_t" => p.lambda_t = v,
        "lambda_b" => p.lambda_b = v,
        "lambda_s" => p.lambda_s = v,
        "v" => p.v = v,
        "h_b" => p.h_b = v,
        "h_r" => p.h_r = v,
        "omega" => p.omega = v,
        "theta" => p.theta = v,
        "e_l" => p.e_l = v,
        "e_w" => p.e_w = v,
        "r_cell" => p.r_cell = v,
        "sigma" => p.sigma = v,
        "p_t" => p.p_t = v,
        "n_0" => p.n_0 = v,
        "beta_0" => p.beta_0 = v,
        "alpha" => p.alpha = v,
        "gamma_0" => p.gamma_0 = v,
        "p_th" => p.p_th = v,
        _ => unreachable!("unmapped field {field}"),
    }
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| cfg_err(path, "expected an object"))
}

fn number(v: &Value, path: &str) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| cfg_err(path, "expected a finite number"))
}

fn string<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| cfg_err(path, "expected a string"))
}

fn unsigned(v: &Value, path: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| cfg_err(path, "expected a non-negative integer"))
}

fn reject_unknown(m: &Map<String, Value>, section: &str, known: &[&str]) -> Result<()> {
    for k in m.keys() {
        if !known.contains(&k.as_str()) {
            return Err(cfg_err(format!("{section}.{k}"), "unknown key"));
        }
    }
    Ok(())
}

fn parse_scenario(v: &Value) -> Result<ScenarioParams> {
    let m = object(v, "scenario")?;
    let mut p = ScenarioParams::default();
    for (k, val) in m {
        let path = format!("scenario.{k}");
        let Some((_, _, field, unit)) = SCENARIO_KEYS.iter().find(|e| e.0 == k) else {
            let hint = SCENARIO_KEYS
                .iter()
                .find(|e| k == e.1 || (k.starts_with(e.1) && k[e.1.len()..].starts_with('_')));
            return Err(match hint {
                Some(e) => cfg_err(path, format!("unit-suffix mismatch, expected `{}`", e.0)),
                None => cfg_err(path, "unknown key"),
            });
        };
        if *field == "k" {
            let n = unsigned(val, &path)?;
            p.k = usize::try_from(n).map_err(|_| cfg_err(&path, "too large"))?;
            continue;
        }
        let x = number(val, &path)?;
        let x = match unit {
            Unit::Plain => x,
            Unit::Db => db_to_linear(x),
            Unit::Dbm => dbm_to_watts(x),
        };
        set_field(&mut p, field, x);
    }
    p.validate().map_err(|e| match e {
        Error::InvalidParameter { field, reason } => {
            let key = SCENARIO_KEYS.iter().find(|e| e.2 == field).map(|e| e.0).unwrap_or("?");
            cfg_err(format!("scenario.{key}"), reason)
        }
        other => other,
    })?;
    Ok(p)
}

fn parse_placement(v: &Value, p: &ScenarioParams) -> Result<PlacementSpec> {
    let m = object(v, "placement")?;
    let kind = string(m.get("kind").ok_or_else(|| cfg_err("placement.kind", "missing"))?, "placement.kind")?;
    let num = |k: &str| -> Result<f64> {
        let path = format!("placement.{k}");
        number(m.get(k).ok_or_else(|| cfg_err(&path, "missing"))?, &path)
    };
    let spec = match kind {
        "ppp" => {
            reject_unknown(m, "placement", &["kind", "mu_h_m"])?;
            PlacementSpec::Ppp { mu_h: num("mu_h_m")? }
        }
        "ring" => {
            reject_unknown(m, "placement", &["kind", "r_in_m", "r_out_m", "mu_h_m"])?;
            PlacementSpec::Ring {
                r_in: num("r_in_m")?,
                r_out: num("r_out_m")?,
                mu_h: num("mu_h_m")?,
            }
        }
        "fixed" => {
            reject_unknown(m, "placement", &["kind", "uavs_m"])?;
            let list = m
                .get("uavs_m")
                .and_then(Value::as_array)
                .ok_or_else(|| cfg_err("placement.uavs_m", "expected a list of [x, y, h]"))?;
            let mut uavs = Vec::with_capacity(list.len());
            for (i, u) in list.iter().enumerate() {
                let path = format!("placement.uavs_m[{i}]");
                let a = u.as_array().filter(|a| a.len() == 3).ok_or_else(|| cfg_err(&path, "expected [x, y, h]"))?;
                uavs.push([number(&a[0], &path)?, number(&a[1], &path)?, number(&a[2], &path)?]);
            }
            PlacementSpec::Fixed { uavs }
        }
        other => return Err(cfg_err("placement.kind", format!("unknown kind `{other}` (ppp, ring, fixed)"))),
    };
    spec.validate(p).map_err(|e| cfg_err("placement", e.to_string()))?;
    Ok(spec)
}

fn parse_sweep(v: &Value) -> Result<SweepSpec> {
    let m = object(v, "sweep")?;
    reject_unknown(m, "sweep", &["variable", "grid", "metrics", "mode", "series"])?;
    let mut s = SweepSpec::default();
    if let Some(v) = m.get("variable") {
        s.variable = string(v, "sweep.variable")?
            .parse::<SweepVariable>()
            .map_err(|e| cfg_err("sweep.variable", e.to_string()))?;
    }
    if let Some(v) = m.get("grid") {
        let a = v.as_array().ok_or_else(|| cfg_err("sweep.grid", "expected a list of numbers"))?;
        s.grid = a
            .iter()
            .enumerate()
            .map(|(i, x)| number(x, &format!("sweep.grid[{i}]")))
            .collect::<Result<_>>()?;
    }
    if let Some(v) = m.get("metrics") {
        let a = v.as_array().ok_or_else(|| cfg_err("sweep.metrics", "expected a list of names"))?;
        s.metrics = a
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let path = format!("sweep.metrics[{i}]");
                string(x, &path)?.parse::<SweepMetric>().map_err(|e| cfg_err(&path, e.to_string()))
            })
            .collect::<Result<_>>()?;
    }
    if let Some(v) = m.get("mode") {
        s.mode = string(v, "sweep.mode")?.parse::<Mode>().map_err(|e| cfg_err("sweep.mode", e.to_string()))?;
    }
    if let Some(v) = m.get("series") {
        s.series = Some(string(v, "sweep.series")?.to_string());
    }
    Ok(s)
}

fn parse_simulation(v: &Value) -> Result<EstimateOptions> {
    let m = object(v, "simulation")?;
    reject_unknown(
        m,
        "simulation",
        &["n_trials", "seed", "availability", "phi_mode", "horizon_s", "blocker_width_m", "dt_s", "leg_max_s"],
    )?;
    let mut o = EstimateOptions::default();
    if let Some(v) = m.get("n_trials") {
        o.n_trials = unsigned(v, "simulation.n_trials")?;
    }
    if let Some(v) = m.get("seed") {
        o.seed = unsigned(v, "simulation.seed")?;
    }
    if let Some(v) = m.get("availability") {
        o.availability = match string(v, "simulation.availability")? {
            "draws" => AvailabilityBackend::Draws,
            "geometric" => AvailabilityBackend::Geometric,
            other => return Err(cfg_err("simulation.availability", format!("unknown backend `{other}` (draws, geometric)"))),
        };
    }
    let horizon = m.get("horizon_s").map(|v| number(v, "simulation.horizon_s")).transpose()?;
    if let Some(v) = m.get("phi_mode") {
        o.phi_mode = match string(v, "simulation.phi_mode")? {
            "at_jitter" => PhiMode::AtJitter,
            "time_fraction" => PhiMode::TimeFraction {
                horizon: horizon.unwrap_or(1000.0),
            },
            other => return Err(cfg_err("simulation.phi_mode", format!("unknown mode `{other}` (at_jitter, time_fraction)"))),
        };
    }
    if let Some(v) = m.get("blocker_width_m") {
        o.sim.blocker_width = number(v, "simulation.blocker_width_m")?;
    }
    if let Some(v) = m.get("dt_s") {
        o.sim.dt = number(v, "simulation.dt_s")?;
    }
    if let Some(v) = m.get("leg_max_s") {
        o.sim.leg_max = number(v, "simulation.leg_max_s")?;
    }
    Ok(o)
}

/// Parses a configuration document.
pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let root: Value = serde_json::from_str(text).map_err(|e| cfg_err("$", e.to_string()))?;
    let m = object(&root, "$")?;
    reject_unknown(m, "$", &["scenario", "placement", "sweep", "simulation"])?;
    let mut cfg = RunConfig::default();
    if let Some(v) = m.get("scenario") {
        cfg.params = parse_scenario(v)?;
    }
    if let Some(v) = m.get("placement") {
        cfg.placement = parse_placement(v, &cfg.params)?;
    }
    if let Some(v) = m.get("sweep") {
        cfg.sweep = parse_sweep(v)?;
    }
    if let Some(v) = m.get("simulation") {
        cfg.estimate = parse_simulation(v)?;
    }
    Ok(cfg)
}

pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| cfg_err(path.display().to_string(), e.to_string()))?;
    parse_config_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_default_scenario() {
        let c = parse_config_str("{}").unwrap();
        assert_eq!(c.params, ScenarioParams::default());
    }

    #[test]
    fn converts_decibel_keys() {
        let c = parse_config_str(r#"{"scenario": {"P_t_dBm": 30, "gamma_0_dB": 10, "N_0_dBm": -100}}"#).unwrap();
        assert!((c.params.p_t - 1.0).abs() < 1e-15);
        assert!((c.params.gamma_0 - 10.0).abs() < 1e-12);
        assert!((c.params.n_0 - 1e-13).abs() < 1e-27);
    }

    #[test]
    fn unit_suffix_mismatch_names_expected_key() {
        let e = parse_config_str(r#"{"scenario": {"P_t_W": 0.1}}"#).unwrap_err();
        match e {
            Error::Config { path, reason } => {
                assert_eq!(path, "scenario.P_t_W");
                assert!(reason.contains("P_t_dBm"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_and_invalid_keys() {
        assert!(matches!(parse_config_str(r#"{"extra": 1}"#), Err(Error::Config { .. })));
        let e = parse_config_str(r#"{"scenario": {"omega_per_s": -1}}"#).unwrap_err();
        assert!(matches!(e, Error::Config { ref path, .. } if path == "scenario.omega_per_s"));
        let e = parse_config_str(r#"{"sweep": {"metrics": ["bogus"]}}"#).unwrap_err();
        assert!(matches!(e, Error::Config { ref path, .. } if path == "sweep.metrics[0]"));
    }

    #[test]
    fn placement_kinds() {
        let c = parse_config_str(r#"{"placement": {"kind": "ring", "r_in_m": 10, "r_out_m": 15, "mu_h_m": 25}}"#).unwrap();
        assert_eq!(c.placement, PlacementSpec::Ring { r_in: 10.0, r_out: 15.0, mu_h: 25.0 });
        let c = parse_config_str(r#"{"placement": {"kind": "fixed", "uavs_m": [[1, 2, 30]]}}"#).unwrap();
        assert_eq!(c.placement, PlacementSpec::Fixed { uavs: vec![[1.0, 2.0, 30.0]] });
        assert!(parse_config_str(r#"{"placement": {"kind": "fixed", "uavs_m": [[1, 2, 1]]}}"#).is_err());
    }
}
