//! Scenario parameters shared by every model.
//!
//! All quantities are SI: metres, seconds, watts, per-square-metre
//! densities. Decibel inputs are converted once at the boundary (see
//! [`db_to_linear`] and [`dbm_to_watts`]).

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    /// UAV density (per m^2).
    pub lambda_t: f64,
    /// Human blocker density (per m^2).
    pub lambda_b: f64,
    /// Building density (per m^2).
    pub lambda_s: f64,
    /// Blocker speed (m/s).
    pub v: f64,
    pub h_b: f64,
    pub h_r: f64,
    /// Blockage departure rate (1/s).
    pub omega: f64,
    /// Self-blockage sector angle (rad).
    pub theta: f64,
    /// Mean building length and width (m).
    pub e_l: f64,
    pub e_w: f64,
    /// Cell radius (m).
    pub r_cell: f64,
    /// Per-axis hovering jitter std (m).
    pub sigma: f64,
    /// Transmit power (W).
    pub p_t: f64,
    /// Noise power (W).
    pub n_0: f64,
    pub beta_0: f64,
    pub alpha: f64,
    /// SNR threshold (linear).
    pub gamma_0: f64,
    /// Maximum tolerated blockage probability.
    pub p_th: f64,
    /// Truncation of the Poisson sum over available UAVs.
    pub k: usize,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams {
            lambda_t: 1e-4,
            lambda_b: 0.01,
            lambda_s: 1e-4,
            v: 1.0,
            h_b: 1.8,
            h_r: 1.4,
            omega: 2.0,
            theta: PI / 3.0,
            e_l: 10.0,
            e_w: 10.0,
            r_cell: 100.0,
            sigma: 0.2,
            p_t: dbm_to_watts(20.0),
            n_0: dbm_to_watts(-110.0),
            beta_0: 7e-5,
            alpha: 2.0,
            gamma_0: db_to_linear(3.0),
            p_th: 1e-3,
            k: 6,
        }
    }
}

fn check(field: &str, ok: bool, reason: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            field: field.to_string(),
            reason: reason.to_string(),
        })
    }
}

impl ScenarioParams {
    /// Checks every field against its admissible range.
    pub fn validate(&self) -> Result<()> {
        let nonneg = |x: f64| x.is_finite() && x >= 0.0;
        let pos = |x: f64| x.is_finite() && x > 0.0;
        check("lambda_t", nonneg(self.lambda_t), "must be finite and >= 0")?;
        check("lambda_b", nonneg(self.lambda_b), "must be finite and >= 0")?;
        check("lambda_s", nonneg(self.lambda_s), "must be finite and >= 0")?;
        check("v", nonneg(self.v), "must be finite and >= 0")?;
        check("h_r", nonneg(self.h_r), "must be finite and >= 0")?;
        check("h_b", self.h_b.is_finite() && self.h_b >= self.h_r, "must be >= h_r")?;
        check("omega", pos(self.omega), "must be > 0")?;
        check(
            "theta",
            self.theta.is_finite() && (0.0..=2.0 * PI).contains(&self.theta),
            "must lie in [0, 2pi]",
        )?;
        check("e_l", nonneg(self.e_l), "must be finite and >= 0")?;
        check("e_w", nonneg(self.e_w), "must be finite and >= 0")?;
        check("r_cell", pos(self.r_cell), "must be > 0")?;
        check("sigma", nonneg(self.sigma), "must be finite and >= 0")?;
        check("p_t", pos(self.p_t), "must be > 0")?;
        check("n_0", pos(self.n_0), "must be > 0")?;
        check("beta_0", pos(self.beta_0), "must be > 0")?;
        check("alpha", pos(self.alpha), "must be > 0")?;
        check("gamma_0", pos(self.gamma_0), "must be > 0")?;
        check(
            "p_th",
            self.p_th.is_finite() && (0.0..=1.0).contains(&self.p_th),
            "must lie in [0, 1]",
        )?;
        check("k", self.k >= 1, "must be >= 1")?;
        Ok(())
    }

    /// Mean number of UAVs in the cell.
    pub fn mean_uav_count(&self) -> f64 {
        self.lambda_t * PI * self.r_cell * self.r_cell
    }

    /// Mean number of blockers in the cell.
    pub fn mean_blocker_count(&self) -> f64 {
        self.lambda_b * PI * self.r_cell * self.r_cell
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_defaults_convert_units() {
        let p = ScenarioParams::default();
        assert!((p.p_t - 0.1).abs() < 1e-15);
        assert!((p.n_0 - 1e-14).abs() < 1e-28);
        assert!((p.gamma_0 - 10f64.powf(0.3)).abs() < 1e-15);
        p.validate().unwrap();
    }

    #[test]
    fn db_round_trip() {
        for db in [-110.0, -3.0, 0.0, 3.0, 20.0] {
            assert!((linear_to_db(db_to_linear(db)) - db).abs() < 1e-12);
            assert!((watts_to_dbm(dbm_to_watts(db)) - db).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_fields() {
        let p = ScenarioParams { omega: 0.0, ..Default::default() };
        assert!(matches!(p.validate(), Err(Error::InvalidParameter { .. })));
        let p = ScenarioParams { h_b: 1.0, ..Default::default() };
        assert!(p.validate().is_err());
        let p = ScenarioParams { k: 0, ..Default::default() };
        assert!(p.validate().is_err());
    }
}
