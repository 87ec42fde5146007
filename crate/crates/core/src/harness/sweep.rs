//! Parameter sweeps over analytic and simulated metrics.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use super::config::RunConfig;
use crate::availability::{p_available_approx, p_available_exact};
use crate::blockage::{phi_moments, psi_distribution};
use crate::error::{Error, Result};
use crate::qos::{cov_multi, cov_single, rel_multi, rel_single, QosValue};
use crate::scenario::{db_to_linear, ScenarioParams};
use crate::simcore::{estimate_metric, EstimateOptions, Metric, PlacementSpec, TrialEstimate};

/// Swept quantity. Grid values use the unit of the matching config key
/// (metres, per square metre, radians, dB).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepVariable {
    Sigma,
    LambdaB,
    LambdaS,
    MuR,
    MuRMin,
    MuH,
    Theta,
    PTh,
    Gamma0,
}

impl SweepVariable {
    pub const ALL: [SweepVariable; 9] = [
        SweepVariable::Sigma,
        SweepVariable::LambdaB,
        SweepVariable::LambdaS,
        SweepVariable::MuR,
        SweepVariable::MuRMin,
        SweepVariable::MuH,
        SweepVariable::Theta,
        SweepVariable::PTh,
        SweepVariable::Gamma0,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SweepVariable::Sigma => "sigma",
            SweepVariable::LambdaB => "lambda_B",
            SweepVariable::LambdaS => "lambda_S",
            SweepVariable::MuR => "mu_r",
            SweepVariable::MuRMin => "mu_r_min",
            SweepVariable::MuH => "mu_h",
            SweepVariable::Theta => "theta",
            SweepVariable::PTh => "p_th",
            SweepVariable::Gamma0 => "gamma_0",
        }
    }

    /// The unit-suffixed spelling, also accepted by the parser.
    pub fn key(&self) -> &'static str {
        match self {
            SweepVariable::Sigma => "sigma_m",
            SweepVariable::LambdaB => "lambda_B_per_m2",
            SweepVariable::LambdaS => "lambda_S_per_m2",
            SweepVariable::MuR => "mu_r_m",
            SweepVariable::MuRMin => "mu_r_min_m",
            SweepVariable::MuH => "mu_h_m",
            SweepVariable::Theta => "theta_rad",
            SweepVariable::PTh => "p_th",
            SweepVariable::Gamma0 => "gamma_0_dB",
        }
    }

    /// Scenario and placement with this variable set to `value`.
    pub fn apply(&self, value: f64, p: &ScenarioParams, spec: &PlacementSpec) -> Result<(ScenarioParams, PlacementSpec)> {
        let mut p = p.clone();
        let mut spec = spec.clone();
        match self {
            SweepVariable::Sigma => p.sigma = value,
            SweepVariable::LambdaB => p.lambda_b = value,
            SweepVariable::LambdaS => p.lambda_s = value,
            SweepVariable::Theta => p.theta = value,
            SweepVariable::PTh => p.p_th = value,
            SweepVariable::Gamma0 => p.gamma_0 = db_to_linear(value),
            SweepVariable::MuR => match &mut spec {
                PlacementSpec::Fixed { uavs } => {
                    for u in uavs.iter_mut() {
                        let r = u[0].hypot(u[1]);
                        let (c, s) = if r > 0.0 { (u[0] / r, u[1] / r) } else { (1.0, 0.0) };
                        u[0] = value * c;
                        u[1] = value * s;
                    }
                }
                _ => return Err(Error::InvalidParameter {
                    field: "sweep.variable".into(),
                    reason: "mu_r needs a fixed placement".into(),
                }),
            },
            SweepVariable::MuRMin => match &mut spec {
                PlacementSpec::Ring { r_in, r_out, .. } => {
                    let width = *r_out - *r_in;
                    *r_in = value;
                    *r_out = value + width;
                }
                _ => return Err(Error::InvalidParameter {
                    field: "sweep.variable".into(),
                    reason: "mu_r_min needs a ring placement".into(),
                }),
            },
            SweepVariable::MuH => match &mut spec {
                PlacementSpec::Ppp { mu_h } | PlacementSpec::Ring { mu_h, .. } => *mu_h = value,
                PlacementSpec::Fixed { uavs } => uavs.iter_mut().for_each(|u| u[2] = value),
            },
        }
        p.validate()?;
        spec.validate(&p)?;
        Ok((p, spec))
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepVariable::ALL
            .into_iter()
            .find(|v| v.name() == s || v.key() == s)
            .ok_or_else(|| Error::InvalidParameter {
                field: "variable".into(),
                reason: format!("unknown sweep variable `{s}`"),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMetric {
    RelSingle,
    RelMulti,
    CovSingle,
    CovMulti,
    PAvailable,
    PAvailableApprox,
    PhiMean,
    PhiVar,
    PsiMean,
    PsiVar,
}

impl SweepMetric {
    pub const ALL: [SweepMetric; 10] = [
        SweepMetric::RelSingle,
        SweepMetric::RelMulti,
        SweepMetric::CovSingle,
        SweepMetric::CovMulti,
        SweepMetric::PAvailable,
        SweepMetric::PAvailableApprox,
        SweepMetric::PhiMean,
        SweepMetric::PhiVar,
        SweepMetric::PsiMean,
        SweepMetric::PsiVar,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SweepMetric::RelSingle => "rel_single",
            SweepMetric::RelMulti => "rel_multi",
            SweepMetric::CovSingle => "cov_single",
            SweepMetric::CovMulti => "cov_multi",
            SweepMetric::PAvailable => "p_available",
            SweepMetric::PAvailableApprox => "p_available_approx",
            SweepMetric::PhiMean => "phi_mean",
            SweepMetric::PhiVar => "phi_var",
            SweepMetric::PsiMean => "psi_mean",
            SweepMetric::PsiVar => "psi_var",
        }
    }

    /// Monte Carlo estimator backing this metric.
    pub fn estimator(&self) -> Metric {
        match self {
            SweepMetric::RelSingle => Metric::RelSingle,
            SweepMetric::RelMulti => Metric::RelMulti,
            SweepMetric::CovSingle => Metric::CovSingle,
            SweepMetric::CovMulti => Metric::CovMulti,
            SweepMetric::PAvailable | SweepMetric::PAvailableApprox => Metric::PAvailable,
            SweepMetric::PhiMean | SweepMetric::PhiVar => Metric::Phi,
            SweepMetric::PsiMean | SweepMetric::PsiVar => Metric::PsiTilde,
        }
    }

    /// Analytic value and, for the multi-UAV metrics, its bounds.
    pub fn analytic(&self, p: &ScenarioParams, spec: &PlacementSpec) -> Result<QosValue> {
        let placements = spec.analytic_placements(p)?;
        let first = *placements.first().ok_or(Error::EmptyPlacements)?;
        let plain = |value| QosValue {
            value,
            lower_bound: None,
            upper_bound: None,
        };
        Ok(match self {
            SweepMetric::RelSingle => plain(rel_single(&first, p)?),
            SweepMetric::CovSingle => plain(cov_single(&first, p)?),
            SweepMetric::RelMulti => rel_multi(&placements, p)?,
            SweepMetric::CovMulti => cov_multi(&placements, p)?,
            SweepMetric::PAvailable => plain(p_available_exact(p)),
            SweepMetric::PAvailableApprox => plain(p_available_approx(p)),
            SweepMetric::PhiMean => plain(phi_moments(first.mu_r, first.mu_h, p)?.mu_phi),
            SweepMetric::PhiVar => plain(phi_moments(first.mu_r, first.mu_h, p)?.var_phi),
            SweepMetric::PsiMean => plain(psi_distribution(first.mu_r, p)?.mu_psi_tilde),
            SweepMetric::PsiVar => plain(psi_distribution(first.mu_r, p)?.var_psi_tilde),
        })
    }

    /// Empirical value and 95% half-width from a Monte Carlo estimate.
    pub fn empirical(&self, e: &TrialEstimate) -> (f64, f64) {
        match self {
            SweepMetric::PhiVar | SweepMetric::PsiVar => {
                // Normal-theory interval for a sample variance.
                let n = e.n_trials.max(2) as f64;
                (e.variance, 1.96 * e.variance * (2.0 / (n - 1.0)).sqrt())
            }
            _ => (e.mean, e.half_width_95),
        }
    }

    fn is_indicator(&self) -> bool {
        !matches!(
            self,
            SweepMetric::PhiMean | SweepMetric::PhiVar | SweepMetric::PsiMean | SweepMetric::PsiVar
        )
    }

    /// Whether an analytic value agrees with a simulated one.
    ///
    /// Always accepted inside a 99.9% interval widened by half a trial:
    /// a Wilson score interval for indicator metrics, the scaled normal
    /// interval otherwise. Metrics whose analytic form is itself an
    /// approximation of the simulated quantity also get a fixed tolerance.
    pub fn agrees(&self, analytic: f64, mean: f64, half_width: f64, n_trials: u64) -> bool {
        let diff = (analytic - mean).abs();
        let n = n_trials.max(1) as f64;
        let slack = 0.5 / n;
        let inside = if self.is_indicator() {
            let (lo, hi) = wilson_interval(mean, n, AGREE_Z);
            analytic >= lo - slack && analytic <= hi + slack
        } else {
            diff <= half_width * AGREE_Z / 1.96 + slack
        };
        if inside {
            return true;
        }
        match self {
            SweepMetric::RelMulti | SweepMetric::CovMulti => diff <= 0.02,
            SweepMetric::PAvailable | SweepMetric::PAvailableApprox => diff <= 0.01,
            SweepMetric::PhiMean | SweepMetric::PsiMean => diff <= 0.01 * analytic.abs(),
            SweepMetric::PhiVar | SweepMetric::PsiVar => diff <= 0.05 * analytic.abs(),
            SweepMetric::RelSingle | SweepMetric::CovSingle => false,
        }
    }
}

/// Two-sided normal quantile used by the agreement check (99.9%).
const AGREE_Z: f64 = 3.2905;

/// Wilson score interval for a binomial proportion `p` out of `n` trials.
fn wilson_interval(p: f64, n: f64, z: f64) -> (f64, f64) {
    let z2 = z * z / n;
    let centre = (p + 0.5 * z2) / (1.0 + z2);
    let half = z / (1.0 + z2) * (p * (1.0 - p) / n + 0.25 * z2 / n).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

impl fmt::Display for SweepMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepMetric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownMetric(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Analytic,
    Simulate,
    Both,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Analytic => "analytic",
            Mode::Simulate => "simulate",
            Mode::Both => "both",
        }
    }

    fn analytic(&self) -> bool {
        matches!(self, Mode::Analytic | Mode::Both)
    }

    fn simulate(&self) -> bool {
        matches!(self, Mode::Simulate | Mode::Both)
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Mode::Analytic),
            "simulate" => Ok(Mode::Simulate),
            "both" => Ok(Mode::Both),
            _ => Err(Error::InvalidParameter {
                field: "mode".into(),
                reason: format!("unknown mode `{s}` (analytic, simulate, both)"),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub grid: Vec<f64>,
    pub metrics: Vec<SweepMetric>,
    pub mode: Mode,
    /// Appended to metric names as `metric@series`.
    pub series: Option<String>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            variable: SweepVariable::Sigma,
            grid: (0..=10).map(|i| i as f64 * 0.02).collect(),
            metrics: vec![SweepMetric::RelSingle],
            mode: Mode::Analytic,
            series: None,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |reason: &str| Error::InvalidParameter {
            field: "sweep".into(),
            reason: reason.into(),
        };
        if self.grid.is_empty() {
            return Err(bad("grid is empty"));
        }
        if self.grid.iter().any(|x| !x.is_finite()) {
            return Err(bad("grid has a non-finite value"));
        }
        if self.grid.windows(2).any(|w| w[1] < w[0]) {
            return Err(bad("grid is not sorted"));
        }
        if self.metrics.is_empty() {
            return Err(bad("no metrics"));
        }
        Ok(())
    }
}

/// One output row. Analytic rows have no half-width; simulated rows
/// have no bounds. `agrees` is set on both rows of a compared pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub variable: String,
    pub value: f64,
    pub metric: String,
    pub mode: String,
    pub estimate: f64,
    pub ci_half_width: Option<f64>,
    pub lower_bound: Option<f64>,
    pub upper_bound: Option<f64>,
    pub agrees: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn extend(&mut self, other: SweepResult) {
        self.rows.extend(other.rows);
    }

    /// Rows whose agreement check failed.
    pub fn disagreements(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.agrees == Some(false))
    }

    pub fn all_agree(&self) -> bool {
        self.disagreements().next().is_none()
    }

    /// Estimates of `metric` in `mode`, in grid order.
    pub fn column(&self, metric: &str, mode: &str) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.metric == metric && r.mode == mode)
            .map(|r| (r.value, r.estimate))
            .collect()
    }
}

/// Evaluates every metric of `spec` at every grid point. Simulations at
/// each grid point reuse the configured seed.
pub fn run_sweep(spec: &SweepSpec, p: &ScenarioParams, placement: &PlacementSpec, opts: &EstimateOptions) -> Result<SweepResult> {
    spec.validate()?;
    let mut rows = Vec::new();
    for &x in &spec.grid {
        let (pp, pl) = spec.variable.apply(x, p, placement)?;
        for metric in &spec.metrics {
            let name = match &spec.series {
                Some(s) => format!("{}@{s}", metric.name()),
                None => metric.name().to_string(),
            };
            let row = |mode: Mode, estimate: f64| SweepRow {
                variable: spec.variable.name().to_string(),
                value: x,
                metric: name.clone(),
                mode: mode.name().to_string(),
                estimate,
                ci_half_width: None,
                lower_bound: None,
                upper_bound: None,
                agrees: None,
            };
            let analytic = if spec.mode.analytic() {
                let q = metric.analytic(&pp, &pl)?;
                let mut r = row(Mode::Analytic, q.value);
                r.lower_bound = q.lower_bound;
                r.upper_bound = q.upper_bound;
                Some(r)
            } else {
                None
            };
            let simulated = if spec.mode.simulate() {
                let e = estimate_metric(metric.estimator(), &pp, &pl, opts)?;
                let (mean, hw) = metric.empirical(&e);
                let mut r = row(Mode::Simulate, mean);
                r.ci_half_width = Some(hw);
                Some((r, e.n_trials))
            } else {
                None
            };
            match (analytic, simulated) {
                (Some(mut a), Some((mut s, n))) => {
                    let ok = metric.agrees(a.estimate, s.estimate, s.ci_half_width.unwrap_or(0.0), n);
                    a.agrees = Some(ok);
                    s.agrees = Some(ok);
                    rows.push(a);
                    rows.push(s);
                }
                (Some(a), None) => rows.push(a),
                (None, Some((s, _))) => rows.push(s),
                (None, None) => {}
            }
        }
    }
    Ok(SweepResult { rows })
}

/// Runs the sweep described by a parsed configuration.
pub fn run_config(cfg: &RunConfig) -> Result<SweepResult> {
    run_sweep(&cfg.sweep, &cfg.params, &cfg.placement, &cfg.estimate)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_handles_empty_and_full_counts() {
        let (lo, hi) = wilson_interval(0.0, 20_000.0, AGREE_Z);
        assert_eq!(lo, 0.0);
        assert!(hi > 5e-4 && hi < 6e-4, "{hi}");
        let (lo, hi) = wilson_interval(1.0, 100.0, AGREE_Z);
        assert!(lo > 0.85 && hi == 1.0);
        assert!(SweepMetric::RelSingle.agrees(1e-5, 0.0, 0.0, 20_000));
        assert!(!SweepMetric::RelSingle.agrees(1e-3, 0.0, 0.0, 20_000));
    }

    #[test]
    fn names_round_trip() {
        for v in SweepVariable::ALL {
            assert_eq!(v.name().parse::<SweepVariable>().unwrap(), v);
            assert_eq!(v.key().parse::<SweepVariable>().unwrap(), v);
        }
        for m in SweepMetric::ALL {
            assert_eq!(m.name().parse::<SweepMetric>().unwrap(), m);
        }
    }

    #[test]
    fn single_point_grid_gives_single_row() {
        let spec = SweepSpec {
            grid: vec![0.1],
            ..Default::default()
        };
        let r = run_sweep(&spec, &ScenarioParams::default(), &PlacementSpec::single(10.0, 25.0), &EstimateOptions::default()).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.rows[0].variable, "sigma");
        assert!(r.rows[0].agrees.is_none());
    }

    #[test]
    fn rejects_unsorted_grid_and_wrong_placement() {
        let p = ScenarioParams::default();
        let pl = PlacementSpec::single(10.0, 25.0);
        let spec = SweepSpec {
            grid: vec![0.2, 0.1],
            ..Default::default()
        };
        assert!(run_sweep(&spec, &p, &pl, &EstimateOptions::default()).is_err());
        assert!(SweepVariable::MuRMin.apply(5.0, &p, &pl).is_err());
        let ring = PlacementSpec::Ring { r_in: 10.0, r_out: 15.0, mu_h: 25.0 };
        let (_, moved) = SweepVariable::MuRMin.apply(20.0, &p, &ring).unwrap();
        assert_eq!(moved, PlacementSpec::Ring { r_in: 20.0, r_out: 25.0, mu_h: 25.0 });
    }

    #[test]
    fn both_mode_pairs_rows_with_agreement() {
        let spec = SweepSpec {
            grid: vec![0.0, 0.2],
            mode: Mode::Both,
            series: Some("lambda_B=0.01".into()),
            ..Default::default()
        };
        let opts = EstimateOptions { n_trials: 20_000, seed: 1, ..Default::default() };
        let r = run_sweep(&spec, &ScenarioParams::default(), &PlacementSpec::single(10.0, 25.0), &opts).unwrap();
        assert_eq!(r.rows.len(), 4);
        assert_eq!(r.rows[0].metric, "rel_single@lambda_B=0.01");
        assert_eq!(r.rows[1].mode, "simulate");
        assert!(r.all_agree(), "{:?}", r.rows);
    }
}
