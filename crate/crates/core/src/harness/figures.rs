//! Canned sweeps for the evaluation figures, one bundle per figure ID.

use serde::Serialize;
use std::f64::consts::PI;
use std::path::Path;

use super::config::RunConfig;
use super::emit::{emit, Format, SCHEMA_VERSION};
use super::sweep::{run_config, Mode, SweepMetric, SweepResult, SweepSpec, SweepVariable};
use crate::error::{Error, Result};
use crate::qos::{calibrate_beta0, tau_threshold_distance, UavPlacement};
use crate::scenario::ScenarioParams;
use crate::simcore::{EstimateOptions, PlacementSpec};

pub const FIGURE_IDS: [&str; 9] = ["fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11"];

/// Threshold distance sits this far beyond the mean link distance at the
/// reference placement of a calibrated coverage figure.
pub const CALIBRATION_MARGIN_M: f64 = 0.25;

const BLOCKER_DENSITIES: [f64; 2] = [0.01, 0.02];

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    pub beta_0: f64,
    pub reference_mu_r_m: f64,
    pub reference_mu_h_m: f64,
    pub reference_lambda_B_per_m2: f64,
    pub margin_m: f64,
    pub label: String,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub config: RunConfig,
}

#[derive(Debug, Clone)]
pub struct Figure {
    pub id: &'static str,
    pub title: &'static str,
    pub x_label: &'static str,
    pub series: Vec<Series>,
    pub calibration: Option<Calibration>,
}

#[allow(non_snake_case)]
#[derive(Serialize)]
struct SeriesMeta<'a> {
    label: &'a str,
    metrics: Vec<String>,
    placement: &'a PlacementSpec,
    lambda_B_per_m2: f64,
    lambda_S_per_m2: f64,
    theta_rad: f64,
    sigma_m: f64,
    p_th: f64,
    beta_0: f64,
}

#[derive(Serialize)]
struct FigureMeta<'a> {
    id: &'a str,
    file: String,
    title: &'a str,
    variable: &'a str,
    x_label: &'a str,
    grid: &'a [f64],
    series: Vec<SeriesMeta<'a>>,
    calibration: Option<&'a Calibration>,
}

#[derive(Serialize)]
struct BundleMeta<'a> {
    schema_version: u32,
    mode: &'a str,
    n_trials: u64,
    seed: u64,
    figures: Vec<FigureMeta<'a>>,
}

fn grid(start: f64, stop: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| start + (stop - start) * i as f64 / (n - 1) as f64).collect()
}

fn sigma_grid() -> Vec<f64> {
    grid(0.0, 0.2, 21)
}

fn base(placement: PlacementSpec) -> RunConfig {
    RunConfig {
        placement,
        ..Default::default()
    }
}

fn sweep(variable: SweepVariable, grid: Vec<f64>, metrics: &[SweepMetric]) -> SweepSpec {
    SweepSpec {
        variable,
        grid,
        metrics: metrics.to_vec(),
        mode: Mode::Analytic,
        series: None,
    }
}

// One series per blocker density.
fn density_series(cfg: &RunConfig) -> Vec<Series> {
    BLOCKER_DENSITIES
        .iter()
        .map(|&lb| {
            let label = format!("lambda_B={lb}");
            let mut c = cfg.clone();
            c.params.lambda_b = lb;
            c.sweep.series = Some(label.clone());
            Series { label, config: c }
        })
        .collect()
}

/// Height maximising the ratio of threshold distance to link distance
/// at horizontal distance `mu_r`, by golden-section search.
pub fn best_coverage_height(mu_r: f64, p: &ScenarioParams) -> f64 {
    let score = |h: f64| {
        let pl = UavPlacement::new(mu_r, h);
        tau_threshold_distance(&pl, p).map(|t| t / pl.distance(p)).unwrap_or(0.0)
    };
    let (mut lo, mut hi) = (p.h_b + 1e-9, 200.0);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (score(a), score(b));
    while hi - lo > 1e-9 {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = score(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = score(a);
        }
    }
    0.5 * (lo + hi)
}

// Calibrates at (mu_r, mu_h), or at the best coverage height when
// `mu_h` is `None`.
fn calibrate(mu_r: f64, mu_h: Option<f64>) -> Calibration {
    let p = ScenarioParams {
        lambda_b: BLOCKER_DENSITIES[0],
        ..Default::default()
    };
    let mu_h = mu_h.unwrap_or_else(|| best_coverage_height(mu_r, &p));
    let beta_0 = calibrate_beta0(&UavPlacement::new(mu_r, mu_h), &p, CALIBRATION_MARGIN_M);
    Calibration {
        beta_0,
        reference_mu_r_m: mu_r,
        reference_mu_h_m: mu_h,
        reference_lambda_B_per_m2: p.lambda_b,
        margin_m: CALIBRATION_MARGIN_M,
        label: format!(
            "calibrated beta_0 = {beta_0:.6e}: threshold distance {CALIBRATION_MARGIN_M} m beyond the mean link distance at mu_r = {mu_r:.3} m, mu_h = {mu_h:.3} m, lambda_B = {} (the default beta_0 leaves coverage equal to availability)",
            p.lambda_b
        ),
    }
}

// Area-median radius of an annulus.
fn median_radius(r_in: f64, r_out: f64) -> f64 {
    (0.5 * (r_in * r_in + r_out * r_out)).sqrt()
}

fn calibrated(mut cfg: RunConfig, cal: &Calibration) -> RunConfig {
    cfg.params.beta_0 = cal.beta_0;
    cfg
}

/// The sweep definitions of figure `id`.
pub fn figure(id: &str) -> Result<Figure> {
    use SweepMetric as M;
    use SweepVariable as V;
    let single = |mu_r| base(PlacementSpec::single(mu_r, 25.0));
    let ring = |r_in: f64| {
        base(PlacementSpec::Ring {
            r_in,
            r_out: r_in + 5.0,
            mu_h: 25.0,
        })
    };
    let fig = match id {
        "fig3" => {
            let mut c = single(10.0);
            c.sweep = sweep(V::Sigma, sigma_grid(), &[M::RelSingle]);
            Figure {
                id: "fig3",
                title: "Single-UAV reliability versus position jitter",
                x_label: "sigma [m]",
                series: density_series(&c),
                calibration: None,
            }
        }
        "fig4" => {
            let series = [0.0, PI / 6.0, PI / 3.0]
                .iter()
                .zip(["theta=0", "theta=pi/6", "theta=pi/3"])
                .map(|(&theta, label)| {
                    let mut c = single(10.0);
                    c.params.theta = theta;
                    c.sweep = sweep(V::Sigma, sigma_grid(), &[M::PAvailable, M::PAvailableApprox]);
                    c.sweep.series = Some(label.to_string());
                    Series {
                        label: label.to_string(),
                        config: c,
                    }
                })
                .collect();
            Figure {
                id: "fig4",
                title: "UAV availability versus position jitter, exact and approximate",
                x_label: "sigma [m]",
                series,
                calibration: None,
            }
        }
        "fig5" => {
            let mut c = single(10.0);
            c.params.sigma = 0.2;
            c.sweep = sweep(V::MuR, grid(2.0, 40.0, 39), &[M::RelSingle]);
            Figure {
                id: "fig5",
                title: "Single-UAV reliability versus mean horizontal distance",
                x_label: "mu_r [m]",
                series: density_series(&c),
                calibration: None,
            }
        }
        "fig6" => {
            let mut c = ring(10.0);
            c.sweep = sweep(V::Sigma, sigma_grid(), &[M::RelMulti]);
            Figure {
                id: "fig6",
                title: "Multi-UAV reliability versus position jitter",
                x_label: "sigma [m]",
                series: density_series(&c),
                calibration: None,
            }
        }
        "fig7" => {
            let mut c = ring(10.0);
            c.params.sigma = 0.2;
            c.sweep = sweep(V::MuRMin, grid(2.0, 40.0, 39), &[M::RelMulti]);
            let mut series = density_series(&c);
            let mut open = c.clone();
            open.params.lambda_b = BLOCKER_DENSITIES[0];
            open.params.lambda_s = 0.0;
            let label = "lambda_B=0.01,lambda_S=0".to_string();
            open.sweep.series = Some(label.clone());
            series.push(Series { label, config: open });
            Figure {
                id: "fig7",
                title: "Multi-UAV reliability versus inner ring radius, with lower bound",
                x_label: "min mu_r [m]",
                series,
                calibration: None,
            }
        }
        "fig8" => {
            let cal = calibrate(50.0, Some(25.0));
            let mut c = calibrated(single(50.0), &cal);
            c.sweep = sweep(V::Sigma, sigma_grid(), &[M::CovSingle]);
            Figure {
                id: "fig8",
                title: "Single-UAV coverage versus position jitter",
                x_label: "sigma [m]",
                series: density_series(&c),
                calibration: Some(cal),
            }
        }
        "fig9" => {
            let cal = calibrate(55.0, None);
            let mut c = calibrated(single(55.0), &cal);
            c.params.sigma = 0.2;
            c.sweep = sweep(V::MuH, grid(2.0, 60.0, 59), &[M::CovSingle]);
            Figure {
                id: "fig9",
                title: "Single-UAV coverage versus mean UAV height",
                x_label: "mu_h [m]",
                series: density_series(&c),
                calibration: Some(cal),
            }
        }
        "fig10" => {
            let cal = calibrate(median_radius(45.0, 50.0), Some(25.0));
            let mut c = calibrated(ring(45.0), &cal);
            c.sweep = sweep(V::Sigma, sigma_grid(), &[M::CovMulti]);
            Figure {
                id: "fig10",
                title: "Multi-UAV coverage versus position jitter",
                x_label: "sigma [m]",
                series: density_series(&c),
                calibration: Some(cal),
            }
        }
        "fig11" => {
            let cal = calibrate(median_radius(55.0, 60.0), None);
            let mut c = calibrated(ring(55.0), &cal);
            c.params.sigma = 0.2;
            c.sweep = sweep(V::MuH, grid(2.0, 60.0, 59), &[M::CovMulti]);
            Figure {
                id: "fig11",
                title: "Multi-UAV coverage versus mean UAV height",
                x_label: "mu_h [m]",
                series: density_series(&c),
                calibration: Some(cal),
            }
        }
        other => {
            return Err(Error::InvalidParameter {
                field: "figure".into(),
                reason: format!("unknown figure `{other}` (fig3..fig11)"),
            })
        }
    };
    Ok(fig)
}

/// Runs every series of `fig` in `mode`, concatenated in series order.
pub fn run_figure(fig: &Figure, mode: Mode, opts: &EstimateOptions) -> Result<SweepResult> {
    let mut out = SweepResult::default();
    for s in &fig.series {
        let mut c = s.config.clone();
        c.sweep.mode = mode;
        c.estimate = *opts;
        out.extend(run_config(&c)?);
    }
    Ok(out)
}

/// Writes `<id>.csv` (or `.json`) for each requested figure and a
/// `figures.json` description of the bundle into `dir`.
pub fn write_bundle(dir: &Path, ids: &[&str], mode: Mode, opts: &EstimateOptions, format: Format) -> Result<SweepResult> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let figs = ids.iter().map(|id| figure(id)).collect::<Result<Vec<_>>>()?;
    let mut all = SweepResult::default();
    let mut metas = Vec::new();
    for fig in &figs {
        let res = run_figure(fig, mode, opts)?;
        let file = format!("{}.{ext}", fig.id);
        emit(&res, format, &dir.join(&file))?;
        all.extend(res);
        let first = &fig.series[0].config.sweep;
        metas.push(FigureMeta {
            id: fig.id,
            file,
            title: fig.title,
            variable: first.variable.name(),
            x_label: fig.x_label,
            grid: &first.grid,
            series: fig
                .series
                .iter()
                .map(|s| {
                    let p = &s.config.params;
                    SeriesMeta {
                        label: &s.label,
                        metrics: s
                            .config
                            .sweep
                            .metrics
                            .iter()
                            .map(|m| format!("{}@{}", m.name(), s.label))
                            .collect(),
                        placement: &s.config.placement,
                        lambda_B_per_m2: p.lambda_b,
                        lambda_S_per_m2: p.lambda_s,
                        theta_rad: p.theta,
                        sigma_m: p.sigma,
                        p_th: p.p_th,
                        beta_0: p.beta_0,
                    }
                })
                .collect(),
            calibration: fig.calibration.as_ref(),
        });
    }
    let meta = BundleMeta {
        schema_version: SCHEMA_VERSION,
        mode: mode.name(),
        n_trials: opts.n_trials,
        seed: opts.seed,
        figures: metas,
    };
    let text = serde_json::to_string_pretty(&meta).map_err(|e| Error::Io(e.to_string()))? + "\n";
    std::fs::write(dir.join("figures.json"), text).map_err(|e| Error::Io(e.to_string()))?;
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_id_builds_and_runs_analytically() {
        for id in FIGURE_IDS {
            let fig = figure(id).unwrap();
            assert_eq!(fig.id, id);
            let res = run_figure(&fig, Mode::Analytic, &EstimateOptions::default()).unwrap();
            assert!(!res.rows.is_empty(), "{id}");
            assert!(res.rows.iter().all(|r| r.estimate.is_finite() && r.mode == "analytic"));
        }
        assert!(figure("fig2").is_err());
    }

    #[test]
    fn coverage_figures_are_calibrated() {
        for id in ["fig8", "fig9", "fig10", "fig11"] {
            let fig = figure(id).unwrap();
            let cal = fig.calibration.expect(id);
            assert!(cal.beta_0 < ScenarioParams::default().beta_0);
            assert!(fig.series.iter().all(|s| s.config.params.beta_0 == cal.beta_0));
        }
        assert!(figure("fig3").unwrap().calibration.is_none());
    }
}
