use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use super::links::{link_self_blocked, link_static_blocked};
use super::onoff::{link_blockage_rate, onoff_simulate};
use super::world::{jitter, sample_buildings, trial_rng, Building, PlacementSpec, SimConfig};
use crate::availability::p_available_approx;
use crate::blockage::{derived_rates, dynamic_blockage_prob, ScenarioParams};
use crate::error::{Error, Result};

const CHUNK: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    RelSingle,
    RelMulti,
    CovSingle,
    CovMulti,
    PAvailable,
    /// Dynamic blockage probability at the jittered position.
    Phi,
    /// Static non-blockage probability at the jittered distance.
    PsiTilde,
}

impl Metric {
    pub const ALL: [Metric; 7] = [
        Metric::RelSingle,
        Metric::RelMulti,
        Metric::CovSingle,
        Metric::CovMulti,
        Metric::PAvailable,
        Metric::Phi,
        Metric::PsiTilde,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Metric::RelSingle => "rel_single",
            Metric::RelMulti => "rel_multi",
            Metric::CovSingle => "cov_single",
            Metric::CovMulti => "cov_multi",
            Metric::PAvailable => "p_available",
            Metric::Phi => "phi",
            Metric::PsiTilde => "psi_tilde",
        }
    }

    fn is_multi(&self) -> bool {
        matches!(self, Metric::RelMulti | Metric::CovMulti)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownMetric(s.to_string()))
    }
}

/// How a UAV's freedom from static and self blockage is decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AvailabilityBackend {
    /// Independent Bernoulli draws with the analytic availability.
    Draws,
    /// Random buildings and the self-blockage sector.
    Geometric,
}

/// How the dynamic blockage probability of a link is measured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhiMode {
    /// Steady-state probability at the jittered position.
    AtJitter,
    /// Blocked-time fraction of an on-off process over `horizon` seconds.
    TimeFraction { horizon: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateOptions {
    pub n_trials: u64,
    pub seed: u64,
    pub availability: AvailabilityBackend,
    pub phi_mode: PhiMode,
    pub sim: SimConfig,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            n_trials: 100_000,
            seed: 0,
            availability: AvailabilityBackend::Draws,
            phi_mode: PhiMode::AtJitter,
            sim: SimConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialEstimate {
    pub mean: f64,
    /// Sample variance of the per-trial values.
    pub variance: f64,
    pub half_width_95: f64,
    pub n_trials: u64,
}

#[derive(Clone, Copy)]
struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    const EMPTY: Welford = Welford { n: 0, mean: 0.0, m2: 0.0 };

    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Welford) -> Welford {
        if o.n == 0 {
            return self;
        }
        if self.n == 0 {
            return o;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Welford {
            n,
            mean: self.mean + d * o.n as f64 / n as f64,
            m2: self.m2 + o.m2 + d * d * (self.n as f64 * o.n as f64 / n as f64),
        }
    }
}

struct Trial<'a> {
    metric: Metric,
    p: &'a ScenarioParams,
    spec: &'a PlacementSpec,
    opts: &'a EstimateOptions,
    p_c: f64,
}

impl Trial<'_> {
    fn available(&self, pos: [f64; 3], buildings: &[Building], rng: &mut ChaCha8Rng) -> bool {
        match self.opts.availability {
            AvailabilityBackend::Draws => rng.random::<f64>() < self.p_c,
            AvailabilityBackend::Geometric => !link_self_blocked(pos, self.p) && !link_static_blocked(pos, buildings),
        }
    }

    fn phi(&self, pos: [f64; 3], rng: &mut ChaCha8Rng) -> Result<f64> {
        let r = pos[0].hypot(pos[1]);
        match self.opts.phi_mode {
            PhiMode::AtJitter => dynamic_blockage_prob(pos[2], r, self.p),
            PhiMode::TimeFraction { horizon } => {
                let eta = link_blockage_rate(pos[2], r, self.p);
                Ok(onoff_simulate(eta, self.p.omega, horizon, rng))
            }
        }
    }

    fn passes(&self, pos: [f64; 3], rng: &mut ChaCha8Rng) -> Result<bool> {
        let p = self.p;
        match self.metric {
            Metric::RelSingle | Metric::RelMulti => Ok(self.phi(pos, rng)? <= p.p_th),
            _ => {
                let r = pos[0].hypot(pos[1]);
                let d = r.hypot(pos[2] - p.h_r);
                let p_los = 1.0 - dynamic_blockage_prob(pos[2], r, p)?;
                let snr = p.p_t * p_los * p.beta_0 * d.powf(-p.alpha) / p.n_0;
                Ok(snr >= p.gamma_0)
            }
        }
    }

    fn run(&self, index: u64) -> Result<f64> {
        let p = self.p;
        let mut rng = trial_rng(self.opts.seed, index);
        let buildings = match self.opts.availability {
            AvailabilityBackend::Geometric => sample_buildings(p, &mut rng),
            AvailabilityBackend::Draws => Vec::new(),
        };
        if self.metric.is_multi() {
            let centrals = self.spec.sample_multi(p, &mut rng);
            let mut ok = false;
            for c in centrals {
                let pos = jitter(c, p.sigma, &mut rng);
                // Draws are consumed for every UAV so trials stay aligned.
                let avail = self.available(pos, &buildings, &mut rng);
                let pass = self.passes(pos, &mut rng)?;
                ok |= avail && pass;
            }
            return Ok(if ok { 1.0 } else { 0.0 });
        }
        let pos = jitter(self.spec.sample_one(p, &mut rng), p.sigma, &mut rng);
        let indicator = |b: bool| if b { 1.0 } else { 0.0 };
        match self.metric {
            Metric::PAvailable => Ok(indicator(self.available(pos, &buildings, &mut rng))),
            Metric::Phi => self.phi(pos, &mut rng),
            Metric::PsiTilde => {
                let d = derived_rates(p);
                Ok((-(d.epsilon * pos[0].hypot(pos[1]) + d.epsilon_0)).exp())
            }
            _ => {
                let avail = self.available(pos, &buildings, &mut rng);
                let pass = self.passes(pos, &mut rng)?;
                Ok(indicator(avail && pass))
            }
        }
    }
}

/// Monte Carlo estimate of `metric` over `opts.n_trials` independent trials.
///
/// Trial `i` always uses stream `i` of the seeded generator and trials
/// are merged in index order, so the result does not depend on the
/// number of worker threads.
pub fn estimate_metric(
    metric: Metric,
    p: &ScenarioParams,
    placements: &PlacementSpec,
    opts: &EstimateOptions,
) -> Result<TrialEstimate> {
    p.validate()?;
    placements.validate(p)?;
    if opts.n_trials == 0 {
        return Err(Error::InvalidParameter {
            field: "n_trials".into(),
            reason: "must be >= 1".into(),
        });
    }
    let trial = Trial {
        metric,
        p,
        spec: placements,
        opts,
        p_c: p_available_approx(p),
    };
    let n = opts.n_trials;
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Welford> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut w = Welford::EMPTY;
            for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                w.push(trial.run(i)?);
            }
            Ok(w)
        })
        .collect::<Result<_>>()?;
    let total = parts.into_iter().fold(Welford::EMPTY, Welford::merge);
    let variance = if n > 1 { total.m2 / (n - 1) as f64 } else { 0.0 };
    Ok(TrialEstimate {
        mean: total.mean,
        variance,
        half_width_95: 1.96 * (variance / n as f64).sqrt(),
        n_trials: n,
    })
}
