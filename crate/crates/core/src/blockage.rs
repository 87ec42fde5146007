//! Dynamic (human), static (building) and self blockage probabilities,
//! and their moments under Gaussian hovering jitter.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::mathkit::{self, normal_cdf, GaussianMoments};
pub use crate::scenario::ScenarioParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedRates {
    /// Blocker arrival-rate coefficient `2 lambda_B v (h_B - h_R) / pi`.
    pub rho: f64,
    /// Building length coefficient `(2/pi) lambda_S (E_l + E_w)`.
    pub epsilon: f64,
    /// Building area term `lambda_S E_l E_w`.
    pub epsilon_0: f64,
}

pub fn derived_rates(p: &ScenarioParams) -> DerivedRates {
    DerivedRates {
        rho: 2.0 * p.lambda_b * p.v * (p.h_b - p.h_r) / PI,
        epsilon: 2.0 / PI * p.lambda_s * (p.e_l + p.e_w),
        epsilon_0: p.lambda_s * p.e_l * p.e_w,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockageMoments {
    pub mu_phi: f64,
    pub var_phi: f64,
}

impl BlockageMoments {
    pub fn sigma_phi(&self) -> f64 {
        self.var_phi.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaticMoments {
    /// Mean and std of `ln(1 - psi)`.
    pub mu_rhat: f64,
    pub sigma_rhat: f64,
    /// Mean and variance of `1 - psi`.
    pub mu_psi_tilde: f64,
    pub var_psi_tilde: f64,
}

fn height_check(h: f64, p: &ScenarioParams) -> Result<()> {
    if h.is_finite() && h > p.h_r {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "UAV height",
            value: h,
            expected: "h > h_R",
        })
    }
}

fn radius_check(r: f64) -> Result<()> {
    if r.is_finite() && r >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "horizontal distance",
            value: r,
            expected: "r >= 0",
        })
    }
}

/// Steady-state probability that a link to a UAV at height `h` and
/// horizontal distance `r` is blocked by a moving human.
pub fn dynamic_blockage_prob(h: f64, r: f64, p: &ScenarioParams) -> Result<f64> {
    height_check(h, p)?;
    radius_check(r)?;
    let rr = derived_rates(p).rho * r;
    Ok(rr / (rr + p.omega * (h - p.h_r)))
}

pub fn los_prob(h: f64, r: f64, p: &ScenarioParams) -> Result<f64> {
    dynamic_blockage_prob(h, r, p).map(|phi| 1.0 - phi)
}

/// Probability that at least one building intersects a link of
/// horizontal length `r`.
pub fn static_blockage_prob(r: f64, p: &ScenarioParams) -> Result<f64> {
    radius_check(r)?;
    let d = derived_rates(p);
    Ok(-(-(d.epsilon * r + d.epsilon_0)).exp_m1())
}

pub fn self_blockage_prob(p: &ScenarioParams) -> f64 {
    p.theta / (2.0 * PI)
}

/// Gaussian moments of the dynamic blockage probability when both the
/// horizontal distance and the height jitter with std `p.sigma`.
pub fn phi_moments(mu_r: f64, mu_h: f64, p: &ScenarioParams) -> Result<BlockageMoments> {
    height_check(mu_h, p)?;
    radius_check(mu_r)?;
    let rho = derived_rates(p).rho;
    let m = match mathkit::linear_ratio_moments(rho, p.omega, mu_r, mu_h, p.h_r, p.sigma) {
        Ok(m) => m,
        Err(Error::RatioValidity { mean, std, .. }) => {
            log::warn!("phi_moments outside ratio validity (den mean {mean}, std {std}); result is approximate");
            unchecked_moments(rho, p.omega, mu_r, mu_h, p.h_r, p.sigma)
        }
        Err(e) => return Err(e),
    };
    Ok(BlockageMoments {
        mu_phi: m.mean,
        var_phi: m.variance,
    })
}

fn unchecked_moments(rho: f64, omega: f64, mu_r: f64, mu_h: f64, h_r: f64, sigma: f64) -> GaussianMoments {
    let d = rho * mu_r + omega * (mu_h - h_r);
    let n = rho * mu_r;
    let s2 = sigma * sigma;
    GaussianMoments::new(n / d, rho * rho * s2 / (d * d) + n * n * (rho * rho + omega * omega) * s2 / (d * d * d * d))
}

/// Gaussian density of the dynamic blockage probability, zero outside [0, 1].
pub fn phi_pdf(phi: f64, m: &BlockageMoments) -> f64 {
    if !(0.0..=1.0).contains(&phi) {
        return 0.0;
    }
    if m.var_phi == 0.0 {
        return if phi == m.mu_phi { f64::INFINITY } else { 0.0 };
    }
    GaussianMoments::new(m.mu_phi, m.var_phi).pdf(phi)
}

/// Gaussian mass that [`phi_pdf`] drops outside [0, 1].
pub fn phi_clipped_mass(m: &BlockageMoments) -> f64 {
    if m.var_phi == 0.0 {
        return 0.0;
    }
    let s = m.sigma_phi();
    normal_cdf(-m.mu_phi / s) + normal_cdf((m.mu_phi - 1.0) / s)
}

/// Extremes of `(mu_phi, sigma_phi)` over `mu_r` in `[mu_r_min, mu_r_max]`.
///
/// Returns `((mu_phi_min, sigma_phi_min), (mu_phi_max, sigma_phi_max))`.
/// `mu_phi` is increasing in `mu_r`; `sigma_phi` is not monotone, so its
/// extremes are taken over the endpoints and interior stationary points.
pub fn phi_moment_range(
    mu_r_min: f64,
    mu_r_max: f64,
    mu_h: f64,
    p: &ScenarioParams,
) -> Result<((f64, f64), (f64, f64))> {
    if !(mu_r_min <= mu_r_max) {
        return Err(Error::Domain {
            what: "phi_moment_range",
            value: mu_r_min,
            expected: "mu_r_min <= mu_r_max",
        });
    }
    let lo = phi_moments(mu_r_min, mu_h, p)?;
    let hi = phi_moments(mu_r_max, mu_h, p)?;
    let mut s_min = lo.var_phi.min(hi.var_phi);
    let mut s_max = lo.var_phi.max(hi.var_phi);
    for r in sigma_stationary_points(mu_h, p) {
        if r > mu_r_min && r < mu_r_max {
            let v = phi_moments(r, mu_h, p)?.var_phi;
            s_min = s_min.min(v);
            s_max = s_max.max(v);
        }
    }
    Ok(((lo.mu_phi, s_min.sqrt()), (hi.mu_phi, s_max.sqrt())))
}

/// `(mu_phi_max, sigma_phi_max)` over a ring of UAV distances.
pub fn phi_moment_extremes(mu_r_min: f64, mu_r_max: f64, mu_h: f64, p: &ScenarioParams) -> Result<(f64, f64)> {
    phi_moment_range(mu_r_min, mu_r_max, mu_h, p).map(|(_, max)| max)
}

// Roots in mu_r of d(var_phi)/d(mu_r). With c = omega (mu_h - h_R) the
// derivative has the sign of
//   -rho (2 rho^2 + omega^2) mu^2 + c (omega^2 - rho^2) mu - rho c^2.
fn sigma_stationary_points(mu_h: f64, p: &ScenarioParams) -> Vec<f64> {
    let rho = derived_rates(p).rho;
    if rho == 0.0 {
        return Vec::new();
    }
    let w2 = p.omega * p.omega;
    let c = p.omega * (mu_h - p.h_r);
    let qa = -rho * (2.0 * rho * rho + w2);
    let qb = c * (w2 - rho * rho);
    let qc = -rho * c * c;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    vec![(-qb + sq) / (2.0 * qa), (-qb - sq) / (2.0 * qa)]
}

/// Log-normal description of the static non-blockage probability at
/// mean distance `mu_r`.
pub fn psi_distribution(mu_r: f64, p: &ScenarioParams) -> Result<StaticMoments> {
    radius_check(mu_r)?;
    let d = derived_rates(p);
    let mu = -(d.epsilon * mu_r + d.epsilon_0);
    let s = d.epsilon * p.sigma;
    let s2 = s * s;
    Ok(StaticMoments {
        mu_rhat: mu,
        sigma_rhat: s,
        mu_psi_tilde: (mu + 0.5 * s2).exp(),
        var_psi_tilde: (2.0 * mu + s2).exp() * s2.exp_m1(),
    })
}

/// Density of the static blockage probability `psi` on (0, 1).
pub fn psi_pdf(psi: f64, m: &StaticMoments) -> f64 {
    if !(psi > 0.0 && psi < 1.0) {
        return 0.0;
    }
    let s = m.sigma_rhat;
    let l = (1.0 - psi).ln();
    if s == 0.0 {
        return if l == m.mu_rhat { f64::INFINITY } else { 0.0 };
    }
    let z = (l - m.mu_rhat) / s;
    (-0.5 * z * z).exp() / ((2.0 * PI).sqrt() * (1.0 - psi) * s)
}
