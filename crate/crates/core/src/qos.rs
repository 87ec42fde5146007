//! Reliability and coverage of the user link, for a single UAV and for
//! a Poisson number of available UAVs.

use serde::{Deserialize, Serialize};

use crate::availability::{n_available_pmf, p_available_approx};
use crate::blockage::{derived_rates, phi_moments, self_blockage_prob, ScenarioParams};
use crate::error::{Error, Result};
use crate::mathkit::{marcum_q1_pair, normal_cdf};

/// Mean horizontal distance and mean height of a hovering UAV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UavPlacement {
    pub mu_r: f64,
    pub mu_h: f64,
}

impl UavPlacement {
    pub fn new(mu_r: f64, mu_h: f64) -> Self {
        UavPlacement { mu_r, mu_h }
    }

    /// Mean 3D distance to the user's receiver.
    pub fn distance(&self, p: &ScenarioParams) -> f64 {
        self.mu_r.hypot(self.mu_h - p.h_r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub distance: f64,
    pub p_los: f64,
    /// Mean received SNR (linear).
    pub snr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QosValue {
    pub value: f64,
    pub lower_bound: Option<f64>,
    pub upper_bound: Option<f64>,
}

pub fn link_budget(pl: &UavPlacement, p: &ScenarioParams) -> Result<LinkBudget> {
    let m = phi_moments(pl.mu_r, pl.mu_h, p)?;
    let distance = pl.distance(p);
    let p_los = 1.0 - m.mu_phi;
    let snr = p.p_t * p_los * p.beta_0 * distance.powf(-p.alpha) / p.n_0;
    Ok(LinkBudget { distance, p_los, snr })
}

/// Largest link distance at which the mean-LoS SNR still meets `gamma_0`.
pub fn tau_threshold_distance(pl: &UavPlacement, p: &ScenarioParams) -> Result<f64> {
    let rho = derived_rates(p).rho;
    let c = p.omega * (pl.mu_h - p.h_r);
    if !(c > 0.0) {
        return Err(Error::Domain {
            what: "tau_threshold_distance",
            value: pl.mu_h,
            expected: "mu_h > h_R",
        });
    }
    let ratio = p.p_t * p.beta_0 * c / (p.n_0 * p.gamma_0 * (rho * pl.mu_r + c));
    Ok(ratio.powf(1.0 / p.alpha))
}

/// `beta_0` that puts the threshold distance `margin` metres beyond the
/// mean link distance of `pl`.
pub fn calibrate_beta0(pl: &UavPlacement, p: &ScenarioParams, margin: f64) -> f64 {
    let rho = derived_rates(p).rho;
    let c = p.omega * (pl.mu_h - p.h_r);
    (pl.distance(p) + margin).powf(p.alpha) * p.n_0 * p.gamma_0 * (rho * pl.mu_r + c) / (p.p_t * c)
}

/// Probability the dynamic blockage probability exceeds `p_th`.
pub fn los_fail_prob(pl: &UavPlacement, p: &ScenarioParams) -> Result<f64> {
    let m = phi_moments(pl.mu_r, pl.mu_h, p)?;
    if m.var_phi == 0.0 {
        return Ok(if m.mu_phi <= p.p_th { 0.0 } else { 1.0 });
    }
    Ok(normal_cdf((m.mu_phi - p.p_th) / m.sigma_phi()))
}

/// `(P, Q)` for the link distance exceeding the threshold distance.
/// The first entry is the success probability.
fn coverage_pair(pl: &UavPlacement, p: &ScenarioParams) -> Result<(f64, f64)> {
    let tau = tau_threshold_distance(pl, p)?;
    let d = pl.distance(p);
    if p.sigma == 0.0 {
        return Ok(if d <= tau { (1.0, 0.0) } else { (0.0, 1.0) });
    }
    marcum_q1_pair(d / p.sigma, tau / p.sigma)
}

/// Probability the link distance exceeds the threshold distance.
pub fn cov_fail_prob(pl: &UavPlacement, p: &ScenarioParams) -> Result<f64> {
    coverage_pair(pl, p).map(|(_, q)| q)
}

pub fn rel_single(pl: &UavPlacement, p: &ScenarioParams) -> Result<f64> {
    p.validate()?;
    let pass = 1.0 - los_fail_prob(pl, p)?;
    Ok(p_available_approx(p) * pass)
}

/// Single-UAV reliability without buildings.
pub fn rel_single_open_area(pl: &UavPlacement, p: &ScenarioParams) -> Result<f64> {
    p.validate()?;
    let pass = 1.0 - los_fail_prob(pl, p)?;
    Ok((1.0 - self_blockage_prob(p)) * pass)
}

pub fn cov_single(pl: &UavPlacement, p: &ScenarioParams) -> Result<f64> {
    p.validate()?;
    let (pass, _) = coverage_pair(pl, p)?;
    Ok(p_available_approx(p) * pass)
}

fn check_placements(placements: &[UavPlacement], p: &ScenarioParams) -> Result<()> {
    p.validate()?;
    if placements.is_empty() {
        return Err(Error::EmptyPlacements);
    }
    if placements.len() > p.k {
        return Err(Error::TooManyPlacements {
            got: placements.len(),
            k: p.k,
        });
    }
    Ok(())
}

// 1 - sum_{n=0}^{K} P_N(n) prod_{i<n} fail[i mod L].
fn multi_success(fail: &[f64], p: &ScenarioParams, p_c: f64) -> f64 {
    let mut none = 0.0;
    let mut prod = 1.0;
    for n in 0..=p.k {
        if n > 0 {
            prod *= fail[(n - 1) % fail.len()];
        }
        none += n_available_pmf(n as u64, p, p_c) * prod;
    }
    1.0 - none
}

// 1 - exp(-m (1 - q)) with m the mean number of available UAVs, formed
// like `multi_success` so the two coincide exactly when every link passes.
fn poisson_bound(p: &ScenarioParams, p_c: f64, q: f64) -> f64 {
    1.0 - (-(p_c * p.mean_uav_count() * (1.0 - q))).exp()
}

/// Reliability with at least one of the available UAVs below `p_th`.
///
/// UAV `i` of an `n`-UAV draw takes `placements[i mod L]`.
pub fn rel_multi(placements: &[UavPlacement], p: &ScenarioParams) -> Result<QosValue> {
    check_placements(placements, p)?;
    let p_c = p_available_approx(p);
    let mut fail = Vec::with_capacity(placements.len());
    let mut worst = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut best = (f64::INFINITY, f64::INFINITY);
    for pl in placements {
        let m = phi_moments(pl.mu_r, pl.mu_h, p)?;
        fail.push(los_fail_prob(pl, p)?);
        worst = (worst.0.max(m.mu_phi), worst.1.max(m.sigma_phi()));
        best = (best.0.min(m.mu_phi), best.1.min(m.sigma_phi()));
    }
    Ok(QosValue {
        value: multi_success(&fail, p, p_c),
        lower_bound: Some(rel_multi_lower_bound(p, worst.0, worst.1, p_c)),
        upper_bound: Some(rel_multi_upper_bound(p, best.0, best.1, p_c)),
    })
}

fn fail_from(p: &ScenarioParams, mu_phi: f64, sigma_phi: f64) -> f64 {
    if sigma_phi == 0.0 {
        return if mu_phi <= p.p_th { 0.0 } else { 1.0 };
    }
    normal_cdf((mu_phi - p.p_th) / sigma_phi)
}

/// Lower bound from the worst-case moments over the placements.
pub fn rel_multi_lower_bound(p: &ScenarioParams, mu_phi_max: f64, sigma_phi_max: f64, p_c: f64) -> f64 {
    poisson_bound(p, p_c, fail_from(p, mu_phi_max, sigma_phi_max))
}

/// Upper bound from the best-case moments over the placements.
pub fn rel_multi_upper_bound(p: &ScenarioParams, mu_phi_min: f64, sigma_phi_min: f64, p_c: f64) -> f64 {
    poisson_bound(p, p_c, fail_from(p, mu_phi_min, sigma_phi_min))
}

/// Coverage with at least one available UAV inside its threshold distance.
pub fn cov_multi(placements: &[UavPlacement], p: &ScenarioParams) -> Result<QosValue> {
    check_placements(placements, p)?;
    let p_c = p_available_approx(p);
    let mut fail = Vec::with_capacity(placements.len());
    let (mut d_max, mut d_min) = (f64::NEG_INFINITY, f64::INFINITY);
    let (mut t_max, mut t_min) = (f64::NEG_INFINITY, f64::INFINITY);
    for pl in placements {
        fail.push(cov_fail_prob(pl, p)?);
        let d = pl.distance(p);
        let t = tau_threshold_distance(pl, p)?;
        d_max = d_max.max(d);
        d_min = d_min.min(d);
        t_max = t_max.max(t);
        t_min = t_min.min(t);
    }
    Ok(QosValue {
        value: multi_success(&fail, p, p_c),
        lower_bound: Some(cov_multi_lower_bound(p, d_max, t_min, p_c)?),
        upper_bound: Some(cov_multi_lower_bound(p, d_min, t_max, p_c)?),
    })
}

/// Bound with every UAV at distance `mu_d` and threshold `tau`; a lower
/// bound for the largest distance and smallest threshold.
pub fn cov_multi_lower_bound(p: &ScenarioParams, mu_d: f64, tau: f64, p_c: f64) -> Result<f64> {
    let q = if p.sigma == 0.0 {
        if mu_d <= tau { 0.0 } else { 1.0 }
    } else {
        marcum_q1_pair(mu_d / p.sigma, tau / p.sigma)?.1
    };
    Ok(poisson_bound(p, p_c, q))
}

fn radical_inverse_2(mut i: u64) -> f64 {
    let mut f = 0.5;
    let mut v = 0.0;
    while i > 0 {
        if i & 1 == 1 {
            v += f;
        }
        i >>= 1;
        f *= 0.5;
    }
    v
}

/// `count` deterministic placements spread over the annulus
/// `[r_in, r_out]` with area-uniform van der Corput radii.
pub fn ring_placements(r_in: f64, r_out: f64, mu_h: f64, count: usize) -> Result<Vec<UavPlacement>> {
    if !(r_in >= 0.0 && r_out >= r_in && r_out.is_finite()) {
        return Err(Error::InvalidPlacement(format!("ring [{r_in}, {r_out}]")));
    }
    Ok((1..=count as u64)
        .map(|i| {
            let u = radical_inverse_2(i);
            let r = (r_in * r_in + u * (r_out * r_out - r_in * r_in)).sqrt();
            UavPlacement::new(r, mu_h)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> ScenarioParams {
        ScenarioParams::default()
    }

    #[test]
    fn literal_tau_far_exceeds_distance() {
        let pl = UavPlacement::new(50.0, 25.0);
        let tau = tau_threshold_distance(&pl, &table()).unwrap();
        assert!(tau > 18_000.0 && tau < 19_500.0, "{tau}");
    }

    #[test]
    fn calibration_hits_margin() {
        let p = table();
        let pl = UavPlacement::new(50.0, 25.0);
        let beta_0 = calibrate_beta0(&pl, &p, 0.25);
        let q = ScenarioParams { beta_0, ..p };
        let tau = tau_threshold_distance(&pl, &q).unwrap();
        assert!((tau - pl.distance(&p) - 0.25).abs() < 1e-9);
    }

    #[test]
    fn single_reliability_limit() {
        let p = ScenarioParams { sigma: 1e-6, ..table() };
        let v = rel_single(&UavPlacement::new(10.0, 25.0), &p).unwrap();
        assert!((v - p_available_approx(&p)).abs() < 1e-12);
    }

    #[test]
    fn multi_with_one_placement_is_geometric_sum() {
        let p = table();
        let pl = UavPlacement::new(12.0, 25.0);
        let q = los_fail_prob(&pl, &p).unwrap();
        let pc = p_available_approx(&p);
        let direct: f64 = 1.0 - (0..=p.k as u64).map(|n| n_available_pmf(n, &p, pc) * q.powi(n as i32)).sum::<f64>();
        let v = rel_multi(&[pl], &p).unwrap().value;
        assert!((v - direct).abs() < 1e-12);
    }

    #[test]
    fn placement_errors() {
        let p = table();
        assert!(matches!(rel_multi(&[], &p), Err(Error::EmptyPlacements)));
        let many = vec![UavPlacement::new(10.0, 25.0); 7];
        assert!(matches!(cov_multi(&many, &p), Err(Error::TooManyPlacements { .. })));
    }

    #[test]
    fn ring_radii_inside_annulus() {
        let r = ring_placements(10.0, 15.0, 25.0, 6).unwrap();
        assert_eq!(r.len(), 6);
        assert!(r.iter().all(|pl| pl.mu_r >= 10.0 && pl.mu_r <= 15.0));
        assert!((radical_inverse_2(3) - 0.75).abs() < 1e-15);
    }
}
