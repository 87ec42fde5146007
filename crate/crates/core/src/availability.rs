//! Probability that a UAV is free of static and self blockage, and the
//! distribution of the number of such UAVs in the cell.

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

use crate::blockage::{derived_rates, self_blockage_prob, ScenarioParams};
use crate::mathkit::{erf, poisson_pmf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AvailabilityResult {
    pub p_exact: f64,
    pub p_approx: f64,
    /// Mean number of available UAVs.
    pub mean_available: f64,
}

// 2 (1 - (1 + x) e^{-x}) / x^2, the disc average of e^{-r eps} with x = R eps.
fn disc_average(x: f64) -> f64 {
    if x < 0.05 {
        // 1 - 2x/3 + x^2/4 - x^3/15 + ..., term m is 2 (-1)^m (m+1) x^m / (m+2)!
        let mut sum = 0.0;
        let mut pow = 1.0;
        let mut fact = 2.0;
        for m in 0..12 {
            let term = 2.0 * (m + 1) as f64 * pow / fact;
            sum += if m % 2 == 0 { term } else { -term };
            pow *= x;
            fact *= (m + 3) as f64;
        }
        sum
    } else {
        2.0 * (-(-x).exp_m1() - x * (-x).exp()) / (x * x)
    }
}

/// Availability averaged over a uniformly placed UAV with Gaussian
/// jitter, including the `erf((3 + eps sigma)/sqrt 2)` window factor.
///
/// With `lambda_S = 0` there is no static blockage and the value is the
/// open-area availability `1 - theta/(2 pi)`.
pub fn p_available_exact(p: &ScenarioParams) -> f64 {
    let d = derived_rates(p);
    let open = 1.0 - self_blockage_prob(p);
    if d.epsilon == 0.0 {
        return open * (-d.epsilon_0).exp();
    }
    let es = d.epsilon * p.sigma;
    let window = erf((3.0 + es) * FRAC_1_SQRT_2);
    open * window * (-d.epsilon_0 + 0.5 * es * es).exp() * disc_average(p.r_cell * d.epsilon)
}

/// Availability with jitter neglected.
pub fn p_available_approx(p: &ScenarioParams) -> f64 {
    let d = derived_rates(p);
    (1.0 - self_blockage_prob(p)) * (-d.epsilon_0).exp() * disc_average(p.r_cell * d.epsilon)
}

/// `P(N = n)` for the number of available UAVs, a thinned Poisson count
/// with mean `p_c lambda_T pi R^2`.
pub fn n_available_pmf(n: u64, p: &ScenarioParams, p_c: f64) -> f64 {
    poisson_pmf(n, p_c * p.mean_uav_count())
}

pub fn availability(p: &ScenarioParams) -> AvailabilityResult {
    let p_approx = p_available_approx(p);
    AvailabilityResult {
        p_exact: p_available_exact(p),
        p_approx,
        mean_available: p_approx * p.mean_uav_count(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_average_branches_meet() {
        let x: f64 = 0.05;
        assert!((disc_average(x - 1e-15) - disc_average(x)).abs() < 1e-14);
        assert!((disc_average(1e-3) - (1.0 - 2e-3 / 3.0 + 0.25e-6)).abs() < 1e-10);
        assert_eq!(disc_average(0.0), 1.0);
    }

    #[test]
    fn table_value() {
        let p = ScenarioParams::default();
        assert!((p_available_approx(&p) - 0.758243).abs() < 1e-6);
        let e = p_available_exact(&p);
        assert!(e > 0.75 && e < 0.76, "{e}");
    }

    #[test]
    fn open_area_limit() {
        let p = ScenarioParams { lambda_s: 0.0, ..Default::default() };
        let expected = 1.0 - 1.0 / 6.0;
        assert!((p_available_exact(&p) - expected).abs() < 1e-15);
        assert!((p_available_approx(&p) - expected).abs() < 1e-15);
    }

    #[test]
    fn pmf_zero_density() {
        let p = ScenarioParams { lambda_t: 0.0, ..Default::default() };
        assert_eq!(n_available_pmf(0, &p, 0.7), 1.0);
        assert_eq!(n_available_pmf(3, &p, 0.7), 0.0);
    }
}
