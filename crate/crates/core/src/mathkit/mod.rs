//! Special functions and Gaussian-ratio moment approximations.

mod bessel;
mod marcum;
mod poisson;

pub use bessel::{bessel_i0, bessel_i0e};
pub use marcum::{marcum_q1, marcum_q1_pair, rician_cdf};
pub use poisson::poisson_pmf;

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

/// Minimum ratio of denominator mean to denominator std for which the
/// Gaussian-ratio approximation is accepted.
pub const RATIO_VALIDITY: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianMoments {
    pub mean: f64,
    pub variance: f64,
}

impl GaussianMoments {
    pub fn new(mean: f64, variance: f64) -> Self {
        GaussianMoments { mean, variance }
    }

    pub fn std(&self) -> f64 {
        self.variance.sqrt()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let s = self.std();
        let z = (x - self.mean) / s;
        (-0.5 * z * z).exp() / (s * (2.0 * PI).sqrt())
    }

    pub fn cdf(&self, x: f64) -> f64 {
        normal_cdf((x - self.mean) / self.std())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RicianParams {
    pub nu: f64,
    pub sigma: f64,
}

impl RicianParams {
    pub fn cdf(&self, d: f64) -> Result<f64> {
        rician_cdf(d, self.nu, self.sigma)
    }

    pub fn pdf(&self, d: f64) -> Result<f64> {
        if d < 0.0 {
            return Ok(0.0);
        }
        let s2 = self.sigma * self.sigma;
        let z = d * self.nu / s2;
        let e = (d - self.nu) * (d - self.nu) / (2.0 * s2);
        Ok(d / s2 * (-e).exp() * bessel_i0e(z))
    }
}

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Standard normal CDF, accurate in both tails.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

/// First-order moments of `N / D` for independent Gaussians.
///
/// `mean = mu_N / mu_D`, `variance = var_N / mu_D^2 + mu_N^2 var_D / mu_D^4`.
/// Rejected when `mu_D < 5 sd_D`, where the ratio is far from Gaussian.
pub fn gaussian_ratio_moments(num: GaussianMoments, den: GaussianMoments) -> Result<GaussianMoments> {
    let sd = den.variance.sqrt();
    if !(den.mean > 0.0) || den.mean < RATIO_VALIDITY * sd {
        return Err(Error::RatioValidity {
            what: "gaussian_ratio_moments",
            mean: den.mean,
            std: sd,
        });
    }
    let d2 = den.mean * den.mean;
    let mean = num.mean / den.mean;
    let variance = num.variance / d2 + num.mean * num.mean * den.variance / (d2 * d2);
    Ok(GaussianMoments { mean, variance })
}

/// Moments of `rho r / (rho r + omega (h - h_r))` for `r ~ N(mu_r, sigma^2)`
/// and `h ~ N(mu_h, sigma^2)`, built from the numerator/denominator pair
/// `N(rho mu_r, rho^2 sigma^2)` and `N(rho mu_r + omega(mu_h - h_r), (rho^2 + omega^2) sigma^2)`.
pub fn linear_ratio_moments(
    rho: f64,
    omega: f64,
    mu_r: f64,
    mu_h: f64,
    h_r: f64,
    sigma: f64,
) -> Result<GaussianMoments> {
    let s2 = sigma * sigma;
    let num = GaussianMoments::new(rho * mu_r, rho * rho * s2);
    let den = GaussianMoments::new(rho * mu_r + omega * (mu_h - h_r), (rho * rho + omega * omega) * s2);
    gaussian_ratio_moments(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_of_constants() {
        let m = gaussian_ratio_moments(GaussianMoments::new(1.0, 0.0), GaussianMoments::new(2.0, 0.0)).unwrap();
        assert_eq!(m, GaussianMoments::new(0.5, 0.0));
    }

    #[test]
    fn ratio_validity_guard() {
        let r = gaussian_ratio_moments(GaussianMoments::new(1.0, 0.0), GaussianMoments::new(1.0, 0.05));
        assert!(matches!(r, Err(Error::RatioValidity { .. })));
        let r = gaussian_ratio_moments(GaussianMoments::new(1.0, 0.0), GaussianMoments::new(1.0, 0.03));
        assert!(r.is_ok());
    }

    #[test]
    fn erf_reference_values() {
        assert_eq!(erf(0.0), 0.0);
        assert!((erf(1.0) - 0.8427007929497149).abs() < 1e-16);
        assert!((erfc(5.0) - 1.5374597944280349e-12).abs() < 1e-26);
        assert!((normal_cdf(-10.0) - 7.619853024160527e-24).abs() < 1e-37);
    }

    #[test]
    fn rician_pdf_reduces_to_rayleigh() {
        let r = RicianParams { nu: 0.0, sigma: 2.0 };
        let d: f64 = 1.3;
        let expected = d / 4.0 * (-d * d / 8.0).exp();
        assert!((r.pdf(d).unwrap() - expected).abs() < 1e-15);
    }
}
