//! Marcum Q-function of order one and the Rician CDF.
//!
//! `Q1(a, b) = integral_b^inf x exp(-(x^2 + a^2)/2) I0(a x) dx`.
//!
//! Both `Q1` and its complement `P1 = 1 - Q1` are formed directly and the
//! smaller one is kept, so each keeps full relative accuracy in its own
//! tail.
//!
//! * `a <= 30`: noncentral chi-square mixture
//!   `Q1 = sum_k Pois(k; a^2/2) * PoisCdf(k; b^2/2)`.
//! * `a > 30`: composite Gauss-Legendre on the integrand rewritten with
//!   the scaled Bessel function, `x exp(-(x-a)^2/2) I0e(a x)`, which has
//!   no overflow for any `a`.

use std::sync::OnceLock;

use super::bessel::bessel_i0e;
use super::poisson::poisson_pmf;
use crate::error::{Error, Result};

const SERIES_MAX_A: f64 = 30.0;
// Beyond this separation the smaller tail is below exp(-760).
const FAR: f64 = 40.0;
// Gaussian half-width that carries everything above exp(-45).
const HALF_WIDTH_SQ: f64 = 90.0;

/// `(P1, Q1)` with `P1 + Q1 = 1`.
pub fn marcum_q1_pair(a: f64, b: f64) -> Result<(f64, f64)> {
    if !(a.is_finite() && a >= 0.0) {
        return Err(Error::Domain {
            what: "marcum_q1",
            value: a,
            expected: "a >= 0",
        });
    }
    if !(b.is_finite() && b >= 0.0) {
        return Err(Error::Domain {
            what: "marcum_q1",
            value: b,
            expected: "b >= 0",
        });
    }
    if b == 0.0 {
        return Ok((0.0, 1.0));
    }
    if a == 0.0 {
        let y = 0.5 * b * b;
        return Ok((-(-y).exp_m1(), (-y).exp()));
    }
    if b - a > FAR {
        return Ok((1.0, 0.0));
    }
    if a - b > FAR {
        return Ok((0.0, 1.0));
    }
    let (p, q) = if a <= SERIES_MAX_A {
        mixture_series(a, b)
    } else {
        scaled_integral(a, b)
    };
    // Keep the smaller tail and complement it, so the pair lies in
    // [0, 1] and sums to one.
    Ok(if p <= q { (p, 1.0 - p) } else { (1.0 - q, q) })
}

/// Marcum Q-function of order one.
pub fn marcum_q1(a: f64, b: f64) -> Result<f64> {
    marcum_q1_pair(a, b).map(|(_, q)| q)
}

/// CDF at `d` of the distance `|(nu, 0) + sigma * (Z1, Z2)|`.
///
/// `sigma = 0` gives the step at `nu`.
pub fn rician_cdf(d: f64, nu: f64, sigma: f64) -> Result<f64> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::Domain {
            what: "rician_cdf",
            value: sigma,
            expected: "sigma >= 0",
        });
    }
    if !(nu.is_finite() && nu >= 0.0) {
        return Err(Error::Domain {
            what: "rician_cdf",
            value: nu,
            expected: "nu >= 0",
        });
    }
    if d.is_nan() {
        return Err(Error::Domain {
            what: "rician_cdf",
            value: d,
            expected: "d not NaN",
        });
    }
    if d <= 0.0 {
        return Ok(0.0);
    }
    if d == f64::INFINITY {
        return Ok(1.0);
    }
    if sigma == 0.0 {
        return Ok(if d >= nu { 1.0 } else { 0.0 });
    }
    marcum_q1_pair(nu / sigma, d / sigma).map(|(p, _)| p)
}

fn mixture_series(a: f64, b: f64) -> (f64, f64) {
    let x = 0.5 * a * a;
    let y = 0.5 * b * b;
    // The summand w_k * C_k peaks near max(x, sqrt(x y)).
    let centre = x.max((x * y).sqrt());
    let k_hi = (centre + 15.0 * centre.sqrt() + 50.0).ceil() as usize;
    let j_hi = k_hi.max((y + 15.0 * y.sqrt() + 50.0).ceil() as usize) + 1;

    let p = pmf_table(y, j_hi);
    let w = pmf_table(x, k_hi);

    // tail[k] = sum_{j > k} p_j, built from the top so every step adds.
    let mut tail = vec![0.0; j_hi + 1];
    for j in (0..j_hi).rev() {
        tail[j] = tail[j + 1] + p[j + 1];
    }

    let mut q = 0.0;
    let mut pc = 0.0;
    let mut cdf = 0.0;
    for k in 0..=k_hi {
        cdf += p[k];
        q += w[k] * cdf;
        pc += w[k] * tail[k];
    }
    (pc, q)
}

// Poisson(mean) masses for 0..=n, anchored at the mode and filled by
// the two-term recurrence in both directions.
fn pmf_table(mean: f64, n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n + 1];
    let anchor = (mean.floor() as usize).min(n);
    t[anchor] = poisson_pmf(anchor as u64, mean);
    for k in anchor + 1..=n {
        t[k] = t[k - 1] * mean / k as f64;
    }
    for k in (0..anchor).rev() {
        t[k] = t[k + 1] * (k + 1) as f64 / mean;
    }
    t
}

// Works in the offset t = x - a so that large `a` loses no precision
// in the Gaussian factor.
fn scaled_integral(a: f64, b: f64) -> (f64, f64) {
    let f = |t: f64| {
        let x = a + t;
        x * (-0.5 * t * t).exp() * bessel_i0e(a * x)
    };
    let reach = |gap: f64| (gap.max(0.0).powi(2) + HALF_WIDTH_SQ).sqrt();
    let tb = b - a;

    let q_lo = tb.max(-HALF_WIDTH_SQ.sqrt());
    let q_hi = reach(tb);
    let q = if q_hi > q_lo { panel_integral(&f, q_lo, q_hi) } else { 0.0 };

    let p_lo = (-reach(-tb)).max(-a);
    let p_hi = tb.min(HALF_WIDTH_SQ.sqrt());
    let p = if p_hi > p_lo { panel_integral(&f, p_lo, p_hi) } else { 0.0 };
    (p, q)
}

// Composite 16-point Gauss-Legendre in t with panels narrowing as the
// Gaussian factor steepens away from t = 0.
fn panel_integral(f: &impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let (nodes, weights) = gauss_legendre_16();
    let mut total = 0.0;
    let mut s = lo;
    while s < hi {
        let h = (0.5 / s.abs().max(1.0)).min(hi - s);
        let half = 0.5 * h;
        let mid = s + half;
        let mut acc = 0.0;
        for (x, w) in nodes.iter().zip(weights) {
            acc += w * f(mid + half * x);
        }
        total += acc * half;
        s += h;
    }
    total
}

fn gauss_legendre_16() -> &'static ([f64; 16], [f64; 16]) {
    static RULE: OnceLock<([f64; 16], [f64; 16])> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre::<16>())
}

/// Nodes and weights of the N-point Gauss-Legendre rule on [-1, 1].
pub(crate) fn gauss_legendre<const N: usize>() -> ([f64; N], [f64; N]) {
    let mut nodes = [0.0; N];
    let mut weights = [0.0; N];
    let n = N as f64;
    for i in 0..N {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=N {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert_eq!(marcum_q1(3.0, 0.0).unwrap(), 1.0);
        let q = marcum_q1(0.0, 1.5).unwrap();
        assert!((q - (-1.125f64).exp()).abs() < 1e-16);
        let q = marcum_q1(1.0, 1.0).unwrap();
        assert!((q - 0.7328798037968202).abs() < 1e-14, "{q}");
    }

    #[test]
    fn large_argument_band() {
        let q = marcum_q1(276.45, 275.0).unwrap();
        assert!(q > 0.90 && q < 0.95);
        assert!((q - 0.926723252793563).abs() < 1e-9, "{q}");
    }

    #[test]
    fn pair_sums_to_one_across_regions() {
        for &(a, b) in &[(0.5, 0.1), (5.0, 7.0), (29.9, 30.0), (30.1, 30.0), (500.0, 497.0), (1e6, 1e6 + 2.0)] {
            let (p, q) = marcum_q1_pair(a, b).unwrap();
            assert!((p + q - 1.0).abs() < 1e-13, "a={a} b={b} p={p} q={q}");
        }
    }

    #[test]
    fn series_and_integral_meet() {
        // Just below and above the switch the values must be continuous.
        let below = marcum_q1_pair(30.0, 31.0).unwrap();
        let above = marcum_q1_pair(30.0 + 1e-12, 31.0).unwrap();
        assert!((below.0 / above.0 - 1.0).abs() < 1e-11);
        assert!((below.1 / above.1 - 1.0).abs() < 1e-11);
    }

    #[test]
    fn rician_median_near_nu() {
        let c = rician_cdf(55.29, 55.29, 0.2).unwrap();
        assert!((c - 0.49927845369549706).abs() < 1e-10, "{c}");
        assert_eq!(rician_cdf(-1.0, 2.0, 1.0).unwrap(), 0.0);
        assert_eq!(rician_cdf(2.0, 1.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre::<16>();
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((s - 2.0 / 31.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(marcum_q1(-1.0, 1.0), Err(Error::Domain { .. })));
        assert!(matches!(marcum_q1(1.0, f64::NAN), Err(Error::Domain { .. })));
    }
}
