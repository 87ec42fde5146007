use proptest::prelude::*;
use skyline_core::harness::special_function_report;
use skyline_core::mathkit::{
    bessel_i0, bessel_i0e, erf, gaussian_ratio_moments, marcum_q1, marcum_q1_pair, poisson_pmf, rician_cdf,
    GaussianMoments,
};
use skyline_core::{oracle, Error};

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn frozen_reference_values() {
    assert!(rel(bessel_i0(1.0).unwrap(), 1.2660658777520084) < 1e-14);
    assert!(rel(bessel_i0(5.0).unwrap(), 27.239871823604442) < 1e-14);
    assert!(rel(erf(1.0), 0.8427007929497149) < 1e-15);
    assert!(rel(marcum_q1(1.0, 1.0).unwrap(), 0.7328798037968202) < 1e-13);
    assert!(rel(rician_cdf(55.29, 55.29, 0.2).unwrap(), 0.49927845) < 1e-7);
}

#[test]
fn reference_values_agree_with_oracles() {
    assert!(rel(oracle::bessel_i0(1.0), 1.2660658777520084) < 1e-14);
    assert!(rel(oracle::bessel_i0(5.0), 27.239871823604442) < 1e-14);
    assert!(rel(oracle::erf(1.0), 0.8427007929497149) < 1e-14);
    assert!(rel(oracle::marcum_q1(1.0, 1.0), 0.7328798037968202) < 1e-12);
}

#[test]
fn large_argument_marcum_band() {
    let q = marcum_q1(276.45, 275.0).unwrap();
    assert!(q > 0.90 && q < 0.95, "{q}");
    assert!(rel(q, oracle::marcum_q1(276.45, 275.0)) < 1e-9);
    let (p, q2) = marcum_q1_pair(276.45, 275.0).unwrap();
    assert_eq!(q, q2);
    assert!((p + q - 1.0).abs() < 1e-15);
    assert!(rel(p, oracle::marcum_p1(276.45, 275.0)) < 1e-9);
}

#[test]
fn rician_median_near_mean_for_large_snr() {
    let c = rician_cdf(55.29, 55.29, 0.2).unwrap();
    assert!((c - 0.5).abs() < 0.01);
    assert!(rel(c, oracle::rician_cdf(55.29, 55.29, 0.2)) < 1e-12);
}

#[test]
fn random_points_meet_tolerances() {
    for r in special_function_report(1000, 3) {
        assert!(r.passed(), "{}", r.line());
    }
}

#[test]
fn marcum_monotone_on_grid() {
    let pts: Vec<f64> = (0..20).map(|i| 0.25 + i as f64 * 1.5).collect();
    for &a in &pts {
        for w in pts.windows(2) {
            assert!(marcum_q1(a, w[1]).unwrap() <= marcum_q1(a, w[0]).unwrap());
        }
    }
    for &b in &pts {
        for w in pts.windows(2) {
            assert!(marcum_q1(w[1], b).unwrap() >= marcum_q1(w[0], b).unwrap());
        }
    }
}

#[test]
fn domain_errors() {
    assert!(matches!(marcum_q1(-1.0, 1.0), Err(Error::Domain { .. })));
    assert!(matches!(marcum_q1(1.0, f64::NAN), Err(Error::Domain { .. })));
    assert!(matches!(rician_cdf(1.0, 1.0, -0.1), Err(Error::Domain { .. })));
    assert!(matches!(bessel_i0(800.0), Err(Error::Overflow { .. })));
    assert!(bessel_i0e(800.0).is_finite());
}

#[test]
fn ratio_of_independent_gaussians_by_sampling() {
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};
    let num = GaussianMoments::new(0.05, 4e-6);
    let den = GaussianMoments::new(47.0, 0.16);
    let m = gaussian_ratio_moments(num, den).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
    let nd = Normal::new(num.mean, num.std()).unwrap();
    let dd = Normal::new(den.mean, den.std()).unwrap();
    let n = 1_000_000;
    let xs: Vec<f64> = (0..n).map(|_| nd.sample(&mut rng) / dd.sample(&mut rng)).collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    assert!(rel(mean, m.mean) < 0.01, "{mean} {}", m.mean);
    assert!(rel(var, m.variance) < 0.05, "{var} {}", m.variance);
}

proptest! {
    #[test]
    fn erf_is_odd_and_bounded(x in -10.0f64..10.0) {
        prop_assert_eq!(erf(-x), -erf(x));
        prop_assert!(erf(x).abs() <= 1.0);
    }

    #[test]
    fn marcum_pair_sums_to_one(a in 0.0f64..400.0, d in -30.0f64..30.0) {
        let b = (a + d).max(0.0);
        let (p, q) = marcum_q1_pair(a, b).unwrap();
        prop_assert!((0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&q));
        prop_assert!((p + q - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rician_cdf_is_monotone(nu in 0.0f64..80.0, s in 0.05f64..4.0, d in 0.0f64..100.0, step in 0.0f64..2.0) {
        prop_assert!(rician_cdf(d + step, nu, s).unwrap() >= rician_cdf(d, nu, s).unwrap());
    }

    #[test]
    fn poisson_pmf_recurrence(m in 0.01f64..50.0, k in 0u64..120) {
        let a = poisson_pmf(k, m);
        let b = poisson_pmf(k + 1, m);
        if a > 1e-290 {
            prop_assert!(rel(b, a * m / (k + 1) as f64) < 1e-12);
        }
    }

    #[test]
    fn i0_scaled_consistency(x in 0.0f64..700.0) {
        let direct = bessel_i0(x).unwrap();
        prop_assert!(rel(bessel_i0e(x) * x.exp(), direct) < 1e-13);
    }
}
