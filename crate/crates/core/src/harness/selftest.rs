//! Fast special functions against the quadrature and series oracles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::time::Instant;

use crate::mathkit;
use crate::oracle;

/// Values below this are treated as underflow and compared absolutely.
const TINY: f64 = 1e-280;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub name: &'static str,
    pub points: usize,
    pub max_rel_err: f64,
    /// Arguments at the worst point.
    pub worst_at: Vec<f64>,
    pub tolerance: f64,
    pub seconds: f64,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.max_rel_err <= self.tolerance
    }

    pub fn line(&self) -> String {
        format!(
            "{:<12} {:>5} points  max rel err {:.3e} (tol {:.0e}) at {:?}  {:.2}s  {}",
            self.name,
            self.points,
            self.max_rel_err,
            self.tolerance,
            self.worst_at,
            self.seconds,
            if self.passed() { "ok" } else { "FAILED" }
        )
    }
}

fn rel_err(fast: f64, slow: f64) -> f64 {
    if slow.abs() < TINY {
        return if fast.abs() < TINY { 0.0 } else { f64::INFINITY };
    }
    ((fast - slow) / slow).abs()
}

fn check(
    name: &'static str,
    points: usize,
    tolerance: f64,
    rng: &mut ChaCha8Rng,
    mut draw: impl FnMut(&mut ChaCha8Rng) -> Vec<f64>,
    eval: impl Fn(&[f64]) -> (f64, f64),
) -> OracleReport {
    let start = Instant::now();
    let mut worst = (0.0, Vec::new());
    for _ in 0..points {
        let x = draw(rng);
        let (fast, slow) = eval(&x);
        let e = rel_err(fast, slow);
        if !(e <= worst.0) {
            worst = (e, x);
        }
    }
    OracleReport {
        name,
        points,
        max_rel_err: worst.0,
        worst_at: worst.1,
        tolerance,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Compares `erf`, `bessel_i0`, `marcum_q1` and `rician_cdf` with the
/// oracles at `points` random arguments each.
///
/// Domains: `erf` on `[-6, 6]`; `I0` on `[0, 700]`; `Q1(a, b)` with
/// `a` on `[0, 80]` and `b` within 12 of `a`; the Rician CDF with
/// `nu` on `[0, 60]`, `sigma` on `[0.05, 5]` and `d` within six
/// `sigma` of `nu`.
pub fn special_function_report(points: usize, seed: u64) -> Vec<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    vec![
        check(
            "erf",
            points,
            1e-12,
            &mut rng,
            |r| vec![r.random_range(-6.0..6.0)],
            |x| (mathkit::erf(x[0]), oracle::erf(x[0])),
        ),
        check(
            "bessel_i0",
            points,
            1e-12,
            &mut rng,
            |r| vec![r.random_range(0.0..700.0)],
            |x| (mathkit::bessel_i0(x[0]).unwrap_or(f64::NAN), oracle::bessel_i0(x[0])),
        ),
        check(
            "marcum_q1",
            points,
            1e-9,
            &mut rng,
            |r| {
                let a: f64 = r.random_range(0.0..80.0);
                let b: f64 = (a + r.random_range(-12.0..12.0)).max(1e-3);
                vec![a, b]
            },
            |x| (mathkit::marcum_q1(x[0], x[1]).unwrap_or(f64::NAN), oracle::marcum_q1(x[0], x[1])),
        ),
        check(
            "rician_cdf",
            points,
            1e-12,
            &mut rng,
            |r| {
                let nu: f64 = r.random_range(0.0..60.0);
                let s: f64 = r.random_range(0.05..5.0);
                let d: f64 = (nu + s * r.random_range(-6.0..6.0)).max(1e-3 * s);
                vec![d, nu, s]
            },
            |x| (mathkit::rician_cdf(x[0], x[1], x[2]).unwrap_or(f64::NAN), oracle::rician_cdf(x[0], x[1], x[2])),
        ),
    ]
}
