//! Slow reference implementations used to check the fast paths.
//!
//! Nothing here calls the functions it is meant to check: integrals are
//! evaluated with adaptive Gauss-Kronrod quadrature directly from their
//! definitions.

use std::f64::consts::PI;

use crate::blockage::{derived_rates, ScenarioParams};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn kronrod15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    let err = ((k - g) * h).abs().max(50.0 * f64::EPSILON * (k * h).abs());
    (k * h, err)
}

// Globally adaptive: repeatedly bisect the sub-interval with the
// largest error estimate until the total error meets the tolerance or
// the subdivision budget runs out.
fn adapt(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel: f64) -> f64 {
    const LIMIT: usize = 2000;
    let rel = rel.max(100.0 * f64::EPSILON);
    let (k, e) = kronrod15(f, a, b);
    let mut parts = vec![(a, b, k, e)];
    let mut total = k;
    let mut err = e;
    while err > rel * total.abs() && parts.len() < LIMIT {
        let (idx, _) = parts
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc });
        let (lo, hi, v, e) = parts.swap_remove(idx);
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            parts.push((lo, hi, v, 0.0));
            err -= e;
            continue;
        }
        let (k1, e1) = kronrod15(f, lo, m);
        let (k2, e2) = kronrod15(f, m, hi);
        total += k1 + k2 - v;
        err += e1 + e2 - e;
        parts.push((lo, m, k1, e1));
        parts.push((m, hi, k2, e2));
    }
    parts.iter().map(|p| p.2).sum()
}

/// Adaptive G7-K15 integral of `f` over `[a, b]`, split first into
/// `pieces` equal parts so narrow features are not missed.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, pieces: usize, rel: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let n = pieces.max(1);
    let h = (b - a) / n as f64;
    (0..n)
        .map(|i| {
            let lo = a + h * i as f64;
            let hi = if i + 1 == n { b } else { lo + h };
            adapt(f, lo, hi, rel)
        })
        .sum()
}

pub fn erf(x: f64) -> f64 {
    let v = integrate(&|t: f64| (-t * t).exp(), 0.0, x.abs().min(10.0), 4, 1e-15);
    let v = 2.0 / PI.sqrt() * v;
    if x < 0.0 { -v } else { v }
}

/// `exp(-|z|) I0(z)`: power series for small `|z|`, otherwise
/// `(1/pi) integral_0^pi exp(-2 z sin^2(t/2)) dt`.
pub fn bessel_i0e(z: f64) -> f64 {
    let z = z.abs();
    if z <= 25.0 {
        let q = 0.25 * z * z;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        while term > 1e-18 * sum {
            term *= q / (k * k);
            sum += term;
            k += 1.0;
        }
        return sum * (-z).exp();
    }
    // Beyond t_cut the integrand is below exp(-100).
    let cut = 2.0 * (50.0 / z).sqrt().min(1.0).asin();
    let f = |t: f64| {
        let s = (0.5 * t).sin();
        (-2.0 * z * s * s).exp()
    };
    integrate(&f, 0.0, cut, 1, 1e-15) / PI
}

pub fn bessel_i0(x: f64) -> f64 {
    bessel_i0e(x) * x.abs().exp()
}

fn marcum_integrand(a: f64) -> impl Fn(f64) -> f64 {
    move |x: f64| x * (-0.5 * (x - a) * (x - a)).exp() * bessel_i0e(a * x)
}

/// `Q1(a, b)` as the upper-tail integral of the scaled integrand.
pub fn marcum_q1(a: f64, b: f64) -> f64 {
    let lo = b.max(a - 12.0);
    let hi = b.max(a) + 12.0;
    integrate(&marcum_integrand(a), lo, hi, ((hi - lo) / 4.0).ceil().max(1.0) as usize, 1e-13)
}

/// `1 - Q1(a, b)` as the lower-tail integral.
pub fn marcum_p1(a: f64, b: f64) -> f64 {
    let lo = if b < a - 12.0 { (b - 12.0).max(0.0) } else { (a - 12.0).max(0.0) };
    let hi = b.min(a + 12.0).max(lo);
    integrate(&marcum_integrand(a), lo, hi, ((hi - lo) / 4.0).ceil().max(1.0) as usize, 1e-13)
}

pub fn rician_cdf(d: f64, nu: f64, sigma: f64) -> f64 {
    if d <= 0.0 {
        return 0.0;
    }
    marcum_p1(nu / sigma, d / sigma)
}

/// Window of the inner Gaussian average in [`p_available`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JitterWindow {
    /// `mu +- 3 sigma`.
    ThreeSigma,
    /// The whole real line.
    Full,
}

/// Availability as a double integral: outer over `mu_r` with density
/// `2 mu / R^2` on `[0, R]`, inner over `r ~ N(mu, sigma^2)` of
/// `(1 - theta/2pi) exp(-(eps r + eps_0))`.
pub fn p_available(p: &ScenarioParams, window: JitterWindow) -> f64 {
    let d = derived_rates(p);
    let open = 1.0 - p.theta / (2.0 * PI);
    let s = p.sigma;
    let cond = |r: f64| (-(d.epsilon * r + d.epsilon_0)).exp();
    let inner = |mu: f64| {
        if s == 0.0 {
            return cond(mu);
        }
        let half = match window {
            JitterWindow::ThreeSigma => 3.0 * s,
            JitterWindow::Full => 40.0 * s,
        };
        let g = |r: f64| {
            let z = (r - mu) / s;
            (-0.5 * z * z).exp() / (s * (2.0 * PI).sqrt()) * cond(r)
        };
        integrate(&g, mu - half, mu + half, 6, 1e-14)
    };
    let r = p.r_cell;
    let outer = |mu: f64| 2.0 * mu / (r * r) * inner(mu);
    open * integrate(&outer, 0.0, r, 8, 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_on_smooth_functions() {
        let v = integrate(&|x: f64| x.exp(), 0.0, 1.0, 1, 1e-15);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-15);
        let v = integrate(&|x: f64| x.sin(), 0.0, PI, 1, 1e-15);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn oracle_bessel_branches() {
        assert!((bessel_i0(1.0) - 1.2660658777520082).abs() < 1e-14);
        // Both branches near the switch, against a reference value.
        let i25 = 5.7745606064663105e9;
        assert!((bessel_i0(25.0) / i25 - 1.0).abs() < 1e-13);
        assert!((bessel_i0(25.000001) / bessel_i0(25.0) - 1.0 - 1e-6 * 0.979791453490516).abs() < 1e-11);
    }

    #[test]
    fn oracle_marcum_complement() {
        for &(a, b) in &[(1.0, 1.0), (5.0, 3.0), (40.0, 41.0), (300.0, 295.0)] {
            let s = marcum_q1(a, b) + marcum_p1(a, b);
            assert!((s - 1.0).abs() < 1e-12, "a={a} b={b} {s}");
        }
        assert!((marcum_q1(1.0, 1.0) - 0.7328798037968202).abs() < 1e-13);
    }
}
