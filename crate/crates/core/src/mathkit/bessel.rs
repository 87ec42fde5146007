use crate::error::{Error, Result};

const SERIES_LIMIT: f64 = 20.0;
const OVERFLOW_LIMIT: f64 = 700.0;

// Power series, all terms positive.
fn i0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term <= sum * 1e-17 {
            return sum;
        }
        k += 1.0;
    }
}

// Hankel expansion of exp(-x) I0(x), x > SERIES_LIMIT. The smallest term
// is near exp(-2x), far below f64 resolution at the switch point.
fn i0e_asymptotic(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..64 {
        let m = (2 * k - 1) as f64;
        term *= m * m / (8.0 * k as f64 * x);
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    sum / (2.0 * std::f64::consts::PI * x).sqrt()
}

/// Modified Bessel function of the first kind, order zero.
///
/// Returns [`Error::Overflow`] for `|x| > 700` and [`Error::Domain`] for
/// non-finite input.
pub fn bessel_i0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain {
            what: "bessel_i0",
            value: x,
            expected: "finite argument",
        });
    }
    let ax = x.abs();
    if ax > OVERFLOW_LIMIT {
        return Err(Error::Overflow {
            what: "bessel_i0",
            value: x,
        });
    }
    if ax <= SERIES_LIMIT {
        Ok(i0_series(ax))
    } else {
        Ok(ax.exp() * i0e_asymptotic(ax))
    }
}

/// Exponentially scaled `exp(-|x|) I0(x)`, finite for every finite `x`.
pub fn bessel_i0e(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= SERIES_LIMIT {
        i0_series(ax) * (-ax).exp()
    } else {
        i0e_asymptotic(ax)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(bessel_i0(0.0).unwrap(), 1.0);
        assert!((bessel_i0(1.0).unwrap() - 1.2660658777520082).abs() < 1e-15);
        assert!((bessel_i0(5.0).unwrap() / 27.239871823604442 - 1.0).abs() < 1e-14);
        assert_eq!(bessel_i0(-3.0).unwrap(), bessel_i0(3.0).unwrap());
    }

    #[test]
    fn branches_agree_at_switch() {
        let x = SERIES_LIMIT;
        let s = i0_series(x) * (-x).exp();
        let a = i0e_asymptotic(x);
        assert!((s / a - 1.0).abs() < 1e-14, "{s} {a}");
    }

    #[test]
    fn overflow_and_domain() {
        assert!(matches!(bessel_i0(701.0), Err(Error::Overflow { .. })));
        assert!(bessel_i0(700.0).unwrap().is_finite());
        assert!(matches!(bessel_i0(f64::NAN), Err(Error::Domain { .. })));
    }

    #[test]
    fn scaled_large_argument() {
        let z = 1e12;
        let expected = 1.0 / (2.0 * std::f64::consts::PI * z).sqrt();
        assert!((bessel_i0e(z) / expected - 1.0).abs() < 1e-12);
    }
}
