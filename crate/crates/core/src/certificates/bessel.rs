//! First positive zero of the Bessel function `J_ν`.

use crate::error::{Error, Result};

/// Bracketing stops here.
const CAP: f64 = 40.0;
const STEP: f64 = 0.1;

/// `J_ν(x)·Γ(ν+1)·(2/x)^ν`, which has the same positive zeros as `J_ν` and is
/// an entire function of `x²`.
pub fn scaled_bessel_j(nu: f64, x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= -q / (k * (nu + k));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) && k > q.sqrt() {
            return sum;
        }
        if k > 500.0 {
            return sum;
        }
    }
}

/// `j_{ν,1}`, the first positive zero of `J_ν`, for `ν ≥ −1/2`.
pub fn bessel_first_zero(nu: f64) -> Result<f64> {
    if !(nu.is_finite() && nu >= -0.5) {
        return Err(Error::Precondition(format!("Bessel order must be ≥ −1/2, got {nu}")));
    }
    let mut lo = 0.0;
    let mut f_lo = scaled_bessel_j(nu, lo);
    let hi_start = loop {
        let hi = lo + STEP;
        if hi > CAP {
            return Err(Error::BracketNotFound { order: nu, cap: CAP });
        }
        let f_hi = scaled_bessel_j(nu, hi);
        if f_hi == 0.0 {
            return Ok(hi);
        }
        if f_hi.signum() != f_lo.signum() {
            break hi;
        }
        lo = hi;
        f_lo = f_hi;
    };
    let mut hi = hi_start;
    while hi - lo > 1e-15 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = scaled_bessel_j(nu, mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn half_order_is_pi() {
        assert!((bessel_first_zero(0.5).unwrap() - PI).abs() < 1e-10 * PI);
        assert!((bessel_first_zero(-0.5).unwrap() - PI / 2.0).abs() < 1e-10);
    }

    #[test]
    fn order_zero() {
        assert!((bessel_first_zero(0.0).unwrap() - 2.404_825_557_695_773).abs() < 1e-10);
    }

    #[test]
    fn known_orders() {
        assert!((bessel_first_zero(1.0).unwrap() - 3.831_705_970_207_512).abs() < 1e-10);
        assert!((bessel_first_zero(1.5).unwrap() - 4.493_409_457_909_064).abs() < 1e-10);
    }

    #[test]
    fn sine_closed_form() {
        // J̃_{1/2}(x) = sin(x)/x
        for x in [0.3, 1.0, 2.5, 6.0] {
            assert!((scaled_bessel_j(0.5, x) - x.sin() / x).abs() < 1e-13);
        }
    }

    #[test]
    fn increasing_in_order() {
        let zeros: Vec<f64> = (0..20).map(|k| bessel_first_zero(-0.5 + 0.25 * k as f64).unwrap()).collect();
        assert!(zeros.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn rejects_low_order() {
        assert!(matches!(bessel_first_zero(-1.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn cap_reported() {
        assert!(matches!(bessel_first_zero(60.0), Err(Error::BracketNotFound { .. })));
    }
}
