use std::f64::consts::E;

use crate::error::{Error, Result};

/// Lower real branch `W₋₁(a)` of the Lambert function, `-1/e <= a < 0`.
pub fn lambert_w_m1(a: f64) -> Result<f64> {
    let branch_point = -(-1.0f64).exp();
    if !(a >= branch_point && a < 0.0) {
        return Err(Error::OutOfDomain(a));
    }
    if a == branch_point {
        return Ok(-1.0);
    }
    let mut w = if a < -0.25 {
        let p = -(2.0 * (1.0 + E * a)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else {
        let l1 = (-a).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    };
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - a;
        if f == 0.0 || w == -1.0 {
            break;
        }
        let wp1 = w + 1.0;
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        let next = w - step;
        if !next.is_finite() {
            break;
        }
        let done = (next - w).abs() <= 4.0 * f64::EPSILON * w.abs();
        w = next.min(-1.0);
        if done {
            break;
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference: bisection on the monotone map w -> w e^w over (-∞, -1].
    fn bisect(a: f64) -> f64 {
        let (mut lo, mut hi) = (-800.0f64, -1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid * mid.exp() > a {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn reference_values() {
        assert!((lambert_w_m1(-0.1).unwrap() + 3.577_152_063_957_297).abs() < 1e-13);
        assert!((lambert_w_m1(-0.049_673).unwrap() + 4.508_189_351_872_123).abs() < 1e-12);
        assert_eq!(lambert_w_m1(-(-1.0f64).exp()).unwrap(), -1.0);
    }

    #[test]
    fn matches_bisection_and_residual() {
        for &a in &[-0.367_879, -0.36, -0.3, -0.2, -1e-3, -1e-12, -1e-200] {
            let w = lambert_w_m1(a).unwrap();
            assert!((w * w.exp() - a).abs() <= 1e-14, "a={a}");
            assert!(w <= -1.0);
            let b = bisect(a);
            assert!((w - b).abs() <= 1e-9 * b.abs(), "a={a}: {w} vs {b}");
        }
    }

    #[test]
    fn out_of_domain() {
        assert_eq!(lambert_w_m1(0.0), Err(Error::OutOfDomain(0.0)));
        assert!(lambert_w_m1(-0.4).is_err());
        assert!(lambert_w_m1(0.1).is_err());
        assert!(lambert_w_m1(f64::NAN).is_err());
    }
}
