use num_complex::Complex64 as C64;

use super::SeriesControl;
use crate::error::{Error, Result};

/// Gauss hypergeometric `₂F₁(a, b; c; z)` for real `0 <= z < 1`.
///
/// Summation stops once two consecutive terms fall below `rel_tol` times the
/// partial sum. The result is rejected if cancellation pushes the estimated
/// relative error above `max_rel_error`.
pub fn gauss_2f1(a: C64, b: C64, c: C64, z: f64, ctl: &SeriesControl) -> Result<C64> {
    ctl.validate()?;
    if !(0.0..1.0).contains(&z) {
        return Err(Error::InvalidParameter(format!("2F1 argument {z} outside [0, 1)")));
    }
    if c.im == 0.0 && c.re <= 0.0 && c.re.fract() == 0.0 {
        return Err(Error::InvalidParameter(format!("2F1 with c = {c}")));
    }
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    let mut abs_sum = 1.0;
    let mut small = 0;
    for k in 0..ctl.max_terms {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
        abs_sum += term.norm();
        if term.norm() <= ctl.rel_tol * sum.norm() {
            small += 1;
            if small >= 2 {
                let est = 4.0 * f64::EPSILON * abs_sum / sum.norm();
                if est > ctl.max_rel_error {
                    return Err(Error::NoConvergence {
                        routine: "gauss_2f1",
                        detail: format!(
                            "cancellation: estimated relative error {est:.2e} at a={a}, b={b}, c={c}, z={z}"
                        ),
                    });
                }
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NoConvergence {
        routine: "gauss_2f1",
        detail: format!("a={a}, b={b}, c={c}, z={z} after {} terms", ctl.max_terms),
    })
}

/// `d₂F₁/dz = (ab/c) ₂F₁(a+1, b+1; c+1; z)`.
pub fn gauss_2f1_dz(a: C64, b: C64, c: C64, z: f64, ctl: &SeriesControl) -> Result<C64> {
    Ok(a * b / c * gauss_2f1(a + 1.0, b + 1.0, c + 1.0, z, ctl)?)
}
