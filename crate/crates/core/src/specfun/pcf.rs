use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use num_complex::Complex64 as C64;

use super::dd::{CDd, Dd};
use super::gamma::{ln_gamma, rgamma};
use super::SeriesControl;
use crate::error::{Error, Result};

const EPS: f64 = f64::EPSILON;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
// Kummer terms grow like e^{|ξ|²/2}; beyond this the series overflows.
const SERIES_MAX_ABS: f64 = 30.0;
// Below this the large-argument expansion has no useful terms.
const ASYMPTOTIC_MIN_ABS: f64 = 1.0;
// Accept the primary representation without consulting the other one.
const GOOD_ENOUGH: f64 = 1e-12;

/// Value together with an estimated absolute error.
#[derive(Debug, Clone, Copy)]
struct Est {
    value: C64,
    abs_err: f64,
}

impl Est {
    fn rel_err(&self) -> f64 {
        if self.abs_err == 0.0 {
            0.0
        } else {
            self.abs_err / self.value.norm()
        }
    }
}

/// Kummer `M(a, b, z)` summed in double-double precision; returns the sum and
/// `Σ|terms|`.
fn kummer_m(a: CDd, b: f64, z: CDd, ctl: &SeriesControl) -> Result<(C64, f64)> {
    let mut term = CDd::from_c64(C64::new(1.0, 0.0));
    let mut sum = term;
    let mut abs_sum = 1.0;
    let mut small = 0;
    for k in 0..ctl.max_terms {
        let kf = k as f64;
        term = (term * a.add_f64(kf) * z).div_f64((b + kf) * (kf + 1.0));
        sum = sum + term;
        let tn = term.norm();
        abs_sum += tn;
        if tn <= ctl.rel_tol * sum.norm() {
            small += 1;
            if small >= 2 {
                return Ok((sum.to_c64(), abs_sum));
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NoConvergence {
        routine: "kummer_m",
        detail: format!("a={}, b={b}, z={} after {} terms", a.to_c64(), z.to_c64(), ctl.max_terms),
    })
}

fn series_est(eta: C64, xi: C64, ctl: &SeriesControl) -> Result<Est> {
    let z = CDd::from_c64(xi).sqr().div_f64(2.0);
    let a1 = CDd::from_c64(-eta * 0.5);
    let a2 = CDd::new(Dd::new(1.0) + Dd::new(-eta.re), Dd::new(-eta.im)).div_f64(2.0);
    let (m1, s1) = kummer_m(a1, 0.5, z, ctl)?;
    let (m2, s2) = kummer_m(a2, 1.5, z, ctl)?;
    let r1 = rgamma((1.0 - eta) * 0.5);
    let r2 = rgamma(-eta * 0.5);
    let exponent = eta * 0.5 * 2f64.ln() - xi * xi * 0.25;
    let pre = exponent.exp() * PI.sqrt();
    let c2 = xi * SQRT_2 * r2;
    let p1 = pre * r1 * m1;
    let p2 = pre * c2 * m2;
    let value = p1 - p2;
    // f64 rounding in the gamma factors and prefactor, plus the double-double
    // cancellation inside the sums
    let factor_err = EPS * (32.0 + exponent.norm() + 2.0 * ln_scale(eta)) * (p1.norm() + p2.norm());
    let sum_err = 4.0 * EPS * EPS * pre.norm() * (r1.norm() * s1 + c2.norm() * s2);
    Ok(Est {
        value,
        abs_err: factor_err + sum_err,
    })
}

// Relative accuracy of the gamma factors degrades with the size of their logarithm.
fn ln_scale(eta: C64) -> f64 {
    1.0 + 0.5 * eta.norm() * (1.0 + eta.norm()).ln()
}

/// Large-argument expansion, used for `|arg ξ| < π/2`.
fn asymptotic_direct(eta: C64, xi: C64, ctl: &SeriesControl) -> Est {
    let w = -2.0 / (xi * xi);
    let a = -eta * 0.5;
    let b = (1.0 - eta) * 0.5;
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    let mut err = f64::INFINITY;
    for k in 0..ctl.max_terms {
        let kf = k as f64;
        let next = term * (a + kf) * (b + kf) * w / (kf + 1.0);
        let nn = next.norm();
        if nn == 0.0 {
            err = 0.0;
            break;
        }
        if nn > term.norm() {
            // divergence sets in; the smallest term bounds the error
            err = term.norm();
            break;
        }
        sum += next;
        term = next;
        if nn <= ctl.rel_tol * sum.norm() {
            err = nn;
            break;
        }
    }
    let pre = (eta * xi.ln() - xi * xi * 0.25).exp();
    let err = if err.is_finite() { err } else { term.norm() };
    Est {
        value: pre * sum,
        abs_err: pre.norm() * (err + 2.0 * EPS * sum.norm()),
    }
}

fn asymptotic_est(eta: C64, xi: C64, ctl: &SeriesControl) -> Result<Est> {
    let arg = xi.arg();
    if arg.abs() < FRAC_PI_2 {
        return Ok(asymptotic_direct(eta, xi, ctl));
    }
    // connection to arguments inside the right half-plane
    let i = C64::i();
    let s = if arg > 0.0 { 1.0 } else { -1.0 };
    let d1 = asymptotic_direct(eta, -xi, ctl);
    let d2 = asymptotic_direct(-eta - 1.0, -s * i * xi, ctl);
    let c1 = (s * i * PI * eta).exp();
    let c2 = match ln_gamma(-eta) {
        Ok(lg) => (C64::from(LN_SQRT_2PI) - lg + s * i * (eta + 1.0) * FRAC_PI_2).exp(),
        Err(_) => C64::new(0.0, 0.0),
    };
    let value = c1 * d1.value + c2 * d2.value;
    let abs_err = c1.norm() * d1.abs_err
        + c2.norm() * d2.abs_err
        + 4.0 * EPS * (c1.norm() * d1.value.norm() + c2.norm() * d2.value.norm());
    Ok(Est { value, abs_err })
}

fn select(eta: C64, xi: C64, ctl: &SeriesControl) -> Result<Est> {
    ctl.validate()?;
    if !(eta.re.is_finite() && eta.im.is_finite() && xi.re.is_finite() && xi.im.is_finite()) {
        return Err(Error::InvalidParameter(format!("D_{eta}({xi})")));
    }
    let r = xi.norm();
    let can_series = r <= SERIES_MAX_ABS;
    let can_asym = r >= ASYMPTOTIC_MIN_ABS;
    let primary_series = r <= ctl.regime_radius;
    let first = if primary_series && can_series || !can_asym {
        series_est(eta, xi, ctl)
    } else {
        asymptotic_est(eta, xi, ctl)
    };
    if let Ok(e) = first {
        if e.rel_err() <= ctl.max_rel_error.min(GOOD_ENOUGH) && e.value.norm().is_finite() {
            return Ok(e);
        }
    }
    let second = if primary_series && can_series || !can_asym {
        if can_asym {
            Some(asymptotic_est(eta, xi, ctl))
        } else {
            None
        }
    } else if can_series {
        Some(series_est(eta, xi, ctl))
    } else {
        None
    };
    let mut best: Option<Est> = first.ok().filter(|e| e.value.norm().is_finite());
    if let Some(Ok(e)) = second {
        if e.value.norm().is_finite() && best.is_none_or(|b| e.rel_err() < b.rel_err()) {
            best = Some(e);
        }
    }
    match best {
        Some(e) if e.rel_err() <= ctl.max_rel_error => Ok(e),
        Some(e) => Err(Error::NoConvergence {
            routine: "pcf_d",
            detail: format!(
                "D_{eta}({xi}): estimated relative error {:.2e} exceeds {:.2e}",
                e.rel_err(),
                ctl.max_rel_error
            ),
        }),
        None => Err(Error::NoConvergence {
            routine: "pcf_d",
            detail: format!("D_{eta}({xi}): no representation converged"),
        }),
    }
}

/// Parabolic cylinder function `D_η(ξ)` for complex order and argument.
pub fn pcf_d(eta: C64, xi: C64, ctl: &SeriesControl) -> Result<C64> {
    select(eta, xi, ctl).map(|e| e.value)
}

/// `D_η(ξ)` together with its estimated relative error.
pub fn pcf_d_with_error(eta: C64, xi: C64, ctl: &SeriesControl) -> Result<(C64, f64)> {
    select(eta, xi, ctl).map(|e| (e.value, e.rel_err()))
}

/// `D_η(ξ)` from the Maclaurin representation alone, with its relative error estimate.
pub fn pcf_d_series(eta: C64, xi: C64, ctl: &SeriesControl) -> Result<(C64, f64)> {
    ctl.validate()?;
    series_est(eta, xi, ctl).map(|e| (e.value, e.rel_err()))
}

/// `D_η(ξ)` from the large-argument expansion (with the connection formula
/// for `|arg ξ| >= π/2`), with its relative error estimate.
pub fn pcf_d_asymptotic(eta: C64, xi: C64, ctl: &SeriesControl) -> Result<(C64, f64)> {
    ctl.validate()?;
    if xi.norm() < ASYMPTOTIC_MIN_ABS {
        return Err(Error::InvalidParameter(format!(
            "asymptotic expansion needs |ξ| >= {ASYMPTOTIC_MIN_ABS}, got {xi}"
        )));
    }
    asymptotic_est(eta, xi, ctl).map(|e| (e.value, e.rel_err()))
}

/// `dD_η/dξ = η D_{η-1}(ξ) - (ξ/2) D_η(ξ)`.
pub fn pcf_d_derivative(eta: C64, xi: C64, ctl: &SeriesControl) -> Result<C64> {
    let lo = pcf_d(eta - 1.0, xi, ctl)?;
    let d = pcf_d(eta, xi, ctl)?;
    Ok(eta * lo - xi * 0.5 * d)
}
