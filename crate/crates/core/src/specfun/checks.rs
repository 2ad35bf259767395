//! Identity residuals used to monitor the special-function layer at run time.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::{gauss_2f1, gauss_2f1_dz, pcf_d, pcf_d_derivative, rgamma, SeriesControl};
use crate::error::Result;

/// Relative residual of `W[D_η(ξ), D_η(−ξ)] = √(2π)/Γ(−η)`.
pub fn pcf_wronskian_residual(eta: C64, xi: C64, ctl: &SeriesControl) -> Result<f64> {
    let f = pcf_d(eta, xi, ctl)?;
    let fp = pcf_d_derivative(eta, xi, ctl)?;
    let g = pcf_d(eta, -xi, ctl)?;
    let gp = -pcf_d_derivative(eta, -xi, ctl)?;
    let expect = (2.0 * PI).sqrt() * rgamma(-eta);
    Ok((f * gp - fp * g - expect).norm() / expect.norm())
}

/// Relative residual of the Wronskian of the two hypergeometric solutions
/// around `z = 1`, `(a+b−c)(1−z)^{c−a−b−1} z^{−c}`.
pub fn hyp2f1_wronskian_residual(a: C64, b: C64, c: C64, z: f64, ctl: &SeriesControl) -> Result<f64> {
    let y = 1.0 - z;
    let s = c - a - b;
    let p1 = 1.0 - s;
    let w1 = gauss_2f1(a, b, p1, y, ctl)?;
    let w1p = -gauss_2f1_dz(a, b, p1, y, ctl)?;
    let p2 = 1.0 + s;
    let f2 = gauss_2f1(c - a, c - b, p2, y, ctl)?;
    let f2p = gauss_2f1_dz(c - a, c - b, p2, y, ctl)?;
    let ys = C64::from(y).powc(s);
    let w2 = ys * f2;
    let w2p = -s * ys / y * f2 - ys * f2p;
    let expect = -s * C64::from(y).powc(s - 1.0) * C64::from(z).powc(-c);
    Ok((w1 * w2p - w1p * w2 - expect).norm() / expect.norm())
}
