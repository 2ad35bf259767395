use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

// B_{2k} / (2k (2k - 1))
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

fn is_pole(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

/// Stirling series, valid for `Re w >= 15`.
fn ln_gamma_stirling(w: C64) -> C64 {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut corr = C64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        corr += p * c;
        p *= inv2;
    }
    (w - 0.5) * w.ln() - w + LN_SQRT_2PI + corr
}

fn ln_gamma_right(z: C64) -> C64 {
    let mut w = z;
    let mut prod = C64::new(1.0, 0.0);
    let mut log_acc = C64::new(0.0, 0.0);
    while w.re < 15.0 {
        prod *= w;
        if prod.norm() > 1e150 {
            log_acc += prod.ln();
            prod = C64::new(1.0, 0.0);
        }
        w += 1.0;
    }
    ln_gamma_stirling(w) - log_acc - prod.ln()
}

/// `ln sin(πz)` without overflow for large `|Im z|` (any branch).
fn ln_sin_pi(z: C64) -> C64 {
    let i = C64::i();
    if z.im.abs() < 20.0 {
        return (z * PI).sin().ln();
    }
    if z.im > 0.0 {
        // sin(πz) = e^{-iπz} (1 - e^{2iπz}) / (-2i)
        -i * PI * z + (1.0 - (2.0 * i * PI * z).exp()).ln() - (-2.0 * i).ln()
    } else {
        // sin(πz) = e^{iπz} (1 - e^{-2iπz}) / (2i)
        i * PI * z + (1.0 - (-2.0 * i * PI * z).exp()).ln() - (2.0 * i).ln()
    }
}

/// A logarithm of `Γ(z)` (not necessarily the principal branch of log Γ).
pub fn ln_gamma(z: C64) -> Result<C64> {
    if is_pole(z) {
        return Err(Error::PoleOfGamma(z.re));
    }
    if z.re >= 0.5 {
        Ok(ln_gamma_right(z))
    } else {
        Ok(C64::from(PI.ln()) - ln_sin_pi(z) - ln_gamma_right(1.0 - z))
    }
}

/// Complex gamma function.
pub fn gamma_complex(z: C64) -> Result<C64> {
    Ok(ln_gamma(z)?.exp())
}

/// Reciprocal gamma function; zero at the poles of `Γ`.
pub fn rgamma(z: C64) -> C64 {
    match ln_gamma(z) {
        Ok(l) => (-l).exp(),
        Err(_) => C64::new(0.0, 0.0),
    }
}
