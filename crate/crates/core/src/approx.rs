//! Approximate final infidelities: Landau-Zener, the diabatic limit and
//! second-order adiabatic perturbation theory.

use std::f64::consts::{E, PI, SQRT_2};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::{
    eigensystem, hamiltonian_gradient, matrix_element, metric_speed_at, path_point, PathSpec, Variant,
};
use crate::quad;
use crate::specfun::lambert_w_m1;

/// Range of durations in which the Landau-Zener formula applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LZWindow {
    Present { t_minus: f64, t_plus: f64 },
    Absent,
}

impl LZWindow {
    pub fn bounds(&self) -> Option<(f64, f64)> {
        match *self {
            Self::Present { t_minus, t_plus } => Some((t_minus, t_plus)),
            Self::Absent => None,
        }
    }
}

/// Excitation probability `exp(−π x0²/u)` after an infinite linear sweep with
/// minimum distance `x0` from the degeneracy and speed `u`.
pub fn lz_formula(x0: f64, u: f64) -> f64 {
    (-PI * x0 * x0 / u).exp()
}

/// Landau-Zener estimate `exp(−π x0² T / (2 z0))` of the final path-A infidelity.
pub fn lz_final_infidelity(s: &PathSpec) -> Result<f64> {
    if s.variant != Variant::A {
        return Err(Error::SolverMismatch { expected: Variant::A, found: s.variant });
    }
    Ok((-PI * s.x0 * s.x0 * s.duration / (2.0 * s.z0)).exp())
}

fn positive(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

/// `T± = (8 z0³/x0⁴)(1 ± √(1 − x0⁴/4z0⁴))`, present only for `z0/x0 > 1/√2`.
pub fn lz_validity_window(x0: f64, z0: f64) -> LZWindow {
    if !positive(x0) || !positive(z0) {
        return LZWindow::Absent;
    }
    let ratio = x0 / z0;
    let disc = 1.0 - 0.25 * ratio.powi(4);
    // the boundary z0/x0 = 1/√2 itself is excluded
    if disc <= 4.0 * f64::EPSILON {
        return LZWindow::Absent;
    }
    let root = disc.sqrt();
    let pre = 8.0 * z0.powi(3) / x0.powi(4);
    LZWindow::Present {
        t_minus: 2.0 / (z0 * (1.0 + root)),
        t_plus: pre * (1.0 + root),
    }
}

/// Sudden-quench limit `z0²/r0²` of the final infidelity.
pub fn diabatic_limit(s: &PathSpec) -> f64 {
    let r0 = s.r0();
    (s.z0 / r0).powi(2)
}

/// `ln((r0 + z0)/(r0 − z0)) = 2 asinh(z0/x0)`.
fn log_ratio(s: &PathSpec) -> f64 {
    2.0 * (s.z0 / s.x0).asinh()
}

/// Upper envelope of the second-order adiabatic estimate.
pub fn apt_envelope(s: &PathSpec) -> f64 {
    let t2 = s.duration * s.duration;
    let r0 = s.r0();
    match s.variant {
        Variant::A => (s.x0 * s.z0).powi(2) / (r0.powi(6) * t2),
        Variant::B | Variant::C => (s.alpha0() / r0).powi(2) / t2,
    }
}

/// Closed-form second-order adiabatic estimate of the final infidelity.
pub fn apt_final_infidelity(s: &PathSpec) -> f64 {
    let tt = s.duration;
    let r0 = s.r0();
    let arg = match s.variant {
        Variant::A => 0.5 * tt * (r0 + s.x0 * s.x0 / (2.0 * s.z0) * log_ratio(s)),
        Variant::B => 0.5 * tt * s.x0 / s.alpha0() * log_ratio(s),
        Variant::C => tt * r0,
    };
    apt_envelope(s) * arg.sin().powi(2)
}

/// `∫₀ᵀ ΔE(r(t)) dt`; closed forms for A and C, quadrature for B.
pub fn dynamical_phase_difference(s: &PathSpec) -> f64 {
    let tt = s.duration;
    match s.variant {
        Variant::A => tt * (s.r0() + s.x0 * s.x0 / (2.0 * s.z0) * log_ratio(s)),
        Variant::C => 2.0 * s.r0() * tt,
        Variant::B => gap_integral(s),
    }
}

/// `∫₀ᵀ ΔE(r(t)) dt` by adaptive quadrature, for any variant.
pub fn gap_integral(s: &PathSpec) -> f64 {
    let tt = s.duration;
    let gap = |t: f64| path_point(s, t.clamp(0.0, tt)).map(|p| p.gap()).unwrap_or(0.0);
    quad::integrate_split(gap, &[0.0, 0.5 * tt, tt], 1e-13)
}

/// The general two-level second-order term, assembled from boundary metric
/// speeds, gaps and Hamiltonian-gradient matrix elements.
pub fn apt_general_second_order(s: &PathSpec) -> Result<f64> {
    let tt = s.duration;
    let grad = hamiltonian_gradient();
    let boundary = |t: f64| -> Result<_> {
        let p = path_point(s, t)?;
        let vel = s.velocity(t)?;
        let e = eigensystem(&p)?;
        let gap2 = (e.e1 - e.e0).powi(2);
        let v = metric_speed_at(&p, vel)?;
        Ok((e, vel, gap2, v))
    };
    let (e_t, vel_t, gap2_t, v_t) = boundary(tt)?;
    let (e_0, vel_0, gap2_0, v_0) = boundary(0.0)?;
    let mut cross = C64::new(0.0, 0.0);
    for (mu, g_mu) in grad.iter().enumerate() {
        let left = matrix_element(&e_t.ground, g_mu, &e_t.excited) / gap2_t;
        for (nu, g_nu) in grad.iter().enumerate() {
            let right = matrix_element(&e_0.excited, g_nu, &e_0.ground) / gap2_0;
            cross += vel_t[mu] * vel_0[nu] * left * right;
        }
    }
    let phase = C64::from_polar(1.0, -dynamical_phase_difference(s));
    Ok(v_t * v_t / gap2_t + v_0 * v_0 / gap2_0 - 2.0 * (phase * cross).re)
}

/// Argument of `W₋₁` in the crossover condition.
pub fn crossover_lambert_argument(x0: f64, z0: f64) -> f64 {
    let r0 = x0.hypot(z0);
    -PI * (x0 / r0).powi(3) / (4.0 * SQRT_2)
}

/// Smallest `z0/x0` for which the crossover time exists.
pub fn crossover_existence_threshold() -> f64 {
    ((E * PI / (4.0 * SQRT_2)).powf(2.0 / 3.0) - 1.0).sqrt()
}

/// Duration at which the Landau-Zener estimate meets half the adiabatic
/// envelope of path A; `None` when the crossing does not exist.
pub fn crossover_time(x0: f64, z0: f64) -> Option<f64> {
    if !positive(x0) || !positive(z0) {
        return None;
    }
    let w = lambert_w_m1(crossover_lambert_argument(x0, z0)).ok()?;
    Some(-4.0 * z0 / (PI * x0 * x0) * w)
}

/// All approximations for one path and duration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproximationReport {
    /// Only defined for path A.
    pub lz_value: Option<f64>,
    pub lz_window: LZWindow,
    pub diabatic_limit: f64,
    pub apt_value: f64,
    pub apt_envelope: f64,
    pub crossover_time: Option<f64>,
}

pub fn approximation_report(s: &PathSpec) -> ApproximationReport {
    ApproximationReport {
        lz_value: lz_final_infidelity(s).ok(),
        lz_window: lz_validity_window(s.x0, s.z0),
        diabatic_limit: diabatic_limit(s),
        apt_value: apt_final_infidelity(s),
        apt_envelope: apt_envelope(s),
        crossover_time: crossover_time(s.x0, s.z0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(v: Variant, x0: f64, z0: f64, t: f64) -> PathSpec {
        PathSpec::new(v, x0, z0, t).unwrap()
    }

    #[test]
    fn lz_values() {
        let v = lz_final_infidelity(&spec(Variant::A, 0.063, 0.126, 100.0)).unwrap();
        assert!((v - 0.007_097_530_094_977_158).abs() < 1e-15);
        let v = lz_final_infidelity(&spec(Variant::A, 0.2, 0.5, 5.0)).unwrap();
        assert!((v - 0.533_488_091_091_103_3).abs() < 1e-15);
        assert!((lz_final_infidelity(&spec(Variant::A, 0.2, 0.5, 1e-300)).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            lz_final_infidelity(&spec(Variant::B, 0.2, 0.5, 5.0)),
            Err(Error::SolverMismatch { .. })
        ));
    }

    #[test]
    fn infinite_line_form_agrees() {
        for &(x0, z0, t) in &[(0.063, 0.126, 100.0), (0.2, 0.5, 5.0), (1.0, 0.1, 0.3)] {
            let a = lz_final_infidelity(&spec(Variant::A, x0, z0, t)).unwrap();
            let b = lz_formula(x0, 2.0 * z0 / t);
            assert!((a - b).abs() <= 1e-15);
        }
    }

    #[test]
    fn window_examples() {
        let (lo, hi) = lz_validity_window(0.063, 0.126).bounds().unwrap();
        assert!((lo - 7.967_754_515_076_6).abs() < 1e-10);
        assert!((hi - 2_023.778_277_230_955).abs() < 1e-8);
        assert_eq!(lz_validity_window(1.0, 0.5), LZWindow::Absent);
        assert_eq!(lz_validity_window(1.0, FRAC_1_SQRT_2_EXACT), LZWindow::Absent);
        assert_eq!(lz_validity_window(0.0, 1.0), LZWindow::Absent);
    }

    const FRAC_1_SQRT_2_EXACT: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn diabatic_examples() {
        assert!((diabatic_limit(&spec(Variant::A, 0.3, 0.3, 1.0)) - 0.5).abs() < 1e-15);
        assert!((diabatic_limit(&spec(Variant::B, 0.2, 0.5, 1.0)) - 0.25 / 0.29).abs() < 1e-15);
        assert!(diabatic_limit(&spec(Variant::C, 1.0, 1e-9, 1.0)) < 1e-17);
    }

    #[test]
    fn path_c_envelope_example() {
        let e = apt_envelope(&spec(Variant::C, 0.2, 0.1, 100.0));
        assert!((e - 4.299_382_106_643_288e-4).abs() < 1e-16);
    }

    #[test]
    fn crossover_examples() {
        let tc = crossover_time(0.063, 0.126).unwrap();
        assert!((tc - 182.222_440_968_774_4).abs() < 1e-9);
        let (lo, hi) = lz_validity_window(0.063, 0.126).bounds().unwrap();
        assert!(lo < tc && tc < hi);
        assert!(crossover_time(1.0, 0.5).is_none());
        assert!((crossover_existence_threshold() - 0.562_112_775_204_220_6).abs() < 1e-14);
    }

    #[test]
    fn crossing_identity() {
        for &(x0, z0) in &[(0.063, 0.126), (0.1, 0.3), (0.5, 2.5)] {
            let tc = crossover_time(x0, z0).unwrap();
            let s = spec(Variant::A, x0, z0, tc);
            let lz = lz_final_infidelity(&s).unwrap();
            assert!((lz - 0.5 * apt_envelope(&s)).abs() < 1e-10 * lz.max(1e-300).max(1.0));
        }
    }

    #[test]
    fn phase_integral_closed_forms_match_quadrature() {
        for v in Variant::ALL {
            for &(x0, z0, t) in &[(0.2, 0.1, 300.0), (0.05, 1.0, 25.0), (1.0, 0.1, 3.0)] {
                let s = spec(v, x0, z0, t);
                let q = gap_integral(&s);
                let c = match v {
                    Variant::A => dynamical_phase_difference(&s),
                    Variant::B => x0 * t / s.alpha0() * log_ratio(&s),
                    Variant::C => 2.0 * s.r0() * t,
                };
                assert!((q - c).abs() < 1e-11 * c, "{v}: {q} vs {c}");
            }
        }
    }

    #[test]
    fn general_formula_reduces_to_closed_forms() {
        for v in Variant::ALL {
            for &(x0, z0, t) in &[(0.2, 0.1, 300.0), (0.063, 0.126, 500.0), (0.7, 0.4, 40.0)] {
                let s = spec(v, x0, z0, t);
                let g = apt_general_second_order(&s).unwrap();
                let c = apt_final_infidelity(&s);
                assert!((g - c).abs() < 1e-8 * apt_envelope(&s).max(c), "{v} {x0} {z0} {t}: {g} vs {c}");
            }
        }
    }

    #[test]
    fn report_fields() {
        let r = approximation_report(&spec(Variant::B, 0.063, 0.126, 100.0));
        assert!(r.lz_value.is_none());
        assert!(r.crossover_time.is_some());
        assert!(r.apt_value <= r.apt_envelope);
    }
}
