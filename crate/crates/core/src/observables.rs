//! Infidelity observables and the search for infidelity zeros.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::analytic::{
    amplitudes_at, evolve_on_grid, path_c_period, uniform_grid, AmplitudePair, AnalyticSolver, SolverKind,
    SolverOptions,
};
use crate::error::{Error, Result};
use crate::model::{eigensystem, path_point, ParamPoint, PathSpec, Variant};
use crate::oracle::{propagate_from, GeneralPath};

const BOUND_SLACK: f64 = 1e-12;

/// Infidelity sampled at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfidelityPoint {
    pub t: f64,
    pub value: f64,
}

/// Times where the infidelity falls below a tolerance, in increasing order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ZeroList {
    pub points: Vec<InfidelityPoint>,
}

impl ZeroList {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t).collect()
    }
}

fn clamp_unit(v: f64) -> f64 {
    if (-BOUND_SLACK..0.0).contains(&v) {
        0.0
    } else if v > 1.0 && v <= 1.0 + BOUND_SLACK {
        1.0
    } else {
        v
    }
}

/// Probability of not being in the instantaneous ground state at `p`,
/// for a normalized state.
pub fn instantaneous_infidelity(p: &ParamPoint, amp: &AmplitudePair) -> Result<f64> {
    let r = p.r();
    if r == 0.0 {
        return Err(Error::DegeneratePoint);
    }
    let cross = amp.a0 * amp.a1.conj();
    let v = (r - p.z * (1.0 - 2.0 * amp.a1.norm_sqr()) - 2.0 * p.x * cross.re + 2.0 * p.y * cross.im) / (2.0 * r);
    Ok(clamp_unit(v))
}

/// `|⟨E1|ψ⟩|²`, the same quantity computed from the excited eigenvector.
pub fn excited_population(p: &ParamPoint, amp: &AmplitudePair) -> Result<f64> {
    let e = eigensystem(p)?.excited;
    let ov = e[0].conj() * amp.a0 + e[1].conj() * amp.a1;
    Ok(ov.norm_sqr())
}

/// `|a1/a0 − (x + iy)/(z + r)|`, which vanishes exactly at infidelity zeros.
pub fn zero_condition_residual(p: &ParamPoint, amp: &AmplitudePair) -> f64 {
    let target = C64::new(p.x, p.y) / (p.z + p.r());
    (amp.a1 / amp.a0 - target).norm()
}

/// Infidelity at the end of the drive.
pub fn final_infidelity(s: &PathSpec, solver: SolverKind) -> Result<f64> {
    final_infidelity_with(s, solver, &SolverOptions::default())
}

pub fn final_infidelity_with(s: &PathSpec, solver: SolverKind, opts: &SolverOptions) -> Result<f64> {
    let (amp, _) = amplitudes_at(s, s.duration, solver, opts)?;
    instantaneous_infidelity(&s.end(), &amp)
}

/// Peak value `α0²/(r0²T² + α0²)` of the path-C infidelity.
pub fn path_c_peak_infidelity(s: &PathSpec) -> f64 {
    let a2 = s.alpha0().powi(2);
    let rt = s.r0() * s.duration;
    a2 / (rt * rt + a2)
}

/// Closed-form path-C infidelity `Ī sin²(πt/τ)`.
pub fn path_c_closed_infidelity(s: &PathSpec, t: f64) -> Result<f64> {
    if s.variant != Variant::C {
        return Err(Error::SolverMismatch { expected: Variant::C, found: s.variant });
    }
    s.check_time(t)?;
    Ok(path_c_peak_infidelity(s) * (PI * t / path_c_period(s)).sin().powi(2))
}

/// Default acceptance threshold for reported zeros.
pub fn default_zero_tol(solver: SolverKind) -> f64 {
    match solver {
        SolverKind::Oracle => 1e-8,
        SolverKind::Analytic | SolverKind::Auto => 1e-10,
    }
}

/// Times in `[0, T]` where the infidelity vanishes (path C) or has a local
/// minimum below `zero_tol` (paths A and B).
pub fn find_infidelity_zeros(s: &PathSpec, solver: SolverKind, zero_tol: Option<f64>) -> Result<ZeroList> {
    find_infidelity_zeros_with(s, solver, zero_tol, &SolverOptions::default())
}

pub fn find_infidelity_zeros_with(
    s: &PathSpec,
    solver: SolverKind,
    zero_tol: Option<f64>,
    opts: &SolverOptions,
) -> Result<ZeroList> {
    let tol = zero_tol.unwrap_or_else(|| default_zero_tol(solver));
    match s.variant {
        Variant::C => path_c_zeros(s, solver, tol, opts),
        Variant::A | Variant::B => scanned_zeros(s, solver, tol, opts),
    }
}

fn path_c_zeros(s: &PathSpec, solver: SolverKind, tol: f64, opts: &SolverOptions) -> Result<ZeroList> {
    let tau = path_c_period(s);
    let n = (s.duration / tau).floor() as usize;
    let mut times: Vec<f64> = (0..=n).map(|k| (k as f64 * tau).min(s.duration)).collect();
    times.dedup();
    let series = evolve_on_grid(s, &times, solver, opts)?;
    Ok(ZeroList {
        points: times
            .iter()
            .zip(&series.infidelity)
            .filter(|(_, &v)| v < tol)
            .map(|(&t, &value)| InfidelityPoint { t, value })
            .collect(),
    })
}

/// Number of scan points used for paths A and B.
pub fn zero_scan_points(s: &PathSpec) -> usize {
    let tau = path_c_period(&s.with_variant(Variant::C));
    ((20.0 * s.duration / tau).ceil() as usize).max(1000)
}

fn scanned_zeros(s: &PathSpec, solver: SolverKind, tol: f64, opts: &SolverOptions) -> Result<ZeroList> {
    let grid = uniform_grid(s.duration, zero_scan_points(s));
    let series = evolve_on_grid(s, &grid, solver, opts)?;
    let inf = &series.infidelity;
    let n = grid.len();
    let candidates: Vec<usize> = (0..n)
        .filter(|&i| (i == 0 || inf[i] <= inf[i - 1]) && (i + 1 == n || inf[i] <= inf[i + 1]))
        .collect();
    let analytic = match series.solver {
        SolverKind::Analytic => Some(AnalyticSolver::new(s, opts.series)?),
        _ => None,
    };
    let path = GeneralPath::from_spec(s);
    let eval = |t_lo: usize, t: f64| -> Result<f64> {
        let amp = match &analytic {
            Some(sol) => sol.amplitudes(t)?,
            None => {
                let (v, _) = propagate_from(&path, &opts.integrator, grid[t_lo], series.amplitudes[t_lo], &[t])?;
                v[0]
            }
        };
        instantaneous_infidelity(&path_point(s, t)?, &amp)
    };
    let polished: Vec<InfidelityPoint> = candidates
        .par_iter()
        .map(|&i| {
            if i == 0 {
                return Ok(InfidelityPoint { t: grid[0], value: inf[0] });
            }
            let lo = i - 1;
            let hi = (i + 1).min(n - 1);
            let f = |t: f64| eval(lo, t).unwrap_or(f64::INFINITY);
            let (t, value) = brent_minimize(f, grid[lo], grid[hi], grid[i], inf[i]);
            let best = if value <= inf[i] { InfidelityPoint { t, value } } else { InfidelityPoint { t: grid[i], value: inf[i] } };
            Ok(best)
        })
        .collect::<Result<_>>()?;
    let spacing = grid[1] - grid[0];
    let mut points: Vec<InfidelityPoint> = Vec::new();
    for p in polished.into_iter().filter(|p| p.value < tol) {
        match points.last_mut() {
            Some(last) if p.t - last.t < 0.5 * spacing => {
                if p.value < last.value {
                    *last = p;
                }
            }
            _ => points.push(p),
        }
    }
    Ok(ZeroList { points })
}

/// Brent's derivative-free minimization on `[a, b]` starting from `x` with
/// known value `fx`.
fn brent_minimize<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, x0: f64, fx0: f64) -> (f64, f64) {
    const GOLD: f64 = 0.381_966_011_250_105_1;
    let tol_rel = 1e-10;
    let (mut x, mut w, mut v) = (x0, x0, x0);
    let (mut fx, mut fw, mut fv) = (fx0, fx0, fx0);
    let (mut d, mut e) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let tol = tol_rel * x.abs() + 1e-14;
        if (x - m).abs() <= 2.0 * tol - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            if p.abs() < (0.5 * q * e).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < 2.0 * tol || b - u < 2.0 * tol {
                    d = if x < m { tol } else { -tol };
                }
                golden = false;
            }
        }
        if golden {
            e = if x < m { b - x } else { a - x };
            d = GOLD * e;
        }
        let u = if d.abs() >= tol { x + d } else if d > 0.0 { x + tol } else { x - tol };
        let fu = f(u);
        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            (v, fv, w, fw, x, fx) = (w, fw, x, fx, u, fu);
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                (v, fv, w, fw) = (w, fw, u, fu);
            } else if fu <= fv || v == x || v == w {
                (v, fv) = (u, fu);
            }
        }
    }
    (x, fx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{evolve_series, solve_path_c};
    use crate::model::eigensystem;

    fn spec(v: Variant, x0: f64, z0: f64, t: f64) -> PathSpec {
        PathSpec::new(v, x0, z0, t).unwrap()
    }

    #[test]
    fn eigenstate_examples() {
        let p = ParamPoint::new(0.3, -0.2, 0.4);
        let e = eigensystem(&p).unwrap();
        let g = AmplitudePair::new(e.ground[0], e.ground[1]);
        let x = AmplitudePair::new(e.excited[0], e.excited[1]);
        assert!(instantaneous_infidelity(&p, &g).unwrap().abs() < 1e-15);
        assert!((instantaneous_infidelity(&p, &x).unwrap() - 1.0).abs() < 1e-15);
        let up = AmplitudePair::new(C64::from(1.0), C64::from(0.0));
        assert!((instantaneous_infidelity(&ParamPoint::new(0.2, 0.0, 0.0), &up).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(
            instantaneous_infidelity(&ParamPoint::new(0.0, 0.0, 0.0), &up),
            Err(Error::DegeneratePoint)
        );
    }

    #[test]
    fn two_forms_agree() {
        let states = [
            AmplitudePair::new(C64::new(0.6, 0.0), C64::new(0.0, 0.8)),
            AmplitudePair::new(C64::from_polar(0.3, 1.0), C64::from_polar(0.91f64.sqrt(), -2.0)),
        ];
        for p in [ParamPoint::new(0.2, 0.0, 0.5), ParamPoint::new(-0.1, 0.7, -0.3), ParamPoint::new(0.0, 1.0, 0.0)] {
            for a in &states {
                let i = instantaneous_infidelity(&p, a).unwrap();
                let e = excited_population(&p, a).unwrap();
                assert!((i - e).abs() < 1e-12, "{p:?}");
            }
        }
    }

    #[test]
    fn path_c_closed_form_values() {
        let s = spec(Variant::C, 0.2, 0.5, 5.0);
        assert!((path_c_peak_infidelity(&s) - 0.163_473_458_737_786_73).abs() < 1e-15);
        assert!((path_c_closed_infidelity(&s, 5.0).unwrap() - 0.006_303_535_756_114_602).abs() < 1e-15);
        assert!((path_c_closed_infidelity(&s, 2.5).unwrap() - 0.161_882_083_132_173_83).abs() < 1e-15);
        assert_eq!(path_c_closed_infidelity(&s, 0.0).unwrap(), 0.0);
        let tau = path_c_period(&s);
        assert!((path_c_closed_infidelity(&s, tau / 2.0).unwrap() - path_c_peak_infidelity(&s)).abs() < 1e-15);
        assert!(path_c_closed_infidelity(&s.with_variant(Variant::A), 1.0).is_err());
    }

    #[test]
    fn path_c_solver_matches_closed_form() {
        let s = spec(Variant::C, 0.2, 0.5, 5.0);
        let series = evolve_series(&s, 101, SolverKind::Analytic).unwrap();
        for (t, i) in series.times.iter().zip(&series.infidelity) {
            assert!((i - path_c_closed_infidelity(&s, *t).unwrap()).abs() < 1e-12);
        }
        let a = solve_path_c(&s, 5.0).unwrap();
        assert!((instantaneous_infidelity(&s.end(), &a).unwrap() - 6.30e-3).abs() < 5e-6);
    }

    #[test]
    fn path_c_zero_lists() {
        let z = find_infidelity_zeros(&spec(Variant::C, 0.2, 0.5, 12.0), SolverKind::Analytic, None).unwrap();
        let t = z.times();
        assert_eq!(t.len(), 3);
        assert_eq!(t[0], 0.0);
        assert!((t[1] - 5.737_27).abs() < 1e-5 && (t[2] - 2.0 * 5.737_27).abs() < 2e-5);
        assert!(z.points.iter().all(|p| p.value < 1e-12));
        let z = find_infidelity_zeros(&spec(Variant::C, 0.2, 0.5, 5.0), SolverKind::Analytic, None).unwrap();
        assert_eq!(z.times(), vec![0.0]);
    }

    #[test]
    fn brent_finds_parabola_minimum() {
        let (x, fx) = brent_minimize(|t| (t - 0.3).powi(2) + 1e-3, 0.0, 1.0, 0.5, 0.041);
        assert!((x - 0.3).abs() < 1e-7 && (fx - 1e-3).abs() < 1e-14);
    }

    #[test]
    fn zero_tolerance_defaults() {
        assert_eq!(default_zero_tol(SolverKind::Analytic), 1e-10);
        assert_eq!(default_zero_tol(SolverKind::Oracle), 1e-8);
    }
}
