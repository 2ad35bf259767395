//! Exact propagators for the three driving paths.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{path_point, PathSpec, Variant};
use crate::observables::instantaneous_infidelity;
use crate::oracle::{self, GeneralPath, IntegratorControl};
use crate::specfun::{gamma_complex, gauss_2f1, gauss_2f1_dz, pcf_d, SeriesControl};

/// Largest normalization defect accepted from an analytic solution before
/// [`SolverKind::Auto`] falls back to the integrator.
pub const AUTO_NORM_TOL: f64 = 1e-9;

/// State components `(a0, a1)` in the fixed basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudePair {
    pub a0: C64,
    pub a1: C64,
}

impl AmplitudePair {
    pub fn new(a0: C64, a1: C64) -> Self {
        Self { a0, a1 }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a0.norm_sqr() + self.a1.norm_sqr()
    }

    /// The same state with the global phase chosen so that `a0` is real and
    /// nonnegative.
    pub fn phase_aligned(&self) -> Self {
        let n = self.a0.norm();
        if n == 0.0 {
            let m = self.a1.norm();
            return if m == 0.0 { *self } else { Self::new(self.a0, C64::from(m)) };
        }
        let ph = self.a0.conj() / n;
        Self::new(C64::from(n), self.a1 * ph)
    }

    /// Componentwise distance after removing the global phase of both states.
    pub fn phase_aligned_distance(&self, other: &Self) -> f64 {
        let a = self.phase_aligned();
        let b = other.phase_aligned();
        (a.a0 - b.a0).norm().max((a.a1 - b.a1).norm())
    }

    pub fn as_array(&self) -> [C64; 2] {
        [self.a0, self.a1]
    }
}

/// Ground state at the starting point `(x0, 0, -z0)`.
pub fn initial_state(s: &PathSpec) -> AmplitudePair {
    let r0 = s.r0();
    // r0 - z0 without cancellation
    let lo = s.x0 * s.x0 / (r0 + s.z0);
    let hi = r0 + s.z0;
    let n = (2.0 * r0).sqrt();
    AmplitudePair::new(C64::from(lo.sqrt() / n), C64::from(hi.sqrt() / n))
}

fn require(s: &PathSpec, v: Variant) -> Result<()> {
    if s.variant != v {
        return Err(Error::SolverMismatch { expected: v, found: s.variant });
    }
    Ok(())
}

/// Coefficients of the path-A solution in the parabolic cylinder basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathACoefficients {
    pub a_plus: C64,
    pub a_minus: C64,
    /// `η = i X0²/2`.
    pub eta: C64,
    /// `X0 = x0 √(T/2z0)`.
    pub x_scaled: f64,
    /// `√(T/2z0)`, so that `Z(t) = z(t) √(T/2z0)`.
    pub scale: f64,
}

#[derive(Debug, Clone)]
pub struct PathASolver {
    spec: PathSpec,
    coeffs: PathACoefficients,
    ctl: SeriesControl,
}

const ONE_MINUS_I: C64 = C64::new(1.0, -1.0);
const ONE_PLUS_I: C64 = C64::new(1.0, 1.0);

impl PathASolver {
    pub fn new(s: &PathSpec, ctl: SeriesControl) -> Result<Self> {
        require(s, Variant::A)?;
        let scale = (s.duration / (2.0 * s.z0)).sqrt();
        let x_scaled = s.x0 * scale;
        let eta = C64::new(0.0, 0.5 * x_scaled * x_scaled);
        let xi0 = ONE_MINUS_I * (-s.z0 * scale);
        let init = initial_state(s);
        let g = gamma_complex(1.0 - eta)? / (2.0 * PI).sqrt();
        if !(g.norm().is_finite() && g.norm() > 0.0) {
            return Err(Error::NoConvergence {
                routine: "path A coefficients",
                detail: format!("Γ(1-η) not representable for η = {eta}"),
            });
        }
        let d = |nu: C64, x: C64| pcf_d(nu, x, &ctl);
        let k = ONE_PLUS_I / x_scaled;
        let a_plus = g * (d(eta - 1.0, -xi0)? * init.a0 + k * d(eta, -xi0)? * init.a1);
        let a_minus = g * (d(eta - 1.0, xi0)? * init.a0 - k * d(eta, xi0)? * init.a1);
        Ok(Self {
            spec: *s,
            coeffs: PathACoefficients { a_plus, a_minus, eta, x_scaled, scale },
            ctl,
        })
    }

    pub fn coefficients(&self) -> &PathACoefficients {
        &self.coeffs
    }

    pub fn amplitudes(&self, t: f64) -> Result<AmplitudePair> {
        let s = &self.spec;
        s.check_time(t)?;
        let c = &self.coeffs;
        let z = s.z0 * (2.0 * t / s.duration - 1.0);
        let xi = ONE_MINUS_I * (z * c.scale);
        let d = |nu: C64, x: C64| pcf_d(nu, x, &self.ctl);
        let a0 = c.a_plus * d(c.eta, xi)? + c.a_minus * d(c.eta, -xi)?;
        let lower = c.a_plus * d(c.eta - 1.0, xi)? - c.a_minus * d(c.eta - 1.0, -xi)?;
        let a1 = ONE_MINUS_I * 0.5 * c.x_scaled * lower;
        Ok(AmplitudePair::new(a0, a1))
    }
}

/// Coefficients of the path-B solution in the hypergeometric basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathBCoefficients {
    pub b1: C64,
    pub b2: C64,
    /// `a = b = -i x0 T / (4 α0)`.
    pub a: C64,
    /// `c = 1/2 + 2a`.
    pub c: C64,
    /// `κ = (x0 T/2α0)(x0 T/2α0 - i)`.
    pub kappa: C64,
    /// `q0 = x0²/r0² = cos² α0`.
    pub q0: f64,
}

#[derive(Debug, Clone)]
pub struct PathBSolver {
    spec: PathSpec,
    coeffs: PathBCoefficients,
    ctl: SeriesControl,
}

struct PathBBasis {
    qa: C64,
    w: [C64; 2],
    w_dot: [C64; 2],
}

impl PathBSolver {
    pub fn new(s: &PathSpec, ctl: SeriesControl) -> Result<Self> {
        require(s, Variant::B)?;
        let alpha0 = s.alpha0();
        let g = s.x0 * s.duration / (2.0 * alpha0);
        let a = C64::new(0.0, -0.5 * g);
        let c = 0.5 + 2.0 * a;
        let mut solver = Self {
            spec: *s,
            coeffs: PathBCoefficients {
                b1: C64::new(0.0, 0.0),
                b2: C64::new(0.0, 0.0),
                a,
                c,
                kappa: C64::new(g * g, -g),
                q0: (s.x0 / s.r0()).powi(2),
            },
            ctl,
        };
        let init = initial_state(s);
        let basis = solver.basis(-alpha0)?;
        let m00 = basis.qa * basis.w[0];
        let m01 = basis.qa * basis.w[1];
        let k = -C64::i() * basis.qa / s.x0;
        let m10 = k * basis.w_dot[0];
        let m11 = k * basis.w_dot[1];
        let det = m00 * m11 - m01 * m10;
        if det.norm() == 0.0 || !det.norm().is_finite() {
            return Err(Error::NoConvergence {
                routine: "path B coefficients",
                detail: format!("singular initial-value system (det = {det})"),
            });
        }
        solver.coeffs.b1 = (init.a0 * m11 - m01 * init.a1) / det;
        solver.coeffs.b2 = (m00 * init.a1 - m10 * init.a0) / det;
        Ok(solver)
    }

    pub fn coefficients(&self) -> &PathBCoefficients {
        &self.coeffs
    }

    fn basis(&self, alpha: f64) -> Result<PathBBasis> {
        let a = self.coeffs.a;
        let ctl = &self.ctl;
        let (sn, cs) = alpha.sin_cos();
        // 1 - q = sin² α, taken directly to avoid cancellation
        let arg = sn * sn;
        let half = C64::from(0.5);
        let f1 = gauss_2f1(a, a, half, arg, ctl)?;
        let f1p = gauss_2f1_dz(a, a, half, arg, ctl)?;
        let a2 = a + 0.5;
        let f2 = gauss_2f1(a2, a2, C64::from(1.5), arg, ctl)?;
        let f2p = gauss_2f1_dz(a2, a2, C64::from(1.5), arg, ctl)?;
        let omega = self.spec.alpha_rate();
        let d_arg = 2.0 * sn * cs;
        let w1 = f1;
        let w2 = sn * f2;
        let dw1 = f1p * d_arg;
        let dw2 = cs * f2 + sn * f2p * d_arg;
        let qa = (2.0 * a * cs.ln()).exp();
        Ok(PathBBasis {
            qa,
            w: [w1, w2],
            w_dot: [dw1 * omega, dw2 * omega],
        })
    }

    pub fn amplitudes(&self, t: f64) -> Result<AmplitudePair> {
        self.spec.check_time(t)?;
        let b = self.basis(self.spec.alpha(t))?;
        let (b1, b2) = (self.coeffs.b1, self.coeffs.b2);
        let a0 = b.qa * (b1 * b.w[0] + b2 * b.w[1]);
        let a1 = -C64::i() * b.qa / self.spec.x0 * (b1 * b.w_dot[0] + b2 * b.w_dot[1]);
        Ok(AmplitudePair::new(a0, a1))
    }
}

/// Rotating-frame propagator for the constant-gap arc.
#[derive(Debug, Clone)]
pub struct PathCPropagator {
    spec: PathSpec,
    /// `τ = π / √(r0² + α0²/T²)`.
    pub tau: f64,
}

impl PathCPropagator {
    pub fn new(s: &PathSpec) -> Result<Self> {
        require(s, Variant::C)?;
        Ok(Self { spec: *s, tau: path_c_period(s) })
    }

    /// The propagator matrix taking the initial amplitudes to those at `t`.
    pub fn matrix(&self, t: f64) -> Result<[[C64; 2]; 2]> {
        let s = &self.spec;
        s.check_time(t)?;
        let alpha0 = s.alpha0();
        let r0 = s.r0();
        let w = s.duration;
        let (sp, cp) = (PI * t / self.tau).sin_cos();
        let (sa, ca) = (0.5 * s.alpha(t)).sin_cos();
        let k = self.tau / PI;
        let big_a = cp * ca + k * C64::new(alpha0 / w, r0) * sp * sa;
        let big_b = cp * sa - k * C64::new(alpha0 / w, -r0) * sp * ca;
        let (s0, c0) = (0.5 * alpha0).sin_cos();
        Ok([
            [big_a * c0 - big_b * s0, big_a * s0 + big_b * c0],
            [-big_a.conj() * s0 - big_b.conj() * c0, big_a.conj() * c0 - big_b.conj() * s0],
        ])
    }

    pub fn amplitudes(&self, t: f64) -> Result<AmplitudePair> {
        let m = self.matrix(t)?;
        let i = initial_state(&self.spec);
        Ok(AmplitudePair::new(
            m[0][0] * i.a0 + m[0][1] * i.a1,
            m[1][0] * i.a0 + m[1][1] * i.a1,
        ))
    }
}

/// Oscillation period `τ` of the path-C infidelity.
pub fn path_c_period(s: &PathSpec) -> f64 {
    let w = s.alpha0() / s.duration;
    PI / (s.r0() * s.r0() + w * w).sqrt()
}

/// Exact solver for whichever variant a [`PathSpec`] carries.
#[derive(Debug, Clone)]
pub enum AnalyticSolver {
    A(PathASolver),
    B(PathBSolver),
    C(PathCPropagator),
}

impl AnalyticSolver {
    pub fn new(s: &PathSpec, ctl: SeriesControl) -> Result<Self> {
        Ok(match s.variant {
            Variant::A => Self::A(PathASolver::new(s, ctl)?),
            Variant::B => Self::B(PathBSolver::new(s, ctl)?),
            Variant::C => Self::C(PathCPropagator::new(s)?),
        })
    }

    pub fn amplitudes(&self, t: f64) -> Result<AmplitudePair> {
        match self {
            Self::A(x) => x.amplitudes(t),
            Self::B(x) => x.amplitudes(t),
            Self::C(x) => x.amplitudes(t),
        }
    }
}

pub fn solve_path_a(s: &PathSpec, t: f64) -> Result<AmplitudePair> {
    PathASolver::new(s, SeriesControl::default())?.amplitudes(t)
}

pub fn solve_path_b(s: &PathSpec, t: f64) -> Result<AmplitudePair> {
    PathBSolver::new(s, SeriesControl::default())?.amplitudes(t)
}

pub fn solve_path_c(s: &PathSpec, t: f64) -> Result<AmplitudePair> {
    PathCPropagator::new(s)?.amplitudes(t)
}

/// Which propagator produces the amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverKind {
    Analytic,
    Oracle,
    /// Analytic, falling back to the oracle when the special functions cannot
    /// reach the requested accuracy.
    Auto,
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Analytic => "analytic",
            Self::Oracle => "oracle",
            Self::Auto => "auto",
        })
    }
}

impl std::str::FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "analytic" => Ok(Self::Analytic),
            "oracle" => Ok(Self::Oracle),
            "auto" => Ok(Self::Auto),
            other => Err(Error::InvalidParameter(format!("unknown solver '{other}'"))),
        }
    }
}

/// Numerical settings shared by all solvers.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolverOptions {
    pub series: SeriesControl,
    pub integrator: IntegratorControl,
}

/// Sampled trajectory for one path and solver.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionSeries {
    pub times: Vec<f64>,
    pub amplitudes: Vec<AmplitudePair>,
    pub infidelity: Vec<f64>,
    /// The solver that actually produced the samples (never `Auto`).
    pub solver: SolverKind,
    /// `max |‖ψ‖² − 1|` over the samples (over every step for the oracle).
    pub norm_drift: f64,
}

impl EvolutionSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// `n` uniformly spaced times on `[0, T]` with exact endpoints.
pub fn uniform_grid(duration: f64, n: usize) -> Vec<f64> {
    let last = n.saturating_sub(1).max(1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { duration } else { duration * i as f64 / last })
        .collect()
}

fn analytic_series(s: &PathSpec, times: &[f64], ctl: SeriesControl) -> Result<EvolutionSeries> {
    let solver = AnalyticSolver::new(s, ctl)?;
    let rows: Vec<(AmplitudePair, f64)> = times
        .par_iter()
        .map(|&t| {
            let amp = solver.amplitudes(t)?;
            let inf = instantaneous_infidelity(&path_point(s, t)?, &amp)?;
            Ok((amp, inf))
        })
        .collect::<Result<_>>()?;
    let norm_drift = rows.iter().map(|(a, _)| (a.norm_sqr() - 1.0).abs()).fold(0.0, f64::max);
    let (amplitudes, infidelity) = rows.into_iter().unzip();
    Ok(EvolutionSeries {
        times: times.to_vec(),
        amplitudes,
        infidelity,
        solver: SolverKind::Analytic,
        norm_drift,
    })
}

/// Samples the solution on an arbitrary increasing time grid.
pub fn evolve_on_grid(
    s: &PathSpec,
    times: &[f64],
    solver: SolverKind,
    opts: &SolverOptions,
) -> Result<EvolutionSeries> {
    match solver {
        SolverKind::Analytic => analytic_series(s, times, opts.series),
        SolverKind::Oracle => oracle::propagate(&GeneralPath::from_spec(s), &opts.integrator, times),
        SolverKind::Auto => match analytic_series(s, times, opts.series) {
            Ok(series) if series.norm_drift <= AUTO_NORM_TOL => Ok(series),
            Ok(_) | Err(Error::NoConvergence { .. }) => {
                oracle::propagate(&GeneralPath::from_spec(s), &opts.integrator, times)
            }
            Err(e) => Err(e),
        },
    }
}

/// Samples the solution at `n_samples` uniformly spaced times on `[0, T]`.
pub fn evolve_series(s: &PathSpec, n_samples: usize, solver: SolverKind) -> Result<EvolutionSeries> {
    evolve_series_with(s, n_samples, solver, &SolverOptions::default())
}

pub fn evolve_series_with(
    s: &PathSpec,
    n_samples: usize,
    solver: SolverKind,
    opts: &SolverOptions,
) -> Result<EvolutionSeries> {
    if n_samples < 2 {
        return Err(Error::InvalidParameter(format!("n_samples must be at least 2, got {n_samples}")));
    }
    evolve_on_grid(s, &uniform_grid(s.duration, n_samples), solver, opts)
}

/// Amplitudes at a single time with the chosen solver.
pub fn amplitudes_at(
    s: &PathSpec,
    t: f64,
    solver: SolverKind,
    opts: &SolverOptions,
) -> Result<(AmplitudePair, SolverKind)> {
    s.check_time(t)?;
    let grid = if t == 0.0 { vec![0.0] } else { vec![0.0, t] };
    let series = evolve_on_grid(s, &grid, solver, opts)?;
    Ok((*series.amplitudes.last().expect("non-empty grid"), series.solver))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::eigensystem;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn spec(v: Variant, x0: f64, z0: f64, t: f64) -> PathSpec {
        PathSpec::new(v, x0, z0, t).unwrap()
    }

    #[test]
    fn initial_state_examples() {
        let i = initial_state(&spec(Variant::A, 0.2, 0.5, 5.0));
        assert!((i.a0.re - 0.189_107_521_154_951_27).abs() < 1e-15);
        assert!((i.a1.re - 0.981_956_386_731_421_8).abs() < 1e-15);
        let i = initial_state(&spec(Variant::C, 0.3, 0.3, 1.0));
        let h = FRAC_1_SQRT_2;
        assert!((i.a0.re - (1.0 - h).sqrt() * h).abs() < 1e-15);
        assert!((i.a1.re - (1.0 + h).sqrt() * h).abs() < 1e-15);
        let i = initial_state(&spec(Variant::B, 1.0, 1e-12, 1.0));
        assert!((i.a0.re - h).abs() < 1e-12 && (i.a1.re - h).abs() < 1e-12);
    }

    #[test]
    fn initial_state_is_ground_state() {
        for &(x0, z0) in &[(0.2, 0.5), (1.0, 0.1), (0.05, 1.0), (1e-4, 3.0)] {
            let s = spec(Variant::A, x0, z0, 1.0);
            let g = eigensystem(&s.start()).unwrap().ground;
            let i = initial_state(&s);
            assert!((i.a0 - g[0]).norm() < 1e-14 && (i.a1 - g[1]).norm() < 1e-14);
        }
    }

    #[test]
    fn solvers_reproduce_initial_state() {
        for v in Variant::ALL {
            for &(x0, z0, t) in &[(0.2, 0.5, 5.0), (1.0, 0.1, 25.0), (0.05, 1.0, 25.0), (0.5, 0.5, 1.0)] {
                let s = spec(v, x0, z0, t);
                let a = AnalyticSolver::new(&s, SeriesControl::default()).unwrap().amplitudes(0.0).unwrap();
                let i = initial_state(&s);
                assert!((a.a0 - i.a0).norm() < 1e-10 && (a.a1 - i.a1).norm() < 1e-10, "{v} {x0} {z0} {t}: {a:?}");
            }
        }
    }

    #[test]
    fn path_b_midpoint_reduces_to_first_coefficient() {
        let s = spec(Variant::B, 0.2, 0.5, 5.0);
        let sol = PathBSolver::new(&s, SeriesControl::default()).unwrap();
        let a = sol.amplitudes(2.5).unwrap();
        assert!((a.a0 - sol.coefficients().b1).norm() < 1e-15);
    }

    #[test]
    fn path_c_matrix_is_unitary() {
        let s = spec(Variant::C, 0.2, 0.5, 5.0);
        let p = PathCPropagator::new(&s).unwrap();
        for k in 0..=50 {
            let m = p.matrix(5.0 * k as f64 / 50.0).unwrap();
            let col = |j: usize| m[0][j].norm_sqr() + m[1][j].norm_sqr();
            let dot = m[0][0].conj() * m[0][1] + m[1][0].conj() * m[1][1];
            assert!((col(0) - 1.0).abs() < 1e-12 && (col(1) - 1.0).abs() < 1e-12 && dot.norm() < 1e-12);
        }
        assert!((p.tau - 5.335_691_802_500_823).abs() < 1e-12);
    }

    #[test]
    fn wrong_variant_is_rejected() {
        let s = spec(Variant::B, 0.2, 0.5, 5.0);
        assert_eq!(
            solve_path_a(&s, 1.0).unwrap_err(),
            Error::SolverMismatch { expected: Variant::A, found: Variant::B }
        );
        assert!(solve_path_c(&s, 1.0).is_err());
        assert!(solve_path_b(&s.with_variant(Variant::C), 1.0).is_err());
    }

    #[test]
    fn time_outside_range_is_rejected() {
        let s = spec(Variant::C, 0.2, 0.5, 5.0);
        assert!(matches!(solve_path_c(&s, 5.1), Err(Error::TimeOutOfRange { .. })));
        assert!(matches!(solve_path_c(&s, -0.1), Err(Error::TimeOutOfRange { .. })));
    }

    // i da/dt = H a, checked with an 8th-order central difference.
    #[test]
    fn schrodinger_residual() {
        let h = 1e-3;
        let w = [(1, 4.0 / 5.0), (2, -1.0 / 5.0), (3, 4.0 / 105.0), (4, -1.0 / 280.0)];
        for v in Variant::ALL {
            let s = spec(v, 0.3, 0.6, 6.0);
            let sol = AnalyticSolver::new(&s, SeriesControl::default()).unwrap();
            for &t in &[0.7, 2.9, 3.0, 5.2] {
                let f = |dt: f64| sol.amplitudes(t + dt).unwrap();
                let mut d0 = C64::new(0.0, 0.0);
                let mut d1 = C64::new(0.0, 0.0);
                for (k, c) in w {
                    let (p, m) = (f(k as f64 * h), f(-(k as f64) * h));
                    d0 += (p.a0 - m.a0) * c;
                    d1 += (p.a1 - m.a1) * c;
                }
                let a = f(0.0);
                let hm = crate::model::hamiltonian(&path_point(&s, t).unwrap());
                let ha = hm.apply(a.as_array());
                let r0 = C64::i() * d0 / h - ha[0];
                let r1 = C64::i() * d1 / h - ha[1];
                assert!(r0.norm() < 1e-6 && r1.norm() < 1e-6, "{v} t={t}: {r0} {r1}");
            }
        }
    }

    #[test]
    fn solver_kind_parses() {
        assert_eq!("Oracle".parse::<SolverKind>().unwrap(), SolverKind::Oracle);
        assert_eq!(SolverKind::Auto.to_string(), "auto");
        assert!("exact".parse::<SolverKind>().is_err());
    }

    #[test]
    fn uniform_grid_has_exact_endpoints() {
        let g = uniform_grid(7.3, 11);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[10], 7.3);
        assert_eq!(uniform_grid(2.0, 2), vec![0.0, 2.0]);
    }

    #[test]
    fn phase_alignment() {
        let a = AmplitudePair::new(C64::from_polar(0.6, 1.1), C64::from_polar(0.8, -0.4));
        let b = a.phase_aligned();
        assert!(b.a0.im == 0.0 && (b.a0.re - 0.6).abs() < 1e-15);
        assert!((b.a1 - C64::from_polar(0.8, -1.5)).norm() < 1e-15);
        let c = AmplitudePair::new(a.a0 * C64::from_polar(1.0, 2.0), a.a1 * C64::from_polar(1.0, 2.0));
        assert!(a.phase_aligned_distance(&c) < 1e-15);
    }
}
