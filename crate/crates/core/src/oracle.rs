//! Adaptive Runge-Kutta integration of the Schrödinger equation, used as an
//! independent reference for the exact solvers.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64 as C64;

use crate::analytic::{AmplitudePair, EvolutionSeries, SolverKind};
use crate::error::{Error, Result};
use crate::model::{eigensystem, hamiltonian, ParamPoint, PathSpec};
use crate::observables::instantaneous_infidelity;

/// Step-size and accuracy settings for [`propagate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Sample the grid by interpolation instead of stepping onto each point.
    pub dense_output: bool,
    pub max_steps: usize,
}

impl Default for IntegratorControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-11,
            abs_tol: 1e-13,
            max_step: f64::INFINITY,
            dense_output: true,
            max_steps: 50_000_000,
        }
    }
}

impl IntegratorControl {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self { rel_tol, abs_tol, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        let ok = |v: f64| v > 0.0 && v <= 1e-2;
        if !ok(self.rel_tol) || !ok(self.abs_tol) || self.max_step.is_nan() || self.max_step <= 0.0 || self.max_steps == 0 {
            return Err(Error::InvalidParameter(format!("integrator control out of range: {self:?}")));
        }
        Ok(())
    }
}

type PathFn = Arc<dyn Fn(f64) -> ParamPoint + Send + Sync>;

/// A driving path `t ↦ r(t)` on `[0, T]`.
#[derive(Clone)]
pub enum GeneralPath {
    /// One of the standard paths, optionally rigidly rotated about the origin.
    Spec { spec: PathSpec, rotation: Option<Matrix3<f64>> },
    Custom { duration: f64, point: PathFn },
}

impl fmt::Debug for GeneralPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Spec { spec, rotation } => {
                f.debug_struct("Spec").field("spec", spec).field("rotation", rotation).finish()
            }
            Self::Custom { duration, .. } => f.debug_struct("Custom").field("duration", duration).finish(),
        }
    }
}

impl GeneralPath {
    pub fn from_spec(s: &PathSpec) -> Self {
        Self::Spec { spec: *s, rotation: None }
    }

    /// `s` rotated by `m`, which must be a proper rotation.
    pub fn rotated(s: &PathSpec, m: Matrix3<f64>) -> Result<Self> {
        let defect = (m.transpose() * m - Matrix3::identity()).abs().max();
        if defect > 1e-12 || (m.determinant() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "rotation is not orthogonal with determinant +1 (defect {defect:e})"
            )));
        }
        Ok(Self::Spec { spec: *s, rotation: Some(m) })
    }

    pub fn custom<F>(duration: f64, point: F) -> Result<Self>
    where
        F: Fn(f64) -> ParamPoint + Send + Sync + 'static,
    {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::InvalidPath(format!("duration must be positive and finite, got {duration}")));
        }
        Ok(Self::Custom { duration, point: Arc::new(point) })
    }

    pub fn duration(&self) -> f64 {
        match self {
            Self::Spec { spec, .. } => spec.duration,
            Self::Custom { duration, .. } => *duration,
        }
    }

    pub fn point(&self, t: f64) -> ParamPoint {
        match self {
            Self::Spec { spec, rotation } => {
                let (p, _) = spec.point_velocity(t.clamp(0.0, spec.duration));
                match rotation {
                    None => p,
                    Some(m) => {
                        let v = m * Vector3::new(p.x, p.y, p.z);
                        ParamPoint::new(v.x, v.y, v.z)
                    }
                }
            }
            Self::Custom { point, .. } => point(t),
        }
    }
}

type State = [f64; 4];

fn to_state(a: &AmplitudePair) -> State {
    [a.a0.re, a.a0.im, a.a1.re, a.a1.im]
}

fn to_pair(y: &State) -> AmplitudePair {
    AmplitudePair::new(C64::new(y[0], y[1]), C64::new(y[2], y[3]))
}

fn rhs(path: &GeneralPath, t: f64, y: &State) -> State {
    let h = hamiltonian(&path.point(t));
    let [d0, d1] = h.apply(to_pair(y).as_array());
    // da/dt = -i H a
    [d0.im, -d0.re, d1.im, -d1.re]
}

fn axpy(y: &State, terms: &[(f64, &State)], h: f64) -> State {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..4 {
            out[i] += h * c * k[i];
        }
    }
    out
}

// Dormand-Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

struct Step {
    y1: State,
    k7: State,
    err: f64,
    dense: [State; 5],
}

fn dopri_step(path: &GeneralPath, t: f64, y: &State, k1: &State, h: f64, ctl: &IntegratorControl) -> Step {
    let k2 = rhs(path, t + C2 * h, &axpy(y, &[(A21, k1)], h));
    let k3 = rhs(path, t + C3 * h, &axpy(y, &[(A31, k1), (A32, &k2)], h));
    let k4 = rhs(path, t + C4 * h, &axpy(y, &[(A41, k1), (A42, &k2), (A43, &k3)], h));
    let k5 = rhs(path, t + C5 * h, &axpy(y, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)], h));
    let k6 = rhs(path, t + h, &axpy(y, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h));
    let y1 = axpy(y, &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)], h);
    let k7 = rhs(path, t + h, &y1);
    let mut acc = 0.0;
    let mut r3 = [0.0; 4];
    let mut r4 = [0.0; 4];
    let mut r5 = [0.0; 4];
    let mut r2 = [0.0; 4];
    for i in 0..4 {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let sc = ctl.abs_tol + ctl.rel_tol * y[i].abs().max(y1[i].abs());
        acc += (e / sc).powi(2);
        r2[i] = y1[i] - y[i];
        r3[i] = h * k1[i] - r2[i];
        r4[i] = r2[i] - h * k7[i] - r3[i];
        r5[i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
    }
    Step { y1, k7, err: (acc / 4.0).sqrt(), dense: [*y, r2, r3, r4, r5] }
}

fn interpolate(dense: &[State; 5], theta: f64) -> State {
    let th1 = 1.0 - theta;
    let mut out = [0.0; 4];
    for i in 0..4 {
        out[i] = dense[0][i]
            + theta * (dense[1][i] + th1 * (dense[2][i] + theta * (dense[3][i] + th1 * dense[4][i])));
    }
    out
}

/// Integrates from `(t_start, psi0)` and samples the state on `t_grid`
/// (increasing, all `>= t_start`). Returns the samples and the largest norm
/// defect seen at any step.
pub fn propagate_from(
    path: &GeneralPath,
    ctl: &IntegratorControl,
    t_start: f64,
    psi0: AmplitudePair,
    t_grid: &[f64],
) -> Result<(Vec<AmplitudePair>, f64)> {
    ctl.validate()?;
    let mut out = Vec::with_capacity(t_grid.len());
    let mut y = to_state(&psi0);
    let mut drift = (psi0.norm_sqr() - 1.0).abs();
    let mut t = t_start;
    let mut next = 0;
    while next < t_grid.len() && t_grid[next] <= t_start {
        out.push(psi0);
        next += 1;
    }
    let Some(&t_end) = t_grid.last() else {
        return Ok((out, drift));
    };
    if next == t_grid.len() {
        return Ok((out, drift));
    }
    let mut k1 = rhs(path, t, &y);
    let scale = hamiltonian(&path.point(t)).0.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
    let mut h = (0.01 / scale.max(1e-3)).min(t_end - t).min(ctl.max_step);
    let mut last_ok_factor = 1.0f64;
    let mut steps = 0usize;
    while next < t_grid.len() {
        steps += 1;
        if steps > ctl.max_steps {
            return Err(Error::ToleranceNotMet { t, max_steps: ctl.max_steps });
        }
        let mut target = None;
        if h >= t_end - t {
            h = t_end - t;
            target = Some(t_end);
        }
        if !ctl.dense_output && t + h >= t_grid[next] {
            h = t_grid[next] - t;
            target = Some(t_grid[next]);
        }
        if h <= 16.0 * f64::EPSILON * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { t, h });
        }
        let st = dopri_step(path, t, &y, &k1, h, ctl);
        if st.err <= 1.0 {
            let t_new = target.unwrap_or(t + h);
            while next < t_grid.len() && t_grid[next] <= t_new {
                let tg = t_grid[next];
                let yi = if tg == t_new { st.y1 } else { interpolate(&st.dense, (tg - t) / h) };
                out.push(to_pair(&yi));
                next += 1;
            }
            t = t_new;
            y = st.y1;
            k1 = st.k7;
            let n = y.iter().map(|v| v * v).sum::<f64>();
            drift = drift.max((n - 1.0).abs());
            let fac = if st.err == 0.0 { 10.0 } else { (0.9 * st.err.powf(-0.2)).clamp(0.2, 10.0) };
            let fac = if last_ok_factor < 1.0 { fac.min(1.0) } else { fac };
            last_ok_factor = 1.0;
            h = (h * fac).min(ctl.max_step);
        } else {
            let fac = if st.err.is_finite() { (0.9 * st.err.powf(-0.2)).clamp(0.2, 1.0) } else { 0.2 };
            last_ok_factor = fac;
            h *= fac;
        }
    }
    Ok((out, drift))
}

/// Integrates from the ground state at `path(0)` and samples `t_grid`.
pub fn propagate(path: &GeneralPath, ctl: &IntegratorControl, t_grid: &[f64]) -> Result<EvolutionSeries> {
    let tt = path.duration();
    for (i, &t) in t_grid.iter().enumerate() {
        if !(0.0..=tt).contains(&t) {
            return Err(Error::TimeOutOfRange { t, duration: tt });
        }
        if i > 0 && t <= t_grid[i - 1] {
            return Err(Error::InvalidParameter("time grid must be strictly increasing".into()));
        }
    }
    let g = eigensystem(&path.point(0.0))?.ground;
    let psi0 = AmplitudePair::new(g[0], g[1]);
    let (amplitudes, norm_drift) = propagate_from(path, ctl, 0.0, psi0, t_grid)?;
    let infidelity = t_grid
        .iter()
        .zip(&amplitudes)
        .map(|(&t, a)| instantaneous_infidelity(&path.point(t), a))
        .collect::<Result<Vec<_>>>()?;
    Ok(EvolutionSeries {
        times: t_grid.to_vec(),
        amplitudes,
        infidelity,
        solver: SolverKind::Oracle,
        norm_drift,
    })
}

/// `max_t |I_a(t) − I_b(t)|` over identical grids.
pub fn compare_series(a: &EvolutionSeries, b: &EvolutionSeries) -> Result<f64> {
    if a.times != b.times {
        return Err(Error::GridMismatch);
    }
    Ok(a.infidelity.iter().zip(&b.infidelity).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}
