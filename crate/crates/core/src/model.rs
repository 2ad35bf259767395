//! Two-level Hamiltonian, its eigensystem, the three driving paths and the
//! plain / metric speeds along them.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::quad;

const I: C64 = C64::new(0.0, 1.0);

/// A point `r = (x, y, z)` of the control-parameter space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ParamPoint {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn from_spherical(r: f64, theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self::new(r * st * cp, r * st * sp, r * ct)
    }

    pub fn r(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Polar angle in `[0, π]`; zero at the origin.
    pub fn theta(&self) -> f64 {
        let r = self.r();
        if r == 0.0 {
            return 0.0;
        }
        (self.z / r).clamp(-1.0, 1.0).acos()
    }

    /// Azimuth in `[0, 2π)`; by convention 0 on the z axis.
    pub fn phi(&self) -> f64 {
        if self.x == 0.0 && self.y == 0.0 {
            return 0.0;
        }
        let p = self.y.atan2(self.x);
        if p < 0.0 {
            p + 2.0 * PI
        } else {
            p
        }
    }

    /// `(r, ϑ, φ)`.
    pub fn spherical(&self) -> (f64, f64, f64) {
        (self.r(), self.theta(), self.phi())
    }

    /// Energy gap `ΔE = 2r`.
    pub fn gap(&self) -> f64 {
        2.0 * self.r()
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// `cos(ϑ/2)` and `sin(ϑ/2)` from Cartesian components, avoiding the
    /// cancellation in `r ± z` near the poles.
    fn half_angles(&self) -> (f64, f64) {
        let r = self.r();
        let rho2 = self.x * self.x + self.y * self.y;
        let (plus, minus) = if self.z >= 0.0 {
            let p = r + self.z;
            (p, rho2 / p)
        } else {
            let m = r - self.z;
            (rho2 / m, m)
        };
        ((plus / (2.0 * r)).sqrt(), (minus / (2.0 * r)).sqrt())
    }
}

/// 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianMatrix(pub [[C64; 2]; 2]);

impl HamiltonianMatrix {
    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let m = &self.0;
        (m[0][0].im).abs() <= tol
            && (m[1][1].im).abs() <= tol
            && (m[0][1] - m[1][0].conj()).norm() <= tol
    }
}

/// `H(r) = -r·σ`.
pub fn hamiltonian(p: &ParamPoint) -> HamiltonianMatrix {
    HamiltonianMatrix([
        [C64::new(-p.z, 0.0), C64::new(-p.x, p.y)],
        [C64::new(-p.x, -p.y), C64::new(p.z, 0.0)],
    ])
}

/// `∂H/∂x`, `∂H/∂y`, `∂H/∂z` (constant: minus the Pauli matrices).
pub fn hamiltonian_gradient() -> [HamiltonianMatrix; 3] {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    [
        HamiltonianMatrix([[z, -one], [-one, z]]),
        HamiltonianMatrix([[z, I], [-I, z]]),
        HamiltonianMatrix([[-one, z], [z, one]]),
    ]
}

/// `∂H/∂r`, `∂H/∂ϑ`, `∂H/∂φ` at `p`.
pub fn hamiltonian_gradient_spherical(p: &ParamPoint) -> [HamiltonianMatrix; 3] {
    let (r, th, ph) = p.spherical();
    let (st, ct) = th.sin_cos();
    let e_m = C64::from_polar(1.0, -ph);
    let e_p = C64::from_polar(1.0, ph);
    let d_r = HamiltonianMatrix([[C64::from(-ct), -e_m * st], [-e_p * st, C64::from(ct)]]);
    let d_th = HamiltonianMatrix([
        [C64::from(r * st), -e_m * (r * ct)],
        [-e_p * (r * ct), C64::from(-r * st)],
    ]);
    let d_ph = HamiltonianMatrix([
        [C64::from(0.0), I * e_m * (r * st)],
        [-I * e_p * (r * st), C64::from(0.0)],
    ]);
    [d_r, d_th, d_ph]
}

/// `⟨u|M|v⟩`.
pub fn matrix_element(u: &[C64; 2], m: &HamiltonianMatrix, v: &[C64; 2]) -> C64 {
    let mv = m.apply(*v);
    u[0].conj() * mv[0] + u[1].conj() * mv[1]
}

/// Ground and excited eigenpairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSystem {
    pub e0: f64,
    pub e1: f64,
    pub ground: [C64; 2],
    pub excited: [C64; 2],
}

/// Eigenpairs of `H(p)` in the phase convention where the first component of
/// the ground state is real and nonnegative.
pub fn eigensystem(p: &ParamPoint) -> Result<EigenSystem> {
    let r = p.r();
    if r == 0.0 {
        return Err(Error::DegeneratePoint);
    }
    let (c, s) = p.half_angles();
    let phi = p.phi();
    let e_p = C64::from_polar(1.0, phi);
    let e_m = C64::from_polar(1.0, -phi);
    Ok(EigenSystem {
        e0: -r,
        e1: r,
        ground: [C64::from(c), e_p * s],
        excited: [-e_m * s, C64::from(c)],
    })
}

/// `exp(i(sin φ σx − cos φ σy)ϑ/2)`, the rotation that carries the ϑ = 0
/// eigenvectors onto those at `(ϑ, φ)`.
pub fn eigenframe_rotation(theta: f64, phi: f64) -> HamiltonianMatrix {
    let (s, c) = (0.5 * theta).sin_cos();
    let e_p = C64::from_polar(1.0, phi);
    let e_m = C64::from_polar(1.0, -phi);
    // exp(iθ n·σ) = cos θ + i sin θ (n·σ), with n·σ = [[0, i e^{-iφ}], [-i e^{iφ}, 0]]
    HamiltonianMatrix([
        [C64::from(c), -e_m * s],
        [e_p * s, C64::from(c)],
    ])
}

/// The Provost-Vallee metric in spherical components `(r, ϑ, φ)`.
pub fn metric_tensor(p: &ParamPoint) -> Result<[[f64; 3]; 3]> {
    if p.r() == 0.0 {
        return Err(Error::DegeneratePoint);
    }
    let st = p.theta().sin();
    Ok([[0.0, 0.0, 0.0], [0.0, 0.25, 0.0], [0.0, 0.0, 0.25 * st * st]])
}

/// The metric assembled from matrix elements of the given Hamiltonian
/// derivatives between the ground and excited states.
pub fn metric_from_derivatives(
    p: &ParamPoint,
    derivs: &[HamiltonianMatrix; 3],
) -> Result<[[f64; 3]; 3]> {
    let es = eigensystem(p)?;
    let gap2 = p.gap().powi(2);
    let mut g = [[0.0; 3]; 3];
    let m01: Vec<C64> = derivs
        .iter()
        .map(|d| matrix_element(&es.ground, d, &es.excited))
        .collect();
    for mu in 0..3 {
        for nu in 0..3 {
            // ⟨1|∂νH|0⟩ = conj(⟨0|∂νH|1⟩) for Hermitian derivatives.
            g[mu][nu] = (m01[mu] * m01[nu].conj()).re / gap2;
        }
    }
    Ok(g)
}

/// Metric in Cartesian components: `(δij − r̂i r̂j) / (4 r²)`.
pub fn metric_tensor_cartesian(p: &ParamPoint) -> Result<[[f64; 3]; 3]> {
    let r = p.r();
    if r == 0.0 {
        return Err(Error::DegeneratePoint);
    }
    let u = p.as_array().map(|c| c / r);
    let mut g = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let d = if i == j { 1.0 } else { 0.0 };
            g[i][j] = (d - u[i] * u[j]) / (4.0 * r * r);
        }
    }
    Ok(g)
}

/// Metric speed `sqrt(g_ij ṙ_i ṙ_j)` for an arbitrary point and velocity.
pub fn metric_speed_at(p: &ParamPoint, velocity: [f64; 3]) -> Result<f64> {
    let g = metric_tensor_cartesian(p)?;
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += g[i][j] * velocity[i] * velocity[j];
        }
    }
    Ok(s.max(0.0).sqrt())
}

/// Driving protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// Straight chord at constant plain speed.
    A,
    /// Same chord at constant metric speed.
    B,
    /// Circular arc of constant gap.
    C,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::A, Variant::B, Variant::C];
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Variant::A => "A",
            Variant::B => "B",
            Variant::C => "C",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "A" | "a" => Ok(Variant::A),
            "B" | "b" => Ok(Variant::B),
            "C" | "c" => Ok(Variant::C),
            other => Err(format!("unknown path variant '{other}' (expected A, B or C)")),
        }
    }
}

/// A driving protocol from `(x0, 0, -z0)` to `(x0, 0, z0)` in time `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSpec {
    pub variant: Variant,
    pub x0: f64,
    pub z0: f64,
    pub duration: f64,
}

impl PathSpec {
    pub fn new(variant: Variant, x0: f64, z0: f64, duration: f64) -> Result<Self> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(x0) {
            return Err(Error::InvalidPath(format!("x0 must be positive and finite, got {x0}")));
        }
        if !ok(z0) {
            return Err(Error::InvalidPath(format!("z0 must be positive and finite, got {z0}")));
        }
        if !ok(duration) {
            return Err(Error::InvalidPath(format!(
                "duration must be positive and finite, got {duration}"
            )));
        }
        Ok(Self { variant, x0, z0, duration })
    }

    pub fn with_variant(&self, variant: Variant) -> Self {
        Self { variant, ..*self }
    }

    pub fn with_duration(&self, duration: f64) -> Result<Self> {
        Self::new(self.variant, self.x0, self.z0, duration)
    }

    pub fn r0(&self) -> f64 {
        self.x0.hypot(self.z0)
    }

    /// `α0 = arctan(z0/x0)`.
    pub fn alpha0(&self) -> f64 {
        self.z0.atan2(self.x0)
    }

    /// `α(t) = α0 (2t/T − 1)`.
    pub fn alpha(&self, t: f64) -> f64 {
        self.alpha0() * (2.0 * t / self.duration - 1.0)
    }

    pub fn alpha_rate(&self) -> f64 {
        2.0 * self.alpha0() / self.duration
    }

    pub fn start(&self) -> ParamPoint {
        ParamPoint::new(self.x0, 0.0, -self.z0)
    }

    pub fn end(&self) -> ParamPoint {
        ParamPoint::new(self.x0, 0.0, self.z0)
    }

    pub(crate) fn check_time(&self, t: f64) -> Result<()> {
        if !(0.0..=self.duration).contains(&t) {
            return Err(Error::TimeOutOfRange { t, duration: self.duration });
        }
        Ok(())
    }

    /// Point and velocity at `t` without range checking.
    pub(crate) fn point_velocity(&self, t: f64) -> (ParamPoint, [f64; 3]) {
        let tt = self.duration;
        if t == 0.0 {
            return (self.start(), self.velocity_unchecked(t));
        }
        if t == tt {
            return (self.end(), self.velocity_unchecked(t));
        }
        let p = match self.variant {
            Variant::A => ParamPoint::new(self.x0, 0.0, self.z0 * (2.0 * t / tt - 1.0)),
            Variant::B => ParamPoint::new(self.x0, 0.0, self.x0 * self.alpha(t).tan()),
            Variant::C => {
                let (s, c) = self.alpha(t).sin_cos();
                let r0 = self.r0();
                ParamPoint::new(r0 * c, 0.0, r0 * s)
            }
        };
        (p, self.velocity_unchecked(t))
    }

    fn velocity_unchecked(&self, t: f64) -> [f64; 3] {
        let tt = self.duration;
        match self.variant {
            Variant::A => [0.0, 0.0, 2.0 * self.z0 / tt],
            Variant::B => {
                let c = self.alpha(t).cos();
                [0.0, 0.0, self.x0 * self.alpha_rate() / (c * c)]
            }
            Variant::C => {
                let (s, c) = self.alpha(t).sin_cos();
                let w = self.r0() * self.alpha_rate();
                [-w * s, 0.0, w * c]
            }
        }
    }

    /// Parameter-space velocity `ṙ(t)`.
    pub fn velocity(&self, t: f64) -> Result<[f64; 3]> {
        self.check_time(t)?;
        Ok(self.velocity_unchecked(t))
    }
}

/// Position along the path at time `t`; the endpoints are returned exactly.
pub fn path_point(s: &PathSpec, t: f64) -> Result<ParamPoint> {
    s.check_time(t)?;
    Ok(s.point_velocity(t).0)
}

/// Euclidean speed `|ṙ(t)|`.
pub fn plain_speed(s: &PathSpec, t: f64) -> Result<f64> {
    s.check_time(t)?;
    let tt = s.duration;
    Ok(match s.variant {
        Variant::A => 2.0 * s.z0 / tt,
        Variant::B => {
            let gap = s.point_velocity(t).0.gap();
            s.alpha0() * gap * gap / (2.0 * s.x0 * tt)
        }
        Variant::C => 2.0 * s.alpha0() * s.r0() / tt,
    })
}

/// Speed measured with the Provost-Vallee metric.
pub fn metric_speed(s: &PathSpec, t: f64) -> Result<f64> {
    s.check_time(t)?;
    let tt = s.duration;
    Ok(match s.variant {
        Variant::A => {
            let gap = s.point_velocity(t).0.gap();
            4.0 * s.x0 * s.z0 / (tt * gap * gap)
        }
        Variant::B | Variant::C => s.alpha0() / tt,
    })
}

/// Metric length of the path, by adaptive quadrature of the metric speed.
pub fn metric_length(s: &PathSpec) -> f64 {
    let tt = s.duration;
    let speed = |t: f64| metric_speed(s, t.clamp(0.0, tt)).unwrap_or(0.0);
    // path A peaks sharply at the midpoint
    quad::integrate_split(speed, &[0.0, 0.5 * tt, tt], 1e-12)
}
