//! Point-charge and dipole fields split into attached and free parts.
//!
//! The attached part is the velocity field (falls as 1/r^2), the free
//! part is the acceleration field (falls as 1/r). Gaussian-style units
//! with `c = 1`: a static charge `q` gives `E = q / r^2`.

use nalgebra::{Matrix4, Vector3, Vector4};

use crate::error::{invalid, Error, Result};

pub type Vec3 = Vector3<f64>;

/// Field points closer than this to the source are rejected.
pub const SINGULAR_RADIUS: f64 = 1e-9;
/// Absolute tolerance on the retarded-time equation.
pub const RETARDED_TOL: f64 = 1e-12;
pub const RETARDED_MAX_ITER: usize = 100;

/// Natural cubic spline through a vector-valued table.
///
/// Outside the table the path continues along the end tangent, which
/// keeps position, velocity and acceleration continuous because the
/// natural end condition sets the second derivative to zero there.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    times: Vec<f64>,
    points: Vec<Vec3>,
    second: Vec<Vec3>,
}

impl SampledPath {
    pub fn new(times: Vec<f64>, points: Vec<Vec3>) -> Result<Self> {
        let n = times.len();
        if n < 2 || points.len() != n {
            return invalid("sampled worldline needs at least two (time, point) pairs");
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return invalid("sampled worldline times must be strictly increasing");
        }
        let mut second = vec![Vec3::zeros(); n];
        if n > 2 {
            // Thomas algorithm on the interior second derivatives.
            let m = n - 2;
            let mut diag = vec![0.0; m];
            let mut upper = vec![0.0; m];
            let mut rhs = vec![Vec3::zeros(); m];
            for k in 0..m {
                let i = k + 1;
                let h0 = times[i] - times[i - 1];
                let h1 = times[i + 1] - times[i];
                diag[k] = 2.0 * (h0 + h1);
                upper[k] = h1;
                rhs[k] = 6.0
                    * ((points[i + 1] - points[i]) / h1 - (points[i] - points[i - 1]) / h0);
            }
            for k in 1..m {
                let lower = times[k + 1] - times[k];
                let w = lower / diag[k - 1];
                diag[k] -= w * upper[k - 1];
                let prev = rhs[k - 1];
                rhs[k] -= w * prev;
            }
            second[m] = rhs[m - 1] / diag[m - 1];
            for k in (0..m - 1).rev() {
                second[k + 1] = (rhs[k] - upper[k] * second[k + 2]) / diag[k];
            }
        }
        Ok(Self { times, points, second })
    }

    /// Position, velocity and acceleration at `t`.
    pub fn eval(&self, t: f64) -> (Vec3, Vec3, Vec3) {
        let n = self.times.len();
        if t <= self.times[0] {
            let (x, v, _) = self.segment(0, self.times[0]);
            return (x + v * (t - self.times[0]), v, Vec3::zeros());
        }
        if t >= self.times[n - 1] {
            let (x, v, _) = self.segment(n - 2, self.times[n - 1]);
            return (x + v * (t - self.times[n - 1]), v, Vec3::zeros());
        }
        let i = match self.times.binary_search_by(|s| s.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => i - 1,
        };
        self.segment(i, t)
    }

    fn segment(&self, i: usize, t: f64) -> (Vec3, Vec3, Vec3) {
        let h = self.times[i + 1] - self.times[i];
        let a = (self.times[i + 1] - t) / h;
        let b = (t - self.times[i]) / h;
        let (y0, y1) = (self.points[i], self.points[i + 1]);
        let (m0, m1) = (self.second[i], self.second[i + 1]);
        let x = y0 * a + y1 * b + (m0 * (a * a * a - a) + m1 * (b * b * b - b)) * (h * h / 6.0);
        let v = (y1 - y0) / h - m0 * ((3.0 * a * a - 1.0) * h / 6.0)
            + m1 * ((3.0 * b * b - 1.0) * h / 6.0);
        let acc = m0 * a + m1 * b;
        (x, v, acc)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Worldline {
    Rest { position: Vec3 },
    Uniform { origin: Vec3, velocity: Vec3 },
    /// `x(t) = center + axis * amplitude * cos(omega t - phase)`
    Harmonic { center: Vec3, axis: Vec3, amplitude: f64, omega: f64, phase: f64 },
    Sampled(SampledPath),
}

/// A charge moving on a prescribed worldline.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargeKinematics {
    pub charge: f64,
    pub worldline: Worldline,
}

impl ChargeKinematics {
    pub fn at_rest(charge: f64, position: Vec3) -> Self {
        Self { charge, worldline: Worldline::Rest { position } }
    }

    pub fn uniform(charge: f64, origin: Vec3, velocity: Vec3) -> Result<Self> {
        if !(velocity.norm() < 1.0) {
            return invalid(format!("speed {} is not below c", velocity.norm()));
        }
        Ok(Self { charge, worldline: Worldline::Uniform { origin, velocity } })
    }

    pub fn harmonic(
        charge: f64,
        center: Vec3,
        axis: Vec3,
        amplitude: f64,
        omega: f64,
        phase: f64,
    ) -> Result<Self> {
        let norm = axis.norm();
        if !(norm > 0.0) {
            return invalid("oscillation axis must be nonzero");
        }
        if !((amplitude * omega).abs() < 1.0) {
            return invalid(format!("peak speed {} is not below c", (amplitude * omega).abs()));
        }
        Ok(Self {
            charge,
            worldline: Worldline::Harmonic { center, axis: axis / norm, amplitude, omega, phase },
        })
    }

    pub fn sampled(charge: f64, times: Vec<f64>, points: Vec<Vec3>) -> Result<Self> {
        let path = SampledPath::new(times, points)?;
        let n = path.times.len();
        for i in 0..n - 1 {
            for s in [0.0, 0.25, 0.5, 0.75] {
                let t = path.times[i] + s * (path.times[i + 1] - path.times[i]);
                if !(path.eval(t).1.norm() < 1.0) {
                    return invalid(format!("interpolated speed reaches c near t = {t}"));
                }
            }
        }
        Ok(Self { charge, worldline: Worldline::Sampled(path) })
    }

    /// Position, velocity and acceleration at time `t`.
    pub fn state(&self, t: f64) -> (Vec3, Vec3, Vec3) {
        match &self.worldline {
            Worldline::Rest { position } => (*position, Vec3::zeros(), Vec3::zeros()),
            Worldline::Uniform { origin, velocity } => {
                (origin + velocity * t, *velocity, Vec3::zeros())
            }
            Worldline::Harmonic { center, axis, amplitude, omega, phase } => {
                let arg = omega * t - phase;
                let (s, c) = arg.sin_cos();
                (
                    center + axis * (amplitude * c),
                    axis * (-amplitude * omega * s),
                    axis * (-amplitude * omega * omega * c),
                )
            }
            Worldline::Sampled(path) => path.eval(t),
        }
    }

    pub fn position(&self, t: f64) -> Vec3 {
        self.state(t).0
    }

    pub fn velocity(&self, t: f64) -> Vec3 {
        self.state(t).1
    }

    pub fn acceleration(&self, t: f64) -> Vec3 {
        self.state(t).2
    }
}

/// Fields at one spacetime point, split into attached and free parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub position: Vec3,
    pub time: f64,
    pub e_att: Vec3,
    pub b_att: Vec3,
    pub e_free: Vec3,
    pub b_free: Vec3,
}

impl FieldSample {
    pub fn e(&self) -> Vec3 {
        self.e_att + self.e_free
    }

    pub fn b(&self) -> Vec3 {
        self.b_att + self.b_free
    }
}

/// Solve `t' = t - |r - x(t')|` for the emission time `t'`.
pub fn retarded_time(source: &ChargeKinematics, r: &Vec3, t: f64) -> Result<f64> {
    let residual = |tau: f64| {
        let d = r - source.position(tau);
        (t - tau - d.norm(), d)
    };
    let mut tau = t - (r - source.position(t)).norm();
    let (mut f, mut d) = residual(tau);
    // Below 1e-12 the floor is set by the precision of t itself.
    let tol = RETARDED_TOL.max(8.0 * f64::EPSILON * t.abs().max(tau.abs()));
    let mut converged = f.abs() <= tol;
    let mut iter = 0;
    while !converged && iter < RETARDED_MAX_ITER {
        iter += 1;
        let dist = d.norm();
        let slope = if dist > 0.0 { -1.0 + (d / dist).dot(&source.velocity(tau)) } else { -1.0 };
        let mut step = -f / slope;
        let mut improved = false;
        for _ in 0..30 {
            let cand = tau + step;
            let (fc, dc) = residual(cand);
            if fc.abs() < f.abs() {
                tau = cand;
                f = fc;
                d = dc;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            tau = t - d.norm();
            (f, d) = residual(tau);
        }
        converged = f.abs() <= tol;
    }
    if !converged {
        return Err(Error::NoConvergence(RETARDED_MAX_ITER));
    }
    // Newton is quadratic here; two more steps reach rounding level.
    for _ in 0..2 {
        let dist = d.norm();
        if f == 0.0 || dist == 0.0 {
            break;
        }
        let slope = -1.0 + (d / dist).dot(&source.velocity(tau));
        let cand = tau - f / slope;
        let (fc, dc) = residual(cand);
        if fc.abs() > f.abs() {
            break;
        }
        (tau, f, d) = (cand, fc, dc);
    }
    let dist = d.norm();
    if dist < SINGULAR_RADIUS {
        return Err(Error::Singular(dist));
    }
    Ok(tau)
}

/// Lienard-Wiechert fields split into the velocity (attached) and
/// acceleration (free) parts, all evaluated at the retarded time.
pub fn lienard_wiechert(source: &ChargeKinematics, r: &Vec3, t: f64) -> Result<FieldSample> {
    let tau = retarded_time(source, r, t)?;
    let (x, v, a) = source.state(tau);
    let d = r - x;
    let dist = d.norm();
    let n = d / dist;
    let kappa = 1.0 - n.dot(&v);
    let inv_gamma2 = 1.0 - v.norm_squared();
    let q = source.charge;
    let u = n - v;
    let e_att = u * (q * inv_gamma2 / (kappa.powi(3) * dist * dist));
    let e_free = n.cross(&u.cross(&a)) * (q / (kappa.powi(3) * dist));
    Ok(FieldSample {
        position: *r,
        time: t,
        e_att,
        b_att: n.cross(&e_att),
        e_free,
        b_free: n.cross(&e_free),
    })
}

/// A point dipole `p(t) axis` located at `origin`, with
/// `p(t) = p0 cos(omega t - phase)`. `omega = 0` gives a static dipole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleSource {
    pub p0: f64,
    pub omega: f64,
    pub phase: f64,
    pub axis: Vec3,
    pub origin: Vec3,
}

impl DipoleSource {
    pub fn harmonic(p0: f64, omega: f64, phase: f64, axis: Vec3, origin: Vec3) -> Result<Self> {
        let norm = axis.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return invalid("dipole axis must be a nonzero finite vector");
        }
        Ok(Self { p0, omega, phase, axis: axis / norm, origin })
    }

    pub fn static_dipole(p0: f64, axis: Vec3, origin: Vec3) -> Result<Self> {
        Self::harmonic(p0, 0.0, 0.0, axis, origin)
    }

    /// `(p, p', p'')` at time `t`.
    pub fn moments(&self, t: f64) -> (f64, f64, f64) {
        let (s, c) = (self.omega * t - self.phase).sin_cos();
        let w = self.omega;
        (self.p0 * c, -self.p0 * w * s, -self.p0 * w * w * c)
    }
}

/// Dipole-approximation fields with arguments retarded by `t - r`.
pub fn dipole_fields(source: &DipoleSource, r: &Vec3, t: f64) -> Result<FieldSample> {
    let rel = r - source.origin;
    let dist = rel.norm();
    if dist < SINGULAR_RADIUS {
        return Err(Error::Singular(dist));
    }
    let n = rel / dist;
    let (p, pd, pdd) = source.moments(t - dist);
    let ax = source.axis;
    let cos_t = n.dot(&ax);
    // 2cos r + sin theta_hat, sin theta_hat and sin phi_hat in Cartesian form.
    let lobe = n * (3.0 * cos_t) - ax;
    let theta_part = n * cos_t - ax;
    let phi_part = ax.cross(&n);
    let r2 = dist * dist;
    Ok(FieldSample {
        position: *r,
        time: t,
        e_att: lobe * (p / (r2 * dist) + pd / r2),
        b_att: phi_part * (pd / r2),
        e_free: theta_part * (pdd / dist),
        b_free: phi_part * (pdd / dist),
    })
}

/// Energy density and Poynting vector, scaled so a plane wave has `|S| = u`.
pub fn energy_and_flux(e: &Vec3, b: &Vec3) -> (f64, Vec3) {
    (0.5 * (e.norm_squared() + b.norm_squared()), e.cross(b))
}

/// Minkowski product with signature (+, -, -, -).
fn mdot(a: &Vector4<f64>, b: &Vector4<f64>) -> f64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
}

fn wedge(a: &Vector4<f64>, b: &Vector4<f64>) -> Matrix4<f64> {
    a * b.transpose() - b * a.transpose()
}

/// Covariant field tensors `(F_free, F_att)` at the event `x = (t, x, y, z)`.
///
/// With `X = x - z(s)` on the past light cone, `rho = X.z'` and `Q = X.z''`
/// (derivatives with respect to proper time):
/// `F_att = e/rho^3 (X z' - z' X)` and
/// `F_free = e/rho^3 [rho (X z'' - z'' X) - Q (X z' - z' X)]`.
pub fn covariant_tensors(
    source: &ChargeKinematics,
    x: &Vector4<f64>,
) -> Result<(Matrix4<f64>, Matrix4<f64>)> {
    let r = Vec3::new(x[1], x[2], x[3]);
    let tau = retarded_time(source, &r, x[0])?;
    let (pos, v, a) = source.state(tau);
    let gamma2 = 1.0 / (1.0 - v.norm_squared());
    let gamma = gamma2.sqrt();
    let va = v.dot(&a);
    let sep = Vector4::new(x[0] - tau, r.x - pos.x, r.y - pos.y, r.z - pos.z);
    let zd = Vector4::new(gamma, gamma * v.x, gamma * v.y, gamma * v.z);
    let g4 = gamma2 * gamma2;
    let acc3 = v * (g4 * va) + a * gamma2;
    let zdd = Vector4::new(g4 * va, acc3.x, acc3.y, acc3.z);
    let rho = mdot(&sep, &zd);
    let q = mdot(&sep, &zdd);
    let e = source.charge;
    let vel = wedge(&sep, &zd);
    let f_att = vel * (e / rho.powi(3));
    let f_free = (wedge(&sep, &zdd) * rho - vel * q) * (e / rho.powi(3));
    Ok((f_free, f_att))
}

/// `E^i = F^{i0}`, `B = (F^{32}, F^{13}, F^{21})`.
pub fn fields_from_tensor(f: &Matrix4<f64>) -> (Vec3, Vec3) {
    (
        Vec3::new(f[(1, 0)], f[(2, 0)], f[(3, 0)]),
        Vec3::new(f[(3, 2)], f[(1, 3)], f[(2, 1)]),
    )
}

/// Remove the component of `v` along `r`.
pub fn project_transverse_r(v: &Vec3, r: &Vec3) -> Result<Vec3> {
    let norm = r.norm();
    if !(norm > 0.0) {
        return Err(Error::Singular(norm));
    }
    let n = r / norm;
    Ok(v - n * v.dot(&n))
}
