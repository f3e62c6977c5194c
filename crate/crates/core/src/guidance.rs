//! Guidance conditions for photons and electrons.
//!
//! Photons move along `2 E x B / (E^2 + B^2)`, which is exactly `c` for a
//! vacuum plane wave. Electrons follow the Bohmian velocity of their
//! wave function. Atomic units inside this module: `hbar = m_e = 1`.

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::fields::Vec3;
use crate::kemmer::{cross_dot, energy_dot, KemmerSpinor};

/// Photon velocity from the local fields.
pub fn photon_velocity(e: &Vec3, b: &Vec3) -> Result<Vec3> {
    let dens = e.norm_squared() + b.norm_squared();
    if !(dens > 0.0) {
        return Err(Error::ZeroField);
    }
    Ok(e.cross(b) * (2.0 / dens))
}

/// Electron and photon amplitudes at a pair of coordinates `(r_e, r_ph)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntangledPoint {
    pub a_e: Complex64,
    pub a_g: Complex64,
    /// `psi_e(r_e)` and `psi_g(r_e)`
    pub psi_e: Complex64,
    pub psi_g: Complex64,
    /// Attached and free `(E, B)` at `r_ph`.
    pub attached: (Vec3, Vec3),
    pub free: (Vec3, Vec3),
}

impl EntangledPoint {
    /// `a_e psi_e Psi_att + a_g psi_g (Psi_free + Psi_att)`
    pub fn combined(&self) -> KemmerSpinor {
        let att = KemmerSpinor::from_fields(self.attached.0, self.attached.1, Vec3::zeros(), 0.0);
        let free = KemmerSpinor::from_fields(self.free.0, self.free.1, Vec3::zeros(), 0.0);
        att.scale(self.a_e * self.psi_e)
            .add_fields(&free.add_fields(&att).scale(self.a_g * self.psi_g))
    }
}

/// Photon velocity guided by the entangled electron-photon state.
pub fn photon_velocity_entangled(point: &EntangledPoint) -> Result<Vec3> {
    let f = point.combined();
    let den = energy_dot(&f, &f).re;
    if !(den > 0.0) {
        return Err(Error::ZeroField);
    }
    Ok(cross_dot(&f, &f).map(|z| z.re) * (2.0 / den))
}

pub trait WaveFunction: Sync {
    fn value(&self, r: &Vec3) -> Complex64;
    fn gradient(&self, r: &Vec3) -> Vector3<Complex64>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Electron {
    pub mass: f64,
    pub charge: f64,
}

impl Default for Electron {
    fn default() -> Self {
        Self { mass: 1.0, charge: -1.0 }
    }
}

/// Hydrogen orbitals with the Bohr radius as unit length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orbital {
    H1s,
    H2pz,
}

const N_1S: f64 = 0.564_189_583_547_756_3; // 1/sqrt(pi)
const N_2P: f64 = 0.099_735_570_100_358_17; // 1/(4 sqrt(2 pi))

impl Orbital {
    pub fn energy(&self) -> f64 {
        match self {
            Orbital::H1s => -0.5,
            Orbital::H2pz => -0.125,
        }
    }

    pub fn psi(&self, r: &Vec3) -> f64 {
        let d = r.norm();
        match self {
            Orbital::H1s => N_1S * (-d).exp(),
            Orbital::H2pz => N_2P * r.z * (-0.5 * d).exp(),
        }
    }

    pub fn grad(&self, r: &Vec3) -> Vec3 {
        let d = r.norm();
        if d == 0.0 {
            return match self {
                Orbital::H1s => Vec3::zeros(),
                Orbital::H2pz => Vec3::new(0.0, 0.0, N_2P),
            };
        }
        match self {
            Orbital::H1s => -r / d * (N_1S * (-d).exp()),
            Orbital::H2pz => {
                (Vec3::z() - r * (r.z / (2.0 * d))) * (N_2P * (-0.5 * d).exp())
            }
        }
    }

    pub fn laplacian(&self, r: &Vec3) -> f64 {
        let d = r.norm();
        match self {
            Orbital::H1s => self.psi(r) * (1.0 - 2.0 / d),
            Orbital::H2pz => self.psi(r) * (0.25 - 2.0 / d),
        }
    }
}

impl WaveFunction for Orbital {
    fn value(&self, r: &Vec3) -> Complex64 {
        Complex64::new(self.psi(r), 0.0)
    }

    fn gradient(&self, r: &Vec3) -> Vector3<Complex64> {
        self.grad(r).map(|x| Complex64::new(x, 0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWave {
    pub k: Vec3,
}

impl WaveFunction for PlaneWave {
    fn value(&self, r: &Vec3) -> Complex64 {
        Complex64::from_polar(1.0, self.k.dot(r))
    }

    fn gradient(&self, r: &Vec3) -> Vector3<Complex64> {
        let v = self.value(r);
        self.k.map(|k| Complex64::new(0.0, k) * v)
    }
}

/// `a_e psi_e e^{-i E_e t} + a_g psi_g e^{-i E_g t} (1 + ratio)`, up to a
/// global phase.
///
/// `ratio` is `G_free / G_att` at the photon coordinate after factoring
/// out `G_att`; zero gives the bare two-level superposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelWave {
    pub a_e: Complex64,
    pub a_g: Complex64,
    pub excited: Orbital,
    pub ground: Orbital,
    pub t: f64,
    pub ratio: f64,
}

impl TwoLevelWave {
    pub fn hydrogen(a_e: Complex64, a_g: Complex64, t: f64) -> Self {
        Self { a_e, a_g, excited: Orbital::H2pz, ground: Orbital::H1s, t, ratio: 0.0 }
    }

    pub fn omega0(&self) -> f64 {
        self.excited.energy() - self.ground.energy()
    }

    /// Coefficients with the ground-state phase `arg(a_g) - E_g t` removed.
    /// A global phase leaves velocities and densities unchanged and keeps a
    /// pure ground state exactly real.
    fn coefficients(&self) -> (Complex64, Complex64) {
        let mag = self.a_g.norm();
        let unphase = if mag > 0.0 { self.a_g.conj() / mag } else { Complex64::new(1.0, 0.0) };
        (
            self.a_e * unphase * Complex64::from_polar(1.0, -self.omega0() * self.t),
            Complex64::new(mag * (1.0 + self.ratio), 0.0),
        )
    }
}

impl WaveFunction for TwoLevelWave {
    fn value(&self, r: &Vec3) -> Complex64 {
        let (ce, cg) = self.coefficients();
        ce * self.excited.psi(r) + cg * self.ground.psi(r)
    }

    fn gradient(&self, r: &Vec3) -> Vector3<Complex64> {
        let (ce, cg) = self.coefficients();
        let (ge, gg) = (self.excited.grad(r), self.ground.grad(r));
        Vector3::from_fn(|i, _| ce * ge[i] + cg * gg[i])
    }
}

/// Bohmian velocity `Im(grad psi / psi) / m - (e / m) A`.
pub fn electron_velocity<W: WaveFunction + ?Sized>(
    psi: &W,
    electron: &Electron,
    a: &Vec3,
    r: &Vec3,
) -> Result<Vec3> {
    let v = psi.value(r);
    if !(v.norm_sqr() > 0.0) {
        return Err(Error::Node);
    }
    let g = psi.gradient(r);
    let im = Vec3::from_fn(|i, _| (g[i] / v).im);
    Ok(im / electron.mass - a * (electron.charge / electron.mass))
}

/// Probability current `|psi|^2 v`.
pub fn probability_current<W: WaveFunction + ?Sized>(
    psi: &W,
    electron: &Electron,
    a: &Vec3,
    r: &Vec3,
) -> Vec3 {
    let v = psi.value(r);
    let g = psi.gradient(r);
    let im = Vec3::from_fn(|i, _| (v.conj() * g[i]).im);
    im / electron.mass - a * (v.norm_sqr() * electron.charge / electron.mass)
}

/// `<1s| d/dz |2pz>` for hydrogen, `(3/8) (128 sqrt 2 / 243)`.
pub fn hydrogen_dipole_velocity_element() -> f64 {
    0.375 * 128.0 * std::f64::consts::SQRT_2 / 243.0
}

/// `<v_z>(t)` for `a_e 2pz + a_g 1s`, which is
/// `2 Re(a_g(t)^* a_e(t) <1s| -i d/dz |2pz>)`.
pub fn hydrogen_mean_velocity(a_e: Complex64, a_g: Complex64, t: f64) -> f64 {
    let w0 = Orbital::H2pz.energy() - Orbital::H1s.energy();
    let phase = Complex64::from_polar(1.0, -w0 * t);
    2.0 * (a_g.conj() * a_e * phase).im * hydrogen_dipole_velocity_element()
}

/// `Q = -(1/2m) lap sqrt(rho) / sqrt(rho)` with a 4th-order stencil of step `h`.
pub fn quantum_potential<F: Fn(&Vec3) -> f64>(rho: F, mass: f64, r: &Vec3, h: f64) -> Result<f64> {
    if !(h > 0.0) || !(mass > 0.0) {
        return invalid("stencil step and mass must be positive");
    }
    let amp = |p: Vec3| {
        let d = rho(&p);
        if d > 0.0 && d.is_finite() {
            Ok(d.sqrt())
        } else {
            Err(Error::Node)
        }
    };
    let f0 = amp(*r)?;
    let mut lap = 0.0;
    for axis in 0..3 {
        let mut e = Vec3::zeros();
        e[axis] = h;
        let (p1, m1) = (amp(r + e)?, amp(r - e)?);
        let (p2, m2) = (amp(r + 2.0 * e)?, amp(r - 2.0 * e)?);
        lap += (-p2 + 16.0 * p1 - 30.0 * f0 + 16.0 * m1 - m2) / (12.0 * h * h);
    }
    Ok(-lap / (2.0 * mass * f0))
}

/// Closed-form quantum potential of a real orbital, `-(1/2m) lap psi / psi`.
pub fn orbital_quantum_potential(orbital: Orbital, mass: f64, r: &Vec3) -> Result<f64> {
    let psi = orbital.psi(r);
    if psi == 0.0 || r.norm() == 0.0 {
        return Err(Error::Node);
    }
    Ok(-orbital.laplacian(r) / (2.0 * mass * psi))
}

/// Coulomb potential of the proton in atomic units.
pub fn hydrogen_potential(r: &Vec3) -> f64 {
    -1.0 / r.norm()
}

/// `|a_e psi_e G_att + a_g psi_g (G_free + G_att)|^2`.
pub fn effective_electron_density(
    a_e: Complex64,
    a_g: Complex64,
    psi_e: Complex64,
    psi_g: Complex64,
    g_att: f64,
    g_free: f64,
) -> Result<f64> {
    if !(g_att >= 0.0 && g_free >= 0.0) {
        return invalid("field magnitudes must be non-negative");
    }
    Ok((a_e * psi_e * g_att + a_g * psi_g * (g_free + g_att)).norm_sqr())
}

/// Vector form using the energy product on attached and free spinors.
pub fn effective_electron_density_fields(
    a_e: Complex64,
    a_g: Complex64,
    psi_e: Complex64,
    psi_g: Complex64,
    attached: &KemmerSpinor,
    free: &KemmerSpinor,
) -> f64 {
    let f = attached
        .scale(a_e * psi_e)
        .add_fields(&free.add_fields(attached).scale(a_g * psi_g));
    energy_dot(&f, &f).re
}
