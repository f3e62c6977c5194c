//! Kemmer block-spinor form of Maxwell's equations.
//!
//! Each grid node carries 20 components: `E, B, A, phi` followed by the
//! unit pads. The dynamics are the component equations
//!
//! ```text
//! dE/dt   =  curl B - j
//! dB/dt   = -curl E
//! dA/dt   = -E - grad phi
//! dphi/dt = -div A
//! ```
//!
//! The last line is the Lorenz condition. With the opposite sign the
//! system for `phi` becomes elliptic in time and grid noise grows
//! without bound, so the hyperbolic sign is used.

use nalgebra::{SMatrix, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::fields::Vec3;

pub const COMPONENTS: usize = 20;
pub const DYNAMIC: usize = 10;
pub const E: usize = 0;
pub const B: usize = 3;
pub const A: usize = 6;
pub const PHI: usize = 9;
pub const PAD_E: usize = 10;
pub const PAD_B: usize = 13;
pub const PAD_A: usize = 16;
pub const PAD_PHI: usize = 19;

/// Courant limit `dt <= CFL_MAX * h`.
pub const CFL_MAX: f64 = 0.5;
pub const DEFAULT_COURANT: f64 = 0.4;

type Fields = [f64; DYNAMIC];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub h: f64,
    pub origin: Vec3,
}

impl Grid {
    /// A dimension of size 1 is treated as translation invariant.
    pub fn new(nx: usize, ny: usize, nz: usize, h: f64, origin: Vec3) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return invalid("grid spacing must be positive");
        }
        for (name, n) in [("nx", nx), ("ny", ny), ("nz", nz)] {
            if n != 1 && n < 5 {
                return Err(Error::GridTooSmall(format!(
                    "{name} = {n}; centered differences need at least 5 nodes (or 1 for a flat axis)"
                )));
            }
        }
        Ok(Self { nx, ny, nz, h, origin })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.nx, self.ny, self.nz]
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.ny + j) * self.nz + k
    }

    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let k = idx % self.nz;
        let j = (idx / self.nz) % self.ny;
        let i = idx / (self.nz * self.ny);
        [i, j, k]
    }

    pub fn position(&self, idx: usize) -> Vec3 {
        let [i, j, k] = self.coords(idx);
        self.origin + Vec3::new(i as f64, j as f64, k as f64) * self.h
    }

    /// Volume element, counting only the non-flat axes.
    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dims().iter().filter(|&&n| n > 1).count() as i32)
    }

    fn stride(&self, axis: usize) -> usize {
        match axis {
            0 => self.ny * self.nz,
            1 => self.nz,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    /// First-order one-way (Mur-type) condition on the outer two layers.
    Absorbing,
}

/// Grid state. Pads hold exactly 1.0 for a standard state.
#[derive(Debug, Clone, PartialEq)]
pub struct KemmerState {
    pub grid: Grid,
    pub time: f64,
    pub nodes: Vec<[f64; COMPONENTS]>,
}

fn standard_node() -> [f64; COMPONENTS] {
    let mut n = [0.0; COMPONENTS];
    n[DYNAMIC..].fill(1.0);
    n
}

impl KemmerState {
    pub fn zeros(grid: Grid) -> Self {
        Self { grid, time: 0.0, nodes: vec![standard_node(); grid.len()] }
    }

    /// Fill `E, B, A, phi` from a function of position.
    pub fn from_fn<F>(grid: Grid, time: f64, f: F) -> Self
    where
        F: Fn(Vec3) -> (Vec3, Vec3, Vec3, f64) + Sync,
    {
        let nodes = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let (e, b, a, phi) = f(grid.position(idx));
                let mut n = standard_node();
                n[E..E + 3].copy_from_slice(e.as_slice());
                n[B..B + 3].copy_from_slice(b.as_slice());
                n[A..A + 3].copy_from_slice(a.as_slice());
                n[PHI] = phi;
                n
            })
            .collect();
        Self { grid, time, nodes }
    }

    fn vec_at(&self, idx: usize, offset: usize) -> Vec3 {
        let n = &self.nodes[idx];
        Vec3::new(n[offset], n[offset + 1], n[offset + 2])
    }

    pub fn e(&self, idx: usize) -> Vec3 {
        self.vec_at(idx, E)
    }

    pub fn b(&self, idx: usize) -> Vec3 {
        self.vec_at(idx, B)
    }

    pub fn a(&self, idx: usize) -> Vec3 {
        self.vec_at(idx, A)
    }

    pub fn phi(&self, idx: usize) -> f64 {
        self.nodes[idx][PHI]
    }

    pub fn pads_are_standard(&self) -> bool {
        self.nodes.iter().all(|n| n[DYNAMIC..].iter().all(|&p| p == 1.0))
    }

    /// RMS over nodes of the Euclidean distance between the field blocks.
    pub fn rms_difference(&self, other: &Self) -> f64 {
        let sum: f64 = self
            .nodes
            .iter()
            .zip(&other.nodes)
            .map(|(a, b)| (0..DYNAMIC).map(|c| (a[c] - b[c]).powi(2)).sum::<f64>())
            .sum();
        (sum / self.nodes.len() as f64).sqrt()
    }

    pub fn spinor(&self, idx: usize) -> KemmerSpinor {
        let mut c = [Complex64::new(0.0, 0.0); COMPONENTS];
        for (dst, &src) in c.iter_mut().zip(self.nodes[idx].iter()) {
            *dst = Complex64::new(src, 0.0);
        }
        KemmerSpinor { c, coordinate: PhotonCoordinate::Real }
    }

    fn dynamic(&self) -> Vec<Fields> {
        self.nodes.iter().map(|n| n[..DYNAMIC].try_into().unwrap()).collect()
    }

    fn store(&mut self, fields: &[Fields]) {
        for (n, f) in self.nodes.iter_mut().zip(fields) {
            n[..DYNAMIC].copy_from_slice(f);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceSplit {
    Attached,
    Free,
    Coherent,
    Incoherent,
}

/// A smoothed point dipole driving the electric equation.
///
/// The current is `4 pi p'(t) axis w(r) / F`, so the radiated field matches
/// the Gaussian-unit dipole fields of the `fields` module. `F` is the
/// response of the smoothing kernel at the drive wavenumber, which a
/// smeared source would otherwise imprint on the far field. `p(t)` is
/// switched on over `ramp` time units to avoid a step at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointDipoleCurrent {
    pub origin: Vec3,
    pub axis: Vec3,
    pub p0: f64,
    pub omega: f64,
    pub phase: f64,
    pub ramp: f64,
}

impl PointDipoleCurrent {
    /// `p'(t)` including the switch-on envelope.
    pub fn p_dot(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let (s, ds) = if t >= self.ramp {
            (1.0, 0.0)
        } else {
            let x = t / self.ramp;
            (x * x * x * (10.0 - 15.0 * x + 6.0 * x * x), 30.0 * x * x * (1.0 - x).powi(2) / self.ramp)
        };
        let (sn, cs) = (self.omega * t - self.phase).sin_cos();
        self.p0 * (ds * cs - s * self.omega * sn)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SourceKind {
    None,
    PointDipole(PointDipoleCurrent),
}

/// Source term `(j_E, j_B, j_A)`. Charge sources never drive `B` or `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct KemmerSource {
    pub kind: SourceKind,
    pub split: SourceSplit,
}

impl KemmerSource {
    pub fn none() -> Self {
        Self { kind: SourceKind::None, split: SourceSplit::Coherent }
    }

    pub fn point_dipole(dipole: PointDipoleCurrent) -> Result<Self> {
        let norm = dipole.axis.norm();
        if !(norm > 0.0) {
            return invalid("dipole axis must be nonzero");
        }
        if !(dipole.ramp > 0.0) {
            return invalid("ramp duration must be positive");
        }
        let dipole = PointDipoleCurrent { axis: dipole.axis / norm, ..dipole };
        Ok(Self { kind: SourceKind::PointDipole(dipole), split: SourceSplit::Coherent })
    }

    pub fn j_b(&self, _r: &Vec3, _t: f64) -> Vec3 {
        Vec3::zeros()
    }

    pub fn j_a(&self, _r: &Vec3, _t: f64) -> Vec3 {
        Vec3::zeros()
    }
}

/// Smoothing weights of a point source: Gaussian of width `h` over a
/// 3-cell radius, normalised so that the weights integrate to one.
pub fn source_weights(grid: &Grid, origin: &Vec3) -> Vec<(usize, f64)> {
    let h = grid.h;
    let rel = (origin - grid.origin) / h;
    let center = [rel.x.round() as i64, rel.y.round() as i64, rel.z.round() as i64];
    let dims = grid.dims();
    let mut out = Vec::new();
    let range = |d: usize| if dims[d] == 1 { 0..=0 } else { -3..=3 };
    for di in range(0) {
        for dj in range(1) {
            for dk in range(2) {
                let c = [center[0] + di, center[1] + dj, center[2] + dk];
                if (0..3).any(|d| c[d] < 0 || c[d] >= dims[d] as i64) {
                    continue;
                }
                let idx = grid.index(c[0] as usize, c[1] as usize, c[2] as usize);
                let d2 = (grid.position(idx) - origin).norm_squared();
                out.push((idx, (-0.5 * d2 / (h * h)).exp()));
            }
        }
    }
    let total: f64 = out.iter().map(|w| w.1).sum::<f64>() * grid.cell_volume();
    for w in &mut out {
        w.1 /= total;
    }
    out
}

/// Fourier response of the smoothing weights at wavenumber `k`, averaged
/// over the grid axes that are not flat.
pub fn kernel_response(grid: &Grid, origin: &Vec3, weights: &[(usize, f64)], k: f64) -> f64 {
    let axes: Vec<usize> = (0..3).filter(|&a| grid.dims()[a] > 1).collect();
    if axes.is_empty() {
        return 1.0;
    }
    let dv = grid.cell_volume();
    let sum: f64 = axes
        .iter()
        .map(|&a| weights.iter().map(|&(i, w)| w * dv * (k * (grid.position(i)[a] - origin[a])).cos()).sum::<f64>())
        .sum();
    sum / axes.len() as f64
}

const C4: [f64; 4] = [1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0];

struct Stencil<'a> {
    grid: &'a Grid,
    boundary: Boundary,
    f: &'a [Fields],
}

impl Stencil<'_> {
    /// 4th-order centered derivative of component `c` along `axis`.
    fn d(&self, idx: usize, coord: usize, axis: usize, c: usize) -> f64 {
        let n = self.grid.dims()[axis];
        if n == 1 {
            return 0.0;
        }
        let s = self.grid.stride(axis) as isize;
        let base = idx as isize - coord as isize * s;
        let at = |off: isize| {
            let p = (coord as isize + off).rem_euclid(n as isize);
            self.f[(base + p * s) as usize][c]
        };
        (C4[0] * at(-2) + C4[1] * at(-1) + C4[2] * at(1) + C4[3] * at(2)) / self.grid.h
    }

    /// Second-order one-sided derivative pointing into the domain.
    fn d_inward(&self, idx: usize, coord: usize, axis: usize, c: usize, high: bool) -> f64 {
        let s = self.grid.stride(axis) as isize;
        let base = idx as isize - coord as isize * s;
        let at = |p: isize| self.f[(base + p * s) as usize][c];
        let p = coord as isize;
        if high {
            (3.0 * at(p) - 4.0 * at(p - 1) + at(p - 2)) / (2.0 * self.grid.h)
        } else {
            (-3.0 * at(p) + 4.0 * at(p + 1) - at(p + 2)) / (2.0 * self.grid.h)
        }
    }

    fn interior_rate(&self, idx: usize, coords: [usize; 3], out: &mut Fields) {
        let d = |axis: usize, c: usize| self.d(idx, coords[axis], axis, c);
        let curl = |o: usize| {
            [d(1, o + 2) - d(2, o + 1), d(2, o) - d(0, o + 2), d(0, o + 1) - d(1, o)]
        };
        let curl_b = curl(B);
        let curl_e = curl(E);
        let f = &self.f[idx];
        for i in 0..3 {
            out[E + i] = curl_b[i];
            out[B + i] = -curl_e[i];
            out[A + i] = -f[E + i] - d(i, PHI);
        }
        out[PHI] = -(d(0, A) + d(1, A + 1) + d(2, A + 2));
    }

    fn edge_rate(&self, idx: usize, coords: [usize; 3], faces: &[(usize, bool)], out: &mut Fields) {
        let scale = 1.0 / (faces.len() as f64).sqrt();
        for c in 0..DYNAMIC {
            let mut rate = 0.0;
            for &(axis, high) in faces {
                let g = self.d_inward(idx, coords[axis], axis, c, high);
                rate += if high { -g } else { g };
            }
            out[c] = rate * scale;
        }
    }

    fn rate(&self, idx: usize, out: &mut Fields) {
        let coords = self.grid.coords(idx);
        if self.boundary == Boundary::Absorbing {
            let dims = self.grid.dims();
            let mut faces = [(0usize, false); 3];
            let mut m = 0;
            for axis in 0..3 {
                if dims[axis] == 1 {
                    continue;
                }
                if coords[axis] < 2 {
                    faces[m] = (axis, false);
                    m += 1;
                } else if coords[axis] + 2 >= dims[axis] {
                    faces[m] = (axis, true);
                    m += 1;
                }
            }
            if m > 0 {
                self.edge_rate(idx, coords, &faces[..m], out);
                return;
            }
        }
        self.interior_rate(idx, coords, out);
    }
}

fn compute_rates(
    grid: &Grid,
    boundary: Boundary,
    fields: &[Fields],
    source: &[(usize, f64)],
    current: Option<(&PointDipoleCurrent, f64)>,
    out: &mut [Fields],
) {
    let st = Stencil { grid, boundary, f: fields };
    out.par_iter_mut().enumerate().for_each(|(idx, o)| st.rate(idx, o));
    if let Some((dip, t)) = current {
        let amp = 4.0 * std::f64::consts::PI * dip.p_dot(t);
        for &(idx, w) in source {
            for i in 0..3 {
                out[idx][E + i] -= amp * w * dip.axis[i];
            }
        }
    }
}

/// Time derivative of a source-free state; pad rates are zero.
pub fn apply_hamiltonian(state: &KemmerState, boundary: Boundary) -> Result<KemmerState> {
    Grid::new(state.grid.nx, state.grid.ny, state.grid.nz, state.grid.h, state.grid.origin)?;
    let fields = state.dynamic();
    let mut rates = vec![[0.0; DYNAMIC]; fields.len()];
    compute_rates(&state.grid, boundary, &fields, &[], None, &mut rates);
    let nodes = rates
        .iter()
        .map(|r| {
            let mut n = [0.0; COMPONENTS];
            n[..DYNAMIC].copy_from_slice(r);
            n
        })
        .collect();
    Ok(KemmerState { grid: state.grid, time: state.time, nodes })
}

fn axpy(out: &mut [Fields], base: &[Fields], k: &[Fields], s: f64) {
    out.par_iter_mut().zip(base.par_iter().zip(k.par_iter())).for_each(|(o, (b, k))| {
        for c in 0..DYNAMIC {
            o[c] = b[c] + s * k[c];
        }
    });
}

/// Advance `steps` RK4 steps of size `dt`.
pub fn evolve(
    state: &KemmerState,
    source: &KemmerSource,
    boundary: Boundary,
    dt: f64,
    steps: usize,
) -> Result<KemmerState> {
    let grid = state.grid;
    Grid::new(grid.nx, grid.ny, grid.nz, grid.h, grid.origin)?;
    let limit = CFL_MAX * grid.h;
    if !(dt > 0.0) || dt > limit {
        return Err(Error::Cfl { dt, limit });
    }
    let (weights, dipole) = match &source.kind {
        SourceKind::None => (Vec::new(), None),
        SourceKind::PointDipole(d) => {
            let mut w = source_weights(&grid, &d.origin);
            let f = kernel_response(&grid, &d.origin, &w, d.omega);
            w.iter_mut().for_each(|x| x.1 /= f);
            (w, Some(d))
        }
    };
    let n = grid.len();
    let mut y = state.dynamic();
    let mut k = [(); 4].map(|_| vec![[0.0; DYNAMIC]; n]);
    let mut tmp = vec![[0.0; DYNAMIC]; n];
    let mut t = state.time;
    for step in 0..steps {
        let cur = |t: f64| dipole.map(|d| (d, t));
        compute_rates(&grid, boundary, &y, &weights, cur(t), &mut k[0]);
        axpy(&mut tmp, &y, &k[0], 0.5 * dt);
        compute_rates(&grid, boundary, &tmp, &weights, cur(t + 0.5 * dt), &mut k[1]);
        axpy(&mut tmp, &y, &k[1], 0.5 * dt);
        compute_rates(&grid, boundary, &tmp, &weights, cur(t + 0.5 * dt), &mut k[2]);
        axpy(&mut tmp, &y, &k[2], dt);
        compute_rates(&grid, boundary, &tmp, &weights, cur(t + dt), &mut k[3]);
        let finite = AtomicFlag::default();
        y.par_iter_mut().enumerate().for_each(|(i, yi)| {
            for c in 0..DYNAMIC {
                yi[c] += dt / 6.0 * (k[0][i][c] + 2.0 * k[1][i][c] + 2.0 * k[2][i][c] + k[3][i][c]);
                if !yi[c].is_finite() {
                    finite.set();
                }
            }
        });
        if finite.get() {
            return Err(Error::NonFinite(step + 1));
        }
        t = state.time + (step + 1) as f64 * dt;
    }
    let mut out = state.clone();
    out.store(&y);
    out.time = t;
    Ok(out)
}

#[derive(Default)]
struct AtomicFlag(std::sync::atomic::AtomicBool);

impl AtomicFlag {
    fn set(&self) {
        self.0.store(true, std::sync::atomic::Ordering::Relaxed);
    }
    fn get(&self) -> bool {
        self.0.load(std::sync::atomic::Ordering::Relaxed)
    }
}

/// Marks whether a spinor is attached to a real photon position or to
/// the reserved null coordinate of the vacuum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhotonCoordinate {
    Real,
    Null,
}

/// Complex spinor at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KemmerSpinor {
    pub c: [Complex64; COMPONENTS],
    pub coordinate: PhotonCoordinate,
}

fn zero_c() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl KemmerSpinor {
    pub fn zero(coordinate: PhotonCoordinate) -> Self {
        Self { c: [zero_c(); COMPONENTS], coordinate }
    }

    pub fn from_complex(
        e: Vector3<Complex64>,
        b: Vector3<Complex64>,
        a: Vector3<Complex64>,
        phi: Complex64,
    ) -> Self {
        let mut s = Self::zero(PhotonCoordinate::Real);
        for i in 0..3 {
            s.c[E + i] = e[i];
            s.c[B + i] = b[i];
            s.c[A + i] = a[i];
        }
        s.c[PHI] = phi;
        s.c[DYNAMIC..].fill(Complex64::new(1.0, 0.0));
        s
    }

    pub fn from_fields(e: Vec3, b: Vec3, a: Vec3, phi: f64) -> Self {
        let cx = |v: Vec3| v.map(|x| Complex64::new(x, 0.0));
        Self::from_complex(cx(e), cx(b), cx(a), Complex64::new(phi, 0.0))
    }

    /// Vacuum: no fields, standard pads, null photon coordinate.
    pub fn vacuum() -> Self {
        let mut s = Self::from_fields(Vec3::zeros(), Vec3::zeros(), Vec3::zeros(), 0.0);
        s.coordinate = PhotonCoordinate::Null;
        s
    }

    fn block(&self, offset: usize) -> Vector3<Complex64> {
        Vector3::new(self.c[offset], self.c[offset + 1], self.c[offset + 2])
    }

    pub fn e(&self) -> Vector3<Complex64> {
        self.block(E)
    }

    pub fn b(&self) -> Vector3<Complex64> {
        self.block(B)
    }

    pub fn a(&self) -> Vector3<Complex64> {
        self.block(A)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = *self;
        for c in out.c.iter_mut().take(DYNAMIC) {
            *c *= s;
        }
        out
    }

    /// Add the field blocks of two spinors; pads stay standard.
    pub fn add_fields(&self, other: &Self) -> Self {
        let mut out = *self;
        for i in 0..DYNAMIC {
            out.c[i] += other.c[i];
        }
        out
    }

    /// The vector-potential annihilator: moves `A` into the `pad_A` slot.
    pub fn annihilate(&self) -> Self {
        let mut out = Self::zero(self.coordinate);
        if self.coordinate == PhotonCoordinate::Null {
            return out;
        }
        for i in 0..3 {
            out.c[PAD_A + i] = self.c[A + i];
        }
        out
    }

    /// The adjoint: moves `pad_A` into the `A` slot.
    pub fn create(&self) -> Self {
        let mut out = Self::zero(self.coordinate);
        for i in 0..3 {
            out.c[A + i] = self.c[PAD_A + i];
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|z| z.norm_sqr() == 0.0)
    }
}

/// Matrix of the neutral product: a single unit entry on `pad_phi`.
pub fn neutral_operator() -> SMatrix<f64, COMPONENTS, COMPONENTS> {
    let mut m = SMatrix::zeros();
    m[(PAD_PHI, PAD_PHI)] = 1.0;
    m
}

/// Matrix of the vector-potential annihilator.
pub fn annihilation_operator() -> SMatrix<f64, COMPONENTS, COMPONENTS> {
    let mut m = SMatrix::zeros();
    for i in 0..3 {
        m[(PAD_A + i, A + i)] = 1.0;
    }
    m
}

/// `bra.pad_phi^* ket.pad_phi`
pub fn neutral_dot(bra: &KemmerSpinor, ket: &KemmerSpinor) -> Complex64 {
    bra.c[PAD_PHI].conj() * ket.c[PAD_PHI]
}

/// `bra.E^* . ket.E + bra.B^* . ket.B`, with no `E.B` cross terms.
pub fn energy_dot(bra: &KemmerSpinor, ket: &KemmerSpinor) -> Complex64 {
    (0..6).map(|i| bra.c[E + i].conj() * ket.c[E + i]).sum()
}

/// `bra.E^* x ket.B`
pub fn cross_dot(bra: &KemmerSpinor, ket: &KemmerSpinor) -> Vector3<Complex64> {
    bra.e().map(|z| z.conj()).cross(&ket.b())
}

/// Componentwise sandwich over the `A` and `pad_A` blocks.
pub fn vector_sandwich(bra: &KemmerSpinor, ket: &KemmerSpinor) -> Vector3<Complex64> {
    Vector3::from_fn(|i, _| {
        bra.c[A + i].conj() * ket.c[A + i] + bra.c[PAD_A + i].conj() * ket.c[PAD_A + i]
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldPart {
    Free,
    Attached,
    Total,
}

/// Quadrature of `E^2 + B^2` over a free (radiation) field.
///
/// A free field falls as 1/r and its energy is spread over the causal
/// shell. An attached field passed by mistake puts almost all of the
/// quadrature into the few nodes nearest the source; that concentration
/// is reported as a divergence.
pub fn free_norm(state: &KemmerState, part: FieldPart) -> Result<f64> {
    if part != FieldPart::Free {
        return invalid(format!("free_norm needs the free part, got {part:?}"));
    }
    let dens: Vec<f64> =
        (0..state.nodes.len()).map(|i| state.e(i).norm_squared() + state.b(i).norm_squared()).collect();
    if dens.iter().any(|d| !d.is_finite()) {
        return Err(Error::Divergent("non-finite energy density".into()));
    }
    let total: f64 = dens.iter().sum();
    if total == 0.0 {
        return Ok(0.0);
    }
    let (peak, _) = dens
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc });
    let center = state.grid.position(peak);
    let h = state.grid.h;
    let (mut inner, mut outer) = (0.0, 0.0);
    for (i, d) in dens.iter().enumerate() {
        let r = (state.grid.position(i) - center).norm();
        if r <= 2.0 * h {
            inner += d;
        }
        if r <= 4.0 * h {
            outer += d;
        }
    }
    if inner > CONCENTRATION_LIMIT * outer && outer > 0.5 * total {
        return Err(Error::Divergent(format!(
            "{:.0}% of the quadrature sits within 2h of one node",
            100.0 * inner / total
        )));
    }
    Ok(total * state.grid.cell_volume())
}

const CONCENTRATION_LIMIT: f64 = 0.75;

/// Scale the field blocks so that `free_norm` is one.
pub fn normalize(state: &KemmerState) -> Result<KemmerState> {
    let norm = free_norm(state, FieldPart::Free)?;
    if norm == 0.0 {
        return invalid("cannot normalize a zero field");
    }
    let s = 1.0 / norm.sqrt();
    let mut out = state.clone();
    for n in &mut out.nodes {
        for c in n.iter_mut().take(DYNAMIC) {
            *c *= s;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensitySplit {
    pub j0_plus: f64,
    pub j0_minus: f64,
    pub naive: f64,
}

/// Positive- and negative-frequency densities versus the combined one.
pub fn density_split_check(
    phi_plus: Complex64,
    phi_minus: Complex64,
    energy: f64,
    t: f64,
) -> DensitySplit {
    let j0_plus = phi_plus.norm_sqr();
    let j0_minus = phi_minus.norm_sqr();
    let cross = phi_plus.conj() * phi_minus * Complex64::from_polar(1.0, 2.0 * energy * t);
    DensitySplit { j0_plus, j0_minus, naive: j0_plus - j0_minus + 2.0 * cross.re }
}
