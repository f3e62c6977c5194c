//! Self-contained invariant checks. Each check compares library output
//! with a separate reference computation written here and reports one
//! line: name, status, metric.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;

use nalgebra::Vector4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::fields::{covariant_tensors, fields_from_tensor, lienard_wiechert, ChargeKinematics, FieldSample, Vec3};
use crate::guidance::{electron_velocity, hydrogen_potential, orbital_quantum_potential, photon_velocity, Electron, Orbital, TwoLevelWave};
use crate::kemmer::{evolve, Boundary, Grid, KemmerSource, KemmerState};
use crate::twolevel::symmetrized_norm;
use crate::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub metric: f64,
    pub threshold: f64,
}

impl CheckResult {
    fn below(name: &str, metric: f64, threshold: f64) -> Self {
        Self { name: name.to_string(), passed: metric < threshold, metric, threshold }
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{} {} {:.6e} {:.1e}", self.name, status, self.metric, self.threshold)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# name status metric threshold")?;
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Field evaluator under test; swapped out by mutation tests.
pub type FieldFn = fn(&ChargeKinematics, &Vec3, f64) -> Result<FieldSample>;

fn random_unit<R: Rng>(rng: &mut R) -> Vec3 {
    loop {
        let v = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

/// A random subluminal oscillating or drifting charge.
pub fn random_source<R: Rng>(rng: &mut R) -> ChargeKinematics {
    let q = rng.random_range(-2.0..2.0);
    let center = random_unit(rng) * rng.random_range(0.0..0.5);
    if rng.random_bool(0.25) {
        let v = random_unit(rng) * rng.random_range(0.0..0.9);
        return ChargeKinematics::uniform(q, center, v).expect("speed below 0.9");
    }
    let omega = rng.random_range(0.5..4.0 * PI);
    let amp = rng.random_range(0.0..0.9) / omega;
    ChargeKinematics::harmonic(q, center, random_unit(rng), amp, omega, rng.random_range(0.0..2.0 * PI))
        .expect("speed below 0.9")
}

/// A field point at least 0.6 from the charge.
pub fn random_point<R: Rng>(rng: &mut R, source: &ChargeKinematics) -> (Vec3, f64) {
    let t = rng.random_range(-5.0..5.0);
    loop {
        let r = Vec3::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        if (r - source.position(t)).norm() > 0.6 {
            return (r, t);
        }
    }
}

/// Retarded time by plain bisection on `t - t' - |r - x(t')|`.
pub fn bisect_retarded(source: &ChargeKinematics, r: &Vec3, t: f64) -> f64 {
    let f = |tr: f64| t - tr - (r - source.position(tr)).norm();
    let mut hi = t;
    let mut step = 1.0;
    let mut lo = t - step;
    while f(lo) <= 0.0 {
        step *= 2.0;
        lo = t - step;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Unsplit field `q R/(R.u)^3 [(1 - v^2) u + R x (u x a)]`, `u = R_hat - v`.
pub fn reference_lw(source: &ChargeKinematics, r: &Vec3, t: f64) -> (Vec3, Vec3) {
    let tr = bisect_retarded(source, r, t);
    let (x, v, a) = source.state(tr);
    let sep = r - x;
    let dist = sep.norm();
    let u = sep / dist - v;
    let e = (u * (1.0 - v.norm_squared()) + sep.cross(&u.cross(&a))) * (source.charge * dist / sep.dot(&u).powi(3));
    (e, (sep / dist).cross(&e))
}

fn rel_err(a: (Vec3, Vec3), b: (Vec3, Vec3)) -> f64 {
    let scale = b.0.norm() + b.1.norm();
    ((a.0 - b.0).norm() + (a.1 - b.1).norm()) / scale.max(f64::MIN_POSITIVE)
}

pub fn field_split(cases: usize, seed: u64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let src = random_source(&mut rng);
        let (r, t) = random_point(&mut rng, &src);
        let err = match lienard_wiechert(&src, &r, t) {
            Ok(s) => rel_err((s.e(), s.b()), reference_lw(&src, &r, t)),
            Err(_) => f64::INFINITY,
        };
        worst = worst.max(err);
    }
    CheckResult::below("field_split", worst, 1e-10)
}

pub fn covariant_oracle(field: FieldFn, cases: usize, seed: u64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let src = random_source(&mut rng);
        let (r, t) = random_point(&mut rng, &src);
        let x = Vector4::new(t, r.x, r.y, r.z);
        let err = match (covariant_tensors(&src, &x), field(&src, &r, t)) {
            (Ok((ff, fa)), Ok(s)) => rel_err(fields_from_tensor(&(ff + fa)), (s.e(), s.b())),
            _ => f64::INFINITY,
        };
        worst = worst.max(err);
    }
    CheckResult::below("covariant_oracle", worst, 1e-9)
}

type Fd4 = [f64; 4];

/// Maxwell residuals of the total field of an oscillating charge from
/// 4th-order differences; returns the worst relative residual.
fn maxwell_residual_at(src: &ChargeKinematics, r: &Vec3, t: f64, h: f64, k: f64) -> f64 {
    let field = |p: &Vec3, s: f64| {
        let f = lienard_wiechert(src, p, s).expect("off-source point");
        (f.e(), f.b())
    };
    let w: Fd4 = [1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0];
    let offs = [-2.0, -1.0, 1.0, 2.0];
    // d[axis] = (dE/dx_axis, dB/dx_axis), axis 3 is time.
    let mut d = [(Vec3::zeros(), Vec3::zeros()); 4];
    for axis in 0..4 {
        for (wi, o) in w.iter().zip(offs) {
            let (mut p, mut s) = (*r, t);
            if axis < 3 {
                p[axis] += o * h;
            } else {
                s += o * h;
            }
            let (e, b) = field(&p, s);
            d[axis].0 += e * (wi / h);
            d[axis].1 += b * (wi / h);
        }
    }
    let div = |j: usize| -> f64 { (0..3).map(|i| if j == 0 { d[i].0[i] } else { d[i].1[i] }).sum() };
    let curl = |j: usize| {
        let g = |i: usize, c: usize| if j == 0 { d[i].0[c] } else { d[i].1[c] };
        Vec3::new(g(1, 2) - g(2, 1), g(2, 0) - g(0, 2), g(0, 1) - g(1, 0))
    };
    let (e, b) = field(r, t);
    let scale = k * (e.norm() + b.norm());
    let res = [
        div(0).abs(),
        div(1).abs(),
        (curl(0) + d[3].1).norm(),
        (curl(1) - d[3].0).norm(),
    ];
    res.iter().fold(0.0f64, |m, x| m.max(*x)) / scale
}

pub fn maxwell_residuals(seed: u64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = 2.0 * PI;
    let src = ChargeKinematics::harmonic(1.0, Vec3::zeros(), Vec3::z(), 0.02, k, 0.0).expect("slow source");
    let (mut worst, mut worst_order) = (0.0f64, f64::INFINITY);
    for _ in 0..20 {
        let r = random_unit(&mut rng) * rng.random_range(5.0..8.0);
        let t = rng.random_range(0.0..1.0);
        let coarse = maxwell_residual_at(&src, &r, t, 0.004, k);
        let fine = maxwell_residual_at(&src, &r, t, 0.002, k);
        worst = worst.max(fine);
        worst_order = worst_order.min((coarse / fine).log2());
    }
    // Both small and shrinking at close to 4th order.
    let mut c = CheckResult::below("maxwell_residuals", worst, 1e-6);
    c.passed &= worst_order > 3.5;
    c
}

pub fn speed_bound(samples: usize, seed: u64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let scale = 10f64.powf(rng.random_range(-6.0..6.0));
        let e = random_unit(&mut rng) * rng.random_range(0.0..1.0) * scale;
        let b = random_unit(&mut rng) * rng.random_range(0.0..1.0) * scale;
        if let Ok(v) = photon_velocity(&e, &b) {
            worst = worst.max(v.norm());
        }
    }
    let plane = photon_velocity(&Vec3::z(), &-Vec3::y()).map(|v| (v - Vec3::x()).norm()).unwrap_or(f64::INFINITY);
    let mut c = CheckResult { name: "speed_bound".into(), passed: worst <= 1.0, metric: worst, threshold: 1.0 };
    c.passed &= plane <= 2.0 * f64::EPSILON;
    c
}

pub fn hydrogen_q_plus_v() -> CheckResult {
    let mut worst: f64 = 0.0;
    for i in 1..=400 {
        let r = Vec3::new(0.3, -0.2, 1.0).normalize() * (0.02 * i as f64);
        let q = orbital_quantum_potential(Orbital::H1s, 1.0, &r).unwrap_or(f64::INFINITY);
        worst = worst.max((q + hydrogen_potential(&r) + 0.5).abs());
    }
    let wave = TwoLevelWave::hydrogen(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), 1.7);
    let v = electron_velocity(&wave, &Electron { mass: 1.0, charge: -1.0 }, &Vec3::zeros(), &Vec3::new(0.4, 0.2, -0.7))
        .map(|v| v.norm())
        .unwrap_or(f64::INFINITY);
    let mut c = CheckResult::below("hydrogen_q_plus_v", worst, 1e-8);
    c.passed &= v == 0.0;
    c
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    // Heap's algorithm.
    let mut a = items.to_vec();
    let n = a.len();
    let mut c = vec![0; n];
    let mut out = vec![a.clone()];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Norm of `sum_P prod psi_{label}` for orthonormal single states.
pub fn brute_force_norm(occupancies: &[usize]) -> f64 {
    let labels: Vec<usize> = occupancies.iter().enumerate().flat_map(|(s, &n)| std::iter::repeat_n(s, n)).collect();
    let mut terms: HashMap<Vec<usize>, f64> = HashMap::new();
    for p in permutations(&labels) {
        *terms.entry(p).or_default() += 1.0;
    }
    terms.values().map(|c| c * c).sum::<f64>().sqrt()
}

/// Every occupancy pattern of `n` particles (zero entries dropped).
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=n.min(max)).rev() {
            cur.push(k);
            rec(n - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

pub fn symmetrization() -> CheckResult {
    let mut worst: f64 = 0.0;
    for n in 1..=6 {
        for occ in partitions(n) {
            let err = match symmetrized_norm(&occ) {
                Ok(f) => (f * brute_force_norm(&occ) - 1.0).abs(),
                Err(_) => f64::INFINITY,
            };
            worst = worst.max(err);
        }
    }
    CheckResult::below("symmetrization", worst, 1e-12)
}

/// Staggered leapfrog for `E' = curl B, B' = -curl E, A' = -E - grad phi,
/// phi' = -div A` on a periodic grid with 4th-order differences.
pub struct Leapfrog {
    pub n: [usize; 3],
    pub h: f64,
    /// `[E, B, A, phi]` per node, 10 components.
    pub f: Vec<[f64; 10]>,
}

impl Leapfrog {
    fn idx(&self, i: [usize; 3]) -> usize {
        (i[0] * self.n[1] + i[1]) * self.n[2] + i[2]
    }

    fn deriv(&self, f: &[[f64; 10]], at: [usize; 3], axis: usize, c: usize) -> f64 {
        let n = self.n[axis];
        if n == 1 {
            return 0.0;
        }
        let get = |o: isize| {
            let mut p = at;
            p[axis] = (at[axis] as isize + o).rem_euclid(n as isize) as usize;
            f[self.idx(p)][c]
        };
        (get(-2) - 8.0 * get(-1) + 8.0 * get(1) - get(2)) / (12.0 * self.h)
    }

    fn each(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        let n = self.n;
        (0..n[0]).flat_map(move |i| (0..n[1]).flat_map(move |j| (0..n[2]).map(move |k| [i, j, k])))
    }

    fn curl(&self, f: &[[f64; 10]], at: [usize; 3], o: usize) -> [f64; 3] {
        let d = |a: usize, c: usize| self.deriv(f, at, a, o + c);
        [d(1, 2) - d(2, 1), d(2, 0) - d(0, 2), d(0, 1) - d(1, 0)]
    }

    /// Advance by `total` time using `substeps` leapfrog steps.
    pub fn run(&mut self, total: f64, substeps: usize) {
        let dt = total / substeps as f64;
        let nodes: Vec<[usize; 3]> = self.each().collect();
        // Stagger B and phi back by half a step.
        let snap = self.f.clone();
        for &p in &nodes {
            let i = self.idx(p);
            let ce = self.curl(&snap, p, 0);
            let div_a: f64 = (0..3).map(|a| self.deriv(&snap, p, a, 6 + a)).sum();
            for c in 0..3 {
                self.f[i][3 + c] += 0.5 * dt * ce[c];
            }
            self.f[i][9] += 0.5 * dt * div_a;
        }
        for _ in 0..substeps {
            // B and phi to n + 1/2.
            let snap = self.f.clone();
            for &p in &nodes {
                let i = self.idx(p);
                let ce = self.curl(&snap, p, 0);
                let div_a: f64 = (0..3).map(|a| self.deriv(&snap, p, a, 6 + a)).sum();
                for c in 0..3 {
                    self.f[i][3 + c] -= dt * ce[c];
                }
                self.f[i][9] -= dt * div_a;
            }
            // E and A to n + 1.
            let snap = self.f.clone();
            for &p in &nodes {
                let i = self.idx(p);
                let cb = self.curl(&snap, p, 3);
                for c in 0..3 {
                    let e_old = snap[i][c];
                    let e_new = e_old + dt * cb[c];
                    self.f[i][c] = e_new;
                    self.f[i][6 + c] -= dt * (0.5 * (e_old + e_new) + self.deriv(&snap, p, c, 9));
                }
            }
        }
        // Bring B and phi forward to the integer time level.
        let snap = self.f.clone();
        for &p in &nodes {
            let i = self.idx(p);
            let ce = self.curl(&snap, p, 0);
            let div_a: f64 = (0..3).map(|a| self.deriv(&snap, p, a, 6 + a)).sum();
            for c in 0..3 {
                self.f[i][3 + c] -= 0.5 * dt * ce[c];
            }
            self.f[i][9] -= 0.5 * dt * div_a;
        }
    }
}

/// Two crossing plane waves plus a longitudinal gauge mode on a unit
/// periodic square.
pub fn leapfrog_test_state(n: usize) -> Result<KemmerState> {
    let grid = Grid::new(n, n, 1, 1.0 / n as f64, Vec3::zeros())?;
    let k = 2.0 * PI;
    Ok(KemmerState::from_fn(grid, 0.0, |r| {
        let (cx, sx) = ((k * r.x).cos(), (k * r.x).sin());
        let (cy, sy) = ((k * r.y).cos(), (k * r.y).sin());
        let e = Vec3::new(0.5 * cy, 0.0, cx);
        let b = Vec3::new(0.0, -cx, -0.5 * cy);
        let a = Vec3::new(0.5 * sy / k + 0.2 * sx, 0.0, sx / k);
        (e, b, a, 0.1 * cy)
    }))
}

pub fn kemmer_vs_leapfrog() -> CheckResult {
    let n = 32;
    let state = match leapfrog_test_state(n) {
        Ok(s) => s,
        Err(_) => return CheckResult::below("kemmer_vs_leapfrog", f64::INFINITY, 1e-6),
    };
    let dt = 0.25 * state.grid.h;
    let steps = 100;
    let ours = match evolve(&state, &KemmerSource::none(), Boundary::Periodic, dt, steps) {
        Ok(s) => s,
        Err(_) => return CheckResult::below("kemmer_vs_leapfrog", f64::INFINITY, 1e-6),
    };
    let mut reference = Leapfrog {
        n: [n, n, 1],
        h: state.grid.h,
        f: state.nodes.iter().map(|x| x[..10].try_into().expect("ten field components")).collect(),
    };
    reference.run(dt * steps as f64, 64 * steps);
    let sum: f64 = ours
        .nodes
        .iter()
        .zip(&reference.f)
        .map(|(a, b)| (0..10).map(|c| (a[c] - b[c]).powi(2)).sum::<f64>())
        .sum();
    CheckResult::below("kemmer_vs_leapfrog", (sum / ours.nodes.len() as f64).sqrt(), 1e-6)
}

pub fn run_all(seed: u64) -> Report {
    Report {
        checks: vec![
            field_split(10_000, seed),
            covariant_oracle(lienard_wiechert, 1_000, seed.wrapping_add(1)),
            maxwell_residuals(seed.wrapping_add(2)),
            speed_bound(1_000_000, seed.wrapping_add(3)),
            hydrogen_q_plus_v(),
            symmetrization(),
            kemmer_vs_leapfrog(),
        ],
    }
}
