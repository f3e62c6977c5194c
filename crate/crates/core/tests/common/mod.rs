//! Reference computations shared by the integration tests. None of these
//! call into the library's numerical kernels.

#![allow(dead_code)]

use std::collections::HashMap;
use std::f64::consts::PI;

use itertools::Itertools;
use pilotwave::fields::{ChargeKinematics, Vec3};

/// Light-cone root by bisection: `t - t' = |r - x(t')|`.
pub fn retarded_by_bisection(src: &ChargeKinematics, r: &Vec3, t: f64) -> f64 {
    let g = |s: f64| t - s - (r - src.position(s)).norm();
    let (mut lo, mut hi) = (t - 1.0, t);
    while g(lo) <= 0.0 {
        lo = t - 2.0 * (t - lo);
    }
    while hi - lo > 0.0 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Griffiths' unsplit point-charge field.
pub fn griffiths_field(src: &ChargeKinematics, r: &Vec3, t: f64) -> (Vec3, Vec3) {
    let tr = retarded_by_bisection(src, r, t);
    let (x, v, a) = src.state(tr);
    let sep = r - x;
    let d = sep.norm();
    let u = sep / d - v;
    let e = (u * (1.0 - v.dot(&v)) + sep.cross(&u.cross(&a))) * (src.charge * d / sep.dot(&u).powi(3));
    (e, sep.cross(&e) / d)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| (a.ln() + (b.ln() - a.ln()) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Plain leapfrog Maxwell integrator (E and A on integer steps, B and
/// phi on half steps) with 4th-order periodic differences.
pub struct Leapfrog {
    pub dims: [usize; 3],
    pub h: f64,
    pub e: Vec<Vec3>,
    pub b: Vec<Vec3>,
    pub a: Vec<Vec3>,
    pub phi: Vec<f64>,
}

impl Leapfrog {
    fn at(&self, p: [isize; 3]) -> usize {
        let w = |i: usize| p[i].rem_euclid(self.dims[i] as isize) as usize;
        (w(0) * self.dims[1] + w(1)) * self.dims[2] + w(2)
    }

    fn point(&self, idx: usize) -> [isize; 3] {
        let k = idx % self.dims[2];
        let j = (idx / self.dims[2]) % self.dims[1];
        let i = idx / (self.dims[1] * self.dims[2]);
        [i as isize, j as isize, k as isize]
    }

    fn grad<F: Fn(usize) -> f64>(&self, idx: usize, f: F) -> Vec3 {
        let p = self.point(idx);
        let mut g = Vec3::zeros();
        for ax in 0..3 {
            if self.dims[ax] == 1 {
                continue;
            }
            let s = |o: isize| {
                let mut q = p;
                q[ax] += o;
                f(self.at(q))
            };
            g[ax] = (8.0 * (s(1) - s(-1)) - (s(2) - s(-2))) / (12.0 * self.h);
        }
        g
    }

    fn curl(&self, field: &[Vec3], idx: usize) -> Vec3 {
        let gx = self.grad(idx, |i| field[i].x);
        let gy = self.grad(idx, |i| field[i].y);
        let gz = self.grad(idx, |i| field[i].z);
        Vec3::new(gz.y - gy.z, gx.z - gz.x, gy.x - gx.y)
    }

    fn div(&self, field: &[Vec3], idx: usize) -> f64 {
        self.grad(idx, |i| field[i].x).x + self.grad(idx, |i| field[i].y).y + self.grad(idx, |i| field[i].z).z
    }

    fn half_kick(&mut self, dt: f64) {
        let n = self.e.len();
        let db: Vec<Vec3> = (0..n).map(|i| -self.curl(&self.e, i) * dt).collect();
        let dphi: Vec<f64> = (0..n).map(|i| -self.div(&self.a, i) * dt).collect();
        for i in 0..n {
            self.b[i] += db[i];
            self.phi[i] += dphi[i];
        }
    }

    pub fn run(&mut self, total: f64, steps: usize) {
        let dt = total / steps as f64;
        let n = self.e.len();
        self.half_kick(0.5 * dt);
        for s in 0..steps {
            if s > 0 {
                self.half_kick(dt);
            }
            let e_new: Vec<Vec3> = (0..n).map(|i| self.e[i] + self.curl(&self.b, i) * dt).collect();
            let grad_phi: Vec<Vec3> = (0..n).map(|i| self.grad(i, |j| self.phi[j])).collect();
            for i in 0..n {
                self.a[i] -= ((self.e[i] + e_new[i]) * 0.5 + grad_phi[i]) * dt;
            }
            self.e = e_new;
        }
        self.half_kick(0.5 * dt);
    }
}

/// Period-averaged radiated power of `p0 cos(omega t) z` through a sphere
/// of radius `radius`, midpoint rule in theta, using the textbook
/// radiation field `E = p'' sin(theta) / r theta_hat`.
pub fn sphere_power_midpoint(p0: f64, omega: f64, radius: f64, n_theta: usize) -> f64 {
    let mut total = 0.0;
    let dth = PI / n_theta as f64;
    for i in 0..n_theta {
        let th = (i as f64 + 0.5) * dth;
        // <p''^2> = p0^2 omega^4 / 2 over one period.
        let e2 = 0.5 * (p0 * omega * omega * th.sin() / radius).powi(2);
        total += e2 * 2.0 * PI * radius * radius * th.sin() * dth;
    }
    total
}

/// Norm of the permutation sum of a product of orthonormal labels.
pub fn permutation_sum_norm(occupancies: &[usize]) -> f64 {
    let labels: Vec<usize> = occupancies.iter().enumerate().flat_map(|(s, &n)| vec![s; n]).collect();
    let n = labels.len();
    let mut coeff: HashMap<Vec<usize>, f64> = HashMap::new();
    for p in (0..n).permutations(n) {
        let key: Vec<usize> = p.iter().map(|&i| labels[i]).collect();
        *coeff.entry(key).or_default() += 1.0;
    }
    coeff.values().map(|c| c * c).sum::<f64>().sqrt()
}

/// All occupancy patterns of `n` particles over at most `n` states.
pub fn occupancy_patterns(n: usize) -> Vec<Vec<usize>> {
    (1..=n)
        .flat_map(|k| {
            (0..k).map(|_| 1..=n).multi_cartesian_product().filter(move |v| v.iter().sum::<usize>() == n)
        })
        .collect()
}

/// Truncated Lorentzian CDF on `[lo, hi]`.
pub fn lorentzian_cdf(w: f64, center: f64, fwhm: f64, lo: f64, hi: f64) -> f64 {
    let g = 0.5 * fwhm;
    let f = |x: f64| ((x - center) / g).atan();
    (f(w) - f(lo)) / (f(hi) - f(lo))
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
