//! Two-level atom: amplitudes with self-field coupling, classical
//! dispersion, emission statistics, line shapes and N-photon bookkeeping.
//!
//! Natural units `hbar = c = 1`; charges in Gaussian form, so the
//! `1 / (6 pi eps0)` of the SI self-field becomes `2/3`.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::fields::{dipole_fields, energy_and_flux, DipoleSource, Vec3};

type C3 = Vector3<Complex64>;

fn cdot(a: &C3, b: &C3) -> Complex64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Classical radiative damping rate `(2/3) e^2 omega0^2 / m`.
pub fn classical_gamma(charge: f64, mass: f64, omega0: f64) -> f64 {
    2.0 / 3.0 * charge * charge * omega0 * omega0 / mass
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelState {
    pub a_e: Complex64,
    pub a_g: Complex64,
    pub omega0: f64,
    pub p_eg: C3,
    pub gamma: f64,
}

impl TwoLevelState {
    pub fn new(
        a_e: Complex64,
        a_g: Complex64,
        omega0: f64,
        p_eg: C3,
        charge: f64,
        mass: f64,
    ) -> Result<Self> {
        if !(omega0 > 0.0) || !(mass > 0.0) {
            return invalid("omega0 and mass must be positive");
        }
        Ok(Self { a_e, a_g, omega0, p_eg, gamma: classical_gamma(charge, mass, omega0) })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a_e.norm_sqr() + self.a_g.norm_sqr()
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfFieldParams {
    pub charge: f64,
    pub mass: f64,
}

/// `i + (2/pi) ln(m / omega0)`; the real part is the in-phase (shift)
/// component, the imaginary part the quadrature (damping) component.
pub fn self_field_bracket(omega0: f64, mass: f64) -> Result<Complex64> {
    if !(omega0 > 0.0) {
        return invalid("omega0 must be positive");
    }
    if !(mass > omega0) {
        return invalid("rest energy must exceed the transition energy");
    }
    Ok(Complex64::new(2.0 / PI * (mass / omega0).ln(), 1.0))
}

/// Self-field vector potential at the charge for velocity phasor `v`.
pub fn self_field_amplitude(v: &C3, omega0: f64, params: &SelfFieldParams) -> Result<C3> {
    let bracket = self_field_bracket(omega0, params.mass)?;
    let s = bracket * (2.0 / 3.0 * params.charge * omega0);
    Ok(v.map(|x| x * s))
}

/// `(da_e/dt, da_g/dt) = (a_g A.p_eg, a_e A.p_eg^*)`.
pub fn amplitude_rhs(state: &TwoLevelState, a: &C3) -> (Complex64, Complex64) {
    let p_ge = state.p_eg.map(|z| z.conj());
    (state.a_g * cdot(a, &state.p_eg), state.a_e * cdot(a, &p_ge))
}

/// The part of `A` whose coupling conserves `|a_e|^2 + |a_g|^2`.
///
/// The rate of the norm is `2 Re(a_e^* a_g) 2 Re(A).p^*`-like terms, so
/// the real part of `A` must be orthogonal to both `Re p` and `Im p`.
pub fn in_quadrature(a: &C3, p_eg: &C3) -> C3 {
    let mut re = a.map(|z| z.re);
    let mut basis: Vec<Vec3> = Vec::new();
    for v in [p_eg.map(|z| z.re), p_eg.map(|z| z.im)] {
        let mut u = v;
        for b in &basis {
            u -= b * b.dot(&u);
        }
        if u.norm() > 1e-14 * (1.0 + v.norm()) {
            basis.push(u.normalize());
        }
    }
    for b in &basis {
        re -= b * b.dot(&re);
    }
    C3::from_fn(|i, _| Complex64::new(re[i], a[i].im))
}

/// Eigenvalue and normalised eigenvector `(a_e, a_g)` of the coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedState {
    pub rate: Complex64,
    pub a_e: Complex64,
    pub a_g: Complex64,
}

/// Diagonalise `[[0, A.p], [A.p^*, 0]]`.
pub fn dressed_states(state: &TwoLevelState, a: &C3) -> Result<[DressedState; 2]> {
    let c = cdot(a, &state.p_eg);
    let c2 = cdot(a, &state.p_eg.map(|z| z.conj()));
    if c.norm() == 0.0 || c2.norm() == 0.0 {
        return invalid("coupling vanishes; the bare states are already stationary");
    }
    let lam = (c * c2).sqrt();
    let make = |l: Complex64| {
        // (0 - l) a_e + c a_g = 0  =>  (a_e, a_g) ~ (c, l)
        let n = (c.norm_sqr() + l.norm_sqr()).sqrt();
        DressedState { rate: l, a_e: c / n, a_g: l / n }
    };
    Ok([make(lam), make(-lam)])
}

/// RK4 integration of the amplitudes under a constant coupling `A`.
pub fn evolve_amplitudes(state: &TwoLevelState, a: &C3, dt: f64, steps: usize) -> TwoLevelState {
    let mut s = *state;
    let f = |ae: Complex64, ag: Complex64| amplitude_rhs(&TwoLevelState { a_e: ae, a_g: ag, ..*state }, a);
    for _ in 0..steps {
        let (k1e, k1g) = f(s.a_e, s.a_g);
        let (k2e, k2g) = f(s.a_e + k1e * (dt / 2.0), s.a_g + k1g * (dt / 2.0));
        let (k3e, k3g) = f(s.a_e + k2e * (dt / 2.0), s.a_g + k2g * (dt / 2.0));
        let (k4e, k4g) = f(s.a_e + k3e * dt, s.a_g + k3g * dt);
        s.a_e += (k1e + k2e * 2.0 + k3e * 2.0 + k4e) * (dt / 6.0);
        s.a_g += (k1g + k2g * 2.0 + k3g * 2.0 + k4g) * (dt / 6.0);
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionResponse {
    /// Complex displacement amplitude.
    pub x: Complex64,
    /// Phase of the dipole velocity relative to the drive, `arg x - pi/2`:
    /// negative below resonance, zero at resonance, positive above.
    pub phase: f64,
    /// `arg x`, the displacement lag, in `(0, pi)`.
    pub displacement_phase: f64,
    /// Scattered power over incident intensity.
    pub cross_section: f64,
}

/// Classical driven-oscillator response with unit charge; the mass is
/// fixed by `gamma` through the radiative damping formula.
pub fn dispersion_response(e0: f64, nu: f64, nu0: f64, gamma: f64) -> Result<DispersionResponse> {
    if !(nu > 0.0 && nu0 > 0.0 && gamma > 0.0) {
        return invalid("nu, nu0 and gamma must be positive");
    }
    if !(e0 > 0.0) {
        return invalid("incident amplitude must be positive");
    }
    let mass = 2.0 * nu0 * nu0 / (3.0 * gamma);
    let den = Complex64::new(nu0 * nu0 - nu * nu, -nu * gamma);
    let x = Complex64::new(e0 / mass, 0.0) / den;
    let displacement_phase = x.arg();
    let cross_section = scattered_power(x.norm(), nu, 1.0, 48, 16) / (0.5 * e0 * e0);
    Ok(DispersionResponse { x, phase: displacement_phase - PI / 2.0, displacement_phase, cross_section })
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                // p1 ends as P_n(x) and p0 as P_{n-1}(x).
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Period-averaged power through a sphere around an oscillating dipole
/// of amplitude `p0` and angular frequency `omega`.
pub fn scattered_power(p0: f64, omega: f64, radius: f64, n_theta: usize, n_time: usize) -> f64 {
    let src = DipoleSource { p0, omega, phase: 0.0, axis: Vec3::z(), origin: Vec3::zeros() };
    let period = 2.0 * PI / omega;
    let mut total = 0.0;
    for (u, w) in gauss_legendre(n_theta) {
        let s = (1.0 - u * u).sqrt();
        let n = Vec3::new(s, 0.0, u);
        let r = n * radius;
        let mut flux = 0.0;
        for j in 0..n_time {
            let t = period * j as f64 / n_time as f64;
            let f = dipole_fields(&src, &r, t).expect("sphere radius is positive");
            flux += energy_and_flux(&f.e(), &f.b()).1.dot(&n);
        }
        total += w * flux / n_time as f64;
    }
    2.0 * PI * radius * radius * total
}

/// Exponentially distributed waiting time with rate `gamma`.
pub fn sample_emission_time<R: Rng + ?Sized>(gamma: f64, rng: &mut R) -> Result<f64> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(crate::Error::InvalidParameter(format!("gamma = {gamma} must be positive")));
    }
    let exp = Exp::new(gamma).map_err(|_| crate::Error::InvalidParameter(format!("gamma = {gamma}")))?;
    Ok(exp.sample(rng))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub omega: Vec<f64>,
    pub power: Vec<f64>,
}

/// `|FT|^2` of a unit sinusoid of frequency `omega0` lasting `duration`.
pub fn wavetrain_power(omega: f64, omega0: f64, duration: f64) -> f64 {
    let d = omega - omega0;
    let x = 0.5 * d * duration;
    if x.abs() < 1e-8 {
        duration * duration
    } else {
        (x.sin() / (0.5 * d)).powi(2)
    }
}

/// Incoherent sum of the train spectra on `points` frequencies spanning
/// `omega0 +- half_width`.
pub fn spectrum_from_durations(durations: &[f64], omega0: f64, half_width: f64, points: usize) -> Spectrum {
    let omega: Vec<f64> = (0..points)
        .map(|i| omega0 - half_width + 2.0 * half_width * i as f64 / (points - 1) as f64)
        .collect();
    let power = omega
        .par_iter()
        .map(|&w| durations.iter().map(|&tau| wavetrain_power(w, omega0, tau)).sum::<f64>())
        .collect();
    Spectrum { omega, power }
}

/// Ensemble spectrum of `n_trains` box-shaped trains.
///
/// A box train of duration `tau` drawn from `Exp(rate)` gives, on
/// average, a Lorentzian of full width `2 rate`. The rate is therefore
/// `gamma / 2` so the line has full width `gamma`, the width of an
/// amplitude decaying as `exp(-gamma t / 2)`.
pub fn spectrum_from_wavetrains<R: Rng + ?Sized>(
    gamma: f64,
    omega0: f64,
    n_trains: usize,
    rng: &mut R,
) -> Result<Spectrum> {
    if n_trains == 0 {
        return invalid("need at least one wave train");
    }
    if !(omega0 > 0.0) {
        return invalid("omega0 must be positive");
    }
    let durations: Vec<f64> =
        (0..n_trains).map(|_| sample_emission_time(0.5 * gamma, rng)).collect::<Result<_>>()?;
    Ok(spectrum_from_durations(&durations, omega0, 10.0 * gamma, 4001))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzianFit {
    pub center: f64,
    pub fwhm: f64,
    pub peak: f64,
}

/// Weighted least squares of `1/S` against a quadratic in `omega` over
/// the points above a fifth of the maximum.
pub fn fit_lorentzian(s: &Spectrum) -> Result<LorentzianFit> {
    let max = s.power.iter().cloned().fold(f64::MIN, f64::max);
    if !(max > 0.0) {
        return invalid("spectrum has no positive power");
    }
    let mut m = Matrix3::<f64>::zeros();
    let mut rhs = nalgebra::Vector3::<f64>::zeros();
    let shift = s.omega[s.power.iter().position(|&p| p == max).unwrap()];
    for (&w, &p) in s.omega.iter().zip(&s.power) {
        if p < 0.2 * max {
            continue;
        }
        let x = w - shift;
        let basis = nalgebra::Vector3::new(1.0, x, x * x);
        let weight = p * p;
        m += basis * basis.transpose() * weight;
        rhs += basis * (weight / p);
    }
    let coef = m.lu().solve(&rhs).ok_or_else(|| crate::Error::InvalidParameter("degenerate fit".into()))?;
    let (a, b, k) = (coef[0], coef[1], coef[2]);
    if !(k > 0.0) {
        return invalid("spectrum is not peaked");
    }
    let center = -b / (2.0 * k);
    let floor = a - b * b / (4.0 * k);
    if !(floor > 0.0) {
        return invalid("fitted line has no finite peak");
    }
    Ok(LorentzianFit { center: shift + center, fwhm: 2.0 * (floor / k).sqrt(), peak: 1.0 / floor })
}

/// Full width at half maximum read directly off the sampled curve.
pub fn direct_fwhm(s: &Spectrum) -> f64 {
    let (imax, &max) =
        s.power.iter().enumerate().fold((0, &f64::MIN), |acc, x| if x.1 > acc.1 { x } else { acc });
    let half = 0.5 * max;
    let cross = |range: Box<dyn Iterator<Item = usize>>, step: isize| {
        for i in range {
            let j = (i as isize + step) as usize;
            if s.power[j] < half {
                let f = (s.power[i] - half) / (s.power[i] - s.power[j]);
                return s.omega[i] + f * (s.omega[j] - s.omega[i]);
            }
        }
        f64::NAN
    };
    let hi = cross(Box::new(imax..s.omega.len() - 1), 1);
    let lo = cross(Box::new((1..=imax).rev()), -1);
    hi - lo
}

/// Kolmogorov-Smirnov distance between the normalised spectrum and a
/// Lorentzian truncated to the same window.
pub fn lorentzian_ks_distance(s: &Spectrum, center: f64, fwhm: f64) -> f64 {
    let g = 0.5 * fwhm;
    let (lo, hi) = (s.omega[0], s.omega[s.omega.len() - 1]);
    let cdf = |w: f64| ((w - center) / g).atan() - ((lo - center) / g).atan();
    let norm = cdf(hi);
    let mut acc = vec![0.0; s.omega.len()];
    for i in 1..s.omega.len() {
        acc[i] = acc[i - 1] + 0.5 * (s.power[i] + s.power[i - 1]) * (s.omega[i] - s.omega[i - 1]);
    }
    let total = acc[acc.len() - 1];
    s.omega
        .iter()
        .zip(&acc)
        .map(|(&w, &a)| (a / total - cdf(w) / norm).abs())
        .fold(0.0, f64::max)
}

/// `1 / sqrt(N! prod n_i!)` for occupation numbers `n_i`.
pub fn symmetrized_norm(occupancies: &[usize]) -> Result<f64> {
    let n: usize = occupancies.iter().sum();
    if n == 0 {
        return invalid("need at least one particle");
    }
    let ln_fact = |k: usize| (2..=k).map(|i| (i as f64).ln()).sum::<f64>();
    let ln = ln_fact(n) + occupancies.iter().map(|&k| ln_fact(k)).sum::<f64>();
    Ok((-0.5 * ln).exp())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RemovalAverage {
    pub weights: Vec<f64>,
    /// Norm of the unnormalised uniform average.
    pub raw_norm: f64,
    /// The normalised average.
    pub state: Vec<Complex64>,
    /// Share of the absorption carried by each removed photon.
    pub fractions: Vec<f64>,
}

impl RemovalAverage {
    /// Total absorption probability implied by the probability that one
    /// given photon is absorbed.
    pub fn total_from_single(&self, single: f64, photon: usize) -> f64 {
        single / self.fractions[photon]
    }
}

/// Uniform average over the `n` states with one photon removed.
pub fn photon_removal_average(n: usize, components: &[Vec<Complex64>]) -> Result<RemovalAverage> {
    if n == 0 {
        return invalid("need at least one photon");
    }
    if components.len() != n {
        return invalid(format!("expected {n} components, got {}", components.len()));
    }
    let dim = components[0].len();
    if components.iter().any(|c| c.len() != dim) {
        return invalid("components must share one dimension");
    }
    let inner = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>();
    let weights = vec![1.0 / n as f64; n];
    let mut gram_sum = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            gram_sum += inner(&components[i], &components[j]) * (weights[i] * weights[j]);
        }
    }
    let raw_norm = gram_sum.re.sqrt();
    if !(raw_norm > 0.0) {
        return invalid("average vanishes");
    }
    let state: Vec<Complex64> = (0..dim)
        .map(|k| components.iter().zip(&weights).map(|(c, w)| c[k] * *w).sum::<Complex64>() / raw_norm)
        .collect();
    let probs: Vec<f64> = components.iter().map(|c| inner(c, &state).norm_sqr()).collect();
    let total: f64 = probs.iter().sum();
    Ok(RemovalAverage { weights, raw_norm, state, fractions: probs.iter().map(|p| p / total).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn atom() -> TwoLevelState {
        TwoLevelState::new(
            c(0.6, 0.0),
            c(0.0, 0.8),
            0.375,
            C3::new(c(0.0, 0.0), c(0.0, 0.0), c(0.745, 0.0)),
            1.0,
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn gamma_is_larmor() {
        assert!((atom().gamma - 2.0 / 3.0 * 0.375f64.powi(2)).abs() < 1e-15);
    }

    #[test]
    fn self_field_examples() {
        let p = SelfFieldParams { charge: 1.0, mass: 1e5 };
        assert_eq!(self_field_amplitude(&C3::zeros(), 1.0, &p).unwrap(), C3::zeros());
        let b = self_field_bracket(1.0, 1e5).unwrap();
        assert!((b.re / b.im - 7.33).abs() < 0.01);
        let v = C3::new(c(0.1, 0.0), c(0.0, 0.2), c(0.0, 0.0));
        let a1 = self_field_amplitude(&v, 1.0, &p).unwrap();
        let a2 = self_field_amplitude(&(v * c(2.0, 0.0)), 1.0, &p).unwrap();
        assert!((a2.norm() - 2.0 * a1.norm()).abs() < 1e-15);
        assert!(self_field_amplitude(&v, 0.0, &p).is_err());
    }

    #[test]
    fn rhs_examples() {
        let mut s = atom();
        s.a_g = c(0.0, 0.0);
        let a = C3::new(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.3));
        assert_eq!(amplitude_rhs(&s, &a).0, c(0.0, 0.0));
        let perp = C3::new(c(0.4, 0.1), c(0.0, 0.3), c(0.0, 0.0));
        assert_eq!(amplitude_rhs(&atom(), &perp), (c(0.0, 0.0), c(0.0, 0.0)));
    }

    #[test]
    fn quadrature_coupling_conserves_norm() {
        let s = atom();
        let a = in_quadrature(&C3::new(c(0.3, 0.2), c(0.0, 0.0), c(1.1, 0.4)), &s.p_eg);
        let out = evolve_amplitudes(&s, &a, s.period() / 2000.0, 20000);
        assert!((out.norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn dressed_state_is_steady() {
        let s = atom();
        let v = s.p_eg.map(|z| z * c(0.0, -s.omega0));
        let a_self = self_field_amplitude(&v, s.omega0, &SelfFieldParams { charge: 1.0, mass: 1e5 }).unwrap();
        let a = in_quadrature(&a_self, &s.p_eg);
        let d = dressed_states(&s, &a).unwrap();
        let start = TwoLevelState { a_e: d[0].a_e, a_g: d[0].a_g, ..s };
        let pe0 = start.a_e.norm_sqr();
        let steps = 400;
        let dt = s.period() / steps as f64;
        let mut cur = start;
        for _ in 0..steps {
            cur = evolve_amplitudes(&cur, &a, dt, 1);
            assert!((cur.a_e.norm_sqr() - pe0).abs() < 1e-8);
        }
    }

    #[test]
    fn dispersion_phase_convention() {
        let (nu0, g) = (1.0, 0.01);
        assert!(dispersion_response(1.0, 0.5, nu0, g).unwrap().phase < 0.0);
        assert!(dispersion_response(1.0, 1.5, nu0, g).unwrap().phase > 0.0);
        let r = dispersion_response(1.0, 1.0, nu0, g).unwrap();
        assert!(r.phase.abs() < 1e-12);
        assert!((r.displacement_phase - PI / 2.0).abs() < 1e-12);
        let m = 2.0 * nu0 * nu0 / (3.0 * g);
        assert!((r.x.norm() - 1.0 / (m * nu0 * g)).abs() < 1e-12 * r.x.norm());
        let low = dispersion_response(1.0, 1e-6, nu0, g).unwrap();
        assert!((low.x.re - 1.0 / (m * nu0 * nu0)).abs() < 1e-9 / m);
        assert!(low.displacement_phase > 0.0 && low.displacement_phase < 1e-7);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let q = gauss_legendre(8);
        let s: f64 = q.iter().map(|(x, w)| w * x.powi(6)).sum();
        assert!((s - 2.0 / 7.0).abs() < 1e-14);
    }

    #[test]
    fn emission_time_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| sample_emission_time(1.0, &mut rng).unwrap()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.02);
        assert!(xs.iter().all(|&x| x >= 0.0));
        let mean2 = (0..n).map(|_| sample_emission_time(2.0, &mut rng).unwrap()).sum::<f64>() / n as f64;
        assert!((mean2 - 0.5).abs() < 0.01);
        assert!(sample_emission_time(0.0, &mut rng).is_err());
    }

    #[test]
    fn long_train_is_monochromatic() {
        let w0 = 1.0;
        let tau = 1e6 * 2.0 * PI / w0;
        let s = spectrum_from_durations(&[tau], w0, 2e-5, 4001);
        assert!(direct_fwhm(&s) < 1e-5 * w0);
    }

    #[test]
    fn symmetrized_norm_examples() {
        assert_eq!(symmetrized_norm(&[1]).unwrap(), 1.0);
        assert!((symmetrized_norm(&[3]).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!((symmetrized_norm(&[1, 1]).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(symmetrized_norm(&[0, 0]).is_err());
    }

    #[test]
    fn removal_average_examples() {
        let e = |i: usize| (0..3).map(|k| c(if k == i { 1.0 } else { 0.0 }, 0.0)).collect::<Vec<_>>();
        let one = photon_removal_average(1, &[e(0)]).unwrap();
        assert_eq!(one.state, e(0));
        let same = photon_removal_average(2, &[e(1), e(1)]).unwrap();
        assert_eq!(same.weights, vec![0.5, 0.5]);
        assert!((same.total_from_single(0.1, 0) - 0.2).abs() < 1e-15);
        assert!(photon_removal_average(0, &[]).is_err());
    }
}
