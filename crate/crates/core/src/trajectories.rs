//! Photon trajectories around a driven dipole and Bohmian electron paths.
//!
//! Photon scenarios use wavelength units: `lambda = 1`, `omega = k = 2 pi`,
//! one optical period is one time unit.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{invalid, Error, Result};
use crate::fields::{dipole_fields, DipoleSource, Vec3};
use crate::guidance::{electron_velocity, photon_velocity, Electron, TwoLevelWave};
use crate::twolevel::sample_emission_time;

/// Phase offset between the figure angle and the dipole lag: a dipole
/// with figure angle `delta` lags the incident field at the origin by
/// `delta + pi/4`, so `delta = pi/4` is the resonant quarter-period lag.
pub const FIGURE_PHASE_OFFSET: f64 = PI / 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidentWave {
    pub e0: f64,
    pub k_hat: Vec3,
    pub polarization: Vec3,
    pub omega: f64,
}

impl IncidentWave {
    pub fn new(e0: f64, k_hat: Vec3, polarization: Vec3, omega: f64) -> Result<Self> {
        if (k_hat.norm() - 1.0).abs() > 1e-12 || (polarization.norm() - 1.0).abs() > 1e-12 {
            return invalid("wave vector direction and polarization must be unit vectors");
        }
        if k_hat.dot(&polarization).abs() > 1e-12 {
            return invalid("polarization must be transverse to the wave vector");
        }
        if !(omega > 0.0) {
            return invalid("frequency must be positive");
        }
        Ok(Self { e0, k_hat, polarization, omega })
    }

    pub fn fields(&self, r: &Vec3, t: f64) -> (Vec3, Vec3) {
        let e = self.polarization * (self.e0 * (self.omega * (self.k_hat.dot(r) - t)).cos());
        (e, self.k_hat.cross(&e))
    }
}

/// Incident plane wave plus the fields of a dipole at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioField {
    pub incident: Option<IncidentWave>,
    pub dipole: Option<DipoleSource>,
}

impl ScenarioField {
    pub fn new(incident: Option<IncidentWave>, dipole: Option<DipoleSource>) -> Result<Self> {
        if let (Some(i), Some(d)) = (&incident, &dipole) {
            if (i.omega - d.omega).abs() > 1e-12 * i.omega {
                return invalid("dipole must oscillate at the incident frequency");
            }
        }
        Ok(Self { incident, dipole })
    }

    /// The figure layout: wave along +x polarised along z, dipole along z
    /// at the origin with the resonant amplitude `1.5 E0 / k^3`.
    pub fn figure(delta: f64) -> Self {
        let k = 2.0 * PI;
        let incident = IncidentWave { e0: 1.0, k_hat: Vec3::x(), polarization: Vec3::z(), omega: k };
        let dipole = DipoleSource {
            p0: 1.5 / k.powi(3),
            omega: k,
            phase: delta + FIGURE_PHASE_OFFSET,
            axis: Vec3::z(),
            origin: Vec3::zeros(),
        };
        Self { incident: Some(incident), dipole: Some(dipole) }
    }

    pub fn with_dipole_scale(mut self, scale: f64) -> Self {
        if let Some(d) = &mut self.dipole {
            d.p0 *= scale;
        }
        self
    }

    /// Tilt the dipole axis by `angle` from the polarization toward the
    /// propagation direction.
    pub fn with_axis_tilt(mut self, angle: f64) -> Self {
        if let (Some(d), Some(i)) = (&mut self.dipole, &self.incident) {
            d.axis = i.polarization * angle.cos() + i.k_hat * angle.sin();
        }
        self
    }

    pub fn dipole_only(mut self) -> Self {
        self.incident = None;
        self
    }

    pub fn fields(&self, r: &Vec3, t: f64) -> Result<(Vec3, Vec3)> {
        let (mut e, mut b) = (Vec3::zeros(), Vec3::zeros());
        if let Some(i) = &self.incident {
            let (ei, bi) = i.fields(r, t);
            e += ei;
            b += bi;
        }
        if let Some(d) = &self.dipole {
            let s = dipole_fields(d, r, t)?;
            e += s.e();
            b += s.b();
        }
        Ok((e, b))
    }

    pub fn velocity(&self, r: &Vec3, t: f64) -> Result<Vec3> {
        let (e, b) = self.fields(r, t)?;
        photon_velocity(&e, &b)
    }

    pub fn omega(&self) -> f64 {
        self.incident.map(|i| i.omega).or(self.dipole.map(|d| d.omega)).unwrap_or(2.0 * PI)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Absorbed,
    Escaped,
    MaxTime,
    Singular,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Absorbed => "absorbed",
            Termination::Escaped => "escaped",
            Termination::MaxTime => "max_time",
            Termination::Singular => "singular",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub r: Vec3,
    pub v: Vec3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhotonTrajectory {
    pub samples: Vec<TrajectorySample>,
    pub termination: Termination,
    pub min_approach: f64,
}

impl PhotonTrajectory {
    /// Signed number of turns about the origin in the plane with `normal`.
    pub fn winding(&self, normal: &Vec3) -> f64 {
        let n = normal.normalize();
        let seed = if n.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
        let e1 = (seed - n * n.dot(&seed)).normalize();
        let e2 = n.cross(&e1);
        let angle = |r: &Vec3| r.dot(&e2).atan2(r.dot(&e1));
        let mut total = 0.0;
        for w in self.samples.windows(2) {
            let d = angle(&w[1].r) - angle(&w[0].r);
            total += (d + PI).rem_euclid(2.0 * PI) - PI;
        }
        total / (2.0 * PI)
    }

    /// Largest `|dr| / (c dt)` over consecutive samples.
    pub fn max_segment_speed(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| (w[1].r - w[0].r).norm() / (w[1].t - w[0].t))
            .fold(0.0, f64::max)
    }

    pub fn last(&self) -> &TrajectorySample {
        self.samples.last().expect("trajectory has at least the launch sample")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions {
    /// Initial and largest step.
    pub dt: f64,
    pub t_max: f64,
    pub r_abs: f64,
    pub r_escape: f64,
    pub rtol: f64,
    pub dt_min: f64,
    /// Integrate backwards in time when set.
    pub backward: bool,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            dt: 1.0 / 400.0,
            t_max: 10.0,
            r_abs: 0.02,
            r_escape: 5.0,
            rtol: 1e-8,
            dt_min: 1e-12,
            backward: false,
        }
    }
}

fn rk4_step(field: &ScenarioField, r: &Vec3, t: f64, h: f64) -> Result<Vec3> {
    let k1 = field.velocity(r, t)?;
    let k2 = field.velocity(&(r + k1 * (h / 2.0)), t + h / 2.0)?;
    let k3 = field.velocity(&(r + k2 * (h / 2.0)), t + h / 2.0)?;
    let k4 = field.velocity(&(r + k3 * h), t + h)?;
    Ok(r + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
}

/// Integrate `dr/dt = v_photon` with adaptive RK4 (step doubling).
pub fn integrate_photon(
    field: &ScenarioField,
    r0: Vec3,
    t0: f64,
    dt: f64,
    t_max: f64,
) -> Result<PhotonTrajectory> {
    integrate_photon_with(field, r0, t0, &IntegrationOptions { dt, t_max, ..Default::default() })
}

pub fn integrate_photon_with(
    field: &ScenarioField,
    r0: Vec3,
    t0: f64,
    opts: &IntegrationOptions,
) -> Result<PhotonTrajectory> {
    let period = 2.0 * PI / field.omega();
    if !(opts.dt > 0.0) || opts.dt > period / 200.0 * (1.0 + 1e-12) {
        return invalid(format!("dt = {} must lie in (0, T/200]", opts.dt));
    }
    if !(opts.t_max > 0.0) {
        return invalid("t_max must be positive");
    }
    if r0.norm() < opts.r_abs {
        return invalid("launch point lies inside the absorption radius");
    }
    let sign = if opts.backward { -1.0 } else { 1.0 };
    let mut r = r0;
    let mut t = t0;
    let mut elapsed = 0.0;
    let v0 = field.velocity(&r, t)?;
    let mut samples = vec![TrajectorySample { t, r, v: v0 }];
    let mut min_approach = r.norm();
    let mut h = opts.dt;
    let termination = loop {
        let remaining = opts.t_max - elapsed;
        if remaining <= 1e-12 * opts.t_max {
            break Termination::MaxTime;
        }
        h = h.min(opts.dt).min(remaining);
        let attempt = (|| {
            let s = sign * h;
            let full = rk4_step(field, &r, t, s)?;
            let mid = rk4_step(field, &r, t, s / 2.0)?;
            let fine = rk4_step(field, &mid, t + s / 2.0, s / 2.0)?;
            Ok::<_, Error>((fine, (fine - full).norm() / 15.0))
        })();
        let tol = opts.rtol * r.norm().max(1.0);
        match attempt {
            Ok((next, err)) if err <= tol => {
                let v = match field.velocity(&next, t + sign * h) {
                    Ok(v) => v,
                    Err(_) => {
                        h *= 0.5;
                        if h < opts.dt_min {
                            break Termination::Singular;
                        }
                        continue;
                    }
                };
                t += sign * h;
                elapsed += h;
                r = next;
                samples.push(TrajectorySample { t, r, v });
                let dist = r.norm();
                min_approach = min_approach.min(dist);
                if dist < opts.r_abs {
                    break Termination::Absorbed;
                }
                if dist > opts.r_escape && r.dot(&v) * sign > 0.0 {
                    break Termination::Escaped;
                }
                let grow = if err > 0.0 { 0.9 * (tol / err).powf(0.2) } else { 2.0 };
                h *= grow.clamp(1.0, 2.0);
            }
            Ok((_, err)) => {
                h *= (0.9 * (tol / err).powf(0.2)).clamp(0.1, 0.9);
                if h < opts.dt_min {
                    break Termination::Singular;
                }
            }
            Err(_) => {
                h *= 0.5;
                if h < opts.dt_min {
                    break Termination::Singular;
                }
            }
        }
    };
    Ok(PhotonTrajectory { samples, termination, min_approach })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSummary {
    pub impact: Vec<f64>,
    pub trajectories: Vec<PhotonTrajectory>,
    /// Turns about the origin in the scattering plane.
    pub orbits: Vec<f64>,
}

impl EnsembleSummary {
    pub fn count(&self, kind: Termination) -> usize {
        self.trajectories.iter().filter(|t| t.termination == kind).count()
    }

    pub fn absorbed_fraction(&self) -> f64 {
        self.count(Termination::Absorbed) as f64 / self.trajectories.len() as f64
    }

    pub fn max_orbits(&self) -> f64 {
        self.orbits.iter().map(|o| o.abs()).fold(0.0, f64::max)
    }

    /// Smallest `min_approach / |b|` over photons with nonzero impact.
    pub fn min_approach_ratio(&self) -> f64 {
        self.impact
            .iter()
            .zip(&self.trajectories)
            .filter(|(b, _)| b.abs() > 1e-12)
            .map(|(b, t)| t.min_approach / b.abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Launch `n` photons on a uniform line `x = -2` (upstream along the
/// wave vector) with offsets along the polarization in `b_range`.
pub fn run_figure_ensemble(
    field: &ScenarioField,
    n: usize,
    b_range: (f64, f64),
    opts: &IntegrationOptions,
) -> Result<EnsembleSummary> {
    if n == 0 {
        return invalid("need at least one photon");
    }
    let (k_hat, pol) = match &field.incident {
        Some(i) => (i.k_hat, i.polarization),
        None => (Vec3::x(), Vec3::z()),
    };
    let impact: Vec<f64> = (0..n)
        .map(|i| if n == 1 { 0.5 * (b_range.0 + b_range.1) } else {
            b_range.0 + (b_range.1 - b_range.0) * i as f64 / (n - 1) as f64
        })
        .collect();
    let trajectories = impact
        .par_iter()
        .map(|&b| integrate_photon_with(field, k_hat * -2.0 + pol * b, 0.0, opts))
        .collect::<Result<Vec<_>>>()?;
    let normal = pol.cross(&k_hat);
    let orbits = trajectories.iter().map(|t| t.winding(&normal)).collect();
    Ok(EnsembleSummary { impact, trajectories, orbits })
}

/// Log-linear switch of `G_free / G_att` with a smoothstep of length `ramp`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpSchedule {
    pub t_jump: f64,
    pub ramp: f64,
    pub ratio_before: f64,
    pub ratio_after: f64,
}

impl JumpSchedule {
    pub fn ratio(&self, t: f64) -> f64 {
        let s = ((t - self.t_jump) / self.ramp).clamp(0.0, 1.0);
        let s = s * s * (3.0 - 2.0 * s);
        let (lo, hi) = (self.ratio_before.ln(), self.ratio_after.ln());
        (lo + (hi - lo) * s).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectronScenario {
    pub a_e: Complex64,
    pub a_g: Complex64,
    pub schedule: Option<JumpSchedule>,
}

impl ElectronScenario {
    pub fn wave(&self, t: f64) -> TwoLevelWave {
        let mut w = TwoLevelWave::hydrogen(self.a_e, self.a_g, t);
        w.ratio = self.schedule.map_or(0.0, |s| s.ratio(t));
        w
    }

    pub fn velocity(&self, r: &Vec3, t: f64) -> Result<Vec3> {
        electron_velocity(&self.wave(t), &Electron::default(), &Vec3::zeros(), r)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElectronTrajectory {
    pub t: Vec<f64>,
    pub r: Vec<Vec3>,
    /// Set when a node could not be avoided by step rejection.
    pub flagged: bool,
}

impl ElectronTrajectory {
    /// Largest distance from the window mean over `t in [a, b)`.
    pub fn amplitude(&self, a: f64, b: f64) -> f64 {
        let pts: Vec<Vec3> =
            self.t.iter().zip(&self.r).filter(|(t, _)| **t >= a && **t < b).map(|x| *x.1).collect();
        if pts.is_empty() {
            return 0.0;
        }
        let mean = pts.iter().sum::<Vec3>() / pts.len() as f64;
        pts.iter().map(|p| (p - mean).norm()).fold(0.0, f64::max)
    }
}

/// Fixed-step RK4 on the Bohmian velocity; steps landing on a node are
/// retried with halved sub-steps.
pub fn electron_trajectory(
    scenario: &ElectronScenario,
    r0: Vec3,
    dt: f64,
    t_max: f64,
) -> Result<ElectronTrajectory> {
    if !(dt > 0.0) || !(t_max > 0.0) {
        return invalid("dt and t_max must be positive");
    }
    scenario.velocity(&r0, 0.0)?;
    let steps = (t_max / dt).round() as usize;
    let mut t_list = Vec::with_capacity(steps + 1);
    let mut r_list = Vec::with_capacity(steps + 1);
    let (mut t, mut r) = (0.0, r0);
    t_list.push(t);
    r_list.push(r);
    let step = |r: &Vec3, t: f64, h: f64| -> Result<Vec3> {
        let k1 = scenario.velocity(r, t)?;
        let k2 = scenario.velocity(&(r + k1 * (h / 2.0)), t + h / 2.0)?;
        let k3 = scenario.velocity(&(r + k2 * (h / 2.0)), t + h / 2.0)?;
        let k4 = scenario.velocity(&(r + k3 * h), t + h)?;
        Ok(r + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
    };
    let mut flagged = false;
    'outer: for _ in 0..steps {
        let mut parts = 1;
        loop {
            let h = dt / parts as f64;
            let mut cur = r;
            let mut ok = true;
            for k in 0..parts {
                match step(&cur, t + k as f64 * h, h) {
                    Ok(next) => cur = next,
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                r = cur;
                break;
            }
            parts *= 2;
            if parts > 1 << 12 {
                flagged = true;
                break 'outer;
            }
        }
        t += dt;
        t_list.push(t);
        r_list.push(r);
    }
    Ok(ElectronTrajectory { t: t_list, r: r_list, flagged })
}

/// Angular frequency of the largest non-DC FFT peak and the bin width.
pub fn dominant_frequency(values: &[f64], dt: f64) -> (f64, f64) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex64> = values.iter().map(|v| Complex64::new(v - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let bin = 2.0 * PI / (n as f64 * dt);
    let k = (1..n / 2).max_by(|&a, &b| buf[a].norm().total_cmp(&buf[b].norm())).unwrap_or(0);
    (k as f64 * bin, bin)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpParams {
    pub a_e: Complex64,
    pub a_g: Complex64,
    pub r0: Vec3,
    pub ratio_before: f64,
    pub ratio_after: f64,
    /// Switch duration in optical periods.
    pub ramp_periods: f64,
    /// Periods of undisturbed motion before the earliest possible jump.
    pub lead_periods: f64,
    pub steps_per_period: usize,
}

impl Default for JumpParams {
    fn default() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            a_e: Complex64::new(h, 0.0),
            a_g: Complex64::new(h, 0.0),
            r0: Vec3::new(0.6, 0.0, 0.6),
            ratio_before: 1e-2,
            ratio_after: 1e3,
            ramp_periods: 0.25,
            lead_periods: 4.0,
            steps_per_period: 400,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JumpDemo {
    pub t_jump: f64,
    pub period: f64,
    /// Oscillation amplitude over the period before the jump.
    pub pre_amplitude: f64,
    /// Amplitude over the period that starts one period after the jump.
    pub post_amplitude: f64,
    pub trajectory: ElectronTrajectory,
}

impl JumpDemo {
    pub fn ratio(&self) -> f64 {
        self.post_amplitude / self.pre_amplitude
    }
}

/// Electron motion through the attached-to-free switch. The jump time
/// is the lead time plus an exponential waiting time of mean one period
/// drawn from `seed`.
pub fn jump_demo(seed: u64, params: &JumpParams) -> Result<JumpDemo> {
    if !(params.ratio_before > 0.0 && params.ratio_after > params.ratio_before) {
        return invalid("ratios must be positive and increasing");
    }
    if params.steps_per_period < 16 {
        return invalid("need at least 16 steps per period");
    }
    let probe = TwoLevelWave::hydrogen(params.a_e, params.a_g, 0.0);
    let period = 2.0 * PI / probe.omega0();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t_jump = params.lead_periods * period + sample_emission_time(1.0 / period, &mut rng)?;
    let schedule = JumpSchedule {
        t_jump,
        ramp: params.ramp_periods * period,
        ratio_before: params.ratio_before,
        ratio_after: params.ratio_after,
    };
    let scenario = ElectronScenario { a_e: params.a_e, a_g: params.a_g, schedule: Some(schedule) };
    let dt = period / params.steps_per_period as f64;
    let t_max = ((t_jump + 2.0 * period) / dt).ceil() * dt;
    let trajectory = electron_trajectory(&scenario, params.r0, dt, t_max)?;
    if trajectory.flagged {
        return Err(Error::Node);
    }
    Ok(JumpDemo {
        t_jump,
        period,
        pre_amplitude: trajectory.amplitude(t_jump - period, t_jump),
        post_amplitude: trajectory.amplitude(t_jump + period, t_jump + 2.0 * period),
        trajectory,
    })
}
