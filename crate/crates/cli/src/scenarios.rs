//! One function per scenario. Each validates its parameters, runs the
//! simulation and returns the files to write.

use std::f64::consts::PI;

use anyhow::{bail, Result};
use pilotwave::fields::{dipole_fields, Vec3};
use pilotwave::io::{csv_string, fmt_float, heatmap_svg, LinePlot, Series};
use pilotwave::kemmer::{evolve, Boundary, Grid, KemmerSource, KemmerState, PointDipoleCurrent, COMPONENTS, DEFAULT_COURANT};
use pilotwave::trajectories::{
    jump_demo, run_figure_ensemble, EnsembleSummary, IntegrationOptions, JumpParams, ScenarioField, Termination,
};
use pilotwave::twolevel::{direct_fwhm, dispersion_response, fit_lorentzian, lorentzian_ks_distance, spectrum_from_wavetrains};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{Params, Scenario, ScenarioConfig};
use crate::Artifacts;

pub fn run(config: &ScenarioConfig) -> Result<Artifacts> {
    let p = |known: &[&str]| Params::new(config.scenario, &config.params, known);
    match config.scenario {
        Scenario::Figure1 => figure(&p(FIGURE_KEYS)?, PI / 4.0, "figure1"),
        Scenario::Figure2 => figure(&p(FIGURE_KEYS)?, -PI / 4.0, "figure2"),
        Scenario::PhaseSweep => phase_sweep(&p(SWEEP_KEYS)?),
        Scenario::Spectrum => spectrum(&p(&["gamma", "omega0", "trains"])?, config.seed),
        Scenario::KemmerEvolve => kemmer_evolve(&p(&["n", "h", "periods", "courant", "boundary", "ramp"])?),
        Scenario::FieldMap => field_map(&p(&["n", "extent", "time", "delta"])?),
        Scenario::JumpDemo => jump(&p(JUMP_KEYS)?, config.seed),
        Scenario::DispersionScan => dispersion_scan(&p(&["points", "nu0", "gamma", "span"])?),
    }
}

fn f(x: f64) -> String {
    fmt_float(x)
}

const FIGURE_KEYS: &[&str] =
    &["photons", "delta", "dipole_only", "axis_tilt", "b_min", "b_max", "t_max", "dt", "r_abs", "r_escape", "rtol", "dt_min"];
const SWEEP_KEYS: &[&str] = &["phases", "photons", "b_min", "b_max", "t_max", "dt", "r_abs", "r_escape", "rtol", "dt_min"];
const JUMP_KEYS: &[&str] = &["ratio_before", "ratio_after", "ramp_periods", "lead_periods", "steps_per_period"];

struct Launch {
    photons: usize,
    range: (f64, f64),
    opts: IntegrationOptions,
}

fn launch(p: &Params) -> Result<Launch> {
    let d = IntegrationOptions::default();
    let opts = IntegrationOptions {
        dt: p.f64("dt", d.dt)?,
        t_max: p.f64("t_max", d.t_max)?,
        r_abs: p.f64("r_abs", d.r_abs)?,
        r_escape: p.f64("r_escape", d.r_escape)?,
        rtol: p.f64("rtol", d.rtol)?,
        dt_min: p.f64("dt_min", d.dt_min)?,
        ..d
    };
    if !(opts.r_abs > 0.0 && opts.r_escape > opts.r_abs) {
        bail!("invalid parameter: need 0 < r_abs < r_escape (got {} and {})", opts.r_abs, opts.r_escape);
    }
    if !(opts.rtol > 0.0) {
        bail!("invalid parameter rtol = {}: must be positive", opts.rtol);
    }
    let range = (p.f64("b_min", -0.5)?, p.f64("b_max", 0.5)?);
    if !(range.1 >= range.0) {
        bail!("invalid parameter: b_max must not be below b_min");
    }
    Ok(Launch { photons: p.usize("photons", 20)?, range, opts })
}

fn flagged(e: &EnsembleSummary) -> usize {
    e.count(Termination::Singular)
}

fn trajectory_rows(e: &EnsembleSummary) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for (id, t) in e.trajectories.iter().enumerate() {
        for s in &t.samples {
            rows.push(vec![
                id.to_string(),
                f(s.t),
                f(s.r.x),
                f(s.r.y),
                f(s.r.z),
                f(s.v.x),
                f(s.v.y),
                f(s.v.z),
                t.termination.as_str().to_string(),
            ]);
        }
    }
    rows
}

fn figure(p: &Params, default_delta: f64, name: &str) -> Result<Artifacts> {
    let l = launch(p)?;
    let delta = p.f64("delta", default_delta)?;
    let mut field = ScenarioField::figure(delta).with_axis_tilt(p.f64("axis_tilt", 0.0)?);
    if p.flag("dipole_only")? {
        field = field.dipole_only();
    }
    let e = run_figure_ensemble(&field, l.photons, l.range, &l.opts)?;
    let mut art = Artifacts::default();
    art.file(
        "trajectories.csv",
        csv_string(&["id", "t", "x", "y", "z", "vx", "vy", "vz", "termination"], &trajectory_rows(&e)),
    );
    let per_photon: Vec<Vec<String>> = e
        .trajectories
        .iter()
        .enumerate()
        .map(|(id, t)| {
            vec![id.to_string(), f(e.impact[id]), t.termination.as_str().to_string(), f(t.min_approach), f(e.orbits[id])]
        })
        .collect();
    art.file("photons.csv", csv_string(&["id", "impact", "termination", "min_approach", "winding"], &per_photon));
    let plot = LinePlot {
        title: format!("{name}: photon paths, delta = {delta:.4}"),
        x_label: "x / lambda".into(),
        y_label: "z / lambda".into(),
        series: e
            .trajectories
            .iter()
            .enumerate()
            .map(|(id, t)| Series { label: format!("photon {id}"), points: t.samples.iter().map(|s| (s.r.x, s.r.z)).collect() })
            .collect(),
        markers: vec![(0.0, 0.0)],
        equal_aspect: true,
        bounds: Some((-2.2, 2.2, -1.2, 1.2)),
    };
    art.file(&format!("{name}.svg"), plot.to_svg());
    art.summary("delta", f(delta));
    art.summary("photons", l.photons);
    art.summary("absorbed_fraction", f(e.absorbed_fraction()));
    for kind in [Termination::Absorbed, Termination::Escaped, Termination::MaxTime, Termination::Singular] {
        art.summary(kind.as_str(), e.count(kind));
    }
    art.summary("max_winding", f(e.max_orbits()));
    art.summary("min_approach_ratio", f(e.min_approach_ratio()));
    art.flagged = flagged(&e);
    Ok(art)
}

fn phase_sweep(p: &Params) -> Result<Artifacts> {
    let l = launch(p)?;
    let phases = p.usize("phases", 9)?;
    if phases < 2 {
        bail!("invalid parameter phases = {phases}: need at least 2");
    }
    let mut rows = Vec::new();
    let mut points = Vec::new();
    let mut art = Artifacts::default();
    for i in 0..phases {
        let delta = -PI / 2.0 + PI * i as f64 / (phases - 1) as f64;
        let e = run_figure_ensemble(&ScenarioField::figure(delta), l.photons, l.range, &l.opts)?;
        art.flagged += flagged(&e);
        points.push((delta, e.absorbed_fraction()));
        rows.push(vec![
            f(delta),
            f(e.absorbed_fraction()),
            e.count(Termination::Escaped).to_string(),
            e.count(Termination::MaxTime).to_string(),
            e.count(Termination::Singular).to_string(),
            f(e.max_orbits()),
        ]);
    }
    art.file("sweep.csv", csv_string(&["delta", "absorbed_fraction", "escaped", "max_time", "singular", "max_winding"], &rows));
    let plot = LinePlot {
        title: "absorbed fraction against dipole phase".into(),
        x_label: "delta (rad)".into(),
        y_label: "absorbed fraction".into(),
        series: vec![Series { label: "absorbed".into(), points: points.clone() }],
        markers: points.clone(),
        bounds: Some((-PI / 2.0 - 0.1, PI / 2.0 + 0.1, -0.05, 1.05)),
        ..Default::default()
    };
    art.file("sweep.svg", plot.to_svg());
    let monotone = points.windows(2).all(|w| w[1].1 >= w[0].1);
    art.summary("phases", phases);
    art.summary("photons", l.photons);
    art.summary("monotone", monotone);
    Ok(art)
}

fn spectrum(p: &Params, seed: u64) -> Result<Artifacts> {
    let omega0 = p.f64("omega0", 1.0)?;
    // Width in units of omega0.
    let gamma = p.f64("gamma", 0.05)? * omega0;
    let trains = p.usize("trains", 10_000)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = spectrum_from_wavetrains(gamma, omega0, trains, &mut rng)?;
    let fit = fit_lorentzian(&s)?;
    let ks = lorentzian_ks_distance(&s, omega0, gamma);
    let mut art = Artifacts::default();
    let rows: Vec<Vec<String>> = s.omega.iter().zip(&s.power).map(|(w, p)| vec![f(*w), f(*p)]).collect();
    art.file("spectrum.csv", csv_string(&["omega", "power"], &rows));
    art.file(
        "fit.csv",
        csv_string(
            &["gamma", "omega0", "trains", "fwhm", "center", "direct_fwhm", "ks"],
            &[vec![f(gamma), f(omega0), trains.to_string(), f(fit.fwhm), f(fit.center), f(direct_fwhm(&s)), f(ks)]],
        ),
    );
    let peak = s.power.iter().cloned().fold(0.0, f64::max);
    let lorentz = |w: f64| fit.peak / (1.0 + (2.0 * (w - fit.center) / fit.fwhm).powi(2));
    let plot = LinePlot {
        title: format!("wavetrain spectrum, {trains} trains"),
        x_label: "omega".into(),
        y_label: "power / peak".into(),
        series: vec![
            Series { label: "ensemble".into(), points: s.omega.iter().zip(&s.power).map(|(w, p)| (*w, p / peak)).collect() },
            Series { label: "Lorentzian fit".into(), points: s.omega.iter().map(|&w| (w, lorentz(w) / peak)).collect() },
        ],
        ..Default::default()
    };
    art.file("spectrum.svg", plot.to_svg());
    art.summary("gamma", f(gamma));
    art.summary("fwhm", f(fit.fwhm));
    art.summary("fwhm_over_gamma", f(fit.fwhm / gamma));
    art.summary("ks", f(ks));
    Ok(art)
}

fn kemmer_evolve(p: &Params) -> Result<Artifacts> {
    let n = p.usize("n", 25)?;
    let h = p.f64("h", 0.125)?;
    let periods = p.f64("periods", 1.5)?;
    let courant = p.f64("courant", DEFAULT_COURANT)?;
    let boundary = match p.choice("boundary", &["absorbing", "periodic"])? {
        "absorbing" => Boundary::Absorbing,
        _ => Boundary::Periodic,
    };
    if !(periods > 0.0) {
        bail!("invalid parameter periods = {periods}: must be positive");
    }
    let half = (n as f64 - 1.0) / 2.0 * h;
    let grid = Grid::new(n, n, n, h, Vec3::new(-half, -half, -half))?;
    let dipole = PointDipoleCurrent {
        origin: Vec3::zeros(),
        axis: Vec3::z(),
        p0: 1.0,
        omega: 2.0 * PI,
        phase: 0.0,
        ramp: p.f64("ramp", 0.5)?,
    };
    let source = KemmerSource::point_dipole(dipole)?;
    let dt = courant * h;
    let steps = (periods / dt).round().max(1.0) as usize;
    let s = evolve(&KemmerState::zeros(grid), &source, boundary, dt, steps)?;
    let mut art = Artifacts::default();
    let mut header = vec!["node".to_string()];
    header.extend((0..COMPONENTS).map(|c| format!("c{c}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = s
        .nodes
        .iter()
        .enumerate()
        .map(|(i, node)| std::iter::once(i.to_string()).chain(node.iter().map(|x| f(*x))).collect())
        .collect();
    art.file("snapshot.csv", csv_string(&header, &rows));
    // Equatorial slice of E_z.
    let mid = n / 2;
    let slice: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|i| s.e(grid.index(i, j, mid)).z).collect()).collect();
    art.file("slice_ez.svg", heatmap_svg(&format!("E_z in the z = 0 plane, t = {:.3}", s.time), &slice));
    let energy: f64 = (0..grid.len()).map(|i| s.e(i).norm_squared() + s.b(i).norm_squared()).sum::<f64>() * grid.cell_volume() / (8.0 * PI);
    art.summary("steps", steps);
    art.summary("time", f(s.time));
    art.summary("field_energy", f(energy));
    art.summary("pads_standard", s.pads_are_standard());
    if !s.pads_are_standard() {
        art.flagged += 1;
    }
    Ok(art)
}

fn field_map(p: &Params) -> Result<Artifacts> {
    let n = p.usize("n", 80)?;
    let extent = p.f64("extent", 2.0)?;
    let t = p.f64("time", 0.0)?;
    let delta = p.f64("delta", PI / 4.0)?;
    if n < 2 || !(extent > 0.0) {
        bail!("invalid parameter: need n >= 2 and extent > 0 (got {n} and {extent})");
    }
    let dipole = ScenarioField::figure(delta).dipole.expect("figure layout has a dipole");
    let coord = |i: usize| -extent + 2.0 * extent * i as f64 / (n - 1) as f64;
    let mut rows = Vec::new();
    let mut map = vec![vec![0.0; n]; n];
    let mut skipped = 0usize;
    for (j, row) in map.iter_mut().enumerate() {
        for (i, cell) in row.iter_mut().enumerate() {
            let r = Vec3::new(coord(i), 0.0, coord(j));
            let Ok(s) = dipole_fields(&dipole, &r, t) else {
                skipped += 1;
                continue;
            };
            let mut row = vec![f(r.x), f(r.y), f(r.z), f(t)];
            for v in [s.e_att, s.e_free, s.b_att, s.b_free] {
                row.extend([f(v.x), f(v.y), f(v.z)]);
            }
            rows.push(row);
            let att = s.e_att.norm_squared() + s.b_att.norm_squared();
            let free = s.e_free.norm_squared() + s.b_free.norm_squared();
            *cell = if att > 0.0 && free > 0.0 { (free / att).log10() } else { 0.0 };
        }
    }
    let header = [
        "x", "y", "z", "t", "Eatt_x", "Eatt_y", "Eatt_z", "Efree_x", "Efree_y", "Efree_z", "Batt_x", "Batt_y", "Batt_z",
        "Bfree_x", "Bfree_y", "Bfree_z",
    ];
    let mut art = Artifacts::default();
    art.file("field_map.csv", csv_string(&header, &rows));
    art.file("free_vs_attached.svg", heatmap_svg("log10(free / attached energy), red = free dominant", &map));
    art.summary("points", rows.len());
    art.summary("skipped_on_source", skipped);
    Ok(art)
}

fn jump(p: &Params, seed: u64) -> Result<Artifacts> {
    let d = JumpParams::default();
    let params = JumpParams {
        ratio_before: p.f64("ratio_before", d.ratio_before)?,
        ratio_after: p.f64("ratio_after", d.ratio_after)?,
        ramp_periods: p.f64("ramp_periods", d.ramp_periods)?,
        lead_periods: p.f64("lead_periods", d.lead_periods)?,
        steps_per_period: p.usize("steps_per_period", d.steps_per_period)?,
        ..d
    };
    let demo = jump_demo(seed, &params)?;
    let tr = &demo.trajectory;
    let rows: Vec<Vec<String>> =
        tr.t.iter().zip(&tr.r).map(|(t, r)| vec![f(*t), f(r.x), f(r.y), f(r.z)]).collect();
    let mut art = Artifacts::default();
    art.file("electron.csv", csv_string(&["t", "x", "y", "z"], &rows));
    let plot = LinePlot {
        title: "electron z through the jump".into(),
        x_label: "t / period".into(),
        y_label: "z (Bohr radii)".into(),
        series: vec![Series { label: "z".into(), points: tr.t.iter().zip(&tr.r).map(|(t, r)| (t / demo.period, r.z)).collect() }],
        markers: vec![(demo.t_jump / demo.period, tr.r[0].z)],
        ..Default::default()
    };
    art.file("jump.svg", plot.to_svg());
    art.summary("t_jump", f(demo.t_jump));
    art.summary("period", f(demo.period));
    art.summary("pre_amplitude", f(demo.pre_amplitude));
    art.summary("post_amplitude", f(demo.post_amplitude));
    art.summary("ratio", f(demo.ratio()));
    if tr.flagged {
        art.flagged += 1;
    }
    Ok(art)
}

fn dispersion_scan(p: &Params) -> Result<Artifacts> {
    let points = p.usize("points", 101)?;
    let nu0 = p.f64("nu0", 2.0 * PI)?;
    let gamma = p.f64("gamma", 0.01)?;
    let span = p.f64("span", 0.5)?;
    if points < 2 || !(span > 0.0 && span < 1.0) {
        bail!("invalid parameter: need points >= 2 and 0 < span < 1 (got {points} and {span})");
    }
    let lambda0 = 2.0 * PI / nu0;
    let mut rows = Vec::new();
    let mut phase = Vec::new();
    for i in 0..points {
        let nu = nu0 * (1.0 - span + 2.0 * span * i as f64 / (points - 1) as f64);
        let r = dispersion_response(1.0, nu, nu0, gamma)?;
        phase.push((nu / nu0, r.phase));
        rows.push(vec![
            f(nu),
            f(r.x.re),
            f(r.x.im),
            f(r.phase),
            f(r.displacement_phase),
            f(r.cross_section),
            f(r.cross_section / (lambda0 * lambda0)),
        ]);
    }
    let res = dispersion_response(1.0, nu0, nu0, gamma)?;
    let mut art = Artifacts::default();
    art.file(
        "dispersion.csv",
        csv_string(&["nu", "x_re", "x_im", "phase", "displacement_phase", "cross_section", "sigma_over_lambda0_sq"], &rows),
    );
    let plot = LinePlot {
        title: "dipole velocity phase relative to the drive".into(),
        x_label: "nu / nu0".into(),
        y_label: "phase (rad)".into(),
        series: vec![Series { label: "phase".into(), points: phase }],
        ..Default::default()
    };
    art.file("dispersion.svg", plot.to_svg());
    art.summary("resonant_sigma_over_lambda_sq", f(res.cross_section / (lambda0 * lambda0)));
    Ok(art)
}
