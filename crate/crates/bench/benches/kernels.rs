use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use pilotwave::fields::{dipole_fields, lienard_wiechert, ChargeKinematics, DipoleSource, Vec3};
use pilotwave::guidance::photon_velocity;
use pilotwave::kemmer::{evolve, Boundary, Grid, KemmerSource, KemmerState, DEFAULT_COURANT};
use pilotwave::trajectories::{integrate_photon, ScenarioField};

fn fields(c: &mut Criterion) {
    let src = ChargeKinematics::harmonic(1.0, Vec3::zeros(), Vec3::z(), 0.05, 2.0 * PI, 0.0).unwrap();
    let dip = DipoleSource::harmonic(1.0, 2.0 * PI, 0.0, Vec3::z(), Vec3::zeros()).unwrap();
    let r = Vec3::new(1.3, -0.4, 2.2);
    c.bench_function("lienard_wiechert", |b| b.iter(|| lienard_wiechert(&src, black_box(&r), 0.7)));
    c.bench_function("dipole_fields", |b| b.iter(|| dipole_fields(&dip, black_box(&r), 0.7)));
    c.bench_function("photon_velocity", |b| {
        b.iter(|| photon_velocity(black_box(&Vec3::new(0.1, 0.2, 1.0)), black_box(&Vec3::new(0.0, -0.9, 0.3))))
    });
}

fn kemmer(c: &mut Criterion) {
    let n = 32;
    let grid = Grid::new(n, n, n, 1.0 / n as f64, Vec3::zeros()).unwrap();
    let state = KemmerState::from_fn(grid, 0.0, |r| {
        let ph = 2.0 * PI * r.x;
        (Vec3::new(0.0, 0.0, ph.cos()), Vec3::new(0.0, -ph.cos(), 0.0), Vec3::zeros(), 0.0)
    });
    let dt = DEFAULT_COURANT * grid.h;
    c.bench_function("kemmer_step_32cubed", |b| {
        b.iter(|| evolve(black_box(&state), &KemmerSource::none(), Boundary::Periodic, dt, 1))
    });
}

fn trajectories(c: &mut Criterion) {
    let field = ScenarioField::figure(PI / 4.0);
    let mut g = c.benchmark_group("trajectories");
    g.sample_size(10);
    g.bench_function("photon_to_absorption", |b| {
        b.iter(|| integrate_photon(&field, black_box(Vec3::new(-2.0, 0.0, 0.3)), 0.0, 1.0 / 400.0, 10.0))
    });
    g.finish();
}

criterion_group!(benches, fields, kemmer, trajectories);
criterion_main!(benches);
