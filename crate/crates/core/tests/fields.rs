mod common;

use std::f64::consts::PI;

use common::{griffiths_field, loglog_slope, logspace};
use nalgebra::Vector4;
use pilotwave::fields::*;
use pilotwave::Error;
use proptest::prelude::*;

fn oscillator(amplitude: f64) -> ChargeKinematics {
    ChargeKinematics::harmonic(1.0, Vec3::zeros(), Vec3::z(), amplitude, 2.0 * PI, 0.3).unwrap()
}

#[test]
fn retarded_time_examples() {
    let rest = ChargeKinematics::at_rest(1.0, Vec3::zeros());
    assert!((retarded_time(&rest, &Vec3::new(2.0, 0.0, 0.0), 5.0).unwrap() - 3.0).abs() < 1e-12);
    let r = Vec3::new(0.3, 0.0, 0.4);
    assert!((retarded_time(&rest, &r, 1.0).unwrap() - 0.5).abs() < 1e-12);
    let moving = ChargeKinematics::uniform(1.0, Vec3::zeros(), Vec3::new(0.5, 0.0, 0.0)).unwrap();
    assert!(retarded_time(&moving, &Vec3::new(1.0, 0.0, 0.0), 1.0).unwrap().abs() < 1e-12);
}

#[test]
fn retarded_time_on_worldline_is_an_error() {
    let moving = ChargeKinematics::uniform(1.0, Vec3::zeros(), Vec3::new(0.5, 0.0, 0.0)).unwrap();
    let r = Vec3::new(1.0, 0.0, 0.0);
    assert!(matches!(retarded_time(&moving, &r, 2.0), Err(Error::Singular(_))));
    assert!(lienard_wiechert(&moving, &r, 2.0).is_err());
}

#[test]
fn coulomb_and_uniform_limits() {
    let q = 2.5;
    let rest = ChargeKinematics::at_rest(q, Vec3::zeros());
    let s = lienard_wiechert(&rest, &Vec3::new(0.0, 0.0, 1.0), 3.0).unwrap();
    assert!((s.e_att - Vec3::new(0.0, 0.0, q)).norm() < 1e-14);
    assert_eq!(s.e_free, Vec3::zeros());
    assert_eq!(s.b_att, Vec3::zeros());
    let moving = ChargeKinematics::uniform(1.0, Vec3::zeros(), Vec3::new(0.3, 0.0, 0.0)).unwrap();
    let s = lienard_wiechert(&moving, &Vec3::new(1.0, 2.0, -0.5), 0.7).unwrap();
    assert_eq!(s.e_free, Vec3::zeros());
    assert_eq!(s.b_free, Vec3::zeros());
}

#[test]
fn oscillating_charge_far_field_dominates() {
    let src = oscillator(0.05);
    let r = Vec3::new(100.0, 0.0, 0.0);
    let free = peak(|t| lienard_wiechert(&src, &r, t).unwrap().e_free.norm());
    let att = peak(|t| lienard_wiechert(&src, &r, t).unwrap().e_att.norm());
    assert!(free > 100.0 * att, "ratio {}", free / att);
}

/// Peak over one period, which removes the oscillation phase.
fn peak<F: Fn(f64) -> f64>(f: F) -> f64 {
    (0..64).map(|i| f(i as f64 / 64.0)).fold(0.0, f64::max)
}

#[test]
fn radial_scaling_exponents() {
    let src = oscillator(0.01);
    let radii = logspace(10.0, 1000.0, 9);
    let dir = Vec3::new(1.0, 0.2, 0.1).normalize();
    let free: Vec<f64> = radii
        .iter()
        .map(|&r| peak(|t| lienard_wiechert(&src, &(dir * r), t + r).unwrap().e_free.norm()))
        .collect();
    assert!((loglog_slope(&radii, &free) + 1.0).abs() < 0.02);
    // The static part of the attached field is that of the charge at rest.
    let rest = ChargeKinematics::at_rest(1.0, Vec3::zeros());
    let att: Vec<f64> =
        radii.iter().map(|&r| lienard_wiechert(&rest, &(dir * r), r).unwrap().e_att.norm()).collect();
    assert!((loglog_slope(&radii, &att) + 2.0).abs() < 0.02);
    // And the attached field of the oscillator, averaged over a period.
    let att_osc: Vec<f64> = radii
        .iter()
        .map(|&r| (0..64).map(|i| lienard_wiechert(&src, &(dir * r), r + i as f64 / 64.0).unwrap().e_att.norm()).sum::<f64>() / 64.0)
        .collect();
    assert!((loglog_slope(&radii, &att_osc) + 2.0).abs() < 0.02);
}

#[test]
fn dipole_examples() {
    let stat = DipoleSource::static_dipole(0.7, Vec3::z(), Vec3::zeros()).unwrap();
    let s = dipole_fields(&stat, &Vec3::z(), 0.0).unwrap();
    assert!((s.e_att - Vec3::new(0.0, 0.0, 1.4)).norm() < 1e-14);
    assert_eq!(s.b_att, Vec3::zeros());
    assert_eq!(s.e_free.norm() + s.b_free.norm(), 0.0);

    let osc = DipoleSource::harmonic(1.0, 2.0 * PI, 0.4, Vec3::z(), Vec3::zeros()).unwrap();
    for z in [0.5, 3.0, -7.0] {
        let s = dipole_fields(&osc, &Vec3::new(0.0, 0.0, z), 0.37).unwrap();
        assert!(s.e_free.norm() < 1e-14 && s.b_free.norm() < 1e-14);
    }

    // Equator: |E_free| r constant, E_free along theta_hat (= -z there),
    // B_free along phi_hat.
    let r1 = Vec3::new(10.0, 0.0, 0.0);
    let amp = |r: Vec3| peak(|t| dipole_fields(&osc, &r, t + r.norm()).unwrap().e_free.norm()) * r.norm();
    assert!((amp(r1) / amp(r1 * 2.0) - 1.0).abs() < 0.01);
    let s = dipole_fields(&osc, &r1, 0.1).unwrap();
    assert!(s.e_free.cross(&Vec3::z()).norm() < 1e-12 * s.e_free.norm());
    assert!(s.b_free.cross(&Vec3::y()).norm() < 1e-12 * s.b_free.norm());
    assert!(matches!(dipole_fields(&osc, &Vec3::zeros(), 0.0), Err(Error::Singular(_))));
}

#[test]
fn dipole_limit_of_an_oscillating_charge() {
    // A charge with tiny excursion radiates like p = q z(t) once the
    // attached static Coulomb part is removed.
    let (q, a, w) = (1.0, 1e-4, 2.0 * PI);
    let charge = ChargeKinematics::harmonic(q, Vec3::zeros(), Vec3::z(), a, w, 0.0).unwrap();
    let dip = DipoleSource::harmonic(q * a, w, 0.0, Vec3::z(), Vec3::zeros()).unwrap();
    let r = Vec3::new(20.0, 0.0, 3.0);
    for t in [0.1, 0.35] {
        let lw = lienard_wiechert(&charge, &r, t).unwrap();
        let d = dipole_fields(&dip, &r, t).unwrap();
        assert!((lw.e_free - d.e_free).norm() < 1e-3 * d.e_free.norm().max(1e-12) + 1e-9);
    }
}

#[test]
fn energy_and_flux_examples() {
    let (u, s) = energy_and_flux(&Vec3::x(), &Vec3::y());
    assert_eq!((u, s), (1.0, Vec3::z()));
    let (u, s) = energy_and_flux(&Vec3::x(), &Vec3::zeros());
    assert_eq!((u, s), (0.5, Vec3::zeros()));
}

#[test]
fn projector_examples() {
    assert_eq!(project_transverse_r(&Vec3::x(), &Vec3::x()).unwrap(), Vec3::zeros());
    assert_eq!(project_transverse_r(&Vec3::x(), &Vec3::z()).unwrap(), Vec3::x());
    assert!(project_transverse_r(&Vec3::x(), &Vec3::zeros()).is_err());
}

#[test]
fn covariant_examples() {
    let rest = ChargeKinematics::at_rest(1.5, Vec3::zeros());
    let (ff, fa) = covariant_tensors(&rest, &Vector4::new(4.0, 0.0, 2.0, 0.0)).unwrap();
    assert_eq!(ff, nalgebra::Matrix4::zeros());
    let (e, b) = fields_from_tensor(&fa);
    assert!((e - Vec3::new(0.0, 1.5 / 4.0, 0.0)).norm() < 1e-14);
    assert!(b.norm() < 1e-14);
}

#[test]
fn superposition_matches_unsplit_reference() {
    let sources = [
        oscillator(0.1),
        ChargeKinematics::harmonic(-2.0, Vec3::new(0.1, 0.0, 0.2), Vec3::new(1.0, 1.0, 0.0), 0.12, 7.0, 1.0).unwrap(),
        ChargeKinematics::uniform(0.5, Vec3::zeros(), Vec3::new(0.6, -0.3, 0.2)).unwrap(),
    ];
    for src in &sources {
        for i in 0..200 {
            let a = i as f64 * 0.731;
            let r = Vec3::new(3.0 * a.cos(), 2.0 * (1.3 * a).sin(), 1.5 + (0.7 * a).cos());
            let t = (0.37 * a).sin() * 4.0;
            let s = lienard_wiechert(src, &r, t).unwrap();
            let (e, b) = griffiths_field(src, &r, t);
            let scale = e.norm() + b.norm();
            assert!(((s.e() - e).norm() + (s.b() - b).norm()) / scale < 1e-10);
        }
    }
}

#[test]
fn sampled_worldline_matches_builtin() {
    let src = oscillator(0.05);
    let times: Vec<f64> = (0..=800).map(|i| -6.0 + i as f64 * 0.01).collect();
    let pts = times.iter().map(|&t| src.position(t)).collect();
    let sampled = ChargeKinematics::sampled(1.0, times, pts).unwrap();
    let r = Vec3::new(2.0, 1.0, 0.5);
    let a = lienard_wiechert(&src, &r, 1.0).unwrap();
    let b = lienard_wiechert(&sampled, &r, 1.0).unwrap();
    assert!((a.e() - b.e()).norm() < 1e-4 * a.e().norm());
}

/// 4th-order differences of a field function in x, y, z and t.
fn jacobian<F: Fn(&Vec3, f64) -> (Vec3, Vec3)>(f: &F, r: &Vec3, t: f64, h: f64) -> [(Vec3, Vec3); 4] {
    let mut out = [(Vec3::zeros(), Vec3::zeros()); 4];
    for (ax, o) in out.iter_mut().enumerate() {
        let at = |s: f64| {
            let (mut p, mut tt) = (*r, t);
            if ax < 3 {
                p[ax] += s;
            } else {
                tt += s;
            }
            f(&p, tt)
        };
        let (p1, m1, p2, m2) = (at(h), at(-h), at(2.0 * h), at(-2.0 * h));
        o.0 = ((p1.0 - m1.0) * 8.0 - (p2.0 - m2.0)) / (12.0 * h);
        o.1 = ((p1.1 - m1.1) * 8.0 - (p2.1 - m2.1)) / (12.0 * h);
    }
    out
}

fn div(j: &[(Vec3, Vec3); 4], magnetic: bool) -> f64 {
    (0..3).map(|i| if magnetic { j[i].1[i] } else { j[i].0[i] }).sum()
}

fn curl(j: &[(Vec3, Vec3); 4], magnetic: bool) -> Vec3 {
    let g = |i: usize, c: usize| if magnetic { j[i].1[c] } else { j[i].0[c] };
    Vec3::new(g(1, 2) - g(2, 1), g(2, 0) - g(0, 2), g(0, 1) - g(1, 0))
}

#[test]
fn maxwell_residuals_shrink_at_stencil_order() {
    let src = oscillator(0.02);
    let total = |r: &Vec3, t: f64| {
        let s = lienard_wiechert(&src, r, t).unwrap();
        (s.e(), s.b())
    };
    let k = 2.0 * PI;
    for r in [Vec3::new(5.0, 0.0, 0.0), Vec3::new(3.0, 3.0, 3.0), Vec3::new(0.0, -2.0, 6.0)] {
        let (e, b) = total(&r, 0.2);
        let scale = k * (e.norm() + b.norm());
        let residual = |h: f64| {
            let j = jacobian(&total, &r, 0.2, h);
            [
                div(&j, false).abs(),
                div(&j, true).abs(),
                (curl(&j, false) + j[3].1).norm(),
                (curl(&j, true) - j[3].0).norm(),
            ]
            .into_iter()
            .fold(0.0, f64::max)
                / scale
        };
        let (coarse, fine) = (residual(0.02), residual(0.01));
        assert!(fine < 1e-5, "residual {fine}");
        assert!(coarse / fine > 11.0, "order ratio {}", coarse / fine);
    }
}

/// The free field on its own, with the divergence measured at two
/// stencil spacings: a residual that vanishes at stencil order shrinks
/// roughly sixteenfold when h halves.
#[test]
fn free_field_is_divergence_free() {
    let src = oscillator(0.02);
    let free = |r: &Vec3, t: f64| {
        let s = lienard_wiechert(&src, r, t).unwrap();
        (s.e_free, s.b_free)
    };
    let k = 2.0 * PI;
    for r in [Vec3::new(3.0, 1.0, 2.0), Vec3::new(0.3, 0.2, 0.4), Vec3::new(6.0, 0.0, 0.0)] {
        let scale = k * free(&r, 0.3).0.norm().max(1e-300);
        let coarse = div(&jacobian(&free, &r, 0.3, 0.004), false).abs() / scale;
        let fine = div(&jacobian(&free, &r, 0.3, 0.002), false).abs() / scale;
        assert!(fine < 1e-6 && coarse / fine > 8.0, "div E_free / k|E_free| = {fine:.3e} at h = 0.002, {coarse:.3e} at 0.004");
    }
}

fn kinematics() -> impl Strategy<Value = ChargeKinematics> {
    (0.0..0.9f64, 0.5..12.0f64, 0.0..6.3f64, -1.0..1.0f64, -1.0..1.0f64).prop_map(|(speed, w, ph, ax, ay)| {
        ChargeKinematics::harmonic(1.0, Vec3::zeros(), Vec3::new(ax, ay, 1.0), speed / w, w, ph).unwrap()
    })
}

fn point() -> impl Strategy<Value = Vec3> {
    (0.7..6.0f64, 0.0..PI, 0.0..2.0 * PI)
        .prop_map(|(r, th, ph)| Vec3::new(r * th.sin() * ph.cos(), r * th.sin() * ph.sin(), r * th.cos()))
}

proptest! {
    #[test]
    fn free_field_is_transverse_to_retarded_direction(src in kinematics(), r in point(), t in -3.0..3.0f64) {
        let tr = retarded_time(&src, &r, t).unwrap();
        let n = (r - src.position(tr)).normalize();
        let s = lienard_wiechert(&src, &r, t).unwrap();
        prop_assert!(s.e_free.dot(&n).abs() <= 1e-12 * s.e_free.norm().max(1e-300));
        prop_assert!((s.b_att - n.cross(&s.e_att)).norm() <= 1e-12 * s.e_att.norm());
        prop_assert!((s.b_free - n.cross(&s.e_free)).norm() <= 1e-12 * s.e_free.norm().max(1e-300));
    }

    #[test]
    fn covariant_form_agrees(src in kinematics(), r in point(), t in -3.0..3.0f64) {
        let (ff, fa) = covariant_tensors(&src, &Vector4::new(t, r.x, r.y, r.z)).unwrap();
        prop_assert!((ff + ff.transpose()).norm() == 0.0 && (fa + fa.transpose()).norm() == 0.0);
        let s = lienard_wiechert(&src, &r, t).unwrap();
        let (e, b) = fields_from_tensor(&(ff + fa));
        let scale = s.e().norm() + s.b().norm();
        prop_assert!(((e - s.e()).norm() + (b - s.b()).norm()) / scale < 1e-9);
        // The split is preserved term by term.
        let (ef, _) = fields_from_tensor(&ff);
        prop_assert!((ef - s.e_free).norm() < 1e-9 * scale);
    }

    #[test]
    fn builtin_acceleration_is_velocity_derivative(src in kinematics(), t in -3.0..3.0f64) {
        let h = 1e-4;
        let fd = (src.velocity(t + h) - src.velocity(t - h)) / (2.0 * h);
        let a = src.acceleration(t);
        prop_assert!((fd - a).norm() <= 1e-6 * a.norm().max(1e-3));
        prop_assert!(src.velocity(t).norm() < 1.0);
    }

    #[test]
    fn projector_properties(v in point(), r in point()) {
        let p = project_transverse_r(&v, &r).unwrap();
        prop_assert!(p.dot(&r).abs() < 1e-12 * v.norm() * r.norm());
        prop_assert!((project_transverse_r(&p, &r).unwrap() - p).norm() < 1e-12 * v.norm());
    }
}

#[test]
fn flux_never_exceeds_energy_density() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100_000 {
        let mut v = || Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let (e, b) = (v(), v());
        let (u, s) = energy_and_flux(&e, &b);
        assert!(s.norm() <= u);
    }
}
