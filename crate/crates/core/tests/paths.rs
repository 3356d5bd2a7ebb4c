use std::f64::consts::PI;

use proptest::prelude::*;

use ptcd_core::paths::{
    apollonius_from_ratio, enclosed_ep_count, point_at, track_on_grid, tracked_angle, ControlSchedule, PhaseRamp,
};
use ptcd_core::spectrum::mixing_angle;

fn fd_rate(schedule: &ControlSchedule, t: f64, h: f64) -> ptcd_core::C64 {
    let p = point_at(schedule, t, None).unwrap();
    let fwd = mixing_angle(&schedule.params_at(t + h).unwrap(), Some(&p.alpha)).unwrap();
    let bwd = mixing_angle(&schedule.params_at(t - h).unwrap(), Some(&p.alpha)).unwrap();
    (fwd.value() - bwd.value()) / (2.0 * h)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn analytic_rate_matches_finite_difference(
        j_min in -1.0f64..2.0,
        j_max in 5.0f64..40.0,
        amp in prop_oneof![-40.0f64..-1.0, 1.0f64..40.0],
        kappa in 0.05f64..1.0,
        s in 0.0f64..1.0,
        phase_rate in prop_oneof![Just(0.0), -5.0f64..5.0],
    ) {
        let mut schedule = ControlSchedule::cosine_loop(j_min, j_max, amp, 1.0, kappa).unwrap();
        if phase_rate != 0.0 {
            schedule = schedule.with_phase(PhaseRamp { phi0: 0.1, rate: phase_rate });
        }
        let p = point_at(&schedule, s, None);
        prop_assume!(p.is_ok());
        let p = p.unwrap();
        prop_assume!(p.params.ep_distance() > 0.05);
        let fd = fd_rate(&schedule, s, 1e-6);
        let scale = p.alpha_dot.norm().max(1e-3);
        prop_assert!((fd - p.alpha_dot).norm() / scale < 1e-6, "{} vs {}", fd, p.alpha_dot);
    }
}

#[test]
fn finite_difference_on_custom_table() {
    let n = 201;
    let t: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
    let jx: Vec<f64> = t.iter().map(|t| 3.0 + (2.0 * PI * t).cos()).collect();
    let jy: Vec<f64> = t.iter().map(|t| 0.5 * (2.0 * PI * t).sin()).collect();
    let d: Vec<f64> = t.iter().map(|t| 2.0 * (2.0 * PI * t).sin()).collect();
    let table = ptcd_core::paths::CustomTable::new(t, jx, jy, d).unwrap();
    let s = ControlSchedule::custom(table, 0.2).unwrap();
    for &t in &[0.13, 0.4, 0.77] {
        let p = point_at(&s, t, None).unwrap();
        let fd = fd_rate(&s, t, 1e-6);
        assert!((fd - p.alpha_dot).norm() / p.alpha_dot.norm() < 1e-6);
    }
}

#[test]
fn apollonius_keeps_hyperbolic_angle_constant() {
    for &(r, kappa) in &[(0.9733, 0.413), (0.5, 0.29), (2.0, 0.21), (0.1, 1.0)] {
        let s = ControlSchedule::apollonius(r, kappa, 0.2).unwrap();
        let path = tracked_angle(&s).unwrap();
        let a0 = path[0].alpha.im;
        let worst = path.iter().map(|p| (p.alpha.im - a0).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-9, "r = {r}: {worst:e}");
        assert!((a0.abs() - apollonius_from_ratio(r, kappa).unwrap().alpha_i.abs()).abs() < 1e-9);
    }
}

#[test]
fn cassini_curve_keeps_rotation_angle_constant() {
    let kappa = 0.3;
    let s = ControlSchedule::angle_sweep(0.7, 0.0, 0.2, 1.5, 1.0, kappa).unwrap();
    let path = tracked_angle(&s).unwrap();
    let arg_sum = |p: &ptcd_core::paths::PathPoint| {
        let eps = p.params.epsilon();
        let ik = ptcd_core::C64::new(0.0, kappa);
        (eps - ik).arg() + (eps + ik).arg()
    };
    let s0 = arg_sum(&path[0]);
    for p in &path {
        assert!(p.alpha_dot.re.abs() < 1e-9, "{}", p.alpha_dot);
        assert!((p.alpha.re - 0.7).abs() < 1e-9);
        assert!((arg_sum(p) - s0).abs() < 1e-9);
    }
}

#[test]
fn winding_classifies_enclosed_eps() {
    let kappa = 0.21;
    let cases = [(0.5, 0), (0.26, 0), (0.16, 1), (0.0, 1), (-0.16, 1), (-0.26, 2), (-1.0, 2)];
    for (j_min, expected) in cases {
        for amp in [-10.0 * PI, 10.0 * PI] {
            let s = ControlSchedule::cosine_loop(j_min, 30.0, amp, 0.2, kappa).unwrap();
            assert_eq!(enclosed_ep_count(&s).unwrap(), expected, "jMin = {j_min}");
        }
    }
}

#[test]
fn tracked_angle_sheet_depends_on_enclosed_eps() {
    let kappa = 0.21;
    for (j_min, advance) in [(0.5, 0.0), (0.0, PI), (-0.5, 2.0 * PI)] {
        let s = ControlSchedule::cosine_loop(j_min, 30.0, -10.0 * PI, 0.2, kappa).unwrap();
        let path = tracked_angle(&s).unwrap();
        let d = path.last().unwrap().alpha.re - path[0].alpha.re;
        assert!((d.abs() - advance).abs() < 1e-9, "jMin = {j_min}: {d}");
    }
}

#[test]
fn reversal_returns_to_initial_branch() {
    for s in [
        ControlSchedule::cosine_loop(0.0, 30.0, -10.0 * PI, 0.2, 0.29).unwrap(),
        ControlSchedule::cosine_loop(-1.0, 30.0, 10.0 * PI, 1.0, 0.21).unwrap(),
        ControlSchedule::apollonius(0.9733, 0.413, 0.2).unwrap(),
    ] {
        let fwd = tracked_angle(&s).unwrap();
        let end = fwd.last().unwrap().alpha;
        let back = track_on_grid(&s.reversed(), &s.sample_times(), Some(&end)).unwrap();
        let last = back.last().unwrap().alpha;
        assert!((last.value() - fwd[0].alpha.value()).norm() < 1e-9);
        assert_eq!(last.branch, fwd[0].alpha.branch);
    }
}

#[test]
fn loops_are_periodic() {
    let s = ControlSchedule::cosine_loop(0.1, 30.0, 7.0, 0.37, 0.29).unwrap();
    let a = s.params_at(0.0).unwrap();
    let b = s.params_at(0.37).unwrap();
    assert_eq!((a.amplitude, a.delta), (b.amplitude, b.delta));
    assert_eq!(a.amplitude, 30.0);
}
