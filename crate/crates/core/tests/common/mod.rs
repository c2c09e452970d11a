//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use pmm_planner::{AxisProfile, Segment3D, Vec3};

/// Integrates a profile phase by phase with plain kinematics.
pub fn replay(p: &AxisProfile<f64>) -> (f64, f64) {
    let (mut x, mut v) = (p.start.position, p.start.velocity);
    for ph in &p.phases {
        x += v * ph.duration + 0.5 * ph.acceleration * ph.duration * ph.duration;
        v += ph.acceleration * ph.duration;
    }
    (x, v)
}

pub fn replay_segment(s: &Segment3D<f64>) -> (Vec3<f64>, Vec3<f64>) {
    let r: Vec<(f64, f64)> = s.axes.iter().map(replay).collect();
    (Vec3::new(r[0].0, r[1].0, r[2].0), Vec3::new(r[0].1, r[1].1, r[2].1))
}

/// Whether a double integrator with accelerations in `[a_min, a_max]` can go
/// from velocity `v0` to `v2` covering `d` in exactly `t` seconds (no speed
/// limit). The reachable displacements form the interval between the two
/// single-switch extremes.
pub fn reachable(v0: f64, v2: f64, d: f64, t: f64, a_min: f64, a_max: f64, tol: f64) -> bool {
    let dv = v2 - v0;
    if dv < a_min * t - tol || dv > a_max * t + tol {
        return false;
    }
    let extreme = |first: f64, second: f64| {
        // first for t1, then second for the rest, hitting v2 exactly
        let t1 = ((dv - second * t) / (first - second)).clamp(0.0, t);
        let v1 = v0 + first * t1;
        v0 * t1 + 0.5 * first * t1 * t1 + v1 * (t - t1) + 0.5 * second * (t - t1) * (t - t1)
    };
    let hi = extreme(a_max, a_min);
    let lo = extreme(a_min, a_max);
    d >= lo - tol && d <= hi + tol
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}
