//! Trajectory evaluation and sampling.

use crate::error::{PlanError, Result};
use crate::model::{ThrustConfig, Trajectory};
use crate::scalar::{Scalar, Vec3};
use crate::thrust::thrust_accel;

/// Kinematic state at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalPoint<S> {
    pub p: Vec3<S>,
    pub v: Vec3<S>,
    pub a: Vec3<S>,
}

/// One row of a sampled series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample<S> {
    pub t: S,
    pub p: Vec3<S>,
    pub v: Vec3<S>,
    pub a: Vec3<S>,
    pub thrust_norm: S,
}

/// Start time of every segment.
pub fn segment_offsets<S: Scalar>(trajectory: &Trajectory<S>) -> Vec<S> {
    let mut acc = S::zero();
    trajectory
        .segments
        .iter()
        .map(|s| {
            let t0 = acc;
            acc = acc + s.duration;
            t0
        })
        .collect()
}

fn locate<S: Scalar>(offsets: &[S], t: S) -> usize {
    // last segment starting at or before t
    offsets.partition_point(|o| *o <= t).saturating_sub(1)
}

fn check_range<S: Scalar>(trajectory: &Trajectory<S>, t: S) -> Result<()> {
    if !(t >= S::zero() && t <= trajectory.total_duration) || trajectory.segments.is_empty() {
        return Err(PlanError::OutOfRange { t: t.as_f64(), total: trajectory.total_duration.as_f64() });
    }
    Ok(())
}

/// State at global time `t`. Acceleration is right-continuous, except at the
/// very end where the final phase's value is reported.
pub fn evaluate<S: Scalar>(trajectory: &Trajectory<S>, t: S) -> Result<EvalPoint<S>> {
    check_range(trajectory, t)?;
    let offsets = segment_offsets(trajectory);
    Ok(eval_with(trajectory, &offsets, t))
}

fn eval_with<S: Scalar>(trajectory: &Trajectory<S>, offsets: &[S], t: S) -> EvalPoint<S> {
    let mut k = locate(offsets, t);
    // skip empty segments so the acceleration reported is the one that follows
    while k + 1 < offsets.len() && trajectory.segments[k].duration == S::zero() {
        k += 1;
    }
    if t >= trajectory.total_duration {
        k = trajectory
            .segments
            .iter()
            .rposition(|s| s.duration > S::zero())
            .unwrap_or(trajectory.segments.len() - 1);
    }
    let seg = &trajectory.segments[k];
    let local = (t - offsets[k]).max(S::zero()).min(seg.duration);
    let (p, v, a) = seg.state_at(local);
    EvalPoint { p, v, a }
}

/// Acceleration just before global time `t`.
pub fn acceleration_before<S: Scalar>(trajectory: &Trajectory<S>, t: S) -> Result<Vec3<S>> {
    check_range(trajectory, t)?;
    let offsets = segment_offsets(trajectory);
    Ok(left_acc(trajectory, &offsets, t))
}

fn left_acc<S: Scalar>(trajectory: &Trajectory<S>, offsets: &[S], t: S) -> Vec3<S> {
    // the segment whose interval (start, end] contains t
    let mut k = offsets.partition_point(|o| *o < t).saturating_sub(1);
    while k > 0 && trajectory.segments[k].duration == S::zero() {
        k -= 1;
    }
    let seg = &trajectory.segments[k];
    let local = (t - offsets[k]).max(S::zero()).min(seg.duration);
    Vec3(std::array::from_fn(|i| seg.axes[i].acceleration_before(local)))
}

/// Every instant at which some axis changes acceleration, including segment
/// boundaries, in global time.
pub fn switch_times<S: Scalar>(trajectory: &Trajectory<S>) -> Vec<S> {
    let offsets = segment_offsets(trajectory);
    let mut out = Vec::new();
    for (seg, t0) in trajectory.segments.iter().zip(&offsets) {
        if *t0 > S::zero() {
            out.push(*t0);
        }
        out.extend(seg.switch_times().into_iter().map(|t| *t0 + t));
    }
    out
}

fn merged_times<S: Scalar>(trajectory: &Trajectory<S>, dt: S) -> Vec<S> {
    let total = trajectory.total_duration;
    let mut ts = Vec::new();
    let mut k = 0usize;
    loop {
        let t = S::from_usize(k).expect("sample index") * dt;
        if t >= total {
            break;
        }
        ts.push(t);
        k += 1;
    }
    ts.extend(switch_times(trajectory).into_iter().filter(|t| *t < total));
    ts.push(total);
    ts.sort_by(|a, b| a.partial_cmp(b).expect("finite times"));
    let tol = S::TIME_TOL * S::one().max(total);
    ts.dedup_by(|later, earlier| (*later - *earlier).abs() <= tol);
    ts
}

/// Samples on a regular `dt` grid merged with every switch time and the final
/// time, without duplicates. The thrust norm uses the reported acceleration.
pub fn sample<S: Scalar>(trajectory: &Trajectory<S>, dt: S, config: &ThrustConfig<S>) -> Result<Vec<Sample<S>>> {
    if !(dt > S::zero()) || !dt.is_finite() {
        return Err(PlanError::InvalidArgument(format!("sampling step must be > 0 (got {dt})")));
    }
    if trajectory.segments.is_empty() {
        return Ok(Vec::new());
    }
    let offsets = segment_offsets(trajectory);
    Ok(merged_times(trajectory, dt)
        .into_iter()
        .map(|t| {
            let e = eval_with(trajectory, &offsets, t);
            let thrust_norm = thrust_accel(&e.a, &e.v, config).norm();
            Sample { t, p: e.p, v: e.v, a: e.a, thrust_norm }
        })
        .collect())
}

/// Like [`sample`] but checks both one-sided accelerations at every switch
/// time; returns the largest thrust norm and speed seen.
pub fn thrust_and_speed_envelope<S: Scalar>(trajectory: &Trajectory<S>, dt: S, config: &ThrustConfig<S>) -> Result<(S, S)> {
    let samples = sample(trajectory, dt, config)?;
    let offsets = segment_offsets(trajectory);
    let mut max_thrust = S::zero();
    let mut max_speed = S::zero();
    for s in &samples {
        max_thrust = max_thrust.max(s.thrust_norm);
        max_speed = max_speed.max(s.v.norm());
        if s.t > S::zero() {
            let a = left_acc(trajectory, &offsets, s.t);
            max_thrust = max_thrust.max(thrust_accel(&a, &s.v, config).norm());
        }
    }
    Ok((max_thrust, max_speed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AxisBounds, State3};
    use crate::sync::pmm_traj_3d;

    fn rest_to_rest() -> Trajectory<f64> {
        let s = State3::at_rest(Vec3::zeros());
        let e = State3::at_rest(Vec3::new(10.0, 0.0, 0.0));
        Trajectory::from_segment(pmm_traj_3d(&s, &e, &[AxisBounds::symmetric(10.0); 3]).unwrap())
    }

    #[test]
    fn midpoint_and_ends() {
        let tr = rest_to_rest();
        let mid = evaluate(&tr, 1.0).unwrap();
        assert_eq!(mid.p, Vec3::new(5.0, 0.0, 0.0));
        assert_eq!(mid.v, Vec3::new(10.0, 0.0, 0.0));
        assert_eq!(mid.a.x(), -10.0);
        assert_eq!(acceleration_before(&tr, 1.0).unwrap().x(), 10.0);
        assert_eq!(evaluate(&tr, 0.0).unwrap().p, Vec3::zeros());
        let end = evaluate(&tr, 2.0).unwrap();
        assert_eq!(end.p, Vec3::new(10.0, 0.0, 0.0));
        assert_eq!(end.v, Vec3::zeros());
        assert!(evaluate(&tr, 2.5).is_err());
        assert!(evaluate(&tr, -1e-3).is_err());
    }

    #[test]
    fn sampling_grid() {
        let tr = rest_to_rest();
        let cfg = ThrustConfig::reference();
        let s = sample(&tr, 0.5, &cfg).unwrap();
        let ts: Vec<f64> = s.iter().map(|s| s.t).collect();
        assert_eq!(ts, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        let coarse: Vec<f64> = sample(&tr, 10.0, &cfg).unwrap().iter().map(|s| s.t).collect();
        assert_eq!(coarse, vec![0.0, 1.0, 2.0]);
        assert!(sample(&tr, 0.0, &cfg).is_err());
    }
}
