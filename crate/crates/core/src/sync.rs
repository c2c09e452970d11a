//! Three-axis synchronization of a segment.

use crate::axis::{duration_above_unchecked, min_time_unchecked, sync_unchecked};
use crate::error::{PlanError, Result};
use crate::model::{AxisBounds, AxisProfile, Role, Segment3D, State3};
use crate::scalar::Scalar;

/// Upper bound on synchronization-duration raises before giving up.
pub const RECOVERY_CAP: usize = 64;

fn is_zero_length<S: Scalar>(p: &AxisProfile<S>) -> bool {
    p.start.velocity == S::zero() && p.duration() == S::zero()
}

/// Plans a segment in which all three axes share one duration.
///
/// Each axis is first solved for minimum time; the slowest duration becomes
/// the segment duration and the other axes are stretched to it. When an axis
/// cannot be stretched to that duration the duration is raised to the nearest
/// value at which it can, and all axes are synchronized again.
pub fn pmm_traj_3d<S: Scalar>(start: &State3<S>, end: &State3<S>, bounds: &[AxisBounds<S>; 3]) -> Result<Segment3D<S>> {
    for b in bounds {
        b.validate()?;
    }
    if !start.is_finite() || !end.is_finite() {
        return Err(PlanError::InvalidArgument("segment boundary states must be finite".into()));
    }
    for i in 0..3 {
        if let Some(vm) = bounds[i].v_m {
            let slack = vm * (S::one() + S::REL_TOL) + S::REL_TOL;
            if start.v[i].abs() > slack || end.v[i].abs() > slack {
                return Err(PlanError::InvalidArgument(format!(
                    "axis {i} boundary velocity exceeds its speed limit {vm}"
                )));
            }
        }
    }

    let min_time: [AxisProfile<S>; 3] = {
        let mut out = Vec::with_capacity(3);
        for i in 0..3 {
            out.push(min_time_unchecked(&start.axis(i), &end.axis(i), &bounds[i])?);
        }
        out.try_into().expect("three axes")
    };
    let mut duration = min_time.iter().map(|p| p.duration()).fold(S::zero(), S::max);

    if duration == S::zero() {
        // nothing moves: every axis trivially dictates the empty segment
        let axes = min_time.map(|mut p| {
            p.role = Role::Dictating;
            p
        });
        return Ok(Segment3D { axes, duration });
    }

    for _ in 0..RECOVERY_CAP {
        let tie = S::REL_TOL * duration;
        let mut axes: Vec<AxisProfile<S>> = Vec::with_capacity(3);
        let mut raise: Option<S> = None;
        for i in 0..3 {
            let mt = &min_time[i];
            if !is_zero_length(mt) && (mt.duration() - duration).abs() <= tie {
                let mut p = mt.clone();
                p.role = Role::Dictating;
                p.gamma = S::one();
                axes.push(p);
                continue;
            }
            match sync_unchecked(&start.axis(i), &end.axis(i), &bounds[i], duration).profile {
                Some(mut p) => {
                    if p.gamma >= S::one() && !is_zero_length(mt) {
                        p.role = Role::Dictating;
                    }
                    axes.push(p);
                }
                None => {
                    let t = duration_above_unchecked(&start.axis(i), &end.axis(i), &bounds[i], duration)?;
                    raise = Some(raise.map_or(t, |r: S| r.min(t)));
                    axes.push(mt.clone());
                }
            }
        }
        match raise {
            None => {
                let axes: [AxisProfile<S>; 3] = axes.try_into().expect("three axes");
                return Ok(Segment3D { axes, duration });
            }
            Some(t) => {
                debug_assert!(t > duration);
                duration = t;
            }
        }
    }
    Err(PlanError::SyncRecoveryCap(RECOVERY_CAP))
}
