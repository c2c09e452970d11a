//! Waypoint velocity optimization.
//!
//! Velocities at the via-waypoints are unknown. They are initialized from the
//! path geometry and then improved per axis by gradient steps on the summed
//! duration of the two segments meeting at each waypoint. Each step is
//! clipped to the velocity range in which the affected axis profiles keep
//! their structure, and a step that lengthens the pair is reverted and
//! retried with smaller step sizes on the axes whose role changed.

use std::time::{Duration, Instant};

use crate::axis::{
    duration_gradient, m_limit_velocities, min_time_unchecked, profile_gradient, s_limit_velocities, VelocityEnd,
    VelocityInterval,
};
use crate::error::{PlanError, Result};
use crate::ltd::{equal_caps, init_acc_limits, interval_thrusts, ltd_segment, LtdOutcome};
use crate::model::{AxisBounds, AxisProfile, Role, Segment3D, State3, ThrustConfig, Trajectory};
use crate::scalar::{Scalar, Vec3};
use crate::sync::pmm_traj_3d;

/// Waypoints with fixed start and end velocities.
#[derive(Debug, Clone, PartialEq)]
pub struct WaypointPath<S> {
    pub waypoints: Vec<Vec3<S>>,
    pub v_start: Vec3<S>,
    pub v_end: Vec3<S>,
}

impl<S: Scalar> WaypointPath<S> {
    pub fn new(waypoints: Vec<Vec3<S>>, v_start: Vec3<S>, v_end: Vec3<S>) -> Result<Self> {
        let p = WaypointPath { waypoints, v_start, v_end };
        p.validate()?;
        Ok(p)
    }

    /// Path that starts and ends at rest.
    pub fn at_rest(waypoints: Vec<Vec3<S>>) -> Result<Self> {
        Self::new(waypoints, Vec3::zeros(), Vec3::zeros())
    }

    pub fn validate(&self) -> Result<()> {
        if self.waypoints.len() < 2 {
            return Err(PlanError::InvalidArgument("a path needs at least two waypoints".into()));
        }
        if self.waypoints.iter().any(|w| !w.is_finite()) || !self.v_start.is_finite() || !self.v_end.is_finite() {
            return Err(PlanError::InvalidArgument("waypoints and velocities must be finite".into()));
        }
        for (k, w) in self.waypoints.windows(2).enumerate() {
            if w[0] == w[1] {
                return Err(PlanError::InvalidArgument(format!("waypoints {k} and {} coincide", k + 1)));
            }
        }
        Ok(())
    }

    pub fn segment_count(&self) -> usize {
        self.waypoints.len() - 1
    }
}

/// Step-size schedule and stopping rule of the optimizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerParams<S> {
    /// Initial per-axis step size.
    pub alpha: S,
    /// Step reduction factor in (0, 1).
    pub eta: S,
    /// Steps below this are set to zero.
    pub zeta: S,
    /// Stop once an iteration changes the total duration by less than this, s.
    pub eps_t: S,
    pub max_iterations: usize,
    /// Share of the turn angle distributed by segment length at initialization.
    pub r: S,
}

impl<S: Scalar> OptimizerParams<S> {
    /// Settings for the first pass with fixed acceleration limits.
    pub fn phase_one() -> Self {
        OptimizerParams {
            alpha: S::lit(10.0),
            eta: S::lit(0.5),
            zeta: S::lit(0.2),
            eps_t: S::lit(1e-3),
            max_iterations: 200,
            r: S::lit(0.6),
        }
    }

    /// Settings for the second pass with thrust decomposition in the loop.
    pub fn phase_two() -> Self {
        OptimizerParams { alpha: S::lit(35.0), zeta: S::lit(0.1), eps_t: S::lit(1e-2), ..Self::phase_one() }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.alpha > S::zero()
            && self.eta > S::zero()
            && self.eta < S::one()
            && self.zeta > S::zero()
            && self.eps_t > S::zero()
            && self.r >= S::zero()
            && self.r <= S::one();
        if ok {
            Ok(())
        } else {
            Err(PlanError::InvalidArgument(format!("invalid optimizer parameters {self:?}")))
        }
    }
}

/// How each segment is planned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlanMode<S> {
    /// Fixed per-axis acceleration limits. The speed limit of `config`, if
    /// any, is split along each segment's displacement.
    FixedBounds { bounds: [AxisBounds<S>; 3], config: ThrustConfig<S> },
    /// Limited thrust decomposition per segment.
    Ltd { config: ThrustConfig<S>, eps_a: S },
}

impl<S: Scalar> PlanMode<S> {
    /// Fixed limits from the equal thrust split of `config`.
    pub fn equal_split(config: &ThrustConfig<S>) -> Result<Self> {
        Ok(PlanMode::FixedBounds { bounds: init_acc_limits(config)?, config: *config })
    }

    pub fn config(&self) -> &ThrustConfig<S> {
        match self {
            PlanMode::FixedBounds { config, .. } | PlanMode::Ltd { config, .. } => config,
        }
    }

    fn accel_bounds(&self) -> Result<[AxisBounds<S>; 3]> {
        match self {
            PlanMode::FixedBounds { bounds, .. } => Ok(*bounds),
            PlanMode::Ltd { config, .. } => init_acc_limits(config),
        }
    }
}

/// A planned segment with the limits it was planned under.
#[derive(Debug, Clone, PartialEq)]
pub struct PlannedSegment<S> {
    pub segment: Segment3D<S>,
    pub bounds: [AxisBounds<S>; 3],
    pub ltd_iterations: usize,
    pub ltd_converged: bool,
    /// Largest thrust norm at the interval ends of the segment.
    pub max_thrust: S,
}

impl<S: Scalar> PlannedSegment<S> {
    pub fn duration(&self) -> S {
        self.segment.duration
    }
}

/// Plans one segment under `mode`.
pub fn plan_segment<S: Scalar>(mode: &PlanMode<S>, start: &State3<S>, end: &State3<S>) -> Result<PlannedSegment<S>> {
    match mode {
        PlanMode::FixedBounds { bounds, config } => {
            let mut b = *bounds;
            if let Some(vm) = config.v_max {
                let caps = equal_caps(start, end, vm);
                for i in 0..3 {
                    b[i].v_m = Some(caps[i]);
                }
            }
            let segment = pmm_traj_3d(start, end, &b)?;
            let max_thrust = interval_thrusts(&segment, config).iter().map(|c| c.norm).fold(S::zero(), S::max);
            Ok(PlannedSegment { segment, bounds: b, ltd_iterations: 0, ltd_converged: true, max_thrust })
        }
        PlanMode::Ltd { config, eps_a } => {
            let LtdOutcome { segment, bounds, iterations, converged, max_thrust } = ltd_segment(start, end, config, *eps_a)?;
            Ok(PlannedSegment { segment, bounds, ltd_iterations: iterations, ltd_converged: converged, max_thrust })
        }
    }
}

/// Rotation of the incoming heading toward the outgoing one at a via-waypoint.
pub fn heading_rotation<S: Scalar>(theta: S, l_prev: S, l_next: S, r: S) -> S {
    let half = S::lit(0.5);
    (S::one() - r) * half * theta + r * l_prev / (l_prev + l_next) * theta
}

/// Speed scale for a turn of angle `θ`: 1 straight through, 0 for a reversal.
pub fn turn_sharpness<S: Scalar>(theta: S) -> S {
    (S::one() + theta.cos()) * S::lit(0.5)
}

/// Acceleration available along unit direction `u` within per-axis limits.
fn reach_accel<S: Scalar>(u: &Vec3<S>, bounds: &[AxisBounds<S>; 3], forward: bool) -> S {
    let mut a = S::infinity();
    for i in 0..3 {
        let c = u[i];
        if c.abs() <= S::epsilon() {
            continue;
        }
        let limit = if (c > S::zero()) == forward { bounds[i].a_max } else { -bounds[i].a_min };
        a = a.min(limit / c.abs());
    }
    if a.is_finite() {
        a
    } else {
        S::zero()
    }
}

/// Initial velocity at every waypoint, endpoints included.
pub fn init_velocities<S: Scalar>(
    path: &WaypointPath<S>,
    bounds: &[AxisBounds<S>; 3],
    v_max: Option<S>,
    r: S,
) -> Vec<Vec3<S>> {
    let n = path.waypoints.len();
    let mut out = vec![Vec3::zeros(); n];
    out[0] = path.v_start;
    out[n - 1] = path.v_end;
    let two = S::lit(2.0);
    for j in 1..n.saturating_sub(1) {
        let hp = path.waypoints[j] - path.waypoints[j - 1];
        let hn = path.waypoints[j + 1] - path.waypoints[j];
        let (lp, ln) = (hp.norm(), hn.norm());
        let up = hp * (S::one() / lp);
        let un = hn * (S::one() / ln);
        let cos = up.dot(&un).max(-S::one()).min(S::one());
        let theta = cos.acos();
        let axis = up.cross(&un);
        let dir = match axis.normalized() {
            Some(k) if axis.norm() > S::lit(1e-12) => {
                let tn = heading_rotation(theta, lp, ln, r);
                up * tn.cos() + k.cross(&up) * tn.sin()
            }
            _ => up,
        };
        let speed_in = (two * reach_accel(&dir, bounds, true) * lp).sqrt();
        let speed_out = (two * reach_accel(&dir, bounds, false) * ln).sqrt();
        let speed = speed_in.min(speed_out) * turn_sharpness(theta);
        out[j] = match v_max {
            Some(vm) => fit_speed(dir * speed, out[j - 1], out[j + 1], vm),
            None => dir * speed,
        };
    }
    out
}

fn caps_fit<S: Scalar>(a: &Vec3<S>, b: &Vec3<S>, v_max: S) -> bool {
    let need: S = (0..3).map(|i| {
        let m = a[i].abs().max(b[i].abs());
        m * m
    }).sum();
    need <= v_max * v_max
}

/// Scales `v` down so that its norm stays within `v_max` and the per-axis
/// speed caps of both adjacent segments (at least the larger boundary speed on
/// each axis) still fit in the speed budget.
pub(crate) fn fit_speed<S: Scalar>(v: Vec3<S>, prev: Vec3<S>, next: Vec3<S>, v_max: S) -> Vec3<S> {
    let ok = |w: &Vec3<S>| w.norm() <= v_max && caps_fit(w, &prev, v_max) && caps_fit(w, &next, v_max);
    if ok(&v) {
        return v;
    }
    let (mut lo, mut hi) = (S::zero(), S::one());
    for _ in 0..60 {
        let mid = (lo + hi) / S::lit(2.0);
        if ok(&(v * mid)) { lo = mid } else { hi = mid }
    }
    v * lo
}

/// Role combination of the two axis profiles meeting at a waypoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCase {
    MM,
    MS,
    SM,
    SS,
}

impl BoundaryCase {
    pub fn of(incoming: Role, outgoing: Role) -> Self {
        match (incoming, outgoing) {
            (Role::Dictating, Role::Dictating) => BoundaryCase::MM,
            (Role::Dictating, Role::Synced) => BoundaryCase::MS,
            (Role::Synced, Role::Dictating) => BoundaryCase::SM,
            (Role::Synced, Role::Synced) => BoundaryCase::SS,
        }
    }
}

/// Result of one per-axis velocity step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryUpdate<S> {
    pub v_new: S,
    pub bounds: VelocityInterval<S>,
    pub case: BoundaryCase,
    /// Gradient of the pair duration that drove the step.
    pub gradient: S,
}

/// `∂T/∂v` of a dictating axis profile.
fn dictating_gradient<S: Scalar>(profile: &AxisProfile<S>, bounds: &AxisBounds<S>, wrt: VelocityEnd) -> S {
    let start = profile.start;
    let end = profile.end();
    let min_time = min_time_unchecked(&start, &end, bounds).map(|p| p.duration());
    let on_min_branch = min_time
        .map(|t| (t - profile.duration()).abs() <= S::lit(1e3) * S::REL_TOL * S::one().max(t))
        .unwrap_or(false);
    if on_min_branch {
        if let Ok(g) = duration_gradient(&start, &end, bounds, wrt) {
            return g.value;
        }
    }
    profile_gradient(profile, wrt).unwrap_or(S::zero())
}

/// One gradient step on the velocity shared by `incoming` (ending at the
/// waypoint) and `outgoing` (starting there), for a single axis.
pub fn update_boundary_velocity<S: Scalar>(
    incoming: (&AxisProfile<S>, &AxisBounds<S>),
    outgoing: (&AxisProfile<S>, &AxisBounds<S>),
    v12: S,
    alpha: S,
) -> BoundaryUpdate<S> {
    let (p1, b1) = incoming;
    let (p2, b2) = outgoing;
    let case = BoundaryCase::of(p1.role, p2.role);
    let m1 = || m_limit_velocities(p1, b1, VelocityEnd::End, v12);
    let m2 = || m_limit_velocities(p2, b2, VelocityEnd::Start, v12);
    let (gradient, bounds) = match case {
        BoundaryCase::SS => {
            return BoundaryUpdate { v_new: v12, bounds: VelocityInterval { lo: v12, hi: v12 }, case, gradient: S::zero() };
        }
        BoundaryCase::MM => (
            dictating_gradient(p1, b1, VelocityEnd::End) + dictating_gradient(p2, b2, VelocityEnd::Start),
            m1().intersect(&m2()),
        ),
        BoundaryCase::MS => (
            dictating_gradient(p1, b1, VelocityEnd::End),
            m1().intersect(&s_limit_velocities(p2, b2, VelocityEnd::Start, v12)),
        ),
        BoundaryCase::SM => (
            dictating_gradient(p2, b2, VelocityEnd::Start),
            s_limit_velocities(p1, b1, VelocityEnd::End, v12).intersect(&m2()),
        ),
    };
    let mut bounds = bounds;
    if p1.is_singular() || p2.is_singular() {
        let cap = p1.peak_velocity().abs().max(p2.peak_velocity().abs());
        bounds = bounds.intersect(&VelocityInterval { lo: -cap, hi: cap });
    }
    let v_new = if bounds.lo <= bounds.hi { bounds.clip(v12 - alpha * gradient) } else { v12 };
    BoundaryUpdate { v_new, bounds, case, gradient }
}

/// Why an optimization run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Consecutive iterations changed the duration by less than the threshold.
    Converged,
    IterationCap,
    /// Nothing to optimize: no via-waypoints.
    SingleSegment,
}

/// Result of [`optimize`].
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeReport<S> {
    pub trajectory: Trajectory<S>,
    pub segments: Vec<PlannedSegment<S>>,
    pub velocities: Vec<Vec3<S>>,
    pub iterations: usize,
    pub termination: Termination,
    /// Total duration initially and after every accepted pair update.
    pub accepted_durations: Vec<S>,
}

fn segment_error(segment: usize, source: PlanError) -> PlanError {
    PlanError::Segment { segment, from: segment, to: segment + 1, source: Box::new(source) }
}

fn plan_all<S: Scalar>(path: &WaypointPath<S>, velocities: &[Vec3<S>], mode: &PlanMode<S>) -> Result<Vec<PlannedSegment<S>>> {
    (0..path.segment_count())
        .map(|k| {
            let s = State3::new(path.waypoints[k], velocities[k]);
            let e = State3::new(path.waypoints[k + 1], velocities[k + 1]);
            plan_segment(mode, &s, &e).map_err(|err| segment_error(k, err))
        })
        .collect()
}

fn total<S: Scalar>(segments: &[PlannedSegment<S>]) -> S {
    segments.iter().map(|s| s.duration()).sum()
}

fn assemble<S: Scalar>(path: &WaypointPath<S>, segments: &[PlannedSegment<S>]) -> Trajectory<S> {
    Trajectory::new(segments.iter().map(|s| s.segment.clone()).collect(), path.waypoints.clone())
}

/// Optimizes the via-waypoint velocities of `path`.
///
/// `initial` overrides the geometric initialization (length must match the
/// waypoint count; the endpoint entries are ignored).
pub fn optimize<S: Scalar>(
    path: &WaypointPath<S>,
    params: &OptimizerParams<S>,
    mode: &PlanMode<S>,
    initial: Option<&[Vec3<S>]>,
) -> Result<OptimizeReport<S>> {
    path.validate()?;
    params.validate()?;
    let n = path.waypoints.len();
    let config = *mode.config();
    check_boundary_speeds(path, &config)?;
    let mut v = match initial {
        Some(init) if init.len() == n => init.to_vec(),
        Some(init) => {
            return Err(PlanError::InvalidArgument(format!(
                "{} initial velocities for {n} waypoints",
                init.len()
            )))
        }
        None => init_velocities(path, &mode.accel_bounds()?, config.v_max, params.r),
    };
    v[0] = path.v_start;
    v[n - 1] = path.v_end;

    let mut segs = plan_all(path, &v, mode)?;
    let mut accepted = vec![total(&segs)];
    if n == 2 {
        return Ok(OptimizeReport {
            trajectory: assemble(path, &segs),
            segments: segs,
            velocities: v,
            iterations: 0,
            termination: Termination::SingleSegment,
            accepted_durations: accepted,
        });
    }

    let mut previous = total(&segs);
    let mut termination = Termination::IterationCap;
    let mut iterations = 0;
    for k in 0..params.max_iterations {
        iterations = k + 1;
        let order: Vec<usize> = if k % 2 == 0 { (1..n - 1).collect() } else { (1..n - 1).rev().collect() };
        for j in order {
            let mut alpha = [params.alpha; 3];
            loop {
                let (a, b) = (&segs[j - 1], &segs[j]);
                let mut v_new = v[j];
                for i in 0..3 {
                    if alpha[i] == S::zero() {
                        continue;
                    }
                    let up = update_boundary_velocity(
                        (&a.segment.axes[i], &a.bounds[i]),
                        (&b.segment.axes[i], &b.bounds[i]),
                        v[j][i],
                        alpha[i],
                    );
                    v_new[i] = up.v_new;
                }
                if let Some(vm) = config.v_max {
                    v_new = fit_speed(v_new, v[j - 1], v[j + 1], vm);
                }
                if v_new == v[j] {
                    break;
                }
                let s0 = State3::new(path.waypoints[j - 1], v[j - 1]);
                let s1 = State3::new(path.waypoints[j], v_new);
                let s2 = State3::new(path.waypoints[j + 1], v[j + 1]);
                let first = plan_segment(mode, &s0, &s1).map_err(|e| segment_error(j - 1, e))?;
                let second = plan_segment(mode, &s1, &s2).map_err(|e| segment_error(j, e))?;
                // compare whole sums so the recorded sequence is monotone in floating point too
                let current = total(&segs);
                let candidate: S = segs
                    .iter()
                    .enumerate()
                    .map(|(k, s)| match k {
                        _ if k == j - 1 => first.duration(),
                        _ if k == j => second.duration(),
                        _ => s.duration(),
                    })
                    .sum();
                if candidate <= current {
                    segs[j - 1] = first;
                    segs[j] = second;
                    v[j] = v_new;
                    accepted.push(candidate);
                    break;
                }
                // revert and shrink the steps of the axes whose role flipped
                let (ra, rb) = (a.segment.roles(), b.segment.roles());
                let (na, nb) = (first.segment.roles(), second.segment.roles());
                let live = |i: &usize| alpha[*i] > S::zero();
                let mut changed: Vec<usize> = (0..3).filter(live).filter(|&i| ra[i] != na[i] || rb[i] != nb[i]).collect();
                if changed.is_empty() {
                    changed = (0..3).filter(live).collect();
                }
                for i in changed {
                    alpha[i] = alpha[i] * params.eta;
                    if alpha[i] < params.zeta {
                        alpha[i] = S::zero();
                    }
                }
                if alpha.iter().all(|a| *a == S::zero()) {
                    break;
                }
            }
        }
        let now = total(&segs);
        if (previous - now).abs() < params.eps_t {
            termination = Termination::Converged;
            break;
        }
        previous = now;
    }
    Ok(OptimizeReport {
        trajectory: assemble(path, &segs),
        segments: segs,
        velocities: v,
        iterations,
        termination,
        accepted_durations: accepted,
    })
}

/// Parameters of the two-pass planner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanParams<S> {
    pub phase_one: OptimizerParams<S>,
    pub phase_two: OptimizerParams<S>,
    pub eps_a: S,
}

impl<S: Scalar> Default for PlanParams<S> {
    fn default() -> Self {
        PlanParams { phase_one: OptimizerParams::phase_one(), phase_two: OptimizerParams::phase_two(), eps_a: S::lit(1e-2) }
    }
}

/// Summary of one optimization pass.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSummary<S> {
    pub duration: S,
    pub iterations: usize,
    pub termination: Termination,
    pub accepted_durations: Vec<S>,
}

impl<S: Scalar> PhaseSummary<S> {
    fn of(r: &OptimizeReport<S>) -> Self {
        PhaseSummary {
            duration: r.trajectory.total_duration,
            iterations: r.iterations,
            termination: r.termination,
            accepted_durations: r.accepted_durations.clone(),
        }
    }
}

/// Result of [`plan`].
#[derive(Debug, Clone, PartialEq)]
pub struct PlanReport<S> {
    pub trajectory: Trajectory<S>,
    pub segments: Vec<PlannedSegment<S>>,
    pub velocities: Vec<Vec3<S>>,
    pub phase_one: PhaseSummary<S>,
    /// Duration after re-planning the first-pass velocities with thrust decomposition.
    pub replanned_duration: S,
    pub phase_two: PhaseSummary<S>,
    pub wall_time: Duration,
}

impl<S: Scalar> PlanReport<S> {
    /// Mean over segments of the largest thrust norm relative to the limit.
    pub fn thrust_utilization(&self, config: &ThrustConfig<S>) -> S {
        mean_utilization(&self.segments, config)
    }
}

pub(crate) fn mean_utilization<S: Scalar>(segments: &[PlannedSegment<S>], config: &ThrustConfig<S>) -> S {
    let moving: Vec<S> = segments
        .iter()
        .filter(|s| s.duration() > S::zero())
        .map(|s| s.max_thrust / config.a_t_max)
        .collect();
    if moving.is_empty() {
        return S::zero();
    }
    let n = S::from_usize(moving.len()).expect("count");
    moving.into_iter().sum::<S>() / n
}

fn check_boundary_speeds<S: Scalar>(path: &WaypointPath<S>, config: &ThrustConfig<S>) -> Result<()> {
    if let Some(vm) = config.v_max {
        for (name, v) in [("start", path.v_start), ("end", path.v_end)] {
            if v.norm() > vm * (S::one() + S::REL_TOL) {
                return Err(PlanError::Infeasible(format!("{name} speed {} exceeds v_max {vm}", v.norm())));
            }
        }
    }
    Ok(())
}

/// Two-pass planner: optimize with the fixed equal-split limits, re-plan every
/// segment with thrust decomposition, then optimize again with decomposition
/// in the loop.
pub fn plan<S: Scalar>(path: &WaypointPath<S>, config: &ThrustConfig<S>, params: &PlanParams<S>) -> Result<PlanReport<S>> {
    let clock = Instant::now();
    config.validate()?;
    check_boundary_speeds(path, config)?;
    let fixed = PlanMode::equal_split(config)?;
    let ltd = PlanMode::Ltd { config: *config, eps_a: params.eps_a };
    if path.segment_count() == 1 {
        path.validate()?;
        let v = vec![path.v_start, path.v_end];
        let segs = plan_all(path, &v, &ltd)?;
        let t = total(&segs);
        let summary = PhaseSummary { duration: t, iterations: 0, termination: Termination::SingleSegment, accepted_durations: vec![t] };
        return Ok(PlanReport {
            trajectory: assemble(path, &segs),
            segments: segs,
            velocities: v,
            phase_one: summary.clone(),
            replanned_duration: t,
            phase_two: summary,
            wall_time: clock.elapsed(),
        });
    }
    let first = optimize(path, &params.phase_one, &fixed, None)?;
    let replanned = total(&plan_all(path, &first.velocities, &ltd)?);
    let second = optimize(path, &params.phase_two, &ltd, Some(&first.velocities))?;
    Ok(PlanReport {
        phase_one: PhaseSummary::of(&first),
        replanned_duration: replanned,
        phase_two: PhaseSummary::of(&second),
        trajectory: second.trajectory,
        segments: second.segments,
        velocities: second.velocities,
        wall_time: clock.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DragParams;
    use approx::assert_relative_eq;

    #[test]
    fn heading_rotation_values() {
        let right = std::f64::consts::FRAC_PI_2;
        assert_relative_eq!(heading_rotation(right, 1.0, 1.0, 0.6).to_degrees(), 45.0, epsilon = 1e-12);
        assert_relative_eq!(heading_rotation(right, 1.0, 3.0, 0.6).to_degrees(), 31.5, epsilon = 1e-12);
        assert_eq!(heading_rotation(0.0, 1.0, 3.0, 0.6), 0.0);
    }

    #[test]
    fn collinear_initialization_points_along_the_line() {
        let path = WaypointPath::at_rest(vec![Vec3::zeros(), Vec3::new(5.0, 0.0, 0.0), Vec3::new(10.0, 0.0, 0.0)]).unwrap();
        let v = init_velocities(&path, &[AxisBounds::symmetric(10.0); 3], None, 0.6);
        assert_eq!(v[0], Vec3::zeros());
        assert!(v[1].x() > 0.0);
        assert_eq!((v[1].y(), v[1].z()), (0.0, 0.0));
        assert_relative_eq!(v[1].x(), 10.0, epsilon = 1e-12);
    }

    #[test]
    fn right_angle_initialization_bisects() {
        let path = WaypointPath::at_rest(vec![Vec3::zeros(), Vec3::new(5.0, 0.0, 0.0), Vec3::new(5.0, 5.0, 0.0)]).unwrap();
        let v = init_velocities(&path, &[AxisBounds::symmetric(10.0); 3], None, 0.6);
        assert_relative_eq!(v[1].x(), v[1].y(), epsilon = 1e-12);
        assert!(v[1].x() > 0.0);
    }

    #[test]
    fn coincident_waypoints_rejected() {
        assert!(WaypointPath::<f64>::at_rest(vec![Vec3::zeros(), Vec3::zeros()]).is_err());
        assert!(WaypointPath::<f64>::at_rest(vec![Vec3::zeros()]).is_err());
    }

    #[test]
    fn synced_pair_is_left_alone() {
        let p = crate::axis::solve_sync(
            &crate::model::AxisState::new(0.0, 0.0),
            &crate::model::AxisState::new(1.0, 0.0),
            &AxisBounds::symmetric(10.0),
            2.0,
        )
        .unwrap()
        .profile
        .unwrap();
        let b = AxisBounds::symmetric(10.0);
        let up = update_boundary_velocity((&p, &b), (&p, &b), 0.0, 10.0);
        assert_eq!(up.case, BoundaryCase::SS);
        assert_eq!(up.v_new, 0.0);
    }

    #[test]
    fn collinear_path_reaches_two_point_optimum() {
        let path = WaypointPath::at_rest(vec![Vec3::zeros(), Vec3::new(5.0, 0.0, 0.0), Vec3::new(10.0, 0.0, 0.0)]).unwrap();
        let config = ThrustConfig::new(30.0, 0.0, DragParams::none(), None).unwrap();
        let mode = PlanMode::FixedBounds { bounds: [AxisBounds::symmetric(10.0); 3], config };
        // start away from the optimum so the optimizer has work to do
        let init = [Vec3::zeros(), Vec3::new(4.0, 0.0, 0.0), Vec3::zeros()];
        let params = OptimizerParams { eps_t: 1e-6, ..OptimizerParams::phase_one() };
        let r = optimize(&path, &params, &mode, Some(&init)).unwrap();
        assert_relative_eq!(r.trajectory.total_duration, 2.0, epsilon = 1e-3);
        assert_relative_eq!(r.velocities[1].x(), 10.0, epsilon = 0.1);
        assert!(r.accepted_durations.windows(2).all(|w| w[1] <= w[0]));
        let default_start = optimize(&path, &OptimizerParams::phase_one(), &mode, None).unwrap();
        assert_relative_eq!(default_start.trajectory.total_duration, 2.0, epsilon = 1e-9);
    }
}
