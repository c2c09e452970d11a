//! Limited thrust decomposition.
//!
//! Per-axis acceleration limits are refined until the largest collective
//! thrust acceleration along the planned segment touches the thrust limit:
//! plan with the current limits, evaluate the thrust at the instants where it
//! can peak, scale each of those acceleration vectors onto the limit sphere
//! and take the per-axis extremes as the new limits.

use crate::error::{PlanError, Result};
use crate::model::{AxisBounds, Segment3D, State3, ThrustConfig};
use crate::scalar::{Scalar, Vec3};
use crate::sync::pmm_traj_3d;
use crate::thrust::drag_acceleration;

/// Default iteration cap of the decomposition loop.
pub const DEFAULT_MAX_ITERATIONS: usize = 100;

/// Thrust evaluated at one candidate instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThrustCandidate<S> {
    pub time: S,
    /// Planned acceleration in effect at `time`.
    pub a: Vec3<S>,
    pub v: Vec3<S>,
    pub drag: Vec3<S>,
    /// `‖a - drag - g‖`.
    pub norm: S,
}

/// Which instants are inspected for the thrust maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CandidateSet {
    /// Just before each axis' first switch and just before the end.
    Switches,
    /// Both ends of every constant-acceleration interval. Without drag the
    /// thrust is constant per interval; with drag it is affine in time, so the
    /// interval ends bound it exactly.
    #[default]
    Intervals,
}

/// Outcome of [`ltd_segment`].
#[derive(Debug, Clone, PartialEq)]
pub struct LtdOutcome<S> {
    pub segment: Segment3D<S>,
    /// Limits the returned segment was planned with.
    pub bounds: [AxisBounds<S>; 3],
    pub iterations: usize,
    pub converged: bool,
    /// Largest candidate thrust norm of the returned segment.
    pub max_thrust: S,
}

/// Tunables for [`ltd_segment_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LtdOptions<S> {
    pub eps_a: S,
    pub max_iterations: usize,
    pub candidates: CandidateSet,
}

impl<S: Scalar> LtdOptions<S> {
    pub fn new(eps_a: S) -> Self {
        LtdOptions { eps_a, max_iterations: DEFAULT_MAX_ITERATIONS, candidates: CandidateSet::default() }
    }
}

/// Equal per-axis limits that exactly exhaust the thrust budget when all
/// three axes accelerate at once, without drag.
///
/// Solves `3a² + 2ga + g² = a_T²`; the lower z limit is mirrored about `-g`.
pub fn init_acc_limits<S: Scalar>(config: &ThrustConfig<S>) -> Result<[AxisBounds<S>; 3]> {
    config.validate()?;
    let (g, at) = (config.g, config.a_t_max);
    let three = S::lit(3.0);
    let a = (-g + (three * at * at - S::lit(2.0) * g * g).sqrt()) / three;
    if !(a > S::zero()) {
        return Err(PlanError::CannotHover { a_t_max: at.as_f64(), g: g.as_f64() });
    }
    let xy = AxisBounds { a_min: -a, a_max: a, v_m: None };
    let z = AxisBounds { a_min: -a - S::lit(2.0) * g, a_max: a, v_m: None };
    Ok([xy, xy, z])
}

fn candidate_at<S: Scalar>(segment: &Segment3D<S>, t: S, a: Vec3<S>, config: &ThrustConfig<S>) -> ThrustCandidate<S> {
    let (_, v, _) = segment.state_at(t);
    let drag = drag_acceleration(&a, &v, config);
    let norm = (a - drag - config.gravity()).norm();
    ThrustCandidate { time: t, a, v, drag, norm }
}

fn left_acceleration<S: Scalar>(segment: &Segment3D<S>, t: S) -> Vec3<S> {
    Vec3(std::array::from_fn(|i| segment.axes[i].acceleration_before(t)))
}

/// Thrust just before each axis' first switch time and just before the end.
pub fn candidate_thrusts<S: Scalar>(segment: &Segment3D<S>, config: &ThrustConfig<S>) -> [ThrustCandidate<S>; 4] {
    let times = [
        segment.axes[0].switch_time(),
        segment.axes[1].switch_time(),
        segment.axes[2].switch_time(),
        segment.duration,
    ];
    times.map(|t| candidate_at(segment, t, left_acceleration(segment, t), config))
}

/// Thrust at both ends of every constant-acceleration interval.
pub fn interval_thrusts<S: Scalar>(segment: &Segment3D<S>, config: &ThrustConfig<S>) -> Vec<ThrustCandidate<S>> {
    let mut knots = vec![S::zero()];
    knots.extend(segment.switch_times());
    knots.push(segment.duration);
    let mut out = Vec::with_capacity(2 * knots.len());
    for w in knots.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        if t1 <= t0 {
            continue;
        }
        let a = left_acceleration(segment, t1);
        out.push(candidate_at(segment, t0, a, config));
        out.push(candidate_at(segment, t1, a, config));
    }
    if out.is_empty() {
        out.push(candidate_at(segment, S::zero(), Vec3::zeros(), config));
    }
    out
}

/// Scale `β` putting `β a - d - g` on the thrust limit; `None` for zero accelerations.
pub fn scaling_factors<S: Scalar>(
    candidates: &[ThrustCandidate<S>],
    config: &ThrustConfig<S>,
) -> Result<Vec<Option<S>>> {
    candidates
        .iter()
        .map(|c| {
            let aa = c.a.norm_squared();
            if aa == S::zero() {
                return Ok(None);
            }
            let off = c.drag + config.gravity();
            let ac = c.a.dot(&off);
            let disc = ac * ac - aa * (off.norm_squared() - config.a_t_max * config.a_t_max);
            let beta = (ac + disc.max(S::zero()).sqrt()) / aa;
            if disc < S::zero() || !(beta > S::zero()) {
                return Err(PlanError::ThrustSaturated(format!(
                    "gravity and drag need {} of {} m/s^2 at t = {}",
                    off.norm(),
                    config.a_t_max,
                    c.time
                )));
            }
            Ok(Some(beta))
        })
        .collect()
}

/// Per-axis extremes of the scaled candidate accelerations; a side with no
/// candidate of that sign keeps its previous limit.
pub fn new_acc_limits<S: Scalar>(
    candidates: &[ThrustCandidate<S>],
    betas: &[Option<S>],
    previous: &[AxisBounds<S>; 3],
) -> [AxisBounds<S>; 3] {
    let mut out = *previous;
    for (i, b) in out.iter_mut().enumerate() {
        let mut hi: Option<S> = None;
        let mut lo: Option<S> = None;
        for (c, beta) in candidates.iter().zip(betas) {
            let Some(beta) = beta else { continue };
            let a = *beta * c.a[i];
            if c.a[i] > S::zero() {
                hi = Some(hi.map_or(a, |h| h.min(a)));
            } else if c.a[i] < S::zero() {
                lo = Some(lo.map_or(a, |l| l.max(a)));
            }
        }
        if let Some(h) = hi {
            b.a_max = h;
        }
        if let Some(l) = lo {
            b.a_min = l;
        }
    }
    out
}

/// Splits the speed-norm limit across axes in proportion to the per-axis
/// peak speeds of `segment`, with a floor of `1e-3 v_max` per axis.
pub fn distribute_velocity_limit<S: Scalar>(segment: &Segment3D<S>, v_max: S) -> Vec3<S> {
    let floor = S::lit(1e-3) * v_max;
    speed_direction(segment.max_axis_speeds()).map(|d| (d * v_max).max(floor))
}

fn speed_direction<S: Scalar>(peaks: Vec3<S>) -> Vec3<S> {
    match peaks.normalized() {
        Some(d) => d,
        None => Vec3::new(S::one(), S::one(), S::one()) * (S::one() / S::lit(3.0).sqrt()),
    }
}

/// Per-axis caps proportional to `peaks` with norm `v_max`, raised to at
/// least `required` on each axis. When a floor binds, the remaining axes are
/// shrunk so the cap norm stays at `v_max` whenever the floors allow it.
pub(crate) fn split_speed<S: Scalar>(peaks: Vec3<S>, v_max: S, required: Vec3<S>) -> Vec3<S> {
    let floor = S::lit(1e-3) * v_max;
    let dir = speed_direction(peaks);
    let caps = |lambda: S| Vec3(std::array::from_fn(|i| (lambda * dir[i] * v_max).max(floor).max(required[i])));
    let full = caps(S::one());
    if full.norm() <= v_max * (S::one() + S::epsilon()) {
        return full;
    }
    let (mut lo, mut hi) = (S::zero(), S::one());
    if caps(lo).norm() >= v_max {
        return caps(lo);
    }
    for _ in 0..60 {
        let mid = S::lit(0.5) * (lo + hi);
        if caps(mid).norm() > v_max {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    caps(lo)
}

fn boundary_speeds<S: Scalar>(start: &State3<S>, end: &State3<S>) -> Vec3<S> {
    Vec3(std::array::from_fn(|i| start.v[i].abs().max(end.v[i].abs())))
}

fn with_caps<S: Scalar>(bounds: &[AxisBounds<S>; 3], caps: Option<Vec3<S>>) -> [AxisBounds<S>; 3] {
    let mut out = *bounds;
    for (i, b) in out.iter_mut().enumerate() {
        b.v_m = caps.map(|c| c[i]);
    }
    out
}

/// Initial per-axis speed caps: the speed budget split along the displacement.
pub(crate) fn initial_caps<S: Scalar>(start: &State3<S>, end: &State3<S>, v_max: S) -> Vec3<S> {
    let delta = (end.p - start.p).map(|c| c.abs());
    split_speed(delta, v_max, boundary_speeds(start, end))
}

/// Per-axis speed caps with the budget split evenly, raised where a boundary
/// speed needs more.
pub(crate) fn equal_caps<S: Scalar>(start: &State3<S>, end: &State3<S>, v_max: S) -> Vec3<S> {
    split_speed(Vec3::new(S::one(), S::one(), S::one()), v_max, boundary_speeds(start, end))
}

/// Plans a segment with the fixed equal-split limits (no decomposition loop):
/// equal acceleration bounds and the speed budget split evenly across axes.
pub fn equal_split_segment<S: Scalar>(start: &State3<S>, end: &State3<S>, config: &ThrustConfig<S>) -> Result<(Segment3D<S>, [AxisBounds<S>; 3])> {
    let base = init_acc_limits(config)?;
    let caps = config.v_max.map(|vm| equal_caps(start, end, vm));
    let bounds = with_caps(&base, caps);
    Ok((pmm_traj_3d(start, end, &bounds)?, bounds))
}

/// Limited thrust decomposition with default options.
pub fn ltd_segment<S: Scalar>(start: &State3<S>, end: &State3<S>, config: &ThrustConfig<S>, eps_a: S) -> Result<LtdOutcome<S>> {
    ltd_segment_with(start, end, config, &LtdOptions::new(eps_a))
}

fn scale_limits<S: Scalar>(a: &[AxisBounds<S>; 3], s: S) -> [AxisBounds<S>; 3] {
    let mut out = *a;
    for b in out.iter_mut() {
        b.a_min = b.a_min * s;
        b.a_max = b.a_max * s;
    }
    out
}

/// Fallback when the decomposition cycles: scales all acceleration limits of
/// an iterate by one common factor, found by bisection, until the peak thrust
/// lands within `eps_a` of the budget. Returns the iterate unchanged as the
/// error when no such factor is found.
fn rescale<S: Scalar, F>(
    start: &State3<S>,
    end: &State3<S>,
    config: &ThrustConfig<S>,
    eps_a: S,
    collect: &F,
    from: LtdOutcome<S>,
) -> std::result::Result<LtdOutcome<S>, LtdOutcome<S>>
where
    F: Fn(&Segment3D<S>) -> Vec<ThrustCandidate<S>>,
{
    let probe = |s: S| -> Option<(Segment3D<S>, [AxisBounds<S>; 3], S)> {
        let bounds = scale_limits(&from.bounds, s);
        let seg = pmm_traj_3d(start, end, &bounds).ok()?;
        let peak = max_norm(&collect(&seg));
        Some((seg, bounds, peak))
    };
    let two = S::lit(2.0);
    let target = config.a_t_max;
    let under = from.max_thrust < target;
    let (mut lo, mut hi) = (S::one(), S::one());
    let mut found = false;
    for _ in 0..30 {
        if under { hi = hi * two } else { lo = lo / two }
        let s = if under { hi } else { lo };
        let Some((_, _, peak)) = probe(s) else { return Err(from) };
        if (peak > target) == under {
            found = true;
            break;
        }
        if under { lo = hi } else { hi = lo }
    }
    if !found {
        return Err(from);
    }
    for _ in 0..80 {
        let mid = (lo + hi) / two;
        let Some((segment, bounds, peak)) = probe(mid) else { return Err(from) };
        if (peak - target).abs() < eps_a {
            let iterations = from.iterations;
            return Ok(LtdOutcome { segment, bounds, iterations, converged: true, max_thrust: peak });
        }
        if peak < target { lo = mid } else { hi = mid }
    }
    Err(from)
}

fn max_norm<S: Scalar>(c: &[ThrustCandidate<S>]) -> S {
    c.iter().map(|c| c.norm).fold(S::zero(), S::max)
}

/// Limited thrust decomposition.
pub fn ltd_segment_with<S: Scalar>(
    start: &State3<S>,
    end: &State3<S>,
    config: &ThrustConfig<S>,
    options: &LtdOptions<S>,
) -> Result<LtdOutcome<S>> {
    if !(options.eps_a > S::zero()) {
        return Err(PlanError::InvalidArgument(format!("eps_a must be > 0 (got {})", options.eps_a)));
    }
    let mut accel = init_acc_limits(config)?;
    let required = boundary_speeds(start, end);
    let mut caps = config.v_max.map(|vm| initial_caps(start, end, vm));
    let collect = |seg: &Segment3D<S>| match options.candidates {
        CandidateSet::Switches => candidate_thrusts(seg, config).to_vec(),
        CandidateSet::Intervals => interval_thrusts(seg, config),
    };

    let mut bounds = with_caps(&accel, caps);
    let mut segment = pmm_traj_3d(start, end, &bounds)?;
    if segment.duration == S::zero() {
        let max_thrust = config.gravity().norm();
        return Ok(LtdOutcome { segment, bounds, iterations: 0, converged: true, max_thrust });
    }
    let mut cands = collect(&segment);
    let mut best: Option<LtdOutcome<S>> = None;
    let mut history: Vec<LtdOutcome<S>> = Vec::new();
    let mut iterations = 0;
    loop {
        let peak = max_norm(&cands);
        let outcome = LtdOutcome { segment: segment.clone(), bounds, iterations, converged: false, max_thrust: peak };
        if (peak - config.a_t_max).abs() < options.eps_a {
            return Ok(LtdOutcome { converged: true, ..outcome });
        }
        history.push(outcome.clone());
        // best-so-far: safe and fastest, otherwise least violating
        let safe = peak <= config.a_t_max + options.eps_a;
        let better = match &best {
            None => true,
            Some(b) => {
                let b_safe = b.max_thrust <= config.a_t_max + options.eps_a;
                match (safe, b_safe) {
                    (true, false) => true,
                    (false, true) => false,
                    (true, true) => outcome.segment.duration < b.segment.duration,
                    (false, false) => peak < b.max_thrust,
                }
            }
        };
        if better {
            best = Some(outcome);
        }
        if iterations >= options.max_iterations {
            let best = best.expect("at least one iterate");
            // the peak can jump where roles change, so try every iterate
            let rescaled = std::iter::once(best.clone())
                .chain(history)
                .filter_map(|from| rescale(start, end, config, options.eps_a, &collect, from).ok())
                .min_by(|a, b| a.segment.duration.partial_cmp(&b.segment.duration).unwrap());
            return Ok(rescaled.unwrap_or(best));
        }
        iterations += 1;
        let betas = scaling_factors(&cands, config)?;
        accel = new_acc_limits(&cands, &betas, &accel);
        if let Some(vm) = config.v_max {
            caps = Some(split_speed(segment.max_axis_speeds(), vm, required));
        }
        bounds = with_caps(&accel, caps);
        segment = pmm_traj_3d(start, end, &bounds)?;
        cands = collect(&segment);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DragParams, GRAVITY};
    use approx::assert_relative_eq;

    fn climb_config() -> ThrustConfig<f64> {
        ThrustConfig::new(3.5 * GRAVITY, GRAVITY, DragParams::none(), None).unwrap()
    }

    #[test]
    fn equal_limits_exhaust_the_budget() {
        let cfg = climb_config();
        let b = init_acc_limits(&cfg).unwrap();
        let a = b[0].a_max;
        assert_relative_eq!(a, 16.007, epsilon = 1e-3);
        assert_relative_eq!(b[2].a_min, -a - 2.0 * GRAVITY, epsilon = 1e-12);
        assert_relative_eq!(Vec3::new(a, a, a + GRAVITY).norm(), cfg.a_t_max, epsilon = 1e-9);
    }

    #[test]
    fn zero_gravity_splits_evenly() {
        let cfg = ThrustConfig::new(30.0, 0.0, DragParams::none(), None).unwrap();
        let b = init_acc_limits(&cfg).unwrap();
        assert_relative_eq!(b[0].a_max, 30.0 / 3f64.sqrt(), epsilon = 1e-12);
        assert_eq!(b[2].a_min, -b[2].a_max);
    }

    #[test]
    fn barely_hovering_platform_keeps_valid_limits() {
        let cfg = ThrustConfig::new(GRAVITY + 1e-6, GRAVITY, DragParams::none(), None).unwrap();
        let b = init_acc_limits(&cfg).unwrap();
        assert!(b[0].a_max > 0.0 && b[0].a_max < 1e-5);
        assert!(b[2].validate().is_ok());
    }

    #[test]
    fn beta_values() {
        let cfg = climb_config();
        let mk = |a: Vec3<f64>| ThrustCandidate { time: 0.0, a, v: Vec3::zeros(), drag: Vec3::zeros(), norm: 0.0 };
        let betas = scaling_factors(&[mk(Vec3::new(10.0, 0.0, 0.0)), mk(Vec3::new(0.0, 0.0, 16.01)), mk(Vec3::zeros())], &cfg).unwrap();
        assert_relative_eq!(betas[0].unwrap(), ((cfg.a_t_max.powi(2) - GRAVITY.powi(2)) / 100.0).sqrt(), epsilon = 1e-12);
        assert_relative_eq!(betas[1].unwrap(), (cfg.a_t_max - GRAVITY) / 16.01, epsilon = 1e-12);
        assert_eq!(betas[2], None);
        // a candidate already on the limit keeps its scale
        let on = mk(Vec3::new(0.0, 0.0, cfg.a_t_max - GRAVITY));
        assert_relative_eq!(scaling_factors(&[on], &cfg).unwrap()[0].unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn vertical_climb_converges_to_analytic_limits() {
        let cfg = climb_config();
        let s = State3::at_rest(Vec3::zeros());
        let e = State3::at_rest(Vec3::new(0.0, 0.0, 10.0));
        let out = ltd_segment(&s, &e, &cfg, 1e-2).unwrap();
        assert!(out.converged);
        assert_relative_eq!(out.bounds[2].a_max, 24.525, epsilon = 1e-9);
        assert_relative_eq!(out.bounds[2].a_min, -44.145, epsilon = 1e-9);
        let v1 = (2.0 * 10.0 * 24.525 * 44.145 / (24.525 + 44.145f64)).sqrt();
        assert_relative_eq!(out.segment.duration, v1 / 24.525 + v1 / 44.145, epsilon = 1e-9);
        assert_relative_eq!(out.segment.duration, 1.126, epsilon = 1e-3);
        for c in candidate_thrusts(&out.segment, &cfg) {
            assert_relative_eq!(c.norm, cfg.a_t_max, epsilon = 1e-9);
        }
    }

    #[test]
    fn motionless_request_needs_no_iterations() {
        let s = State3::at_rest(Vec3::new(1.0, 1.0, 1.0));
        let out = ltd_segment(&s, &s, &climb_config(), 1e-2).unwrap();
        assert_eq!(out.iterations, 0);
        assert_eq!(out.segment.duration, 0.0);
        let c = candidate_thrusts(&out.segment, &climb_config());
        assert!(c.iter().all(|c| c.a == Vec3::zeros() && (c.norm - GRAVITY).abs() < 1e-12));
    }

    #[test]
    fn proportional_speed_distribution() {
        let s = State3::at_rest(Vec3::zeros());
        let e = State3::at_rest(Vec3::new(3.0, 4.0, 0.0));
        let seg = pmm_traj_3d(&s, &e, &[AxisBounds::symmetric(10.0); 3]).unwrap();
        let vm = distribute_velocity_limit(&seg, 10.0);
        let peaks = seg.max_axis_speeds();
        assert_relative_eq!(vm.x() / vm.y(), peaks.x() / peaks.y(), epsilon = 1e-12);
        assert_relative_eq!(vm.z(), 1e-2, epsilon = 1e-15);
        let still = pmm_traj_3d(&s, &s, &[AxisBounds::symmetric(10.0); 3]).unwrap();
        let sym = distribute_velocity_limit(&still, 3f64.sqrt());
        assert_relative_eq!(sym.x(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(sym.z(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn speed_split() {
        let caps = split_speed(Vec3::new(3.0, 4.0, 0.0), 10.0, Vec3::zeros());
        assert_relative_eq!(caps.x(), 6.0, epsilon = 1e-5);
        assert_relative_eq!(caps.y(), 8.0, epsilon = 1e-5);
        assert_relative_eq!(caps.z(), 1e-2, epsilon = 1e-12);
        assert!(caps.norm() <= 10.0 + 1e-9);
        // a binding floor shrinks the other axes to keep the norm
        let fl = split_speed(Vec3::new(1.0, 0.0, 0.0), 10.0, Vec3::new(0.0, 6.0, 0.0));
        assert_relative_eq!(fl.norm(), 10.0, epsilon = 1e-9);
        assert!(fl.y() >= 6.0);
    }
}
