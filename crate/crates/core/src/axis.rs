//! Closed-form single-axis solvers.
//!
//! An axis moves from `(p0, v0)` to `(p2, v2)` with piecewise-constant
//! acceleration taken from `{a_min, a_max}` (bang-bang) or, when a speed
//! limit is active, `{a_min, 0, a_max}` with the zero phase cruising at
//! `±v_m` (bang-singular-bang).
//!
//! For an acceleration ordering `(a1, a2)` the peak velocity solves
//! `v1² = (2 a1 a2 d + a2 v0² - a1 v2²) / (a2 - a1)`, giving two roots per
//! ordering and four candidates overall. Synchronizing to a fixed duration
//! `T` scales both accelerations by `γ`; the scale cancels from
//! `d / T` and leaves a quadratic in `v1` alone.

use arrayvec::ArrayVec;

use crate::error::{PlanError, Result};
use crate::model::{AxisBounds, AxisProfile, AxisState, Phase, Role};
use crate::scalar::Scalar;

/// Which boundary velocity of a profile is being varied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VelocityEnd {
    Start,
    End,
}

/// Result of synchronizing an axis to a prescribed duration.
#[derive(Debug, Clone, PartialEq)]
pub struct SyncResult<S> {
    /// The stretched profile (role S, `γ` applied), `None` if no `γ ∈ (0, 1]` works.
    pub profile: Option<AxisProfile<S>>,
}

impl<S: Scalar> SyncResult<S> {
    pub fn is_feasible(&self) -> bool {
        self.profile.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientKind {
    /// Interior of a closed-form branch.
    Smooth,
    /// Branch switch: the one-sided derivative pointing toward shorter durations.
    OneSided,
    /// Zero-length axis, no meaningful derivative.
    Degenerate,
}

/// `∂T/∂v` of an axis duration with respect to one boundary velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DurationGradient<S> {
    pub value: S,
    pub kind: GradientKind,
}

/// Closed velocity interval `[lo, hi]`; either side may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityInterval<S> {
    pub lo: S,
    pub hi: S,
}

impl<S: Scalar> VelocityInterval<S> {
    pub fn unbounded() -> Self {
        VelocityInterval { lo: S::neg_infinity(), hi: S::infinity() }
    }

    pub fn contains(&self, v: S) -> bool {
        v >= self.lo && v <= self.hi
    }

    pub fn intersect(&self, other: &Self) -> Self {
        VelocityInterval { lo: self.lo.max(other.lo), hi: self.hi.min(other.hi) }
    }

    pub fn clip(&self, v: S) -> S {
        v.max(self.lo).min(self.hi)
    }
}

/// Identifies a closed-form branch: phase count, sign of the first
/// acceleration, sign of the velocity after the first phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Branch {
    pub phases: usize,
    pub accelerate_first: bool,
    pub peak_sign: i8,
}

impl Branch {
    pub fn of<S: Scalar>(profile: &AxisProfile<S>) -> Self {
        let v1 = profile.peak_velocity();
        let scale = S::one().max(profile.start.velocity.abs());
        let peak_sign = if v1.abs() <= S::REL_TOL * scale {
            0
        } else if v1 > S::zero() {
            1
        } else {
            -1
        };
        Branch {
            phases: profile.phases.len(),
            accelerate_first: profile.phases[0].acceleration > S::zero(),
            peak_sign,
        }
    }
}

fn two<S: Scalar>() -> S {
    S::lit(2.0)
}

fn half<S: Scalar>() -> S {
    S::lit(0.5)
}

/// Real roots of `a x² + b x + c`, numerically stable form.
pub(crate) fn quadratic_roots<S: Scalar>(a: S, b: S, c: S) -> ArrayVec<S, 2> {
    let mut out = ArrayVec::new();
    if a == S::zero() {
        if b != S::zero() {
            out.push(-c / b);
        }
        return out;
    }
    let mut disc = b * b - S::lit(4.0) * a * c;
    if disc < S::zero() {
        let scale = b * b + (S::lit(4.0) * a * c).abs();
        if disc >= -S::lit(64.0) * S::epsilon() * scale {
            disc = S::zero();
        } else {
            return out;
        }
    }
    let sq = disc.sqrt();
    let q = -half::<S>() * (b + if b >= S::zero() { sq } else { -sq });
    if q == S::zero() {
        out.push(S::zero());
        out.push(S::zero());
        return out;
    }
    out.push(q / a);
    out.push(c / q);
    out
}

/// Accepts `t ≥ -tol` and clamps it to zero.
fn accept_time<S: Scalar>(t: S, tol: S) -> Option<S> {
    if t.is_finite() && t >= -tol {
        Some(t.max(S::zero()))
    } else {
        None
    }
}

fn time_tol<S: Scalar>(scale: S) -> S {
    S::TIME_TOL * S::one().max(scale.abs())
}

fn orderings<S: Scalar>(b: &AxisBounds<S>) -> [(S, S); 2] {
    [(b.a_max, b.a_min), (b.a_min, b.a_max)]
}

/// Acceleration bound that moves velocity from `from` to `to`.
fn toward<S: Scalar>(b: &AxisBounds<S>, from: S, to: S) -> S {
    if to >= from {
        b.a_max
    } else {
        b.a_min
    }
}

fn within_speed<S: Scalar>(v: S, v_m: Option<S>) -> bool {
    match v_m {
        Some(vm) => v.abs() <= vm * (S::one() + S::REL_TOL) + S::REL_TOL,
        None => true,
    }
}

fn check_inputs<S: Scalar>(start: &AxisState<S>, end: &AxisState<S>, bounds: &AxisBounds<S>) -> Result<()> {
    bounds.validate()?;
    if !start.is_finite() || !end.is_finite() {
        return Err(PlanError::InvalidArgument("axis states must be finite".into()));
    }
    if !within_speed(start.velocity, bounds.v_m) || !within_speed(end.velocity, bounds.v_m) {
        return Err(PlanError::InvalidArgument(format!(
            "boundary velocities {} / {} exceed axis speed limit {:?}",
            start.velocity, end.velocity, bounds.v_m
        )));
    }
    Ok(())
}

fn is_zero_length<S: Scalar>(start: &AxisState<S>, end: &AxisState<S>) -> bool {
    start.position == end.position && start.velocity == S::zero() && end.velocity == S::zero()
}

/// Every full-acceleration (`γ = 1`) profile joining `start` to `end`:
/// up to four bang-bang roots plus up to two bang-singular-bang cruises.
pub fn gamma_one_candidates<S: Scalar>(
    start: &AxisState<S>,
    end: &AxisState<S>,
    bounds: &AxisBounds<S>,
) -> ArrayVec<AxisProfile<S>, 6> {
    let mut out = ArrayVec::new();
    let d = end.position - start.position;
    let (v0, v2) = (start.velocity, end.velocity);
    for (a1, a2) in orderings(bounds) {
        let k = a2 - a1;
        let mut q = (two::<S>() * a1 * a2 * d + a2 * v0 * v0 - a1 * v2 * v2) / k;
        let q_tol = S::lit(8.0) * S::epsilon() * (v0 * v0 + v2 * v2 + (two::<S>() * a1 * d).abs() + (two::<S>() * a2 * d).abs());
        if q < S::zero() {
            if q >= -q_tol {
                q = S::zero();
            } else {
                continue;
            }
        }
        let r = q.sqrt();
        // sqrt amplifies rounding in q near zero
        let r_err = if r > S::zero() { (q_tol / r).min(q_tol.sqrt()) } else { q_tol.sqrt() };
        let roots: ArrayVec<S, 2> = if r == S::zero() { [r].into_iter().collect() } else { [r, -r].into_iter().collect() };
        for v1 in roots {
            if !within_speed(v1, bounds.v_m) {
                continue;
            }
            let t1 = (v1 - v0) / a1;
            let t2 = (v2 - v1) / a2;
            let tol = time_tol(t1.abs() + t2.abs()) + r_err / a1.abs().min(a2.abs());
            if let (Some(t1), Some(t2)) = (accept_time(t1, tol), accept_time(t2, tol)) {
                out.push(AxisProfile::bang_bang(*start, Phase::new(t1, a1), Phase::new(t2, a2)));
            }
        }
    }
    if let Some(vm) = bounds.v_m {
        for vc in [vm, -vm] {
            let a1 = toward(bounds, v0, vc);
            let a2 = toward(bounds, vc, v2);
            let t1 = ((vc - v0) / a1).max(S::zero());
            let t2 = ((v2 - vc) / a2).max(S::zero());
            let cruise_dist = d - (vc * vc - v0 * v0) / (two::<S>() * a1) - (v2 * v2 - vc * vc) / (two::<S>() * a2);
            let ts = cruise_dist / vc;
            if let Some(ts) = accept_time(ts, time_tol(t1 + t2 + ts.abs())) {
                out.push(AxisProfile::bang_singular_bang(*start, Phase::new(t1, a1), ts, Phase::new(t2, a2)));
            }
        }
    }
    out
}

/// Folds phases of round-off length into the longest phase so that no
/// phantom acceleration is reported at a switch.
fn tidy<S: Scalar>(mut p: AxisProfile<S>) -> AxisProfile<S> {
    let total = p.duration();
    let tiny = S::lit(1e3) * S::epsilon() * S::one().max(total);
    let mut spare = S::zero();
    for ph in p.phases.iter_mut() {
        if ph.duration > S::zero() && ph.duration <= tiny {
            spare = spare + ph.duration;
            ph.duration = S::zero();
        }
    }
    if spare > S::zero() {
        if let Some(ph) = p.phases.iter_mut().max_by(|a, b| a.duration.partial_cmp(&b.duration).unwrap()) {
            ph.duration = ph.duration + spare;
        }
    }
    p
}

/// Picks the shortest profile; near-ties keep the earlier candidate
/// (accelerate-first bang-bang is generated first).
fn fastest<S: Scalar>(cands: impl IntoIterator<Item = AxisProfile<S>>) -> Option<AxisProfile<S>> {
    let mut best: Option<(S, AxisProfile<S>)> = None;
    for c in cands {
        let t = c.duration();
        match &best {
            Some((bt, _)) if t >= *bt - S::REL_TOL * S::one().max(*bt) => {}
            _ => best = Some((t, c)),
        }
    }
    best.map(|(_, p)| tidy(p))
}

/// Minimum-time profile between two axis states.
pub fn solve_min_time<S: Scalar>(
    start: &AxisState<S>,
    end: &AxisState<S>,
    bounds: &AxisBounds<S>,
) -> Result<AxisProfile<S>> {
    check_inputs(start, end, bounds)?;
    min_time_unchecked(start, end, bounds)
}

pub(crate) fn min_time_unchecked<S: Scalar>(
    start: &AxisState<S>,
    end: &AxisState<S>,
    bounds: &AxisBounds<S>,
) -> Result<AxisProfile<S>> {
    if is_zero_length(start, end) {
        let mut p = AxisProfile::stationary(*start, bounds.a_max, bounds.a_min);
        p.role = Role::Synced;
        return Ok(p);
    }
    fastest(gamma_one_candidates(start, end, bounds)).ok_or_else(|| {
        PlanError::Infeasible(format!(
            "no bang-bang candidate from ({}, {}) to ({}, {})",
            start.position, start.velocity, end.position, end.velocity
        ))
    })
}

/// Profile that coasts at constant velocity for `duration`; three phases
/// when a speed limit is active so the structure matches cruise profiles.
fn coast<S: Scalar>(start: &AxisState<S>, duration: S, bounds: &AxisBounds<S>) -> AxisProfile<S> {
    let mut p = if bounds.v_m.is_some() {
        AxisProfile::bang_singular_bang(*start, Phase::new(S::zero(), S::zero()), duration, Phase::new(S::zero(), S::zero()))
    } else {
        AxisProfile::bang_bang(*start, Phase::new(S::zero(), S::zero()), Phase::new(duration, S::zero()))
    };
    p.role = Role::Synced;
    // the γ → 0⁺ limit
    p.gamma = S::min_positive_value();
    p
}

/// Stretches an axis to exactly `duration` by scaling its accelerations with
/// the largest feasible `γ ∈ (0, 1]`.
pub fn solve_sync<S: Scalar>(
    start: &AxisState<S>,
    end: &AxisState<S>,
    bounds: &AxisBounds<S>,
    duration: S,
) -> Result<SyncResult<S>> {
    check_inputs(start, end, bounds)?;
    if !(duration >= S::zero()) || !duration.is_finite() {
        return Err(PlanError::InvalidArgument(format!("target duration must be >= 0 (got {duration})")));
    }
    Ok(sync_unchecked(start, end, bounds, duration))
}

pub(crate) fn sync_unchecked<S: Scalar>(
    start: &AxisState<S>,
    end: &AxisState<S>,
    bounds: &AxisBounds<S>,
    duration: S,
) -> SyncResult<S> {
    let t = duration;
    let d = end.position - start.position;
    let (v0, v2) = (start.velocity, end.velocity);
    let vscale = S::one().max(v0.abs()).max(v2.abs());
    let dscale = S::one().max(d.abs());

    // a full-acceleration candidate already matching the duration wins outright
    let exact = gamma_one_candidates(start, end, bounds)
        .into_iter()
        .filter(|c| (c.duration() - t).abs() <= S::REL_TOL * S::one().max(t))
        .min_by(|a, b| (a.duration() - t).abs().partial_cmp(&(b.duration() - t).abs()).unwrap());
    if let Some(mut p) = exact {
        // absorb the rounding difference into the longest phase
        let diff = t - p.duration();
        if let Some(ph) = p.phases.iter_mut().max_by(|a, b| a.duration.partial_cmp(&b.duration).unwrap()) {
            ph.duration = (ph.duration + diff).max(S::zero());
        }
        p.role = Role::Synced;
        return SyncResult { profile: Some(tidy(p)) };
    }

    if (v2 - v0).abs() <= S::REL_TOL * vscale && (d - v0 * t).abs() <= S::REL_TOL * dscale {
        return SyncResult { profile: Some(coast(start, t, bounds)) };
    }
    if t <= S::zero() {
        return SyncResult { profile: None };
    }

    let mut best: Option<AxisProfile<S>> = None;
    let reach = S::lit(1e3) * S::REL_TOL;
    let mut consider = |p: AxisProfile<S>| {
        // near-zero roots of the γ quadratic can be cancellation artifacts
        let e = p.end();
        if (e.position - end.position).abs() > reach * dscale || (e.velocity - v2).abs() > reach * vscale {
            return;
        }
        if best.as_ref().map_or(true, |b| p.gamma > b.gamma) {
            best = Some(p);
        }
    };
    let tol = time_tol(t);
    let gamma_cap = S::one() + S::REL_TOL;

    for (a1, a2) in orderings(bounds) {
        let k = a2 - a1;
        let c = t * (a1 * v2 * v2 - a2 * v0 * v0) + two::<S>() * d * (a2 * v0 - a1 * v2);
        for v1 in quadratic_roots(t * k, -two::<S>() * d * k, c) {
            if !within_speed(v1, bounds.v_m) {
                continue;
            }
            let u = v1 - v0;
            let w = v2 - v1;
            let gamma = (u / a1 + w / a2) / t;
            if !(gamma > S::epsilon()) || gamma > gamma_cap {
                continue;
            }
            let gamma = gamma.min(S::one());
            let (Some(t1), Some(t2)) = (accept_time(u / (gamma * a1), tol), accept_time(w / (gamma * a2), tol)) else {
                continue;
            };
            let t2 = (t - t1).max(S::zero()).min(t2 + tol);
            let mut p = AxisProfile::bang_bang(*start, Phase::new(t1, gamma * a1), Phase::new(t - t1, gamma * a2));
            if (t1 + t2 - t).abs() > tol {
                continue;
            }
            p.role = Role::Synced;
            p.gamma = gamma;
            consider(p);
        }
    }

    if let Some(vm) = bounds.v_m {
        for vc in [vm, -vm] {
            let a1 = toward(bounds, v0, vc);
            let a2 = toward(bounds, vc, v2);
            let b = (v2 - vc) * (v2 - vc) / (two::<S>() * a2) - (vc - v0) * (vc - v0) / (two::<S>() * a1);
            let denom = d - vc * t;
            if denom == S::zero() {
                continue;
            }
            let gamma = b / denom;
            if !(gamma > S::epsilon()) || gamma > gamma_cap {
                continue;
            }
            let gamma = gamma.min(S::one());
            let t1 = ((vc - v0) / (gamma * a1)).max(S::zero());
            let t2 = ((v2 - vc) / (gamma * a2)).max(S::zero());
            let Some(ts) = accept_time(t - t1 - t2, tol) else {
                continue;
            };
            let mut p = AxisProfile::bang_singular_bang(*start, Phase::new(t1, gamma * a1), ts, Phase::new(t2, gamma * a2));
            p.role = Role::Synced;
            p.gamma = gamma;
            consider(p);
        }
    }
    SyncResult { profile: best.map(tidy) }
}

/// Shortest full-acceleration duration strictly above `duration`: the edge
/// of the nearest feasible synchronization interval.
pub fn min_feasible_duration_above<S: Scalar>(
    start: &AxisState<S>,
    end: &AxisState<S>,
    bounds: &AxisBounds<S>,
    duration: S,
) -> Result<S> {
    if solve_sync(start, end, bounds, duration)?.is_feasible() {
        return Err(PlanError::InvalidArgument(format!(
            "axis is already synchronizable at {duration} s"
        )));
    }
    duration_above_unchecked(start, end, bounds, duration)
}

pub(crate) fn duration_above_unchecked<S: Scalar>(
    start: &AxisState<S>,
    end: &AxisState<S>,
    bounds: &AxisBounds<S>,
    duration: S,
) -> Result<S> {
    let floor = duration + S::REL_TOL * S::one().max(duration);
    gamma_one_candidates(start, end, bounds)
        .iter()
        .map(|c| c.duration())
        .filter(|t| *t > floor)
        .fold(None, |acc: Option<S>, t| Some(acc.map_or(t, |a| a.min(t))))
        .ok_or_else(|| PlanError::Infeasible(format!("no full-acceleration duration above {duration} s")))
}

/// Analytic `∂T/∂v` on the branch of a full-acceleration profile.
/// `None` when the branch is singular (bang-bang peak velocity at zero).
pub fn profile_gradient<S: Scalar>(profile: &AxisProfile<S>, wrt: VelocityEnd) -> Option<S> {
    let v0 = profile.start.velocity;
    let v2 = profile.end().velocity;
    let v1 = profile.peak_velocity();
    if profile.is_singular() {
        let a1 = profile.phases[0].acceleration;
        let a2 = profile.phases[2].acceleration;
        return Some(match wrt {
            VelocityEnd::Start => (v0 - v1) / (a1 * v1),
            VelocityEnd::End => (v1 - v2) / (a2 * v1),
        });
    }
    let a1 = profile.phases[0].acceleration;
    let a2 = profile.phases[1].acceleration;
    if a1 == S::zero() || a2 == S::zero() || v1.abs() <= S::epsilon() * S::one().max(v0.abs().max(v2.abs())) {
        return None;
    }
    let k = a2 - a1;
    Some(match wrt {
        VelocityEnd::Start => {
            let dv1 = a2 * v0 / (k * v1);
            (dv1 - S::one()) / a1 - dv1 / a2
        }
        VelocityEnd::End => {
            let dv1 = -a1 * v2 / (k * v1);
            dv1 * (S::one() / a1 - S::one() / a2) + S::one() / a2
        }
    })
}

fn with_velocity<S: Scalar>(
    start: &AxisState<S>,
    end: &AxisState<S>,
    wrt: VelocityEnd,
    v: S,
) -> (AxisState<S>, AxisState<S>) {
    match wrt {
        VelocityEnd::Start => (AxisState::new(start.position, v), *end),
        VelocityEnd::End => (*start, AxisState::new(end.position, v)),
    }
}

fn is_branch_interior<S: Scalar>(profile: &AxisProfile<S>) -> bool {
    if profile.is_singular() {
        return true;
    }
    let tol = S::lit(1e3) * time_tol(profile.duration());
    profile.phases.iter().all(|p| p.duration > tol)
}

/// `∂T/∂v` of the minimum-time duration.
///
/// At a branch switch (a phase of zero length) the derivative is one-sided;
/// the side along which the duration decreases is returned.
pub fn duration_gradient<S: Scalar>(
    start: &AxisState<S>,
    end: &AxisState<S>,
    bounds: &AxisBounds<S>,
    wrt: VelocityEnd,
) -> Result<DurationGradient<S>> {
    check_inputs(start, end, bounds)?;
    if is_zero_length(start, end) {
        return Ok(DurationGradient { value: S::zero(), kind: GradientKind::Degenerate });
    }
    let profile = min_time_unchecked(start, end, bounds)?;
    if is_branch_interior(&profile) {
        if let Some(g) = profile_gradient(&profile, wrt) {
            return Ok(DurationGradient { value: g, kind: GradientKind::Smooth });
        }
    }
    let v = match wrt {
        VelocityEnd::Start => start.velocity,
        VelocityEnd::End => end.velocity,
    };
    let delta = S::lit(1e-7) * S::one().max(v.abs());
    let side = |dv: S| -> Option<S> {
        let (s, e) = with_velocity(start, end, wrt, v + dv);
        if !within_speed(v + dv, bounds.v_m) {
            return None;
        }
        let p = min_time_unchecked(&s, &e, bounds).ok()?;
        profile_gradient(&p, wrt)
    };
    let right = side(delta);
    let left = side(-delta);
    let value = match (left, right) {
        (l, Some(r)) if r < S::zero() && l.map_or(true, |l| l <= -r) => r,
        (Some(l), _) if l > S::zero() => l,
        _ => S::zero(),
    };
    Ok(DurationGradient { value, kind: GradientKind::OneSided })
}

/// Brackets `current` between the nearest breakpoints, deciding about a
/// breakpoint that coincides with `current` by probing each side.
fn bracket<S: Scalar>(
    mut points: Vec<S>,
    current: S,
    feasible_at: impl Fn(S) -> bool,
) -> VelocityInterval<S> {
    points.retain(|p| p.is_finite());
    let tol = S::lit(1e-9).max(S::REL_TOL) * S::one().max(current.abs());
    let mut out = VelocityInterval::<S>::unbounded();
    for p in &points {
        if *p < current - tol {
            out.lo = out.lo.max(*p);
        } else if *p > current + tol {
            out.hi = out.hi.min(*p);
        }
    }
    if points.iter().any(|p| (*p - current).abs() <= tol) {
        let step = S::lit(1e-6) * S::one().max(current.abs());
        if !feasible_at(current + step) {
            out.hi = current;
        }
        if !feasible_at(current - step) {
            out.lo = current;
        }
    }
    out
}

/// Reverses time: `q(τ) = p(T - τ)` has the same acceleration bounds and
/// negated velocities, turning a free start velocity into a free end velocity.
fn reversed<S: Scalar>(start: &AxisState<S>, end: &AxisState<S>) -> (AxisState<S>, AxisState<S>) {
    (AxisState::new(end.position, -end.velocity), AxisState::new(start.position, -start.velocity))
}

/// End velocities for which a full-acceleration profile of exactly `duration` exists.
fn free_end_breakpoints<S: Scalar>(v0: S, d: S, duration: S, bounds: &AxisBounds<S>) -> Vec<S> {
    let t = duration;
    let tol = time_tol(t);
    let mut out = Vec::new();
    for (a1, a2) in orderings(bounds) {
        let qa = half::<S>() * (a2 - a1);
        let qb = (a1 - a2) * t;
        let qc = v0 * t + half::<S>() * a2 * t * t - d;
        for t1 in quadratic_roots(qa, qb, qc) {
            if t1 < -tol || t1 > t + tol {
                continue;
            }
            let t1 = t1.max(S::zero()).min(t);
            let v1 = v0 + a1 * t1;
            let v2 = v1 + a2 * (t - t1);
            if within_speed(v1, bounds.v_m) && within_speed(v2, bounds.v_m) {
                out.push(v2);
            }
        }
    }
    if let Some(vm) = bounds.v_m {
        out.push(vm);
        out.push(-vm);
        for vc in [vm, -vm] {
            let a1 = toward(bounds, v0, vc);
            let t1 = ((vc - v0) / a1).max(S::zero());
            let rem = t - t1;
            if rem < -tol {
                continue;
            }
            let base = d - (vc * vc - v0 * v0) / (two::<S>() * a1) - vc * rem;
            for a2 in [bounds.a_min, bounds.a_max] {
                let t2sq = two::<S>() * base / a2;
                if t2sq < S::zero() {
                    continue;
                }
                let t2 = t2sq.sqrt();
                if t2 <= rem + tol {
                    let v2 = vc + a2 * t2;
                    if within_speed(v2, bounds.v_m) {
                        out.push(v2);
                    }
                }
            }
        }
    }
    out
}

/// Range of one boundary velocity over which a synchronized (S) profile
/// keeps its duration with `γ ≤ 1`.
pub fn s_limit_velocities<S: Scalar>(
    profile: &AxisProfile<S>,
    bounds: &AxisBounds<S>,
    which_end: VelocityEnd,
    current_v: S,
) -> VelocityInterval<S> {
    let start = profile.start;
    let end = profile.end();
    let duration = profile.duration();
    let feasible_at = |v: S| {
        if !within_speed(v, bounds.v_m) {
            return false;
        }
        let (s, e) = with_velocity(&start, &end, which_end, v);
        sync_unchecked(&s, &e, bounds, duration).is_feasible()
    };
    match which_end {
        VelocityEnd::End => {
            let pts = free_end_breakpoints(start.velocity, end.position - start.position, duration, bounds);
            bracket(pts, current_v, feasible_at)
        }
        VelocityEnd::Start => {
            let (rs, re) = reversed(&start, &end);
            let pts: Vec<S> = free_end_breakpoints(rs.velocity, re.position - rs.position, duration, bounds)
                .into_iter()
                .map(|v| -v)
                .collect();
            bracket(pts, current_v, feasible_at)
        }
    }
}

/// End velocities at which some sub-phase duration of a minimum-time
/// profile changes sign or the peak-velocity root switches.
fn free_end_kinks<S: Scalar>(v0: S, d: S, bounds: &AxisBounds<S>) -> Vec<S> {
    let mut sq = Vec::new();
    for (a1, a2) in orderings(bounds) {
        sq.push(v0 * v0 + two::<S>() * a2 * d);
        sq.push(v0 * v0 + two::<S>() * a1 * d);
        sq.push((two::<S>() * a1 * a2 * d + a2 * v0 * v0) / a1);
        if let Some(vm) = bounds.v_m {
            sq.push((two::<S>() * a1 * a2 * d + a2 * v0 * v0 - (a2 - a1) * vm * vm) / a1);
        }
    }
    if let Some(vm) = bounds.v_m {
        for vc in [vm, -vm] {
            let a1 = toward(bounds, v0, vc);
            for a2 in [bounds.a_min, bounds.a_max] {
                sq.push(vc * vc + two::<S>() * a2 * (d - (vc * vc - v0 * v0) / (two::<S>() * a1)));
            }
        }
    }
    let mut out: Vec<S> = sq
        .into_iter()
        .filter(|s| *s >= S::zero())
        .flat_map(|s| {
            let r = s.sqrt();
            [r, -r]
        })
        .filter(|v| within_speed(*v, bounds.v_m))
        .collect();
    if let Some(vm) = bounds.v_m {
        out.push(vm);
        out.push(-vm);
    }
    out
}

/// Range of one boundary velocity over which a dictating (M) profile stays on
/// its current closed-form branch with non-negative sub-phase durations.
pub fn m_limit_velocities<S: Scalar>(
    profile: &AxisProfile<S>,
    bounds: &AxisBounds<S>,
    which_end: VelocityEnd,
    current_v: S,
) -> VelocityInterval<S> {
    let start = profile.start;
    let end = profile.end();
    let branch = Branch::of(profile);
    let is_min_time = min_time_unchecked(&start, &end, bounds)
        .map(|p| (p.duration() - profile.duration()).abs() <= S::lit(1e3) * S::REL_TOL * S::one().max(profile.duration()))
        .unwrap_or(false);
    let same_branch = |v: S| -> bool {
        if !within_speed(v, bounds.v_m) {
            return false;
        }
        let (s, e) = with_velocity(&start, &end, which_end, v);
        if is_min_time {
            min_time_unchecked(&s, &e, bounds).map(|p| Branch::of(&p) == branch).unwrap_or(false)
        } else {
            gamma_one_candidates(&s, &e, bounds).iter().any(|p| Branch::of(p) == branch)
        }
    };
    let raw = match which_end {
        VelocityEnd::End => free_end_kinks(start.velocity, end.position - start.position, bounds),
        VelocityEnd::Start => {
            let (rs, re) = reversed(&start, &end);
            free_end_kinks(rs.velocity, re.position - rs.position, bounds).into_iter().map(|v| -v).collect()
        }
    };
    // keep only points where the branch actually changes
    let pts: Vec<S> = raw
        .into_iter()
        .filter(|c| {
            if bounds.v_m.is_some_and(|vm| (c.abs() - vm).abs() <= S::REL_TOL * vm) {
                return true;
            }
            let delta = S::lit(1e-7) * S::one().max(c.abs());
            let sig = |v: S| {
                let (s, e) = with_velocity(&start, &end, which_end, v);
                min_time_unchecked(&s, &e, bounds).ok().map(|p| Branch::of(&p))
            };
            !within_speed(*c + delta, bounds.v_m)
                || !within_speed(*c - delta, bounds.v_m)
                || sig(*c - delta) != sig(*c + delta)
        })
        .collect();
    bracket(pts, current_v, same_branch)
}
