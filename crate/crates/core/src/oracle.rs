//! Independent checks: finite differences, a brute-force velocity search and
//! trajectory replay validation.
//!
//! Nothing here relies on the analytic gradients or on the velocity-limit
//! brackets used by the optimizer.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::axis::{solve_min_time, VelocityEnd};
use crate::error::{PlanError, Result};
use crate::eval::thrust_and_speed_envelope;
use crate::model::{AxisBounds, AxisProfile, AxisState, ThrustConfig, Trajectory};
use crate::scalar::{Scalar, Vec3};
use crate::velocity::{plan_segment, PlanMode, WaypointPath};
use crate::model::State3;

/// Central finite difference of the minimum duration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdGradient<S> {
    pub value: S,
    /// False when the solution structure differs across `[v - h, v + h]`.
    pub reliable: bool,
}

fn shape<S: Scalar>(p: &AxisProfile<S>, floor: S) -> (usize, bool, i8, bool) {
    let v1 = p.peak_velocity();
    let sign = if v1 > floor { 1 } else if v1 < -floor { -1 } else { 0 };
    let thin = p.phases.iter().any(|ph| ph.duration <= floor);
    (p.phases.len(), p.phases[0].acceleration > S::zero(), sign, thin)
}

/// `(T(v + h) - T(v - h)) / 2h` for one boundary velocity.
pub fn fd_gradient<S: Scalar>(
    start: &AxisState<S>,
    end: &AxisState<S>,
    bounds: &AxisBounds<S>,
    wrt: VelocityEnd,
    h: S,
) -> Result<FdGradient<S>> {
    if !(h > S::zero()) {
        return Err(PlanError::InvalidArgument(format!("step must be > 0 (got {h})")));
    }
    let at = |dv: S| {
        let (s, e) = match wrt {
            VelocityEnd::Start => (AxisState::new(start.position, start.velocity + dv), *end),
            VelocityEnd::End => (*start, AxisState::new(end.position, end.velocity + dv)),
        };
        solve_min_time(&s, &e, bounds)
    };
    let (lo, mid, hi) = (at(-h)?, at(S::zero())?, at(h)?);
    let value = (hi.duration() - lo.duration()) / (S::lit(2.0) * h);
    let floor = S::lit(10.0) * h;
    let (a, b, c) = (shape(&lo, floor), shape(&mid, floor), shape(&hi, floor));
    let reliable = a == b && b == c && !b.3;
    Ok(FdGradient { value, reliable })
}

/// Candidate grid of the velocity search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchGrid {
    /// Directions on a Fibonacci sphere.
    pub directions: usize,
    /// Magnitude levels on a geometric ladder below the reachable speed.
    pub magnitudes: usize,
    /// Ratio between consecutive magnitude levels.
    pub ratio: f64,
    /// Stop starting new stages after this long.
    pub budget: Duration,
}

impl Default for SearchGrid {
    fn default() -> Self {
        SearchGrid { directions: 32, magnitudes: 8, ratio: 0.7, budget: Duration::from_secs(60) }
    }
}

/// Best velocity assignment found by [`sampled_velocity_search`].
#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult<S> {
    pub velocities: Vec<Vec3<S>>,
    pub duration: S,
    pub segments_planned: usize,
    /// The budget ran out before the refinement stage finished.
    pub budget_exceeded: bool,
}

/// Unit directions spread evenly over the sphere.
pub fn fibonacci_sphere<S: Scalar>(n: usize) -> Vec<Vec3<S>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * k as f64;
            Vec3::new(S::lit(r * phi.cos()), S::lit(r * phi.sin()), S::lit(z))
        })
        .collect()
}

/// Minimum-duration velocity assignment over per-waypoint candidate sets.
///
/// Segment durations depend only on their two boundary velocities, so the
/// best combination is found exactly by dynamic programming over waypoints.
fn best_combination<S: Scalar>(
    path: &WaypointPath<S>,
    mode: &PlanMode<S>,
    cands: &[Vec<Vec3<S>>],
) -> (Vec<Vec3<S>>, S, usize) {
    let n = path.waypoints.len();
    let mut cost: Vec<S> = vec![S::zero(); cands[0].len()];
    let mut back: Vec<Vec<usize>> = Vec::with_capacity(n);
    back.push(vec![0; cands[0].len()]);
    let mut planned = 0;
    for j in 1..n {
        let prev = &cands[j - 1];
        let cur = &cands[j];
        let layer: Vec<(S, usize)> = cur
            .par_iter()
            .map(|vb| {
                let mut best = (S::infinity(), 0usize);
                for (a, va) in prev.iter().enumerate() {
                    if !cost[a].is_finite() {
                        continue;
                    }
                    let s = State3::new(path.waypoints[j - 1], *va);
                    let e = State3::new(path.waypoints[j], *vb);
                    let t = plan_segment(mode, &s, &e).map(|p| p.duration()).unwrap_or(S::infinity());
                    let total = cost[a] + t;
                    if total < best.0 {
                        best = (total, a);
                    }
                }
                best
            })
            .collect();
        planned += prev.len() * cur.len();
        cost = layer.iter().map(|c| c.0).collect();
        back.push(layer.iter().map(|c| c.1).collect());
    }
    let (mut idx, best) = cost
        .iter()
        .enumerate()
        .fold((0, S::infinity()), |acc, (i, c)| if *c < acc.1 { (i, *c) } else { acc });
    let mut out = vec![Vec3::zeros(); n];
    for j in (0..n).rev() {
        out[j] = cands[j][idx];
        idx = back[j][idx];
    }
    (out, best, planned)
}

fn reachable_speed<S: Scalar>(path: &WaypointPath<S>, j: usize, config: &ThrustConfig<S>) -> S {
    let lp = (path.waypoints[j] - path.waypoints[j - 1]).norm();
    let ln = (path.waypoints[j + 1] - path.waypoints[j]).norm();
    let a = config.a_t_max + config.g;
    let mut top = (S::lit(2.0) * a * lp.min(ln)).sqrt();
    if let Some(vm) = config.v_max {
        top = top.min(vm);
    }
    top
}

/// Orthonormal pair spanning the plane normal to `u`.
fn normal_pair<S: Scalar>(u: &Vec3<S>) -> (Vec3<S>, Vec3<S>) {
    let helper = if u.x().abs() < S::lit(0.9) { Vec3::new(S::one(), S::zero(), S::zero()) } else { Vec3::new(S::zero(), S::one(), S::zero()) };
    let a = u.cross(&helper).normalized().expect("non-parallel helper");
    let b = u.cross(&a);
    (a, b)
}

fn cap_speed<S: Scalar>(v: Vec3<S>, v_max: Option<S>) -> Vec3<S> {
    match v_max {
        Some(vm) if v.norm() > vm => v * (vm / v.norm()),
        _ => v,
    }
}

/// Exhaustive search over sampled via-waypoint velocities (directions ×
/// magnitudes plus zero), followed by one local refinement around the
/// incumbent.
pub fn sampled_velocity_search<S: Scalar>(
    path: &WaypointPath<S>,
    mode: &PlanMode<S>,
    grid: &SearchGrid,
) -> Result<SearchResult<S>> {
    path.validate()?;
    let clock = Instant::now();
    let n = path.waypoints.len();
    let config = *mode.config();
    let dirs = fibonacci_sphere::<S>(grid.directions);
    let mut cands: Vec<Vec<Vec3<S>>> = Vec::with_capacity(n);
    cands.push(vec![path.v_start]);
    for j in 1..n - 1 {
        let top = reachable_speed(path, j, &config);
        let mut set = vec![Vec3::zeros()];
        for k in 0..grid.magnitudes {
            let m = top * S::lit(grid.ratio.powi(k as i32));
            set.extend(dirs.iter().map(|d| *d * m));
        }
        cands.push(set);
    }
    cands.push(vec![path.v_end]);
    let (mut best_v, mut best_t, mut planned) = best_combination(path, mode, &cands);
    if !best_t.is_finite() {
        return Err(PlanError::Infeasible("no sampled velocity assignment could be planned".into()));
    }
    if n == 2 {
        return Ok(SearchResult { velocities: best_v, duration: best_t, segments_planned: planned, budget_exceeded: false });
    }
    let mut budget_exceeded = clock.elapsed() > grid.budget;
    if !budget_exceeded {
        let mut local: Vec<Vec<Vec3<S>>> = Vec::with_capacity(n);
        local.push(vec![path.v_start]);
        for j in 1..n - 1 {
            let v = best_v[j];
            let speed = v.norm();
            let mut set = vec![v];
            let base = if speed > S::zero() { speed } else { reachable_speed(path, j, &config) * S::lit(0.1) };
            let dir0 = v.normalized().unwrap_or(Vec3::new(S::one(), S::zero(), S::zero()));
            let (e1, e2) = normal_pair(&dir0);
            let mut local_dirs = vec![dir0];
            for tilt in [0.08f64, 0.16] {
                for k in 0..8 {
                    let ang = std::f64::consts::TAU * k as f64 / 8.0;
                    let off = e1 * S::lit(ang.cos()) + e2 * S::lit(ang.sin());
                    local_dirs.push((dir0 * S::lit(tilt.cos()) + off * S::lit(tilt.sin())).normalized().expect("unit"));
                }
            }
            for scale in [0.8, 0.9, 1.0, 1.1, 1.2] {
                for d in &local_dirs {
                    set.push(cap_speed(*d * (base * S::lit(scale)), config.v_max));
                }
            }
            local.push(set);
        }
        local.push(vec![path.v_end]);
        let (v, t, p) = best_combination(path, mode, &local);
        planned += p;
        if t < best_t {
            best_v = v;
            best_t = t;
        }
        budget_exceeded = clock.elapsed() > grid.budget;
    }
    Ok(SearchResult { velocities: best_v, duration: best_t, segments_planned: planned, budget_exceeded })
}

/// Per-segment findings of [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentCheck<S> {
    pub index: usize,
    /// Replayed end vs next start / waypoint, relative to `max(1, ‖p‖)`.
    pub position_gap: S,
    pub velocity_gap: S,
    /// Largest difference between an axis duration and the segment duration.
    pub duration_gap: S,
}

/// Replay and constraint measurements of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport<S> {
    pub max_position_gap: S,
    pub max_velocity_gap: S,
    pub max_duration_gap: S,
    /// `None` when the thrust check does not apply.
    pub max_thrust_excess: Option<S>,
    /// `None` without a speed limit.
    pub max_speed_excess: Option<S>,
    pub max_thrust_norm: S,
    pub max_speed: S,
    pub segments: Vec<SegmentCheck<S>>,
}

/// Acceptance thresholds for a [`ValidationReport`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<S> {
    pub gap: S,
    pub thrust: S,
    pub speed: S,
}

impl<S: Scalar> Default for Tolerances<S> {
    fn default() -> Self {
        Tolerances { gap: S::lit(1e-6), thrust: S::lit(1e-2), speed: S::lit(1e-3) }
    }
}

impl<S: Scalar> ValidationReport<S> {
    pub fn passes(&self, tol: &Tolerances<S>) -> bool {
        self.max_position_gap <= tol.gap
            && self.max_velocity_gap <= tol.gap
            && self.max_duration_gap <= tol.gap
            && self.max_thrust_excess.map_or(true, |e| e <= tol.thrust)
            && self.max_speed_excess.map_or(true, |e| e <= tol.speed)
    }
}

fn rel_gap<S: Scalar>(a: Vec3<S>, b: Vec3<S>) -> S {
    (a - b).norm() / S::one().max(b.norm())
}

/// Replays every segment and samples thrust and speed along the trajectory.
pub fn validate<S: Scalar>(
    trajectory: &Trajectory<S>,
    config: &ThrustConfig<S>,
    dt: S,
    check_thrust: bool,
) -> Result<ValidationReport<S>> {
    if !(dt > S::zero()) {
        return Err(PlanError::InvalidArgument(format!("sampling step must be > 0 (got {dt})")));
    }
    let segs = &trajectory.segments;
    let wps = &trajectory.waypoints;
    let mut checks = Vec::with_capacity(segs.len());
    for (k, seg) in segs.iter().enumerate() {
        let start = seg.start();
        let end = seg.end();
        let mut pg = S::zero();
        let mut vg = S::zero();
        if let Some(w) = wps.get(k) {
            pg = pg.max(rel_gap(start.p, *w));
        }
        if let Some(w) = wps.get(k + 1) {
            pg = pg.max(rel_gap(end.p, *w));
        }
        if let Some(next) = segs.get(k + 1) {
            let ns = next.start();
            pg = pg.max(rel_gap(end.p, ns.p));
            vg = vg.max(rel_gap(end.v, ns.v));
        }
        let dg = seg.axes.iter().map(|a| (a.duration() - seg.duration).abs()).fold(S::zero(), S::max);
        checks.push(SegmentCheck { index: k, position_gap: pg, velocity_gap: vg, duration_gap: dg });
    }
    let sum: S = segs.iter().map(|s| s.duration).sum();
    let total_gap = (sum - trajectory.total_duration).abs();
    let (max_thrust_norm, max_speed) = if segs.is_empty() {
        (S::zero(), S::zero())
    } else {
        thrust_and_speed_envelope(trajectory, dt, config)?
    };
    Ok(ValidationReport {
        max_position_gap: checks.iter().map(|c| c.position_gap).fold(S::zero(), S::max),
        max_velocity_gap: checks.iter().map(|c| c.velocity_gap).fold(S::zero(), S::max),
        max_duration_gap: checks.iter().map(|c| c.duration_gap).fold(total_gap, S::max),
        max_thrust_excess: check_thrust.then(|| (max_thrust_norm - config.a_t_max).max(S::zero())),
        max_speed_excess: config.v_max.map(|vm| (max_speed - vm).max(S::zero())),
        max_thrust_norm,
        max_speed,
        segments: checks,
    })
}
