//! Domain types shared by every planner stage.

use arrayvec::ArrayVec;

use crate::error::{PlanError, Result};
use crate::scalar::{Scalar, Vec3};

/// Position and velocity of one axis at a segment boundary.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AxisState<S> {
    pub position: S,
    pub velocity: S,
}

impl<S: Scalar> AxisState<S> {
    pub fn new(position: S, velocity: S) -> Self {
        AxisState { position, velocity }
    }

    pub fn is_finite(&self) -> bool {
        self.position.is_finite() && self.velocity.is_finite()
    }
}

/// Full 3D boundary state.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State3<S> {
    pub p: Vec3<S>,
    pub v: Vec3<S>,
}

impl<S: Scalar> State3<S> {
    pub fn new(p: Vec3<S>, v: Vec3<S>) -> Self {
        State3 { p, v }
    }

    pub fn at_rest(p: Vec3<S>) -> Self {
        State3 { p, v: Vec3::zeros() }
    }

    pub fn axis(&self, i: usize) -> AxisState<S> {
        AxisState::new(self.p[i], self.v[i])
    }

    pub fn is_finite(&self) -> bool {
        self.p.is_finite() && self.v.is_finite()
    }
}

/// Acceleration (and optional speed) limits of one axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisBounds<S> {
    pub a_min: S,
    pub a_max: S,
    pub v_m: Option<S>,
}

impl<S: Scalar> AxisBounds<S> {
    pub fn new(a_min: S, a_max: S, v_m: Option<S>) -> Result<Self> {
        let b = AxisBounds { a_min, a_max, v_m };
        b.validate()?;
        Ok(b)
    }

    /// Symmetric `±a` bounds.
    pub fn symmetric(a: S) -> Self {
        AxisBounds { a_min: -a, a_max: a, v_m: None }
    }

    pub fn with_velocity_limit(mut self, v_m: Option<S>) -> Self {
        self.v_m = v_m;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a_min < S::zero() && self.a_max > S::zero())
            || !self.a_min.is_finite()
            || !self.a_max.is_finite()
        {
            return Err(PlanError::InvalidArgument(format!(
                "acceleration bounds must satisfy a_min < 0 < a_max (got {}, {})",
                self.a_min, self.a_max
            )));
        }
        if let Some(v) = self.v_m {
            if !(v > S::zero()) || !v.is_finite() {
                return Err(PlanError::InvalidArgument(format!(
                    "velocity limit must be positive (got {v})"
                )));
            }
        }
        Ok(())
    }
}

/// Diagonal linear-drag coefficients in the body frame, in 1/s.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DragParams<S> {
    pub coeffs: Vec3<S>,
}

impl<S: Scalar> DragParams<S> {
    pub fn new(delta_x: S, delta_y: S, delta_z: S) -> Self {
        DragParams { coeffs: Vec3::new(delta_x, delta_y, delta_z) }
    }

    pub fn none() -> Self {
        DragParams { coeffs: Vec3::zeros() }
    }

    /// Coefficients identified for the reference platform.
    pub fn reference() -> Self {
        DragParams::new(S::lit(0.28), S::lit(0.35), S::lit(0.7))
    }

    pub fn is_enabled(&self) -> bool {
        self.coeffs.0.iter().any(|c| *c != S::zero())
    }
}

/// Collective thrust model: norm limit, gravity, drag and optional speed limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThrustConfig<S> {
    /// Thrust acceleration limit `f_max / m`, m/s².
    pub a_t_max: S,
    /// Gravity magnitude, m/s². Zero disables gravity.
    pub g: S,
    pub drag: DragParams<S>,
    /// Speed-norm limit, m/s.
    pub v_max: Option<S>,
}

/// Standard gravity, m/s².
pub const GRAVITY: f64 = 9.81;

impl<S: Scalar> ThrustConfig<S> {
    pub fn new(a_t_max: S, g: S, drag: DragParams<S>, v_max: Option<S>) -> Result<Self> {
        let c = ThrustConfig { a_t_max, g, drag, v_max };
        c.validate()?;
        Ok(c)
    }

    /// 3.5 g of thrust, standard gravity, no drag and no speed limit.
    pub fn reference() -> Self {
        let g = S::lit(GRAVITY);
        ThrustConfig { a_t_max: S::lit(3.5) * g, g, drag: DragParams::none(), v_max: None }
    }

    /// Gravity vector `[0, 0, -g]`.
    pub fn gravity(&self) -> Vec3<S> {
        Vec3::new(S::zero(), S::zero(), -self.g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g >= S::zero()) || !self.g.is_finite() {
            return Err(PlanError::InvalidArgument(format!("gravity must be >= 0 (got {})", self.g)));
        }
        if !(self.a_t_max > self.g) || !(self.a_t_max > S::zero()) || !self.a_t_max.is_finite() {
            return Err(PlanError::CannotHover { a_t_max: self.a_t_max.as_f64(), g: self.g.as_f64() });
        }
        if self.drag.coeffs.0.iter().any(|c| !(*c >= S::zero())) {
            return Err(PlanError::InvalidArgument("drag coefficients must be >= 0".into()));
        }
        if let Some(v) = self.v_max {
            if !(v > S::zero()) || !v.is_finite() {
                return Err(PlanError::InvalidArgument(format!("v_max must be positive (got {v})")));
            }
        }
        Ok(())
    }
}

/// One constant-acceleration phase of an axis profile.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Phase<S> {
    pub duration: S,
    pub acceleration: S,
}

impl<S: Scalar> Phase<S> {
    pub fn new(duration: S, acceleration: S) -> Self {
        Phase { duration, acceleration }
    }

    /// State after applying this phase for its full duration.
    pub fn advance(&self, s: AxisState<S>) -> AxisState<S> {
        self.advance_by(s, self.duration)
    }

    pub fn advance_by(&self, s: AxisState<S>, t: S) -> AxisState<S> {
        let half = S::lit(0.5);
        AxisState {
            position: s.position + s.velocity * t + half * self.acceleration * t * t,
            velocity: s.velocity + self.acceleration * t,
        }
    }
}

/// Role of an axis inside a synchronized segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    /// The axis dictates the segment duration (runs at full acceleration, M).
    Dictating,
    /// The axis is stretched to the segment duration by scaling its accelerations (S).
    Synced,
}

impl Role {
    pub fn letter(self) -> char {
        match self {
            Role::Dictating => 'M',
            Role::Synced => 'S',
        }
    }

    pub fn from_letter(c: &str) -> Option<Self> {
        match c {
            "M" => Some(Role::Dictating),
            "S" => Some(Role::Synced),
            _ => None,
        }
    }
}

/// A planned single-axis profile: 2 (bang-bang) or 3 (bang-singular-bang) phases.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisProfile<S> {
    pub start: AxisState<S>,
    pub phases: ArrayVec<Phase<S>, 3>,
    pub role: Role,
    /// Acceleration scale applied to the bounds, in (0, 1].
    pub gamma: S,
}

impl<S: Scalar> AxisProfile<S> {
    pub fn bang_bang(start: AxisState<S>, first: Phase<S>, second: Phase<S>) -> Self {
        let mut phases = ArrayVec::new();
        phases.push(first);
        phases.push(second);
        AxisProfile { start, phases, role: Role::Dictating, gamma: S::one() }
    }

    pub fn bang_singular_bang(
        start: AxisState<S>,
        first: Phase<S>,
        cruise: S,
        last: Phase<S>,
    ) -> Self {
        let mut phases = ArrayVec::new();
        phases.push(first);
        phases.push(Phase::new(cruise, S::zero()));
        phases.push(last);
        AxisProfile { start, phases, role: Role::Dictating, gamma: S::one() }
    }

    /// Profile that holds `start` for zero time.
    pub fn stationary(start: AxisState<S>, a_first: S, a_second: S) -> Self {
        Self::bang_bang(start, Phase::new(S::zero(), a_first), Phase::new(S::zero(), a_second))
    }

    pub fn duration(&self) -> S {
        self.phases.iter().map(|p| p.duration).sum()
    }

    pub fn is_singular(&self) -> bool {
        self.phases.len() == 3
    }

    /// Duration of the first phase, the axis switch time.
    pub fn switch_time(&self) -> S {
        self.phases[0].duration
    }

    /// Velocity reached at the end of the first phase (peak or cruise velocity).
    pub fn peak_velocity(&self) -> S {
        self.phases[0].advance(self.start).velocity
    }

    /// Analytic replay of all phases from `start`.
    pub fn end(&self) -> AxisState<S> {
        self.phases.iter().fold(self.start, |s, ph| ph.advance(s))
    }

    /// Boundary states between phases: `start`, after phase 1, ..., `end`.
    pub fn knots(&self) -> ArrayVec<AxisState<S>, 4> {
        let mut out = ArrayVec::new();
        let mut s = self.start;
        out.push(s);
        for ph in &self.phases {
            s = ph.advance(s);
            out.push(s);
        }
        out
    }

    /// Largest attained speed; velocity is piecewise linear so it peaks at a knot.
    pub fn max_speed(&self) -> S {
        self.knots().iter().map(|k| k.velocity.abs()).fold(S::zero(), S::max)
    }

    /// State and acceleration at local time `t`. Acceleration is right-continuous
    /// except at (and past) the end, where the left limit is reported.
    pub fn state_at(&self, t: S) -> (AxisState<S>, S) {
        let total = self.duration();
        if t >= total {
            let fin = self.end();
            let extra = t - total;
            return (AxisState::new(fin.position + fin.velocity * extra, fin.velocity), self.acceleration_before(total));
        }
        let mut s = self.start;
        let mut elapsed = S::zero();
        let n = self.phases.len();
        for (k, ph) in self.phases.iter().enumerate() {
            let end = elapsed + ph.duration;
            if t < end || k + 1 == n {
                let local = (t - elapsed).max(S::zero()).min(ph.duration);
                return (ph.advance_by(s, local), ph.acceleration);
            }
            s = ph.advance(s);
            elapsed = end;
        }
        (s, S::zero())
    }

    /// Acceleration just before local time `t` (left limit); zero for an empty profile.
    pub fn acceleration_before(&self, t: S) -> S {
        let mut elapsed = S::zero();
        let mut last = S::zero();
        for ph in &self.phases {
            if ph.duration > S::zero() {
                last = ph.acceleration;
                if t <= elapsed + ph.duration {
                    return ph.acceleration;
                }
            }
            elapsed = elapsed + ph.duration;
        }
        last
    }

    /// Local times at which the acceleration changes (interior knots only).
    pub fn switch_times(&self) -> ArrayVec<S, 2> {
        let mut out = ArrayVec::new();
        let mut elapsed = S::zero();
        for ph in self.phases.iter().take(self.phases.len() - 1) {
            elapsed = elapsed + ph.duration;
            out.push(elapsed);
        }
        out
    }
}

/// Three synchronized axis profiles sharing one duration.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment3D<S> {
    pub axes: [AxisProfile<S>; 3],
    pub duration: S,
}

impl<S: Scalar> Segment3D<S> {
    pub fn start(&self) -> State3<S> {
        State3 {
            p: Vec3(std::array::from_fn(|i| self.axes[i].start.position)),
            v: Vec3(std::array::from_fn(|i| self.axes[i].start.velocity)),
        }
    }

    pub fn end(&self) -> State3<S> {
        let e: [AxisState<S>; 3] = std::array::from_fn(|i| self.axes[i].end());
        State3 {
            p: Vec3(std::array::from_fn(|i| e[i].position)),
            v: Vec3(std::array::from_fn(|i| e[i].velocity)),
        }
    }

    pub fn roles(&self) -> [Role; 3] {
        std::array::from_fn(|i| self.axes[i].role)
    }

    /// Position, velocity and acceleration at local time `t`.
    pub fn state_at(&self, t: S) -> (Vec3<S>, Vec3<S>, Vec3<S>) {
        let mut p = Vec3::zeros();
        let mut v = Vec3::zeros();
        let mut a = Vec3::zeros();
        for i in 0..3 {
            let (s, acc) = self.axes[i].state_at(t);
            p[i] = s.position;
            v[i] = s.velocity;
            a[i] = acc;
        }
        (p, v, a)
    }

    /// Per-axis largest attained speed.
    pub fn max_axis_speeds(&self) -> Vec3<S> {
        Vec3(std::array::from_fn(|i| self.axes[i].max_speed()))
    }

    /// All interior switch times over every axis, sorted and deduplicated.
    pub fn switch_times(&self) -> Vec<S> {
        let mut ts: Vec<S> = self
            .axes
            .iter()
            .flat_map(|ax| ax.switch_times())
            .filter(|t| *t > S::zero() && *t < self.duration)
            .collect();
        ts.sort_by(|a, b| a.partial_cmp(b).expect("finite times"));
        ts.dedup_by(|a, b| (*a - *b).abs() <= S::TIME_TOL);
        ts
    }
}

/// Ordered segments through a list of waypoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<S> {
    pub segments: Vec<Segment3D<S>>,
    pub waypoints: Vec<Vec3<S>>,
    pub total_duration: S,
}

impl<S: Scalar> Trajectory<S> {
    pub fn new(segments: Vec<Segment3D<S>>, waypoints: Vec<Vec3<S>>) -> Self {
        let total_duration = segments.iter().map(|s| s.duration).sum();
        Trajectory { segments, waypoints, total_duration }
    }

    pub fn from_segment(segment: Segment3D<S>) -> Self {
        let start = segment.start().p;
        let end = segment.end().p;
        Self::new(vec![segment], vec![start, end])
    }

    /// Velocities at every waypoint, including the fixed endpoints.
    pub fn waypoint_velocities(&self) -> Vec<Vec3<S>> {
        let mut out: Vec<Vec3<S>> = self.segments.iter().map(|s| s.start().v).collect();
        if let Some(last) = self.segments.last() {
            out.push(last.end().v);
        }
        out
    }
}
