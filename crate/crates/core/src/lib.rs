//! Minimum-time trajectory planning for a point-mass multirotor model.
//!
//! Segments between waypoints are planned per axis in closed form
//! (bang-bang, or bang-singular-bang under a speed limit) and synchronized to
//! a common duration. Per-axis acceleration limits are derived from a
//! collective-thrust budget that accounts for gravity and linear drag, and the
//! unknown velocities at via-waypoints are optimized by projected gradient
//! steps.
//!
//! ```
//! use pmm_planner::{plan, PlanParams, ThrustConfig, Vec3, WaypointPath};
//!
//! let path = WaypointPath::at_rest(vec![
//!     Vec3::new(0.0, 0.0, 0.0),
//!     Vec3::new(4.0, 2.0, 1.0),
//!     Vec3::new(8.0, 0.0, 2.0),
//! ])
//! .unwrap();
//! let report = plan(&path, &ThrustConfig::reference(), &PlanParams::default()).unwrap();
//! assert!(report.trajectory.total_duration > 0.0);
//! ```
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the `*64` and
//! `*32` aliases name the common instantiations.

pub mod axis;
pub mod error;
pub mod eval;
pub mod instances;
pub mod ltd;
pub mod model;
pub mod oracle;
pub mod scalar;
pub mod sync;
pub mod thrust;
pub mod velocity;

pub use axis::{
    duration_gradient, gamma_one_candidates, m_limit_velocities, min_feasible_duration_above, s_limit_velocities,
    solve_min_time, solve_sync, DurationGradient, GradientKind, SyncResult, VelocityEnd, VelocityInterval,
};
pub use error::{PlanError, Result};
pub use eval::{evaluate, sample, EvalPoint, Sample};
pub use ltd::{
    candidate_thrusts, distribute_velocity_limit, equal_split_segment, init_acc_limits, ltd_segment, new_acc_limits,
    scaling_factors, LtdOutcome, ThrustCandidate,
};
pub use model::{
    AxisBounds, AxisProfile, AxisState, DragParams, Phase, Role, Segment3D, State3, ThrustConfig, Trajectory, GRAVITY,
};
pub use oracle::{fd_gradient, sampled_velocity_search, validate, SearchGrid, ValidationReport};
pub use scalar::{Mat3, Scalar, Vec3};
pub use sync::pmm_traj_3d;
pub use thrust::thrust_accel;
pub use velocity::{
    init_velocities, optimize, plan, update_boundary_velocity, OptimizerParams, PlanMode, PlanParams, PlanReport,
    WaypointPath,
};

pub type Vec3f64 = Vec3<f64>;
pub type Vec3f32 = Vec3<f32>;
pub type AxisState64 = AxisState<f64>;
pub type AxisState32 = AxisState<f32>;
pub type State3f64 = State3<f64>;
pub type State3f32 = State3<f32>;
pub type AxisBounds64 = AxisBounds<f64>;
pub type AxisBounds32 = AxisBounds<f32>;
pub type AxisProfile64 = AxisProfile<f64>;
pub type AxisProfile32 = AxisProfile<f32>;
pub type Segment3D64 = Segment3D<f64>;
pub type Segment3D32 = Segment3D<f32>;
pub type Trajectory64 = Trajectory<f64>;
pub type Trajectory32 = Trajectory<f32>;
pub type ThrustConfig64 = ThrustConfig<f64>;
pub type ThrustConfig32 = ThrustConfig<f32>;
pub type WaypointPath64 = WaypointPath<f64>;
pub type WaypointPath32 = WaypointPath<f32>;
