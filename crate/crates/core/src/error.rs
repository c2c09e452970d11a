use thiserror::Error;

/// Errors raised by the planner.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("time {t} outside trajectory range [0, {total}]")]
    OutOfRange { t: f64, total: f64 },

    #[error("thrust limit {a_t_max} m/s^2 cannot hover against gravity {g} m/s^2")]
    CannotHover { a_t_max: f64, g: f64 },

    #[error("no feasible axis profile: {0}")]
    Infeasible(String),

    #[error("synchronization recovery did not settle after {0} iterations")]
    SyncRecoveryCap(usize),

    #[error("gravity and drag alone exceed the thrust limit (lower v_max): {0}")]
    ThrustSaturated(String),

    #[error("re-planning segment {segment} (waypoints {from}->{to}) failed: {source}")]
    Segment {
        segment: usize,
        from: usize,
        to: usize,
        #[source]
        source: Box<PlanError>,
    },
}

pub type Result<T, E = PlanError> = std::result::Result<T, E>;
