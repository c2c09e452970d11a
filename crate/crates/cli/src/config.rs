//! Planner configuration file (TOML).
//!
//! Every key is optional; missing keys take the reference values. Unknown
//! keys are rejected.
//!
//! ```toml
//! a_t_max = 34.335        # collective thrust limit, m/s^2
//! gravity = 9.81
//! gravity_enabled = true
//! drag_enabled = false
//! drag = [0.28, 0.35, 0.7]
//! # v_max = 10.0          # speed-norm limit, m/s (unset: none)
//! equal_limits = false    # fixed equal-split limits instead of decomposition
//! eps_a = 0.01
//! seed = 42
//! sample_speed = 10.0     # benchmark boundary-speed scale when v_max is unset
//! bench_waypoints = 5
//!
//! [phase_one]
//! alpha = 10.0
//! zeta = 0.2
//! eps_t = 1e-3
//!
//! [phase_two]
//! alpha = 35.0
//!
//! [tolerances]
//! gap = 1e-6
//! thrust = 1e-2
//! speed = 1e-3
//! ```

use std::path::Path;

use pmm_planner::oracle::Tolerances;
use pmm_planner::{DragParams, OptimizerParams, PlanParams, ThrustConfig, Vec3, GRAVITY};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlannerConfig {
    pub a_t_max: f64,
    pub gravity: f64,
    pub gravity_enabled: bool,
    pub drag_enabled: bool,
    pub drag: [f64; 3],
    pub v_max: Option<f64>,
    pub equal_limits: bool,
    pub eps_a: f64,
    pub seed: u64,
    pub sample_speed: f64,
    pub bench_waypoints: usize,
    pub phase_one: OptimizerSection,
    pub phase_two: OptimizerSection,
    pub tolerances: ToleranceSection,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            a_t_max: 3.5 * GRAVITY,
            gravity: GRAVITY,
            gravity_enabled: true,
            drag_enabled: false,
            drag: [0.28, 0.35, 0.7],
            v_max: None,
            equal_limits: false,
            eps_a: 1e-2,
            seed: 42,
            sample_speed: 10.0,
            bench_waypoints: 5,
            phase_one: OptimizerSection::default(),
            phase_two: OptimizerSection::default(),
            tolerances: ToleranceSection::default(),
        }
    }
}

/// Optimizer overrides; unset fields keep the defaults of their pass.
#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSection {
    pub alpha: Option<f64>,
    pub eta: Option<f64>,
    pub zeta: Option<f64>,
    pub eps_t: Option<f64>,
    pub max_iterations: Option<usize>,
    pub r: Option<f64>,
}

impl OptimizerSection {
    fn apply(&self, base: OptimizerParams<f64>) -> OptimizerParams<f64> {
        OptimizerParams {
            alpha: self.alpha.unwrap_or(base.alpha),
            eta: self.eta.unwrap_or(base.eta),
            zeta: self.zeta.unwrap_or(base.zeta),
            eps_t: self.eps_t.unwrap_or(base.eps_t),
            max_iterations: self.max_iterations.unwrap_or(base.max_iterations),
            r: self.r.unwrap_or(base.r),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceSection {
    pub gap: f64,
    pub thrust: f64,
    pub speed: f64,
}

impl Default for ToleranceSection {
    fn default() -> Self {
        let t = Tolerances::<f64>::default();
        ToleranceSection { gap: t.gap, thrust: t.thrust, speed: t.speed }
    }
}

impl PlannerConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Parse(m) => CliError::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Effective gravity magnitude.
    pub fn g(&self) -> f64 {
        if self.gravity_enabled {
            self.gravity
        } else {
            0.0
        }
    }

    pub fn thrust_config(&self) -> Result<ThrustConfig<f64>, CliError> {
        let drag = if self.drag_enabled {
            DragParams { coeffs: Vec3(self.drag) }
        } else {
            DragParams::none()
        };
        ThrustConfig::new(self.a_t_max, self.g(), drag, self.v_max).map_err(|e| CliError::Parse(format!("config: {e}")))
    }

    pub fn plan_params(&self) -> PlanParams<f64> {
        PlanParams {
            phase_one: self.phase_one.apply(OptimizerParams::phase_one()),
            phase_two: self.phase_two.apply(OptimizerParams::phase_two()),
            eps_a: self.eps_a,
        }
    }

    pub fn tolerances(&self) -> Tolerances<f64> {
        Tolerances { gap: self.tolerances.gap, thrust: self.tolerances.thrust, speed: self.tolerances.speed }
    }
}
