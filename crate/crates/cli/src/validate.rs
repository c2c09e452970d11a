//! `pmm validate`: replay a trajectory file and check it against the config.

use std::fmt::Write as _;
use std::path::Path;

use pmm_planner::oracle::{validate, Tolerances, ValidationReport};
use pmm_planner::Trajectory;

use crate::config::PlannerConfig;
use crate::{read_file, trajfile, CliError};

/// Sampling step for the thrust and speed checks, s.
pub const VALIDATION_DT: f64 = 0.01;

pub fn render(report: &ValidationReport<f64>, tol: &Tolerances<f64>) -> String {
    let mut s = String::new();
    let opt = |x: Option<f64>| x.map_or("n/a".to_string(), |v| format!("{v:.3e}"));
    writeln!(s, "max_position_gap = {:.3e} (tolerance {:.1e})", report.max_position_gap, tol.gap).unwrap();
    writeln!(s, "max_velocity_gap = {:.3e} (tolerance {:.1e})", report.max_velocity_gap, tol.gap).unwrap();
    writeln!(s, "max_duration_gap = {:.3e} (tolerance {:.1e})", report.max_duration_gap, tol.gap).unwrap();
    writeln!(s, "max_thrust_norm = {:.6}", report.max_thrust_norm).unwrap();
    writeln!(s, "max_thrust_excess = {} (tolerance {:.1e})", opt(report.max_thrust_excess), tol.thrust).unwrap();
    writeln!(s, "max_speed = {:.6}", report.max_speed).unwrap();
    writeln!(s, "max_speed_excess = {} (tolerance {:.1e})", opt(report.max_speed_excess), tol.speed).unwrap();
    for c in &report.segments {
        if c.position_gap > tol.gap || c.velocity_gap > tol.gap || c.duration_gap > tol.gap {
            writeln!(
                s,
                "segment {}: position gap {:.3e}, velocity gap {:.3e}, duration gap {:.3e}",
                c.index, c.position_gap, c.velocity_gap, c.duration_gap
            )
            .unwrap();
        }
    }
    writeln!(s, "result = {}", if report.passes(tol) { "pass" } else { "fail" }).unwrap();
    s
}

/// Checks an already parsed trajectory. The thrust check is skipped in the
/// equal-limits mode.
pub fn check(trajectory: &Trajectory<f64>, cfg: &PlannerConfig) -> Result<(ValidationReport<f64>, bool), CliError> {
    let thrust = cfg.thrust_config()?;
    let report =
        validate(trajectory, &thrust, VALIDATION_DT, !cfg.equal_limits).map_err(|e| CliError::Planning(e.to_string()))?;
    let ok = report.passes(&cfg.tolerances());
    Ok((report, ok))
}

/// Prints the report; a violation is returned as [`CliError::Violation`]
/// after the report has been printed.
pub fn cmd_validate(trajectory_file: &Path, config_file: &Path) -> Result<ValidationReport<f64>, CliError> {
    let cfg = PlannerConfig::load(config_file)?;
    let trajectory = trajfile::parse(&read_file(trajectory_file)?)
        .map_err(|e| CliError::Parse(format!("{}: {}", trajectory_file.display(), e.message())))?;
    let (report, ok) = check(&trajectory, &cfg)?;
    print!("{}", render(&report, &cfg.tolerances()));
    if ok {
        Ok(report)
    } else {
        Err(CliError::Violation(format!("{} is outside tolerance", trajectory_file.display())))
    }
}
