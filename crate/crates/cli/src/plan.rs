//! `pmm plan`: waypoints in, trajectory, samples and summary out.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use pmm_planner::velocity::{optimize, PlannedSegment, Termination};
use pmm_planner::{plan, sample, PlanMode, ThrustConfig, Trajectory, WaypointPath};

use crate::config::PlannerConfig;
use crate::{read_file, trajfile, waypoints, write_file, CliError};

pub const SAMPLE_HEADER: &str = "t,px,py,pz,vx,vy,vz,ax,ay,az,thrust_norm";

/// Figures reported after planning.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub total_duration: f64,
    pub segments: usize,
    pub equal_limits: bool,
    pub phase_one_duration: f64,
    pub phase_one_iterations: usize,
    pub phase_one_termination: Termination,
    /// Absent in the equal-limits mode, which stops after the first pass.
    pub replanned_duration: Option<f64>,
    pub phase_two: Option<(f64, usize, Termination)>,
    pub ltd_unconverged: usize,
    pub thrust_utilization: f64,
    pub wall_time: Duration,
}

impl Summary {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let term = |t: Termination| match t {
            Termination::Converged => "converged",
            Termination::IterationCap => "iteration_cap",
            Termination::SingleSegment => "single_segment",
        };
        writeln!(s, "total_duration = {:.9}", self.total_duration).unwrap();
        writeln!(s, "segments = {}", self.segments).unwrap();
        writeln!(s, "mode = {}", if self.equal_limits { "equal_limits" } else { "ltd" }).unwrap();
        writeln!(s, "phase_one_duration = {:.9}", self.phase_one_duration).unwrap();
        writeln!(s, "phase_one_iterations = {}", self.phase_one_iterations).unwrap();
        writeln!(s, "phase_one_termination = {}", term(self.phase_one_termination)).unwrap();
        if let Some(r) = self.replanned_duration {
            writeln!(s, "replanned_duration = {r:.9}").unwrap();
        }
        if let Some((d, it, t)) = self.phase_two {
            writeln!(s, "phase_two_duration = {d:.9}").unwrap();
            writeln!(s, "phase_two_iterations = {it}").unwrap();
            writeln!(s, "phase_two_termination = {}", term(t)).unwrap();
        }
        writeln!(s, "ltd_unconverged_segments = {}", self.ltd_unconverged).unwrap();
        writeln!(s, "thrust_utilization = {:.6}", self.thrust_utilization).unwrap();
        writeln!(s, "planning_time_s = {:.6}", self.wall_time.as_secs_f64()).unwrap();
        s
    }
}

fn utilization(segments: &[PlannedSegment<f64>], config: &ThrustConfig<f64>) -> f64 {
    let moving: Vec<f64> =
        segments.iter().filter(|s| s.duration() > 0.0).map(|s| s.max_thrust / config.a_t_max).collect();
    if moving.is_empty() {
        0.0
    } else {
        moving.iter().sum::<f64>() / moving.len() as f64
    }
}

/// Plans `path` with the settings of `cfg`.
pub fn run_plan(path: &WaypointPath<f64>, cfg: &PlannerConfig) -> Result<(Trajectory<f64>, Summary), CliError> {
    let thrust = cfg.thrust_config()?;
    let params = cfg.plan_params();
    let fail = |e: pmm_planner::PlanError| CliError::Planning(e.to_string());
    if cfg.equal_limits {
        let clock = Instant::now();
        let mode = PlanMode::equal_split(&thrust).map_err(fail)?;
        let r = optimize(path, &params.phase_one, &mode, None).map_err(fail)?;
        let summary = Summary {
            total_duration: r.trajectory.total_duration,
            segments: r.segments.len(),
            equal_limits: true,
            phase_one_duration: r.trajectory.total_duration,
            phase_one_iterations: r.iterations,
            phase_one_termination: r.termination,
            replanned_duration: None,
            phase_two: None,
            ltd_unconverged: 0,
            thrust_utilization: utilization(&r.segments, &thrust),
            wall_time: clock.elapsed(),
        };
        return Ok((r.trajectory, summary));
    }
    let r = plan(path, &thrust, &params).map_err(fail)?;
    let summary = Summary {
        total_duration: r.trajectory.total_duration,
        segments: r.segments.len(),
        equal_limits: false,
        phase_one_duration: r.phase_one.duration,
        phase_one_iterations: r.phase_one.iterations,
        phase_one_termination: r.phase_one.termination,
        replanned_duration: Some(r.replanned_duration),
        phase_two: Some((r.phase_two.duration, r.phase_two.iterations, r.phase_two.termination)),
        ltd_unconverged: r.segments.iter().filter(|s| !s.ltd_converged).count(),
        thrust_utilization: r.thrust_utilization(&thrust),
        wall_time: r.wall_time,
    };
    Ok((r.trajectory, summary))
}

pub fn samples_csv(trajectory: &Trajectory<f64>, dt: f64, config: &ThrustConfig<f64>) -> Result<String, CliError> {
    let rows = sample(trajectory, dt, config).map_err(|e| CliError::Parse(e.to_string()))?;
    let mut s = String::new();
    writeln!(s, "{SAMPLE_HEADER}").unwrap();
    for r in rows {
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.t, r.p[0], r.p[1], r.p[2], r.v[0], r.v[1], r.v[2], r.a[0], r.a[1], r.a[2], r.thrust_norm
        )
        .unwrap();
    }
    Ok(s)
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Plans the waypoint file and writes `<prefix>.traj`, `<prefix>.csv` and
/// `<prefix>.summary`.
pub fn cmd_plan(waypoints_file: &Path, config_file: &Path, out_prefix: &Path, dt: f64) -> Result<Summary, CliError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(CliError::Parse(format!("--dt must be a positive number (got {dt})")));
    }
    let cfg = PlannerConfig::load(config_file)?;
    let path = waypoints::parse(&read_file(waypoints_file)?)
        .map_err(|e| CliError::Parse(format!("{}: {}", waypoints_file.display(), e.message())))?;
    let (trajectory, summary) = run_plan(&path, &cfg)?;
    let thrust = cfg.thrust_config()?;
    write_file(&with_suffix(out_prefix, ".traj"), &trajfile::write(&trajectory))?;
    write_file(&with_suffix(out_prefix, ".csv"), &samples_csv(&trajectory, dt, &thrust)?)?;
    write_file(&with_suffix(out_prefix, ".summary"), &summary.render())?;
    Ok(summary)
}
