//! `pmm bench`: the five ablation configurations over seeded random instances.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

use pmm_planner::instances::{random_path, random_segment, seeded_rng, CUBE_EDGE};
use pmm_planner::velocity::optimize;
use pmm_planner::{
    equal_split_segment, ltd_segment, plan, DragParams, PlanMode, State3, ThrustConfig, Vec3, WaypointPath,
};
use rayon::prelude::*;

use crate::config::PlannerConfig;
use crate::{waypoints, write_file, CliError};

pub const BENCH_HEADER: &str = "config,mode,seed,instances,mean_duration,mean_iterations,mean_improvement";

/// Smallest distance between consecutive random waypoints, m.
const MIN_SPACING: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchMode {
    Single,
    Multi,
}

impl FromStr for BenchMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "single" => Ok(BenchMode::Single),
            "multi" => Ok(BenchMode::Multi),
            _ => Err(format!("mode must be `single` or `multi`, got {s:?}")),
        }
    }
}

impl BenchMode {
    fn name(self) -> &'static str {
        match self {
            BenchMode::Single => "single",
            BenchMode::Multi => "multi",
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Ablation {
    name: &'static str,
    gravity: bool,
    ltd: bool,
    drag: bool,
    /// Row whose durations serve as the baseline for the improvement column.
    baseline: Option<usize>,
}

const ABLATIONS: [Ablation; 5] = [
    Ablation { name: "PMM_equal g=0", gravity: false, ltd: false, drag: false, baseline: None },
    Ablation { name: "LTD g=0", gravity: false, ltd: true, drag: false, baseline: Some(0) },
    Ablation { name: "PMM_equal", gravity: true, ltd: false, drag: false, baseline: None },
    Ablation { name: "LTD", gravity: true, ltd: true, drag: false, baseline: Some(2) },
    Ablation { name: "LTD w/ drag", gravity: true, ltd: true, drag: true, baseline: None },
];

/// Aggregates of one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub config: &'static str,
    pub instances: usize,
    pub mean_duration: f64,
    pub mean_iterations: f64,
    /// Mean of `(T_equal - T) / T_equal` against the matching equal-limits row.
    pub mean_improvement: Option<f64>,
    pub mean_time: Duration,
    pub median_time: Duration,
}

enum Instance {
    Single(State3<f64>, State3<f64>),
    Multi(WaypointPath<f64>),
}

impl Instance {
    fn dump(&self) -> String {
        match self {
            Instance::Single(s, e) => {
                let path = WaypointPath { waypoints: vec![s.p, e.p], v_start: s.v, v_end: e.v };
                waypoints::format(&path)
            }
            Instance::Multi(p) => waypoints::format(p),
        }
    }
}

struct Outcome {
    duration: f64,
    iterations: usize,
    time: Duration,
}

fn thrust_config(cfg: &PlannerConfig, a: &Ablation) -> Result<ThrustConfig<f64>, CliError> {
    let g = if a.gravity { cfg.gravity } else { 0.0 };
    let drag = if a.drag { DragParams { coeffs: Vec3(cfg.drag) } } else { DragParams::none() };
    ThrustConfig::new(cfg.a_t_max, g, drag, cfg.v_max).map_err(|e| CliError::Parse(format!("config: {e}")))
}

fn run_one(inst: &Instance, a: &Ablation, thrust: &ThrustConfig<f64>, cfg: &PlannerConfig) -> pmm_planner::Result<Outcome> {
    let params = cfg.plan_params();
    let clock = Instant::now();
    let (duration, iterations) = match (inst, a.ltd) {
        (Instance::Single(s, e), false) => (equal_split_segment(s, e, thrust)?.0.duration, 0),
        (Instance::Single(s, e), true) => {
            let o = ltd_segment(s, e, thrust, cfg.eps_a)?;
            (o.segment.duration, o.iterations)
        }
        (Instance::Multi(p), false) => {
            let r = optimize(p, &params.phase_one, &PlanMode::equal_split(thrust)?, None)?;
            (r.trajectory.total_duration, r.iterations)
        }
        (Instance::Multi(p), true) => {
            let r = plan(p, thrust, &params)?;
            (r.trajectory.total_duration, r.phase_one.iterations + r.phase_two.iterations)
        }
    };
    Ok(Outcome { duration, iterations, time: clock.elapsed() })
}

fn instances(cfg: &PlannerConfig, n: usize, mode: BenchMode) -> Vec<Instance> {
    let mut rng = seeded_rng(cfg.seed);
    let speed = cfg.v_max.unwrap_or(cfg.sample_speed);
    (0..n)
        .map(|_| match mode {
            BenchMode::Single => {
                let (s, e) = random_segment(&mut rng, CUBE_EDGE, speed);
                Instance::Single(s, e)
            }
            BenchMode::Multi => Instance::Multi(random_path(&mut rng, cfg.bench_waypoints.max(2), CUBE_EDGE, MIN_SPACING)),
        })
        .collect()
}

/// Runs every ablation over the same `n` instances.
pub fn run_bench(cfg: &PlannerConfig, n: usize, mode: BenchMode) -> Result<Vec<BenchRow>, CliError> {
    let insts = instances(cfg, n, mode);
    let mut outcomes: Vec<Vec<Outcome>> = Vec::with_capacity(ABLATIONS.len());
    for a in &ABLATIONS {
        let thrust = thrust_config(cfg, a)?;
        let results: Vec<pmm_planner::Result<Outcome>> = insts.par_iter().map(|i| run_one(i, a, &thrust, cfg)).collect();
        let mut row = Vec::with_capacity(n);
        for (k, r) in results.into_iter().enumerate() {
            match r {
                Ok(o) => row.push(o),
                Err(e) => {
                    return Err(CliError::Planning(format!(
                        "{} failed on instance {k} (seed {}): {e}\n# replay:\n{}",
                        a.name,
                        cfg.seed,
                        insts[k].dump()
                    )))
                }
            }
        }
        outcomes.push(row);
    }
    let rows = ABLATIONS
        .iter()
        .enumerate()
        .map(|(c, a)| {
            let row = &outcomes[c];
            let mean = |f: &dyn Fn(&Outcome) -> f64| if n == 0 { 0.0 } else { row.iter().map(f).sum::<f64>() / n as f64 };
            let mut times: Vec<Duration> = row.iter().map(|o| o.time).collect();
            times.sort();
            let mean_time = if n == 0 { Duration::ZERO } else { times.iter().sum::<Duration>() / n as u32 };
            let median_time = times.get(n / 2).copied().unwrap_or(Duration::ZERO);
            let mean_improvement = a.baseline.filter(|_| n > 0).map(|b| {
                let base = &outcomes[b];
                row.iter().zip(base).map(|(o, e)| (e.duration - o.duration) / e.duration).sum::<f64>() / n as f64
            });
            BenchRow {
                config: a.name,
                instances: n,
                mean_duration: mean(&|o| o.duration),
                mean_iterations: mean(&|o| o.iterations as f64),
                mean_improvement,
                mean_time,
                median_time,
            }
        })
        .collect();
    Ok(rows)
}

/// Deterministic CSV: no timing columns, so a repeated seed gives identical bytes.
pub fn rows_csv(rows: &[BenchRow], mode: BenchMode, seed: u64) -> String {
    let mut s = String::new();
    writeln!(s, "{BENCH_HEADER}").unwrap();
    for r in rows.iter().filter(|r| r.instances > 0) {
        let imp = r.mean_improvement.map_or(String::new(), |v| format!("{v:.9}"));
        writeln!(
            s,
            "{},{},{seed},{},{:.9},{:.3},{}",
            r.config,
            mode.name(),
            r.instances,
            r.mean_duration,
            r.mean_iterations,
            imp
        )
        .unwrap();
    }
    s
}

/// Timing table for the terminal.
pub fn timing_table(rows: &[BenchRow]) -> String {
    let mut s = String::new();
    writeln!(s, "{:<16} {:>14} {:>16}", "config", "mean time [us]", "median time [us]").unwrap();
    for r in rows {
        writeln!(
            s,
            "{:<16} {:>14.3} {:>16.3}",
            r.config,
            r.mean_time.as_secs_f64() * 1e6,
            r.median_time.as_secs_f64() * 1e6
        )
        .unwrap();
    }
    s
}

pub fn cmd_bench(config_file: &Path, n_instances: usize, out_csv: &Path, mode: BenchMode) -> Result<Vec<BenchRow>, CliError> {
    let cfg = PlannerConfig::load(config_file)?;
    let rows = run_bench(&cfg, n_instances, mode)?;
    write_file(out_csv, &rows_csv(&rows, mode, cfg.seed))?;
    print!("{}", timing_table(&rows));
    Ok(rows)
}
