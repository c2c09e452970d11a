//! Acceptance suite. Runs as a plain binary so every criterion prints one
//! PASS/FAIL line; exits non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::{replay_segment, reachable};
use pmm_planner::eval::thrust_and_speed_envelope;
use pmm_planner::instances::{random_path, random_segment, seeded_rng, CUBE_EDGE};
use pmm_planner::{
    duration_gradient, equal_split_segment, fd_gradient, ltd_segment, optimize, plan, sampled_velocity_search,
    AxisBounds, AxisState, DragParams, GradientKind, OptimizerParams, PlanMode, PlanParams, PlanReport, SearchGrid,
    Segment3D, ThrustConfig, Trajectory, Vec3, VelocityEnd, WaypointPath,
};
use rand::Rng;

type Outcome = (bool, String);

fn config(drag: bool, v_max: Option<f64>) -> ThrustConfig<f64> {
    let d = if drag { DragParams::reference() } else { DragParams::none() };
    ThrustConfig::new(3.5 * 9.81, 9.81, d, v_max).unwrap()
}

fn closes(seg: &Segment3D<f64>) -> bool {
    let end = seg.end();
    let (p, v) = replay_segment(seg);
    (p - end.p).norm() <= 1e-6 * end.p.norm().max(1.0) && (v - end.v).norm() <= 1e-6 * end.v.norm().max(1.0)
}

fn trajectory_closes(t: &Trajectory<f64>) -> bool {
    // replay each segment and compare with the requested waypoint and the next start
    t.segments.iter().enumerate().all(|(k, seg)| {
        let (p, v) = replay_segment(seg);
        let w = t.waypoints[k + 1];
        let mut ok = (p - w).norm() <= 1e-6 * w.norm().max(1.0);
        if let Some(next) = t.segments.get(k + 1) {
            let ns = next.start();
            ok &= (v - ns.v).norm() <= 1e-6 * ns.v.norm().max(1.0);
        }
        ok
    })
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs[xs.len() / 2]
}

/// The multi-waypoint random suite: 3 to 10 waypoints, at rest at both ends.
struct Suite {
    name: &'static str,
    config: ThrustConfig<f64>,
    reports: Vec<PlanReport<f64>>,
    elapsed: Duration,
}

fn suite(name: &'static str, config: ThrustConfig<f64>, count: usize, seed: u64) -> Suite {
    let mut rng = seeded_rng(seed);
    let clock = Instant::now();
    let reports = (0..count)
        .map(|k| {
            let path: WaypointPath<f64> = random_path(&mut rng, 3 + k % 8, CUBE_EDGE, 1.0);
            plan(&path, &config, &PlanParams::default()).unwrap()
        })
        .collect();
    Suite { name, config, reports, elapsed: clock.elapsed() }
}

fn replay_closure(suites: &[Suite]) -> Outcome {
    let clock = Instant::now();
    let mut rng = seeded_rng(1);
    let c = config(false, Some(15.0));
    let mut bad = 0;
    for _ in 0..10_000 {
        let (s, e) = random_segment::<f64, _>(&mut rng, CUBE_EDGE, 15.0);
        let out = ltd_segment(&s, &e, &c, 1e-2).unwrap();
        if !closes(&out.segment) {
            bad += 1;
        }
    }
    let mut plans = 0;
    for s in suites {
        for r in &s.reports {
            plans += 1;
            if !trajectory_closes(&r.trajectory) {
                bad += 1;
            }
        }
    }
    let plan_time: Duration = suites.iter().map(|s| s.elapsed).sum();
    let elapsed = clock.elapsed() + plan_time;
    (
        bad == 0 && plans >= 200 && elapsed <= Duration::from_secs(60),
        format!("10000 segments + {plans} plans, {bad} open, {:.1} s", elapsed.as_secs_f64()),
    )
}

fn thrust_activation() -> Outcome {
    let clock = Instant::now();
    let mut rng = seeded_rng(2);
    let mut worst_gap = 0.0f64;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut unconverged = 0;
    for k in 0..1000 {
        let c = config(k % 2 == 1, None);
        let (s, e) = random_segment::<f64, _>(&mut rng, CUBE_EDGE, 10.0);
        let out = ltd_segment(&s, &e, &c, 1e-2).unwrap();
        if !out.converged {
            unconverged += 1;
        }
        worst_gap = worst_gap.max((out.max_thrust - c.a_t_max).abs());
        let (thrust, _) = thrust_and_speed_envelope(&Trajectory::from_segment(out.segment), 0.01, &c).unwrap();
        worst_excess = worst_excess.max(thrust - c.a_t_max);
    }
    let elapsed = clock.elapsed();
    (
        unconverged == 0 && worst_gap < 1e-2 && worst_excess <= 1e-2 && elapsed <= Duration::from_secs(30),
        format!(
            "1000 segments, {unconverged} unconverged, max |peak - A| {worst_gap:.2e}, max sampled excess {worst_excess:.2e}, {:.2} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn ltd_improvement() -> Outcome {
    let c = ThrustConfig::new(40.0, 0.0, DragParams::none(), Some(30.0)).unwrap();
    let mut rng = seeded_rng(3);
    let mut sum = 0.0;
    let mut slower = 0;
    for _ in 0..100 {
        let (s, e) = random_segment::<f64, _>(&mut rng, CUBE_EDGE, 30.0);
        let t_eq = equal_split_segment(&s, &e, &c).unwrap().0.duration;
        let t_ltd = ltd_segment(&s, &e, &c, 1e-2).unwrap().segment.duration;
        if t_ltd > t_eq + 1e-9 {
            slower += 1;
        }
        sum += (t_eq - t_ltd) / t_eq;
    }
    let mean = sum / 100.0;
    ((0.03..=0.30).contains(&mean) && slower == 0, format!("mean improvement {:.2}%, {slower} slower", 100.0 * mean))
}

fn gradient_correctness() -> Outcome {
    let mut rng = seeded_rng(4);
    let mut checked = 0;
    let mut worst = 0.0f64;
    let mut draws = 0;
    while checked < 1000 {
        draws += 1;
        let b = AxisBounds::<f64>::new(rng.gen_range(-30.0..-2.0), rng.gen_range(2.0..30.0), None).unwrap();
        let s = AxisState::<f64>::new(rng.gen_range(-15.0..15.0), rng.gen_range(-10.0..10.0));
        let e = AxisState::<f64>::new(rng.gen_range(-15.0..15.0), rng.gen_range(-10.0..10.0));
        let wrt = if rng.gen_bool(0.5) { VelocityEnd::End } else { VelocityEnd::Start };
        let v = match wrt {
            VelocityEnd::Start => s.velocity,
            VelocityEnd::End => e.velocity,
        };
        let g = duration_gradient(&s, &e, &b, wrt).unwrap();
        let fd = fd_gradient(&s, &e, &b, wrt, 1e-6 * v.abs().max(1.0)).unwrap();
        if g.kind != GradientKind::Smooth || !fd.reliable {
            continue;
        }
        checked += 1;
        worst = worst.max((g.value - fd.value).abs() / g.value.abs().max(1e-3));
    }
    (worst <= 1e-4, format!("{checked} instances ({draws} drawn), max relative error {worst:.2e}"))
}

fn monotonicity(suites: &[Suite]) -> Outcome {
    use pmm_planner::velocity::Termination;
    let mut bad = 0;
    let mut runs = 0;
    for s in suites {
        for r in &s.reports {
            for phase in [&r.phase_one, &r.phase_two] {
                runs += 1;
                let mono = phase.accepted_durations.windows(2).all(|w| w[1] <= w[0]);
                let ends = matches!(phase.termination, Termination::Converged | Termination::IterationCap);
                if !mono || !ends {
                    bad += 1;
                }
            }
        }
    }
    let path = WaypointPath::at_rest(vec![Vec3::zeros(), Vec3::new(5.0, 0.0, 0.0), Vec3::new(10.0, 0.0, 0.0)]).unwrap();
    let c = ThrustConfig::new(10.0 * 3f64.sqrt(), 0.0, DragParams::none(), None).unwrap();
    let r = optimize(&path, &OptimizerParams::phase_one(), &PlanMode::equal_split(&c).unwrap(), None).unwrap();
    let t = r.trajectory.total_duration;
    let mono = r.accepted_durations.windows(2).all(|w| w[1] <= w[0]);
    (
        bad == 0 && mono && (t - 2.0).abs() <= 1e-3,
        format!("{runs} optimizer runs, {bad} non-monotone or unterminated; collinear fixture {t:.6} s"),
    )
}

fn oracle_proximity() -> Outcome {
    let clock = Instant::now();
    let c = config(false, None);
    let mode = PlanMode::Ltd { config: c, eps_a: 1e-2 };
    let mut rng = seeded_rng(6);
    let mut worst = 0.0f64;
    let mut mean = 0.0;
    let mut budget_hits = 0;
    for k in 0..50 {
        let path: WaypointPath<f64> = random_path(&mut rng, 3 + k % 3, CUBE_EDGE, 1.0);
        let t_plan = plan(&path, &c, &PlanParams::default()).unwrap().trajectory.total_duration;
        let best = sampled_velocity_search(&path, &mode, &SearchGrid::default()).unwrap();
        if best.budget_exceeded {
            budget_hits += 1;
        }
        let ratio = t_plan / best.duration;
        worst = worst.max(ratio);
        mean += ratio / 50.0;
    }
    let elapsed = clock.elapsed();
    (
        worst <= 1.06 && elapsed <= Duration::from_secs(600),
        format!(
            "50 instances, plan/oracle mean {mean:.4} max {worst:.4}, {budget_hits} budget hits, {:.1} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn vertical_climb() -> Outcome {
    let s = pmm_planner::State3::at_rest(Vec3::zeros());
    let e = pmm_planner::State3::at_rest(Vec3::new(0.0, 0.0, 10.0));
    let out = ltd_segment(&s, &e, &config(false, None), 1e-2).unwrap();
    let t = out.segment.duration;
    let b = out.bounds[2];
    // the climb must also be exactly reachable at that duration on the z bounds
    let exact = reachable(0.0, 0.0, 10.0, t, b.a_min, b.a_max, 1e-9);
    (
        out.converged && (t - 1.126).abs() <= 1e-3 && (b.a_max - 24.525).abs() <= 1e-2 && (b.a_min + 44.145).abs() <= 1e-2 && exact,
        format!("T {t:.5} s, z bounds (+{:.4}, {:.4})", b.a_max, b.a_min),
    )
}

fn utilization(plain: &Suite, drag: &Suite) -> Outcome {
    let mean = |s: &Suite| s.reports.iter().map(|r| r.thrust_utilization(&s.config)).sum::<f64>() / s.reports.len() as f64;
    let (u0, u1) = (mean(plain), mean(drag));
    (u0 >= 0.99 && u1 >= 0.93, format!("{} {:.2}%, {} {:.2}%", plain.name, 100.0 * u0, drag.name, 100.0 * u1))
}

fn performance() -> Outcome {
    let c = config(false, None);
    let mut rng = seeded_rng(9);
    let segs: Vec<_> = (0..2000).map(|_| random_segment::<f64, _>(&mut rng, CUBE_EDGE, 10.0)).collect();
    let single = median(
        segs.iter()
            .map(|(s, e)| {
                let t = Instant::now();
                let out = ltd_segment(s, e, &c, 1e-2).unwrap();
                let dt = t.elapsed().as_secs_f64();
                std::hint::black_box(out);
                dt
            })
            .collect(),
    );
    let multi = median(
        (0..31)
            .map(|_| {
                let path: WaypointPath<f64> = random_path(&mut rng, 10, CUBE_EDGE, 1.0);
                let t = Instant::now();
                let r = plan(&path, &c, &PlanParams::default()).unwrap();
                let dt = t.elapsed().as_secs_f64();
                std::hint::black_box(r);
                dt
            })
            .collect(),
    );
    (
        single <= 100e-6 && multi <= 0.1,
        format!("single LTD median {:.1} us, 10-waypoint plan median {:.2} ms", single * 1e6, multi * 1e3),
    )
}

fn velocity_cap(suites: &[Suite]) -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    let mut plans = 0;
    for s in suites {
        let Some(vm) = s.config.v_max else { continue };
        for r in &s.reports {
            plans += 1;
            let (_, speed) = thrust_and_speed_envelope(&r.trajectory, 0.005, &s.config).unwrap();
            worst = worst.max(speed - vm);
        }
    }
    (plans > 0 && worst <= 1e-3, format!("{plans} capped plans, max speed excess {worst:.2e} m/s"))
}

fn main() {
    let plain = suite("no drag", config(false, None), 100, 10);
    let drag = suite("drag", config(true, None), 100, 11);
    let capped = suite("v_max 12", config(false, Some(12.0)), 100, 12);
    let capped_drag = suite("v_max 12 + drag", config(true, Some(12.0)), 50, 13);
    let all = [plain, drag, capped, capped_drag];

    let results: Vec<(&str, Outcome)> = vec![
        ("1 replay closure", replay_closure(&all)),
        ("2 thrust activation", thrust_activation()),
        ("3 LTD improvement", ltd_improvement()),
        ("4 gradient correctness", gradient_correctness()),
        ("5 optimizer monotonicity", monotonicity(&all)),
        ("6 oracle proximity", oracle_proximity()),
        ("7 vertical climb", vertical_climb()),
        ("8 thrust utilization", utilization(&all[0], &all[1])),
        ("9 performance", performance()),
        ("10 velocity cap", velocity_cap(&all)),
    ];
    let mut failed = 0;
    for (name, (ok, detail)) in &results {
        println!("{} criterion {name}: {detail}", if *ok { "PASS" } else { "FAIL" });
        if !ok {
            failed += 1;
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
