mod common;

use common::close;
use pmm_planner::instances::{random_path, seeded_rng, CUBE_EDGE};
use pmm_planner::oracle::Tolerances;
use pmm_planner::velocity::Termination;
use pmm_planner::{
    evaluate, optimize, plan, sample, sampled_velocity_search, validate, DragParams, OptimizerParams, PlanMode,
    PlanParams, SearchGrid, ThrustConfig, Vec3, WaypointPath,
};

fn collinear() -> (WaypointPath<f64>, ThrustConfig<f64>) {
    let path = WaypointPath::at_rest(vec![Vec3::zeros(), Vec3::new(5.0, 0.0, 0.0), Vec3::new(10.0, 0.0, 0.0)]).unwrap();
    let c = ThrustConfig::new(10.0 * 3f64.sqrt(), 0.0, DragParams::none(), None).unwrap();
    (path, c)
}

fn non_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] <= w[0])
}

#[test]
fn collinear_fixture_reaches_two_seconds() {
    let (path, c) = collinear();
    let r = optimize(&path, &OptimizerParams::phase_one(), &PlanMode::equal_split(&c).unwrap(), None).unwrap();
    assert!((r.trajectory.total_duration - 2.0).abs() < 1e-3, "{}", r.trajectory.total_duration);
    assert!(non_increasing(&r.accepted_durations));
}

#[test]
fn oracle_agrees_on_the_collinear_fixture() {
    let (path, c) = collinear();
    let grid = SearchGrid { directions: 16, magnitudes: 6, ..SearchGrid::default() };
    let r = sampled_velocity_search(&path, &PlanMode::equal_split(&c).unwrap(), &grid).unwrap();
    assert!((r.duration - 2.0).abs() < 2e-2, "{}", r.duration);
    assert!(!r.budget_exceeded);
}

#[test]
fn plans_are_monotone_and_validate() {
    let mut rng = seeded_rng(3);
    let tol = Tolerances::default();
    for k in 0..12 {
        let drag = k % 2 == 1;
        let d = if drag { DragParams::reference() } else { DragParams::none() };
        let c = ThrustConfig::new(3.5 * 9.81, 9.81, d, Some(12.0)).unwrap();
        let path: WaypointPath<f64> = random_path(&mut rng, 3 + k % 4, CUBE_EDGE, 1.0);
        let r = plan(&path, &c, &PlanParams::default()).unwrap();
        for phase in [&r.phase_one, &r.phase_two] {
            assert!(non_increasing(&phase.accepted_durations), "{:?}", phase.accepted_durations);
            assert!(matches!(phase.termination, Termination::Converged | Termination::IterationCap));
        }
        let report = validate(&r.trajectory, &c, 0.01, true).unwrap();
        assert!(report.passes(&tol), "{report:?}");
    }
}

#[test]
fn single_precision_plan() {
    let path = WaypointPath::<f32>::at_rest(vec![
        Vec3::new(0.0, 0.0, 0.0),
        Vec3::new(4.0, 2.0, 1.0),
        Vec3::new(8.0, 0.0, 2.0),
    ])
    .unwrap();
    let r = plan(&path, &ThrustConfig::<f32>::reference(), &PlanParams::default()).unwrap();
    let r64 = plan(
        &WaypointPath::<f64>::at_rest(vec![Vec3::zeros(), Vec3::new(4.0, 2.0, 1.0), Vec3::new(8.0, 0.0, 2.0)]).unwrap(),
        &ThrustConfig::reference(),
        &PlanParams::default(),
    )
    .unwrap();
    let (t32, t64) = (r.trajectory.total_duration as f64, r64.trajectory.total_duration);
    assert!((t32 - t64).abs() < 2e-2 * t64, "{t32} vs {t64}");
}

#[test]
fn validation_catches_injected_faults() {
    let mut rng = seeded_rng(5);
    let c = ThrustConfig::reference();
    let path: WaypointPath<f64> = random_path(&mut rng, 4, CUBE_EDGE, 1.0);
    let good = plan(&path, &c, &PlanParams::default()).unwrap().trajectory;
    let tol = Tolerances::default();
    assert!(validate(&good, &c, 0.01, true).unwrap().passes(&tol));

    let mut stretched = good.clone();
    stretched.segments[1].axes[0].phases[0].duration += 0.01;
    let r = validate(&stretched, &c, 0.01, true).unwrap();
    assert!(!r.passes(&tol));
    assert!(r.max_position_gap > 1e-6 || r.max_duration_gap > 1e-6);

    let mut pushed = good.clone();
    for ph in pushed.segments[0].axes[2].phases.iter_mut() {
        ph.acceleration *= 1.5;
    }
    let r = validate(&pushed, &c, 0.01, true).unwrap();
    assert!(r.max_thrust_excess.unwrap() > 1e-2 || r.max_position_gap > 1e-6);
    assert!(!r.passes(&tol));
}

#[test]
fn evaluation_is_continuous_across_boundaries() {
    let mut rng = seeded_rng(8);
    let c = ThrustConfig::reference();
    let path: WaypointPath<f64> = random_path(&mut rng, 5, CUBE_EDGE, 1.0);
    let traj = plan(&path, &c, &PlanParams::default()).unwrap().trajectory;
    let mut t = 0.0;
    for seg in &traj.segments[..traj.segments.len() - 1] {
        t += seg.duration;
        let (a, b) = (evaluate(&traj, t - 1e-9).unwrap(), evaluate(&traj, t + 1e-9).unwrap());
        assert!((a.p - b.p).norm() < 1e-6 && (a.v - b.v).norm() < 1e-6);
    }
    let series = sample(&traj, 0.05, &c).unwrap();
    assert_eq!(series[0].t, 0.0);
    assert!(close(series.last().unwrap().t, traj.total_duration, 1e-12));
    assert!((series.last().unwrap().p - *path.waypoints.last().unwrap()).norm() < 1e-6);
    assert!(series.windows(2).all(|w| w[1].t > w[0].t));
}
