mod common;

use common::{close, replay_segment};
use pmm_planner::instances::seeded_rng;
use pmm_planner::{pmm_traj_3d, solve_min_time, solve_sync, AxisBounds, Role, State3, Vec3};
use proptest::prelude::*;
use rand::Rng;

fn vec3(r: std::ops::Range<f64>) -> impl Strategy<Value = Vec3<f64>> {
    (r.clone(), r.clone(), r).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn bounds3() -> impl Strategy<Value = [AxisBounds<f64>; 3]> {
    proptest::array::uniform3((-25.0..-3.0f64, 3.0..25.0f64).prop_map(|(lo, hi)| AxisBounds::new(lo, hi, None).unwrap()))
}

fn slowest(start: &State3<f64>, end: &State3<f64>, b: &[AxisBounds<f64>; 3]) -> f64 {
    (0..3).map(|i| solve_min_time(&start.axis(i), &end.axis(i), &b[i]).unwrap().duration()).fold(0.0, f64::max)
}

#[test]
fn second_axis_runs_at_half_acceleration() {
    let s = State3::at_rest(Vec3::zeros());
    let e = State3::at_rest(Vec3::new(10.0, 5.0, 0.0));
    let seg = pmm_traj_3d(&s, &e, &[AxisBounds::symmetric(10.0); 3]).unwrap();
    assert!(close(seg.duration, 2.0, 1e-12));
    assert_eq!(seg.axes[0].role, Role::Dictating);
    assert_eq!(seg.axes[1].role, Role::Synced);
    assert!(close(seg.axes[1].gamma, 0.5, 1e-12));
    assert_eq!(seg.axes[2].duration(), 2.0);
}

#[test]
fn infeasible_synchronization_raises_the_duration() {
    // search seeded instances for one whose slowest-axis duration cannot be
    // met by another axis
    let mut rng = seeded_rng(11);
    let b = [AxisBounds::symmetric(10.0); 3];
    let mut found = 0;
    for _ in 0..20_000 {
        let mut v = || Vec3::new(rng.gen_range(-9.0..9.0), rng.gen_range(-9.0..9.0), rng.gen_range(-9.0..9.0));
        let (v0, v1) = (v(), v());
        let p1 = Vec3::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let (s, e) = (State3::new(Vec3::zeros(), v0), State3::new(p1, v1));
        let t0 = slowest(&s, &e, &b);
        let stuck = (0..3).any(|i| !solve_sync(&s.axis(i), &e.axis(i), &b[i], t0).unwrap().is_feasible());
        if !stuck {
            continue;
        }
        found += 1;
        let seg = pmm_traj_3d(&s, &e, &b).unwrap();
        assert!(seg.duration > t0, "{} <= {t0}", seg.duration);
        for (i, ax) in seg.axes.iter().enumerate() {
            assert!(close(ax.duration(), seg.duration, 1e-9));
            assert!(solve_sync(&s.axis(i), &e.axis(i), &b[i], seg.duration).unwrap().is_feasible());
        }
        // no axis-wide feasible duration was skipped on a coarse scan
        let steps = 400;
        for k in 0..steps {
            let t = t0 + (seg.duration - t0) * k as f64 / steps as f64;
            if t >= seg.duration * (1.0 - 1e-6) {
                break;
            }
            let all = (0..3).all(|i| solve_sync(&s.axis(i), &e.axis(i), &b[i], t).unwrap().is_feasible());
            assert!(!all, "all axes feasible at {t} < {}", seg.duration);
        }
        if found >= 20 {
            break;
        }
    }
    assert!(found > 0, "no recovery instance in the search");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn synchronized_segments_are_consistent(
        p1 in vec3(-15.0..15.0), v0 in vec3(-8.0..8.0), v1 in vec3(-8.0..8.0), b in bounds3()
    ) {
        let s = State3::new(Vec3::zeros(), v0);
        let e = State3::new(p1, v1);
        let seg = pmm_traj_3d(&s, &e, &b).unwrap();
        let t_min = slowest(&s, &e, &b);
        prop_assert!(seg.duration >= t_min * (1.0 - 1e-12));
        prop_assert!(seg.axes.iter().any(|a| a.role == Role::Dictating));
        for ax in &seg.axes {
            prop_assert!(close(ax.duration(), seg.duration, 1e-9));
            prop_assert!(ax.gamma > 0.0 && ax.gamma <= 1.0);
        }
        let (p, v) = replay_segment(&seg);
        prop_assert!((p - e.p).norm() <= 1e-6 * e.p.norm().max(1.0));
        prop_assert!((v - e.v).norm() <= 1e-6 * e.v.norm().max(1.0));
    }
}
