//! Seeded random instances: positions uniform in a cube, boundary velocities
//! uniform per axis in `[-v_max/√3, v_max/√3]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::State3;
use crate::scalar::{Scalar, Vec3};
use crate::velocity::WaypointPath;

/// Edge length of the sampling cube, m.
pub const CUBE_EDGE: f64 = 15.0;

/// The generator used for every reproducible run.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn point<S: Scalar, R: Rng>(rng: &mut R, edge: f64) -> Vec3<S> {
    Vec3(std::array::from_fn(|_| S::lit(rng.gen_range(0.0..edge))))
}

fn velocity<S: Scalar, R: Rng>(rng: &mut R, v_max: f64) -> Vec3<S> {
    let c = v_max / 3f64.sqrt();
    Vec3(std::array::from_fn(|_| if c > 0.0 { S::lit(rng.gen_range(-c..=c)) } else { S::zero() }))
}

/// Random single segment.
pub fn random_segment<S: Scalar, R: Rng>(rng: &mut R, edge: f64, v_max: f64) -> (State3<S>, State3<S>) {
    let p0 = point(rng, edge);
    let v0 = velocity(rng, v_max);
    let p1 = point(rng, edge);
    let v1 = velocity(rng, v_max);
    (State3::new(p0, v0), State3::new(p1, v1))
}

/// Random path through `n` waypoints, at rest at both ends. Consecutive
/// waypoints are at least `min_spacing` apart.
pub fn random_path<S: Scalar, R: Rng>(rng: &mut R, n: usize, edge: f64, min_spacing: f64) -> WaypointPath<S> {
    let mut pts: Vec<Vec3<S>> = Vec::with_capacity(n);
    while pts.len() < n {
        let p = point::<S, _>(rng, edge);
        if let Some(last) = pts.last() {
            if (p - *last).norm().as_f64() < min_spacing {
                continue;
            }
        }
        pts.push(p);
    }
    WaypointPath::at_rest(pts).expect("distinct waypoints")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_instances() {
        let a: Vec<(State3<f64>, State3<f64>)> = {
            let mut r = seeded_rng(7);
            (0..5).map(|_| random_segment(&mut r, CUBE_EDGE, 10.0)).collect()
        };
        let mut r = seeded_rng(7);
        let b: Vec<(State3<f64>, State3<f64>)> = (0..5).map(|_| random_segment(&mut r, CUBE_EDGE, 10.0)).collect();
        assert_eq!(a, b);
        let lim = 10.0 / 3f64.sqrt();
        assert!(a.iter().all(|(s, e)| s.v.0.iter().chain(e.v.0.iter()).all(|c| c.abs() <= lim)));
    }

    #[test]
    fn path_spacing() {
        let mut r = seeded_rng(1);
        let p: WaypointPath<f64> = random_path(&mut r, 6, CUBE_EDGE, 2.0);
        assert_eq!(p.waypoints.len(), 6);
        assert!(p.waypoints.windows(2).all(|w| (w[1] - w[0]).norm() >= 2.0));
    }
}
