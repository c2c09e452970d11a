//! Collective thrust acceleration with gravity and linear body-frame drag.

use crate::model::ThrustConfig;
use crate::scalar::{Mat3, Scalar, Vec3};

/// Minimal (tilt-only, zero heading) rotation taking world z onto `direction`.
///
/// Returns identity for a zero direction or one already along +z, and a
/// half-turn about x for -z.
pub fn tilt_rotation<S: Scalar>(direction: &Vec3<S>) -> Mat3<S> {
    let Some(n) = direction.normalized() else {
        return Mat3::identity();
    };
    let ez = Vec3::new(S::zero(), S::zero(), S::one());
    let axis = ez.cross(&n);
    let sin = axis.norm();
    let cos = n.z();
    if sin <= S::epsilon() {
        if cos > S::zero() {
            return Mat3::identity();
        }
        let (o, z) = (S::one(), S::zero());
        return Mat3([[o, z, z], [z, -o, z], [z, z, -o]]);
    }
    let k = axis * (S::one() / sin);
    // Rodrigues: I + sin K + (1 - cos) K^2
    let kx = Mat3([
        [S::zero(), -k.z(), k.y()],
        [k.z(), S::zero(), -k.x()],
        [-k.y(), k.x(), S::zero()],
    ]);
    let k2 = kx.mul_mat(&kx);
    let mut r = Mat3::identity();
    for i in 0..3 {
        for j in 0..3 {
            r.0[i][j] = r.0[i][j] + sin * kx.0[i][j] + (S::one() - cos) * k2.0[i][j];
        }
    }
    r
}

/// Drag acceleration `-R D Rᵀ v`, with `R` the tilt rotation of the pre-drag thrust direction `a - g`.
pub fn drag_acceleration<S: Scalar>(a: &Vec3<S>, v: &Vec3<S>, config: &ThrustConfig<S>) -> Vec3<S> {
    if !config.drag.is_enabled() {
        return Vec3::zeros();
    }
    let r = tilt_rotation(&(*a - config.gravity()));
    let body_v = r.transpose().mul_vec(v);
    let body_drag = Vec3(std::array::from_fn(|i| config.drag.coeffs[i] * body_v[i]));
    -r.mul_vec(&body_drag)
}

/// Thrust acceleration `a - d - g` required to follow acceleration `a` at velocity `v`.
pub fn thrust_accel<S: Scalar>(a: &Vec3<S>, v: &Vec3<S>, config: &ThrustConfig<S>) -> Vec3<S> {
    *a - drag_acceleration(a, v, config) - config.gravity()
}
