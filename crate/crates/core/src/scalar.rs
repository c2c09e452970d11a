//! Scalar abstraction and a small fixed-size 3-vector.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the planner can run on: `f32` or `f64`.
///
/// The tolerances are expressed per type so the same solver code stays
/// meaningful in single precision.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Slack accepted on "duration ≥ 0" before clamping to zero.
    const TIME_TOL: Self;
    /// Relative tolerance used to compare durations and velocities.
    const REL_TOL: Self;

    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Scalar for f64 {
    const TIME_TOL: f64 = 1e-9;
    const REL_TOL: f64 = 1e-9;
}

impl Scalar for f32 {
    const TIME_TOL: f32 = 1e-4;
    const REL_TOL: f32 = 1e-5;
}

/// Column 3-vector in the world frame (x, y, z with z up).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3<S>(pub [S; 3]);

impl<S: Scalar> Vec3<S> {
    #[inline]
    pub fn new(x: S, y: S, z: S) -> Self {
        Vec3([x, y, z])
    }

    #[inline]
    pub fn zeros() -> Self {
        Vec3([S::zero(); 3])
    }

    #[inline]
    pub fn x(&self) -> S {
        self.0[0]
    }

    #[inline]
    pub fn y(&self) -> S {
        self.0[1]
    }

    #[inline]
    pub fn z(&self) -> S {
        self.0[2]
    }

    #[inline]
    pub fn dot(&self, other: &Self) -> S {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn cross(&self, other: &Self) -> Self {
        let [a, b, c] = self.0;
        let [d, e, f] = other.0;
        Vec3([b * f - c * e, c * d - a * f, a * e - b * d])
    }

    #[inline]
    pub fn norm_squared(&self) -> S {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> S {
        self.norm_squared().sqrt()
    }

    /// Unit vector, or `None` for a (numerically) zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n > S::epsilon() {
            Some(*self * (S::one() / n))
        } else {
            None
        }
    }

    pub fn map(&self, f: impl Fn(S) -> S) -> Self {
        Vec3([f(self.0[0]), f(self.0[1]), f(self.0[2])])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn cast<T: Scalar>(&self) -> Vec3<T> {
        Vec3(self.0.map(|c| T::lit(c.as_f64())))
    }
}

impl<S: Scalar> Add for Vec3<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Vec3([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1], self.0[2] + rhs.0[2]])
    }
}

impl<S: Scalar> AddAssign for Vec3<S> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<S: Scalar> Sub for Vec3<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Vec3([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1], self.0[2] - rhs.0[2]])
    }
}

impl<S: Scalar> SubAssign for Vec3<S> {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<S: Scalar> Mul<S> for Vec3<S> {
    type Output = Self;
    fn mul(self, k: S) -> Self {
        self.map(|c| c * k)
    }
}

impl<S: Scalar> Neg for Vec3<S> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|c| -c)
    }
}

impl<S> Index<usize> for Vec3<S> {
    type Output = S;
    #[inline]
    fn index(&self, i: usize) -> &S {
        &self.0[i]
    }
}

impl<S> IndexMut<usize> for Vec3<S> {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut S {
        &mut self.0[i]
    }
}

impl<S: Scalar> From<[S; 3]> for Vec3<S> {
    fn from(a: [S; 3]) -> Self {
        Vec3(a)
    }
}

/// Row-major 3×3 matrix; only what the drag model needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3<S>(pub [[S; 3]; 3]);

impl<S: Scalar> Mat3<S> {
    pub fn identity() -> Self {
        let (o, z) = (S::one(), S::zero());
        Mat3([[o, z, z], [z, o, z], [z, z, o]])
    }

    pub fn diag(d: Vec3<S>) -> Self {
        let z = S::zero();
        Mat3([[d[0], z, z], [z, d[1], z], [z, z, d[2]]])
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Mat3([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    pub fn column(&self, j: usize) -> Vec3<S> {
        Vec3([self.0[0][j], self.0[1][j], self.0[2][j]])
    }

    pub fn mul_vec(&self, v: &Vec3<S>) -> Vec3<S> {
        let m = &self.0;
        Vec3([
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ])
    }

    pub fn mul_mat(&self, o: &Self) -> Self {
        let mut out = [[S::zero(); 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).map(|k| self.0[i][k] * o.0[k][j]).sum();
            }
        }
        Mat3(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_follows_right_hand_rule() {
        let x = Vec3::new(1.0, 0.0, 0.0);
        let y = Vec3::new(0.0, 1.0, 0.0);
        assert_eq!(x.cross(&y), Vec3::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn zero_vector_has_no_direction() {
        assert!(Vec3::<f64>::zeros().normalized().is_none());
        assert!(Vec3::<f32>::new(0.0, 3.0, 4.0).normalized().is_some());
    }
}
