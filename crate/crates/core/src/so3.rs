//! Rotation group kernel: small fixed-size vectors and matrices, hat/vee,
//! exponential and logarithm maps, geodesics and the left Jacobian.
//!
//! Everything is generic over [`Real`], so the same code runs on `f32`,
//! `f64` and on derivative-carrying jets.

use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use crate::scalar::Real;

/// Below this squared angle the trigonometric coefficients are evaluated by
/// power series. The series are carried far enough that they are exact to
/// rounding on the whole range, which keeps second derivatives accurate.
const SERIES_SQ: f64 = 1e-2;
/// Past `PI - NEAR_PI` the axis of the logarithm comes from the symmetric part.
const NEAR_PI: f64 = 1e-3;
/// Past `PI - BRANCH_GUARD` the logarithm is ambiguous and rejected.
pub const BRANCH_GUARD: f64 = 1e-6;
/// Tolerance on `R^T R = I` and `det R = 1` for checked construction.
pub const ORTHO_TOL: f64 = 1e-12;
/// Largest symmetric part accepted by [`vee_matrix`].
pub const SKEW_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum So3Error {
    #[error("matrix is not skew-symmetric (symmetric part {0:.3e})")]
    NotSkew(f64),
    #[error("matrix is not a rotation (orthogonality defect {defect:.3e}, det {det})")]
    NotRotation { defect: f64, det: f64 },
    #[error("rotation angle {0} is too close to pi for a unique logarithm")]
    BranchAmbiguity(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vec3<T>(pub [T; 3]);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat3<T>(pub [[T; 3]; 3]);

/// A skew-symmetric 3x3 matrix stored by its axial vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Skew3<T>(Vec3<T>);

/// A 3x3 orthogonal matrix with unit determinant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation<T>(Mat3<T>);

impl<T: Real> Vec3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self([x, y, z])
    }
    pub fn zeros() -> Self {
        Self([T::zero(); 3])
    }
    pub fn unit(k: usize) -> Self {
        let mut v = Self::zeros();
        v.0[k] = T::one();
        v
    }
    pub fn lift(v: &Vec3<f64>) -> Self {
        Self(v.0.map(T::from_f64))
    }
    pub fn values(&self) -> Vec3<f64> {
        Vec3(self.0.map(|x| x.value()))
    }
    pub fn dot(&self, o: &Self) -> T {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }
    pub fn cross(&self, o: &Self) -> Self {
        let [a, b, c] = self.0;
        let [x, y, z] = o.0;
        Self([b * z - c * y, c * x - a * z, a * y - b * x])
    }
    pub fn norm_squared(&self) -> T {
        self.dot(self)
    }
    pub fn norm(&self) -> T {
        self.norm_squared().sqrt()
    }
    pub fn scale(&self, s: T) -> Self {
        Self(self.0.map(|x| x * s))
    }
}

impl Vec3<f64> {
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

impl<T> Index<usize> for Vec3<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T> IndexMut<usize> for Vec3<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.0[i]
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl<T: Real> AddAssign for Vec3<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self(self.0.map(|x| -x))
    }
}

impl<T: Real> Mat3<T> {
    pub fn zeros() -> Self {
        Self([[T::zero(); 3]; 3])
    }
    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..3 {
            m.0[i][i] = T::one();
        }
        m
    }
    pub fn lift(m: &Mat3<f64>) -> Self {
        Self(m.0.map(|r| r.map(T::from_f64)))
    }
    pub fn values(&self) -> Mat3<f64> {
        Mat3(self.0.map(|r| r.map(|x| x.value())))
    }
    pub fn from_columns(c: [Vec3<T>; 3]) -> Self {
        let mut m = Self::zeros();
        for j in 0..3 {
            for i in 0..3 {
                m.0[i][j] = c[j].0[i];
            }
        }
        m
    }
    pub fn column(&self, j: usize) -> Vec3<T> {
        Vec3([self.0[0][j], self.0[1][j], self.0[2][j]])
    }
    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[j][i];
            }
        }
        m
    }
    pub fn trace(&self) -> T {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }
    pub fn determinant(&self) -> T {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }
    pub fn scale(&self, s: T) -> Self {
        Self(self.0.map(|r| r.map(|x| x * s)))
    }
    pub fn mul_vec(&self, v: &Vec3<T>) -> Vec3<T> {
        let m = &self.0;
        Vec3([
            m[0][0] * v.0[0] + m[0][1] * v.0[1] + m[0][2] * v.0[2],
            m[1][0] * v.0[0] + m[1][1] * v.0[1] + m[1][2] * v.0[2],
            m[2][0] * v.0[0] + m[2][1] * v.0[1] + m[2][2] * v.0[2],
        ])
    }
    pub fn mul_mat(&self, o: &Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[i][0] * o.0[0][j] + self.0[i][1] * o.0[1][j] + self.0[i][2] * o.0[2][j];
            }
        }
        m
    }
    /// Frobenius inner product `A : B`.
    pub fn contract(&self, o: &Self) -> T {
        let mut s = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                s += self.0[i][j] * o.0[i][j];
            }
        }
        s
    }
}

impl Mat3<f64> {
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
    }
}

impl<T: Real> Add for Mat3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut m = self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] += o.0[i][j];
            }
        }
        m
    }
}

impl<T: Real> Sub for Mat3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + o.scale(-T::one())
    }
}

impl<T: Real> Mul for Mat3<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        self.mul_mat(&o)
    }
}

impl<T: Real> Mul<Vec3<T>> for Mat3<T> {
    type Output = Vec3<T>;
    fn mul(self, v: Vec3<T>) -> Vec3<T> {
        self.mul_vec(&v)
    }
}

impl<T: Real> Skew3<T> {
    pub fn axial(&self) -> Vec3<T> {
        self.0
    }
    pub fn matrix(&self) -> Mat3<T> {
        let [a, b, c] = self.0 .0;
        let z = T::zero();
        Mat3([[z, -c, b], [c, z, -a], [-b, a, z]])
    }
}

impl<T: Real> Rotation<T> {
    pub fn identity() -> Self {
        Self(Mat3::identity())
    }

    /// Checked construction from a matrix.
    pub fn from_matrix(m: Mat3<T>) -> Result<Self, So3Error> {
        let (defect, det) = orthogonality_defect(&m);
        let tol = ORTHO_TOL.max(1e3 * T::epsilon());
        if defect > tol || (det - 1.0).abs() > tol {
            return Err(So3Error::NotRotation { defect, det });
        }
        Ok(Self(m))
    }

    /// Construction without checking; the caller guarantees orthogonality.
    pub fn from_matrix_unchecked(m: Mat3<T>) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &Mat3<T> {
        &self.0
    }
    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }
    pub fn apply(&self, v: &Vec3<T>) -> Vec3<T> {
        self.0.mul_vec(v)
    }
    pub fn column(&self, j: usize) -> Vec3<T> {
        self.0.column(j)
    }
    pub fn lift(r: &Rotation<f64>) -> Self {
        Self(Mat3::lift(&r.0))
    }
    pub fn values(&self) -> Rotation<f64> {
        Rotation(self.0.values())
    }
}

impl<T: Real> Mul for Rotation<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self(self.0.mul_mat(&o.0))
    }
}

/// Max entry of `R^T R - I` and the determinant.
pub fn orthogonality_defect<T: Real>(m: &Mat3<T>) -> (f64, f64) {
    let mv = m.values();
    let g = mv.transpose().mul_mat(&mv) - Mat3::identity();
    (g.max_abs(), mv.determinant())
}

/// Gram-Schmidt orthonormalisation of the columns, keeping column 1's direction.
pub fn orthonormalize(m: &Mat3<f64>) -> Mat3<f64> {
    let c1 = m.column(0);
    let e1 = c1.scale(1.0 / c1.norm());
    let c2 = m.column(1);
    let c2 = c2 - e1.scale(e1.dot(&c2));
    let e2 = c2.scale(1.0 / c2.norm());
    let e3 = e1.cross(&e2);
    Mat3::from_columns([e1, e2, e3])
}

pub fn hat<T: Real>(v: &Vec3<T>) -> Skew3<T> {
    Skew3(*v)
}

pub fn vee<T: Real>(s: &Skew3<T>) -> Vec3<T> {
    s.0
}

/// Axial vector of a full matrix, rejecting matrices with a symmetric part.
pub fn vee_matrix<T: Real>(m: &Mat3<T>) -> Result<Vec3<T>, So3Error> {
    let mv = m.values();
    let sym = (mv + mv.transpose()).scale(0.5).max_abs();
    if sym > SKEW_TOL {
        return Err(So3Error::NotSkew(sym));
    }
    Ok(skew_axial(m))
}

/// Axial vector of the skew part of `m`.
pub fn skew_axial<T: Real>(m: &Mat3<T>) -> Vec3<T> {
    let half = T::from_f64(0.5);
    let a = &m.0;
    Vec3([(a[2][1] - a[1][2]) * half, (a[0][2] - a[2][0]) * half, (a[1][0] - a[0][1]) * half])
}

/// Evaluate `sum c_k x^k` by Horner's rule.
fn series<T: Real>(x: T, coeffs: &[f64]) -> T {
    let mut acc = T::from_f64(coeffs[coeffs.len() - 1]);
    for &c in coeffs[..coeffs.len() - 1].iter().rev() {
        acc = acc * x + T::from_f64(c);
    }
    acc
}

// sin(t)/t, (1 - cos t)/t^2 and (t - sin t)/t^3 as series in x = t^2.
const SINC: [f64; 8] = [
    1.0,
    -1.0 / 6.0,
    1.0 / 120.0,
    -1.0 / 5040.0,
    1.0 / 362880.0,
    -1.0 / 39916800.0,
    1.0 / 6227020800.0,
    -1.0 / 1307674368000.0,
];
const COSC: [f64; 8] = [
    1.0 / 2.0,
    -1.0 / 24.0,
    1.0 / 720.0,
    -1.0 / 40320.0,
    1.0 / 3628800.0,
    -1.0 / 479001600.0,
    1.0 / 87178291200.0,
    -1.0 / 20922789888000.0,
];
const SINC3: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 120.0,
    1.0 / 5040.0,
    -1.0 / 362880.0,
    1.0 / 39916800.0,
    -1.0 / 6227020800.0,
    1.0 / 1307674368000.0,
    -1.0 / 355687428096000.0,
];
// asin(s)/s as a series in s^2.
const ASINC: [f64; 9] = [
    1.0,
    1.0 / 6.0,
    3.0 / 40.0,
    5.0 / 112.0,
    35.0 / 1152.0,
    63.0 / 2816.0,
    231.0 / 13312.0,
    143.0 / 10240.0,
    6435.0 / 557056.0,
];

/// Returns `(sin t / t, (1 - cos t) / t^2)` for `x = t^2`.
fn rodrigues_coeffs<T: Real>(x: T) -> (T, T) {
    if x.value() < SERIES_SQ {
        (series(x, &SINC), series(x, &COSC))
    } else {
        let t = x.sqrt();
        let half = t * T::from_f64(0.5);
        let s = half.sin() / half;
        (t.sin() / t, s * s * T::from_f64(0.5))
    }
}

/// Exponential map `so(3) -> SO(3)`, Rodrigues' formula.
pub fn exp_so3<T: Real>(v: &Vec3<T>) -> Rotation<T> {
    let x = v.norm_squared();
    let (a, b) = rodrigues_coeffs(x);
    let k = hat(v).matrix();
    Rotation(Mat3::identity() + k.scale(a) + k.mul_mat(&k).scale(b))
}

/// Logarithm of a rotation, angle in `[0, pi)`.
pub fn log_so3<T: Real>(r: &Rotation<T>) -> Result<Vec3<T>, So3Error> {
    log_matrix(&r.0)
}

/// Logarithm of a matrix assumed to be a rotation.
pub fn log_matrix<T: Real>(m: &Mat3<T>) -> Result<Vec3<T>, So3Error> {
    let half = T::from_f64(0.5);
    let w = skew_axial(m);
    let c = (m.trace() - T::one()) * half;
    let s2 = w.norm_squared();
    let cv = c.value();
    if cv > 0.0 && s2.value() < SERIES_SQ {
        return Ok(w.scale(series(s2, &ASINC)));
    }
    let s = s2.sqrt();
    let theta = s.atan2(c);
    let tv = theta.value();
    if tv > core::f64::consts::PI - BRANCH_GUARD {
        return Err(So3Error::BranchAmbiguity(tv));
    }
    if tv < core::f64::consts::PI - NEAR_PI {
        return Ok(w.scale(theta / s));
    }
    // Near pi: u u^T = ((R + R^T)/2 - c I) / (1 - c).
    let sym = (*m + m.transpose()).scale(half);
    let denom = T::one() - c;
    let diag = [(sym.0[0][0] - c) / denom, (sym.0[1][1] - c) / denom, (sym.0[2][2] - c) / denom];
    let k = (0..3).max_by(|&i, &j| diag[i].value().partial_cmp(&diag[j].value()).unwrap()).unwrap();
    let uk = diag[k].sqrt();
    let mut u = Vec3::zeros();
    for i in 0..3 {
        u.0[i] = if i == k { uk } else { sym.0[k][i] / denom / uk };
    }
    if u.dot(&w).value() < 0.0 {
        u = -u;
    }
    Ok(u.scale(theta))
}

/// `exp(t log(R2 R1^T)) R1`.
pub fn geodesic<T: Real>(r1: &Rotation<T>, r2: &Rotation<T>, t: T) -> Result<Rotation<T>, So3Error> {
    let psi = log_so3(&(*r2 * r1.transpose()))?;
    Ok(exp_so3(&psi.scale(t)) * *r1)
}

/// Left Jacobian: `log(exp(psi + d) exp(psi)^T) ~ dexp(psi) d`.
pub fn dexp<T: Real>(psi: &Vec3<T>) -> Mat3<T> {
    let x = psi.norm_squared();
    let (_, b) = rodrigues_coeffs(x);
    let c = if x.value() < SERIES_SQ {
        series(x, &SINC3)
    } else {
        let t = x.sqrt();
        (t - t.sin()) / (t * x)
    };
    let k = hat(psi).matrix();
    Mat3::identity() + k.scale(b) + k.mul_mat(&k).scale(c)
}

/// Bi-invariant metric `1/2 Tr(u^T v)` on skew matrices.
pub fn so3_metric<T: Real>(u: &Skew3<T>, v: &Skew3<T>) -> T {
    u.matrix().contract(&v.matrix()) * T::from_f64(0.5)
}

/// The rotation of smallest angle taking `e_1` onto the unit vector `t`.
/// For `t` opposite to `e_1` the half turn about `e_3` is used.
pub fn align_first_axis(t: &Vec3<f64>) -> Rotation<f64> {
    let e1 = Vec3::unit(0);
    let t = t.scale(1.0 / t.norm());
    let axis = e1.cross(&t);
    let s = axis.norm();
    let c = e1.dot(&t);
    if s < 1e-14 {
        if c > 0.0 {
            return Rotation::identity();
        }
        return exp_so3(&Vec3::new(0.0, 0.0, core::f64::consts::PI));
    }
    let angle = s.atan2(c);
    exp_so3(&axis.scale(angle / s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_zero_is_identity() {
        assert_eq!(exp_so3(&Vec3::<f64>::zeros()), Rotation::identity());
    }

    #[test]
    fn quarter_turn_about_z() {
        let r = exp_so3(&Vec3::new(0.0, 0.0, core::f64::consts::FRAC_PI_2));
        let x = r.apply(&Vec3::new(1.0, 0.0, 0.0));
        assert!((x - Vec3::new(0.0, 1.0, 0.0)).max_abs() < 1e-15);
    }

    #[test]
    fn near_pi_branch_recovers_axis() {
        let axis = Vec3::new(1.0, -2.0, 0.5);
        let axis = axis.scale(1.0 / axis.norm());
        let v = axis.scale(core::f64::consts::PI - 2e-4);
        let back = log_so3(&exp_so3(&v)).unwrap();
        assert!((back - v).max_abs() < 1e-9);
    }

    #[test]
    fn branch_guard() {
        let v = Vec3::new(0.0, 0.0, core::f64::consts::PI - 5e-7);
        assert!(matches!(log_so3(&exp_so3(&v)), Err(So3Error::BranchAmbiguity(_))));
    }

    #[test]
    fn align_first_axis_maps_e1() {
        for t in [Vec3::new(0.3, -0.4, 0.8), Vec3::new(-1.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0)] {
            let r = align_first_axis(&t);
            let e = r.column(0);
            assert!((e - t.scale(1.0 / t.norm())).max_abs() < 1e-14);
        }
    }
}
