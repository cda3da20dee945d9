//! Small fixed-size linear algebra for E4.

use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Residual norm below which [`gram_schmidt`] reports linear dependence.
pub const DEPENDENCE_THRESHOLD: f64 = 1e-10;

/// A point or vector in four-dimensional Euclidean space.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec4<T> {
    pub x: T,
    pub y: T,
    pub z: T,
    pub w: T,
}

impl<T: Scalar> Vec4<T> {
    pub const fn new(x: T, y: T, z: T, w: T) -> Self {
        Self { x, y, z, w }
    }

    /// Like [`Vec4::new`] but rejects non-finite components.
    pub fn try_new(x: T, y: T, z: T, w: T) -> Option<Self> {
        let v = Self::new(x, y, z, w);
        v.is_finite().then_some(v)
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    /// The `i`-th standard basis vector, `i` in `0..4`.
    pub fn basis(i: usize) -> Self {
        let mut a = [T::zero(); 4];
        a[i] = T::one();
        Self::from_array(a)
    }

    pub fn from_array(a: [T; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [T; 4] {
        [self.x, self.y, self.z, self.w]
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z + self.w * o.w
    }

    pub fn norm_squared(self) -> T {
        self.dot(self)
    }

    pub fn norm(self) -> T {
        self.norm_squared().sqrt()
    }

    /// Largest absolute component.
    pub fn max_abs(self) -> T {
        self.x.abs().max(self.y.abs()).max(self.z.abs()).max(self.w.abs())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite() && self.w.is_finite()
    }

    pub fn map(self, f: impl Fn(T) -> T) -> Self {
        Self::new(f(self.x), f(self.y), f(self.z), f(self.w))
    }

    pub fn cast<U: Scalar>(self) -> Vec4<U> {
        Vec4::new(
            U::lit(self.x.as_f64()),
            U::lit(self.y.as_f64()),
            U::lit(self.z.as_f64()),
            U::lit(self.w.as_f64()),
        )
    }
}

impl<T> Index<usize> for Vec4<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            3 => &self.w,
            _ => panic!("Vec4 index {i} out of range"),
        }
    }
}

impl<T: Scalar> Add for Vec4<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z, self.w + o.w)
    }
}

impl<T: Scalar> AddAssign for Vec4<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Scalar> Sub for Vec4<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z, self.w - o.w)
    }
}

impl<T: Scalar> SubAssign for Vec4<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Scalar> Neg for Vec4<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z, -self.w)
    }
}

impl<T: Scalar> Mul<T> for Vec4<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        self.map(|c| c * k)
    }
}

impl<T: Scalar> Div<T> for Vec4<T> {
    type Output = Self;
    fn div(self, k: T) -> Self {
        self.map(|c| c / k)
    }
}

fn det3<T: Scalar>(m: [[T; 3]; 3]) -> T {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Minor of the 3x4 matrix with rows `u, v, w` obtained by deleting column `skip`.
fn minor<T: Scalar>(u: Vec4<T>, v: Vec4<T>, w: Vec4<T>, skip: usize) -> T {
    let pick = |a: Vec4<T>| {
        let a = a.to_array();
        let mut out = [T::zero(); 3];
        let mut k = 0;
        for (c, &x) in a.iter().enumerate() {
            if c != skip {
                out[k] = x;
                k += 1;
            }
        }
        out
    };
    det3([pick(u), pick(v), pick(w)])
}

/// Ternary cross product in E4.
///
/// Formal cofactor expansion of `det[[e1, e2, e3, e4], u, v, w]` along the
/// basis row, so that `<ternary_cross(u, v, w), z> = det[z; u; v; w]`.
pub fn ternary_cross<T: Scalar>(u: Vec4<T>, v: Vec4<T>, w: Vec4<T>) -> Vec4<T> {
    Vec4::new(
        minor(u, v, w, 0),
        -minor(u, v, w, 1),
        minor(u, v, w, 2),
        -minor(u, v, w, 3),
    )
}

/// Determinant of the 4x4 matrix with the given rows.
pub fn det4<T: Scalar>(a: Vec4<T>, b: Vec4<T>, c: Vec4<T>, d: Vec4<T>) -> T {
    a.dot(ternary_cross(b, c, d))
}

/// Orthonormalizes `vs` in order (modified Gram-Schmidt with one
/// re-orthogonalization pass), preserving the flag of spans.
pub fn gram_schmidt<T: Scalar>(vs: &[Vec4<T>]) -> Result<Vec<Vec4<T>>> {
    let threshold = T::lit(DEPENDENCE_THRESHOLD);
    let mut out: Vec<Vec4<T>> = Vec::with_capacity(vs.len());
    for (index, &v) in vs.iter().enumerate() {
        let mut r = v;
        for _ in 0..2 {
            for &q in &out {
                r -= q * q.dot(r);
            }
        }
        let n = r.norm();
        if !(n >= threshold) {
            return Err(Error::DegenerateInput {
                index,
                residual: n.as_f64(),
            });
        }
        out.push(r / n);
    }
    Ok(out)
}

/// Largest deviation of the Gram matrix of `vs` from the identity.
pub fn gram_deviation<T: Scalar>(vs: &[Vec4<T>]) -> T {
    let mut worst = T::zero();
    for (i, a) in vs.iter().enumerate() {
        for (j, b) in vs.iter().enumerate() {
            let target = if i == j { T::one() } else { T::zero() };
            worst = worst.max((a.dot(*b) - target).abs());
        }
    }
    worst
}

/// 2x2 real matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2<T> {
    pub a11: T,
    pub a12: T,
    pub a21: T,
    pub a22: T,
}

impl<T: Scalar> Mat2<T> {
    pub fn new(a11: T, a12: T, a21: T, a22: T) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub fn det(&self) -> T {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn trace(&self) -> T {
        self.a11 + self.a22
    }
}

/// 2x3 real matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2x3<T> {
    pub rows: [[T; 3]; 2],
}

impl<T: Scalar> Mat2x3<T> {
    pub fn new(rows: [[T; 3]; 2]) -> Self {
        Self { rows }
    }

    /// Max-norm: largest absolute entry.
    pub fn max_norm(&self) -> T {
        self.rows.iter().flatten().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    /// The three 2x2 minors, columns (0,1), (0,2), (1,2).
    pub fn minors(&self) -> [T; 3] {
        let r = &self.rows;
        let m = |a: usize, b: usize| r[0][a] * r[1][b] - r[0][b] * r[1][a];
        [m(0, 1), m(0, 2), m(1, 2)]
    }
}

/// Numerical rank of a 2x3 matrix.
///
/// Rank 2 iff some 2x2 minor exceeds `tol * ||m||^2`; rank at least 1 iff some
/// entry exceeds `tol * (1 + ||m||)`, with `||m||` the max-norm.
pub fn rank_2x3<T: Scalar>(m: &Mat2x3<T>, tol: T) -> u8 {
    let norm = m.max_norm();
    if m.minors().iter().any(|d| d.abs() > tol * norm * norm) {
        2
    } else if m.rows.iter().flatten().any(|x| x.abs() > tol * (T::one() + norm)) {
        1
    } else {
        0
    }
}
