//! Closed-form linear algebra for 3×3 Hermitian matrices.
//!
//! Only the six independent entries are stored: the real diagonal and the
//! upper off-diagonal. The lower triangle is implied by conjugation, so every
//! value of [`HermitianMatrix3`] is Hermitian by construction.

use core::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::math;

pub type Complex = num_complex::Complex64;

/// Below this absolute determinant a matrix is singular.
pub const DET_ABS_TOL: f64 = 1e-300;
/// A pivot smaller than this fraction of the largest diagonal entry is singular.
pub const PIVOT_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianMatrix3 {
    /// Real diagonal `(C11, C22, C33)`.
    pub d: [f64; 3],
    pub o12: Complex,
    pub o13: Complex,
    pub o23: Complex,
}

impl Default for HermitianMatrix3 {
    fn default() -> Self {
        Self::zero()
    }
}

impl HermitianMatrix3 {
    pub const fn new(d: [f64; 3], o12: Complex, o13: Complex, o23: Complex) -> Self {
        Self { d, o12, o13, o23 }
    }

    pub const fn zero() -> Self {
        Self::diag(0.0, 0.0, 0.0)
    }

    pub const fn identity() -> Self {
        Self::diag(1.0, 1.0, 1.0)
    }

    pub const fn diag(d1: f64, d2: f64, d3: f64) -> Self {
        let z = Complex::new(0.0, 0.0);
        Self { d: [d1, d2, d3], o12: z, o13: z, o23: z }
    }

    /// Builds from the on-disk layout
    /// `[C11, C22, C33, Re C12, Im C12, Re C13, Im C13, Re C23, Im C23]`.
    pub const fn from_array9(v: [f64; 9]) -> Self {
        Self {
            d: [v[0], v[1], v[2]],
            o12: Complex::new(v[3], v[4]),
            o13: Complex::new(v[5], v[6]),
            o23: Complex::new(v[7], v[8]),
        }
    }

    pub const fn to_array9(&self) -> [f64; 9] {
        [self.d[0], self.d[1], self.d[2], self.o12.re, self.o12.im, self.o13.re, self.o13.im, self.o23.re, self.o23.im]
    }

    /// Outer product `s s*` of a column vector.
    pub fn outer(s: &[Complex; 3]) -> Self {
        Self {
            d: [s[0].norm_sqr(), s[1].norm_sqr(), s[2].norm_sqr()],
            o12: s[0] * s[1].conj(),
            o13: s[0] * s[2].conj(),
            o23: s[1] * s[2].conj(),
        }
    }

    /// Entry `(i, j)` of the full matrix, zero-based.
    pub fn get(&self, i: usize, j: usize) -> Complex {
        match (i, j) {
            (0, 0) | (1, 1) | (2, 2) => Complex::new(self.d[i], 0.0),
            (0, 1) => self.o12,
            (0, 2) => self.o13,
            (1, 2) => self.o23,
            (1, 0) => self.o12.conj(),
            (2, 0) => self.o13.conj(),
            (2, 1) => self.o23.conj(),
            _ => panic!("index ({i}, {j}) out of range for a 3x3 matrix"),
        }
    }

    /// Full dense representation, row-major.
    pub fn to_dense(&self) -> [[Complex; 3]; 3] {
        let mut out = [[Complex::new(0.0, 0.0); 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.get(i, j);
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.to_array9().iter().all(|v| v.is_finite())
    }

    pub fn trace(&self) -> f64 {
        self.d[0] + self.d[1] + self.d[2]
    }

    /// `tr(self · other)`, real for Hermitian operands.
    pub fn trace_product(&self, other: &Self) -> f64 {
        let diag = self.d[0] * other.d[0] + self.d[1] * other.d[1] + self.d[2] * other.d[2];
        let off =
            (self.o12 * other.o12.conj()).re + (self.o13 * other.o13.conj()).re + (self.o23 * other.o23.conj()).re;
        diag + 2.0 * off
    }

    pub fn determinant(&self) -> f64 {
        let [a, b, c] = self.d;
        let (x, y, z) = (self.o12, self.o13, self.o23);
        a * b * c - a * z.norm_sqr() - b * y.norm_sqr() - c * x.norm_sqr() + 2.0 * (x * z * y.conj()).re
    }

    fn leading_minors(&self) -> [f64; 3] {
        [self.d[0], self.d[0] * self.d[1] - self.o12.norm_sqr(), self.determinant()]
    }

    /// Sylvester's criterion: all three leading principal minors strictly positive.
    pub fn is_positive_definite(&self) -> bool {
        self.is_finite() && self.leading_minors().iter().all(|&m| m > 0.0)
    }

    fn max_abs_diag(&self) -> f64 {
        self.d.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    /// Cofactor inverse.
    ///
    /// Fails with [`Error::SingularMatrix`] when `|det| < 1e-300`, or when the
    /// matrix is positive definite but one of its elimination pivots is below
    /// `1e-12` times the largest diagonal entry.
    pub fn inverse(&self) -> Result<Self> {
        let det = self.determinant();
        if !det.is_finite() || det.abs() < DET_ABS_TOL {
            return Err(Error::SingularMatrix);
        }
        let [m1, m2, m3] = self.leading_minors();
        if m1 > 0.0 && m2 > 0.0 && m3 > 0.0 {
            let min_pivot = m1.min(m2 / m1).min(m3 / m2);
            if min_pivot < PIVOT_REL_TOL * self.max_abs_diag() {
                return Err(Error::SingularMatrix);
            }
        }
        let [a, b, c] = self.d;
        let (x, y, z) = (self.o12, self.o13, self.o23);
        let r = 1.0 / det;
        Ok(Self {
            d: [(b * c - z.norm_sqr()) * r, (a * c - y.norm_sqr()) * r, (a * b - x.norm_sqr()) * r],
            o12: (y * z.conj() - x * c) * r,
            o13: (x * z - y * b) * r,
            o23: (x.conj() * y - z * a) * r,
        })
    }

    /// Lower-triangular `A` with positive real diagonal such that `A·A* = self`.
    pub fn cholesky(&self) -> Result<CholeskyFactor> {
        if !self.is_finite() {
            return Err(Error::NotPositiveDefinite);
        }
        let tol = PIVOT_REL_TOL * self.max_abs_diag();
        let p1 = self.d[0];
        if !(p1 > tol) {
            return Err(Error::NotPositiveDefinite);
        }
        let l11 = math::sqrt(p1);
        let l21 = self.o12.conj() / l11;
        let l31 = self.o13.conj() / l11;
        let p2 = self.d[1] - l21.norm_sqr();
        if !(p2 > tol) {
            return Err(Error::NotPositiveDefinite);
        }
        let l22 = math::sqrt(p2);
        let l32 = (self.o23.conj() - l31 * l21.conj()) / l22;
        let p3 = self.d[2] - l31.norm_sqr() - l32.norm_sqr();
        if !(p3 > tol) {
            return Err(Error::NotPositiveDefinite);
        }
        let l33 = math::sqrt(p3);
        Ok(CholeskyFactor { diag: [l11, l22, l33], l21, l31, l32 })
    }

    /// Squared Frobenius norm.
    pub fn norm_sqr(&self) -> f64 {
        self.d.iter().map(|v| v * v).sum::<f64>()
            + 2.0 * (self.o12.norm_sqr() + self.o13.norm_sqr() + self.o23.norm_sqr())
    }

    pub fn frobenius_norm(&self) -> f64 {
        math::sqrt(self.norm_sqr())
    }

    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        (*self - *other).frobenius_norm()
    }

    /// `(1 - t)·self + t·other`.
    pub fn convex_combine(&self, other: &Self, t: f64) -> Self {
        *self * (1.0 - t) + *other * t
    }

    pub fn scale(&self, c: f64) -> Self {
        *self * c
    }
}

impl Add for HermitianMatrix3 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            d: [self.d[0] + rhs.d[0], self.d[1] + rhs.d[1], self.d[2] + rhs.d[2]],
            o12: self.o12 + rhs.o12,
            o13: self.o13 + rhs.o13,
            o23: self.o23 + rhs.o23,
        }
    }
}

impl AddAssign for HermitianMatrix3 {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for HermitianMatrix3 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for HermitianMatrix3 {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl Mul<f64> for HermitianMatrix3 {
    type Output = Self;
    fn mul(self, c: f64) -> Self {
        Self {
            d: [self.d[0] * c, self.d[1] * c, self.d[2] * c],
            o12: self.o12 * c,
            o13: self.o13 * c,
            o23: self.o23 * c,
        }
    }
}

/// Lower-triangular Cholesky factor of a [`HermitianMatrix3`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CholeskyFactor {
    pub diag: [f64; 3],
    pub l21: Complex,
    pub l31: Complex,
    pub l32: Complex,
}

impl CholeskyFactor {
    /// `A·u`.
    pub fn apply(&self, u: &[Complex; 3]) -> [Complex; 3] {
        [
            u[0] * self.diag[0],
            self.l21 * u[0] + u[1] * self.diag[1],
            self.l31 * u[0] + self.l32 * u[1] + u[2] * self.diag[2],
        ]
    }

    /// Dense lower-triangular matrix, row-major.
    pub fn to_dense(&self) -> [[Complex; 3]; 3] {
        let z = Complex::new(0.0, 0.0);
        let r = |v: f64| Complex::new(v, 0.0);
        [[r(self.diag[0]), z, z], [self.l21, r(self.diag[1]), z], [self.l31, self.l32, r(self.diag[2])]]
    }

    /// `A·A*`.
    pub fn reconstruct(&self) -> HermitianMatrix3 {
        let a = self.to_dense();
        let entry = |i: usize, j: usize| -> Complex { (0..3).map(|k| a[i][k] * a[j][k].conj()).sum() };
        HermitianMatrix3 {
            d: [entry(0, 0).re, entry(1, 1).re, entry(2, 2).re],
            o12: entry(0, 1),
            o13: entry(0, 2),
            o23: entry(1, 2),
        }
    }
}
