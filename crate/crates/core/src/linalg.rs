//! Small dense linear algebra in arbitrary dimension.
//!
//! Everything here is sized for the handful of coordinates a simplex lives
//! in (typically 2 to 8). Determinants and linear solves share one partial
//! pivoting LU factorization.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pivots smaller than this fraction of the largest matrix entry are treated
/// as zero by [`Matrix::solve`].
pub const SINGULAR_PIVOT_FACTOR: f64 = 1e-12;

/// A point or displacement in `R^n`.
#[derive(Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Self {
        Vector(coords)
    }

    pub fn zeros(n: usize) -> Self {
        Vector(vec![0.0; n])
    }

    /// The `i`-th standard basis vector of `R^n`.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Largest absolute coordinate.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    pub fn distance(&self, other: &Vector) -> f64 {
        (self - other).norm()
    }

    pub fn scale(&self, k: f64) -> Vector {
        Vector(self.0.iter().map(|x| k * x).collect())
    }

    /// `self += k * other`
    pub fn axpy(&mut self, k: f64, other: &Vector) {
        debug_assert_eq!(self.dim(), other.dim());
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += k * b;
        }
    }

    /// Arithmetic mean of a non-empty set of points.
    pub fn mean<'a, I>(points: I) -> Vector
    where
        I: IntoIterator<Item = &'a Vector>,
    {
        let mut iter = points.into_iter();
        let first = iter.next().expect("mean of an empty point set");
        let mut acc = first.clone();
        let mut count = 1usize;
        for p in iter {
            acc += p;
            count += 1;
        }
        acc.scale(1.0 / count as f64)
    }

    pub(crate) fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: self.dim(),
            });
        }
        Ok(())
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        Vector(v)
    }
}

impl<const N: usize> From<[f64; N]> for Vector {
    fn from(v: [f64; N]) -> Self {
        Vector(v.to_vec())
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add<&Vector> for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), rhs.dim());
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub<&Vector> for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), rhs.dim());
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Add for Vector {
    type Output = Vector;
    fn add(self, rhs: Vector) -> Vector {
        &self + &rhs
    }
}

impl Sub for Vector {
    type Output = Vector;
    fn sub(self, rhs: Vector) -> Vector {
        &self - &rhs
    }
}

impl Mul<&Vector> for f64 {
    type Output = Vector;
    fn mul(self, rhs: &Vector) -> Vector {
        rhs.scale(self)
    }
}

impl Mul<Vector> for f64 {
    type Output = Vector;
    fn mul(self, rhs: Vector) -> Vector {
        rhs.scale(self)
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        self.scale(-1.0)
    }
}

impl AddAssign<&Vector> for Vector {
    fn add_assign(&mut self, rhs: &Vector) {
        self.axpy(1.0, rhs);
    }
}

impl SubAssign<&Vector> for Vector {
    fn sub_assign(&mut self, rhs: &Vector) {
        self.axpy(-1.0, rhs);
    }
}

/// Square matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, 1.0)
    }

    /// `lambda * I`
    pub fn scalar(n: usize, lambda: f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = lambda;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
            data.extend(row);
        }
        if !data.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFiniteInput("matrix"));
        }
        Ok(Matrix { n, data })
    }

    /// Builds a matrix whose rows are the given vectors.
    pub fn from_row_vectors(rows: &[Vector]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.as_slice().to_vec()).collect())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).map(<[f64]>::to_vec).collect()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn set_row(&mut self, i: usize, row: &[f64]) {
        self.data[i * self.n..(i + 1) * self.n].copy_from_slice(row);
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn mul_vec(&self, x: &Vector) -> Vector {
        debug_assert_eq!(self.n, x.dim());
        Vector::new(
            (0..self.n)
                .map(|i| self.row(i).iter().zip(x.as_slice()).map(|(a, b)| a * b).sum())
                .collect(),
        )
    }

    pub fn mul_mat(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn scale(&self, k: f64) -> Matrix {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|x| k * x).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.n, other.n);
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.scale(-1.0))
    }

    fn lu(&self) -> Lu {
        Lu::factor(self)
    }

    /// Determinant through partially pivoted LU. Exactly singular input gives 0.
    pub fn determinant(&self) -> f64 {
        self.lu().determinant()
    }

    /// Solves `self * x = rhs`.
    ///
    /// Fails with [`Error::SingularMatrix`] when a pivot falls below
    /// [`SINGULAR_PIVOT_FACTOR`] times the largest entry of the matrix.
    pub fn solve(&self, rhs: &Vector) -> Result<Vector> {
        rhs.check_dim(self.n)?;
        self.lu().solve(rhs)
    }

    /// Whether `self - (tr / n) I` is skew-symmetric up to `tol` in every entry.
    pub fn is_skew_symmetric_shifted(&self, tol: f64) -> bool {
        self.shifted_asymmetry() <= tol
    }

    /// Largest entry of `S + S^T` where `S = self - (tr / n) I`.
    pub fn shifted_asymmetry(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return 0.0;
        }
        let lambda = self.trace() / n as f64;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let shift = if i == j { 2.0 * lambda } else { 0.0 };
                worst = worst.max((self[(i, j)] + self[(j, i)] - shift).abs());
            }
        }
        worst
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        Matrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

/// In-place LU factorization `P A = L U` with unit lower-triangular `L`.
struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    sign: f64,
    scale: f64,
}

impl Lu {
    fn factor(m: &Matrix) -> Lu {
        let n = m.n;
        let mut lu = m.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[k * n + k].abs();
            for r in k + 1..n {
                let v = lu[r * n + k].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if p != k {
                for c in 0..n {
                    lu.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[k * n + k];
            if pivot == 0.0 {
                continue;
            }
            for r in k + 1..n {
                let factor = lu[r * n + k] / pivot;
                lu[r * n + k] = factor;
                if factor != 0.0 {
                    for c in k + 1..n {
                        lu[r * n + c] -= factor * lu[k * n + c];
                    }
                }
            }
        }
        Lu {
            n,
            lu,
            perm,
            sign,
            scale: m.max_abs(),
        }
    }

    fn pivot(&self, k: usize) -> f64 {
        self.lu[k * self.n + k]
    }

    fn determinant(&self) -> f64 {
        (0..self.n).fold(self.sign, |acc, k| acc * self.pivot(k))
    }

    fn solve(&self, rhs: &Vector) -> Result<Vector> {
        let n = self.n;
        let threshold = SINGULAR_PIVOT_FACTOR * self.scale;
        for k in 0..n {
            let pivot = self.pivot(k).abs();
            if pivot <= threshold || pivot == 0.0 {
                return Err(Error::SingularMatrix { pivot, threshold });
            }
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.pivot(i);
        }
        Ok(Vector::new(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(Matrix::identity(3).determinant(), 1.0);
        assert_eq!(m(&[&[0.0, 1.0], &[1.0, 0.0]]).determinant(), -1.0);
        assert_eq!(m(&[&[2.0, 0.0], &[0.0, 3.0]]).determinant(), 6.0);
        assert_eq!(m(&[&[1.0, 2.0], &[2.0, 4.0]]).determinant(), 0.0);
        assert_eq!(Matrix::zeros(3).determinant(), 0.0);
    }

    #[test]
    fn solve_examples() {
        let x = Matrix::identity(2).solve(&Vector::from([1.0, 2.0])).unwrap();
        assert_eq!(x, Vector::from([1.0, 2.0]));
        let x = m(&[&[2.0, 0.0], &[0.0, 4.0]])
            .solve(&Vector::from([2.0, 8.0]))
            .unwrap();
        assert_eq!(x, Vector::from([1.0, 2.0]));
        // x + y = 3, x - y = 1  =>  x = 2, y = 1
        let x = m(&[&[1.0, 1.0], &[1.0, -1.0]])
            .solve(&Vector::from([3.0, 1.0]))
            .unwrap();
        assert!((x[0] - 2.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn solve_rejects_singular() {
        let err = m(&[&[1.0, 2.0], &[2.0, 4.0]])
            .solve(&Vector::from([1.0, 1.0]))
            .unwrap_err();
        assert!(matches!(err, Error::SingularMatrix { .. }));
        // The threshold is relative: a tiny but well-conditioned matrix is fine.
        let tiny = Matrix::identity(3).scale(1e-200);
        assert!(tiny.solve(&Vector::from([1e-200, 0.0, 0.0])).is_ok());
        // ...while a near-rank-deficient one at unit scale is rejected.
        let near = m(&[&[1.0, 1.0], &[1.0, 1.0 + 1e-14]]);
        assert!(near.solve(&Vector::from([1.0, 1.0])).is_err());
    }

    #[test]
    fn solve_checks_dimension() {
        let err = Matrix::identity(2).solve(&Vector::zeros(3)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, actual: 3 });
    }

    #[test]
    fn from_rows_rejects_ragged_and_nan() {
        assert!(Matrix::from_rows(vec![vec![1.0, 2.0], vec![3.0]]).is_err());
        assert!(Matrix::from_rows(vec![vec![f64::NAN]]).is_err());
    }

    #[test]
    fn skew_shift_examples() {
        assert!(Matrix::scalar(4, 3.7).is_skew_symmetric_shifted(1e-12));
        assert!(m(&[&[0.0, -1.0], &[1.0, 0.0]]).is_skew_symmetric_shifted(1e-12));
        assert!(!m(&[&[1.0, 2.0], &[0.0, 1.0]]).is_skew_symmetric_shifted(1e-9));
        // skew + 2 I
        assert!(m(&[&[2.0, 0.5], &[-0.5, 2.0]]).is_skew_symmetric_shifted(1e-12));
        // skew + diag(1, 2) is not a scalar shift
        assert!(!m(&[&[1.0, 0.5], &[-0.5, 2.0]]).is_skew_symmetric_shifted(1e-9));
    }
}
