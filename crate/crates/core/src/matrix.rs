//! Dense matrices over real or complex scalars.
//!
//! Everything here is small and dense: the operators in this crate are
//! finite models (matrices) or diagonal grid models, so a plain
//! row-major `Vec` is enough. No external linear-algebra crate is used
//! because the eigensolver itself is part of the library's surface.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex;
use num_traits::{Float, One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Element, Real};

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Element> Matrix<E> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![E::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = E::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<E>>) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::Dimension("matrix needs at least one row".into()));
        }
        let c = rows[0].len();
        if c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged or empty matrix rows".into()));
        }
        Ok(Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn diag(entries: &[E]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[E] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: E) -> Self {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= s;
        }
        out
    }

    pub fn matvec(&self, x: &[E]) -> Result<Vec<E>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!(
                "matvec: {}x{} matrix times length-{} vector",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = E::zero();
                for (j, &xj) in x.iter().enumerate() {
                    acc += self[(i, j)] * xj;
                }
                acc
            })
            .collect())
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "matmul: {}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == E::zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> E {
        let n = self.rows.min(self.cols);
        let mut t = E::zero();
        for i in 0..n {
            t += self[(i, i)];
        }
        t
    }

    pub fn frobenius_norm(&self) -> E::R {
        self.data
            .iter()
            .map(|v| v.modulus_sq())
            .fold(E::R::zero(), |a, b| a + b)
            .sqrt()
    }

    pub fn max_abs(&self) -> E::R {
        self.data
            .iter()
            .map(|v| v.modulus())
            .fold(E::R::zero(), |a, b| if b > a { b } else { a })
    }

    /// Largest singular value, computed by power iteration on `A* A`.
    ///
    /// Deterministic: the start vector is fixed. Converges to relative
    /// tolerance 1e-10 or errs after 10_000 iterations. The returned
    /// Rayleigh-quotient estimate never exceeds the true norm, so it is
    /// safe on the small side of a `<=` bound.
    pub fn operator_norm(&self) -> Result<E::R> {
        let n = self.cols;
        if n == 0 || self.rows == 0 {
            return Ok(E::R::zero());
        }
        let scale = self.max_abs();
        if scale == E::R::zero() {
            return Ok(E::R::zero());
        }
        let gram_vec = |x: &[E]| -> Result<Vec<E>> {
            let ax = self.matvec(x)?;
            self.conj_transpose().matvec(&ax)
        };
        // Fixed pseudo-random-ish start avoids orthogonality to the top
        // eigenvector for structured matrices while staying deterministic.
        let mut x: Vec<E> = (0..n)
            .map(|j| E::from_real(E::R::of(1.0 + (j as f64 * 0.7628).sin() * 0.25)))
            .collect();
        normalize(&mut x);
        let tol = E::R::of(1e-10);
        let mut prev = E::R::zero();
        for _ in 0..10_000 {
            let mut y = gram_vec(&x)?;
            let lambda = inner(&y, &x).modulus();
            let denom = if lambda > E::R::one() { lambda } else { E::R::one() };
            if (lambda - prev).abs() <= tol * denom {
                return Ok(lambda.sqrt());
            }
            prev = lambda;
            if normalize(&mut y) == E::R::zero() {
                // x is in the kernel of A*A; restart from a shifted basis
                // direction rather than dividing by zero.
                y = vec![E::zero(); n];
                y[0] = E::one();
            }
            x = y;
        }
        Err(Error::Convergence(
            "operator norm power iteration did not converge".into(),
        ))
    }
}

impl<F: Real> Matrix<F> {
    /// Lift a real matrix into the complex matrix with the same entries.
    pub fn complexify(&self) -> Matrix<Complex<F>> {
        Matrix::from_fn(self.rows, self.cols, |i, j| Complex::new(self[(i, j)], F::zero()))
    }

    /// Error unless the matrix is square and symmetric to within `tol`
    /// (absolute, entrywise).
    pub fn check_symmetric(&self, tol: F) -> Result<()> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "expected square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if (self[(i, j)] - self[(j, i)]).abs() > tol {
                    return Err(Error::NotSymmetric {
                        i,
                        j,
                        lower: self[(j, i)].as_f64(),
                        upper: self[(i, j)].as_f64(),
                    });
                }
            }
        }
        Ok(())
    }
}

impl<E> std::ops::Index<(usize, usize)> for Matrix<E> {
    type Output = E;
    fn index(&self, (i, j): (usize, usize)) -> &E {
        &self.data[i * self.cols + j]
    }
}

impl<E> std::ops::IndexMut<(usize, usize)> for Matrix<E> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut E {
        &mut self.data[i * self.cols + j]
    }
}

impl<E: Element> Add for &Matrix<E> {
    type Output = Matrix<E>;
    fn add(self, rhs: Self) -> Matrix<E> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix add shape");
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a += *b;
        }
        out
    }
}

impl<E: Element> Sub for &Matrix<E> {
    type Output = Matrix<E>;
    fn sub(self, rhs: Self) -> Matrix<E> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sub shape");
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a -= *b;
        }
        out
    }
}

impl<E: Element> Mul for &Matrix<E> {
    type Output = Matrix<E>;
    fn mul(self, rhs: Self) -> Matrix<E> {
        self.matmul(rhs).expect("matrix mul shape")
    }
}

impl<E: fmt::Debug> fmt::Debug for Matrix<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{:?} ", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Conjugate-linear in the second slot: `sum_i x_i * conj(y_i)`.
pub fn inner<E: Element>(x: &[E], y: &[E]) -> E {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = E::zero();
    for (&a, &b) in x.iter().zip(y) {
        acc += a * b.conj();
    }
    acc
}

pub fn norm2<E: Element>(x: &[E]) -> E::R {
    x.iter()
        .map(|v| v.modulus_sq())
        .fold(E::R::zero(), |a, b| a + b)
        .sqrt()
}

/// Normalizes in place; returns the prior norm (zero vector untouched).
pub fn normalize<E: Element>(x: &mut [E]) -> E::R {
    let n = norm2(x);
    if n > E::R::zero() {
        let inv = E::R::one() / n;
        for v in x.iter_mut() {
            *v = v.scale(inv);
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_and_identity() {
        let a = Matrix::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let i = Matrix::identity(2);
        assert_eq!(a.matmul(&i).unwrap(), a);
        let b = a.matmul(&a).unwrap();
        assert_eq!(b[(0, 0)], 7.0);
        assert_eq!(b[(0, 1)], 10.0);
        assert_eq!(b[(1, 0)], 15.0);
        assert_eq!(b[(1, 1)], 22.0);
    }

    #[test]
    fn operator_norm_diagonal() {
        let m = Matrix::diag(&[3.0f64, -7.0, 2.0]);
        let n = m.operator_norm().unwrap();
        assert!((n - 7.0).abs() < 1e-8, "norm {n}");
    }

    #[test]
    fn operator_norm_rotation_like() {
        // [[0, 2], [0.5, 0]] has singular values {2, 0.5}.
        let m = Matrix::from_rows(vec![vec![0.0f64, 2.0], vec![0.5, 0.0]]).unwrap();
        let n = m.operator_norm().unwrap();
        assert!((n - 2.0).abs() < 1e-8, "norm {n}");
    }

    #[test]
    fn operator_norm_never_exceeds_frobenius() {
        let m = Matrix::from_rows(vec![
            vec![1.0, 0.3, -0.2],
            vec![0.3, -2.0, 0.9],
            vec![-0.2, 0.9, 0.4],
        ])
        .unwrap();
        let op = m.operator_norm().unwrap();
        assert!(op <= m.frobenius_norm() + 1e-12);
    }

    #[test]
    fn symmetry_check() {
        let good = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 5.0]]).unwrap();
        good.check_symmetric(0.0).unwrap();
        let bad = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.1, 5.0]]).unwrap();
        assert!(bad.check_symmetric(1e-9).is_err());
    }

    #[test]
    fn complex_conj_transpose() {
        use num_complex::Complex;
        let m = Matrix::from_rows(vec![
            vec![Complex::new(1.0, 2.0), Complex::new(0.0, -1.0)],
            vec![Complex::new(3.0, 0.0), Complex::new(2.0, 2.0)],
        ])
        .unwrap();
        let h = m.conj_transpose();
        assert_eq!(h[(0, 1)], Complex::new(3.0, 0.0));
        assert_eq!(h[(1, 0)], Complex::new(0.0, 1.0));
    }
}
