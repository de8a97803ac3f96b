//! Small dense complex matrices and an LU solver with a condition estimate.
//!
//! The matching systems solved here are a handful of unknowns wide, so the
//! 1-norm condition number is computed exactly from the explicit inverse.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
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

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Element-wise complex conjugate.
    pub fn conj(&self) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Largest element-wise distance to `other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    factors: CMatrix,
    perm: Vec<usize>,
}

impl Lu {
    /// Factorizes a square matrix. Exactly zero pivots report
    /// [`Error::SingularSystem`] with an infinite condition estimate.
    pub fn new(a: &CMatrix) -> Result<Self> {
        assert!(a.is_square(), "LU needs a square matrix");
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let (pivot, best) =
                (col..n)
                    .map(|r| (r, lu[(r, col)].norm()))
                    .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best == 0.0 {
                return Err(Error::SingularSystem {
                    condition: f64::INFINITY,
                });
            }
            if pivot != col {
                for j in 0..n {
                    let tmp = lu[(col, j)];
                    lu[(col, j)] = lu[(pivot, j)];
                    lu[(pivot, j)] = tmp;
                }
                perm.swap(col, pivot);
            }
            let diag = lu[(col, col)];
            for r in col + 1..n {
                let factor = lu[(r, col)] / diag;
                lu[(r, col)] = factor;
                for j in col + 1..n {
                    let upd = factor * lu[(col, j)];
                    lu[(r, j)] -= upd;
                }
            }
        }
        Ok(Lu { factors: lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let upd = self.factors[(i, j)] * x[j];
                x[i] -= upd;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let upd = self.factors[(i, j)] * x[j];
                x[i] -= upd;
            }
            x[i] /= self.factors[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> CMatrix {
        let n = self.dim();
        let mut inv = CMatrix::zeros(n, n);
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            e.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            e[j] = Complex64::new(1.0, 0.0);
            let col = self.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }
}

/// 1-norm condition number `‖A‖₁‖A⁻¹‖₁`.
pub fn condition_1(a: &CMatrix, lu: &Lu) -> f64 {
    a.norm1() * lu.inverse().norm1()
}

/// Solves `A x = b`, rejecting systems whose condition estimate exceeds
/// `max_condition`. One step of iterative refinement is applied.
pub fn solve_checked(a: &CMatrix, b: &[Complex64], max_condition: f64) -> Result<Vec<Complex64>> {
    let lu = Lu::new(a)?;
    let condition = condition_1(a, &lu);
    if !condition.is_finite() || condition > max_condition {
        return Err(Error::SingularSystem { condition });
    }
    let mut x = lu.solve(b);
    let ax = a.matvec(&x);
    let resid: Vec<Complex64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let dx = lu.solve(&resid);
    x.iter_mut().zip(&dx).for_each(|(xi, d)| *xi += d);
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn solves_small_complex_system() {
        let a = CMatrix::from_fn(3, 3, |i, j| match (i, j) {
            (0, 0) => c(0.0, 1.0),
            (0, 1) => c(2.0, 0.0),
            (1, 0) => c(1.0, -1.0),
            (1, 2) => c(0.5, 0.0),
            (2, 1) => c(-1.0, 0.0),
            (2, 2) => c(3.0, 2.0),
            _ => c(0.0, 0.0),
        });
        let x_true = [c(1.0, 2.0), c(-0.5, 0.25), c(0.0, -1.0)];
        let b = a.matvec(&x_true);
        let x = solve_checked(&a, &b, 1e12).unwrap();
        for (xi, ti) in x.iter().zip(&x_true) {
            assert!((xi - ti).norm() < 1e-14);
        }
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let a = CMatrix::from_fn(4, 4, |i, j| {
            c((i * 3 + j) as f64 % 5.0 - 1.0, (i as f64 - j as f64) * 0.3)
        });
        let lu = Lu::new(&a).unwrap();
        let inv = lu.inverse();
        let prod = CMatrix::from_fn(4, 4, |i, j| (0..4).map(|m| a[(i, m)] * inv[(m, j)]).sum());
        assert!(prod.max_abs_diff(&CMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn rank_deficient_is_rejected() {
        let a = CMatrix::from_fn(2, 2, |i, _| c(i as f64 + 1.0, 0.0));
        assert!(matches!(
            solve_checked(&a, &[c(1.0, 0.0), c(2.0, 0.0)], 1e12),
            Err(Error::SingularSystem { .. })
        ));
        let nearly = CMatrix::from_fn(2, 2, |i, j| {
            if (i, j) == (1, 1) {
                c(2.0 + 1e-14, 0.0)
            } else {
                c(i as f64 + 1.0, 0.0)
            }
        });
        assert!(matches!(
            solve_checked(&nearly, &[c(1.0, 0.0), c(2.0, 0.0)], 1e12),
            Err(Error::SingularSystem { .. })
        ));
    }
}
