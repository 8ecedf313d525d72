//! Dense coordinate vectors and matrices with explicit dimensions.
//!
//! Desk-scale only: everything is row-major `Vec<S>` storage with O(n^3)
//! factorizations. Dimension mismatches panic; the boundaries that take user
//! input validate shapes before calling in here.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::scalar::Scalar;

/// Dense real vector.
#[derive(Clone, PartialEq)]
pub struct Vector<S> {
    data: Vec<S>,
}

impl<S: Scalar> Vector<S> {
    pub fn zeros(dim: usize) -> Self {
        Vector {
            data: vec![S::zero(); dim],
        }
    }

    pub fn from_slice(values: &[S]) -> Self {
        Vector {
            data: values.to_vec(),
        }
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize) -> S) -> Self {
        Vector {
            data: (0..dim).map(f).collect(),
        }
    }

    /// Standard basis vector `e_j`.
    pub fn basis(dim: usize, j: usize) -> Self {
        let mut v = Self::zeros(dim);
        v[j] = S::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, S> {
        self.data.iter()
    }

    pub fn dot(&self, other: &Self) -> S {
        assert_eq!(self.dim(), other.dim(), "dot: dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a * b)
            .sum()
    }

    pub fn scale(&self, factor: S) -> Self {
        Vector {
            data: self.data.iter().map(|&a| a * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "add: dimension mismatch");
        Vector {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "sub: dimension mismatch");
        Vector {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(-S::one())
    }

    pub fn max_abs(&self) -> S {
        self.data
            .iter()
            .fold(S::zero(), |acc, &a| acc.max(a.abs()))
    }

    pub fn is_zero(&self, tol: S) -> bool {
        self.max_abs() <= tol
    }

    /// Euclidean length; used by samplers and L2 norms.
    pub fn euclid(&self) -> S {
        self.data
            .iter()
            .map(|&a| a * a)
            .fold(S::zero(), |acc, x| acc + x)
            .sqrt()
    }
}

impl<S: Scalar> Index<usize> for Vector<S> {
    type Output = S;
    fn index(&self, i: usize) -> &S {
        &self.data[i]
    }
}

impl<S: Scalar> IndexMut<usize> for Vector<S> {
    fn index_mut(&mut self, i: usize) -> &mut S {
        &mut self.data[i]
    }
}

impl<S: fmt::Debug> fmt::Debug for Vector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Vector{:?}", self.data)
    }
}

/// Dense real matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(
            rows.iter().all(|row| row.len() == c),
            "from_rows: ragged rows"
        );
        Matrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Rank-one matrix `col * row^T`.
    pub fn outer(col: &Vector<S>, row: &Vector<S>) -> Self {
        Self::from_fn(col.dim(), row.dim(), |i, j| col[i] * row[j])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> Vector<S> {
        Vector::from_slice(&self.data[i * self.cols..(i + 1) * self.cols])
    }

    pub fn col(&self, j: usize) -> Vector<S> {
        Vector::from_fn(self.rows, |i| self[(i, j)])
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matvec(&self, x: &Vector<S>) -> Vector<S> {
        assert_eq!(self.cols, x.dim(), "matvec: dimension mismatch");
        Vector::from_fn(self.rows, |i| {
            (0..self.cols)
                .map(|j| self[(i, j)] * x[j])
                .fold(S::zero(), |acc, t| acc + t)
        })
    }

    /// `A^T x` without materializing the transpose.
    pub fn matvec_transpose(&self, x: &Vector<S>) -> Vector<S> {
        assert_eq!(self.rows, x.dim(), "matvec_transpose: dimension mismatch");
        Vector::from_fn(self.cols, |j| {
            (0..self.rows)
                .map(|i| self[(i, j)] * x[i])
                .fold(S::zero(), |acc, t| acc + t)
        })
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul: dimension mismatch");
        Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols)
                .map(|k| self[(i, k)] * other[(k, j)])
                .fold(S::zero(), |acc, t| acc + t)
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + other[(i, j)])
    }

    pub fn scale(&self, factor: S) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * factor)
    }

    pub fn max_abs(&self) -> S {
        self.data
            .iter()
            .fold(S::zero(), |acc, &a| acc.max(a.abs()))
    }

    pub fn is_zero(&self, tol: S) -> bool {
        self.max_abs() <= tol
    }

    /// Numerical rank by Gaussian elimination with partial pivoting.
    pub fn rank(&self, tol: S) -> usize {
        let mut a = self.clone();
        let scale = a.max_abs().max(S::one());
        let threshold = tol * scale;
        let mut rank = 0;
        let mut pivot_row = 0;
        for col in 0..a.cols {
            let best = (pivot_row..a.rows).max_by(|&i, &j| {
                a[(i, col)]
                    .abs()
                    .partial_cmp(&a[(j, col)].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            let Some(best) = best else { break };
            if a[(best, col)].abs() <= threshold {
                continue;
            }
            a.swap_rows(pivot_row, best);
            for i in (pivot_row + 1)..a.rows {
                let factor = a[(i, col)] / a[(pivot_row, col)];
                for j in col..a.cols {
                    let upd = a[(pivot_row, j)] * factor;
                    a[(i, j)] = a[(i, j)] - upd;
                }
            }
            rank += 1;
            pivot_row += 1;
            if pivot_row == a.rows {
                break;
            }
        }
        rank
    }

    /// Orthonormal basis of the null space (via elimination + Gram-Schmidt).
    pub fn null_space(&self, tol: S) -> Vec<Vector<S>> {
        let mut a = self.clone();
        let scale = a.max_abs().max(S::one());
        let threshold = tol * scale;
        let mut pivot_cols = Vec::new();
        let mut pivot_row = 0;
        for col in 0..a.cols {
            if pivot_row == a.rows {
                break;
            }
            let best = (pivot_row..a.rows)
                .max_by(|&i, &j| {
                    a[(i, col)]
                        .abs()
                        .partial_cmp(&a[(j, col)].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap();
            if a[(best, col)].abs() <= threshold {
                continue;
            }
            a.swap_rows(pivot_row, best);
            let pivot = a[(pivot_row, col)];
            for j in 0..a.cols {
                a[(pivot_row, j)] = a[(pivot_row, j)] / pivot;
            }
            for i in 0..a.rows {
                if i != pivot_row {
                    let factor = a[(i, col)];
                    if factor.abs() > S::zero() {
                        for j in 0..a.cols {
                            let upd = a[(pivot_row, j)] * factor;
                            a[(i, j)] = a[(i, j)] - upd;
                        }
                    }
                }
            }
            pivot_cols.push(col);
            pivot_row += 1;
        }
        let mut basis = Vec::new();
        for free in 0..a.cols {
            if pivot_cols.contains(&free) {
                continue;
            }
            let mut v = Vector::zeros(self.cols);
            v[free] = S::one();
            for (r, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -a[(r, free)];
            }
            let len = v.euclid();
            if len > S::zero() {
                basis.push(v.scale(len.recip()));
            }
        }
        basis
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for col in 0..self.cols {
            self.data.swap(i * self.cols + col, j * self.cols + col);
        }
    }
}

/// Solve `A x = b` for square `A` by Gaussian elimination with partial
/// pivoting; `None` when (numerically) singular.
pub fn solve_linear<S: Scalar>(a: &Matrix<S>, b: &Vector<S>) -> Option<Vector<S>> {
    let n = a.rows();
    assert_eq!(a.cols(), n, "solve_linear: square matrix required");
    assert_eq!(b.dim(), n, "solve_linear: rhs dimension mismatch");
    if n == 0 {
        return Some(Vector::zeros(0));
    }
    let mut work = a.clone();
    let mut rhs = b.clone();
    let threshold = S::c(1e-12) * work.max_abs().max(S::one());
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                work[(i, col)]
                    .abs()
                    .partial_cmp(&work[(j, col)].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        if work[(pivot, col)].abs() <= threshold {
            return None;
        }
        work.swap_rows(pivot, col);
        let (pi, ci) = (rhs[pivot], rhs[col]);
        rhs[pivot] = ci;
        rhs[col] = pi;
        for i in (col + 1)..n {
            let factor = work[(i, col)] / work[(col, col)];
            for j in col..n {
                let upd = work[(col, j)] * factor;
                work[(i, j)] = work[(i, j)] - upd;
            }
            let upd = rhs[col] * factor;
            rhs[i] = rhs[i] - upd;
        }
    }
    let mut x = Vector::zeros(n);
    for col in (0..n).rev() {
        let mut acc = rhs[col];
        for j in (col + 1)..n {
            acc = acc - work[(col, j)] * x[j];
        }
        x[col] = acc / work[(col, col)];
    }
    Some(x)
}

impl<S: Scalar> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<S: Scalar> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<S: fmt::Debug> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_null_space() {
        let a: Matrix<f64> = Matrix::from_rows(&[vec![1.0, 0.0, -1.0], vec![0.0, 1.0, -1.0]]);
        assert_eq!(a.rank(1e-12), 2);
        let ns = a.null_space(1e-12);
        assert_eq!(ns.len(), 1);
        assert!(a.matvec(&ns[0]).max_abs() < 1e-12);
    }

    #[test]
    fn outer_product_action() {
        let t: Matrix<f64> = Matrix::outer(
            &Vector::from_slice(&[0.0, 1.0]),
            &Vector::from_slice(&[1.0, 0.0]),
        );
        let applied = t.matvec(&Vector::from_slice(&[1.0, 5.0]));
        assert_eq!(applied.as_slice(), &[0.0, 1.0]);
    }
}
