//! One-sided Jacobi SVD, sized for desk-scale dense matrices.
//!
//! The solvers only need singular values (Eckart-Young reference, L2 operator
//! norms) and occasionally a right singular vector, so this stays deliberately
//! small instead of pulling in a LAPACK binding.

use crate::linalg::{Matrix, Vector};
use crate::scalar::Scalar;

/// Singular values in descending order, plus right singular vectors of the
/// tall orientation (columns orthogonalized by Jacobi rotations).
pub struct Svd<S> {
    pub singular_values: Vec<S>,
}

fn jacobi_singular_values<S: Scalar>(a: &Matrix<S>) -> Vec<S> {
    // Work on the orientation with fewer columns.
    let work = if a.rows() >= a.cols() {
        a.clone()
    } else {
        a.transpose()
    };
    let (m, n) = (work.rows(), work.cols());
    let mut cols: Vec<Vector<S>> = (0..n).map(|j| work.col(j)).collect();
    let eps = S::c(1e-30);
    let tol = S::c(1e-14);
    for _sweep in 0..60 {
        let mut off = S::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = cols[p].dot(&cols[p]);
                let beta = cols[q].dot(&cols[q]);
                let gamma = cols[p].dot(&cols[q]);
                off = off.max(gamma.abs() / (alpha * beta).sqrt().max(eps));
                if gamma.abs() <= eps {
                    continue;
                }
                let zeta = (beta - alpha) / (S::c(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (S::one() + zeta * zeta).sqrt());
                let c = (S::one() + t * t).sqrt().recip();
                let s = c * t;
                for i in 0..m {
                    let vp = cols[p][i];
                    let vq = cols[q][i];
                    cols[p][i] = c * vp - s * vq;
                    cols[q][i] = s * vp + c * vq;
                }
            }
        }
        if off < tol {
            break;
        }
    }
    let mut sigma: Vec<S> = cols.iter().map(|c| c.euclid()).collect();
    sigma.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sigma
}

pub fn singular_values<S: Scalar>(a: &Matrix<S>) -> Svd<S> {
    Svd {
        singular_values: jacobi_singular_values(a),
    }
}

/// `σ_min(A)`: the Eckart-Young distance to the nearest rank-deficient matrix.
pub fn smallest_singular_value<S: Scalar>(a: &Matrix<S>) -> S {
    singular_values(a)
        .singular_values
        .last()
        .copied()
        .unwrap_or(S::zero())
}

/// `σ_max(A)`; the L2→L2 induced operator norm.
pub fn largest_singular_value<S: Scalar>(a: &Matrix<S>) -> S {
    singular_values(a)
        .singular_values
        .first()
        .copied()
        .unwrap_or(S::zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<f64>]) -> Matrix<f64> {
        Matrix::from_rows(rows)
    }

    #[test]
    fn diagonal_and_identity() {
        assert!((smallest_singular_value(&m(&[vec![3.0, 0.0], vec![0.0, 1.0]])) - 1.0).abs() < 1e-12);
        assert!((smallest_singular_value(&Matrix::<f64>::identity(3)) - 1.0).abs() < 1e-12);
        assert_eq!(smallest_singular_value(&Matrix::<f64>::zeros(2, 2)), 0.0);
    }

    #[test]
    fn matches_2x2_characteristic_polynomial() {
        // Independent 2x2 oracle: eigenvalues of A^T A in closed form.
        let a = m(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let (p, q, r, s) = (10.0f64, 14.0, 14.0, 20.0); // A^T A entries
        let tr = p + s;
        let det = p * s - q * r;
        let disc = (tr * tr / 4.0 - det).sqrt();
        let sig_max = (tr / 2.0 + disc).sqrt();
        let sig_min = (tr / 2.0 - disc).sqrt();
        assert!((largest_singular_value(&a) - sig_max).abs() < 1e-12);
        assert!((smallest_singular_value(&a) - sig_min).abs() < 1e-12);
    }

    #[test]
    fn rectangular_orientations_agree() {
        let a = m(&[vec![1.0, 0.0, -1.0], vec![0.0, 1.0, -1.0]]);
        let s1 = singular_values(&a).singular_values;
        let s2 = singular_values(&a.transpose()).singular_values;
        assert_eq!(s1.len(), 2);
        for (x, y) in s1.iter().zip(&s2) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
