//! Norms, dual norms, norming functionals, and unit-ball extreme points.

use std::fmt;

use crate::linalg::Vector;
use crate::scalar::Scalar;

/// Absolute tolerance for comparisons against zero in norm logic.
pub const ZERO_TOL: f64 = 1e-12;

/// The three supported coordinate norms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NormKind {
    L1,
    L2,
    Linf,
}

impl NormKind {
    /// Dual pairing: `dual(L1) = Linf`, `dual(Linf) = L1`, `dual(L2) = L2`.
    pub fn dual(self) -> NormKind {
        match self {
            NormKind::L1 => NormKind::Linf,
            NormKind::L2 => NormKind::L2,
            NormKind::Linf => NormKind::L1,
        }
    }

    /// Whether the unit ball is a polytope (finitely many extreme points).
    pub fn is_polyhedral(self) -> bool {
        !matches!(self, NormKind::L2)
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::L1 => write!(f, "l1"),
            NormKind::L2 => write!(f, "l2"),
            NormKind::Linf => write!(f, "linf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormError {
    /// The norming functional of the zero vector is undefined.
    ZeroVector,
    /// Extreme-point enumeration requested for a non-polyhedral ball.
    NonPolyhedral(NormKind),
}

impl fmt::Display for NormError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormError::ZeroVector => write!(f, "norming functional undefined for zero vector"),
            NormError::NonPolyhedral(kind) => {
                write!(f, "non-polyhedral norm {kind}: unit ball has no finite extreme-point set")
            }
        }
    }
}

impl std::error::Error for NormError {}

/// `‖x‖` in the given norm.
pub fn norm<S: Scalar>(kind: NormKind, x: &Vector<S>) -> S {
    match kind {
        NormKind::L1 => x.iter().map(|&a| a.abs()).fold(S::zero(), |acc, t| acc + t),
        NormKind::L2 => x.euclid(),
        NormKind::Linf => x.max_abs(),
    }
}

/// A norm-one dual element `u*` with `⟨u*, x⟩ = ‖x‖`.
///
/// Ties (several max-magnitude coordinates under `Linf`) resolve to the lowest
/// index so certificates are reproducible.
pub fn norming_functional<S: Scalar>(kind: NormKind, x: &Vector<S>) -> Result<Vector<S>, NormError> {
    let zero_tol = S::c(ZERO_TOL);
    if x.is_zero(zero_tol) {
        return Err(NormError::ZeroVector);
    }
    Ok(match kind {
        NormKind::L1 => Vector::from_fn(x.dim(), |j| {
            if x[j] > zero_tol {
                S::one()
            } else if x[j] < -zero_tol {
                -S::one()
            } else {
                S::zero()
            }
        }),
        NormKind::L2 => x.scale(x.euclid().recip()),
        NormKind::Linf => {
            let peak = x.max_abs();
            let j = (0..x.dim())
                .find(|&j| x[j].abs() >= peak - zero_tol)
                .expect("nonzero vector has a max coordinate");
            let mut u = Vector::zeros(x.dim());
            u[j] = if x[j] >= S::zero() { S::one() } else { -S::one() };
            u
        }
    })
}

/// Exact vertex set of the unit ball for polyhedral norms.
///
/// `L1` gives the cross-polytope vertices `±e_j`; `Linf` gives all `2^dim`
/// sign vectors, ordered with `+1` bits first for determinism.
pub fn ball_extreme_points<S: Scalar>(
    kind: NormKind,
    dim: usize,
) -> Result<Vec<Vector<S>>, NormError> {
    match kind {
        NormKind::L1 => {
            let mut points = Vec::with_capacity(2 * dim);
            for j in 0..dim {
                points.push(Vector::basis(dim, j));
                points.push(Vector::basis(dim, j).neg());
            }
            Ok(points)
        }
        NormKind::Linf => {
            let mut points = Vec::with_capacity(1 << dim);
            for mask in 0..(1u64 << dim) {
                points.push(Vector::from_fn(dim, |j| {
                    if mask >> j & 1 == 0 {
                        S::one()
                    } else {
                        -S::one()
                    }
                }));
            }
            Ok(points)
        }
        NormKind::L2 => Err(NormError::NonPolyhedral(NormKind::L2)),
    }
}

/// Vertices of the face of norming functionals of `x`: the dual-ball
/// extreme points `u` with `⟨u, x⟩ = ‖x‖`. For `L1` these are the sign
/// completions over the zero coordinates; for `Linf` the signed indicators
/// of the max-magnitude coordinates; for `L2` the single normed vector.
pub fn norming_face_vertices<S: Scalar>(
    kind: NormKind,
    x: &Vector<S>,
) -> Result<Vec<Vector<S>>, NormError> {
    let zero_tol = S::c(ZERO_TOL);
    if x.is_zero(zero_tol) {
        return Err(NormError::ZeroVector);
    }
    Ok(match kind {
        NormKind::L1 => {
            let zeros: Vec<usize> = (0..x.dim()).filter(|&j| x[j].abs() <= zero_tol).collect();
            let mut vertices = Vec::with_capacity(1 << zeros.len());
            for mask in 0..(1u64 << zeros.len()) {
                let mut u = Vector::from_fn(x.dim(), |j| {
                    if x[j] > zero_tol {
                        S::one()
                    } else if x[j] < -zero_tol {
                        -S::one()
                    } else {
                        S::zero()
                    }
                });
                for (b, &j) in zeros.iter().enumerate() {
                    u[j] = if mask >> b & 1 == 0 { S::one() } else { -S::one() };
                }
                vertices.push(u);
            }
            vertices
        }
        NormKind::Linf => {
            let peak = x.max_abs();
            (0..x.dim())
                .filter(|&j| x[j].abs() >= peak - zero_tol)
                .map(|j| {
                    let mut u = Vector::zeros(x.dim());
                    u[j] = if x[j] >= S::zero() { S::one() } else { -S::one() };
                    u
                })
                .collect()
        }
        NormKind::L2 => vec![x.scale(x.euclid().recip())],
    })
}

/// A finite dimension together with its norm; knows the dual space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormedSpace {
    pub dim: usize,
    pub norm: NormKind,
}

impl NormedSpace {
    pub fn new(dim: usize, norm: NormKind) -> Self {
        NormedSpace { dim, norm }
    }

    /// The dual space: same dimension, dual norm.
    pub fn dual(&self) -> NormedSpace {
        NormedSpace::new(self.dim, self.norm.dual())
    }

    pub fn norm_of<S: Scalar>(&self, x: &Vector<S>) -> S {
        assert_eq!(x.dim(), self.dim, "norm_of: dimension mismatch");
        norm(self.norm, x)
    }

    /// Norm of a dual element (a functional on this space).
    pub fn dual_norm_of<S: Scalar>(&self, x_star: &Vector<S>) -> S {
        assert_eq!(x_star.dim(), self.dim);
        norm(self.norm.dual(), x_star)
    }
}

/// A value in `[0, +∞]` following the paper's ratio conventions:
/// `z/0 = +∞` for `z > 0`, `0/0 = 0`, and `1/+∞ = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtendedNonneg<S> {
    value: S,
}

impl<S: Scalar> ExtendedNonneg<S> {
    pub fn finite(value: S) -> Self {
        assert!(
            value >= S::zero() && value.is_finite(),
            "ExtendedNonneg::finite wants a finite nonnegative value, got {value}"
        );
        ExtendedNonneg { value }
    }

    pub fn zero() -> Self {
        ExtendedNonneg { value: S::zero() }
    }

    pub fn infinity() -> Self {
        ExtendedNonneg {
            value: S::infinity(),
        }
    }

    /// `numerator / denominator` with the `z/0` convention.
    pub fn ratio(numerator: S, denominator: S) -> Self {
        assert!(numerator >= S::zero() && denominator >= S::zero());
        if denominator == S::zero() {
            if numerator > S::zero() {
                Self::infinity()
            } else {
                Self::zero()
            }
        } else if denominator.is_infinite() {
            Self::zero()
        } else {
            Self::finite(numerator / denominator)
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }

    /// Underlying scalar (`+∞` when infinite).
    pub fn get(&self) -> S {
        self.value
    }

    pub fn max(self, other: Self) -> Self {
        ExtendedNonneg {
            value: self.value.max(other.value),
        }
    }

    pub fn recip(self) -> Self {
        if self.value == S::zero() {
            Self::infinity()
        } else if self.value.is_infinite() {
            Self::zero()
        } else {
            Self::finite(self.value.recip())
        }
    }

    /// Absolute difference, treating `∞ - ∞` as zero gap.
    pub fn gap(self, other: Self) -> S {
        if self.is_infinite() && other.is_infinite() {
            S::zero()
        } else {
            (self.value - other.value).abs()
        }
    }
}

impl<S: Scalar> PartialOrd for ExtendedNonneg<S> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.value.partial_cmp(&other.value)
    }
}

impl<S: Scalar> fmt::Display for ExtendedNonneg<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "+inf")
        } else {
            write!(f, "{}", self.value)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(values: &[f64]) -> Vector<f64> {
        Vector::from_slice(values)
    }

    #[test]
    fn norm_values() {
        assert_eq!(norm(NormKind::L1, &v(&[1.0, -2.0])), 3.0);
        assert_eq!(norm(NormKind::Linf, &v(&[1.0, -2.0])), 2.0);
        assert_eq!(norm(NormKind::L2, &v(&[3.0, 4.0])), 5.0);
    }

    #[test]
    fn dual_is_involutive() {
        for kind in [NormKind::L1, NormKind::L2, NormKind::Linf] {
            assert_eq!(kind.dual().dual(), kind);
        }
        assert_eq!(NormKind::L1.dual(), NormKind::Linf);
        assert_eq!(NormKind::Linf.dual(), NormKind::L1);
        assert_eq!(NormKind::L2.dual(), NormKind::L2);
    }

    #[test]
    fn norming_functional_examples() {
        let u = norming_functional(NormKind::L2, &v(&[3.0, 4.0])).unwrap();
        assert!((u[0] - 0.6).abs() < 1e-15 && (u[1] - 0.8).abs() < 1e-15);

        let u = norming_functional(NormKind::L1, &v(&[1.0, -2.0])).unwrap();
        assert_eq!(u.as_slice(), &[1.0, -1.0]);

        let u = norming_functional(NormKind::Linf, &v(&[1.0, -2.0])).unwrap();
        assert_eq!(u.as_slice(), &[0.0, -1.0]);

        assert_eq!(
            norming_functional(NormKind::L1, &v(&[0.0, 0.0])),
            Err(NormError::ZeroVector)
        );
    }

    #[test]
    fn norming_functional_linf_tie_picks_lowest_index() {
        let u = norming_functional(NormKind::Linf, &v(&[-2.0, 2.0])).unwrap();
        assert_eq!(u.as_slice(), &[-1.0, 0.0]);
    }

    #[test]
    fn extreme_points() {
        let pts = ball_extreme_points::<f64>(NormKind::L1, 2).unwrap();
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[0].as_slice(), &[1.0, 0.0]);
        assert_eq!(pts[1].as_slice(), &[-1.0, 0.0]);

        let pts = ball_extreme_points::<f64>(NormKind::Linf, 2).unwrap();
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[0].as_slice(), &[1.0, 1.0]);
        assert_eq!(pts[3].as_slice(), &[-1.0, -1.0]);

        assert!(matches!(
            ball_extreme_points::<f64>(NormKind::L2, 2),
            Err(NormError::NonPolyhedral(NormKind::L2))
        ));
    }

    #[test]
    fn extended_ratio_table() {
        let r = ExtendedNonneg::<f64>::ratio;
        assert!(r(1.0, 0.0).is_infinite());
        assert_eq!(r(0.0, 0.0).get(), 0.0);
        assert_eq!(r(1.0, f64::INFINITY).get(), 0.0);
        assert_eq!(r(3.0, 2.0).get(), 1.5);
        assert_eq!(ExtendedNonneg::<f64>::infinity().recip().get(), 0.0);
        assert!(ExtendedNonneg::<f64>::zero().recip().is_infinite());
    }
}
