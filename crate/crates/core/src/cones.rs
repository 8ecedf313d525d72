//! Polyhedral convex cones: generator and inequality representations,
//! negative polar cones, membership, and nonzero-element searches.
//!
//! Conversion between the two forms is brute-force double description over
//! active-set subsets; fine for the desk-scale dimensions this crate targets.

use crate::linalg::{Matrix, Vector};
use crate::lp::{LinearProgram, LpError, DEFAULT_FEAS_TOL};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConeClass {
    Full,
    Zero,
    General,
}

/// A closed polyhedral cone with both representations materialized:
/// `{Σ λ_j r_j : λ ≥ 0}` and `{x : ⟨h_l, x⟩ ≥ 0 ∀l}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyhedralCone<S> {
    dim: usize,
    rays: Vec<Vector<S>>,
    halfspaces: Vec<Vector<S>>,
    class: ConeClass,
}

impl<S: Scalar> PolyhedralCone<S> {
    /// Cone generated by the given rays. Zero and duplicate rays are dropped.
    pub fn from_rays(dim: usize, rays: &[Vector<S>]) -> Self {
        assert!(dim >= 1, "cone needs a positive ambient dimension");
        let rays = normalize_directions(dim, rays);
        // K* in inequality form is immediate from the generators; its rays
        // (via double description) are the outer normals of K.
        let polar_halfspaces: Vec<Vector<S>> = rays.iter().map(Vector::neg).collect();
        let polar_rays = enumerate_rays(dim, &polar_halfspaces);
        let halfspaces = normalize_directions(dim, &polar_rays.iter().map(Vector::neg).collect::<Vec<_>>());
        Self::assemble(dim, rays, halfspaces)
    }

    /// Cone `{x : ⟨h, x⟩ ≥ 0 for each h}`. Zero and duplicate rows are dropped.
    pub fn from_halfspaces(dim: usize, halfspaces: &[Vector<S>]) -> Self {
        assert!(dim >= 1, "cone needs a positive ambient dimension");
        let halfspaces = normalize_directions(dim, halfspaces);
        let rays = enumerate_rays(dim, &halfspaces);
        Self::assemble(dim, normalize_directions(dim, &rays), halfspaces)
    }

    pub fn full(dim: usize) -> Self {
        Self::from_rays(
            dim,
            &(0..dim)
                .flat_map(|j| [Vector::basis(dim, j), Vector::basis(dim, j).neg()])
                .collect::<Vec<_>>(),
        )
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_rays(dim, &[])
    }

    pub fn nonneg_orthant(dim: usize) -> Self {
        Self::from_rays(dim, &(0..dim).map(|j| Vector::basis(dim, j)).collect::<Vec<_>>())
    }

    fn assemble(dim: usize, rays: Vec<Vector<S>>, halfspaces: Vec<Vector<S>>) -> Self {
        let class = if rays.is_empty() {
            ConeClass::Zero
        } else if halfspaces.is_empty() {
            ConeClass::Full
        } else {
            ConeClass::General
        };
        // Normalized special representations.
        let (rays, halfspaces) = match class {
            ConeClass::Full => (
                (0..dim)
                    .flat_map(|j| [Vector::basis(dim, j), Vector::basis(dim, j).neg()])
                    .collect(),
                Vec::new(),
            ),
            ConeClass::Zero => (
                Vec::new(),
                (0..dim)
                    .flat_map(|j| [Vector::basis(dim, j), Vector::basis(dim, j).neg()])
                    .collect(),
            ),
            ConeClass::General => (rays, halfspaces),
        };
        PolyhedralCone {
            dim,
            rays,
            halfspaces,
            class,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn class(&self) -> ConeClass {
        self.class
    }

    pub fn is_full(&self) -> bool {
        self.class == ConeClass::Full
    }

    pub fn is_zero(&self) -> bool {
        self.class == ConeClass::Zero
    }

    pub fn rays(&self) -> &[Vector<S>] {
        &self.rays
    }

    /// Rows `h` with the cone equal to `{x : ⟨h, x⟩ ≥ 0 ∀h}`; empty for the
    /// full cone. Ready to drop into LP builders.
    pub fn halfspaces(&self) -> &[Vector<S>] {
        &self.halfspaces
    }

    /// The negative polar `K* = {x* : ⟨x*, x⟩ ≤ 0 for all x ∈ K}`, in both forms.
    pub fn polar(&self) -> PolyhedralCone<S> {
        let polar_halfspaces: Vec<Vector<S>> = self.rays.iter().map(Vector::neg).collect();
        let polar_rays = normalize_directions(self.dim, &enumerate_rays(self.dim, &polar_halfspaces));
        // The polar's outer normals are exactly our rays.
        PolyhedralCone::assemble(self.dim, polar_rays, normalize_directions(self.dim, &polar_halfspaces))
    }

    /// Membership test by halfspace signs.
    pub fn member(&self, x: &Vector<S>, tol: S) -> bool {
        assert_eq!(x.dim(), self.dim);
        self.halfspaces.iter().all(|h| h.dot(x) >= -tol)
    }

    /// Membership decided through the generator form (LP over `λ ≥ 0`);
    /// agrees with `member` whenever both forms describe the same set.
    pub fn member_by_generators(&self, x: &Vector<S>, tol: S) -> Result<bool, LpError> {
        assert_eq!(x.dim(), self.dim);
        if self.rays.is_empty() {
            return Ok(x.is_zero(tol));
        }
        let mut lp = LinearProgram::new(self.rays.len());
        for l in 0..self.rays.len() {
            lp.set_lower(l, S::zero());
        }
        for coord in 0..self.dim {
            let row: Vec<S> = self.rays.iter().map(|r| r[coord]).collect();
            lp.add_eq(&row, x[coord])?;
        }
        Ok(lp.feasible(tol)?.is_some())
    }

    /// A nonzero `x ∈ K` with `E x = 0` and `G x ≥ 0`, or `None`.
    ///
    /// The feasible set is a cone, so it contains a nonzero point iff one of
    /// the `2·dim` normalizations `x_j = ±1` is feasible; the enumeration is
    /// in deterministic order and the first hit wins.
    pub fn nonzero_element_with(
        &self,
        extra_eq: &[Vector<S>],
        extra_ineq: &[Vector<S>],
    ) -> Result<Option<Vector<S>>, LpError> {
        if self.is_zero() {
            return Ok(None);
        }
        nonzero_in_halfspace_cone(
            self.dim,
            &self.halfspaces,
            extra_eq,
            extra_ineq,
            S::c(DEFAULT_FEAS_TOL),
        )
    }
}

/// Nonzero point of `{x : ⟨h, x⟩ ≥ 0} ∩ {Ex = 0} ∩ {Gx ≥ 0}` by the same
/// `x_j = ±1` normalization enumeration, without materializing a cone.
/// Rows are rescaled to unit max-magnitude so the feasibility tolerance
/// means the same thing whatever the caller's data scale.
pub fn nonzero_in_halfspace_cone<S: Scalar>(
    dim: usize,
    halfspaces: &[Vector<S>],
    extra_eq: &[Vector<S>],
    extra_ineq: &[Vector<S>],
    tol: S,
) -> Result<Option<Vector<S>>, LpError> {
    // Scale rows down to unit magnitude, never up: amplifying a near-zero
    // row would turn numerical noise into a hard constraint.
    let unit = |rows: &[Vector<S>]| -> Vec<Vector<S>> {
        rows.iter()
            .map(|r| r.scale(r.max_abs().max(S::one()).recip()))
            .collect()
    };
    let halfspaces = unit(halfspaces);
    let extra_eq = unit(extra_eq);
    let extra_ineq = unit(extra_ineq);
    for j in 0..dim {
        for sign in [S::one(), -S::one()] {
            let mut lp = LinearProgram::new(dim);
            for h in &halfspaces {
                lp.add_ge(h.as_slice(), S::zero())?;
            }
            for e in &extra_eq {
                lp.add_eq(e.as_slice(), S::zero())?;
            }
            for g in &extra_ineq {
                lp.add_ge(g.as_slice(), S::zero())?;
            }
            lp.fix(j, sign);
            if let Some(witness) = lp.feasible(tol)? {
                return Ok(Some(normalize_witness(&witness)));
            }
        }
    }
    Ok(None)
}

/// Scale to `‖x‖_∞ = 1`; sign is preserved (cones are one-sided).
pub fn normalize_witness<S: Scalar>(x: &Vector<S>) -> Vector<S> {
    let peak = x.max_abs();
    if peak > S::zero() {
        x.scale(peak.recip())
    } else {
        x.clone()
    }
}

fn normalize_directions<S: Scalar>(dim: usize, raw: &[Vector<S>]) -> Vec<Vector<S>> {
    let tol = S::c(1e-9);
    let mut out: Vec<Vector<S>> = Vec::new();
    for r in raw {
        assert_eq!(r.dim(), dim, "ray/halfspace dimension mismatch");
        let peak = r.max_abs();
        if peak <= tol {
            continue;
        }
        let unit = r.scale(peak.recip());
        if !out.iter().any(|seen| seen.sub(&unit).max_abs() <= tol) {
            out.push(unit);
        }
    }
    out
}

/// Double description, inequality form to generators: all extreme rays of
/// `{x : ⟨h, x⟩ ≥ 0}` plus `±` a basis of its lineality space.
fn enumerate_rays<S: Scalar>(dim: usize, halfspaces: &[Vector<S>]) -> Vec<Vector<S>> {
    let tol = S::c(1e-9);
    if halfspaces.is_empty() {
        return (0..dim)
            .flat_map(|j| [Vector::basis(dim, j), Vector::basis(dim, j).neg()])
            .collect();
    }
    let h = Matrix::from_fn(halfspaces.len(), dim, |i, j| halfspaces[i][j]);
    let lineality = h.null_space(S::c(1e-11));
    let mut rays: Vec<Vector<S>> = lineality
        .iter()
        .flat_map(|l| [l.clone(), l.neg()])
        .collect();

    // Work in the pointed quotient: coordinates over a basis of lineality^⊥.
    let lin_rows = Matrix::from_fn(lineality.len(), dim, |i, j| lineality[i][j]);
    let complement = if lineality.is_empty() {
        (0..dim).map(|j| Vector::basis(dim, j)).collect::<Vec<_>>()
    } else {
        lin_rows.null_space(S::c(1e-11))
    };
    let p = complement.len();
    if p == 0 {
        return rays;
    }
    let z = Matrix::from_fn(dim, p, |i, j| complement[j][i]);
    let projected = h.matmul(&z); // rows: ⟨h_l, Z c⟩ coefficients in c

    // Every extreme ray of the pointed part is the 1-dim null space of some
    // (p-1)-subset of constraint rows.
    let row_count = projected.rows();
    let mut subset = vec![0usize; p.saturating_sub(1)];
    let mut candidates: Vec<Vector<S>> = Vec::new();
    enumerate_subsets(row_count, p - 1, &mut subset, 0, 0, &mut |chosen| {
        let sub = Matrix::from_fn(chosen.len(), p, |i, j| projected[(chosen[i], j)]);
        let kernel = sub.null_space(S::c(1e-11));
        if kernel.len() != 1 {
            return;
        }
        let c = &kernel[0];
        for dir in [c.clone(), c.neg()] {
            let ok = (0..row_count).all(|l| projected.row(l).dot(&dir) >= -tol);
            if ok {
                candidates.push(z.matvec(&dir));
            }
        }
    });
    rays.extend(candidates);
    normalize_directions(dim, &rays)
}

fn enumerate_subsets(
    n: usize,
    k: usize,
    scratch: &mut [usize],
    depth: usize,
    start: usize,
    visit: &mut impl FnMut(&[usize]),
) {
    if depth == k {
        visit(&scratch[..k]);
        return;
    }
    for i in start..n {
        scratch[depth] = i;
        enumerate_subsets(n, k, scratch, depth + 1, i + 1, visit);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(values: &[f64]) -> Vector<f64> {
        Vector::from_slice(values)
    }

    #[test]
    fn orthant_polar_is_nonpositive_orthant() {
        let k = PolyhedralCone::<f64>::nonneg_orthant(2);
        let polar = k.polar();
        assert!(polar.member(&v(&[-1.0, -2.0]), 1e-9));
        assert!(!polar.member(&v(&[1.0, -2.0]), 1e-9));
        assert!(polar.member(&v(&[-1.0, 0.0]), 1e-9));
    }

    #[test]
    fn full_and_zero_are_polar_pairs() {
        let full = PolyhedralCone::<f64>::full(2);
        assert!(full.is_full());
        let polar = full.polar();
        assert!(polar.is_zero());
        assert!(polar.polar().is_full());
    }

    #[test]
    fn single_ray_polar_is_halfplane() {
        let k = PolyhedralCone::from_rays(2, &[v(&[1.0, 1.0])]);
        let polar = k.polar();
        // {y : y1 + y2 <= 0}
        assert!(polar.member(&v(&[1.0, -1.0]), 1e-9));
        assert!(polar.member(&v(&[-1.0, 1.0]), 1e-9));
        assert!(polar.member(&v(&[-1.0, -1.0]), 1e-9));
        assert!(!polar.member(&v(&[1.0, 1.0]), 1e-9));
        assert!(!polar.member(&v(&[1.0, 0.0]), 1e-9));
    }

    #[test]
    fn membership_examples() {
        let orthant = PolyhedralCone::<f64>::nonneg_orthant(2);
        assert!(orthant.member(&v(&[1.0, 2.0]), 1e-9));
        assert!(!orthant.member(&v(&[-1.0, 2.0]), 1e-9));
        let ray = PolyhedralCone::from_rays(2, &[v(&[1.0, 1.0])]);
        assert!(ray.member(&v(&[2.0, 2.0]), 1e-9));
        assert!(ray.member_by_generators(&v(&[2.0, 2.0]), 1e-9).unwrap());
        assert!(!ray.member(&v(&[2.0, 1.0]), 1e-9));
        assert!(!ray.member_by_generators(&v(&[2.0, 1.0]), 1e-9).unwrap());
    }

    #[test]
    fn nonzero_element_search() {
        let orthant = PolyhedralCone::<f64>::nonneg_orthant(2);
        let x = orthant
            .nonzero_element_with(&[v(&[1.0, -1.0])], &[])
            .unwrap()
            .expect("diagonal direction exists");
        assert!((x[0] - x[1]).abs() < 1e-9 && x[0] > 0.5);

        let none = orthant
            .nonzero_element_with(&[v(&[1.0, 0.0]), v(&[0.0, 1.0])], &[])
            .unwrap();
        assert!(none.is_none());

        let full = PolyhedralCone::<f64>::full(2);
        let x = full
            .nonzero_element_with(&[v(&[1.0, 1.0])], &[])
            .unwrap()
            .expect("anti-diagonal exists");
        assert!((x[0] + x[1]).abs() < 1e-9 && x.max_abs() > 0.5);
    }

    #[test]
    fn zero_cone_has_no_nonzero_element() {
        let zero = PolyhedralCone::<f64>::zero(3);
        assert!(zero.nonzero_element_with(&[], &[]).unwrap().is_none());
        assert!(zero.member(&v(&[0.0, 0.0, 0.0]), 1e-9));
        assert!(!zero.member(&v(&[0.0, 1e-3, 0.0]), 1e-9));
    }

    #[test]
    fn degenerate_rays_are_cleaned() {
        let k = PolyhedralCone::from_rays(
            2,
            &[v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[2.0, 0.0]), v(&[1.0, 0.0])],
        );
        assert_eq!(k.rays().len(), 1);
    }

    #[test]
    fn halfplane_with_lineality() {
        let k = PolyhedralCone::from_rays(2, &[v(&[1.0, 0.0]), v(&[-1.0, 0.0]), v(&[0.0, 1.0])]);
        assert!(k.member(&v(&[-5.0, 3.0]), 1e-9));
        assert!(!k.member(&v(&[0.0, -1.0]), 1e-9));
        let polar = k.polar();
        assert!(polar.member(&v(&[0.0, -1.0]), 1e-9));
        assert!(!polar.member(&v(&[0.5, -1.0]), 1e-9));
    }
}
