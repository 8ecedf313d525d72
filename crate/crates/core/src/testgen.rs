//! Random instance generation for tests, property suites, and corpus runs.
//!
//! Draws are rejection-filtered away from near-degenerate data: entries live
//! on a coarse grid, zero rows and all-zero perturbation maps are rejected,
//! and the surjectivity/nonsingularity requirements are enforced by retry.

use rand::rngs::StdRng;
use rand::Rng;

use crate::cones::PolyhedralCone;
use crate::linalg::{Matrix, Vector};
use crate::norms::{NormKind, NormedSpace};
use crate::process::{ConicProcess, StructureBlock};
use crate::scalar::Scalar;
use crate::svd::smallest_singular_value;

#[derive(Clone, Debug)]
pub struct ExactInstance<S> {
    pub f: ConicProcess<S>,
    pub blocks: Vec<StructureBlock<S>>,
}

fn grid_entry<S: Scalar>(rng: &mut StdRng) -> S {
    // Quarter-integer grid in [-2, 2]; keeps LP data well scaled.
    S::c(rng.gen_range(-8i32..=8) as f64 / 4.0)
}

pub fn grid_matrix<S: Scalar>(rng: &mut StdRng, rows: usize, cols: usize) -> Matrix<S> {
    Matrix::from_fn(rows, cols, |_, _| grid_entry(rng))
}

fn polyhedral_kind(rng: &mut StdRng) -> NormKind {
    if rng.gen_bool(0.5) {
        NormKind::L1
    } else {
        NormKind::Linf
    }
}

fn random_cone<S: Scalar>(rng: &mut StdRng, dim: usize) -> PolyhedralCone<S> {
    match rng.gen_range(0..3) {
        0 => PolyhedralCone::full(dim),
        1 => PolyhedralCone::nonneg_orthant(dim),
        _ => {
            let count = rng.gen_range(dim..=dim + 2).min(4);
            let rays: Vec<Vector<S>> = (0..count)
                .map(|_| Vector::from_fn(dim, |_| grid_entry(rng)))
                .collect();
            let cone = PolyhedralCone::from_rays(dim, &rays);
            if cone.is_zero() {
                PolyhedralCone::nonneg_orthant(dim)
            } else {
                cone
            }
        }
    }
}

/// A surjective exact-mode instance (polyhedral norms everywhere), dims at
/// most `max_dim`, at most `max_blocks` structure blocks. With
/// `require_nonsingular` the domain cone is the full space and `A` is a
/// well-conditioned square matrix, which is the regime where surjective and
/// nonsingular coexist.
pub fn surjective_exact_instance<S: Scalar>(
    rng: &mut StdRng,
    max_dim: usize,
    max_blocks: usize,
    require_nonsingular: bool,
) -> ExactInstance<S> {
    for _ in 0..2000 {
        let (n, m) = if require_nonsingular {
            let d = rng.gen_range(2..=max_dim);
            (d, d)
        } else {
            let m = rng.gen_range(1..=max_dim);
            let n = rng.gen_range(m..=max_dim);
            (n, m)
        };
        let a = grid_matrix::<S>(rng, m, n);
        if (0..m).any(|r| a.row(r).max_abs() == S::zero()) {
            continue;
        }
        if require_nonsingular && smallest_singular_value(&a) < S::c(0.2) {
            continue;
        }
        let cone = if require_nonsingular {
            PolyhedralCone::full(n)
        } else {
            random_cone(rng, n)
        };
        let x_space = NormedSpace::new(n, polyhedral_kind(rng));
        let y_space = NormedSpace::new(m, polyhedral_kind(rng));
        let Ok(f) = ConicProcess::new(x_space, y_space, a, cone) else {
            continue;
        };
        if !f.is_surjective().unwrap_or(false) {
            continue;
        }
        if require_nonsingular && f.is_singular().unwrap_or(true) {
            continue;
        }
        let k = rng.gen_range(1..=max_blocks);
        let mut blocks = Vec::with_capacity(k);
        let mut ok = true;
        for index in 0..k {
            let u_dim = rng.gen_range(1..=2);
            let v_dim = rng.gen_range(1..=2);
            let p = grid_matrix::<S>(rng, m, v_dim);
            let q = grid_matrix::<S>(rng, u_dim, n);
            if p.max_abs() == S::zero() || q.max_abs() == S::zero() {
                ok = false;
                break;
            }
            let block = StructureBlock::new(
                index,
                p,
                q,
                NormedSpace::new(u_dim, polyhedral_kind(rng)),
                NormedSpace::new(v_dim, polyhedral_kind(rng)),
            );
            match block {
                Ok(b) => blocks.push(b),
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        return ExactInstance { f, blocks };
    }
    panic!("instance generator exhausted its retry budget");
}

/// Unstructured all-L2 instance over the full cone (the classical regime).
pub fn random_l2_square_instance<S: Scalar>(
    rng: &mut StdRng,
    max_dim: usize,
) -> ExactInstance<S> {
    loop {
        let d = rng.gen_range(2..=max_dim);
        let a = Matrix::from_fn(d, d, |_, _| S::c(rng.gen_range(-2.0f64..2.0)));
        if smallest_singular_value(&a) < S::c(1e-3) {
            continue;
        }
        let f = ConicProcess::new(
            NormedSpace::new(d, NormKind::L2),
            NormedSpace::new(d, NormKind::L2),
            a,
            PolyhedralCone::full(d),
        )
        .expect("square dims");
        let blocks = vec![StructureBlock::unstructured(&f)];
        return ExactInstance { f, blocks };
    }
}

/// Random target vectors for the theorem-of-the-alternative suite.
pub fn random_y_list<S: Scalar>(rng: &mut StdRng, m: usize, k: usize) -> Vec<Vector<S>> {
    (0..k)
        .map(|_| Vector::from_fn(m, |_| grid_entry(rng)))
        .collect()
}
