//! Quantity 1: upper bounds from a random search over general (not
//! necessarily rank-one) assignments. Every candidate is verified
//! nonsurjective before its size is admitted as a bound.

use rand::rngs::StdRng;
use rand::SeedableRng;

use crate::norms::ExtendedNonneg;
use crate::process::{ConicProcess, PerturbationAssignment, StructureBlock};
use crate::sampling::gaussian_vector;
use crate::scalar::Scalar;

use super::{DistanceError, SolveConfig};

pub fn general_search<S: Scalar>(
    f: &ConicProcess<S>,
    blocks: &[StructureBlock<S>],
    cfg: &SolveConfig<S>,
    seeds: &[PerturbationAssignment<S>],
) -> Result<(ExtendedNonneg<S>, Option<PerturbationAssignment<S>>), DistanceError> {
    if !f.is_surjective()? {
        return Ok((
            ExtendedNonneg::zero(),
            Some(PerturbationAssignment::zero(blocks)),
        ));
    }
    let mut best: Option<(S, PerturbationAssignment<S>)> = None;
    // Seeds come from certified constructions whose sizes already equal the
    // other quantities, so they are admitted at the standard tolerance; the
    // random-ray candidates are verified strictly so the loose band around
    // the nonsurjectivity manifold cannot admit sizes below the distance
    // (a false reject only leaves the bound where it was).
    let strict = S::c(1e-11).min(cfg.feas_tol);
    let admit = |candidate: PerturbationAssignment<S>,
                 tol: S,
                 best: &mut Option<(S, PerturbationAssignment<S>)>|
     -> Result<(), DistanceError> {
        if candidate.size <= S::zero() {
            return Ok(());
        }
        if best.as_ref().map_or(false, |(b, _)| candidate.size >= *b) {
            return Ok(());
        }
        if !f.perturb(blocks, &candidate)?.is_surjective_with_tol(tol)? {
            *best = Some((candidate.size, candidate));
        }
        Ok(())
    };

    for seed in seeds {
        admit(seed.clone(), S::c(crate::lp::DEFAULT_FEAS_TOL), &mut best)?;
    }

    let mut rng = StdRng::seed_from_u64(cfg.seed ^ 0x00c0_ffee);
    let directions = cfg.budget.clamp(4, 32);
    for _ in 0..directions {
        let mats: Vec<_> = blocks
            .iter()
            .map(|b| {
                let mut m = crate::linalg::Matrix::zeros(b.v_space.dim, b.u_space.dim);
                for r in 0..b.v_space.dim {
                    let row = gaussian_vector::<S>(&mut rng, b.u_space.dim);
                    for c in 0..b.u_space.dim {
                        m[(r, c)] = row[c];
                    }
                }
                m
            })
            .collect();
        let direction = PerturbationAssignment::from_matrices(blocks, mats)?;
        if direction.size <= S::c(1e-9) {
            continue;
        }
        let unit = direction.scale(direction.size.recip());

        // Grow the scale until the perturbed process loses surjectivity.
        let start = best
            .as_ref()
            .map_or(S::one(), |(b, _)| *b * S::c(0.25));
        let mut kappa = start.max(S::c(1e-6));
        let mut lo = S::zero();
        let mut hit = None;
        for _ in 0..40 {
            if kappa > S::c(1e6) {
                // Past any numerically meaningful scale for O(1) data.
                break;
            }
            let probe = unit.scale(kappa);
            if !f.perturb(blocks, &probe)?.is_surjective_with_tol(strict)? {
                hit = Some(kappa);
                break;
            }
            lo = kappa;
            kappa = kappa * S::c(2.0);
            if best.as_ref().map_or(false, |(b, _)| kappa > *b * S::c(4.0)) {
                break; // cannot beat the incumbent along this ray
            }
        }
        let Some(mut hi) = hit else { continue };
        for _ in 0..40 {
            if hi - lo <= S::c(1e-10) + S::c(1e-10) * hi {
                break;
            }
            let mid = (lo + hi) * S::c(0.5);
            if !f.perturb(blocks, &unit.scale(mid))?.is_surjective_with_tol(strict)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        admit(unit.scale(hi), strict, &mut best)?;
    }

    Ok(match best {
        Some((size, assignment)) => (ExtendedNonneg::finite(size), Some(assignment)),
        None => (ExtendedNonneg::infinity(), None),
    })
}
