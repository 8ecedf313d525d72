//! The four characterizations of the structured distance to nonsurjectivity,
//! their certificates, and the cross-validation report.
//!
//! Quantity numbering follows the main equality:
//!   1. smallest general `max_i ‖T_i‖` with `F + Σ P_i T_i Q_i` nonsurjective
//!      (random search, upper bound);
//!   2. the same over rank-one `T_i` (primal search with built certificates);
//!   3. the adjoint-side formula
//!      `inf { max_i z_i/‖P_i* y*‖ : Σ z_i Q_i* u_i* ∈ F*(y*), y* ≠ 0 }`
//!      (bisection over LP feasibility cells; the exact anchor);
//!   4. `inf_v Φ((P_i v_i))` over unit-ball directions, through the dual
//!      expression of the Φ function.

mod bisect;
mod dual;
mod general;
mod phi;
mod rank_one;
mod verify;

use std::fmt;

use crate::linalg::Vector;
use crate::lp::LpError;
use crate::norms::{ExtendedNonneg, NormError};
use crate::process::ProcessError;
use crate::scalar::Scalar;

pub use bisect::{BisectConfig, Bracket};
pub use dual::{distance_dual, dual_built_assignment, dual_seed_directions, DualCertificate};
pub use general::general_search;
pub use phi::{alternative_check, phi, quantity4, AlternativeOutcome, PhiEvaluation, QChannel};
pub use rank_one::{
    build_rank_one, distance_rank_one_search, reciprocal_sup, search_rank_one,
    PrimalRankOneCertificate,
};
pub use verify::{verify_equalities, CheckResult, DistanceReport, Quantities};

/// Which solver family to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// All relevant norms polyhedral; bisection over exact LP cells.
    Exact,
    /// Random sphere directions with local polish; bounds, not guarantees.
    Sampled,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => write!(f, "exact"),
            Mode::Sampled => write!(f, "sampled"),
        }
    }
}

/// Knobs shared by the distance solvers.
#[derive(Clone, Debug)]
pub struct SolveConfig<S> {
    pub feas_tol: S,
    pub bisect: BisectConfig<S>,
    pub budget: usize,
    pub seed: u64,
}

impl<S: Scalar> Default for SolveConfig<S> {
    fn default() -> Self {
        SolveConfig {
            feas_tol: S::c(crate::lp::DEFAULT_FEAS_TOL),
            bisect: BisectConfig::default(),
            budget: 10_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub enum DistanceError {
    Lp(LpError),
    Process(ProcessError),
    Norm(NormError),
    /// Exact mode was requested but a non-polyhedral norm is in play.
    ExactNeedsPolyhedral { space: String },
    /// The sampled inner problem has a structure this solver does not cover.
    UnsupportedSampledStructure { detail: String },
    /// The dichotomy check found both or neither system solvable.
    InconsistentAlternative { detail: String },
}

impl fmt::Display for DistanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistanceError::Lp(e) => write!(f, "lp subsolver: {e}"),
            DistanceError::Process(e) => write!(f, "process: {e}"),
            DistanceError::Norm(e) => write!(f, "norm: {e}"),
            DistanceError::ExactNeedsPolyhedral { space } => {
                write!(f, "exact mode requires polyhedral norms, but {space} is l2")
            }
            DistanceError::UnsupportedSampledStructure { detail } => {
                write!(f, "sampled inner solver does not cover this structure: {detail}")
            }
            DistanceError::InconsistentAlternative { detail } => {
                write!(f, "theorem-of-the-alternative dichotomy violated: {detail}")
            }
        }
    }
}

impl std::error::Error for DistanceError {}

impl From<LpError> for DistanceError {
    fn from(e: LpError) -> Self {
        DistanceError::Lp(e)
    }
}

impl From<ProcessError> for DistanceError {
    fn from(e: ProcessError) -> Self {
        DistanceError::Process(e)
    }
}

impl From<NormError> for DistanceError {
    fn from(e: NormError) -> Self {
        DistanceError::Norm(e)
    }
}

/// `max(0, max_r ⟨r, expr⟩)` over the rays of `K`: how far `expr` sits from
/// the polar cone `K*`. Zero (within tolerance) certifies membership.
pub(crate) fn polar_violation<S: Scalar>(
    cone: &crate::cones::PolyhedralCone<S>,
    expr: &Vector<S>,
) -> S {
    cone.rays()
        .iter()
        .map(|r| r.dot(expr))
        .fold(S::zero(), |acc, v| acc.max(v))
}

pub(crate) fn value_le<S: Scalar>(a: ExtendedNonneg<S>, b: ExtendedNonneg<S>, tol: S) -> bool {
    if b.is_infinite() {
        return true;
    }
    if a.is_infinite() {
        return false;
    }
    a.get() <= b.get() + tol
}
