//! The conic process `F(x) = {Ax}` for `x ∈ K`, its adjoint, singularity and
//! surjectivity tests, and structured perturbations `F + Σ_i P_i T_i Q_i`.

use std::fmt;

use crate::cones::{nonzero_in_halfspace_cone, PolyhedralCone};
use crate::linalg::{Matrix, Vector};
use crate::lp::LpError;
use crate::norms::{ball_extreme_points, norm, NormError, NormedSpace};
use crate::scalar::Scalar;
use crate::svd::largest_singular_value;

/// Sign-pattern enumerations explode as `2^dim`; refuse beyond this.
pub const SIGN_ENUM_DIM_CAP: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub enum ProcessError {
    Dimensions { context: &'static str },
    DimensionCap { dim: usize, cap: usize },
    Lp(LpError),
    Norm(NormError),
}

impl fmt::Display for ProcessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProcessError::Dimensions { context } => write!(f, "dimension mismatch: {context}"),
            ProcessError::DimensionCap { dim, cap } => {
                write!(f, "sign enumeration over dimension {dim} exceeds the cap {cap}")
            }
            ProcessError::Lp(e) => write!(f, "lp subsolver: {e}"),
            ProcessError::Norm(e) => write!(f, "norm: {e}"),
        }
    }
}

impl std::error::Error for ProcessError {}

impl From<LpError> for ProcessError {
    fn from(e: LpError) -> Self {
        ProcessError::Lp(e)
    }
}

impl From<NormError> for ProcessError {
    fn from(e: NormError) -> Self {
        ProcessError::Norm(e)
    }
}

/// `F(x) = {Ax}` if `x ∈ K`, empty otherwise. The graph is a closed convex
/// cone because `K` is polyhedral.
#[derive(Clone, Debug)]
pub struct ConicProcess<S> {
    pub x_space: NormedSpace,
    pub y_space: NormedSpace,
    pub matrix: Matrix<S>,
    pub cone: PolyhedralCone<S>,
}

/// The adjoint `F*(y*) = A*y* + K*` as data: the transpose and the polar cone.
#[derive(Clone, Debug)]
pub struct AdjointData<S> {
    pub matrix_transpose: Matrix<S>,
    pub cone_polar: PolyhedralCone<S>,
}

impl<S: Scalar> ConicProcess<S> {
    pub fn new(
        x_space: NormedSpace,
        y_space: NormedSpace,
        matrix: Matrix<S>,
        cone: PolyhedralCone<S>,
    ) -> Result<Self, ProcessError> {
        if matrix.rows() != y_space.dim || matrix.cols() != x_space.dim {
            return Err(ProcessError::Dimensions {
                context: "A must map the X space into the Y space",
            });
        }
        if cone.dim() != x_space.dim {
            return Err(ProcessError::Dimensions {
                context: "domain cone must live in the X space",
            });
        }
        Ok(ConicProcess {
            x_space,
            y_space,
            matrix,
            cone,
        })
    }

    pub fn x_dim(&self) -> usize {
        self.x_space.dim
    }

    pub fn y_dim(&self) -> usize {
        self.y_space.dim
    }

    pub fn adjoint(&self) -> AdjointData<S> {
        AdjointData {
            matrix_transpose: self.matrix.transpose(),
            cone_polar: self.cone.polar(),
        }
    }

    /// Nonzero `x ∈ K` with `Ax = 0`, if one exists (`F` is then singular).
    pub fn singular_point(&self) -> Result<Option<Vector<S>>, ProcessError> {
        let rows: Vec<Vector<S>> = (0..self.y_dim()).map(|i| self.matrix.row(i)).collect();
        Ok(self.cone.nonzero_element_with(&rows, &[])?)
    }

    pub fn is_singular(&self) -> Result<bool, ProcessError> {
        Ok(self.singular_point()?.is_some())
    }

    /// Nonzero `y*` with `-A*y* ∈ K*`, i.e. a singular point of the adjoint.
    /// `F` is surjective exactly when none exists (open mapping theorem).
    ///
    /// In generator form `-A*y* ∈ K*` reads `⟨y*, A r⟩ ≥ 0` for every ray `r`
    /// of `K`, so the search runs over a halfspace cone in `Y*`.
    pub fn nonsurjectivity_witness(&self) -> Result<Option<Vector<S>>, ProcessError> {
        self.nonsurjectivity_witness_with_tol(S::c(crate::lp::DEFAULT_FEAS_TOL))
    }

    /// Same test at an explicit feasibility tolerance. A tighter tolerance
    /// narrows the band of almost-nonsurjective processes that get accepted,
    /// which the searches use to keep their upper bounds honest.
    pub fn nonsurjectivity_witness_with_tol(
        &self,
        tol: S,
    ) -> Result<Option<Vector<S>>, ProcessError> {
        let rows: Vec<Vector<S>> = self
            .cone
            .rays()
            .iter()
            .map(|r| self.matrix.matvec(r))
            .collect();
        let eq: Vec<Vector<S>> = Vec::new();
        if self.cone.is_zero() {
            // F(X) = {0}: any nonzero functional witnesses nonsurjectivity.
            return Ok(Some(Vector::basis(self.y_dim(), 0)));
        }
        Ok(nonzero_in_halfspace_cone(self.y_dim(), &rows, &eq, &[], tol)?)
    }

    pub fn is_surjective(&self) -> Result<bool, ProcessError> {
        Ok(self.nonsurjectivity_witness()?.is_none())
    }

    pub fn is_surjective_with_tol(&self, tol: S) -> Result<bool, ProcessError> {
        Ok(self.nonsurjectivity_witness_with_tol(tol)?.is_none())
    }

    /// The perturbed process `F + Σ_i P_i T_i Q_i`: only the linear part
    /// moves; the domain cone is unchanged.
    pub fn perturb(
        &self,
        blocks: &[StructureBlock<S>],
        assignment: &PerturbationAssignment<S>,
    ) -> Result<ConicProcess<S>, ProcessError> {
        if blocks.len() != assignment.t.len() {
            return Err(ProcessError::Dimensions {
                context: "one T per structure block",
            });
        }
        let mut matrix = self.matrix.clone();
        for (block, t) in blocks.iter().zip(&assignment.t) {
            block.check_against(self)?;
            if t.rows() != block.v_space.dim || t.cols() != block.u_space.dim {
                return Err(ProcessError::Dimensions {
                    context: "T_i must map U_i into V_i",
                });
            }
            matrix = matrix.add(&block.p.matmul(t).matmul(&block.q));
        }
        ConicProcess::new(
            self.x_space.clone(),
            self.y_space.clone(),
            matrix,
            self.cone.clone(),
        )
    }
}

/// One `(P_i, Q_i)` pair with its `U_i`/`V_i` spaces.
#[derive(Clone, Debug)]
pub struct StructureBlock<S> {
    pub index: usize,
    pub p: Matrix<S>,
    pub q: Matrix<S>,
    pub u_space: NormedSpace,
    pub v_space: NormedSpace,
}

impl<S: Scalar> StructureBlock<S> {
    pub fn new(
        index: usize,
        p: Matrix<S>,
        q: Matrix<S>,
        u_space: NormedSpace,
        v_space: NormedSpace,
    ) -> Result<Self, ProcessError> {
        if p.cols() != v_space.dim {
            return Err(ProcessError::Dimensions {
                context: "P_i must have one column per V_i coordinate",
            });
        }
        if q.rows() != u_space.dim {
            return Err(ProcessError::Dimensions {
                context: "Q_i must have one row per U_i coordinate",
            });
        }
        Ok(StructureBlock {
            index,
            p,
            q,
            u_space,
            v_space,
        })
    }

    pub fn check_against(&self, process: &ConicProcess<S>) -> Result<(), ProcessError> {
        if self.p.rows() != process.y_dim() {
            return Err(ProcessError::Dimensions {
                context: "P_i must map V_i into the Y space",
            });
        }
        if self.q.cols() != process.x_dim() {
            return Err(ProcessError::Dimensions {
                context: "Q_i must map the X space into U_i",
            });
        }
        Ok(())
    }

    /// Unstructured perturbation of the whole map: `P = I_Y`, `Q = I_X`.
    pub fn unstructured(process: &ConicProcess<S>) -> Self {
        StructureBlock {
            index: 0,
            p: Matrix::identity(process.y_dim()),
            q: Matrix::identity(process.x_dim()),
            u_space: process.x_space.clone(),
            v_space: process.y_space.clone(),
        }
    }
}

/// The `T_i` matrices of a structured perturbation, with their operator norms
/// and the structured size `max_i ‖T_i‖`.
#[derive(Clone, Debug)]
pub struct PerturbationAssignment<S> {
    pub t: Vec<Matrix<S>>,
    pub block_norms: Vec<S>,
    pub size: S,
    pub rank_one: Vec<bool>,
}

impl<S: Scalar> PerturbationAssignment<S> {
    pub fn from_matrices(
        blocks: &[StructureBlock<S>],
        t: Vec<Matrix<S>>,
    ) -> Result<Self, ProcessError> {
        if blocks.len() != t.len() {
            return Err(ProcessError::Dimensions {
                context: "one T per structure block",
            });
        }
        let mut block_norms = Vec::with_capacity(t.len());
        let mut rank_one = Vec::with_capacity(t.len());
        for (block, ti) in blocks.iter().zip(&t) {
            if ti.rows() != block.v_space.dim || ti.cols() != block.u_space.dim {
                return Err(ProcessError::Dimensions {
                    context: "T_i must map U_i into V_i",
                });
            }
            block_norms.push(operator_norm(ti, &block.u_space, &block.v_space)?);
            rank_one.push(ti.rank(S::c(1e-9)) <= 1);
        }
        let size = block_norms
            .iter()
            .fold(S::zero(), |acc, &n| acc.max(n));
        Ok(PerturbationAssignment {
            t,
            block_norms,
            size,
            rank_one,
        })
    }

    pub fn zero(blocks: &[StructureBlock<S>]) -> Self {
        PerturbationAssignment {
            t: blocks
                .iter()
                .map(|b| Matrix::zeros(b.v_space.dim, b.u_space.dim))
                .collect(),
            block_norms: vec![S::zero(); blocks.len()],
            size: S::zero(),
            rank_one: vec![true; blocks.len()],
        }
    }

    pub fn scale(&self, factor: S) -> Self {
        PerturbationAssignment {
            t: self.t.iter().map(|m| m.scale(factor)).collect(),
            block_norms: self
                .block_norms
                .iter()
                .map(|&n| n * factor.abs())
                .collect(),
            size: self.size * factor.abs(),
            rank_one: self.rank_one.clone(),
        }
    }
}

/// Induced operator norm between the supported norm kinds.
///
/// Polyhedral source balls are maximized over their extreme points; an L2
/// source pairs with a polyhedral target through the target's dual-ball
/// extreme points (`‖T‖ = max_e ‖T* e‖_2`); L2→L2 is the top singular value.
/// Sign enumerations are capped at [`SIGN_ENUM_DIM_CAP`].
pub fn operator_norm<S: Scalar>(
    t: &Matrix<S>,
    from: &NormedSpace,
    to: &NormedSpace,
) -> Result<S, ProcessError> {
    if t.rows() != to.dim || t.cols() != from.dim {
        return Err(ProcessError::Dimensions {
            context: "operator norm needs T: from -> to",
        });
    }
    if from.norm.is_polyhedral() {
        check_sign_cap(from.norm, from.dim)?;
        let points = ball_extreme_points::<S>(from.norm, from.dim)?;
        return Ok(points
            .iter()
            .map(|e| norm(to.norm, &t.matvec(e)))
            .fold(S::zero(), |acc, v| acc.max(v)));
    }
    if to.norm.is_polyhedral() {
        let dual = to.norm.dual();
        check_sign_cap(dual, to.dim)?;
        let points = ball_extreme_points::<S>(dual, to.dim)?;
        return Ok(points
            .iter()
            .map(|e| t.matvec_transpose(e).euclid())
            .fold(S::zero(), |acc, v| acc.max(v)));
    }
    Ok(largest_singular_value(t))
}

fn check_sign_cap(kind: crate::norms::NormKind, dim: usize) -> Result<(), ProcessError> {
    if kind == crate::norms::NormKind::Linf && dim > SIGN_ENUM_DIM_CAP {
        return Err(ProcessError::DimensionCap {
            dim,
            cap: SIGN_ENUM_DIM_CAP,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::NormKind;

    fn space(dim: usize, kind: NormKind) -> NormedSpace {
        NormedSpace::new(dim, kind)
    }

    fn process(
        a: Matrix<f64>,
        cone: PolyhedralCone<f64>,
        x_norm: NormKind,
        y_norm: NormKind,
    ) -> ConicProcess<f64> {
        let (m, n) = (a.rows(), a.cols());
        ConicProcess::new(space(n, x_norm), space(m, y_norm), a, cone).unwrap()
    }

    #[test]
    fn adjoint_examples() {
        let f = process(
            Matrix::identity(2),
            PolyhedralCone::nonneg_orthant(2),
            NormKind::L2,
            NormKind::L2,
        );
        let adj = f.adjoint();
        assert_eq!(adj.matrix_transpose, Matrix::identity(2));
        assert!(adj.cone_polar.member(&Vector::from_slice(&[-1.0, -1.0]), 1e-9));
        assert!(!adj.cone_polar.member(&Vector::from_slice(&[1.0, 0.0]), 1e-9));

        let f = process(
            Matrix::identity(2),
            PolyhedralCone::full(2),
            NormKind::L2,
            NormKind::L2,
        );
        assert!(f.adjoint().cone_polar.is_zero());

        let a = Matrix::from_rows(&[vec![1.0, 0.0, -1.0], vec![0.0, 1.0, -1.0]]);
        let f = process(a.clone(), PolyhedralCone::nonneg_orthant(3), NormKind::L2, NormKind::L2);
        let adj = f.adjoint();
        assert_eq!(adj.matrix_transpose, a.transpose());
        assert!(adj
            .cone_polar
            .member(&Vector::from_slice(&[-1.0, 0.0, -0.5]), 1e-9));
    }

    #[test]
    fn singularity_examples() {
        let f = process(
            Matrix::identity(2),
            PolyhedralCone::full(2),
            NormKind::L2,
            NormKind::L2,
        );
        assert!(!f.is_singular().unwrap());

        let f = process(
            Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]),
            PolyhedralCone::full(2),
            NormKind::L2,
            NormKind::L2,
        );
        let x = f.singular_point().unwrap().expect("kernel vector");
        assert!(x[0].abs() < 1e-9 && x[1].abs() > 0.5);

        let f = process(
            Matrix::from_rows(&[vec![1.0, 1.0]]),
            PolyhedralCone::nonneg_orthant(2),
            NormKind::L2,
            NormKind::L2,
        );
        assert!(!f.is_singular().unwrap());
    }

    #[test]
    fn surjectivity_examples() {
        let f = process(
            Matrix::identity(2),
            PolyhedralCone::full(2),
            NormKind::L2,
            NormKind::L2,
        );
        assert!(f.is_surjective().unwrap());

        let f = process(
            Matrix::identity(2),
            PolyhedralCone::nonneg_orthant(2),
            NormKind::L2,
            NormKind::L2,
        );
        let witness = f.nonsurjectivity_witness().unwrap().expect("orthant image");
        // -A* y ∈ K* means y must be nonnegative here.
        assert!(witness[0] >= -1e-9 && witness[1] >= -1e-9);
        assert!(witness.max_abs() > 0.5);

        let a = Matrix::from_rows(&[vec![1.0, 0.0, -1.0], vec![0.0, 1.0, -1.0]]);
        let f = process(a, PolyhedralCone::nonneg_orthant(3), NormKind::L2, NormKind::L2);
        assert!(f.is_surjective().unwrap());
    }

    #[test]
    fn perturbation_examples() {
        let a = Matrix::from_rows(&[vec![3.0, 0.0], vec![0.0, 1.0]]);
        let f = process(a, PolyhedralCone::full(2), NormKind::L2, NormKind::L2);
        let blocks = vec![StructureBlock::unstructured(&f)];

        let zero = PerturbationAssignment::zero(&blocks);
        let same = f.perturb(&blocks, &zero).unwrap();
        assert_eq!(same.matrix, f.matrix);

        let neg_a = PerturbationAssignment::from_matrices(&blocks, vec![f.matrix.scale(-1.0)]).unwrap();
        let dead = f.perturb(&blocks, &neg_a).unwrap();
        assert!(dead.matrix.is_zero(0.0));
        assert!(!dead.is_surjective().unwrap());

        // Masked single-entry block: only A[0][0] can move.
        let block = StructureBlock::new(
            0,
            Matrix::from_rows(&[vec![1.0], vec![0.0]]),
            Matrix::from_rows(&[vec![1.0, 0.0]]),
            space(1, NormKind::L1),
            space(1, NormKind::L1),
        )
        .unwrap();
        let t = PerturbationAssignment::from_matrices(
            std::slice::from_ref(&block),
            vec![Matrix::from_rows(&[vec![-3.0]])],
        )
        .unwrap();
        let perturbed = f.perturb(std::slice::from_ref(&block), &t).unwrap();
        assert_eq!(perturbed.matrix[(0, 0)], 0.0);
        assert_eq!(perturbed.matrix[(1, 1)], 1.0);
        assert!(!perturbed.is_surjective().unwrap());
    }

    #[test]
    fn operator_norm_cases() {
        let id = Matrix::<f64>::identity(2);
        let l1 = space(2, NormKind::L1);
        assert!((operator_norm(&id, &l1, &l1).unwrap() - 1.0).abs() < 1e-12);

        let a = Matrix::<f64>::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let l2 = space(2, NormKind::L2);
        let got = operator_norm(&a, &l2, &l2).unwrap();
        assert!((got - 5.464985704219043).abs() < 1e-9);

        // Rank-one: norm factorizes as dual norm times target norm.
        let u_star = Vector::<f64>::from_slice(&[1.0, -2.0]);
        let v = Vector::<f64>::from_slice(&[3.0, 1.0]);
        let t = Matrix::outer(&v, &u_star);
        for (from_kind, to_kind) in [
            (NormKind::L1, NormKind::Linf),
            (NormKind::L2, NormKind::L2),
            (NormKind::Linf, NormKind::L1),
            (NormKind::L2, NormKind::L1),
            (NormKind::L1, NormKind::L2),
        ] {
            let from = space(2, from_kind);
            let to = space(2, to_kind);
            let expected = norm(from_kind.dual(), &u_star) * norm(to_kind, &v);
            let got = operator_norm(&t, &from, &to).unwrap();
            assert!(
                (got - expected).abs() < 1e-9,
                "{from_kind}->{to_kind}: got {got}, expected {expected}"
            );
        }
    }

    #[test]
    fn dimension_cap_guard() {
        let big = space(13, NormKind::Linf);
        let t = Matrix::<f64>::zeros(13, 13);
        assert!(matches!(
            operator_norm(&t, &big, &big),
            Err(ProcessError::DimensionCap { dim: 13, cap: 12 })
        ));
    }
}
