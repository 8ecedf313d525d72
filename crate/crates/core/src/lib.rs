//! Structured distance to nonsurjectivity for conic linear systems.
//!
//! A conic process `F(x) = {Ax}` on a convex cone `K` is well-posed when
//! `AK` covers the whole target space. This crate computes the size of the
//! smallest structured perturbation `Σ_i P_i T_i Q_i` destroying that
//! property, through four independent characterizations that a main-theorem
//! equality ties together, and it produces and validates the extremal
//! perturbation certificates.
//!
//! All core math is generic over the scalar type ([`scalar::Scalar`], so
//! `f32` or `f64`); the `*64` aliases at the crate root are the concrete
//! types the CLI and most tests use.

pub mod cones;
pub mod distance;
pub mod linalg;
pub mod lp;
pub mod norms;
pub mod process;
pub mod sampling;
pub mod scalar;
pub mod svd;
pub mod testgen;

pub use cones::PolyhedralCone;
pub use linalg::{Matrix, Vector};
pub use norms::{ExtendedNonneg, NormKind, NormedSpace};
pub use process::{ConicProcess, PerturbationAssignment, StructureBlock};
pub use scalar::Scalar;

/// Concrete `f64` instantiations.
pub type Vec64 = linalg::Vector<f64>;
pub type Mat64 = linalg::Matrix<f64>;
pub type Cone64 = cones::PolyhedralCone<f64>;
pub type Process64 = process::ConicProcess<f64>;
pub type Block64 = process::StructureBlock<f64>;
pub type Assignment64 = process::PerturbationAssignment<f64>;
pub type Extended64 = norms::ExtendedNonneg<f64>;
pub type Report64 = distance::DistanceReport<f64>;
