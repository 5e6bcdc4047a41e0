//! Dense numerical core: Jacobi eigensolver, PSD and affine projections,
//! alternating-projection SDP feasibility and a phase-1 simplex.

mod affine;
mod eigen;
mod lp;
mod matrix;
mod sdp;

pub use affine::{
    AffineConstraintSet, LinearConstraint, SymmetricSpace, CONSISTENCY_TOL, RANK_TOL,
};
pub use eigen::{eigh, min_eigenvalue, project_psd, SymmetricEigen, SYMMETRY_TOL};
pub use lp::{lp_phase1, Bounds, LpConfig, LpOutcome};
pub use matrix::Matrix;
pub use sdp::{
    negative_part_norm, sdp_feasibility, IterationRecord, SdpConfig, SdpOutcome, SdpStatus,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("constraint {constraint} references an entry outside the {n}x{n} space")]
    ConstraintOutOfRange { constraint: usize, n: usize },
    #[error("constraint set is structurally infeasible: constraint {constraint} contradicts earlier ones (residual {residual:e})")]
    Inconsistent { constraint: usize, residual: f64 },
    #[error("malformed linear program: {0}")]
    LpShape(String),
}
