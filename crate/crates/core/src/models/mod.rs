//! Classical membership via deterministic-model enumeration and LP, quantum
//! realizations, and reference correlations for Bell scenarios.

mod classical;
mod deterministic;
mod quantum;
mod reference;

pub use classical::{
    classical_check, classical_check_with, classical_to_q1_certificate, ClassicalDecomposition,
    ClassicalVerdict, DECOMPOSITION_TOL,
};
pub use deterministic::{enumerate_deterministic, DeterministicModel, DEFAULT_SEARCH_BUDGET};
pub use quantum::{
    quantum_evaluate, tsirelson_realization, ComplexMatrix, QuantumRealization, RealizationFile,
    MAX_DIMENSION, MEASUREMENT_TOL, STATE_TOL,
};
pub use reference::{chsh_value, isotropic, pr_box, uniform_noise};

use thiserror::Error;

use crate::builders::BuildError;
use crate::hypergraph::HypergraphError;
use crate::kernel::KernelError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("deterministic-model search exceeded {limit} nodes")]
    SearchBudget { limit: usize },
    #[error("mixing LP exhausted its pivot budget after {pivots} pivots")]
    LpBudget { pivots: usize },
    #[error("decomposition misses its target by {deviation:e}")]
    DecompositionMismatch { deviation: f64 },
    #[error("malformed quantum realization: {0}")]
    RealizationShape(String),
    #[error("{what} is not Hermitian (defect {defect:e})")]
    NotHermitian { what: String, defect: f64 },
    #[error("state has trace {trace}")]
    TraceNotOne { trace: f64 },
    #[error("state is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    StateNotPsd { min_eigenvalue: f64 },
    #[error("projector for vertex {vertex} is not idempotent (residual {residual:e})")]
    NotIdempotent { vertex: usize, residual: f64 },
    #[error("projectors on edge {edge} do not sum to the identity (residual {residual:e})")]
    IncompleteMeasurement { edge: usize, residual: f64 },
    #[error("evaluated model fails edge normalization (max residual {max_residual:e})")]
    NotNormalized { max_residual: f64 },
    #[error("the CHSH functional is only defined on B(2,2,2)")]
    NotChshScenario,
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}
