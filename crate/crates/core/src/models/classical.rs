use serde::Serialize;

use super::deterministic::{enumerate_deterministic, DeterministicModel, DEFAULT_SEARCH_BUDGET};
use super::ModelError;
use crate::certificates::Q1Certificate;
use crate::hypergraph::{ContextualityScenario, ProbabilisticModel};
use crate::kernel::{lp_phase1, Bounds, LpConfig, LpOutcome, Matrix};

/// Tolerance for a decomposition reproducing its target model.
pub const DECOMPOSITION_TOL: f64 = 1e-7;

/// Convex mixture of deterministic models.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalDecomposition {
    pub weights: Vec<f64>,
    pub models: Vec<DeterministicModel>,
}

impl ClassicalDecomposition {
    /// `Σ_λ q_λ p_λ(v)` for every vertex.
    pub fn reproduce(&self, num_vertices: usize) -> ProbabilisticModel {
        let mut p = vec![0.0; num_vertices];
        for (q, d) in self.weights.iter().zip(&self.models) {
            for &v in &d.selected {
                p[v] += q;
            }
        }
        ProbabilisticModel::new(p)
    }

    pub fn max_deviation(&self, target: &ProbabilisticModel) -> f64 {
        self.reproduce(target.len())
            .p
            .iter()
            .zip(&target.p)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ClassicalVerdict {
    Classical(ClassicalDecomposition),
    NotClassical {
        /// Smallest max-norm residual of the mixing system; `None` when the
        /// scenario has no deterministic models at all.
        margin: Option<f64>,
        vacuous: bool,
    },
}

impl ClassicalVerdict {
    pub fn is_classical(&self) -> bool {
        matches!(self, Self::Classical(_))
    }
}

/// Decides whether `p` is a convex mixture of deterministic models by a
/// phase-1 LP over the mixing weights.
pub fn classical_check(
    s: &ContextualityScenario,
    p: &ProbabilisticModel,
) -> Result<ClassicalVerdict, ModelError> {
    classical_check_with(s, p, DEFAULT_SEARCH_BUDGET, &LpConfig::default())
}

pub fn classical_check_with(
    s: &ContextualityScenario,
    p: &ProbabilisticModel,
    search_budget: usize,
    lp: &LpConfig,
) -> Result<ClassicalVerdict, ModelError> {
    let n = s.num_vertices();
    if p.len() != n {
        return Err(ModelError::Hypergraph(
            crate::hypergraph::HypergraphError::DimensionMismatch {
                expected: n,
                found: p.len(),
            },
        ));
    }
    let det = enumerate_deterministic(s, search_budget)?;
    if det.is_empty() {
        return Ok(ClassicalVerdict::NotClassical {
            margin: None,
            vacuous: true,
        });
    }
    let cols = det.len();
    let mut a = Vec::with_capacity(n + 1);
    let mut b = Vec::with_capacity(n + 1);
    a.push(vec![1.0; cols]);
    b.push(1.0);
    for v in 0..n {
        a.push(
            det.iter()
                .map(|d| if d.contains(v) { 1.0 } else { 0.0 })
                .collect(),
        );
        b.push(p[v]);
    }
    match lp_phase1(&a, &b, &vec![Bounds::NONNEGATIVE; cols], lp)? {
        LpOutcome::Feasible { x, .. } => {
            let total: f64 = x.iter().map(|q| q.max(0.0)).sum();
            let mut weights = Vec::new();
            let mut models = Vec::new();
            for (q, d) in x.into_iter().zip(det) {
                if q > 0.0 {
                    weights.push(q / total);
                    models.push(d);
                }
            }
            let dec = ClassicalDecomposition { weights, models };
            let dev = dec.max_deviation(p);
            if dev > DECOMPOSITION_TOL {
                return Err(ModelError::DecompositionMismatch { deviation: dev });
            }
            Ok(ClassicalVerdict::Classical(dec))
        }
        LpOutcome::Infeasible { margin, .. } => Ok(ClassicalVerdict::NotClassical {
            margin: Some(margin),
            vacuous: false,
        }),
        LpOutcome::Inconclusive { pivots } => Err(ModelError::LpBudget { pivots }),
    }
}

/// `M = Σ_λ q_λ w_λ w_λᵀ` with `w_λ = (1, indicator of λ)`: a Q1 certificate
/// built without any solver.
pub fn classical_to_q1_certificate(
    dec: &ClassicalDecomposition,
    s: &ContextualityScenario,
) -> Q1Certificate {
    let n = s.num_vertices();
    let mut m = Matrix::zeros(n + 1, n + 1);
    for (q, d) in dec.weights.iter().zip(&dec.models) {
        let support: Vec<usize> = std::iter::once(0)
            .chain(d.selected.iter().map(|v| v + 1))
            .collect();
        for &i in &support {
            for &j in &support {
                m[(i, j)] += q;
            }
        }
    }
    Q1Certificate::new(m)
}
