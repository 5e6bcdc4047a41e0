//! Finite-dimensional quantum realizations: a density matrix and one
//! projector per vertex. Complex matrices are pairs of real matrices.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::builders::{bell_label, bell_scenario};
use crate::hypergraph::{
    validate_model, ContextualityScenario, ProbabilisticModel, LOOSE_NORMALIZATION_TOL,
};
use crate::kernel::{eigh, Matrix};

pub const MAX_DIMENSION: usize = 64;
/// Tolerance on `Σ_{v∈e} P_v = 1`, projector hermiticity and idempotence.
pub const MEASUREMENT_TOL: f64 = 1e-10;
/// Tolerance on the state's trace, hermiticity and positivity.
pub const STATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    pub re: Matrix,
    pub im: Matrix,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            re: Matrix::zeros(n, n),
            im: Matrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            re: Matrix::identity(n),
            im: Matrix::zeros(n, n),
        }
    }

    pub fn real(re: Matrix) -> Self {
        let n = re.rows();
        Self {
            re,
            im: Matrix::zeros(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.re.rows()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            re: self.re.add(&o.re),
            im: self.im.add(&o.im),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self {
            re: self.re.sub(&o.re),
            im: self.im.sub(&o.im),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            re: self.re.scaled(s),
            im: self.im.scaled(s),
        }
    }

    pub fn matmul(&self, o: &Self) -> Self {
        Self {
            re: self.re.matmul(&o.re).sub(&self.im.matmul(&o.im)),
            im: self.re.matmul(&o.im).add(&self.im.matmul(&o.re)),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            re: self.re.transpose(),
            im: self.im.transpose().scaled(-1.0),
        }
    }

    pub fn kron(&self, o: &Self) -> Self {
        let (n, m) = (self.dim(), o.dim());
        let mut out = Self::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let (ar, ai) = (self.re[(i, j)], self.im[(i, j)]);
                for k in 0..m {
                    for l in 0..m {
                        let (br, bi) = (o.re[(k, l)], o.im[(k, l)]);
                        out.re[(i * m + k, j * m + l)] = ar * br - ai * bi;
                        out.im[(i * m + k, j * m + l)] = ar * bi + ai * br;
                    }
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        (self.re.frobenius_norm().powi(2) + self.im.frobenius_norm().powi(2)).sqrt()
    }

    /// Largest entry of `|A − A†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let dr = self.re[(i, j)] - self.re[(j, i)];
                let di = self.im[(i, j)] + self.im[(j, i)];
                worst = worst.max(dr.hypot(di));
            }
        }
        worst
    }

    /// Real symmetric embedding `[[Re, −Im], [Im, Re]]` of a Hermitian matrix.
    pub fn real_embedding(&self) -> Matrix {
        let n = self.dim();
        let mut out = Matrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = self.re[(i, j)];
                out[(i + n, j + n)] = self.re[(i, j)];
                out[(i, j + n)] = -self.im[(i, j)];
                out[(i + n, j)] = self.im[(i, j)];
            }
        }
        out
    }

    /// `Re tr(A B)`.
    pub fn trace_product_re(&self, o: &Self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += self.re[(i, j)] * o.re[(j, i)] - self.im[(i, j)] * o.im[(j, i)];
            }
        }
        acc
    }

    fn to_pairs(&self) -> Vec<[f64; 2]> {
        self.re
            .as_slice()
            .iter()
            .zip(self.im.as_slice())
            .map(|(&r, &i)| [r, i])
            .collect()
    }

    fn from_pairs(dim: usize, pairs: &[[f64; 2]]) -> Option<Self> {
        if pairs.len() != dim * dim {
            return None;
        }
        Some(Self {
            re: Matrix::from_row_major(dim, dim, pairs.iter().map(|p| p[0]).collect())?,
            im: Matrix::from_row_major(dim, dim, pairs.iter().map(|p| p[1]).collect())?,
        })
    }
}

/// State and projective measurements reproducing a model via
/// `p(v) = tr(ρ P_v)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RealizationFile", into = "RealizationFile")]
pub struct QuantumRealization {
    pub dim: usize,
    pub rho: ComplexMatrix,
    /// Indexed by vertex id.
    pub projectors: Vec<ComplexMatrix>,
}

/// On-disk realization: row-major `[re, im]` entries, projectors keyed by
/// decimal vertex id.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RealizationFile {
    pub dim: usize,
    pub rho: Vec<[f64; 2]>,
    pub projectors: BTreeMap<String, Vec<[f64; 2]>>,
}

impl TryFrom<RealizationFile> for QuantumRealization {
    type Error = ModelError;

    fn try_from(f: RealizationFile) -> Result<Self, ModelError> {
        let bad = |what: String| ModelError::RealizationShape(what);
        let rho = ComplexMatrix::from_pairs(f.dim, &f.rho)
            .ok_or_else(|| bad(format!("rho needs {} entries", f.dim * f.dim)))?;
        let mut keyed = BTreeMap::new();
        for (k, v) in &f.projectors {
            let id: usize = k
                .parse()
                .map_err(|_| bad(format!("projector key {k:?} is not a vertex id")))?;
            let p = ComplexMatrix::from_pairs(f.dim, v)
                .ok_or_else(|| bad(format!("projector {k} has the wrong size")))?;
            keyed.insert(id, p);
        }
        if keyed.keys().copied().ne(0..keyed.len()) {
            return Err(bad("projector ids must be 0..|V| without gaps".into()));
        }
        Ok(Self {
            dim: f.dim,
            rho,
            projectors: keyed.into_values().collect(),
        })
    }
}

impl From<QuantumRealization> for RealizationFile {
    fn from(q: QuantumRealization) -> Self {
        RealizationFile {
            dim: q.dim,
            rho: q.rho.to_pairs(),
            projectors: q
                .projectors
                .iter()
                .enumerate()
                .map(|(v, p)| (v.to_string(), p.to_pairs()))
                .collect(),
        }
    }
}

impl QuantumRealization {
    /// `tr(ρ P_v)` for every vertex, without any checks.
    pub fn probabilities(&self) -> ProbabilisticModel {
        ProbabilisticModel::new(
            self.projectors
                .iter()
                .map(|p| self.rho.trace_product_re(p))
                .collect(),
        )
    }

    /// `‖Σ_{v∈e} P_v − 1‖_F` per edge.
    pub fn measurement_residuals(&self, s: &ContextualityScenario) -> Vec<f64> {
        let id = ComplexMatrix::identity(self.dim);
        s.edges()
            .iter()
            .map(|e| {
                e.iter()
                    .fold(ComplexMatrix::zeros(self.dim), |acc, &v| {
                        acc.add(&self.projectors[v])
                    })
                    .sub(&id)
                    .frobenius_norm()
            })
            .collect()
    }

    /// Checks the state, every projector and the completeness relation on
    /// every edge of `s`.
    pub fn check(&self, s: &ContextualityScenario) -> Result<(), ModelError> {
        if self.dim == 0 || self.dim > MAX_DIMENSION {
            return Err(ModelError::RealizationShape(format!(
                "dimension {} outside 1..={MAX_DIMENSION}",
                self.dim
            )));
        }
        if self.projectors.len() != s.num_vertices() {
            return Err(ModelError::RealizationShape(format!(
                "{} projectors for {} vertices",
                self.projectors.len(),
                s.num_vertices()
            )));
        }
        if self.rho.dim() != self.dim || self.projectors.iter().any(|p| p.dim() != self.dim) {
            return Err(ModelError::RealizationShape(
                "matrix sizes differ from dim".into(),
            ));
        }
        let defect = self.rho.hermiticity_defect();
        if defect > STATE_TOL {
            return Err(ModelError::NotHermitian {
                what: "rho".into(),
                defect,
            });
        }
        let trace = self.rho.re.trace();
        if (trace - 1.0).abs() > STATE_TOL {
            return Err(ModelError::TraceNotOne { trace });
        }
        // The real embedding doubles each eigenvalue of a Hermitian matrix.
        let min = eigh(&self.rho.real_embedding())?.min_value();
        if min < -STATE_TOL {
            return Err(ModelError::StateNotPsd {
                min_eigenvalue: min,
            });
        }
        for (v, p) in self.projectors.iter().enumerate() {
            let defect = p.hermiticity_defect();
            if defect > MEASUREMENT_TOL {
                return Err(ModelError::NotHermitian {
                    what: format!("projector {v}"),
                    defect,
                });
            }
            let sq = p.matmul(p).sub(p);
            let residual = sq
                .re
                .as_slice()
                .iter()
                .chain(sq.im.as_slice())
                .fold(0.0f64, |m, x| m.max(x.abs()));
            if residual > MEASUREMENT_TOL {
                return Err(ModelError::NotIdempotent {
                    vertex: v,
                    residual,
                });
            }
        }
        for (edge, residual) in self.measurement_residuals(s).into_iter().enumerate() {
            if residual > MEASUREMENT_TOL {
                return Err(ModelError::IncompleteMeasurement { edge, residual });
            }
        }
        Ok(())
    }
}

/// `p(v) = tr(ρ P_v)` after checking the realization on `s`.
pub fn quantum_evaluate(
    q: &QuantumRealization,
    s: &ContextualityScenario,
) -> Result<ProbabilisticModel, ModelError> {
    q.check(s)?;
    let p = q.probabilities();
    let report = validate_model(s, &p, LOOSE_NORMALIZATION_TOL)?;
    if !report.accepted {
        return Err(ModelError::NotNormalized {
            max_residual: report.max_residual,
        });
    }
    Ok(p)
}

fn projector_from_observable(sign: f64, obs: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::identity(obs.dim())
        .add(&obs.scaled(sign))
        .scaled(0.5)
}

/// Two-qubit realization attaining CHSH = 2√2 on `B(2,2,2)`: the state
/// `(|00⟩ + |11⟩)/√2`, Alice measuring Z and X, Bob measuring (Z ± X)/√2.
/// Projectors are ordered like the vertices of `bell_scenario(2, 2, 2)`.
pub fn tsirelson_realization() -> QuantumRealization {
    let s = bell_scenario(2, 2, 2).expect("B(2,2,2) builds");
    let z = ComplexMatrix::real(Matrix::from_rows(&[[1.0, 0.0], [0.0, -1.0]]));
    let x = ComplexMatrix::real(Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]));
    let alice = [z.clone(), x.clone()];
    let bob = [
        z.add(&x).scaled(FRAC_1_SQRT_2),
        z.sub(&x).scaled(FRAC_1_SQRT_2),
    ];
    let sign = |o: usize| if o == 0 { 1.0 } else { -1.0 };

    let mut projectors = vec![ComplexMatrix::zeros(4); 16];
    for xa in 0..2 {
        for yb in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    let pa = projector_from_observable(sign(a), &alice[xa]);
                    let pb = projector_from_observable(sign(b), &bob[yb]);
                    let v = s
                        .vertex_by_label(&bell_label(&[a, b], &[xa, yb]))
                        .expect("Bell label present");
                    projectors[v] = pa.kron(&pb);
                }
            }
        }
    }
    let mut rho = Matrix::zeros(4, 4);
    for &(i, j) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
        rho[(i, j)] = 0.5;
    }
    QuantumRealization {
        dim: 4,
        rho: ComplexMatrix::real(rho),
        projectors,
    }
}
