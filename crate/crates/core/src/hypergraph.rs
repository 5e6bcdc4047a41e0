//! Contextuality scenarios (hypergraphs of events and measurements) and
//! probabilistic models on them.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Edge-normalization tolerance for exactly specified models.
pub const NORMALIZATION_TOL: f64 = 1e-9;
/// Edge-normalization tolerance for models produced by floating-point
/// quantum evaluation.
pub const LOOSE_NORMALIZATION_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HypergraphError {
    #[error("edge {edge} is empty")]
    EmptyEdge { edge: usize },
    #[error("edge {edge} lists vertex {vertex} more than once")]
    DuplicateVertex { edge: usize, vertex: usize },
    #[error("edge {edge} references vertex {vertex}, but there are only {len} vertices")]
    OutOfRange {
        edge: usize,
        vertex: usize,
        len: usize,
    },
    #[error("vertex {vertex} belongs to no edge")]
    IsolatedVertex { vertex: usize },
    #[error("model has {found} entries, scenario has {expected} vertices")]
    DimensionMismatch { expected: usize, found: usize },
}

/// A hypergraph `H = (V, E)`: vertices are events, edges are measurements.
///
/// Edges are kept in canonical form: each edge sorted ascending, the edge
/// list sorted lexicographically and free of duplicates. Vertex ids follow
/// the input label order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ScenarioFile", into = "ScenarioFile")]
pub struct ContextualityScenario {
    labels: Vec<String>,
    edges: Vec<Vec<usize>>,
    incidence: Vec<Vec<usize>>,
}

/// On-disk scenario layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub vertices: Vec<String>,
    pub edges: Vec<Vec<usize>>,
}

impl TryFrom<ScenarioFile> for ContextualityScenario {
    type Error = HypergraphError;

    fn try_from(f: ScenarioFile) -> Result<Self, Self::Error> {
        Self::new(f.vertices, f.edges)
    }
}

impl From<ContextualityScenario> for ScenarioFile {
    fn from(s: ContextualityScenario) -> Self {
        ScenarioFile {
            vertices: s.labels,
            edges: s.edges,
        }
    }
}

impl ContextualityScenario {
    pub fn new<L: ToString>(
        labels: impl IntoIterator<Item = L>,
        edges: impl IntoIterator<Item = Vec<usize>>,
    ) -> Result<Self, HypergraphError> {
        let labels: Vec<String> = labels.into_iter().map(|l| l.to_string()).collect();
        let len = labels.len();
        let mut canonical = BTreeSet::new();
        for (ei, mut edge) in edges.into_iter().enumerate() {
            if edge.is_empty() {
                return Err(HypergraphError::EmptyEdge { edge: ei });
            }
            if let Some(&vertex) = edge.iter().find(|&&v| v >= len) {
                return Err(HypergraphError::OutOfRange {
                    edge: ei,
                    vertex,
                    len,
                });
            }
            edge.sort_unstable();
            if let Some(w) = edge.windows(2).find(|w| w[0] == w[1]) {
                return Err(HypergraphError::DuplicateVertex {
                    edge: ei,
                    vertex: w[0],
                });
            }
            canonical.insert(edge);
        }
        let edges: Vec<Vec<usize>> = canonical.into_iter().collect();
        let mut incidence = vec![Vec::new(); len];
        for (ei, edge) in edges.iter().enumerate() {
            for &v in edge {
                incidence[v].push(ei);
            }
        }
        if let Some(vertex) = incidence.iter().position(Vec::is_empty) {
            return Err(HypergraphError::IsolatedVertex { vertex });
        }
        Ok(Self {
            labels,
            edges,
            incidence,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &[usize] {
        &self.edges[e]
    }

    /// Edges containing vertex `v`, ascending.
    pub fn edges_of(&self, v: usize) -> &[usize] {
        &self.incidence[v]
    }

    /// Unordered pairs `(u, v)`, `u < v`, that share at least one edge.
    pub fn exclusive_pairs(&self) -> BTreeSet<(usize, usize)> {
        let mut pairs = BTreeSet::new();
        for edge in &self.edges {
            for (i, &u) in edge.iter().enumerate() {
                for &v in &edge[i + 1..] {
                    pairs.insert((u, v));
                }
            }
        }
        pairs
    }

    /// Dense symmetric exclusivity relation; the diagonal is false.
    pub fn exclusivity_matrix(&self) -> Vec<Vec<bool>> {
        let n = self.num_vertices();
        let mut m = vec![vec![false; n]; n];
        for (u, v) in self.exclusive_pairs() {
            m[u][v] = true;
            m[v][u] = true;
        }
        m
    }

    /// Histogram of edge sizes as `(size, count)` ascending by size.
    pub fn edge_size_histogram(&self) -> Vec<(usize, usize)> {
        let mut hist = std::collections::BTreeMap::new();
        for e in &self.edges {
            *hist.entry(e.len()).or_insert(0usize) += 1;
        }
        hist.into_iter().collect()
    }

    /// Checks a probabilistic model against the scenario.
    pub fn validate_model(
        &self,
        model: &ProbabilisticModel,
        tol: f64,
    ) -> Result<ValidationReport, HypergraphError> {
        validate_model(self, model, tol)
    }
}

/// Probability per vertex, indexed by vertex id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilisticModel {
    pub p: Vec<f64>,
}

impl ProbabilisticModel {
    pub fn new(p: Vec<f64>) -> Self {
        Self { p }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    /// Convex combination `w·self + (1−w)·other`.
    pub fn mix(&self, other: &Self, w: f64) -> Self {
        assert_eq!(self.len(), other.len());
        Self::new(
            self.p
                .iter()
                .zip(&other.p)
                .map(|(a, b)| w * a + (1.0 - w) * b)
                .collect(),
        )
    }
}

impl std::ops::Index<usize> for ProbabilisticModel {
    type Output = f64;

    fn index(&self, v: usize) -> &f64 {
        &self.p[v]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    /// `|Σ_{v∈e} p(v) − 1|` per edge, in edge order.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// Vertices whose probability lies outside `[0, 1 + tol]`.
    pub out_of_range: Vec<usize>,
    pub tolerance: f64,
    pub accepted: bool,
}

impl ValidationReport {
    /// First edge whose residual exceeds the tolerance.
    pub fn worst_edge(&self) -> Option<(usize, f64)> {
        self.residuals
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, r)| r > self.tolerance)
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }
}

pub fn validate_model(
    s: &ContextualityScenario,
    model: &ProbabilisticModel,
    tol: f64,
) -> Result<ValidationReport, HypergraphError> {
    if model.len() != s.num_vertices() {
        return Err(HypergraphError::DimensionMismatch {
            expected: s.num_vertices(),
            found: model.len(),
        });
    }
    let residuals: Vec<f64> = s
        .edges()
        .iter()
        .map(|e| (e.iter().map(|&v| model[v]).sum::<f64>() - 1.0).abs())
        .collect();
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    let out_of_range: Vec<usize> = model
        .p
        .iter()
        .enumerate()
        .filter(|(_, &x)| !(0.0..=1.0 + tol).contains(&x))
        .map(|(v, _)| v)
        .collect();
    let accepted = max_residual <= tol && out_of_range.is_empty();
    Ok(ValidationReport {
        residuals,
        max_residual,
        out_of_range,
        tolerance: tol,
        accepted,
    })
}

/// The three-vertex scenario whose edges are all pairs.
pub fn triangle() -> ContextualityScenario {
    ContextualityScenario::new(["1", "2", "3"], [vec![0, 1], vec![1, 2], vec![0, 2]])
        .expect("triangle is valid")
}

/// One measurement with `d` outcomes.
pub fn single_edge(d: usize) -> ContextualityScenario {
    ContextualityScenario::new((1..=d).map(|i| i.to_string()), [(0..d).collect()])
        .expect("single edge is valid")
}
