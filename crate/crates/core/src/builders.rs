//! Marginal scenarios, measurement protocols and their hypergraph images,
//! including Bell scenarios with correlated (wired) measurements.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::{
    validate_model, ContextualityScenario, HypergraphError, ProbabilisticModel, NORMALIZATION_TOL,
};

/// Largest Bell scenario, in vertices, that [`bell_scenario`] will build.
pub const MAX_BELL_VERTICES: u128 = 10_000;
/// Default cap on candidate edges (protocol combinations before set
/// deduplication) generated at any level of the recursion.
pub const DEFAULT_PROTOCOL_BUDGET: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BuildError {
    #[error("observable {0} is not part of the scenario")]
    UnknownObservable(usize),
    #[error("context {context} lists observable {observable} more than once")]
    DuplicateObservable { context: usize, observable: usize },
    #[error("context {context} is empty")]
    EmptyContext { context: usize },
    #[error("context {smaller} is contained in context {larger}; contexts must be maximal")]
    NonMaximalContext { smaller: usize, larger: usize },
    #[error("observable {0} belongs to no context")]
    UncoveredObservable(usize),
    #[error("outcome set must be non-empty")]
    NoOutcomes,
    #[error("Bell scenario needs n >= 1, m >= 1, d >= 2 (got n={n}, m={m}, d={d})")]
    InvalidBellParameters { n: usize, m: usize, d: usize },
    #[error("scenario would have {vertices} vertices, above the limit of {limit}")]
    SizeGuard { vertices: u128, limit: u128 },
    #[error("protocol enumeration exceeds the budget of {limit} candidates")]
    ProtocolBudget { limit: usize },
    #[error("correlation table shape mismatch: {0}")]
    TableShape(String),
    #[error("conditional distribution for setting index {setting} is not normalized (sum {sum})")]
    TableNotNormalized { setting: usize, sum: f64 },
    #[error("signalling correlations: edge {edge} sums to {sum}")]
    Signalling { edge: usize, sum: f64 },
    #[error("scenario has no vertex labelled {0:?}")]
    MissingLabel(String),
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
}

/// Observables `X`, maximal jointly measurable contexts `𝓜` and a uniform
/// outcome set `O = {0, …, d−1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MarginalScenario {
    observables: Vec<usize>,
    contexts: Vec<Vec<usize>>,
    outcomes: usize,
}

/// On-disk marginal scenario: observables are `0..observables`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MarginalFile {
    pub observables: usize,
    pub contexts: Vec<Vec<usize>>,
    pub outcomes: usize,
}

impl TryFrom<MarginalFile> for MarginalScenario {
    type Error = BuildError;

    fn try_from(f: MarginalFile) -> Result<Self, BuildError> {
        MarginalScenario::new(f.observables, f.contexts, f.outcomes)
    }
}

impl MarginalScenario {
    /// Observables are numbered `0..num_observables`. Duplicate contexts are
    /// merged; non-maximal contexts are rejected.
    pub fn new(
        num_observables: usize,
        contexts: Vec<Vec<usize>>,
        outcomes: usize,
    ) -> Result<Self, BuildError> {
        if outcomes == 0 {
            return Err(BuildError::NoOutcomes);
        }
        let mut seen = BTreeSet::new();
        let mut canon = Vec::new();
        for (ci, mut c) in contexts.into_iter().enumerate() {
            if c.is_empty() {
                return Err(BuildError::EmptyContext { context: ci });
            }
            if let Some(&o) = c.iter().find(|&&o| o >= num_observables) {
                return Err(BuildError::UnknownObservable(o));
            }
            c.sort_unstable();
            if let Some(w) = c.windows(2).find(|w| w[0] == w[1]) {
                return Err(BuildError::DuplicateObservable {
                    context: ci,
                    observable: w[0],
                });
            }
            if seen.insert(c.clone()) {
                canon.push(c);
            }
        }
        for (i, a) in canon.iter().enumerate() {
            for (j, b) in canon.iter().enumerate() {
                if i != j && a.iter().all(|o| b.binary_search(o).is_ok()) {
                    return Err(BuildError::NonMaximalContext {
                        smaller: i,
                        larger: j,
                    });
                }
            }
        }
        for o in 0..num_observables {
            if !canon.iter().any(|c| c.binary_search(&o).is_ok()) {
                return Err(BuildError::UncoveredObservable(o));
            }
        }
        Ok(Self {
            observables: (0..num_observables).collect(),
            contexts: canon,
            outcomes,
        })
    }

    pub fn observables(&self) -> &[usize] {
        &self.observables
    }

    pub fn contexts(&self) -> &[Vec<usize>] {
        &self.contexts
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    pub fn is_empty(&self) -> bool {
        self.observables.is_empty()
    }

    /// What remains measurable after `m`: the observables co-measurable with
    /// `m`, and the contexts through `m` with `m` removed.
    pub fn induced(&self, m: usize) -> Result<Self, BuildError> {
        if self.observables.binary_search(&m).is_err() {
            return Err(BuildError::UnknownObservable(m));
        }
        let mut contexts: Vec<Vec<usize>> = Vec::new();
        let mut observables = BTreeSet::new();
        for c in &self.contexts {
            if c.binary_search(&m).is_ok() {
                let rest: Vec<usize> = c.iter().copied().filter(|&o| o != m).collect();
                observables.extend(rest.iter().copied());
                if !contexts.contains(&rest) {
                    contexts.push(rest);
                }
            }
        }
        Ok(Self {
            observables: observables.into_iter().collect(),
            contexts,
            outcomes: self.outcomes,
        })
    }

    /// Number of measurement protocols, saturating at `u128::MAX`.
    pub fn protocol_count(&self) -> u128 {
        fn go(x: &MarginalScenario, memo: &mut HashMap<MarginalScenario, u128>) -> u128 {
            if x.is_empty() {
                return 1;
            }
            if let Some(&c) = memo.get(x) {
                return c;
            }
            let mut total: u128 = 0;
            for &m in &x.observables {
                let child = go(&x.induced(m).expect("member observable"), memo);
                let mut pow: u128 = 1;
                for _ in 0..x.outcomes {
                    pow = pow.saturating_mul(child);
                }
                total = total.saturating_add(pow);
            }
            memo.insert(x.clone(), total);
            total
        }
        go(self, &mut HashMap::new())
    }

    /// All global events `(C, assignment)` in canonical vertex order:
    /// contexts in order, assignments lexicographic.
    fn events(&self) -> Vec<Event> {
        let mut out = Vec::new();
        for c in &self.contexts {
            let k = c.len();
            let mut digits = vec![0usize; k];
            loop {
                out.push(c.iter().copied().zip(digits.iter().copied()).collect());
                if !odometer(&mut digits, self.outcomes) {
                    break;
                }
            }
        }
        out
    }
}

/// Global event: `(observable, outcome)` pairs sorted by observable.
pub type Event = Vec<(usize, usize)>;

/// Advances a little-endian-last odometer; returns false on wrap-around.
fn odometer(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Recursive measurement protocol `T = (m, f)`: measure `m`, then follow
/// the branch selected by the outcome.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MeasurementProtocol {
    Empty,
    Measure {
        observable: usize,
        branches: Vec<MeasurementProtocol>,
    },
}

/// One leaf of a protocol: the measured `(observable, outcome)` sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProtocolOutcome {
    pub path: Vec<(usize, usize)>,
}

impl ProtocolOutcome {
    /// The measured context, ascending.
    pub fn context(&self) -> Vec<usize> {
        let mut c: Vec<usize> = self.path.iter().map(|&(o, _)| o).collect();
        c.sort_unstable();
        c
    }

    pub fn event(&self) -> Event {
        let mut e = self.path.clone();
        e.sort_unstable();
        e
    }
}

impl MeasurementProtocol {
    pub fn outcomes(&self) -> Vec<ProtocolOutcome> {
        match self {
            Self::Empty => vec![ProtocolOutcome { path: Vec::new() }],
            Self::Measure {
                observable,
                branches,
            } => branches
                .iter()
                .enumerate()
                .flat_map(|(a, child)| {
                    child.outcomes().into_iter().map(move |mut o| {
                        o.path.insert(0, (*observable, a));
                        o
                    })
                })
                .collect(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Self::Empty => 0,
            Self::Measure { branches, .. } => {
                1 + branches.iter().map(Self::depth).max().unwrap_or(0)
            }
        }
    }

    /// True when every branch makes the same choices.
    pub fn is_non_adaptive(&self) -> bool {
        match self {
            Self::Empty => true,
            Self::Measure { branches, .. } => {
                branches.windows(2).all(|w| w[0] == w[1]) && branches[0].is_non_adaptive()
            }
        }
    }
}

/// Every measurement protocol on `x`, root observable ascending and child
/// protocols in lexicographic order (outcome 0's choice most significant).
pub fn enumerate_protocols(
    x: &MarginalScenario,
    budget: usize,
) -> Result<Vec<MeasurementProtocol>, BuildError> {
    if x.is_empty() {
        return Ok(vec![MeasurementProtocol::Empty]);
    }
    let mut out = Vec::new();
    for &m in &x.observables {
        let children = enumerate_protocols(&x.induced(m)?, budget)?;
        let combos = (children.len() as u128).saturating_pow(x.outcomes as u32);
        if combos.saturating_add(out.len() as u128) > budget as u128 {
            return Err(BuildError::ProtocolBudget { limit: budget });
        }
        let mut idx = vec![0usize; x.outcomes];
        loop {
            out.push(MeasurementProtocol::Measure {
                observable: m,
                branches: idx.iter().map(|&i| children[i].clone()).collect(),
            });
            if !odometer(&mut idx, children.len()) {
                break;
            }
        }
    }
    Ok(out)
}

type EdgeSets = Rc<Vec<Vec<Event>>>;

/// Distinct event sets `e_T` over all protocols, each sorted. Protocols whose
/// branches yield equal event sets are merged level by level, which is sound
/// because `e_T` depends on the children only through their event sets.
fn edge_sets(
    x: &MarginalScenario,
    budget: usize,
    memo: &mut HashMap<MarginalScenario, EdgeSets>,
) -> Result<EdgeSets, BuildError> {
    if x.is_empty() {
        return Ok(Rc::new(vec![vec![Vec::new()]]));
    }
    if let Some(sets) = memo.get(x) {
        return Ok(sets.clone());
    }
    let mut distinct: BTreeSet<Vec<Event>> = BTreeSet::new();
    let mut candidates: u128 = 0;
    for &m in &x.observables {
        let children = edge_sets(&x.induced(m)?, budget, memo)?;
        candidates =
            candidates.saturating_add((children.len() as u128).saturating_pow(x.outcomes as u32));
        if candidates > budget as u128 {
            return Err(BuildError::ProtocolBudget { limit: budget });
        }
        let mut idx = vec![0usize; x.outcomes];
        loop {
            let mut edge: Vec<Event> = Vec::new();
            for (a, &ci) in idx.iter().enumerate() {
                for ev in &children[ci] {
                    let mut e = ev.clone();
                    let pos = e.partition_point(|&(o, _)| o < m);
                    e.insert(pos, (m, a));
                    edge.push(e);
                }
            }
            edge.sort_unstable();
            distinct.insert(edge);
            if !odometer(&mut idx, children.len()) {
                break;
            }
        }
    }
    let sets: EdgeSets = Rc::new(distinct.into_iter().collect());
    memo.insert(x.clone(), sets.clone());
    Ok(sets)
}

fn default_label(event: &[(usize, usize)]) -> String {
    event
        .iter()
        .map(|(o, a)| format!("m{o}={a}"))
        .collect::<Vec<_>>()
        .join(",")
}

/// Builds `H[X]` with labels produced by `label`.
pub fn marginal_to_hypergraph_with(
    x: &MarginalScenario,
    budget: usize,
    label: impl Fn(&[(usize, usize)]) -> String,
) -> Result<ContextualityScenario, BuildError> {
    let events = x.events();
    let index: HashMap<&Event, usize> = events.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let sets = edge_sets(x, budget, &mut HashMap::new())?;
    let edges: Vec<Vec<usize>> = sets
        .iter()
        .map(|set| {
            set.iter()
                .map(|ev| *index.get(ev).expect("protocol leaves are maximal contexts"))
                .collect()
        })
        .collect();
    let labels: Vec<String> = events.iter().map(|e| label(e)).collect();
    Ok(ContextualityScenario::new(labels, edges)?)
}

/// Hypergraph image `H[X]` of a marginal scenario: one vertex per context and
/// assignment, one edge per distinct protocol event set.
pub fn marginal_to_hypergraph(x: &MarginalScenario) -> Result<ContextualityScenario, BuildError> {
    marginal_to_hypergraph_with(x, DEFAULT_PROTOCOL_BUDGET, default_label)
}

/// Label of the Bell event `(a_1…a_n | x_1…x_n)`.
pub fn bell_label(outcomes: &[usize], settings: &[usize]) -> String {
    let wide = outcomes.iter().chain(settings).any(|&v| v >= 10);
    let join = |v: &[usize]| {
        v.iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(if wide { "," } else { "" })
    };
    format!("{}|{}", join(outcomes), join(settings))
}

/// Marginal scenario of `n` parties with `m` settings and `d` outcomes each.
/// Observable `party·m + setting`; contexts pick one setting per party.
pub fn bell_marginal(n: usize, m: usize, d: usize) -> Result<MarginalScenario, BuildError> {
    if n == 0 || m == 0 || d < 2 {
        return Err(BuildError::InvalidBellParameters { n, m, d });
    }
    let mut contexts = Vec::new();
    let mut x = vec![0usize; n];
    loop {
        contexts.push(x.iter().enumerate().map(|(i, &s)| i * m + s).collect());
        if !odometer(&mut x, m) {
            break;
        }
    }
    MarginalScenario::new(n * m, contexts, d)
}

/// Bell scenario `B(n, m, d)` including all correlated measurements.
pub fn bell_scenario(n: usize, m: usize, d: usize) -> Result<ContextualityScenario, BuildError> {
    bell_scenario_with_budget(n, m, d, DEFAULT_PROTOCOL_BUDGET)
}

pub fn bell_scenario_with_budget(
    n: usize,
    m: usize,
    d: usize,
    budget: usize,
) -> Result<ContextualityScenario, BuildError> {
    if n == 0 || m == 0 || d < 2 {
        return Err(BuildError::InvalidBellParameters { n, m, d });
    }
    let vertices = ((m * d) as u128).saturating_pow(n as u32);
    if vertices > MAX_BELL_VERTICES {
        return Err(BuildError::SizeGuard {
            vertices,
            limit: MAX_BELL_VERTICES,
        });
    }
    let x = bell_marginal(n, m, d)?;
    marginal_to_hypergraph_with(&x, budget, |event| {
        let settings: Vec<usize> = event.iter().map(|&(o, _)| o % m).collect();
        let outcomes: Vec<usize> = event.iter().map(|&(_, a)| a).collect();
        bell_label(&outcomes, &settings)
    })
}

/// Conditional distributions `P(a⃗ | x⃗)` of an `n`-party Bell experiment.
/// Rows are indexed by the settings tuple and columns by the outcome tuple,
/// both in mixed radix with party 1 most significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTable {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    #[serde(rename = "P")]
    pub p: Vec<Vec<f64>>,
}

/// Decodes a mixed-radix index into `len` digits, most significant first.
pub fn digits(mut index: usize, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = index % base;
        index /= base;
    }
    out
}

impl CorrelationTable {
    pub fn from_fn(n: usize, m: usize, d: usize, f: impl Fn(&[usize], &[usize]) -> f64) -> Self {
        let rows = m.pow(n as u32);
        let cols = d.pow(n as u32);
        let p = (0..rows)
            .map(|xi| {
                let x = digits(xi, m, n);
                (0..cols).map(|ai| f(&digits(ai, d, n), &x)).collect()
            })
            .collect();
        Self { n, m, d, p }
    }

    /// `P(a⃗ | x⃗)`.
    pub fn get(&self, outcomes: &[usize], settings: &[usize]) -> f64 {
        let xi = settings.iter().fold(0, |acc, &x| acc * self.m + x);
        let ai = outcomes.iter().fold(0, |acc, &a| acc * self.d + a);
        self.p[xi][ai]
    }

    fn check_shape(&self) -> Result<(), BuildError> {
        let rows = self.m.checked_pow(self.n as u32);
        let cols = self.d.checked_pow(self.n as u32);
        let (Some(rows), Some(cols)) = (rows, cols) else {
            return Err(BuildError::TableShape("table dimensions overflow".into()));
        };
        if self.p.len() != rows {
            return Err(BuildError::TableShape(format!(
                "expected {rows} setting rows, found {}",
                self.p.len()
            )));
        }
        if let Some((i, r)) = self.p.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(BuildError::TableShape(format!(
                "row {i} has {} outcome entries, expected {cols}",
                r.len()
            )));
        }
        for (setting, row) in self.p.iter().enumerate() {
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > NORMALIZATION_TOL
                || row
                    .iter()
                    .any(|&v| !(0.0..=1.0 + NORMALIZATION_TOL).contains(&v))
            {
                return Err(BuildError::TableNotNormalized { setting, sum });
            }
        }
        Ok(())
    }
}

/// Places `P(a⃗|x⃗)` on the Bell vertex labelled `(a⃗|x⃗)`. Edge normalization
/// on the correlated edges is exactly no-signalling, so signalling tables
/// are rejected here.
pub fn model_from_correlations(
    corr: &CorrelationTable,
    s: &ContextualityScenario,
) -> Result<ProbabilisticModel, BuildError> {
    corr.check_shape()?;
    let (n, m, d) = (corr.n, corr.m, corr.d);
    let expected = (m * d).pow(n as u32);
    if s.num_vertices() != expected {
        return Err(BuildError::TableShape(format!(
            "scenario has {} vertices, a ({n},{m},{d}) table needs {expected}",
            s.num_vertices()
        )));
    }
    let mut p = vec![f64::NAN; expected];
    for (xi, row) in corr.p.iter().enumerate() {
        let x = digits(xi, m, n);
        for (ai, &val) in row.iter().enumerate() {
            let a = digits(ai, d, n);
            let label = bell_label(&a, &x);
            let v = s
                .vertex_by_label(&label)
                .ok_or(BuildError::MissingLabel(label))?;
            p[v] = val;
        }
    }
    let model = ProbabilisticModel::new(p);
    let report = validate_model(s, &model, NORMALIZATION_TOL)?;
    if let Some((edge, _)) = report.worst_edge() {
        let sum = s.edge(edge).iter().map(|&v| model[v]).sum();
        return Err(BuildError::Signalling { edge, sum });
    }
    Ok(model)
}
