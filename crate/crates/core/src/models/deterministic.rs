use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::hypergraph::{ContextualityScenario, ProbabilisticModel};

/// Default cap on search nodes in [`enumerate_deterministic`].
pub const DEFAULT_SEARCH_BUDGET: usize = 1_000_000;

/// A 0/1 model: the selected vertices meet every edge exactly once.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DeterministicModel {
    pub selected: Vec<usize>,
}

impl DeterministicModel {
    pub fn contains(&self, v: usize) -> bool {
        self.selected.binary_search(&v).is_ok()
    }

    pub fn indicator(&self, num_vertices: usize) -> Vec<f64> {
        let mut w = vec![0.0; num_vertices];
        for &v in &self.selected {
            w[v] = 1.0;
        }
        w
    }

    pub fn to_model(&self, num_vertices: usize) -> ProbabilisticModel {
        ProbabilisticModel::new(self.indicator(num_vertices))
    }
}

struct Search<'a> {
    s: &'a ContextualityScenario,
    covered: Vec<bool>,
    blocked: Vec<u32>,
    chosen: Vec<usize>,
    found: Vec<DeterministicModel>,
    nodes: usize,
    budget: usize,
}

impl Search<'_> {
    fn available(&self, e: usize) -> impl Iterator<Item = usize> + '_ {
        self.s
            .edge(e)
            .iter()
            .copied()
            .filter(|&v| self.blocked[v] == 0)
    }

    fn run(&mut self) -> Result<(), ModelError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(ModelError::SearchBudget { limit: self.budget });
        }
        // Branch on the uncovered edge with the fewest selectable vertices.
        let mut best: Option<(usize, usize)> = None;
        for e in 0..self.s.num_edges() {
            if self.covered[e] {
                continue;
            }
            let count = self.available(e).count();
            if best.is_none_or(|(_, c)| count < c) {
                best = Some((e, count));
                if count == 0 {
                    break;
                }
            }
        }
        let Some((edge, count)) = best else {
            let mut selected = self.chosen.clone();
            selected.sort_unstable();
            self.found.push(DeterministicModel { selected });
            return Ok(());
        };
        if count == 0 {
            return Ok(());
        }
        let candidates: Vec<usize> = self.available(edge).collect();
        for v in candidates {
            let newly: Vec<usize> = self
                .s
                .edges_of(v)
                .iter()
                .copied()
                .filter(|&e| !self.covered[e])
                .collect();
            for &e in &newly {
                self.covered[e] = true;
                for &u in self.s.edge(e) {
                    self.blocked[u] += 1;
                }
            }
            self.chosen.push(v);
            self.run()?;
            self.chosen.pop();
            for &e in &newly {
                self.covered[e] = false;
                for &u in self.s.edge(e) {
                    self.blocked[u] -= 1;
                }
            }
        }
        Ok(())
    }
}

/// All deterministic models of `s`, i.e. exact covers of its edges by
/// vertices, sorted lexicographically.
pub fn enumerate_deterministic(
    s: &ContextualityScenario,
    budget: usize,
) -> Result<Vec<DeterministicModel>, ModelError> {
    let mut search = Search {
        s,
        covered: vec![false; s.num_edges()],
        blocked: vec![0; s.num_vertices()],
        chosen: Vec::new(),
        found: Vec::new(),
        nodes: 0,
        budget,
    };
    search.run()?;
    let mut found = search.found;
    found.sort();
    Ok(found)
}
