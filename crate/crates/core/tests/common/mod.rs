#![allow(dead_code)]

use macronc_core::hypergraph::{validate_model, ContextualityScenario, ProbabilisticModel};
use macronc_core::kernel::{lp_phase1, Bounds, LpConfig, LpOutcome, Matrix};
use macronc_core::models::{enumerate_deterministic, DEFAULT_SEARCH_BUDGET};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Gamma};

/// Random hypergraph on 2..=max_vertices vertices with every vertex covered.
pub fn random_scenario<R: Rng>(rng: &mut R, max_vertices: usize) -> ContextualityScenario {
    let n = rng.random_range(2..=max_vertices);
    let num_edges = rng.random_range(1..=n.min(6));
    let mut edges: Vec<Vec<usize>> = (0..num_edges)
        .map(|_| {
            let size = rng.random_range(2..=n.min(4));
            let mut vs: Vec<usize> = (0..n).collect();
            vs.shuffle(rng);
            vs.truncate(size);
            vs
        })
        .collect();
    for v in 0..n {
        if !edges.iter().any(|e| e.contains(&v)) {
            let e = rng.random_range(0..edges.len());
            edges[e].push(v);
        }
    }
    let labels: Vec<String> = (0..n).map(|v| format!("v{v}")).collect();
    ContextualityScenario::new(labels, edges).expect("generated scenario is valid")
}

pub fn dirichlet<R: Rng>(rng: &mut R, k: usize, alpha: f64) -> Vec<f64> {
    let g = Gamma::new(alpha, 1.0).unwrap();
    let mut w: Vec<f64> = (0..k).map(|_| g.sample(rng)).collect();
    let total: f64 = w.iter().sum();
    for x in &mut w {
        *x /= total;
    }
    w
}

/// A vertex of the polytope of edge-normalized models, reached by a phase-1
/// solve on randomly permuted columns.
pub fn polytope_vertex<R: Rng>(rng: &mut R, s: &ContextualityScenario) -> Option<Vec<f64>> {
    let n = s.num_vertices();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let a: Vec<Vec<f64>> = s
        .edges()
        .iter()
        .map(|e| {
            perm.iter()
                .map(|&v| if e.contains(&v) { 1.0 } else { 0.0 })
                .collect()
        })
        .collect();
    let b = vec![1.0; s.num_edges()];
    match lp_phase1(&a, &b, &vec![Bounds::NONNEGATIVE; n], &LpConfig::default()).ok()? {
        LpOutcome::Feasible { x, .. } => {
            let mut p = vec![0.0; n];
            for (i, &v) in perm.iter().enumerate() {
                p[v] = x[i].max(0.0);
            }
            Some(p)
        }
        _ => None,
    }
}

/// Random mixture of polytope vertices: may be classical, in Q1, or neither.
pub fn random_model<R: Rng>(rng: &mut R, s: &ContextualityScenario) -> Option<ProbabilisticModel> {
    let k = rng.random_range(1..=4);
    let verts: Vec<Vec<f64>> = (0..k)
        .map(|_| polytope_vertex(rng, s))
        .collect::<Option<_>>()?;
    let w = dirichlet(rng, k, 1.0);
    let mut p = vec![0.0; s.num_vertices()];
    for (wi, v) in w.iter().zip(&verts) {
        for (pi, vi) in p.iter_mut().zip(v) {
            *pi += wi * vi;
        }
    }
    let p = ProbabilisticModel::new(p);
    validate_model(s, &p, 1e-9).ok()?.accepted.then_some(p)
}

/// Scenario together with a model drawn by `random_model`, resampling until
/// the scenario admits one.
pub fn random_scenario_and_model<R: Rng>(
    rng: &mut R,
    max_vertices: usize,
) -> (ContextualityScenario, ProbabilisticModel) {
    loop {
        let s = random_scenario(rng, max_vertices);
        if let Some(p) = random_model(rng, &s) {
            return (s, p);
        }
    }
}

/// Scenario with at least one deterministic model and a random convex
/// mixture of its deterministic models.
pub fn random_classical<R: Rng>(
    rng: &mut R,
    max_vertices: usize,
) -> (ContextualityScenario, ProbabilisticModel) {
    loop {
        let s = random_scenario(rng, max_vertices);
        let det = enumerate_deterministic(&s, DEFAULT_SEARCH_BUDGET).unwrap();
        if det.is_empty() {
            continue;
        }
        let w = dirichlet(rng, det.len(), 0.7);
        let mut p = vec![0.0; s.num_vertices()];
        for (wi, d) in w.iter().zip(&det) {
            for &v in &d.selected {
                p[v] += wi;
            }
        }
        return (s, ProbabilisticModel::new(p));
    }
}

pub fn random_symmetric<R: Rng>(rng: &mut R, n: usize) -> Matrix {
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let x = rng.random_range(-1.0..1.0);
            a[(i, j)] = x;
            a[(j, i)] = x;
        }
    }
    a
}

/// `C Cᵀ` for a random `n × r` matrix `C`.
pub fn random_psd<R: Rng>(rng: &mut R, n: usize, r: usize) -> Matrix {
    let mut c = Matrix::zeros(n, r);
    for i in 0..n {
        for j in 0..r {
            c[(i, j)] = rng.random_range(-1.0..1.0);
        }
    }
    c.matmul(&c.transpose())
}
