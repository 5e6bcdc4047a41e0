use super::ModelError;
use crate::builders::{bell_label, bell_scenario, CorrelationTable};
use crate::hypergraph::{ContextualityScenario, ProbabilisticModel};

/// `P(ab|xy) = 1/2` iff `a ⊕ b = x·y`.
pub fn pr_box() -> CorrelationTable {
    CorrelationTable::from_fn(2, 2, 2, |a, x| {
        if (a[0] ^ a[1]) == (x[0] & x[1]) {
            0.5
        } else {
            0.0
        }
    })
}

/// Uniform outcomes for every setting.
pub fn uniform_noise(n: usize, m: usize, d: usize) -> CorrelationTable {
    let cols = d.pow(n as u32) as f64;
    CorrelationTable::from_fn(n, m, d, |_, _| 1.0 / cols)
}

/// `λ·PR + (1 − λ)·uniform`, CHSH value `4λ`.
pub fn isotropic(lambda: f64) -> CorrelationTable {
    let pr = pr_box();
    CorrelationTable::from_fn(2, 2, 2, |a, x| {
        lambda * pr.get(a, x) + (1.0 - lambda) * 0.25
    })
}

/// `S = Σ_{xy} (−1)^{xy} Σ_{ab} (−1)^{a+b} p(ab|xy)` on `B(2,2,2)`.
pub fn chsh_value(s: &ContextualityScenario, p: &ProbabilisticModel) -> Result<f64, ModelError> {
    let reference = bell_scenario(2, 2, 2).expect("B(2,2,2) builds");
    if *s != reference {
        return Err(ModelError::NotChshScenario);
    }
    if p.len() != s.num_vertices() {
        return Err(ModelError::Hypergraph(
            crate::hypergraph::HypergraphError::DimensionMismatch {
                expected: s.num_vertices(),
                found: p.len(),
            },
        ));
    }
    let mut total = 0.0;
    for x in 0..2 {
        for y in 0..2 {
            let setting_sign = if x & y == 1 { -1.0 } else { 1.0 };
            for a in 0..2 {
                for b in 0..2 {
                    let v = s
                        .vertex_by_label(&bell_label(&[a, b], &[x, y]))
                        .expect("reference labels");
                    let sign = if (a + b) % 2 == 0 { 1.0 } else { -1.0 };
                    total += setting_sign * sign * p[v];
                }
            }
        }
    }
    Ok(total)
}
