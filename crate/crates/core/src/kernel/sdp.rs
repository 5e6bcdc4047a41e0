//! Semidefinite feasibility by Dykstra-corrected alternating projections
//! between an affine set and the PSD cone.

use serde::{Deserialize, Serialize};

use super::{eigh, project_psd, AffineConstraintSet, KernelError, Matrix};

/// Solver thresholds. The decade between `eps_feas` and `eps_infeas` keeps
/// the two verdicts from flapping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdpConfig {
    /// Inter-set distance below which the instance is declared feasible.
    pub eps_feas: f64,
    /// Minimum plateaued distance for an infeasible verdict.
    pub eps_infeas: f64,
    /// Iterations over which the plateau is measured.
    pub plateau_window: usize,
    /// Relative change over the window that counts as a plateau.
    pub plateau_rel_change: f64,
    pub max_iterations: usize,
    /// Stride between structured log records.
    pub log_stride: usize,
}

impl Default for SdpConfig {
    fn default() -> Self {
        Self {
            eps_feas: 1e-8,
            eps_infeas: 1e-6,
            plateau_window: 100,
            plateau_rel_change: 1e-10,
            max_iterations: 50_000,
            log_stride: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SdpStatus {
    Feasible,
    Infeasible,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Frobenius distance from the PSD iterate to the affine set.
    pub distance: f64,
    /// Largest constraint violation of the PSD iterate.
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct SdpOutcome {
    pub status: SdpStatus,
    /// Affine-exact point whose distance to the PSD cone is below `eps_feas`.
    pub point: Option<Matrix>,
    /// Distance between the sets at termination.
    pub gap: f64,
    pub iterations: usize,
    /// Smallest eigenvalue of the final affine iterate.
    pub min_eigenvalue: f64,
    /// Distance after every iteration.
    pub distances: Vec<f64>,
    pub log: Vec<IterationRecord>,
}

/// Frobenius distance from a symmetric matrix with these eigenvalues to the
/// PSD cone.
pub fn negative_part_norm(values: &[f64]) -> f64 {
    values
        .iter()
        .filter(|&&l| l < 0.0)
        .fold(0.0, |acc, l| acc + l * l)
        .sqrt()
}

/// Decides whether the affine set meets the PSD cone.
pub fn sdp_feasibility(
    set: &AffineConstraintSet,
    cfg: &SdpConfig,
) -> Result<SdpOutcome, KernelError> {
    let n = set.n();
    let space = set.space();

    if set.is_fully_determined() {
        let x = set.project(&Matrix::zeros(n, n));
        let eig = eigh(&x)?;
        let gap = negative_part_norm(&eig.values);
        let feasible = gap < cfg.eps_feas;
        return Ok(SdpOutcome {
            status: if feasible {
                SdpStatus::Feasible
            } else {
                SdpStatus::Infeasible
            },
            point: feasible.then_some(x),
            gap,
            iterations: 0,
            min_eigenvalue: eig.min_value(),
            distances: vec![gap],
            log: Vec::new(),
        });
    }

    let mut x = set.project_vec(&vec![0.0; space.dim()]);
    let mut correction = vec![0.0; space.dim()];
    let mut distances = Vec::new();
    let mut log = Vec::new();

    for it in 1..=cfg.max_iterations {
        let z: Vec<f64> = x.iter().zip(&correction).map(|(a, b)| a + b).collect();
        let y_mat = project_psd(&space.devectorize(&z))?;
        let y = space.vectorize(&y_mat);
        for ((c, zi), yi) in correction.iter_mut().zip(&z).zip(&y) {
            *c = zi - yi;
        }
        let x_next = set.project_vec(&y);
        let dist = y
            .iter()
            .zip(&x_next)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        x = x_next;
        distances.push(dist);

        if cfg.log_stride > 0 && (it % cfg.log_stride == 0 || it == 1) {
            log.push(IterationRecord {
                iteration: it,
                distance: dist,
                residual: set.max_residual(&y_mat),
            });
        }

        if dist < cfg.eps_feas {
            let point = space.devectorize(&x);
            let min_eigenvalue = eigh(&point)?.min_value();
            return Ok(SdpOutcome {
                status: SdpStatus::Feasible,
                point: Some(point),
                gap: dist,
                iterations: it,
                min_eigenvalue,
                distances,
                log,
            });
        }

        if it > cfg.plateau_window && dist > cfg.eps_infeas {
            let earlier = distances[it - 1 - cfg.plateau_window];
            if (earlier - dist).abs() <= cfg.plateau_rel_change * dist {
                let min_eigenvalue = eigh(&space.devectorize(&x))?.min_value();
                return Ok(SdpOutcome {
                    status: SdpStatus::Infeasible,
                    point: None,
                    gap: dist,
                    iterations: it,
                    min_eigenvalue,
                    distances,
                    log,
                });
            }
        }
    }

    let gap = distances.last().copied().unwrap_or(0.0);
    let min_eigenvalue = eigh(&space.devectorize(&x))?.min_value();
    Ok(SdpOutcome {
        status: SdpStatus::Inconclusive,
        point: None,
        gap,
        iterations: cfg.max_iterations,
        min_eigenvalue,
        distances,
        log,
    })
}
