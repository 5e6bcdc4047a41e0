//! Critical visibility of the isotropic family `λ·PR + (1 − λ)·noise` for
//! membership in Q1 or MNC, by bisection on `λ`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::builders::{bell_scenario, model_from_correlations, BuildError};
use crate::certificates::{mnc_check_with, q1_check_with, CertificateError, CheckConfig};
use crate::hypergraph::ContextualityScenario;
use crate::kernel::SdpStatus;
use crate::models::isotropic;

/// Smallest bracket width accepted.
pub const MIN_BISECTION_TOL: f64 = 0.002;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BisectionError {
    #[error("the isotropic family is only defined on B(2,2,2)")]
    NotChshScenario,
    #[error("invalid interval [{lo}, {hi}]: need 0 <= lo < hi <= 1")]
    Interval { lo: f64, hi: f64 },
    #[error("tolerance {tol} below the minimum {MIN_BISECTION_TOL}")]
    Tolerance { tol: f64 },
    #[error("solver inconclusive at both endpoints")]
    InconclusiveEndpoints,
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Certificate(#[from] CertificateError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MembershipSet {
    Q1,
    Mnc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BisectionOutcome {
    /// Feasible at `lower`, infeasible at `upper`.
    Crossing,
    FeasibleThroughout,
    InfeasibleThroughout,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BisectionStep {
    pub lambda: f64,
    pub status: SdpStatus,
    pub gap: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BisectionResult {
    pub set: MembershipSet,
    pub outcome: BisectionOutcome,
    pub lower: f64,
    pub upper: f64,
    pub steps: Vec<BisectionStep>,
    pub warnings: Vec<String>,
}

impl BisectionResult {
    /// CHSH value `4λ` at the bracket ends.
    pub fn chsh_bracket(&self) -> (f64, f64) {
        (4.0 * self.lower, 4.0 * self.upper)
    }
}

fn probe(
    s: &ContextualityScenario,
    set: MembershipSet,
    lambda: f64,
    cfg: &CheckConfig,
) -> Result<BisectionStep, BisectionError> {
    let p = model_from_correlations(&isotropic(lambda), s)?;
    let (status, gap, iterations) = match set {
        MembershipSet::Q1 => {
            let v = q1_check_with(s, &p, cfg)?;
            (v.status, v.gap, v.iterations)
        }
        MembershipSet::Mnc => {
            let v = mnc_check_with(s, &p, cfg)?;
            (v.status, v.gap, v.iterations)
        }
    };
    Ok(BisectionStep {
        lambda,
        status,
        gap,
        iterations,
    })
}

/// Brackets the largest feasible `λ` in `[lo, hi]` to width `tol`.
/// Inconclusive probes count as feasible, so the bracket never understates
/// the set; each one is recorded as a warning.
pub fn bisect_isotropic(
    s: &ContextualityScenario,
    set: MembershipSet,
    lo: f64,
    hi: f64,
    tol: f64,
    cfg: &CheckConfig,
) -> Result<BisectionResult, BisectionError> {
    if *s != bell_scenario(2, 2, 2)? {
        return Err(BisectionError::NotChshScenario);
    }
    if !(0.0 <= lo && lo < hi && hi <= 1.0) {
        return Err(BisectionError::Interval { lo, hi });
    }
    if !(tol >= MIN_BISECTION_TOL) {
        return Err(BisectionError::Tolerance { tol });
    }

    let mut steps = Vec::new();
    let mut warnings = Vec::new();
    let mut feasible = |step: BisectionStep, warnings: &mut Vec<String>| {
        let ok = step.status != SdpStatus::Infeasible;
        if step.status == SdpStatus::Inconclusive {
            warnings.push(format!(
                "inconclusive at lambda = {}, assumed feasible",
                step.lambda
            ));
        }
        steps.push(step);
        ok
    };

    let at_lo = probe(s, set, lo, cfg)?;
    let at_hi = probe(s, set, hi, cfg)?;
    if at_lo.status == SdpStatus::Inconclusive && at_hi.status == SdpStatus::Inconclusive {
        return Err(BisectionError::InconclusiveEndpoints);
    }
    let lo_ok = feasible(at_lo, &mut warnings);
    let hi_ok = feasible(at_hi, &mut warnings);
    let outcome = if hi_ok {
        Some(BisectionOutcome::FeasibleThroughout)
    } else if !lo_ok {
        Some(BisectionOutcome::InfeasibleThroughout)
    } else {
        None
    };
    if let Some(outcome) = outcome {
        return Ok(BisectionResult {
            set,
            outcome,
            lower: lo,
            upper: hi,
            steps,
            warnings,
        });
    }

    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if feasible(probe(s, set, mid, cfg)?, &mut warnings) {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(BisectionResult {
        set,
        outcome: BisectionOutcome::Crossing,
        lower: a,
        upper: b,
        steps,
        warnings,
    })
}
