//! Q1 and MNC certificates: solver-independent verification, the
//! Schur-complement bridge between them, and membership checks posed as
//! semidefinite feasibility problems.
//!
//! A Q1 certificate `M` is indexed by `0` (the constant "1") followed by the
//! vertices shifted by one. An MNC certificate `γ` is indexed by vertices and
//! carries the model it certifies.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::{
    validate_model, ContextualityScenario, HypergraphError, ProbabilisticModel,
    LOOSE_NORMALIZATION_TOL,
};
use crate::kernel::{
    eigh, negative_part_norm, sdp_feasibility, AffineConstraintSet, IterationRecord, KernelError,
    LinearConstraint, Matrix, SdpConfig, SdpStatus, CONSISTENCY_TOL,
};

/// Verification tolerance for solver-produced certificates.
pub const SOLVER_VERIFY_TOL: f64 = 1e-7;
/// Verification tolerance for certificates built in closed form.
pub const EXACT_VERIFY_TOL: f64 = 1e-12;
/// Probabilities this close to 0 or 1 are treated as deterministic.
pub const DEGENERATE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertificateError {
    #[error("{kind} certificate fails verification: {summary}")]
    Verification {
        kind: CertificateKind,
        summary: String,
    },
    #[error("model rejected: max normalization residual {max_residual:e}")]
    InvalidModel { max_residual: f64 },
    #[error("malformed certificate file: {0}")]
    File(String),
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateKind {
    Q1,
    Mnc,
}

impl std::fmt::Display for CertificateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Q1 => "q1",
            Self::Mnc => "mnc",
        })
    }
}

/// Bordered moment matrix of size `|V| + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Q1Certificate {
    m: Matrix,
}

impl Q1Certificate {
    pub fn new(m: Matrix) -> Self {
        Self { m }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn into_matrix(self) -> Matrix {
        self.m
    }

    pub fn num_vertices(&self) -> usize {
        self.m.rows().saturating_sub(1)
    }

    /// The border row `M[0][1..]`, i.e. the model the certificate claims.
    pub fn model(&self) -> ProbabilisticModel {
        ProbabilisticModel::new(self.m.row(0).get(1..).unwrap_or_default().to_vec())
    }

    /// `γ_uv = M_uv − M_0u M_0v`, without verification.
    pub fn to_mnc_unchecked(&self) -> MncCertificate {
        let n = self.num_vertices();
        let mut g = Matrix::zeros(n, n);
        for u in 0..n {
            for v in 0..n {
                g[(u, v)] = self.m[(u + 1, v + 1)] - self.m[(0, u + 1)] * self.m[(0, v + 1)];
            }
        }
        MncCertificate::new(g, self.model())
    }
}

/// Covariance matrix of macroscopic intensities, together with its model.
#[derive(Debug, Clone, PartialEq)]
pub struct MncCertificate {
    gamma: Matrix,
    model: ProbabilisticModel,
}

impl MncCertificate {
    pub fn new(gamma: Matrix, model: ProbabilisticModel) -> Self {
        Self { gamma, model }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.gamma
    }

    pub fn model(&self) -> &ProbabilisticModel {
        &self.model
    }

    pub fn num_vertices(&self) -> usize {
        self.gamma.rows()
    }

    /// Borders `γ + ppᵀ` with `(1, p)`, without verification.
    pub fn to_q1_unchecked(&self) -> Q1Certificate {
        let n = self.num_vertices();
        let p = &self.model.p;
        let mut m = Matrix::zeros(n + 1, n + 1);
        m[(0, 0)] = 1.0;
        for v in 0..n {
            m[(0, v + 1)] = p[v];
            m[(v + 1, 0)] = p[v];
            for u in 0..n {
                m[(u + 1, v + 1)] = self.gamma[(u, v)] + p[u] * p[v];
            }
        }
        Q1Certificate::new(m)
    }
}

/// `diag(p) − ppᵀ`, the covariance of one categorical trial with outcome
/// probabilities `p`.
pub fn multinomial_covariance(p: &[f64]) -> Matrix {
    let n = p.len();
    let mut g = Matrix::zeros(n, n);
    for u in 0..n {
        for v in 0..n {
            g[(u, v)] = if u == v { p[u] } else { 0.0 } - p[u] * p[v];
        }
    }
    g
}

/// On-disk certificate. `size` is the matrix dimension; `matrix` is row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub kind: CertificateKind,
    pub size: usize,
    pub matrix: Vec<f64>,
    pub model: Vec<f64>,
}

impl CertificateFile {
    pub fn from_q1(c: &Q1Certificate) -> Self {
        Self {
            kind: CertificateKind::Q1,
            size: c.m.rows(),
            matrix: c.m.as_slice().to_vec(),
            model: c.model().p,
        }
    }

    pub fn from_mnc(c: &MncCertificate) -> Self {
        Self {
            kind: CertificateKind::Mnc,
            size: c.gamma.rows(),
            matrix: c.gamma.as_slice().to_vec(),
            model: c.model.p.clone(),
        }
    }

    fn square(&self) -> Result<Matrix, CertificateError> {
        Matrix::from_row_major(self.size, self.size, self.matrix.clone()).ok_or_else(|| {
            CertificateError::File(format!(
                "size {} needs {} entries, found {}",
                self.size,
                self.size * self.size,
                self.matrix.len()
            ))
        })
    }

    pub fn to_q1(&self) -> Result<Q1Certificate, CertificateError> {
        if self.kind != CertificateKind::Q1 {
            return Err(CertificateError::File("expected a q1 certificate".into()));
        }
        let c = Q1Certificate::new(self.square()?);
        if c.model().p != self.model {
            return Err(CertificateError::File(
                "model differs from the matrix border".into(),
            ));
        }
        Ok(c)
    }

    pub fn to_mnc(&self) -> Result<MncCertificate, CertificateError> {
        if self.kind != CertificateKind::Mnc {
            return Err(CertificateError::File("expected an mnc certificate".into()));
        }
        if self.model.len() != self.size {
            return Err(CertificateError::File(format!(
                "model has {} entries for size {}",
                self.model.len(),
                self.size
            )));
        }
        Ok(MncCertificate::new(
            self.square()?,
            ProbabilisticModel::new(self.model.clone()),
        ))
    }
}

impl Serialize for Q1Certificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CertificateFile::from_q1(self).serialize(s)
    }
}

impl Serialize for MncCertificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CertificateFile::from_mnc(self).serialize(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Shape,
    Asymmetry,
    /// `M[0][0] = 1`, `M[0][v] = p(v)`.
    Border,
    Diagonal,
    /// Entry fixed on an exclusive pair: zero in Q1 form, `−p(u)p(v)` in MNC form.
    Exclusive,
    RowSum,
    NotPsd,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub row: usize,
    pub col: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub kind: CertificateKind,
    pub tolerance: f64,
    pub valid: bool,
    /// `None` when the shape check already failed.
    pub min_eigenvalue: Option<f64>,
    /// Largest affine-condition residual.
    pub max_residual: f64,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    pub fn summary(&self) -> String {
        match self
            .violations
            .iter()
            .max_by(|a, b| a.residual.total_cmp(&b.residual))
        {
            None => "ok".into(),
            Some(w) => format!(
                "{} violations, worst {:?} at ({}, {}) residual {:e}",
                self.violations.len(),
                w.kind,
                w.row,
                w.col,
                w.residual
            ),
        }
    }
}

struct Checker {
    kind: CertificateKind,
    tol: f64,
    max_residual: f64,
    violations: Vec<Violation>,
}

impl Checker {
    fn new(kind: CertificateKind, tol: f64) -> Self {
        Self {
            kind,
            tol,
            max_residual: 0.0,
            violations: Vec::new(),
        }
    }

    fn expect(&mut self, kind: ViolationKind, row: usize, col: usize, got: f64, want: f64) {
        let residual = (got - want).abs();
        if !residual.is_finite() || residual > self.tol {
            self.violations.push(Violation {
                kind,
                row,
                col,
                residual,
            });
        }
        if residual.is_finite() {
            self.max_residual = self.max_residual.max(residual);
        } else {
            self.max_residual = f64::INFINITY;
        }
    }

    fn shape_failure(mut self, expected: usize, found: usize) -> VerificationReport {
        self.violations.push(Violation {
            kind: ViolationKind::Shape,
            row: expected,
            col: found,
            residual: f64::INFINITY,
        });
        self.finish(None)
    }

    fn psd(mut self, a: &Matrix) -> VerificationReport {
        let asym = a.asymmetry();
        if asym > self.tol {
            self.violations.push(Violation {
                kind: ViolationKind::Asymmetry,
                row: 0,
                col: 0,
                residual: asym,
            });
        }
        let mut sym = a.clone();
        sym.symmetrize();
        let min = match eigh(&sym) {
            Ok(e) => e.min_value(),
            Err(_) => f64::NAN,
        };
        let min = if a.rows() == 0 { 0.0 } else { min };
        if !(min >= -self.tol) {
            self.violations.push(Violation {
                kind: ViolationKind::NotPsd,
                row: 0,
                col: 0,
                residual: -min,
            });
        }
        self.finish(Some(min))
    }

    fn finish(self, min_eigenvalue: Option<f64>) -> VerificationReport {
        VerificationReport {
            kind: self.kind,
            tolerance: self.tol,
            valid: self.violations.is_empty(),
            min_eigenvalue,
            max_residual: self.max_residual,
            violations: self.violations,
        }
    }
}

/// Checks every affine condition of the bordered form entrywise, then the
/// smallest eigenvalue against `−tol`.
pub fn verify_q1_certificate(
    c: &Q1Certificate,
    s: &ContextualityScenario,
    p: &ProbabilisticModel,
    tol: f64,
) -> VerificationReport {
    let mut chk = Checker::new(CertificateKind::Q1, tol);
    let n = s.num_vertices();
    let m = &c.m;
    if p.len() != n {
        return chk.shape_failure(n, p.len());
    }
    if m.rows() != n + 1 || !m.is_square() {
        return chk.shape_failure(n + 1, m.rows());
    }
    chk.expect(ViolationKind::Border, 0, 0, m[(0, 0)], 1.0);
    for v in 0..n {
        chk.expect(ViolationKind::Border, 0, v + 1, m[(0, v + 1)], p[v]);
        chk.expect(
            ViolationKind::Diagonal,
            v + 1,
            v + 1,
            m[(v + 1, v + 1)],
            p[v],
        );
    }
    for (u, v) in s.exclusive_pairs() {
        chk.expect(
            ViolationKind::Exclusive,
            u + 1,
            v + 1,
            m[(u + 1, v + 1)],
            0.0,
        );
    }
    for (e, edge) in s.edges().iter().enumerate() {
        for j in 0..=n {
            let sum: f64 = edge.iter().map(|&u| m[(u + 1, j)]).sum();
            chk.expect(ViolationKind::RowSum, e, j, sum, m[(0, j)]);
        }
    }
    chk.psd(m)
}

/// Checks the covariance form: fixed diagonal, fixed exclusive entries,
/// zero row sums over every edge, positivity.
pub fn verify_mnc_certificate(
    c: &MncCertificate,
    s: &ContextualityScenario,
    p: &ProbabilisticModel,
    tol: f64,
) -> VerificationReport {
    let mut chk = Checker::new(CertificateKind::Mnc, tol);
    let n = s.num_vertices();
    let g = &c.gamma;
    if p.len() != n {
        return chk.shape_failure(n, p.len());
    }
    if g.rows() != n || !g.is_square() {
        return chk.shape_failure(n, g.rows());
    }
    for v in 0..n {
        chk.expect(ViolationKind::Diagonal, v, v, g[(v, v)], p[v] - p[v] * p[v]);
    }
    for (u, v) in s.exclusive_pairs() {
        chk.expect(ViolationKind::Exclusive, u, v, g[(u, v)], -p[u] * p[v]);
    }
    for (e, edge) in s.edges().iter().enumerate() {
        for v in 0..n {
            let sum: f64 = edge.iter().map(|&u| g[(u, v)]).sum();
            chk.expect(ViolationKind::RowSum, e, v, sum, 0.0);
        }
    }
    chk.psd(g)
}

/// Verified `M ↦ γ`. The model is read off the border of `M`.
pub fn q1_to_mnc(
    c: &Q1Certificate,
    s: &ContextualityScenario,
    tol: f64,
) -> Result<MncCertificate, CertificateError> {
    let report = verify_q1_certificate(c, s, &c.model(), tol);
    if !report.valid {
        return Err(CertificateError::Verification {
            kind: CertificateKind::Q1,
            summary: report.summary(),
        });
    }
    Ok(c.to_mnc_unchecked())
}

/// Verified `γ ↦ M`.
pub fn mnc_to_q1(
    c: &MncCertificate,
    s: &ContextualityScenario,
    tol: f64,
) -> Result<Q1Certificate, CertificateError> {
    let report = verify_mnc_certificate(c, s, &c.model, tol);
    if !report.valid {
        return Err(CertificateError::Verification {
            kind: CertificateKind::Mnc,
            summary: report.summary(),
        });
    }
    Ok(c.to_q1_unchecked())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub sdp: SdpConfig,
    pub verify_tol: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            sdp: SdpConfig::default(),
            verify_tol: SOLVER_VERIFY_TOL,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityVerdict<C> {
    pub status: SdpStatus,
    /// Present only when feasible, and then always re-verified.
    pub certificate: Option<C>,
    /// Distance between the affine set and the PSD cone at termination.
    pub gap: f64,
    /// Violation of the affine conditions themselves when they admit no
    /// solution at all; zero otherwise.
    pub structural_residual: f64,
    pub iterations: usize,
    pub min_eigenvalue: Option<f64>,
    /// Full spectrum when the affine conditions fix every entry.
    pub spectrum: Option<Vec<f64>>,
    pub verification: Option<VerificationReport>,
    pub log: Vec<IterationRecord>,
}

impl<C> FeasibilityVerdict<C> {
    pub fn is_feasible(&self) -> bool {
        self.status == SdpStatus::Feasible
    }
}

struct Reduced {
    status: SdpStatus,
    point: Option<Matrix>,
    gap: f64,
    structural_residual: f64,
    iterations: usize,
    min_eigenvalue: Option<f64>,
    spectrum: Option<Vec<f64>>,
    log: Vec<IterationRecord>,
}

/// Solves `{X ⪰ 0 : fixed entries, linear equations}` on a `k × k` matrix.
/// When the fixed entries already pin down the whole matrix the verdict comes
/// from one eigendecomposition, and the equations only contribute a
/// structural residual.
fn solve_reduced(
    k: usize,
    fixed: &[(usize, usize, f64)],
    equations: Vec<LinearConstraint>,
    cfg: &SdpConfig,
) -> Result<Reduced, KernelError> {
    let mut pinned = BTreeSet::new();
    let mut x = Matrix::zeros(k, k);
    for &(i, j, v) in fixed {
        let (a, b) = (i.min(j), i.max(j));
        pinned.insert((a, b));
        x[(a, b)] = v;
        x[(b, a)] = v;
    }
    if pinned.len() == k * (k + 1) / 2 {
        let structural_residual = equations
            .iter()
            .map(|c| (c.evaluate(&x) - c.rhs).abs())
            .fold(0.0, f64::max);
        let eig = eigh(&x)?;
        let gap = negative_part_norm(&eig.values);
        let feasible = gap < cfg.eps_feas && structural_residual <= CONSISTENCY_TOL;
        return Ok(Reduced {
            status: if feasible {
                SdpStatus::Feasible
            } else {
                SdpStatus::Infeasible
            },
            point: feasible.then_some(x),
            gap,
            structural_residual,
            iterations: 0,
            min_eigenvalue: Some(eig.min_value()),
            spectrum: Some(eig.values),
            log: Vec::new(),
        });
    }

    let mut constraints: Vec<LinearConstraint> = fixed
        .iter()
        .map(|&(i, j, v)| LinearConstraint::entry(i, j, v))
        .collect();
    constraints.extend(equations);
    let set = match AffineConstraintSet::new(k, constraints) {
        Ok(set) => set,
        Err(KernelError::Inconsistent { residual, .. }) => {
            return Ok(Reduced {
                status: SdpStatus::Infeasible,
                point: None,
                gap: residual,
                structural_residual: residual,
                iterations: 0,
                min_eigenvalue: None,
                spectrum: None,
                log: Vec::new(),
            })
        }
        Err(e) => return Err(e),
    };
    let out = sdp_feasibility(&set, cfg)?;
    Ok(Reduced {
        status: out.status,
        point: out.point,
        gap: out.gap,
        structural_residual: 0.0,
        iterations: out.iterations,
        min_eigenvalue: Some(out.min_eigenvalue),
        spectrum: None,
        log: out.log,
    })
}

fn checked_model(
    s: &ContextualityScenario,
    p: &ProbabilisticModel,
) -> Result<(), CertificateError> {
    let report = validate_model(s, p, LOOSE_NORMALIZATION_TOL)?;
    if !report.accepted {
        return Err(CertificateError::InvalidModel {
            max_residual: report.max_residual,
        });
    }
    Ok(())
}

fn finish<C>(
    r: Reduced,
    build: impl FnOnce(Matrix) -> C,
    verify: impl FnOnce(&C) -> VerificationReport,
) -> FeasibilityVerdict<C> {
    let mut v = FeasibilityVerdict {
        status: r.status,
        certificate: None,
        gap: r.gap,
        structural_residual: r.structural_residual,
        iterations: r.iterations,
        min_eigenvalue: r.min_eigenvalue,
        spectrum: r.spectrum,
        verification: None,
        log: r.log,
    };
    if let (SdpStatus::Feasible, Some(point)) = (r.status, r.point) {
        let cert = build(point);
        let report = verify(&cert);
        if report.valid {
            v.certificate = Some(cert);
        } else {
            // Solver claims are never trusted on their own.
            v.status = SdpStatus::Inconclusive;
        }
        v.verification = Some(report);
    }
    v
}

pub fn q1_check(
    s: &ContextualityScenario,
    p: &ProbabilisticModel,
) -> Result<FeasibilityVerdict<Q1Certificate>, CertificateError> {
    q1_check_with(s, p, &CheckConfig::default())
}

/// Q1 membership solved directly over bordered matrices. Vertices with
/// probability zero have zero rows in any certificate and are dropped first.
pub fn q1_check_with(
    s: &ContextualityScenario,
    p: &ProbabilisticModel,
    cfg: &CheckConfig,
) -> Result<FeasibilityVerdict<Q1Certificate>, CertificateError> {
    checked_model(s, p)?;
    let n = s.num_vertices();
    let kept: Vec<usize> = (0..n).filter(|&v| p[v] > DEGENERATE_TOL).collect();
    let mut pos = vec![None; n];
    for (i, &v) in kept.iter().enumerate() {
        pos[v] = Some(i + 1);
    }
    let k = kept.len() + 1;

    let mut fixed = vec![(0, 0, 1.0)];
    for (i, &v) in kept.iter().enumerate() {
        fixed.push((0, i + 1, p[v]));
        fixed.push((i + 1, i + 1, p[v]));
    }
    for (u, v) in s.exclusive_pairs() {
        if let (Some(a), Some(b)) = (pos[u], pos[v]) {
            fixed.push((a, b, 0.0));
        }
    }
    let mut equations = Vec::new();
    for edge in s.edges() {
        let rows: Vec<usize> = edge.iter().filter_map(|&u| pos[u]).collect();
        for j in 0..k {
            let mut terms: Vec<(usize, usize, f64)> = rows.iter().map(|&r| (r, j, 1.0)).collect();
            terms.push((0, j, -1.0));
            equations.push(LinearConstraint { terms, rhs: 0.0 });
        }
    }

    let r = solve_reduced(k, &fixed, equations, &cfg.sdp)?;
    Ok(finish(
        r,
        |x| {
            let mut m = Matrix::zeros(n + 1, n + 1);
            let full = |i: usize| if i == 0 { 0 } else { kept[i - 1] + 1 };
            for i in 0..k {
                for j in 0..k {
                    m[(full(i), full(j))] = x[(i, j)];
                }
            }
            Q1Certificate::new(m)
        },
        |c| verify_q1_certificate(c, s, p, cfg.verify_tol),
    ))
}

pub fn mnc_check(
    s: &ContextualityScenario,
    p: &ProbabilisticModel,
) -> Result<FeasibilityVerdict<MncCertificate>, CertificateError> {
    mnc_check_with(s, p, &CheckConfig::default())
}

/// MNC membership solved over covariance matrices. Vertices with probability
/// 0 or 1 have zero variance, hence zero rows, and are dropped first.
pub fn mnc_check_with(
    s: &ContextualityScenario,
    p: &ProbabilisticModel,
    cfg: &CheckConfig,
) -> Result<FeasibilityVerdict<MncCertificate>, CertificateError> {
    checked_model(s, p)?;
    let n = s.num_vertices();
    let kept: Vec<usize> = (0..n)
        .filter(|&v| p[v] > DEGENERATE_TOL && p[v] < 1.0 - DEGENERATE_TOL)
        .collect();
    let mut pos = vec![None; n];
    for (i, &v) in kept.iter().enumerate() {
        pos[v] = Some(i);
    }
    let k = kept.len();

    let mut fixed: Vec<(usize, usize, f64)> = kept
        .iter()
        .enumerate()
        .map(|(i, &v)| (i, i, p[v] - p[v] * p[v]))
        .collect();
    for (u, v) in s.exclusive_pairs() {
        if let (Some(a), Some(b)) = (pos[u], pos[v]) {
            fixed.push((a, b, -p[u] * p[v]));
        }
    }
    let mut equations = Vec::new();
    for edge in s.edges() {
        let rows: Vec<usize> = edge.iter().filter_map(|&u| pos[u]).collect();
        if rows.is_empty() {
            continue;
        }
        for j in 0..k {
            let terms = rows.iter().map(|&r| (r, j, 1.0)).collect();
            equations.push(LinearConstraint { terms, rhs: 0.0 });
        }
    }

    let r = solve_reduced(k, &fixed, equations, &cfg.sdp)?;
    Ok(finish(
        r,
        |x| {
            let mut g = Matrix::zeros(n, n);
            for i in 0..k {
                for j in 0..k {
                    g[(kept[i], kept[j])] = x[(i, j)];
                }
            }
            MncCertificate::new(g, p.clone())
        },
        |c| verify_mnc_certificate(c, s, p, cfg.verify_tol),
    ))
}
