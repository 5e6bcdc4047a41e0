use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use macronc_core::bisection::{bisect_isotropic, BisectionResult, MembershipSet};
use macronc_core::builders::{
    bell_marginal, bell_scenario, bell_scenario_with_budget, marginal_to_hypergraph_with,
    model_from_correlations, BuildError, CorrelationTable, MarginalFile, MarginalScenario,
    DEFAULT_PROTOCOL_BUDGET, MAX_BELL_VERTICES,
};
use macronc_core::certificates::{
    mnc_check_with, mnc_to_q1, q1_check_with, q1_to_mnc, verify_mnc_certificate,
    verify_q1_certificate, CertificateFile, CertificateKind, CheckConfig, FeasibilityVerdict,
    MncCertificate, EXACT_VERIFY_TOL, SOLVER_VERIFY_TOL,
};
use macronc_core::hypergraph::{
    single_edge, triangle, validate_model, ContextualityScenario, ProbabilisticModel,
    LOOSE_NORMALIZATION_TOL, NORMALIZATION_TOL,
};
use macronc_core::kernel::{LpConfig, SdpConfig, SdpStatus};
use macronc_core::macrosim::{
    convergence_csv, covariance_compare, gaussianity_check, sample_global_gaussian, simulate_edge,
    simulate_scenario, theoretical_covariance, ConvergenceRow, CovarianceComparison,
    GaussianWitness, GaussianityReport, MacroRunConfig, MacroSampleReport, WitnessReport,
    BATCH_RUNS, MIN_RUNS_FOR_MOMENTS, SKEWNESS_THRESHOLD,
};
use macronc_core::models::{
    classical_check_with, isotropic, pr_box, quantum_evaluate, tsirelson_realization,
    uniform_noise, ClassicalVerdict, QuantumRealization, DEFAULT_SEARCH_BUDGET, MEASUREMENT_TOL,
};
use serde::Serialize;

use crate::output::{emit, print_stdout, read_json, to_json, write_atomic, Report, ToolInfo};
use crate::{
    BisectArgs, BuildArgs, BuildKind, CertKind, CheckArgs, Format, InfoArgs, ModelArgs, ModelKind,
    SetKind, SimulateArgs, TransformArgs,
};

pub const EXIT_MEMBER: u8 = 0;
pub const EXIT_NON_MEMBER: u8 = 1;
pub const EXIT_INCONCLUSIVE: u8 = 2;

fn load_scenario(path: &Path) -> Result<ContextualityScenario> {
    read_json(path, "scenario")
}

/// Reads a model and checks it against the scenario at the loose tolerance,
/// which also admits floating-point quantum evaluations.
fn load_model(path: &Path, s: &ContextualityScenario) -> Result<ProbabilisticModel> {
    let p: ProbabilisticModel = read_json(path, "model")?;
    let report = validate_model(s, &p, LOOSE_NORMALIZATION_TOL)
        .with_context(|| format!("model {} does not fit the scenario", path.display()))?;
    if !report.accepted {
        bail!(
            "model {} is not normalized: worst edge residual {:.3e}, {} vertices out of range",
            path.display(),
            report.max_residual,
            report.out_of_range.len()
        );
    }
    Ok(p)
}

fn histogram(s: &ContextualityScenario) -> String {
    s.edge_size_histogram()
        .iter()
        .map(|(size, count)| format!("{size}x{count}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn scenario_summary(s: &ContextualityScenario) -> String {
    format!(
        "|V| {}, |E| {}, edge sizes {}",
        s.num_vertices(),
        s.num_edges(),
        histogram(s)
    )
}

pub fn build(a: BuildArgs) -> Result<u8> {
    let s = match &a.kind {
        BuildKind::Bell { n, m, d } => match bell_scenario_with_budget(*n, *m, *d, a.budget) {
            Ok(s) => s,
            Err(e @ BuildError::ProtocolBudget { .. }) => {
                let x = bell_marginal(*n, *m, *d)?;
                bail!(
                    "building B({n},{m},{d}): {e}; its {} vertices pass the size guard but it has {} measurement protocols",
                    (m * d).pow(*n as u32),
                    x.protocol_count()
                );
            }
            Err(e) => return Err(e).with_context(|| format!("building B({n},{m},{d})")),
        },
        BuildKind::Marginal { input } => {
            let file: MarginalFile = read_json(input, "marginal scenario")?;
            let x = MarginalScenario::try_from(file)?;
            marginal_to_hypergraph_with(&x, a.budget, |event| {
                event
                    .iter()
                    .map(|(o, v)| format!("m{o}={v}"))
                    .collect::<Vec<_>>()
                    .join(",")
            })?
        }
        BuildKind::Triangle => triangle(),
        BuildKind::SingleEdge { d } => {
            if *d == 0 {
                bail!("an edge needs at least one outcome");
            }
            single_edge(*d)
        }
    };
    emit(a.out.as_deref(), &to_json(&s)?, &scenario_summary(&s))?;
    Ok(EXIT_MEMBER)
}

fn require_chsh(s: &ContextualityScenario, kind: ModelKind) -> Result<()> {
    if *s != bell_scenario(2, 2, 2)? {
        bail!("{kind:?} is defined on the B(2,2,2) scenario only");
    }
    Ok(())
}

pub fn model(a: ModelArgs) -> Result<u8> {
    let s = load_scenario(&a.scenario)?;
    let input = || a.input.as_deref().context("this model kind needs --input");
    let mut tol = NORMALIZATION_TOL;
    let p = match a.kind {
        ModelKind::Tsirelson => {
            require_chsh(&s, a.kind)?;
            tol = LOOSE_NORMALIZATION_TOL;
            quantum_evaluate(&tsirelson_realization(), &s)?
        }
        ModelKind::PrBox => {
            require_chsh(&s, a.kind)?;
            model_from_correlations(&pr_box(), &s)?
        }
        ModelKind::Noise => {
            require_chsh(&s, a.kind)?;
            model_from_correlations(&uniform_noise(2, 2, 2), &s)?
        }
        ModelKind::Isotropic => {
            require_chsh(&s, a.kind)?;
            let lambda = a.lambda.context("isotropic needs --lambda")?;
            if !(0.0..=1.0).contains(&lambda) {
                bail!("lambda {lambda} outside [0, 1]");
            }
            model_from_correlations(&isotropic(lambda), &s)?
        }
        ModelKind::Uniform => {
            let mut p = vec![0.0; s.num_vertices()];
            for (v, slot) in p.iter_mut().enumerate() {
                let e = s.edges_of(v)[0];
                *slot = 1.0 / s.edge(e).len() as f64;
            }
            ProbabilisticModel::new(p)
        }
        ModelKind::Correlations => {
            let table: CorrelationTable = read_json(input()?, "correlation table")?;
            model_from_correlations(&table, &s)?
        }
        ModelKind::Realization => {
            let q: QuantumRealization = read_json(input()?, "realization")?;
            tol = LOOSE_NORMALIZATION_TOL;
            quantum_evaluate(&q, &s)?
        }
    };
    let report = validate_model(&s, &p, tol)?;
    if !report.accepted {
        bail!(
            "{:?} model is not normalized on this scenario: worst edge residual {:.3e}",
            a.kind,
            report.max_residual
        );
    }
    let summary = format!(
        "{:?} model on {} vertices, worst edge residual {:.3e}",
        a.kind,
        s.num_vertices(),
        report.max_residual
    );
    emit(a.out.out.as_deref(), &to_json(&p)?, &summary)?;
    Ok(EXIT_MEMBER)
}

#[derive(Debug, Serialize)]
struct CheckConfigEcho {
    set: &'static str,
    scenario: PathBuf,
    model: PathBuf,
    verify_tol: f64,
    search_budget: Option<usize>,
    sdp: Option<SdpConfig>,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
enum CheckVerdict<'a> {
    Classical(&'a ClassicalVerdict),
    Q1(&'a FeasibilityVerdict<macronc_core::certificates::Q1Certificate>),
    Mnc(&'a FeasibilityVerdict<MncCertificate>),
}

#[derive(Debug, Serialize)]
struct CheckBody<'a> {
    vertices: usize,
    edges: usize,
    membership: &'static str,
    verdict: CheckVerdict<'a>,
}

fn set_name(set: SetKind) -> &'static str {
    match set {
        SetKind::Classical => "classical",
        SetKind::Q1 => "q1",
        SetKind::Mnc => "mnc",
    }
}

fn status_code(status: SdpStatus) -> (u8, &'static str) {
    match status {
        SdpStatus::Feasible => (EXIT_MEMBER, "member"),
        SdpStatus::Infeasible => (EXIT_NON_MEMBER, "non-member"),
        SdpStatus::Inconclusive => (EXIT_INCONCLUSIVE, "inconclusive"),
    }
}

fn sdp_summary<C>(set: &str, v: &FeasibilityVerdict<C>, tol: f64) -> String {
    let mut out = format!(
        "{set}: {} after {} iterations, gap {:.3e}",
        status_code(v.status).1,
        v.iterations,
        v.gap
    );
    if let Some(l) = v.min_eigenvalue {
        out.push_str(&format!(", min eigenvalue {l:.3e}"));
    }
    if v.structural_residual > 0.0 {
        out.push_str(&format!(
            ", linear conditions unsatisfiable by {:.3e}",
            v.structural_residual
        ));
    }
    if v.certificate.is_some() {
        out.push_str(&format!(", certificate verified at {tol:e}"));
    }
    out
}

/// Writes the certificate file when requested; a missing certificate is
/// reported rather than treated as an error, since the verdict carries the
/// exit code. The note goes to stderr when stdout carries the report.
fn write_certificate(
    path: Option<&Path>,
    cert: Option<&CertificateFile>,
    report_on_stdout: bool,
) -> Result<()> {
    match (path, cert) {
        (Some(path), Some(cert)) => {
            write_atomic(path, &to_json(cert)?)?;
            let note = format!("wrote certificate {}", path.display());
            if report_on_stdout {
                eprintln!("{note}");
            } else {
                println!("{note}");
            }
        }
        (Some(path), None) => eprintln!("no certificate, {} not written", path.display()),
        (None, _) => {}
    }
    Ok(())
}

pub fn check(a: CheckArgs) -> Result<u8> {
    let s = load_scenario(&a.scenario)?;
    let p = load_model(&a.model, &s)?;
    let mut cfg = CheckConfig {
        verify_tol: a.solver.tol,
        ..CheckConfig::default()
    };
    if let Some(b) = a.solver.budget {
        cfg.sdp.max_iterations = b;
    }
    let set = set_name(a.set);
    let mut echo = CheckConfigEcho {
        set,
        scenario: a.scenario.clone(),
        model: a.model.clone(),
        verify_tol: a.solver.tol,
        search_budget: None,
        sdp: None,
    };
    let out = a.out.out.as_deref();
    let body = |membership, verdict| CheckBody {
        vertices: s.num_vertices(),
        edges: s.num_edges(),
        membership,
        verdict,
    };
    match a.set {
        SetKind::Classical => {
            if a.certificate_out.is_some() {
                bail!("--certificate-out applies to q1 and mnc only");
            }
            let budget = a.solver.budget.unwrap_or(DEFAULT_SEARCH_BUDGET);
            echo.search_budget = Some(budget);
            let v = classical_check_with(&s, &p, budget, &LpConfig::default())?;
            let (code, membership, summary) = match &v {
                ClassicalVerdict::Classical(dec) => (
                    EXIT_MEMBER,
                    "member",
                    format!(
                        "classical: member, mixture of {} deterministic models (deviation {:.3e})",
                        dec.weights.len(),
                        dec.max_deviation(&p)
                    ),
                ),
                ClassicalVerdict::NotClassical { margin, vacuous } => (
                    EXIT_NON_MEMBER,
                    "non-member",
                    if *vacuous {
                        "classical: non-member, the scenario has no deterministic models".into()
                    } else {
                        format!(
                            "classical: non-member, LP margin {:.3e}",
                            margin.unwrap_or(f64::NAN)
                        )
                    },
                ),
            };
            let report = Report::new(echo, body(membership, CheckVerdict::Classical(&v)));
            emit(out, &to_json(&report)?, &summary)?;
            Ok(code)
        }
        SetKind::Q1 => {
            echo.sdp = Some(cfg.sdp);
            let v = q1_check_with(&s, &p, &cfg)?;
            let (code, membership) = status_code(v.status);
            let summary = sdp_summary(set, &v, cfg.verify_tol);
            let report = Report::new(echo, body(membership, CheckVerdict::Q1(&v)));
            emit(out, &to_json(&report)?, &summary)?;
            let cert = v.certificate.as_ref().map(CertificateFile::from_q1);
            write_certificate(a.certificate_out.as_deref(), cert.as_ref(), out.is_none())?;
            Ok(code)
        }
        SetKind::Mnc => {
            echo.sdp = Some(cfg.sdp);
            let v = mnc_check_with(&s, &p, &cfg)?;
            let (code, membership) = status_code(v.status);
            let summary = sdp_summary(set, &v, cfg.verify_tol);
            let report = Report::new(echo, body(membership, CheckVerdict::Mnc(&v)));
            emit(out, &to_json(&report)?, &summary)?;
            let cert = v.certificate.as_ref().map(CertificateFile::from_mnc);
            write_certificate(a.certificate_out.as_deref(), cert.as_ref(), out.is_none())?;
            Ok(code)
        }
    }
}

#[derive(Debug, Serialize)]
struct BisectConfigEcho {
    set: MembershipSet,
    lo: f64,
    hi: f64,
    tol: f64,
    verify_tol: f64,
    sdp: SdpConfig,
    scenario: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct BisectBody<'a> {
    critical_visibility: [f64; 2],
    chsh_threshold: [f64; 2],
    result: &'a BisectionResult,
}

fn membership(k: CertKind) -> MembershipSet {
    match k {
        CertKind::Q1 => MembershipSet::Q1,
        CertKind::Mnc => MembershipSet::Mnc,
    }
}

pub fn bisect(a: BisectArgs) -> Result<u8> {
    let s = match &a.scenario {
        Some(path) => load_scenario(path)?,
        None => bell_scenario(2, 2, 2)?,
    };
    let mut cfg = CheckConfig {
        verify_tol: a.verify_tol,
        ..CheckConfig::default()
    };
    if let Some(b) = a.budget {
        cfg.sdp.max_iterations = b;
    }
    let set = membership(a.set);
    let r = bisect_isotropic(&s, set, a.lo, a.hi, a.tol, &cfg)?;
    let (c_lo, c_hi) = r.chsh_bracket();
    let mut summary = format!(
        "{:?}: {:?}, lambda in [{:.6}, {:.6}], CHSH in [{c_lo:.5}, {c_hi:.5}], {} probes",
        set,
        r.outcome,
        r.lower,
        r.upper,
        r.steps.len()
    );
    for w in &r.warnings {
        summary.push_str(&format!("\nwarning: {w}"));
    }
    let contents = match a.format {
        Format::Json => {
            let echo = BisectConfigEcho {
                set,
                lo: a.lo,
                hi: a.hi,
                tol: a.tol,
                verify_tol: a.verify_tol,
                sdp: cfg.sdp,
                scenario: a.scenario.clone(),
            };
            let body = BisectBody {
                critical_visibility: [r.lower, r.upper],
                chsh_threshold: [c_lo, c_hi],
                result: &r,
            };
            to_json(&Report::new(echo, body))?
        }
        Format::Csv => {
            let mut text = String::from("lambda,status,gap,iterations\n");
            for st in &r.steps {
                text.push_str(&format!(
                    "{},{},{},{}\n",
                    st.lambda,
                    status_code(st.status).1,
                    st.gap,
                    st.iterations
                ));
            }
            text
        }
    };
    emit(a.out.out.as_deref(), &contents, &summary)?;
    Ok(EXIT_MEMBER)
}

#[derive(Debug, Serialize)]
struct SimulateConfigEcho {
    scenario: PathBuf,
    model: PathBuf,
    run: MacroRunConfig,
    edge: Option<usize>,
    z_threshold: f64,
    skewness_threshold: f64,
    batch_runs: usize,
    certificate: Option<PathBuf>,
    witness_runs: Option<usize>,
    verify_tol: f64,
}

#[derive(Debug, Serialize)]
struct EdgeResult {
    sample: MacroSampleReport,
    comparison: CovarianceComparison,
    gaussianity: Option<GaussianityReport>,
}

#[derive(Debug, Serialize)]
struct SimulateBody {
    passed: bool,
    max_abs_deviation: f64,
    edges: Vec<EdgeResult>,
    witness: Option<WitnessReport>,
}

fn load_mnc_certificate(
    path: &Path,
    s: &ContextualityScenario,
    tol: f64,
) -> Result<MncCertificate> {
    let file: CertificateFile = read_json(path, "certificate")?;
    Ok(match file.kind {
        CertificateKind::Q1 => q1_to_mnc(&file.to_q1()?, s, tol)?,
        CertificateKind::Mnc => file.to_mnc()?,
    })
}

pub fn simulate(a: SimulateArgs) -> Result<u8> {
    let s = load_scenario(&a.scenario)?;
    let p = load_model(&a.model, &s)?;
    let cfg = MacroRunConfig {
        particles: a.particles,
        runs: a.runs,
        seed: a.seed,
        exponent: a.exponent,
    };
    let samples = match a.edge {
        Some(e) => vec![simulate_edge(&s, &p, e, &cfg)?],
        None => simulate_scenario(&s, &p, &cfg)?,
    };
    let mut edges = Vec::with_capacity(samples.len());
    for sample in samples {
        let theory = theoretical_covariance(&s, &p, sample.edge)?;
        let comparison = covariance_compare(&sample, &theory, a.z_threshold)?;
        let gaussianity = if a.runs >= MIN_RUNS_FOR_MOMENTS {
            Some(gaussianity_check(&sample, &p)?)
        } else {
            None
        };
        edges.push(EdgeResult {
            sample,
            comparison,
            gaussianity,
        });
    }

    let witness_runs = a.witness_runs.unwrap_or(a.runs);
    let witness = match &a.certificate {
        Some(path) => {
            let cert = load_mnc_certificate(path, &s, a.tol)?;
            let drift = cert
                .model()
                .p
                .iter()
                .zip(&p.p)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            if cert.model().len() != p.len() || drift > LOOSE_NORMALIZATION_TOL {
                bail!("certificate was issued for a different model (deviation {drift:.3e})");
            }
            let w = GaussianWitness::new(cert, &s)?;
            Some(sample_global_gaussian(&w, &s, witness_runs, a.seed)?)
        }
        None => None,
    };

    let passed = edges.iter().all(|e| e.comparison.passed);
    let max_abs_deviation = edges
        .iter()
        .map(|e| e.comparison.max_abs_deviation)
        .fold(0.0, f64::max);
    let worst_z = edges
        .iter()
        .map(|e| e.comparison.max_abs_z)
        .fold(0.0, f64::max);
    let mut summary = format!(
        "{} edges, N {}, S {}, seed {}: worst covariance deviation {max_abs_deviation:.3e}, worst |z| {worst_z:.2}, {}",
        edges.len(),
        a.particles,
        a.runs,
        a.seed,
        if passed { "consistent with theory" } else { "INCONSISTENT with theory" }
    );
    if let Some(w) = &witness {
        summary.push_str(&format!(
            "\nwitness: {} samples, worst marginal deviation {:.3e}",
            w.runs, w.max_abs_deviation
        ));
    }

    let contents = match a.format {
        Format::Json => {
            let echo = SimulateConfigEcho {
                scenario: a.scenario.clone(),
                model: a.model.clone(),
                run: cfg,
                edge: a.edge,
                z_threshold: a.z_threshold,
                skewness_threshold: SKEWNESS_THRESHOLD,
                batch_runs: BATCH_RUNS,
                certificate: a.certificate.clone(),
                witness_runs: a.certificate.as_ref().map(|_| witness_runs),
                verify_tol: a.tol,
            };
            let body = SimulateBody {
                passed,
                max_abs_deviation,
                edges,
                witness,
            };
            to_json(&Report::new(echo, body))?
        }
        Format::Csv => {
            let rows: Vec<ConvergenceRow> = edges
                .iter()
                .map(|e| ConvergenceRow {
                    edge: e.sample.edge,
                    particles: a.particles,
                    runs: a.runs,
                    seed: a.seed,
                    max_abs_deviation: e.comparison.max_abs_deviation,
                    max_abs_z: e.comparison.max_abs_z,
                })
                .collect();
            convergence_csv(&rows)
        }
    };
    emit(a.out.out.as_deref(), &contents, &summary)?;
    Ok(if passed { EXIT_MEMBER } else { EXIT_NON_MEMBER })
}

pub fn transform(a: TransformArgs) -> Result<u8> {
    let s = load_scenario(&a.scenario)?;
    let file: CertificateFile = read_json(&a.input, "certificate")?;
    let (converted, report) = match (file.kind, a.to) {
        (CertificateKind::Q1, CertKind::Mnc) => {
            let g = q1_to_mnc(&file.to_q1()?, &s, a.tol)?;
            let r = verify_mnc_certificate(&g, &s, g.model(), a.tol);
            (CertificateFile::from_mnc(&g), r)
        }
        (CertificateKind::Mnc, CertKind::Q1) => {
            let g = file.to_mnc()?;
            let m = mnc_to_q1(&g, &s, a.tol)?;
            let r = verify_q1_certificate(&m, &s, g.model(), a.tol);
            (CertificateFile::from_q1(&m), r)
        }
        (kind, _) => bail!("certificate is already in {kind} form"),
    };
    if !report.valid {
        bail!(
            "converted certificate failed verification, nothing written: {}",
            report.summary()
        );
    }
    let summary = format!(
        "{} -> {}, verified at {:e} (max residual {:.3e})",
        file.kind, converted.kind, a.tol, report.max_residual
    );
    emit(a.out.out.as_deref(), &to_json(&converted)?, &summary)?;
    Ok(EXIT_MEMBER)
}

#[derive(Debug, Serialize)]
struct InfoBody {
    tool: ToolInfo,
    exit_codes: [(&'static str, u8); 3],
    sdp: SdpConfig,
    solver_verify_tol: f64,
    exact_verify_tol: f64,
    normalization_tol: f64,
    loose_normalization_tol: f64,
    measurement_tol: f64,
    protocol_budget: usize,
    search_budget: usize,
    max_bell_vertices: u128,
    batch_runs: usize,
    skewness_threshold: f64,
}

pub fn info(a: InfoArgs) -> Result<u8> {
    let body = InfoBody {
        tool: ToolInfo::current(),
        exit_codes: [
            ("member", EXIT_MEMBER),
            ("non-member", EXIT_NON_MEMBER),
            ("inconclusive or error", EXIT_INCONCLUSIVE),
        ],
        sdp: SdpConfig::default(),
        solver_verify_tol: SOLVER_VERIFY_TOL,
        exact_verify_tol: EXACT_VERIFY_TOL,
        normalization_tol: NORMALIZATION_TOL,
        loose_normalization_tol: LOOSE_NORMALIZATION_TOL,
        measurement_tol: MEASUREMENT_TOL,
        protocol_budget: DEFAULT_PROTOCOL_BUDGET,
        search_budget: DEFAULT_SEARCH_BUDGET,
        max_bell_vertices: MAX_BELL_VERTICES,
        batch_runs: BATCH_RUNS,
        skewness_threshold: SKEWNESS_THRESHOLD,
    };
    let text = match a.format {
        Format::Json => to_json(&body)?,
        Format::Csv => {
            let value = serde_json::to_value(&body)?;
            let mut text = String::from("key,value\n");
            if let Some(map) = value.as_object() {
                for (k, v) in map {
                    if !v.is_object() && !v.is_array() {
                        text.push_str(&format!("{k},{v}\n"));
                    }
                }
                if let Some(sdp) = map.get("sdp").and_then(|v| v.as_object()) {
                    for (k, v) in sdp {
                        text.push_str(&format!("sdp.{k},{v}\n"));
                    }
                }
            }
            text
        }
    };
    print_stdout(&text)?;
    Ok(EXIT_MEMBER)
}
