//! Macroscopic extension of an experiment: `N` independent copies per run,
//! only outcome counts observed. Intensity fluctuations, their covariance
//! against the multinomial limit, moment diagnostics, and a Gaussian sampler
//! realizing a covariance certificate as one joint distribution.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certificates::{
    multinomial_covariance, verify_mnc_certificate, MncCertificate, SOLVER_VERIFY_TOL,
};
use crate::hypergraph::{ContextualityScenario, HypergraphError, ProbabilisticModel};
use crate::kernel::{eigh, KernelError, Matrix};

/// Runs per independently seeded batch.
pub const BATCH_RUNS: usize = 1024;
pub const DEFAULT_Z_THRESHOLD: f64 = 5.0;
pub const SKEWNESS_THRESHOLD: f64 = 0.05;
pub const MIN_RUNS_FOR_COVARIANCE: usize = 100;
pub const MIN_RUNS_FOR_MOMENTS: usize = 1000;
/// Stream tag separating witness sampling from per-edge count streams.
const WITNESS_STREAM: u64 = 1 << 63;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MacroError {
    #[error("invalid run configuration: {0}")]
    Config(String),
    #[error("edge {edge} does not exist ({num_edges} edges)")]
    NoSuchEdge { edge: usize, num_edges: usize },
    #[error("{runs} runs is too few, at least {required} needed")]
    TooFewRuns { runs: usize, required: usize },
    #[error("theory has size {expected}, report has {found} outcomes")]
    SizeMismatch { expected: usize, found: usize },
    #[error("covariance certificate rejected: {0}")]
    Certificate(String),
    #[error("run {run} on edge {edge} has counts summing to {sum}, not {particles}")]
    Normalization {
        edge: usize,
        run: usize,
        sum: u64,
        particles: u64,
    },
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacroRunConfig {
    /// Copies of the system per run.
    pub particles: u64,
    /// Independent runs per edge.
    pub runs: usize,
    pub seed: u64,
    /// Fluctuations are rescaled by `N^exponent`; only 1/2 has a finite,
    /// nonzero limit.
    pub exponent: f64,
}

impl MacroRunConfig {
    pub fn new(particles: u64, runs: usize, seed: u64) -> Self {
        Self {
            particles,
            runs,
            seed,
            exponent: 0.5,
        }
    }

    fn validate(&self) -> Result<(), MacroError> {
        if self.particles == 0 {
            return Err(MacroError::Config("particles must be at least 1".into()));
        }
        if self.runs < 2 {
            return Err(MacroError::Config("runs must be at least 2".into()));
        }
        if !self.exponent.is_finite() {
            return Err(MacroError::Config("exponent must be finite".into()));
        }
        Ok(())
    }

    fn scale(&self) -> f64 {
        (self.particles as f64).powf(self.exponent)
    }
}

/// Per-outcome standardized moments of the fluctuations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeMoments {
    pub vertex: usize,
    /// `None` for a zero-variance marginal.
    pub skewness: Option<f64>,
    pub excess_kurtosis: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacroSampleReport {
    pub edge: usize,
    pub vertices: Vec<usize>,
    pub config: MacroRunConfig,
    /// Raw counts per run, one entry per vertex of the edge.
    #[serde(skip)]
    pub counts: Vec<Vec<u64>>,
    /// Largest `|Σ_{v∈e} Ī_v|` over runs after rescaling.
    pub max_fluctuation_sum: f64,
    pub mean: Vec<f64>,
    pub covariance: Matrix,
    pub moments: Vec<OutcomeMoments>,
}

impl MacroSampleReport {
    /// `Ī_v = (c_v − N p(v)) / N^exponent` for one run.
    pub fn fluctuations(&self, run: usize, p: &ProbabilisticModel) -> Vec<f64> {
        fluctuations(&self.counts[run], &self.vertices, p, &self.config)
    }
}

fn fluctuations(
    c: &[u64],
    vertices: &[usize],
    p: &ProbabilisticModel,
    cfg: &MacroRunConfig,
) -> Vec<f64> {
    let n = cfg.particles as f64;
    let scale = cfg.scale();
    c.iter()
        .zip(vertices)
        .map(|(&c, &v)| (c as f64 - n * p[v]) / scale)
        .collect()
}

/// One multinomial draw by sequential binomial conditioning.
fn multinomial(rng: &mut ChaCha8Rng, n: u64, probs: &[f64]) -> Vec<u64> {
    let mut out = vec![0u64; probs.len()];
    let mut remaining = n;
    let mut mass: f64 = probs.iter().sum();
    for (i, &q) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i + 1 == probs.len() {
            out[i] = remaining;
            break;
        }
        let cond = if mass > 0.0 {
            (q / mass).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let k = if cond >= 1.0 {
            remaining
        } else {
            rng.sample(Binomial::new(remaining, cond).expect("probability within [0, 1]"))
        };
        out[i] = k;
        remaining -= k;
        mass -= q;
    }
    out
}

fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn batches(runs: usize) -> Vec<(usize, usize)> {
    (0..runs.div_ceil(BATCH_RUNS))
        .map(|b| (b, BATCH_RUNS.min(runs - b * BATCH_RUNS)))
        .collect()
}

/// Mean and unbiased covariance of row vectors.
fn sample_covariance(rows: &[Vec<f64>], dim: usize) -> (Vec<f64>, Matrix) {
    let s = rows.len() as f64;
    let mut mean = vec![0.0; dim];
    for r in rows {
        for (m, x) in mean.iter_mut().zip(r) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= s;
    }
    let mut cov = Matrix::zeros(dim, dim);
    for r in rows {
        for i in 0..dim {
            let di = r[i] - mean[i];
            for j in i..dim {
                cov[(i, j)] += di * (r[j] - mean[j]);
            }
        }
    }
    for i in 0..dim {
        for j in i..dim {
            let v = cov[(i, j)] / (s - 1.0);
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    (mean, cov)
}

fn standardized_moments(
    values: impl Iterator<Item = f64> + Clone,
    mean: f64,
) -> (Option<f64>, Option<f64>) {
    let (mut m2, mut m3, mut m4, mut count) = (0.0, 0.0, 0.0, 0.0);
    for x in values {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
        count += 1.0;
    }
    m2 /= count;
    m3 /= count;
    m4 /= count;
    if m2 <= 0.0 {
        return (None, None);
    }
    (Some(m3 / m2.powf(1.5)), Some(m4 / (m2 * m2) - 3.0))
}

/// `S` independent multinomial runs of `N` copies on one edge.
pub fn simulate_edge(
    s: &ContextualityScenario,
    p: &ProbabilisticModel,
    edge: usize,
    cfg: &MacroRunConfig,
) -> Result<MacroSampleReport, MacroError> {
    cfg.validate()?;
    if edge >= s.num_edges() {
        return Err(MacroError::NoSuchEdge {
            edge,
            num_edges: s.num_edges(),
        });
    }
    if p.len() != s.num_vertices() {
        return Err(HypergraphError::DimensionMismatch {
            expected: s.num_vertices(),
            found: p.len(),
        }
        .into());
    }
    let vertices = s.edge(edge).to_vec();
    let probs: Vec<f64> = vertices.iter().map(|&v| p[v].clamp(0.0, 1.0)).collect();

    let chunks: Vec<Vec<Vec<u64>>> = batches(cfg.runs)
        .into_par_iter()
        .map(|(b, len)| {
            let mut rng = substream(cfg.seed, ((edge as u64) << 32) | b as u64);
            (0..len)
                .map(|_| multinomial(&mut rng, cfg.particles, &probs))
                .collect()
        })
        .collect();
    let counts: Vec<Vec<u64>> = chunks.into_iter().flatten().collect();

    let mut max_fluctuation_sum = 0.0f64;
    let mut rows = Vec::with_capacity(counts.len());
    for (run, c) in counts.iter().enumerate() {
        let sum: u64 = c.iter().sum();
        if sum != cfg.particles {
            return Err(MacroError::Normalization {
                edge,
                run,
                sum,
                particles: cfg.particles,
            });
        }
        let f = fluctuations(c, &vertices, p, cfg);
        max_fluctuation_sum = max_fluctuation_sum.max(f.iter().sum::<f64>().abs());
        rows.push(f);
    }
    let (mean, covariance) = sample_covariance(&rows, vertices.len());
    let moments = vertices
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let (skewness, excess_kurtosis) =
                standardized_moments(rows.iter().map(|r| r[i]), mean[i]);
            OutcomeMoments {
                vertex: v,
                skewness,
                excess_kurtosis,
            }
        })
        .collect();

    Ok(MacroSampleReport {
        edge,
        vertices,
        config: *cfg,
        counts,
        max_fluctuation_sum,
        mean,
        covariance,
        moments,
    })
}

/// Every edge of `s`, edges in parallel.
pub fn simulate_scenario(
    s: &ContextualityScenario,
    p: &ProbabilisticModel,
    cfg: &MacroRunConfig,
) -> Result<Vec<MacroSampleReport>, MacroError> {
    (0..s.num_edges())
        .into_par_iter()
        .map(|e| simulate_edge(s, p, e, cfg))
        .collect()
}

/// `δ_uv p(v) − p(u)p(v)` over the vertices of one edge.
pub fn theoretical_covariance(
    s: &ContextualityScenario,
    p: &ProbabilisticModel,
    edge: usize,
) -> Result<Matrix, MacroError> {
    if edge >= s.num_edges() {
        return Err(MacroError::NoSuchEdge {
            edge,
            num_edges: s.num_edges(),
        });
    }
    let restricted: Vec<f64> = s.edge(edge).iter().map(|&v| p[v]).collect();
    Ok(multinomial_covariance(&restricted))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceComparison {
    pub edge: usize,
    /// Empirical minus expected.
    pub deviation: Matrix,
    pub max_abs_deviation: f64,
    /// Deviation over its asymptotic standard error; infinite when the
    /// expected variance is zero but the deviation is not.
    pub z_scores: Matrix,
    pub max_abs_z: f64,
    pub z_threshold: f64,
    pub passed: bool,
}

/// Compares a report against `γ^e`. For exponents other than 1/2 the theory
/// is rescaled by `N^(1 − 2·exponent)`, which shows how other scalings vanish
/// or blow up.
pub fn covariance_compare(
    report: &MacroSampleReport,
    gamma: &Matrix,
    z_threshold: f64,
) -> Result<CovarianceComparison, MacroError> {
    let runs = report.config.runs;
    if runs < MIN_RUNS_FOR_COVARIANCE {
        return Err(MacroError::TooFewRuns {
            runs,
            required: MIN_RUNS_FOR_COVARIANCE,
        });
    }
    let k = report.vertices.len();
    if gamma.rows() != k || !gamma.is_square() {
        return Err(MacroError::SizeMismatch {
            expected: gamma.rows(),
            found: k,
        });
    }
    let factor = (report.config.particles as f64).powf(1.0 - 2.0 * report.config.exponent);
    let expected = gamma.scaled(factor);
    let deviation = report.covariance.sub(&expected);
    let mut z_scores = Matrix::zeros(k, k);
    let (mut max_dev, mut max_z) = (0.0f64, 0.0f64);
    for i in 0..k {
        for j in 0..k {
            let d = deviation[(i, j)];
            let var =
                (expected[(i, i)] * expected[(j, j)] + expected[(i, j)].powi(2)) / runs as f64;
            let z = if var > 0.0 {
                d / var.sqrt()
            } else if d.abs() <= 1e-12 {
                0.0
            } else {
                f64::INFINITY
            };
            z_scores[(i, j)] = z;
            max_dev = max_dev.max(d.abs());
            max_z = max_z.max(z.abs());
        }
    }
    Ok(CovarianceComparison {
        edge: report.edge,
        deviation,
        max_abs_deviation: max_dev,
        z_scores,
        max_abs_z: max_z,
        z_threshold,
        passed: max_z <= z_threshold,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    pub vertex: usize,
    pub skewness: Option<f64>,
    pub excess_kurtosis: Option<f64>,
    /// Closed-form binomial skewness `(1 − 2p)/√(N p (1 − p))`.
    pub expected_skewness: Option<f64>,
    pub skipped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianityReport {
    pub edge: usize,
    pub outcomes: Vec<MomentCheck>,
    pub notices: Vec<String>,
    pub skewness_threshold: f64,
    /// Every non-skipped `|skewness|` is below the threshold.
    pub passed: bool,
}

pub fn gaussianity_check(
    report: &MacroSampleReport,
    p: &ProbabilisticModel,
) -> Result<GaussianityReport, MacroError> {
    let runs = report.config.runs;
    if runs < MIN_RUNS_FOR_MOMENTS {
        return Err(MacroError::TooFewRuns {
            runs,
            required: MIN_RUNS_FOR_MOMENTS,
        });
    }
    let n = report.config.particles as f64;
    let mut notices = Vec::new();
    let mut passed = true;
    let outcomes = report
        .moments
        .iter()
        .map(|m| {
            let q = p[m.vertex];
            let var = n * q * (1.0 - q);
            let skipped = m.skewness.is_none();
            if skipped {
                notices.push(format!("vertex {} has zero variance, skipped", m.vertex));
            } else if m.skewness.is_some_and(|s| s.abs() >= SKEWNESS_THRESHOLD) {
                passed = false;
            }
            MomentCheck {
                vertex: m.vertex,
                skewness: m.skewness,
                excess_kurtosis: m.excess_kurtosis,
                expected_skewness: (var > 0.0).then(|| (1.0 - 2.0 * q) / var.sqrt()),
                skipped,
            }
        })
        .collect();
    Ok(GaussianityReport {
        edge: report.edge,
        outcomes,
        notices,
        skewness_threshold: SKEWNESS_THRESHOLD,
        passed,
    })
}

/// Zero-mean Gaussian over all vertices with a verified covariance
/// certificate, sampled through a spectral square root.
#[derive(Debug, Clone)]
pub struct GaussianWitness {
    certificate: MncCertificate,
    root: Matrix,
}

impl GaussianWitness {
    pub fn new(certificate: MncCertificate, s: &ContextualityScenario) -> Result<Self, MacroError> {
        let report =
            verify_mnc_certificate(&certificate, s, certificate.model(), SOLVER_VERIFY_TOL);
        if !report.valid {
            return Err(MacroError::Certificate(report.summary()));
        }
        let mut g = certificate.matrix().clone();
        g.symmetrize();
        let eig = eigh(&g)?;
        if eig.min_value() < -SOLVER_VERIFY_TOL {
            return Err(MacroError::Certificate(format!(
                "eigenvalue {:e} below clipping bound",
                eig.min_value()
            )));
        }
        let n = g.rows();
        let mut root = Matrix::zeros(n, n);
        for (k, &l) in eig.values.iter().enumerate() {
            let s = l.max(0.0).sqrt();
            for i in 0..n {
                root[(i, k)] = eig.vectors[(i, k)] * s;
            }
        }
        Ok(Self { certificate, root })
    }

    pub fn certificate(&self) -> &MncCertificate {
        &self.certificate
    }

    /// `L` with `L Lᵀ = γ` up to clipping.
    pub fn root(&self) -> &Matrix {
        &self.root
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeMarginal {
    pub edge: usize,
    pub vertices: Vec<usize>,
    pub empirical: Matrix,
    /// `γ` restricted to the edge.
    pub expected: Matrix,
    pub max_abs_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub runs: usize,
    pub seed: u64,
    pub covariance: Matrix,
    pub marginals: Vec<EdgeMarginal>,
    pub max_abs_deviation: f64,
}

/// Draws `runs` vectors over all of `V` and compares each edge's marginal
/// covariance with `γ` restricted to that edge.
pub fn sample_global_gaussian(
    w: &GaussianWitness,
    s: &ContextualityScenario,
    runs: usize,
    seed: u64,
) -> Result<WitnessReport, MacroError> {
    if runs < 2 {
        return Err(MacroError::Config("runs must be at least 2".into()));
    }
    let n = w.root.rows();
    if n != s.num_vertices() {
        return Err(MacroError::SizeMismatch {
            expected: s.num_vertices(),
            found: n,
        });
    }
    let chunks: Vec<Vec<Vec<f64>>> = batches(runs)
        .into_par_iter()
        .map(|(b, len)| {
            let mut rng = substream(seed, WITNESS_STREAM | b as u64);
            (0..len)
                .map(|_| {
                    let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
                    w.root.mat_vec(&z)
                })
                .collect()
        })
        .collect();
    let rows: Vec<Vec<f64>> = chunks.into_iter().flatten().collect();
    let (_, covariance) = sample_covariance(&rows, n);

    let gamma = w.certificate.matrix();
    let mut worst = 0.0f64;
    let marginals = s
        .edges()
        .iter()
        .enumerate()
        .map(|(e, vs)| {
            let empirical = covariance.principal_submatrix(vs);
            let expected = gamma.principal_submatrix(vs);
            let dev = empirical.max_abs_diff(&expected);
            worst = worst.max(dev);
            EdgeMarginal {
                edge: e,
                vertices: vs.clone(),
                empirical,
                expected,
                max_abs_deviation: dev,
            }
        })
        .collect();
    Ok(WitnessReport {
        runs,
        seed,
        covariance,
        marginals,
        max_abs_deviation: worst,
    })
}

/// One line of a convergence table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub edge: usize,
    pub particles: u64,
    pub runs: usize,
    pub seed: u64,
    pub max_abs_deviation: f64,
    pub max_abs_z: f64,
}

pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("edge,particles,runs,seed,max_abs_deviation,max_abs_z\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.edge, r.particles, r.runs, r.seed, r.max_abs_deviation, r.max_abs_z
        ));
    }
    out
}
