//! `macronc`: build contextuality scenarios, decide Q1 and macroscopic
//! non-contextuality membership, transform certificates, run macroscopic
//! simulations and locate the isotropic critical visibility.
//!
//! Exit codes: 0 member or success, 1 non-member or failed comparison,
//! 2 inconclusive or error.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "macronc",
    version,
    about = "Macroscopic non-contextuality toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a scenario file.
    Build(BuildArgs),
    /// Write a probabilistic model file for a scenario.
    Model(ModelArgs),
    /// Decide classical, Q1 or macroscopic non-contextual membership.
    Check(CheckArgs),
    /// Bisect the isotropic visibility on the CHSH scenario.
    Bisect(BisectArgs),
    /// Simulate macroscopic extensions and compare with theory.
    Simulate(SimulateArgs),
    /// Convert a certificate between the Q1 and MNC forms.
    Transform(TransformArgs),
    /// Print version and default tolerances.
    Info(InfoArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Output file, written atomically. Defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(subcommand)]
    pub kind: BuildKind,
    /// Maximum number of measurement protocols to enumerate.
    #[arg(long, global = true, default_value_t = macronc_core::builders::DEFAULT_PROTOCOL_BUDGET)]
    pub budget: usize,
    /// Output file, written atomically. Defaults to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum BuildKind {
    /// Bell scenario with n parties, m settings and d outcomes.
    Bell { n: usize, m: usize, d: usize },
    /// Hypergraph image of a marginal scenario file.
    Marginal {
        /// JSON with `observables`, `contexts` and `outcomes`.
        input: PathBuf,
    },
    /// Three vertices, pairwise edges.
    Triangle,
    /// One edge with `d` outcomes.
    SingleEdge { d: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    /// Built-in maximally entangled realization on B(2,2,2).
    Tsirelson,
    /// Popescu-Rohrlich box on B(2,2,2).
    PrBox,
    /// Uniform noise on B(2,2,2).
    Noise,
    /// `λ·PR + (1 − λ)·noise` on B(2,2,2).
    Isotropic,
    /// `1/|e|` on every vertex; needs equal edge sizes around each vertex.
    Uniform,
    /// Correlation table file with `n`, `m`, `d` and `P`.
    Correlations,
    /// Quantum realization file with `dim`, `rho` and `projectors`.
    Realization,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(value_enum)]
    pub kind: ModelKind,
    #[arg(long)]
    pub scenario: PathBuf,
    /// Visibility for the isotropic model.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Input file for `correlations` and `realization`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SetKind {
    Classical,
    Q1,
    Mnc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CertKind {
    Q1,
    Mnc,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Tolerance for re-verifying solver certificates.
    #[arg(long, default_value_t = macronc_core::certificates::SOLVER_VERIFY_TOL)]
    pub tol: f64,
    /// Iteration budget of the SDP solver; for `classical`, the
    /// deterministic-model search budget.
    #[arg(long)]
    pub budget: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(value_enum)]
    pub set: SetKind,
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Also write the verified certificate, for `transform` and `simulate`.
    #[arg(long)]
    pub certificate_out: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct BisectArgs {
    #[arg(long, value_enum, default_value = "q1")]
    pub set: CertKind,
    #[arg(long, default_value_t = 0.5)]
    pub lo: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hi: f64,
    /// Width of the final bracket.
    #[arg(long, default_value_t = 0.005)]
    pub tol: f64,
    /// SDP iteration budget per probe.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Tolerance for re-verifying certificates at each probe.
    #[arg(long, default_value_t = macronc_core::certificates::SOLVER_VERIFY_TOL)]
    pub verify_tol: f64,
    /// CHSH scenario file; B(2,2,2) is built when omitted.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    /// Particles per run (N).
    #[arg(long, default_value_t = 10_000)]
    pub particles: u64,
    /// Number of runs (S).
    #[arg(long, default_value_t = 100_000)]
    pub runs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Scaling exponent of the fluctuations.
    #[arg(long, default_value_t = 0.5)]
    pub exponent: f64,
    /// Simulate only this edge.
    #[arg(long)]
    pub edge: Option<usize>,
    /// Threshold on covariance z-scores.
    #[arg(long, default_value_t = macronc_core::macrosim::DEFAULT_Z_THRESHOLD)]
    pub z_threshold: f64,
    /// Q1 or MNC certificate; samples its Gaussian witness as well.
    #[arg(long)]
    pub certificate: Option<PathBuf>,
    /// Witness samples; defaults to `--runs`.
    #[arg(long)]
    pub witness_runs: Option<usize>,
    /// Tolerance for verifying the certificate.
    #[arg(long, default_value_t = macronc_core::certificates::SOLVER_VERIFY_TOL)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    /// Certificate file to convert.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub scenario: PathBuf,
    /// Target form.
    #[arg(long, value_enum)]
    pub to: CertKind,
    #[arg(long, default_value_t = macronc_core::certificates::SOLVER_VERIFY_TOL)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct InfoArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Build(a) => commands::build(a),
        Command::Model(a) => commands::model(a),
        Command::Check(a) => commands::check(a),
        Command::Bisect(a) => commands::bisect(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Transform(a) => commands::transform(a),
        Command::Info(a) => commands::info(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::EXIT_INCONCLUSIVE)
        }
    }
}
