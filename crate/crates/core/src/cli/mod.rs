//! Command-line interface.
//!
//! Exit codes: 0 success, 1 validation or I/O error, 2 assessment failure
//! (IID verdict false, restart check failed, health alarm raised), 64 usage
//! error. `ENTROPY_FORGE_THREADS` sets the worker count; results do not
//! depend on it.

mod commands;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_ASSESSMENT: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Environment variable holding the worker count.
pub const THREADS_ENV: &str = "ENTROPY_FORGE_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "entropy-forge",
    version,
    about = "Telegraph-noise TRNG simulation and entropy assessment"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a device and write a voltage trace.
    Simulate(SimulateArgs),
    /// Turn a voltage trace into a symbol stream.
    Extract(ExtractArgs),
    /// Statistical characterisation of a symbol stream.
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
    /// Entropy assessment and health tests.
    #[command(subcommand)]
    Sp90b(Sp90bCommand),
    /// Randomized algorithms driven by a symbol stream.
    #[command(subcommand)]
    Apps(AppsCommand),
    /// Simulate, extract, analyse and assess in one go.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Record wall time in the manifest (breaks byte-identity across runs).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Device parameters as JSON; omitted fields take defaults.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Overrides the seed in the parameter file.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the duration in seconds.
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Extraction parameters as JSON; flags below override it.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Symbol width in bits.
    #[arg(long)]
    pub n: Option<u8>,
    /// Bin width in seconds (default: one sample period).
    #[arg(long)]
    pub bin_width: Option<f64>,
    /// High-pass corner in Hz (default: fs/20).
    #[arg(long)]
    pub cutoff: Option<f64>,
    /// Edge threshold in volts (default: estimated from the noise floor).
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Dead time in seconds (default: two sample periods).
    #[arg(long)]
    pub dead_time: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeCommand {
    /// Shannon entropy, distributions and figure exports.
    Stats(StatsArgs),
    /// Correlation dimension and K2 entropy.
    Chaos(ChaosArgs),
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub report: PathBuf,
    /// Grayscale map as binary PGM (8-bit streams only).
    #[arg(long)]
    pub pgm: Option<PathBuf>,
    #[arg(long, default_value_t = 25)]
    pub rows: usize,
    #[arg(long, default_value_t = 60)]
    pub cols: usize,
    /// Bits per block for the ones-count histogram.
    #[arg(long, default_value_t = 100)]
    pub block_len: usize,
    /// Lag pairs as CSV.
    #[arg(long)]
    pub lag_csv: Option<PathBuf>,
    #[arg(long, default_value_t = crate::chaos::DEFAULT_LAG)]
    pub lag: usize,
    /// Difference series as CSV.
    #[arg(long)]
    pub diff_csv: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ChaosArgs {
    /// Symbol stream to analyse.
    #[arg(long = "in", required_unless_present = "lorenz")]
    pub input: Option<PathBuf>,
    /// Analyse the Lorenz reference series instead of a stream.
    #[arg(long, conflicts_with = "input")]
    pub lorenz: bool,
    #[arg(long)]
    pub report: PathBuf,
    /// Compute the K2 curve.
    #[arg(long)]
    pub k2: bool,
    /// Compute the correlation-dimension curve.
    #[arg(long)]
    pub corrdim: bool,
    /// Largest embedding dimension of the correlation-dimension curve.
    #[arg(long, default_value_t = 8)]
    pub dmax: usize,
    #[arg(long, default_value_t = crate::chaos::DEFAULT_LAG)]
    pub lag: usize,
    /// Leading samples used.
    #[arg(long, default_value_t = 5000)]
    pub samples: usize,
    /// Pairs closer than this in time are excluded.
    #[arg(long, default_value_t = crate::chaos::DEFAULT_THEILER)]
    pub theiler: usize,
    #[arg(long, default_value_t = 0.02)]
    pub r_min: f64,
    #[arg(long, default_value_t = 0.3)]
    pub r_max: f64,
    #[arg(long, default_value_t = 12)]
    pub r_count: usize,
    #[arg(long, default_value_t = 0.3)]
    pub eps_max: f64,
    #[arg(long, default_value_t = 0.03)]
    pub eps_min: f64,
    #[arg(long, default_value_t = 8)]
    pub eps_count: usize,
    #[arg(long, default_value_t = *crate::chaos::DEFAULT_K2_DIMS.start())]
    pub k2_dmin: usize,
    #[arg(long, default_value_t = *crate::chaos::DEFAULT_K2_DIMS.end())]
    pub k2_dmax: usize,
    /// Sampling step for the Lorenz reference, in integration steps.
    #[arg(long, default_value_t = crate::chaos::DEFAULT_LORENZ_STRIDE)]
    pub lorenz_stride: usize,
    #[arg(long)]
    pub k2_csv: Option<PathBuf>,
    #[arg(long)]
    pub corrdim_csv: Option<PathBuf>,
    /// Recurrent pairs at `--eps` as CSV.
    #[arg(long, requires = "eps")]
    pub recurrence_csv: Option<PathBuf>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Subcommand)]
pub enum Sp90bCommand {
    /// IID tests, min-entropy and restart tests.
    Assess(AssessArgs),
    /// Repetition count and adaptive proportion tests.
    Health(HealthArgs),
}

#[derive(Debug, Args)]
pub struct AssessArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Restart matrix file (with its JSON sidecar).
    #[arg(long)]
    pub restart: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub permutations: usize,
    /// Fail instead of flagging non-conforming dataset sizes.
    #[arg(long)]
    pub strict: bool,
    /// Skip the IID tests on restart rows and columns.
    #[arg(long)]
    pub no_restart_iid: bool,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct HealthArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Assessed min-entropy, bits per symbol.
    #[arg(long)]
    pub hmin: f64,
    #[arg(long, default_value_t = crate::sp90b::DEFAULT_ALPHA)]
    pub alpha: f64,
    /// Adaptive proportion window (default 512, or 1024 for 1-bit symbols).
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Subcommand)]
pub enum AppsCommand {
    /// Random walks on the cubic lattice.
    Walk(WalkArgs),
    /// PageRank by random walk against power iteration.
    Pagerank(PagerankArgs),
    /// Karger contraction against the exact minimum cut.
    Mincut(MincutArgs),
}

#[derive(Debug, Args)]
pub struct WalkArgs {
    #[arg(long)]
    pub stream: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    #[arg(long, default_value_t = 1)]
    pub walks: usize,
    /// Paths as CSV (walk, step, x, y, z).
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct PagerankArgs {
    #[arg(long)]
    pub stream: PathBuf,
    /// Web as edge-list CSV; generated when absent.
    #[arg(long)]
    pub web: Option<PathBuf>,
    #[arg(long, default_value_t = crate::apps::DEFAULT_WEB_NODES)]
    pub nodes: usize,
    #[arg(long, default_value_t = 0.1)]
    pub edge_prob: f64,
    #[arg(long, default_value_t = 0)]
    pub web_seed: u64,
    #[arg(long, default_value_t = crate::apps::DEFAULT_WALK_STEPS)]
    pub steps: u64,
    #[arg(long, default_value_t = crate::apps::DEFAULT_DAMPING)]
    pub damping: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = crate::apps::DEFAULT_PERSISTENCE)]
    pub rbo_p: f64,
    /// Also write the generated web.
    #[arg(long)]
    pub save_web: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct MincutArgs {
    #[arg(long)]
    pub stream: PathBuf,
    /// Graph as edge-list CSV; generated when absent.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub nodes: usize,
    #[arg(long, default_value_t = 0.5)]
    pub edge_prob: f64,
    #[arg(long, default_value_t = 0)]
    pub graph_seed: u64,
    /// Contraction runs (default: ceil(N(N-1)/2 ln N)).
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Convergence trace as CSV (iteration, cut, running_min).
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub save_graph: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// Pipeline configuration as JSON; flags below override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "pipeline-out")]
    pub workdir: PathBuf,
    #[arg(long)]
    pub symbols: Option<usize>,
    #[arg(long)]
    pub permutations: Option<usize>,
    #[arg(long)]
    pub restart_rows: Option<usize>,
    #[arg(long)]
    pub restart_cols: Option<usize>,
}

fn configure_threads() -> crate::Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().map_err(|_| {
            crate::Error::param(format!("{THREADS_ENV}={v:?} is not a thread count"))
        })?;
        // A pool may already exist when called as a library; keep it.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = configure_threads().and_then(|()| commands::dispatch(cli.command));
    match result {
        Ok(commands::Status::Success) => EXIT_OK,
        Ok(commands::Status::AssessmentFailed(msg)) => {
            eprintln!("assessment failed: {msg}");
            EXIT_ASSESSMENT
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
