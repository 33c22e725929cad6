//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "sslsq",
    version,
    about = "Least squares classification with self-learning"
)]
pub struct Cli {
    /// Worker threads for restarts and repeats (default: all cores).
    /// Outputs do not depend on this value.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic two-class dataset as CSV with a true_label column.
    Generate(GenerateArgs),
    /// Fit one classifier and print a key=value summary.
    Fit(FitArgs),
    /// Hessian PSD checks, non-convexity witnesses and the hard-label
    /// global minimum by enumeration.
    Diagnose(DiagnoseArgs),
    /// Run self-learning from perturbed starts and count distinct optima.
    ///
    /// Report columns: start_index, start_kind, status, iterations,
    /// stop_reason, monotone, final_objective, test_error, optimum_id,
    /// w_init_0.., w_final_0..
    ///
    /// Aggregate columns: method, optimum_id, runs, final_objective,
    /// test_error, w_0..
    ///
    /// Path columns: start_index, iteration, objective, w_0..
    Basin(BasinArgs),
    /// Soft and hard self-learning from the supervised and random starts on
    /// each dataset, with test errors and distinct-minima counts.
    ///
    /// Report columns: dataset, method, start_kind, start_index, status,
    /// test_error
    ///
    /// Aggregate columns: dataset, status, partition_hash, supervised_error,
    /// method, from_supervised_error, random_mean_error, random_min_error,
    /// random_max_error, unique_minima, failed_runs
    LocalOptima(LocalOptimaArgs),
    /// Test error of supervised, soft, hard and oracle classifiers as the
    /// number of unlabeled objects grows.
    ///
    /// Report columns: repeat, unlabeled, method, status, error,
    /// partition_hash
    ///
    /// Aggregate columns: unlabeled, method, mean_error, standard_error, n
    LearningCurve(LearningCurveArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    #[value(name = "two-cluster-1d")]
    TwoCluster1d,
    #[value(name = "two-gaussian-2d")]
    TwoGaussian2d,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitMethod {
    Supervised,
    Soft,
    Hard,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SelfLearningMethod {
    Soft,
    Hard,
}

/// Options shared by every command that reads a dataset.
#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Do not prepend an intercept column to the features.
    #[arg(long)]
    pub no_intercept: bool,
    /// Name of the label column.
    #[arg(long, default_value = "label")]
    pub label_column: String,
    /// Token marking an unlabeled row in the label column.
    #[arg(long, default_value = "")]
    pub missing_token: String,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 1000)]
    pub max_iterations: usize,
    /// Relative objective decrease below which soft self-learning stops.
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long)]
    pub seed: u64,
    /// Output CSV; standard output when omitted (no manifest is written then).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub labeled_per_class: Option<usize>,
    #[arg(long)]
    pub unlabeled: Option<usize>,
    #[arg(long)]
    pub separation: Option<f64>,
    #[arg(long)]
    pub noise_sd: Option<f64>,
    /// Feature dimension for the custom kind.
    #[arg(long, default_value_t = 2)]
    pub dimension: usize,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub method: FitMethod,
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    /// Accepted for a uniform interface; fitting itself is deterministic.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the descent trace (iteration, objective, w_0..) here.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Labeled CSV used to report test error.
    #[arg(long)]
    pub test: Option<PathBuf>,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    /// Also write the report here, with a manifest sidecar.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct BasinArgs {
    /// Dataset CSV; a two-cluster-1d dataset generated from the seed when omitted.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub method: SelfLearningMethod,
    #[arg(long, default_value_t = 100)]
    pub starts: usize,
    /// Perturbation scale relative to max(1, |w_supervised|).
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    #[arg(long)]
    pub seed: u64,
    /// Labeled CSV for test errors; otherwise the unlabeled objects' true
    /// labels are used when available.
    #[arg(long)]
    pub test: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Aggregate CSV; defaults to <out stem>_aggregate.csv.
    #[arg(long)]
    pub aggregate: Option<PathBuf>,
    /// Also write every iterate of every run here.
    #[arg(long)]
    pub paths: Option<PathBuf>,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct LocalOptimaArgs {
    /// Fully labeled dataset CSV (labels or true_label for every row); repeatable.
    #[arg(long = "data", required = true)]
    pub data: Vec<PathBuf>,
    #[arg(long, default_value_t = 50)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long, default_value_t = 0.2)]
    pub test_fraction: f64,
    #[arg(long, default_value_t = 0.8)]
    pub unlabel_fraction: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub aggregate: Option<PathBuf>,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct LearningCurveArgs {
    /// Fully labeled dataset CSV; a two-gaussian-2d dataset generated from
    /// the seed when omitted.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub labeled: usize,
    /// Comma-separated unlabeled counts.
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 4, 8, 16, 32, 64, 128, 256])]
    pub u_values: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    pub repeats: usize,
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub aggregate: Option<PathBuf>,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
}
