use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "otdcov", version, about = "Distribution-free rank distance covariance tests of independence")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test independence of the x and y columns of a CSV file.
    Test(TestArgs),
    /// Simulate a null table and write it to a file.
    NullTable(NullTableArgs),
    /// Write a structured grid as CSV.
    Grid(GridArgs),
    /// Estimate rejection rates on simulated data.
    Power(PowerArgs),
}

/// Options shared by `test` and `power`.
#[derive(Debug, Clone, Args)]
pub struct TestOptions {
    #[arg(long, default_value = "euclidean")]
    pub space: String,
    #[arg(long)]
    pub dx: usize,
    #[arg(long)]
    pub dy: usize,
    #[arg(long, default_value = "wilcoxon")]
    pub scores_x: String,
    #[arg(long, default_value = "wilcoxon")]
    pub scores_y: String,
    /// two-step or step1 (sphere only).
    #[arg(long, default_value = "two-step")]
    pub variant: String,
    #[arg(long, default_value = "azimuthal_equidistant")]
    pub chart: String,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 999)]
    pub null_draws: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory of cached null tables.
    #[arg(long)]
    pub null_cache: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub biloop_c: f64,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub opts: TestOptions,
}

#[derive(Debug, Args)]
pub struct NullTableArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub dx: usize,
    #[arg(long)]
    pub dy: usize,
    #[arg(long, default_value = "euclidean")]
    pub space: String,
    #[arg(long, default_value = "wilcoxon")]
    pub scores_x: String,
    #[arg(long, default_value = "wilcoxon")]
    pub scores_y: String,
    #[arg(long, default_value_t = 999)]
    pub draws: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0)]
    pub biloop_c: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, default_value = "euclidean")]
    pub space: String,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub n: usize,
    /// Comma-separated pole coordinates (sphere); defaults to e_d.
    #[arg(long)]
    pub pole: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PowerArgs {
    /// independent, rotation[:kappa] or copula:r
    #[arg(long)]
    pub scenario: String,
    /// Comma-separated sample sizes.
    #[arg(long)]
    pub n_list: String,
    #[arg(long, default_value_t = 500)]
    pub reps: usize,
    /// Output path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub opts: TestOptions,
}
