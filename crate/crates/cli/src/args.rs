use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "barnes",
    version,
    about = "Barnes multiple zeta evaluation and mean-square experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate ζ_r(s, a, w) at one point.
    Eval(EvalArgs),
    /// Diagonal constant ζ̃_r(σ, a, w).
    Tilde(TildeArgs),
    /// Integrate |ζ_r(σ + it)|^2 over [1, T] and print the checkpoint trace.
    Meansquare(MeanSquareArgs),
    /// Fit the mean-square residual exponent and compare with the regime bound.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMethod {
    Auto,
    Direct,
    Approx,
    /// Euler–Maclaurin summation, valid for σ > r - 1.
    Em,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightsMode {
    Independent,
    Rational,
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// key=value file using the flag names; flags given on the command line win.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Write the record here instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Cap on series terms per evaluation (also read from BARNES_TERM_CAP).
    #[arg(long)]
    pub term_cap: Option<f64>,
    /// Worker threads for parallel sums and quadrature.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct EvalArgs {
    #[arg(long)]
    pub a: f64,
    /// Comma-separated weights; `p/q` entries are exact rationals.
    #[arg(long)]
    pub w: String,
    #[arg(long)]
    pub sigma: f64,
    #[arg(long)]
    pub t: f64,
    /// Truncation length for the approximate formula.
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long, value_enum, default_value_t = EvalMethod::Auto)]
    pub method: EvalMethod,
    #[arg(long, default_value_t = 1e-8)]
    pub rel_tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct TildeArgs {
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub w: String,
    #[arg(long)]
    pub sigma: f64,
    /// Inferred from the weight literals when omitted.
    #[arg(long, value_enum)]
    pub weights_mode: Option<WeightsMode>,
    #[arg(long, default_value_t = 1e-10)]
    pub rel_tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct MeanSquareArgs {
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub w: String,
    #[arg(long)]
    pub sigma: f64,
    #[arg(long = "T", value_name = "T")]
    #[serde(rename = "T")]
    pub t_max: f64,
    /// Comma-separated checkpoints inside (1, T]; T is always reported.
    #[arg(long, value_delimiter = ',')]
    pub checkpoints: Vec<f64>,
    #[arg(long, default_value_t = 1e-6)]
    pub quad_tol: f64,
    /// Cap on integrand evaluations (default 1e7 for r = 1, 1e5 otherwise).
    #[arg(long)]
    pub eval_cap: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct VerifyArgs {
    #[arg(long, required_unless_present = "self_test")]
    pub a: Option<f64>,
    #[arg(long, required_unless_present = "self_test")]
    pub w: Option<String>,
    #[arg(long, required_unless_present = "self_test")]
    pub sigma: Option<f64>,
    #[arg(
        long = "T-grid",
        value_name = "T_GRID",
        value_delimiter = ',',
        required_unless_present = "self_test"
    )]
    #[serde(rename = "T_grid")]
    pub t_grid: Vec<f64>,
    #[arg(long, value_enum)]
    pub weights_mode: Option<WeightsMode>,
    #[arg(long, default_value_t = 1e-6)]
    pub quad_tol: f64,
    #[arg(long)]
    pub eval_cap: Option<u64>,
    /// Run the boundary-identity suite instead of a verification.
    #[arg(long)]
    pub self_test: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(flatten)]
    pub common: Common,
}
