use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Name of the environment variable holding the default grid size.
pub const RESOLUTION_ENV: &str = "LPCURV_RESOLUTION";

#[derive(Debug, Parser)]
#[command(name = "lpcurv", version, about = "Smooth convex bodies, L_p functionals and stability checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a body and write it as a JSON body file.
    Gen(GenArgs),
    /// Evaluate quantities of a stored body.
    Eval(EvalArgs),
    /// Run the stability checks and write a CSV (and optionally JSON) report.
    Verify(VerifyArgs),
    /// Evaluate quantities along a one-parameter family.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Ball,
    Ellipsoid,
    Harmonic,
    #[value(name = "cap_cut", alias = "cap-cut")]
    CapCut,
    Random,
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: FamilyName,
    /// Ambient dimension (2 or 3).
    #[arg(long = "n", visible_alias = "dim", default_value_t = 2)]
    pub n: usize,
    /// Ball radius.
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    /// Ellipsoid semi-axes (diagonal matrix).
    #[arg(long, value_delimiter = ',')]
    pub axes: Vec<f64>,
    /// Ellipsoid matrix, row-major, symmetric positive definite.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub matrix: Vec<f64>,
    /// Harmonic amplitude.
    #[arg(long, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    /// Harmonic degree.
    #[arg(long)]
    pub degree: Option<usize>,
    /// Harmonic order (sin/cos index in the plane, m in space).
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub order: i64,
    #[arg(long)]
    pub cap_height: Option<f64>,
    /// Cap-cut smoothing; the default ladder is used when absent.
    #[arg(long)]
    pub smoothing: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 3.0)]
    pub decay: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ResolutionArg {
    /// Grid size: nodes on the circle, Gauss-Legendre rings on the sphere.
    #[arg(long, env = RESOLUTION_ENV)]
    pub resolution: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub resolution: ResolutionArg,
    /// Output path; standard output when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Body file written by `gen`.
    pub body: PathBuf,
    /// Quantities to evaluate (comma separated or repeated).
    #[arg(long = "q", value_delimiter = ',', required = true)]
    pub quantities: Vec<String>,
    /// Exponents for p-dependent quantities.
    #[arg(long = "p", value_delimiter = ',', allow_hyphen_values = true)]
    pub p: Vec<f64>,
    #[command(flatten)]
    pub resolution: ResolutionArg,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Dimensions of the default suite.
    #[arg(long = "n", value_delimiter = ',', default_value = "2")]
    pub n: Vec<usize>,
    /// `default`, `empty`, or a JSON file holding a list of body specs.
    #[arg(long, default_value = "default")]
    pub suite: String,
    /// Replaces the default exponent lists.
    #[arg(long = "p", value_delimiter = ',', allow_hyphen_values = true)]
    pub p: Vec<f64>,
    /// Tolerance applied to every pass/fail row.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Unimodular maps per body.
    #[arg(long, default_value_t = 10)]
    pub sln_maps: usize,
    /// Seed of the unimodular maps.
    #[arg(long, default_value_t = 0x51_2e)]
    pub seed: u64,
    /// Skip the asymmetry trend rows.
    #[arg(long)]
    pub no_asymmetry: bool,
    #[arg(long)]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub resolution: ResolutionArg,
    /// CSV report path; standard output when absent.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// JSON report path.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Spec field to vary, e.g. `eps`, `cap_height`, `radius`, `seed`, `decay`.
    #[arg(long)]
    pub param: String,
    /// Explicit parameter values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub values: Vec<f64>,
    /// Evenly spaced values `start:stop:count`.
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<String>,
    #[arg(long = "q", value_delimiter = ',', required = true)]
    pub quantities: Vec<String>,
    #[arg(long = "p", value_delimiter = ',', allow_hyphen_values = true)]
    pub p: Vec<f64>,
    #[command(flatten)]
    pub resolution: ResolutionArg,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}
