use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sphere_sapt::star::{CoefficientSet, ProductKind};

pub const DEFAULT_OUT: &str = "sphere-sapt-out";

#[derive(Debug, Parser)]
#[command(
    name = "sphere-sapt",
    version,
    about = "Spin quantization and adiabatic perturbation checks"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Directory for the CSV and JSON outputs.
    #[arg(long, global = true, env = "SPHERE_SAPT_OUT", default_value = DEFAULT_OUT)]
    pub out: PathBuf,
    /// Seed of every random corpus.
    #[arg(long, global = true, default_value_t = 11)]
    pub seed: u64,
    /// Star-product coefficients used downstream.
    #[arg(long, global = true, default_value = "calibrated", value_parser = parse_set)]
    pub coefficient_set: CoefficientSet,
    /// key=value file of defaults; flags on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

fn parse_set(s: &str) -> Result<CoefficientSet, String> {
    s.parse().map_err(|e: sphere_sapt::Error| e.to_string())
}

fn parse_product(s: &str) -> Result<ProductKind, String> {
    s.parse().map_err(|e: sphere_sapt::Error| e.to_string())
}

fn parse_path(s: &str) -> Result<sphere_sapt::sapt::HPath, String> {
    s.parse().map_err(|e: sphere_sapt::Error| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Kernel properties, round trips and the model's exact symbols.
    KernelCheck(KernelCheckArgs),
    /// Truncation and commutator error slopes of a star product.
    StarSlopes(StarSlopesArgs),
    /// Fit the first-order star coefficients against the exact product.
    Calibrate(CalibrateArgs),
    /// Spectral distance N(theta, lambda).
    Gap(GapArgs),
    /// Chern numbers of the principal bands.
    Chern(ChernArgs),
    /// Exact band ranks against the reference rank.
    Obstruction(ObstructionArgs),
    /// Commutator norms of the quantized Moyal projections.
    InvarianceSlopes(InvarianceArgs),
    /// Exact band clusters against the effective Hamiltonian.
    Bands(BandsArgs),
    /// Quantum Heisenberg evolution against the classical band flow.
    Egorov(EgorovArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::KernelCheck(_) => "kernel-check",
            Self::StarSlopes(_) => "star-slopes",
            Self::Calibrate(_) => "calibrate",
            Self::Gap(_) => "gap",
            Self::Chern(_) => "chern",
            Self::Obstruction(_) => "obstruction",
            Self::InvarianceSlopes(_) => "invariance-slopes",
            Self::Bands(_) => "bands",
            Self::Egorov(_) => "egorov",
        }
    }

    pub const NAMES: [&'static str; 9] = [
        "kernel-check",
        "star-slopes",
        "calibrate",
        "gap",
        "chern",
        "obstruction",
        "invariance-slopes",
        "bands",
        "egorov",
    ];
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct KernelCheckArgs {
    #[arg(long = "two-j", value_delimiter = ',', default_values_t = [1, 2, 3, 5, 10, 20])]
    pub two_j: Vec<u32>,
    /// Random group elements and operator pairs per kernel.
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    /// two_j values for the model symbol identities.
    #[arg(long = "symbol-two-j", value_delimiter = ',', default_values_t = [3, 4, 5, 6, 7, 8, 9, 10, 11])]
    pub symbol_two_j: Vec<u32>,
    #[arg(long, alias = "lambda", value_delimiter = ',', default_values_t = [0.0, 0.2, 0.8, 1.0])]
    pub lambdas: Vec<f64>,
    #[arg(long = "two-s", default_value_t = 1)]
    pub two_s: u32,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CorpusArgs {
    #[arg(long, default_value = "moyal", value_parser = parse_product)]
    pub product: ProductKind,
    #[arg(long = "d-values", value_delimiter = ',', default_values_t = [11, 21, 41, 81])]
    pub d_values: Vec<u32>,
    #[arg(long, default_value_t = 10)]
    pub pairs: usize,
    /// Band limit of the random corpus symbols.
    #[arg(long = "corpus-lmax", default_value_t = 4)]
    pub corpus_lmax: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct StarSlopesArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long = "max-order", default_value_t = 1)]
    pub max_order: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CalibrateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub corpus: CorpusArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GapArgs {
    #[arg(long, alias = "lambda", value_delimiter = ',', default_values_t = [0.0, 0.45, 0.495, 0.5, 0.505, 0.55, 1.0])]
    pub lambdas: Vec<f64>,
    /// Samples of theta over [0, pi].
    #[arg(long, default_value_t = 64)]
    pub thetas: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ChernArgs {
    #[arg(long = "two-s", value_delimiter = ',', default_values_t = [1, 2, 3])]
    pub two_s: Vec<u32>,
    #[arg(long, alias = "lambda", value_delimiter = ',', default_values_t = [0.2, 0.8])]
    pub lambdas: Vec<f64>,
    /// Closed grid sizes; more than one checks stability under refinement.
    #[arg(long, alias = "grids", value_delimiter = ',', default_values_t = [40, 80])]
    pub grid: Vec<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ObstructionArgs {
    #[arg(long, alias = "lambda", value_delimiter = ',', default_values_t = [0.8, 1.0])]
    pub lambdas: Vec<f64>,
    #[arg(long = "two-j", value_delimiter = ',', default_values_t = [2, 3, 4, 5, 6, 7, 8, 9, 10])]
    pub two_j: Vec<u32>,
    #[arg(long = "two-s", default_value_t = 1)]
    pub two_s: u32,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 0.2)]
    pub lambda: f64,
    #[arg(long = "two-s", default_value_t = 1)]
    pub two_s: u32,
    /// Bands by 2m; all bands when omitted.
    #[arg(long = "two-m", value_delimiter = ',', allow_negative_numbers = true)]
    pub two_m: Vec<i32>,
    #[arg(long = "d-values", value_delimiter = ',', default_values_t = [11, 21, 41, 81])]
    pub d_values: Vec<u32>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InvarianceArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub sweep: SweepArgs,
    #[arg(long, alias = "order", value_delimiter = ',', default_values_t = [0, 1])]
    pub orders: Vec<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BandsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub sweep: SweepArgs,
    #[arg(long, alias = "order", value_delimiter = ',', default_values_t = [0, 1])]
    pub orders: Vec<usize>,
    /// Route to h1: `star` or `closed-form`.
    #[arg(long, default_value = "star", value_parser = parse_path)]
    pub path: sphere_sapt::sapt::HPath,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Observable {
    N1,
    N2,
    N3,
}

impl Observable {
    pub fn axis(self) -> usize {
        match self {
            Self::N1 => 0,
            Self::N2 => 1,
            Self::N3 => 2,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EgorovArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub sweep: SweepArgs,
    #[arg(long, value_enum, default_value = "n1")]
    pub observable: Observable,
    /// Macroscopic end time.
    #[arg(long = "t", default_value_t = 1.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 1)]
    pub order: usize,
}
