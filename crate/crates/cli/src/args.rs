use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "rmt-infer",
    version,
    about = "Largest-eigenvalue inference for high-dimensional covariance problems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tracy-Widom distribution values.
    Tw(TwArgs),
    /// Largest-root test from a statistic or a data file.
    #[command(subcommand)]
    Test(TestCommand),
    /// Marcenko-Pastur density.
    Mp(MpArgs),
    /// Spiked-model predictions and eigenvector overlaps.
    Spike(SpikeArgs),
    /// Monte Carlo experiments.
    #[command(subcommand)]
    Simulate(SimulateCommand),
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("what").required(true).args(["cdf", "quantile", "table"])))]
pub struct TwArgs {
    /// 1 (real) or 2 (complex).
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub beta: u8,
    #[arg(long, allow_hyphen_values = true)]
    pub cdf: Option<f64>,
    #[arg(long, value_parser = open_probability)]
    pub quantile: Option<f64>,
    /// Print the tabulated grid as CSV (s, cdf, pdf).
    #[arg(long)]
    pub table: bool,
}

fn open_probability(s: &str) -> Result<f64, String> {
    let p: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if p > 0.0 && p < 1.0 {
        Ok(p)
    } else {
        Err(format!("{p} is not in (0, 1)"))
    }
}

#[derive(Debug, Args, Clone, Copy)]
#[command(group(ArgGroup::new("field").args(["real", "complex"])))]
pub struct FieldArgs {
    /// Real data (the default).
    #[arg(long)]
    pub real: bool,
    #[arg(long)]
    pub complex: bool,
}

#[derive(Debug, Args, Clone)]
pub struct DataFormat {
    /// Rows of the file are variables instead of observations.
    #[arg(long)]
    pub transpose: bool,
    /// The first line is a header.
    #[arg(long)]
    pub header: bool,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
}

#[derive(Debug, Subcommand)]
pub enum TestCommand {
    /// Single Wishart: largest eigenvalue of a sample covariance matrix.
    #[command(group(ArgGroup::new("input").required(true).args(["stat", "data"])))]
    Single {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        /// Top eigenvalue of S = X X^T / n.
        #[arg(long, allow_hyphen_values = true)]
        stat: Option<f64>,
        #[arg(long)]
        data: Option<PathBuf>,
        /// Skip mean removal (the data are known to have mean zero).
        #[arg(long)]
        no_center: bool,
        #[command(flatten)]
        format: DataFormat,
    },
    /// Double Wishart: largest root of det(x (A + B) - A) = 0.
    #[command(group(ArgGroup::new("input").required(true).args(["stat", "data"])))]
    Double {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        n1: Option<usize>,
        #[arg(long)]
        n2: Option<usize>,
        /// Largest root, in (0, 1).
        #[arg(long, allow_hyphen_values = true)]
        stat: Option<f64>,
        /// First block; the test is for independence of the two blocks.
        #[arg(long, requires = "data2")]
        data: Option<PathBuf>,
        #[arg(long, requires = "data")]
        data2: Option<PathBuf>,
        #[command(flatten)]
        format: DataFormat,
    },
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("what").required(true).args(["density", "table"])))]
pub struct MpArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub density: Option<f64>,
    /// Print N equally spaced points across the support as CSV.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(2..))]
    pub table: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SpikeArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: f64,
    /// Population spike, in units of the base variance.
    #[arg(
        long,
        required_unless_present = "overlap",
        conflicts_with = "overlap",
        allow_hyphen_values = true
    )]
    pub ell: Option<f64>,
    /// Sample size, for finite-n standard deviations.
    #[arg(long, conflicts_with = "overlap")]
    pub n: Option<usize>,
    /// Limiting eigenvector overlap instead of eigenvalue moments.
    #[arg(long, requires = "lambda")]
    pub overlap: bool,
    /// Spike excess over the base variance.
    #[arg(long, requires = "overlap", allow_hyphen_values = true)]
    pub lambda: Option<f64>,
}

#[derive(Debug, Args, Clone)]
pub struct SimCommon {
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Per-replicate CSV output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Do not remove sample means from the simulated data.
    #[arg(long)]
    pub no_center: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    SingleReal,
    DoubleReal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LoadingsArg {
    Matched,
    Random,
}

#[derive(Debug, Subcommand)]
pub enum SimulateCommand {
    /// Null distribution of the standardized largest root.
    LargestRoot {
        #[arg(long, value_enum)]
        case: CaseArg,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        n1: Option<usize>,
        #[arg(long)]
        n2: Option<usize>,
        #[command(flatten)]
        common: SimCommon,
    },
    /// Pooled null spectra against the Marcenko-Pastur law.
    Mp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: usize,
        #[command(flatten)]
        common: SimCommon,
    },
    /// Single spike with unit base variance and p = round(gamma n).
    Spike {
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long, allow_hyphen_values = true)]
        ell: f64,
        #[arg(long)]
        n: usize,
        /// Complex Gaussian data (eigenvectors are not tracked).
        #[arg(long)]
        complex: bool,
        #[command(flatten)]
        common: SimCommon,
    },
    /// Four-factor market model over a grid of p.
    Harding {
        #[arg(long = "T", default_value_t = 80)]
        t: usize,
        #[arg(long, default_value_t = 50)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        no_center: bool,
        #[arg(long, default_value_t = 50)]
        p_min: usize,
        #[arg(long, default_value_t = 200)]
        p_max: usize,
        #[arg(long, default_value_t = 25)]
        p_step: usize,
        #[arg(long = "beta", default_value_t = 0.6)]
        beta_f: f64,
        #[arg(long, default_value_t = 0.4)]
        sigma_b: f64,
        #[arg(long, default_value_t = 0.01257)]
        sigma_f: f64,
        #[arg(long, default_value_t = 0.0671)]
        sigma_e: f64,
        #[arg(long, value_enum, default_value_t = LoadingsArg::Matched)]
        loadings: LoadingsArg,
    },
}
