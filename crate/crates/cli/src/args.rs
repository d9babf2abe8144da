use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "lapq",
    version,
    about = "Two-level Laplacian quantizer with extended Huffman block coding"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Design the quantizer for a target SQNR or distortion.
    Design(DesignArgs),
    /// Analytic design table over an SQNR grid, as CSV.
    Table(TableArgs),
    /// Entropy and rate versus distortion, as CSV.
    Curve(CurveArgs),
    /// Quantize and encode a raw little-endian f64 file into a LAPQ container.
    Encode(EncodeArgs),
    /// Decode a LAPQ container into a raw little-endian f64 file.
    Decode(DecodeArgs),
    /// Monte Carlo check of one design point, as JSON.
    Simulate(SimulateArgs),
    /// Write unit-variance Laplacian samples as raw little-endian f64.
    Sample(SampleArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "target")]
pub struct Target {
    /// Target SQNR in dB.
    #[arg(long, allow_negative_numbers = true)]
    pub sqnr: Option<f64>,
    /// Target mean squared error.
    #[arg(long, allow_negative_numbers = true)]
    pub distortion: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    #[command(flatten)]
    pub target: Target,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// SQNR grid in dB, start:step:stop (stop inclusive).
    #[arg(long, default_value = "2.0:0.1:3.0", allow_hyphen_values = true)]
    pub grid: String,
    /// Comma-separated block sizes.
    #[arg(long, default_value = "2,3,4,5")]
    pub blocks: String,
    /// Output path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// Distortion grid, start:step:stop (stop inclusive). Defaults to 101
    /// points over [0.5, 0.631].
    #[arg(long, allow_hyphen_values = true)]
    pub dgrid: Option<String>,
    /// Comma-separated block sizes.
    #[arg(long, default_value = "2,3")]
    pub blocks: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    pub sqnr: f64,
    #[arg(long)]
    pub block: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub sqnr: f64,
    #[arg(long, default_value = "2,3,4,5")]
    pub blocks: String,
    #[arg(long, default_value_t = lapq::sim::DEFAULT_SAMPLES)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, default_value_t = lapq::sim::DEFAULT_SAMPLES)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}
