use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "plp", version, about = "Parabolic Littlewood-Paley norms, extensions and inequality checks")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Samples per axis, time last (e.g. 256x256).
    #[arg(long, global = true, value_name = "NxM[xK...]")]
    pub grid: Option<String>,
    /// Box side lengths; one value applies to every axis.
    #[arg(long = "box", global = true, value_name = "L[xL...]")]
    pub box_lengths: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub aniso: Option<Aniso>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON file with sections grid, family, sampler, inequality, tolerances.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Aniso {
    Parabolic,
    Isotropic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one norm of a field.
    Norm(NormArgs),
    /// Write the Littlewood-Paley blocks of a field, one file per scale.
    Decompose(DecomposeArgs),
    /// Extend a field on Ω_T and optionally localize it.
    Extend(ExtendArgs),
    /// Run an inequality check (or `all`).
    Verify(VerifyArgs),
    /// Resolution or dilation sweep of a fitted constant.
    Sweep(SweepArgs),
}

/// Where the input field comes from: a field file, or one member of the
/// configured family.
#[derive(Debug, Args)]
pub struct Source {
    /// Field header written by this tool.
    #[arg(long, value_name = "HEADER")]
    pub input: Option<PathBuf>,
    /// Family member used when no input file is given.
    #[arg(long, default_value_t = 0)]
    pub sample: usize,
    /// `g`, or a gradient component index.
    #[arg(long, default_value = "g")]
    pub component: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormName {
    Lp,
    Linf,
    Sobolev,
    Bmo,
    BarBmo,
    Besov,
    Triebel,
    TriebelInfty,
    Fplus,
    Fminus,
    Hs,
    Holder,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, value_enum)]
    pub norm: Option<NormName>,
    /// Norm as JSON, e.g. '{"space":"besov","s":0.5,"p":"inf","q":"inf"}'.
    #[arg(long, conflicts_with = "norm")]
    pub spec: Option<String>,
    #[arg(long, default_value = "2")]
    pub p: String,
    #[arg(long, default_value = "2")]
    pub q: String,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub s: f64,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    #[arg(long, value_enum, default_value_t = Mode::Homogeneous)]
    pub mode: Mode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Homogeneous,
    Inhomogeneous,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, value_enum, default_value_t = Mode::Homogeneous)]
    pub mode: Mode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    /// `f̃` on the extended box.
    Extended,
    /// `Ψf̃` on the periodic box.
    Localized,
    /// The antiderivative `g` of `Ψf̃`.
    Antiderivative,
}

#[derive(Debug, Args)]
pub struct ExtendArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long)]
    pub m: Option<usize>,
    /// Antiderivative axis.
    #[arg(long, default_value_t = 0)]
    pub axis: usize,
    #[arg(long, value_enum, default_value_t = Emit::Extended)]
    pub emit: Emit,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Inequality id, or `all`.
    pub id: String,
    /// Family size override.
    #[arg(long)]
    pub count: Option<usize>,
    /// Skip resolution, dilation and held-out sweeps.
    #[arg(long)]
    pub no_sweeps: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    Resolution,
    Dilation,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value_t = SweepKind::Resolution)]
    pub kind: SweepKind,
    /// Inequality id; the configured one when absent.
    #[arg(long)]
    pub id: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub factor: usize,
    #[arg(long)]
    pub count: Option<usize>,
}
