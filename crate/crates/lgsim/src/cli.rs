//! Command-line grammar. Every option is optional here; defaults are applied
//! after merging with the config file so that flags beat config beats
//! built-in values.

use crate::record::{Format, SchemeName};
use crate::units::{parse_quantity, parse_theta, Unit};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lgsim_core::noise::Averaging;
use lgsim_core::nv::NuclearLevel;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "lgsim",
    version,
    about = "Leggett-Garg tests on an NV-center qutrit"
)]
pub struct Cli {
    /// TOML file with default parameters; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// RNG seed. Falls back to the config file, then LGSIM_SEED, then entropy.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the result here instead of stdout.
    #[arg(short, long, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ideal correlators, Kn and (optionally) the maximum over θ.
    Ideal(IdealArgs),
    /// The four INRM variants on the six-level NV model, assembled into K3.
    Nv(NvArgs),
    /// Synthetic calibration experiments.
    #[command(subcommand)]
    Characterize(Characterize),
    /// Recompute every headline number next to its published value.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Subcommand)]
pub enum Characterize {
    /// MW frequency sweep of the ancilla, optionally after a controlled gate.
    Odmr(OdmrArgs),
    /// Flip probability from k repeated controlled gates.
    CgRepeat(CgRepeatArgs),
    /// Ramsey free-induction decay and a fit of T2*.
    Fid(FidArgs),
}

fn theta(s: &str) -> Result<f64, String> {
    parse_theta(s)
}

fn seconds(s: &str) -> Result<f64, String> {
    parse_quantity(s, Unit::Seconds)
}

fn hertz(s: &str) -> Result<f64, String> {
    parse_quantity(s, Unit::Hertz)
}

/// `T2*` as a duration, or `none` to switch dephasing off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct T2Star(pub Option<f64>);

pub fn t2_star(s: &str) -> Result<T2Star, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "none" | "off" | "inf" => Ok(T2Star(None)),
        _ => seconds(s).map(|t| T2Star(Some(t))),
    }
}

#[derive(Debug, Args)]
pub struct IdealArgs {
    /// Evolution angle, e.g. `0.416pi` or radians.
    #[arg(long, value_parser = theta, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeName>,
    /// 3 for the spin-1 qutrit, 2 for the qubit.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Number of measurement times in the Kn string.
    #[arg(long)]
    pub n: Option<usize>,
    /// Also locate the maximum of K3 over θ ∈ [0, π].
    #[arg(long)]
    pub sweep: bool,
    /// Grid intervals for the sweep before refinement.
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Nominal,
    Ideal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DriveKind {
    Instantaneous,
    Finite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AveragingName {
    MonteCarlo,
    GaussHermite,
}

impl From<AveragingName> for Averaging {
    fn from(a: AveragingName) -> Self {
        match a {
            AveragingName::MonteCarlo => Averaging::MonteCarlo,
            AveragingName::GaussHermite => Averaging::GaussHermite,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Plus,
    Zero,
    Minus,
}

impl From<Level> for NuclearLevel {
    fn from(l: Level) -> Self {
        match l {
            Level::Plus => NuclearLevel::Plus,
            Level::Zero => NuclearLevel::Zero,
            Level::Minus => NuclearLevel::Minus,
        }
    }
}

/// Imperfection overrides shared by `nv`, `characterize fid` and `reproduce`.
#[derive(Debug, Args)]
pub struct ImperfectionArgs {
    /// Starting point before individual overrides.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Electron dephasing time (`62us`), or `none`.
    #[arg(long = "t2star", value_parser = t2_star)]
    pub t2_star: Option<T2Star>,
    /// Electron polarization into |0⟩e.
    #[arg(long)]
    pub pol_e: Option<f64>,
    /// Nuclear polarization into |+1⟩n.
    #[arg(long)]
    pub pol_n: Option<f64>,
    /// Controlled-gate flip probability.
    #[arg(long = "p")]
    pub flip_prob_p: Option<f64>,
    /// Dephasing samples (Monte-Carlo draws or Gauss-Hermite nodes).
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, value_enum)]
    pub averaging: Option<AveragingName>,
}

/// Pulse settings for the finite-duration drive.
#[derive(Debug, Args)]
pub struct DriveArgs {
    #[arg(long, value_enum)]
    pub drive: Option<DriveKind>,
    /// Nuclear Rabi frequency (`20kHz`).
    #[arg(long, value_parser = hertz)]
    pub f_rabi: Option<f64>,
    /// Selective MW π-pulse length; overrides --sync-order.
    #[arg(long, value_parser = seconds)]
    pub cg_pi_duration: Option<f64>,
    /// Choose the π-pulse so the neighbouring line is refocused after k cycles.
    #[arg(long)]
    pub sync_order: Option<u32>,
}

#[derive(Debug, Args)]
pub struct NvArgs {
    #[arg(long, value_parser = theta, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[command(flatten)]
    pub imperfections: ImperfectionArgs,
    #[command(flatten)]
    pub drive: DriveArgs,
}

#[derive(Debug, Default, Args)]
pub struct OdmrArgs {
    /// Apply a controlled gate with this flip probability before the sweep.
    #[arg(long = "p")]
    pub flip_prob_p: Option<f64>,
    /// Nuclear level left untouched by the controlled gate.
    #[arg(long, value_enum)]
    pub protected: Option<Level>,
    #[arg(long, value_parser = hertz)]
    pub start: Option<f64>,
    #[arg(long, value_parser = hertz)]
    pub stop: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Probe π-pulse length.
    #[arg(long, value_parser = seconds)]
    pub pi_duration: Option<f64>,
}

#[derive(Debug, Default, Args)]
pub struct CgRepeatArgs {
    #[arg(long = "p")]
    pub flip_prob_p: Option<f64>,
    #[arg(long)]
    pub kmax: Option<usize>,
    /// Standard deviation of the additive readout noise.
    #[arg(long)]
    pub noise: Option<f64>,
}

#[derive(Debug, Default, Args)]
pub struct FidArgs {
    #[arg(long = "t2star", value_parser = seconds)]
    pub t2_star: Option<f64>,
    /// Reference detuning of the Ramsey sequence.
    #[arg(long, value_parser = hertz)]
    pub delta_ref: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Longest free-evolution time.
    #[arg(long, value_parser = seconds)]
    pub span: Option<f64>,
    #[arg(long)]
    pub noise: Option<f64>,
    /// Dephasing samples.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, value_enum)]
    pub averaging: Option<AveragingName>,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[command(flatten)]
    pub imperfections: ImperfectionArgs,
    #[command(flatten)]
    pub drive: DriveArgs,
}
