//! Command-line front end: every subcommand turns a validated config into a
//! [`SweepTable`] and writes it as CSV or JSON.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use bec_optomech::par::Parallelism;
use bec_optomech::params::{apply_overrides, parse_config, validate_params};
use bec_optomech::table::{Format, SweepTable};
use bec_optomech::{Error, SystemParams};
use clap::{Args, Parser, Subcommand, ValueEnum};

pub mod commands;

#[derive(Debug, Parser)]
#[command(
    name = "optomech",
    version,
    about = "Steady states and excitation spectra of a BEC in a driven cavity"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Band-model steady states, |γ0|² and optomechanical frequency vs δ_C.
    BandSweep(BandSweepArgs),
    /// Bogoliubov bands over q ∈ [−1, 1] plus the q = 0 polariton.
    BandStructure(BandStructureArgs),
    /// Effective radiation-pressure model: cubic roots, threshold, window.
    Effective(SweepArgs),
    /// Trapped ground state profile at the configured detuning.
    TrappedGround(TrappedGroundArgs),
    /// Warm-started trapped steady states vs δ_C.
    TrappedSweep(TrappedSweepArgs),
    /// Trapped excitation spectrum along a warm-started sweep.
    TrappedSpectrum(TrappedSpectrumArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Parameter file with one `key = value` per line.
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Parameter override, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Worker threads: 1 sequential, 0 all cores.
    #[arg(long, value_name = "N", default_value_t = 1)]
    pub parallel: usize,
    /// Leave the timestamp out of the header.
    #[arg(long)]
    pub no_timestamp: bool,
}

#[derive(Debug, Clone, Args)]
pub struct DetuningGrid {
    #[arg(long, allow_negative_numbers = true)]
    pub delta_c_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta_c_max: Option<f64>,
    #[arg(long)]
    pub delta_c_steps: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub grid: DetuningGrid,
}

#[derive(Debug, Clone, Args)]
pub struct BandSweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub grid: DetuningGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchChoice {
    Lower,
    Middle,
    Upper,
}

#[derive(Debug, Clone, Args)]
pub struct BandStructureArgs {
    #[command(flatten)]
    pub common: Common,
    /// Number of quasimomenta on [−1, 1].
    #[arg(long, default_value_t = 101)]
    pub q_steps: usize,
    /// Steady state to expand around when several coexist.
    #[arg(long, value_enum, default_value_t = BranchChoice::Upper)]
    pub branch: BranchChoice,
}

#[derive(Debug, Clone, Args)]
pub struct TrappedGroundArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 1000)]
    pub grid_points: usize,
    /// Also write the envelopes e(x) and f(x).
    #[arg(long)]
    pub envelope: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepDirection {
    Up,
    Down,
}

#[derive(Debug, Clone, Args)]
pub struct TrappedSweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub grid: DetuningGrid,
    #[arg(long, default_value_t = 1000)]
    pub grid_points: usize,
    #[arg(long, value_enum, default_value_t = SweepDirection::Up)]
    pub direction: SweepDirection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ParityChoice {
    Even,
    Odd,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct TrappedSpectrumArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub grid: DetuningGrid,
    #[arg(long, default_value_t = 1000)]
    pub grid_points: usize,
    /// Down follows the upper branch through the bistable region.
    #[arg(long, value_enum, default_value_t = SweepDirection::Down)]
    pub direction: SweepDirection,
    #[arg(long, value_enum, default_value_t = ParityChoice::Even)]
    pub parity: ParityChoice,
    /// Modes above this Re ω are dropped from the output.
    #[arg(long, default_value_t = 25.0)]
    pub max_frequency: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Json => Format::Json,
        }
    }
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Bad input: exit code 2.
    Usage(String),
    /// Solver or I/O failure: exit code 1.
    Runtime(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Runtime(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. }
            | Error::MissingKey(_)
            | Error::UnknownKey(_)
            | Error::DuplicateKey(_)
            | Error::NonFinite { .. }
            | Error::InvalidValue(_)
            | Error::AmbiguousDetuning
            | Error::InvalidGrid(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

pub fn load_params(common: &Common) -> Result<SystemParams, Failure> {
    let text = std::fs::read_to_string(&common.config)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", common.config.display())))?;
    let mut raw = parse_config(&text)?;
    apply_overrides(&mut raw, common.overrides.iter().map(String::as_str))?;
    Ok(validate_params(&raw)?)
}

pub fn parallelism(common: &Common) -> Parallelism {
    Parallelism::from_thread_count(common.parallel)
}

/// Evenly spaced grid including both ends; a single step gives `[min]`.
pub fn linspace(min: f64, max: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![min],
        n => {
            let h = (max - min) / (n - 1) as f64;
            (0..n)
                .map(|k| if k == n - 1 { max } else { min + h * k as f64 })
                .collect()
        }
    }
}

impl DetuningGrid {
    pub fn resolve(&self, default: (f64, f64, usize)) -> Result<Vec<f64>, Failure> {
        let min = self.delta_c_min.unwrap_or(default.0);
        let max = self.delta_c_max.unwrap_or(default.1);
        let steps = self.delta_c_steps.unwrap_or(default.2);
        if !(min.is_finite() && max.is_finite()) || min > max {
            return Err(Failure::Usage(format!(
                "invalid detuning range [{min}, {max}]"
            )));
        }
        Ok(linspace(min, max, steps))
    }
}

fn write_output(table: &mut SweepTable, common: &Common, default: Format) -> Result<(), Failure> {
    if !common.no_timestamp {
        table.provenance.timestamp =
            Some(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
    }
    let format = common.format.map(Format::from).unwrap_or(default);
    let text = table.render(format)?;
    match &common.out {
        Some(path) => write_file(path, &text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Runtime(e.to_string())),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    let (mut table, common, default) = match &cli.command {
        Command::BandSweep(a) => (commands::band_sweep(a)?, &a.common, Format::Csv),
        Command::BandStructure(a) => (commands::band_structure(a)?, &a.common, Format::Csv),
        Command::Effective(a) => (commands::effective(a)?, &a.common, Format::Json),
        Command::TrappedGround(a) => (commands::trapped_ground(a)?, &a.common, Format::Csv),
        Command::TrappedSweep(a) => (commands::trapped_sweep(a)?, &a.common, Format::Csv),
        Command::TrappedSpectrum(a) => (commands::trapped_spectrum(a)?, &a.common, Format::Csv),
    };
    write_output(&mut table, common, default)
}
