//! Command-line front end: argument parsing, run configuration and the
//! report-producing commands.

pub mod commands;
pub mod report;

use std::fmt;

use clap::{Parser, Subcommand, ValueEnum};
use matmaps::commutator::CommutatorError;
use matmaps::gf::GfError;
use matmaps::mat::{MatError, Matrix2};
use matmaps::oracle::{Mode, OracleError, SweepOptions, DEFAULT_SAMPLES, EXHAUSTIVE_MAX_Q};
use matmaps::waring::WaringError;
use matmaps::{make_field, FieldSpec};
use serde::Serialize;
use thiserror::Error;

pub use report::{Report, Status, VerificationReport};

/// The JSON schema every `--output json` report validates against.
pub const REPORT_SCHEMA: &str = include_str!("../../../report.schema.json");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Matrix(#[from] MatError),
    #[error(transparent)]
    Waring(#[from] WaringError),
    #[error(transparent)]
    Commutator(#[from] CommutatorError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("output: {0}")]
    Io(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeArg {
    /// Exhaustive when q <= 9, sampled otherwise.
    Auto,
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MapArg {
    PowerSum,
    Commutator,
}

#[derive(Debug, Parser)]
#[command(name = "matmaps", version, about = "Images of A x^k1 + B y^k2 and A x y - B y x on 2x2 matrices over F_q")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub args: Args,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Predict the image of a map from its constants.
    Classify,
    /// Find X, Y with A X^k1 + B Y^k2 = C, or show none exist.
    Solve,
    /// Enumerate an image and compare it with the prediction.
    Image,
    /// Check every row of the table of power-sum images against the oracle.
    VerifyTable,
    /// Certify that commutator images are subspaces and match predictions.
    VerifyCommutator,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Solve => "solve",
            Command::Image => "image",
            Command::VerifyTable => "verify-table",
            Command::VerifyCommutator => "verify-commutator",
        }
    }
}

#[derive(Debug, Clone, clap::Args)]
pub struct Args {
    /// Field characteristic.
    #[arg(long, global = true, default_value_t = 3)]
    pub p: u32,
    /// Field degree over F_p (1 or 2).
    #[arg(long, global = true, default_value_t = 1)]
    pub deg: u32,
    #[arg(long, global = true, default_value_t = 1)]
    pub k1: u64,
    #[arg(long, global = true, default_value_t = 1)]
    pub k2: u64,
    /// Constant A, e.g. "[[1,0],[0,0]]".
    #[arg(long = "A", global = true)]
    pub a: Option<String>,
    /// Constant B.
    #[arg(long = "B", global = true)]
    pub b: Option<String>,
    /// Target matrix for `solve`.
    #[arg(long = "C", global = true)]
    pub c: Option<String>,
    /// Which map `classify` and `image` act on.
    #[arg(long, global = true, value_enum, default_value_t = MapArg::PowerSum)]
    pub map: MapArg,
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,
    /// Random pairs per image in sampled mode.
    #[arg(long, global = true, default_value_t = DEFAULT_SAMPLES)]
    pub samples: u64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for enumeration (default: available cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Instances per table row.
    #[arg(long, global = true, default_value_t = 5)]
    pub instances: usize,
    /// Seeded random pairs swept by `verify-commutator`.
    #[arg(long, global = true, default_value_t = 1000)]
    pub pairs: usize,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Pretty)]
    pub output: OutputFormat,
    /// Omit wall-clock times, making reports byte-for-byte reproducible.
    #[arg(long, global = true)]
    pub no_timing: bool,
}

/// Validated run parameters, echoed in every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub field: FieldSpec,
    pub k1: u64,
    pub k2: u64,
    pub mode: ModeName,
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub instances: usize,
    pub pairs: usize,
    pub output: OutputFormat,
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    Exhaustive,
    Sampled,
}

impl fmt::Display for ModeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModeName::Exhaustive => "exhaustive",
            ModeName::Sampled => "sampled",
        })
    }
}

impl RunConfig {
    pub fn from_args(args: &Args) -> Result<RunConfig, CliError> {
        let field = make_field(args.p, args.deg)?;
        if args.k1 == 0 || args.k2 == 0 {
            return Err(CliError::Usage("--k1 and --k2 must be positive".into()));
        }
        let mode = match args.mode {
            ModeArg::Auto if field.q() <= EXHAUSTIVE_MAX_Q => ModeName::Exhaustive,
            ModeArg::Auto | ModeArg::Sampled => ModeName::Sampled,
            ModeArg::Exhaustive => {
                if field.q() > EXHAUSTIVE_MAX_Q {
                    return Err(OracleError::TooLarge(field).into());
                }
                ModeName::Exhaustive
            }
        };
        if mode == ModeName::Sampled && args.samples == 0 {
            return Err(CliError::Usage("--samples must be positive".into()));
        }
        let workers = match args.workers {
            Some(0) => return Err(CliError::Usage("--workers must be positive".into())),
            Some(w) => w,
            None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        };
        Ok(RunConfig {
            field,
            k1: args.k1,
            k2: args.k2,
            mode,
            samples: args.samples,
            seed: args.seed,
            workers,
            instances: args.instances,
            pairs: args.pairs,
            output: args.output,
            timing: !args.no_timing,
        })
    }

    pub fn sweep(&self) -> SweepOptions {
        match self.mode {
            ModeName::Exhaustive => SweepOptions::exhaustive(self.workers),
            ModeName::Sampled => SweepOptions::sampled(self.seed, self.samples, self.workers),
        }
    }

    pub fn oracle_mode(&self) -> Mode {
        self.sweep().mode
    }

    pub fn parse_matrix(&self, flag: &str, value: Option<&String>) -> Result<Matrix2, CliError> {
        let s = value.ok_or_else(|| CliError::Usage(format!("--{flag} is required")))?;
        Ok(Matrix2::parse(s, self.field)?)
    }
}

/// Parses arguments, runs the command and returns its report.
pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let config = RunConfig::from_args(&cli.args)?;
    let started = std::time::Instant::now();
    let mut report = match cli.command {
        Command::Classify => commands::classify(&config, &cli.args)?,
        Command::Solve => commands::solve(&config, &cli.args)?,
        Command::Image => commands::image(&config, &cli.args)?,
        Command::VerifyTable => commands::verify_table(&config)?,
        Command::VerifyCommutator => commands::verify_commutator(&config, &cli.args)?,
    };
    if config.timing {
        report.summary.wall_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("matmaps").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn config_defaults() {
        let cli = parse(&["verify-table"]);
        let c = RunConfig::from_args(&cli.args).unwrap();
        assert_eq!(c.field.q(), 3);
        assert_eq!((c.k1, c.k2, c.seed), (1, 1, 0));
        assert_eq!(c.mode, ModeName::Exhaustive);
        assert!(c.workers >= 1);
        assert!(c.timing);
    }

    #[test]
    fn auto_mode_switches_to_sampling() {
        let cli = parse(&["image", "--p", "11", "--deg", "2"]);
        assert_eq!(RunConfig::from_args(&cli.args).unwrap().mode, ModeName::Sampled);
        let cli = parse(&["image", "--p", "11", "--mode", "exhaustive"]);
        assert!(matches!(RunConfig::from_args(&cli.args), Err(CliError::Oracle(_))));
    }

    #[test]
    fn rejects_bad_fields_and_exponents() {
        assert!(RunConfig::from_args(&parse(&["classify", "--p", "13"]).args).is_err());
        assert!(RunConfig::from_args(&parse(&["classify", "--deg", "3"]).args).is_err());
        assert!(RunConfig::from_args(&parse(&["classify", "--k2", "0"]).args).is_err());
    }

    #[test]
    fn flags_after_subcommand() {
        let cli = parse(&["solve", "--A", "[[1,0],[0,1]]", "--C", "[[0,0],[0,0]]", "--no-timing"]);
        assert_eq!(cli.command, Command::Solve);
        assert_eq!(cli.args.a.as_deref(), Some("[[1,0],[0,1]]"));
        assert!(cli.args.no_timing);
    }

    #[test]
    fn schema_is_valid_json() {
        let v: serde_json::Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
        assert_eq!(v["properties"]["schema_version"]["const"], report::SCHEMA_VERSION);
    }
}
