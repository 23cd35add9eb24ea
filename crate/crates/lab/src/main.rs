use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use mulop::formats::SpaceSpec;
use mulop::names::{MultiplierSpec, OperatorSpec};
use mulop::scenarios::{self, FailureReport, SCHEMA};
use mulop::{LabError, EXIT_CONFIG, EXIT_OK, EXIT_VERDICT};

/// Multiplication operators on discretized L_p spaces: flats, level bands,
/// commutant checks, witness sequences and compact-domination decay.
#[derive(Parser)]
#[command(name = "mulop", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Atom count (`4096`), grid (`32x32`) or a JSON space descriptor.
    #[arg(long, default_value = "1024")]
    space: String,
    /// Grid size `NXxNY`; overrides --space.
    #[arg(long)]
    grid: Option<String>,
    /// Directory for report.json and CSV by-products.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn space(&self) -> Result<SpaceSpec, LabError> {
        match &self.grid {
            Some(g) => match SpaceSpec::parse(g)? {
                spec @ SpaceSpec::Grid { .. } => Ok(spec),
                SpaceSpec::Interval { .. } => Err(LabError::Config(format!("--grid expects NXxNY, got {g:?}"))),
            },
            None => SpaceSpec::parse(&self.space),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Flats, level bands and the rank-one flat projection of a multiplier.
    Analyze {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "identity")]
        multiplier: String,
        /// Smallest flat measure.
        #[arg(long, default_value_t = 0.01)]
        theta: f64,
        /// Largest value spread inside a flat.
        #[arg(long, default_value_t = 0.0)]
        tau: f64,
        /// Number of level bands to enumerate.
        #[arg(long, default_value_t = 4)]
        bands: usize,
    },
    /// Disjoint witness sequence for an operator dominated by the commutant.
    Witness {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "identity")]
        multiplier: String,
        /// identity | scaled-multiplier | averaging | reversal
        #[arg(long, default_value = "identity")]
        operator: String,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long)]
        steps: Option<usize>,
        /// Halt on flats of at least this measure.
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        tau: f64,
    },
    /// Row averaging against the y coordinate on a grid.
    CommutantCheck {
        #[arg(long, default_value = "32x32")]
        grid: String,
        #[arg(long, default_value_t = 20)]
        alphas: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Norm decay of a Gaussian kernel on disjoint dyadic indicators.
    CompactDecay {
        #[arg(long, default_value_t = 4096)]
        n: usize,
        #[arg(long, default_value_t = 0.02)]
        width: f64,
        #[arg(long, default_value_t = 64)]
        terms: usize,
        #[arg(long, default_value_t = 8)]
        per_octave: usize,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 0.25)]
        decay_factor: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Analyze { .. } => "analyze",
            Command::Witness { .. } => "witness",
            Command::CommutantCheck { .. } => "commutant-check",
            Command::CompactDecay { .. } => "compact-decay",
        }
    }
}

fn emit<T: Serialize>(report: &T, out: Option<&Path>, extra: Option<(&str, &str)>) -> Result<(), LabError> {
    let json = serde_json::to_string_pretty(report)?;
    print_stdout(&json);
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), format!("{json}\n"))?;
        if let Some((name, text)) = extra {
            std::fs::write(dir.join(name), text)?;
        }
    }
    Ok(())
}

// a closed pipe (`mulop ... | head`) is not an error
fn print_stdout(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn verdict(pass: bool) -> u8 {
    if pass {
        EXIT_OK
    } else {
        EXIT_VERDICT
    }
}

fn run(command: Command) -> Result<u8, LabError> {
    match command {
        Command::Analyze { common, multiplier, theta, tau, bands } => {
            let args = scenarios::AnalyzeArgs {
                space: common.space()?,
                multiplier: multiplier.parse::<MultiplierSpec>()?,
                theta,
                tau,
                bands,
            };
            let report = scenarios::analyze(&args)?;
            emit(&report, common.out.as_deref(), None)?;
            Ok(verdict(report.pass))
        }
        Command::Witness { common, multiplier, operator, p, steps, theta, tau } => {
            let args = scenarios::WitnessArgs {
                space: common.space()?,
                multiplier: multiplier.parse()?,
                operator: operator.parse::<OperatorSpec>()?,
                p,
                config: scenarios::witness_config(steps, theta, tau),
            };
            let (report, csv) = scenarios::witness(&args)?;
            emit(&report, common.out.as_deref(), Some(("trace.csv", &csv)))?;
            Ok(verdict(report.pass))
        }
        Command::CommutantCheck { grid, alphas, seed, out } => {
            let SpaceSpec::Grid { nx, ny } = SpaceSpec::parse(&grid)? else {
                return Err(LabError::Config(format!("--grid expects NXxNY, got {grid:?}")));
            };
            let report = scenarios::commutant_check(&scenarios::CommutantArgs { nx, ny, alphas, seed })?;
            emit(&report, out.as_deref(), None)?;
            Ok(verdict(report.pass))
        }
        Command::CompactDecay { n, width, terms, per_octave, p, decay_factor, out } => {
            let args = scenarios::DecayArgs { n, width, terms, per_octave, p, decay_factor, ..Default::default() };
            let (report, csv) = scenarios::compact_decay(&args)?;
            emit(&report, out.as_deref(), Some(("decay.csv", &csv)))?;
            Ok(verdict(report.pass))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            let report = FailureReport { schema: SCHEMA, command: name.to_string(), error: (&err).into() };
            print_stdout(&serde_json::to_string_pretty(&report).unwrap_or_default());
            eprintln!("mulop {name}: {err}");
            let code = err.exit_code();
            ExitCode::from(if code == EXIT_OK { EXIT_CONFIG } else { code })
        }
    }
}
