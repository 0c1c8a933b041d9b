//! `metroq` command-line front end.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 usage error, 3 I/O error.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use metroq::{KrausChannel, StrategyKind};
use serde_json::json;

use crate::commands::config_echo;
use crate::report::Report;

const MAX_N: usize = 12;
const MAX_NU: u64 = 100_000;
const MAX_ROUNDS: usize = 1_000;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Compute(metroq::Error),
}

impl From<metroq::Error> for CliError {
    fn from(e: metroq::Error) -> Self {
        match e {
            metroq::Error::OutOfRange(msg) => CliError::Usage(msg),
            other => CliError::Compute(other),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Compute(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Compute(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "metroq", version, about = "Verify and simulate entanglement-assisted phase estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Base seed for every random draw.
    #[arg(long, env = "METROQ_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Text,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ChannelName {
    Dephasing,
    Bitphaseflip,
    Amplitudedamping,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum StrategyName {
    Sequential,
    Classical,
    Entangled,
}

impl StrategyName {
    fn kind(self) -> StrategyKind {
        match self {
            StrategyName::Sequential => StrategyKind::Sequential,
            StrategyName::Classical => StrategyKind::ClassicalParallel,
            StrategyName::Entangled => StrategyKind::EntangledParallel,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the conversion, counterexample and generalized-strategy certificates.
    Verify {
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(2..=MAX_N as u64))]
        n_max: u64,
        /// Scales every check's native threshold; 1e-12 reproduces the defaults.
        #[arg(long, default_value_t = 1e-12, value_parser = positive)]
        tolerance: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo RMSE scaling with the number of probes.
    Scaling {
        #[arg(long, value_enum, value_delimiter = ',', default_value = "sequential,classical,entangled")]
        strategies: Vec<StrategyName>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8", value_parser = probe_count)]
        n_values: Vec<usize>,
        #[arg(long, default_value_t = 4000, value_parser = clap::value_parser!(u64).range(1..=MAX_NU))]
        nu: u64,
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(2..=MAX_ROUNDS as u64))]
        rounds: u64,
        /// CSV destination.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Two-probe noise reduction for a named channel.
    Noise {
        #[arg(long, value_enum)]
        channel: ChannelName,
        #[arg(long, value_parser = probability)]
        p: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Optimal interrogation time and frequency bound under dephasing.
    Frequency {
        #[arg(long, value_parser = positive)]
        gamma: f64,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16", value_parser = clap::value_parser!(u64).range(1..=1_000_000))]
        n_values: Vec<u64>,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        nu: u64,
        #[command(flatten)]
        common: Common,
    },
    /// NOON and N0 fringe equivalence.
    Noon {
        #[arg(long, value_parser = probe_count)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Quantum and classical Fisher information with the Cramér-Rao bounds.
    Fisher {
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8", value_parser = probe_count)]
        n_values: Vec<usize>,
        #[arg(long, default_value_t = 4000, value_parser = clap::value_parser!(u64).range(1..=MAX_NU))]
        nu: u64,
        #[command(flatten)]
        common: Common,
    },
}

fn positive(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("{s} is not a positive finite number"))
    }
}

fn probability(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(format!("{s} is not in [0, 1]"))
    }
}

fn probe_count(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if (1..=MAX_N).contains(&n) {
        Ok(n)
    } else {
        Err(format!("{n} is outside 1..={MAX_N}"))
    }
}

fn run(command: Command) -> Result<(Report, Format), CliError> {
    let start = Instant::now();
    let (name, config, results, common) = match command {
        Command::Verify { n_max, tolerance, common } => {
            let cfg = config_echo(&[
                ("n_max", json!(n_max)),
                ("tolerance", json!(tolerance)),
                ("seed", json!(common.seed)),
            ]);
            let results = commands::verify(n_max as usize, tolerance, common.seed)?;
            ("verify", cfg, results, common)
        }
        Command::Scaling { strategies, n_values, nu, rounds, out, common } => {
            let mut distinct = n_values.clone();
            distinct.sort_unstable();
            distinct.dedup();
            if distinct.len() < 3 {
                return Err(CliError::Usage("--n-values needs at least 3 distinct values".into()));
            }
            let cfg = config_echo(&[
                ("strategies", json!(strategies.iter().map(|s| s.kind().tag()).collect::<Vec<_>>())),
                ("n_values", json!(n_values)),
                ("nu", json!(nu)),
                ("rounds", json!(rounds)),
                ("seed", json!(common.seed)),
                ("out", json!(out.as_ref().map(|p| p.display().to_string()))),
            ]);
            let kinds: Vec<_> = strategies.iter().map(|s| s.kind()).collect();
            let output = commands::scaling(&kinds, &n_values, nu, rounds as usize, common.seed)?;
            if let Some(path) = &out {
                commands::write_file(path, &output.csv)?;
            }
            ("scaling", cfg, output.records, common)
        }
        Command::Noise { channel, p, common } => {
            let (label, ch) = match channel {
                ChannelName::Dephasing => ("dephasing", KrausChannel::dephasing(p)?),
                ChannelName::Bitphaseflip => ("bitphaseflip", KrausChannel::bit_phase_flip(p)?),
                ChannelName::Amplitudedamping => {
                    ("amplitudedamping", KrausChannel::amplitude_damping(p)?)
                }
            };
            let cfg = config_echo(&[
                ("channel", json!(label)),
                ("p", json!(p)),
                ("seed", json!(common.seed)),
            ]);
            ("noise", cfg, commands::noise(&ch, label)?, common)
        }
        Command::Frequency { gamma, n_values, nu, common } => {
            let ns: Vec<usize> = n_values.iter().map(|&n| n as usize).collect();
            let cfg = config_echo(&[
                ("gamma", json!(gamma)),
                ("n_values", json!(ns)),
                ("nu", json!(nu)),
                ("seed", json!(common.seed)),
            ]);
            ("frequency", cfg, commands::frequency(gamma, &ns, nu)?, common)
        }
        Command::Noon { n, common } => {
            let cfg = config_echo(&[("n", json!(n)), ("seed", json!(common.seed))]);
            ("noon", cfg, commands::noon(n)?, common)
        }
        Command::Fisher { n_values, nu, common } => {
            let cfg = config_echo(&[
                ("n_values", json!(n_values)),
                ("nu", json!(nu)),
                ("seed", json!(common.seed)),
            ]);
            ("fisher", cfg, commands::fisher(&n_values, nu)?, common)
        }
    };
    let report = Report {
        command: name,
        config,
        results,
        wall_time_ms: start.elapsed().as_millis() as u64,
    };
    Ok((report, common.format))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((report, format)) => {
            match format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&report.to_json()).expect("report serializes")
                ),
                Format::Text => print!("{}", report.to_text()),
            }
            if report.pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
