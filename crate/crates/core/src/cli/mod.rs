//! Command-line front end.
//!
//! Every command writes its table or report to `--output` (stdout when
//! absent). Failures print one JSON record `{code, message, context}` on
//! stderr and exit nonzero. Rates and γ are always read in nats; `--bits`
//! only changes how γ/rate columns are reported.

pub mod commands;
pub mod fixtures;
pub mod lemma;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::{Error, Result};
use fixtures::FixtureKind;

#[derive(Parser, Clone, Debug)]
#[command(name = "entcost", version, about = "Entanglement cost toolkit: spectral rates, E_F search, dilution simulation")]
pub struct ExperimentConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Clone, Debug, Default)]
pub struct IoArgs {
    /// JSON state file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Destination file; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Master seed; every random component derives its own seed from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report γ and rate columns in bits.
    #[arg(long)]
    pub bits: bool,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Clone, Debug)]
pub struct GridArgs {
    #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
    pub gamma_min: f64,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub gamma_max: f64,
    #[arg(long, default_value_t = 0.01)]
    pub gamma_step: f64,
}

impl Default for GridArgs {
    fn default() -> Self {
        Self {
            gamma_min: -2.0,
            gamma_max: 2.0,
            gamma_step: 0.01,
        }
    }
}

#[derive(Args, Clone, Debug)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    /// Ensemble size searched over (default depends on the command).
    #[arg(long)]
    pub members: Option<usize>,
    #[arg(long, default_value_t = 500)]
    pub max_sweeps: usize,
}

impl Default for SearchArgs {
    fn default() -> Self {
        Self {
            restarts: 20,
            members: None,
            max_sweeps: 500,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Divergence,
    Conditional,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    OrthogonalFlag,
    WeylTeleport,
    Both,
}

#[derive(Subcommand, Clone, Debug)]
pub enum Command {
    /// Random-draw checks of the two projection inequalities.
    LemmaCheck {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, default_value_t = 1000)]
        draws: usize,
        #[arg(long, default_value_t = 16)]
        max_dim: usize,
        /// Run only lemma 1 or 2.
        #[arg(long)]
        lemma: Option<u8>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        n: Vec<usize>,
    },
    /// Sweep `Tr[{Π(γ) >= 0} Π(γ)]` over γ and report crossing estimates.
    SpectralRate {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Second state ω; selects the divergence pair `(ρ^⊗n, ω^⊗n)`.
        /// Without it the input is read as an ensemble and its cq-extension
        /// is swept.
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Also write the crossing estimates as JSON here.
        #[arg(long)]
        estimates: Option<PathBuf>,
    },
    /// Entanglement of formation by decomposition search.
    Eof {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// `E_F(ρ^⊗n)/n` for `n = 1..=max(--n)`.
    EofReg {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, value_delimiter = ',', default_value = "2")]
        n: Vec<usize>,
    },
    /// Simulate the dilution protocol on the n-fold product of the input.
    DilutionSim {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        n: Vec<usize>,
        /// Rates in nats; `M = ceil(e^{nR})`.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        rates: Vec<f64>,
        /// Resource ranks, used instead of `--rates`. All feasible ranks when
        /// neither is given.
        #[arg(long, value_delimiter = ',')]
        rank: Vec<usize>,
        #[arg(long, value_enum, default_value = "both")]
        variant: VariantArg,
    },
    /// Exact `F²(n, R)` for i.i.d. targets from tensor-power spectra.
    DilutionCurve {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        rates: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "4,8,16,24")]
        n: Vec<usize>,
    },
    /// Weak-converse bound on the γ grid against the exact `F²`.
    Converse {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        rates: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "4,8,16,24")]
        n: Vec<usize>,
    },
    /// Finite-n cost proxy: half crossing of the conditional spectrum,
    /// minimized over decompositions.
    CostProxy {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        n: Vec<usize>,
        /// The input is already the n-th state (single `--n`).
        #[arg(long)]
        explicit: bool,
    },
    /// Write a fixture state file.
    Fixture {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, value_enum)]
        kind: FixtureKind,
        #[arg(long, value_delimiter = ',', default_value = "2,2")]
        dims: Vec<usize>,
        /// Werner weight.
        #[arg(long, default_value_t = 0.9)]
        p: f64,
        /// Rank bound for random-mixed.
        #[arg(long)]
        rank: Option<usize>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::LemmaCheck { .. } => "lemma-check",
            Command::SpectralRate { .. } => "spectral-rate",
            Command::Eof { .. } => "eof",
            Command::EofReg { .. } => "eof-reg",
            Command::DilutionSim { .. } => "dilution-sim",
            Command::DilutionCurve { .. } => "dilution-curve",
            Command::Converse { .. } => "converse",
            Command::CostProxy { .. } => "cost-proxy",
            Command::Fixture { .. } => "fixture",
        }
    }

    pub fn io(&self) -> &IoArgs {
        match self {
            Command::LemmaCheck { io, .. }
            | Command::SpectralRate { io, .. }
            | Command::Eof { io, .. }
            | Command::EofReg { io, .. }
            | Command::DilutionSim { io, .. }
            | Command::DilutionCurve { io, .. }
            | Command::Converse { io, .. }
            | Command::CostProxy { io, .. }
            | Command::Fixture { io, .. } => io,
        }
    }
}

/// Executes the command and writes its output.
pub fn run(config: &ExperimentConfig) -> Result<()> {
    let text = commands::execute(&config.command)?;
    match &config.command.io().output {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

/// The JSON error record written on failure.
pub fn error_record(err: &Error, command: Option<&Command>) -> serde_json::Value {
    let context = match command {
        Some(c) => json!({
            "command": c.name(),
            "input": c.io().input.as_ref().map(|p| p.display().to_string()),
        }),
        None => json!({}),
    };
    json!({"code": err.code(), "message": err.to_string(), "context": context})
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match ExperimentConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let record = json!({
                "code": "usage_error",
                "message": e.to_string().lines().next().unwrap_or_default(),
                "context": {},
            });
            eprintln!("{record}");
            return 2;
        }
    };
    match run(&config) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("{}", error_record(&err, Some(&config.command)));
            1
        }
    }
}
