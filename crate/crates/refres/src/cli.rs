//! Command-line grammar.

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "refres", version, about = "Verify resource relations between parties without a shared reference frame")]
pub struct Cli {
    /// Tolerance for exact-physics checks.
    #[arg(long, global = true, default_value_t = 1e-9, value_parser = positive_tolerance)]
    pub tol: f64,
    /// Seed for every random draw.
    #[arg(long, global = true, env = "REFRES_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Monte Carlo trials.
    #[arg(long, global = true, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify one relation or the whole registry.
    Verify(VerifyArgs),
    /// Unambiguous discrimination success with a reference register.
    Usd(RegisterArgs),
    /// Sweep tables.
    Table {
        #[command(subcommand)]
        table: Table,
    },
    /// Teleport a random qubit with a reference register on Bob's side.
    Teleport(RegisterArgs),
    /// Convert an ebit into encoded Ebits.
    Convert(ConvertArgs),
    /// The fixed-weight code on N qubits.
    Code {
        #[arg(long)]
        n: u32,
    },
    /// Best superdense rate for a number of refbits.
    Optimize {
        #[arg(long)]
        refbits: u32,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct VerifyArgs {
    #[arg(long)]
    pub relation: Option<String>,
    #[arg(long)]
    pub all: bool,
}

#[derive(Debug, Args)]
pub struct RegisterArgs {
    #[arg(long, required_unless_present = "refbit2")]
    pub refbits: Option<u32>,
    #[arg(long)]
    pub refbit2: Option<u32>,
}

#[derive(Debug, Subcommand)]
pub enum Table {
    /// Superdense rate for N = 0, 2, ... up to the given maximum.
    Superdense {
        #[arg(long)]
        refbits_max: u32,
        /// Number of evenly spaced p values in [0, 1]; without it each row
        /// uses the optimal p.
        #[arg(long)]
        p_grid: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long, value_enum)]
    pub source: Source,
    /// Refbit count for `ebit+Nrefbits`.
    #[arg(long, default_value_t = 2)]
    pub refbits: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Source {
    #[value(name = "2ebits")]
    TwoEbits,
    #[value(name = "ebit+refbit")]
    EbitRefbit,
    #[value(name = "ebit+Nrefbits")]
    EbitRefbits,
}

fn positive_tolerance(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err("tolerance must be positive and finite".into())
    }
}
