//! Command-line front end: argument parsing, protocol dispatch and report
//! rendering.

pub mod cli;
pub mod report;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use refres_core::frames::FrameAssignment;
use refres_core::protocols::{
    fixed_weight_code, optimize_tradeoff, registry, run_ebit_to_ebit_l, run_teleport, superdense_rate,
    tradeoff_stationary_point, verify_relation, EbitSource, Register, RunConfig,
};
use refres_core::resources::RelationCertificate;
use refres_core::sampling::{random_qubit, rng_for};
use refres_core::usd::{ratio_to_f64, usd_refbit2_assisted, usd_refbit_assisted};
use refres_core::Error;

use cli::{Cli, Command, Format, RegisterArgs, Source, Table as TableKind};
use report::{emit_certificates, emit_table, ratio_string, Cell, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

enum Failure {
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::OutOfRange(_) | Error::UnknownRelation(_) | Error::TooManyQubits(_) => Failure::Usage(e.to_string()),
            other => Failure::Internal(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Internal(e.to_string())
    }
}

/// Parses `args` (program name first), runs the command and writes the
/// report to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Internal(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_FAILED
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let config = RunConfig { tolerance: cli.tol, seed: cli.seed, trials: cli.trials };
    match &cli.command {
        Command::Verify(args) => {
            let certs = match &args.relation {
                Some(id) => vec![verify_relation(id, &config)?],
                None => registry().iter().map(|e| (e.runner)(&config)).collect::<Result<Vec<_>, _>>()?,
            };
            certificates(&certs, cli.format, out, err)
        }
        Command::Teleport(args) => {
            let register = register(args)?;
            let mut rng = rng_for(cli.seed, "teleport");
            let (a, b) = random_qubit(&mut rng);
            let frame = FrameAssignment::random(&mut rng);
            let cert = run_teleport(a, b, register, &frame, &config)?;
            certificates(&[cert], cli.format, out, err)
        }
        Command::Convert(args) => {
            let source = match args.source {
                Source::TwoEbits => EbitSource::TwoEbits,
                Source::EbitRefbit => EbitSource::EbitPlusRefbit,
                Source::EbitRefbits => EbitSource::EbitPlusRefbits(args.refbits),
            };
            let frame = FrameAssignment::random(&mut rng_for(cli.seed, "convert"));
            let mut cert = run_ebit_to_ebit_l(source, &frame, &config)?;
            cert.seed = config.seed;
            cert.trials = config.trials;
            certificates(&[cert], cli.format, out, err)
        }
        Command::Usd(args) => {
            let (n, m, result) = match register(args)? {
                Register::Refbits(n) => (n, 0, usd_refbit_assisted(n)?),
                Register::Refbit2s(m) => (0, m, usd_refbit2_assisted(m)?),
            };
            let mut table = Table::new(&["n_refbits", "n_refbit2", "success_prob", "success_prob_exact"]);
            table.push(vec![
                Cell::Int(n.into()),
                Cell::Int(m.into()),
                Cell::Float(result.success_f64()),
                Cell::Text(ratio_string(&result.success_probability)),
            ]);
            emit_table(&table, cli.format, out)?;
            Ok(EXIT_OK)
        }
        Command::Table { table: TableKind::Superdense { refbits_max, p_grid } } => {
            emit_table(&superdense_table(*refbits_max, *p_grid)?, cli.format, out)?;
            Ok(EXIT_OK)
        }
        Command::Code { n } => {
            let code = fixed_weight_code(*n)?;
            let mut table = Table::new(&["n", "n1", "dimension", "logical_qubits", "stirling_estimate"]);
            table.push(vec![
                Cell::Int((*n).into()),
                Cell::Int(code.n1.into()),
                Cell::Text(code.dimension.to_string()),
                Cell::Float(code.logical_qubits),
                Cell::Float(code.stirling),
            ]);
            emit_table(&table, cli.format, out)?;
            Ok(EXIT_OK)
        }
        Command::Optimize { refbits } => {
            let (p, rate) = optimize_tradeoff(*refbits)?;
            let usd = usd_refbit_assisted(*refbits)?;
            let mut table =
                Table::new(&["n_refbits", "p_star", "rate_cbits", "stationary_p", "success_prob", "success_prob_exact"]);
            table.push(vec![
                Cell::Int((*refbits).into()),
                Cell::Float(p),
                Cell::Float(rate),
                Cell::Float(tradeoff_stationary_point(usd.success_f64())),
                Cell::Float(usd.success_f64()),
                Cell::Text(ratio_string(&usd.success_probability)),
            ]);
            emit_table(&table, cli.format, out)?;
            Ok(EXIT_OK)
        }
    }
}

fn register(args: &RegisterArgs) -> Result<Register, Failure> {
    match (args.refbits, args.refbit2) {
        (Some(n), None) => Ok(Register::Refbits(n)),
        (None | Some(0), Some(m)) => Ok(Register::Refbit2s(m)),
        (Some(_), Some(_)) => Err(Failure::Usage("combine --refbit2 only with --refbits 0".into())),
        (None, None) => Err(Failure::Usage("--refbits or --refbit2 is required".into())),
    }
}

fn certificates(certs: &[RelationCertificate], format: Format, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    emit_certificates(certs, format, out)?;
    let mut code = EXIT_OK;
    for cert in certs {
        for check in cert.failed_checks() {
            writeln!(err, "{}: check {} failed with value {:e}", cert.relation_id, check.name, check.value)?;
            code = EXIT_FAILED;
        }
    }
    Ok(code)
}

/// Rows for `N = 0, 2, ..., max_n`. Without a grid each row uses the
/// optimal `p`; with `k` points the values `i / (k - 1)` are swept.
fn superdense_table(max_n: u32, p_grid: Option<usize>) -> Result<Table, Failure> {
    let mut table = Table::new(&["n_refbits", "p", "rate_cbits", "leftover_refbits", "success_prob", "success_prob_exact"]);
    for n in (0..=max_n).step_by(2) {
        let usd = usd_refbit_assisted(n)?;
        let success = ratio_to_f64(&usd.success_probability);
        let ps: Vec<f64> = match p_grid {
            None => vec![optimize_tradeoff(n)?.0],
            Some(0) => Vec::new(),
            Some(1) => vec![0.0],
            Some(k) => (0..k).map(|i| i as f64 / (k - 1) as f64).collect(),
        };
        for p in ps {
            table.push(vec![
                Cell::Int(n.into()),
                Cell::Float(p),
                Cell::Float(superdense_rate(p, success)),
                Cell::Float(p * f64::from(n)),
                Cell::Float(success),
                Cell::Text(ratio_string(&usd.success_probability)),
            ]);
        }
    }
    Ok(table)
}

