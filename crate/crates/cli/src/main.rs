//! `apx`: command-line front end. Every subcommand writes one JSON report to
//! stdout or `--out`; exit 0 on success, 1 on a checked failure, 2 on a usage
//! error.

mod common;
mod counting;
mod restrict;
mod selftest;
mod tfnp;
mod transforms;

use std::path::PathBuf;
use std::process::ExitCode;

use apx::oracle::{Precision, PRNG_ALGORITHM};
use clap::{Parser, Subcommand};
use serde_json::{Map, Value};

use common::{cap_from_env, CliError, CliResult, Ctx, Outcome};

#[derive(Parser, Debug)]
#[command(name = "apx", version, about = "Approximate-counting oracles and the constructive algorithms built on them")]
struct Cli {
    /// Seed of the run's ChaCha20 stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Oracle precision as `δ⁻¹`.
    #[arg(long, global = true, default_value_t = 100)]
    delta: u64,
    /// Axiom slack as `β⁻¹`.
    #[arg(long, global = true, default_value_t = 100)]
    beta: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Query the acceptance probability of a circuit.
    Count(counting::CountArgs),
    /// Random-variable operations.
    Rv {
        #[command(subcommand)]
        op: counting::RvCommand,
    },
    /// Extract a next-bit predictor from a distinguisher of a generator.
    Yao(transforms::YaoArgs),
    /// Linearity testing, self-correction and decoding.
    Blr {
        #[command(subcommand)]
        op: transforms::BlrCommand,
    },
    /// Schwartz–Zippel zero-fraction check of a polynomial over a prime field.
    Sz(transforms::SzArgs),
    /// One-way communication protocols.
    Protocol {
        #[command(subcommand)]
        op: transforms::ProtocolCommand,
    },
    /// Refuter(Yao) instances: check, solve, reduce to LossyCode.
    Refuter {
        #[command(subcommand)]
        op: tfnp::RefuterCommand,
    },
    /// LossyCode instances: check and solve.
    Lossycode {
        #[command(subcommand)]
        op: tfnp::LossyCommand,
    },
    /// Iterated compression schemes.
    Compress {
        #[command(subcommand)]
        op: tfnp::CompressCommand,
    },
    /// Subset selection and derandomized restrictions of k-NF families.
    Restrict {
        #[command(subcommand)]
        op: restrict::RestrictCommand,
    },
    /// Inputs separating a depth-2 AC⁰ circuit from parity.
    Parity {
        #[command(subcommand)]
        op: restrict::ParityCommand,
    },
    /// Run the built-in invariant suites.
    Selftest(selftest::SelftestArgs),
}

impl Command {
    fn path(&self) -> String {
        use Command::*;
        let sub = |s: &str, op: &str| format!("{s} {op}");
        match self {
            Count(_) => "count".into(),
            Rv { op } => sub("rv", op.name()),
            Yao(_) => "yao".into(),
            Blr { op } => sub("blr", op.name()),
            Sz(_) => "sz".into(),
            Protocol { op } => sub("protocol", op.name()),
            Refuter { op } => sub("refuter", op.name()),
            Lossycode { op } => sub("lossycode", op.name()),
            Compress { op } => sub("compress", op.name()),
            Restrict { op } => sub("restrict", op.name()),
            Parity { op } => sub("parity", op.name()),
            Selftest(a) => sub("selftest", a.level.name()),
        }
    }
}

fn dispatch(cmd: &Command, ctx: &Ctx) -> CliResult<Outcome> {
    match cmd {
        Command::Count(a) => counting::count(a, ctx),
        Command::Rv { op } => counting::rv(op, ctx),
        Command::Yao(a) => transforms::yao(a, ctx),
        Command::Blr { op } => transforms::blr(op, ctx),
        Command::Sz(a) => transforms::sz(a, ctx),
        Command::Protocol { op } => transforms::protocol(op, ctx),
        Command::Refuter { op } => tfnp::refuter(op, ctx),
        Command::Lossycode { op } => tfnp::lossycode(op, ctx),
        Command::Compress { op } => tfnp::compress(op, ctx),
        Command::Restrict { op } => restrict::restrict(op, ctx),
        Command::Parity { op } => restrict::parity(op, ctx),
        Command::Selftest(a) => selftest::selftest(a, ctx),
    }
}

fn emit(cli: &Cli, report: &Map<String, Value>) -> CliResult<()> {
    let text = serde_json::to_string_pretty(report).expect("reports serialize") + "\n";
    match &cli.out {
        Some(p) => common::write_text(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> CliResult<bool> {
    let delta = Precision::new(cli.delta).map_err(|e| CliError::Usage(e.to_string()))?;
    let beta = Precision::new(cli.beta).map_err(|e| CliError::Usage(e.to_string()))?;
    let ctx = Ctx { seed: cli.seed, delta, beta, cap: cap_from_env()? };
    let mut report = Map::new();
    report.insert("command".into(), cli.command.path().into());
    report.insert("seed".into(), cli.seed.into());
    report.insert("prng".into(), PRNG_ALGORITHM.into());
    report.insert("delta".into(), format!("1/{}", cli.delta).into());
    report.insert("beta".into(), format!("1/{}", cli.beta).into());
    report.insert("cap".into(), ctx.cap.into());
    let pass = match dispatch(&cli.command, &ctx) {
        Ok(out) => {
            report.extend(out.fields);
            out.pass
        }
        Err(CliError::Apx(e)) => {
            report.insert("error".into(), e.to_string().into());
            false
        }
        Err(usage) => return Err(usage),
    };
    report.insert("pass".into(), pass.into());
    emit(cli, &report)?;
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("apx: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Apx(e)) => {
            eprintln!("apx: {e}");
            ExitCode::from(1)
        }
    }
}
