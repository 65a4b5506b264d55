//! Shared plumbing: run context, errors, file readers and oracle selection.

use std::fs;
use std::path::{Path, PathBuf};

use apx::oracle::{EmpiricalOracle, ExactOracle, FlatDistribution, Precision, SamplingOracle};
use apx::scalar::{parse_rational, rational_text};
use apx::{ApxError, Circuit, CountingOracle, Rational, DEFAULT_CAP};
use clap::{Args, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

/// Uniform settings of one invocation.
pub struct Ctx {
    pub seed: u64,
    pub delta: Precision,
    pub beta: Precision,
    pub cap: usize,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or unreadable input files: exit 2.
    Usage(String),
    /// A library failure while running a well-formed command: exit 1.
    Apx(ApxError),
}

impl From<ApxError> for CliError {
    fn from(e: ApxError) -> Self {
        match e {
            ApxError::Parse(m) => CliError::Usage(format!("parse error: {m}")),
            e => CliError::Apx(e),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Command-specific report fields and the verdict that sets the exit code.
pub struct Outcome {
    pub fields: Map<String, Value>,
    pub pass: bool,
}

impl Outcome {
    pub fn new(pass: bool) -> Self {
        Outcome { fields: Map::new(), pass }
    }

    pub fn with(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.fields.insert(key.to_string(), v.into());
        self
    }

    pub fn set(&mut self, key: &str, v: impl Into<Value>) {
        self.fields.insert(key.to_string(), v.into());
    }
}

/// Enumeration cap from `APX_CAP`, default 20.
pub fn cap_from_env() -> CliResult<usize> {
    match std::env::var("APX_CAP") {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(c) if c > 0 => Ok(c),
            _ => Err(CliError::Usage(format!("APX_CAP must be a positive integer, got {s:?}"))),
        },
        Err(_) => Ok(DEFAULT_CAP),
    }
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    serde_json::from_str(&read_text(path)?)
        .map_err(|e| CliError::Usage(format!("cannot parse {}: {e}", path.display())))
}

pub fn read_circuit(path: &Path) -> CliResult<Circuit> {
    read_json(path)
}

pub fn read_dist(path: &Path) -> CliResult<FlatDistribution> {
    Ok(FlatDistribution::parse(&read_text(path)?)?)
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

pub fn parse_bits_arg(s: &str) -> CliResult<Vec<bool>> {
    apx::bits::parse_bits(s).map_err(|e| CliError::Usage(format!("bad bit-string {s:?}: {e}")))
}

pub fn parse_rational_arg(s: &str) -> CliResult<Rational> {
    parse_rational(s).ok_or_else(|| CliError::Usage(format!("bad rational {s:?}; use p/q")))
}

pub fn bits(x: &[bool]) -> Value {
    Value::String(apx::bits::format_bits(x))
}

pub fn rat(r: &Rational) -> Value {
    Value::String(rational_text(r))
}

pub fn rats(rs: &[Rational]) -> Value {
    Value::Array(rs.iter().map(rat).collect())
}

pub fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OracleKind {
    Exact,
    Sample,
    Empirical,
}

#[derive(Args, Debug, Clone)]
pub struct OracleArgs {
    /// Oracle answering probability queries.
    #[arg(long, value_enum, default_value_t = OracleKind::Exact)]
    pub oracle: OracleKind,
    /// Failure probability of the sampling oracle.
    #[arg(long, default_value_t = 0.01)]
    pub gamma: f64,
    /// Flat distribution file for the empirical oracle.
    #[arg(long)]
    pub dist: Option<PathBuf>,
}

pub fn build_oracle(args: &OracleArgs, ctx: &Ctx) -> CliResult<Box<dyn CountingOracle<Rational>>> {
    Ok(match args.oracle {
        OracleKind::Exact => Box::new(ExactOracle::<Rational>::new(ctx.cap)),
        OracleKind::Sample => Box::new(SamplingOracle::<Rational>::new(args.gamma, ctx.seed)?),
        OracleKind::Empirical => {
            let path = args.dist.as_ref().ok_or_else(|| CliError::Usage("--oracle empirical needs --dist".into()))?;
            Box::new(EmpiricalOracle::<Rational>::new(read_dist(path)?))
        }
    })
}
