//! `count` and `rv`.

use std::path::PathBuf;

use apx::oracle::TracingOracle;
use apx::randvar::{
    approx_expectation, avg_sampler, inequality_suite, variance, verify_inequality, LinearCombination, CHERNOFF_MAX_M,
};
use apx::{Circuit, Rational, RationalVariable};
use clap::{Args, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::common::*;

#[derive(Args, Debug)]
pub struct CountArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[command(flatten)]
    oracle: OracleArgs,
}

pub fn count(a: &CountArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let c = read_circuit(&a.circuit)?;
    let inner = build_oracle(&a.oracle, ctx)?;
    let tracing = TracingOracle::new(inner.as_ref());
    let p = apx::CountingOracle::query(&tracing, &c, ctx.delta)?;
    Ok(Outcome::new(true)
        .with("probability", rat(&p))
        .with("oracle", apx::CountingOracle::name(inner.as_ref()))
        .with("queries", tracing.query_count()))
}

/// A random variable file: the sampler plus either an explicit code table or
/// a dyadic reading of the outputs with the listed support.
#[derive(Serialize, Deserialize, Debug)]
pub struct RvSpec {
    pub circuit: Circuit,
    #[serde(default)]
    pub table: Option<Vec<(u64, String)>>,
    #[serde(default)]
    pub int_bits: Option<usize>,
    #[serde(default)]
    pub support: Vec<String>,
}

impl RvSpec {
    pub fn build(&self, cap: usize) -> CliResult<RationalVariable> {
        let support = self.support.iter().map(|s| parse_rational_arg(s)).collect::<CliResult<Vec<_>>>()?;
        match (&self.table, self.int_bits) {
            (Some(t), None) => {
                let table = t
                    .iter()
                    .map(|(code, v)| parse_rational_arg(v).map(|v| (*code, v)))
                    .collect::<CliResult<Vec<_>>>()?;
                let mut all = support;
                all.extend(table.iter().map(|(_, v)| v.clone()));
                Ok(RationalVariable::from_table(self.circuit.clone(), table, all, cap)?)
            }
            (None, Some(k)) => Ok(RationalVariable::from_dyadic(self.circuit.clone(), k, &support, cap)?),
            _ => Err(CliError::Usage("a random variable needs exactly one of \"table\" or \"int_bits\"".into())),
        }
    }
}

/// `Σ λᵢ 𝔼[Xᵢ]` over variables sharing one seed.
#[derive(Serialize, Deserialize, Debug)]
pub struct CombinationSpec {
    pub vars: Vec<RvSpec>,
    pub coeffs: Vec<String>,
}

#[derive(Subcommand, Debug)]
pub enum RvCommand {
    /// Approximate expectation.
    Expect {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Approximate variance.
    Var {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Greedy seed-suffix fixing for a linear combination.
    Avgsample {
        #[arg(long)]
        spec: PathBuf,
        /// Number of seed bits to fix.
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Generate one instance of every inequality and check both sides.
    Verify {
        #[arg(long, default_value_t = 8)]
        seed_len: usize,
        #[arg(long, default_value_t = 8)]
        chernoff_m: usize,
        #[command(flatten)]
        oracle: OracleArgs,
    },
}

impl RvCommand {
    pub fn name(&self) -> &'static str {
        match self {
            RvCommand::Expect { .. } => "expect",
            RvCommand::Var { .. } => "var",
            RvCommand::Avgsample { .. } => "avgsample",
            RvCommand::Verify { .. } => "verify",
        }
    }
}

fn describe(x: &RationalVariable) -> Value {
    json!({ "seed_len": x.seed_len(), "support": rats(x.support()) })
}

pub fn rv(op: &RvCommand, ctx: &Ctx) -> CliResult<Outcome> {
    match op {
        RvCommand::Expect { spec, oracle } => {
            let x = read_json::<RvSpec>(spec)?.build(ctx.cap)?;
            let o = build_oracle(oracle, ctx)?;
            let e = approx_expectation(&x, o.as_ref(), ctx.delta)?;
            Ok(Outcome::new(true).with("variable", describe(&x)).with("expectation", rat(&e)))
        }
        RvCommand::Var { spec, oracle } => {
            let x = read_json::<RvSpec>(spec)?.build(ctx.cap)?;
            let o = build_oracle(oracle, ctx)?;
            let e = approx_expectation(&x, o.as_ref(), ctx.delta)?;
            let v = variance(&x, o.as_ref(), ctx.delta)?;
            Ok(Outcome::new(true).with("variable", describe(&x)).with("expectation", rat(&e)).with("variance", rat(&v)))
        }
        RvCommand::Avgsample { spec, k, oracle } => {
            let s: CombinationSpec = read_json(spec)?;
            let vars = s.vars.iter().map(|v| v.build(ctx.cap)).collect::<CliResult<Vec<_>>>()?;
            let coeffs = s.coeffs.iter().map(|c| parse_rational_arg(c)).collect::<CliResult<Vec<_>>>()?;
            let seed_len = vars.first().map_or(0, |v| v.seed_len());
            let l = LinearCombination::new(seed_len, vars, coeffs)?;
            let o = build_oracle(oracle, ctx)?;
            let run = avg_sampler(&l, *k, o.as_ref(), ctx.delta)?;
            let fin = run.final_value();
            // With exact answers the greedy value never drops below the start.
            let pass = !o.is_exact() || fin >= run.initial;
            Ok(Outcome::new(pass)
                .with("z", bits(&run.z))
                .with("initial", rat(&run.initial))
                .with("final", rat(&fin))
                .with("path", rats(&run.path)))
        }
        RvCommand::Verify { seed_len, chernoff_m, oracle } => {
            if *seed_len < 2 || *seed_len > ctx.cap {
                return Err(CliError::Usage(format!("--seed-len must lie in 2..={}", ctx.cap)));
            }
            if *chernoff_m == 0 || *chernoff_m > CHERNOFF_MAX_M {
                return Err(CliError::Usage(format!("--chernoff-m must lie in 1..={CHERNOFF_MAX_M}")));
            }
            let mut rng = ChaCha20Rng::seed_from_u64(ctx.seed);
            let suite =
                inequality_suite::<Rational, _>(&mut rng, *seed_len, *chernoff_m, ctx.delta, ctx.beta, ctx.cap)?;
            let o = build_oracle(oracle, ctx)?;
            let mut results = Vec::new();
            let mut pass = true;
            for inst in &suite {
                let r = verify_inequality(inst, o.as_ref(), ctx.delta, ctx.beta, ctx.cap)?;
                pass &= r.pass;
                results.push(json!({
                    "name": r.name,
                    "lhs": rat(&r.lhs),
                    "rhs": rat(&r.rhs),
                    "slack": rat(&r.slack),
                    "hypotheses_ok": r.hypotheses_ok,
                    "notes": r.notes,
                    "pass": r.pass,
                }));
            }
            Ok(Outcome::new(pass).with("inequalities", results))
        }
    }
}
