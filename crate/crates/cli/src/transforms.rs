//! `yao`, `blr`, `sz` and `protocol`.

use std::path::PathBuf;

use apx::oracle::ExactOracle;
use apx::scalar::Scalar;
use apx::transforms::{
    blr_decode, blr_self_correct, blr_test, equality_function, schwartz_zippel_check, simulate_protocol, yao_predictor,
    FieldPoly, OneWayProtocol, Term,
};
use apx::Rational;
use clap::{Args, Subcommand};
use serde::Deserialize;
use serde_json::json;

use crate::common::*;

#[derive(Args, Debug)]
pub struct YaoArgs {
    /// Generator circuit `G : m → n`.
    #[arg(long)]
    gen: PathBuf,
    /// Distinguisher circuit `C : n → 1`.
    #[arg(long)]
    dist: PathBuf,
}

pub fn yao(a: &YaoArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let g = read_circuit(&a.gen)?;
    let c = read_circuit(&a.dist)?;
    let oracle = ExactOracle::<Rational>::new(ctx.cap);
    let out = yao_predictor(&g, &c, &oracle, ctx.delta, ctx.cap)?;
    let n = g.num_outputs() as i64;
    let bound = out.epsilon.clone() / Rational::from_ratio(4 * n, 1);
    let adv = &out.predictor.advantage;
    Ok(Outcome::new(*adv >= bound)
        .with("index", out.predictor.index)
        .with("predictor", to_value(&out.predictor.circuit))
        .with("advantage", rat(adv))
        .with("bound", rat(&bound))
        .with("gap", rat(&out.gap))
        .with("epsilon", rat(&out.epsilon))
        .with("hybrids", rats(&out.hybrids))
        .with("aux", bits(&out.aux))
        .with("negated", out.negated))
}

#[derive(Subcommand, Debug)]
pub enum BlrCommand {
    /// Rejection probability of the linearity test.
    Test {
        #[arg(long)]
        circuit: PathBuf,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Self-corrected value at one point.
    Correct {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        x: String,
        /// Assumed rejection bound `ε` as `p/q`.
        #[arg(long)]
        eps: String,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Recover the nearby linear function.
    Decode {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        eps: String,
        #[command(flatten)]
        oracle: OracleArgs,
    },
}

impl BlrCommand {
    pub fn name(&self) -> &'static str {
        match self {
            BlrCommand::Test { .. } => "test",
            BlrCommand::Correct { .. } => "correct",
            BlrCommand::Decode { .. } => "decode",
        }
    }
}

pub fn blr(op: &BlrCommand, ctx: &Ctx) -> CliResult<Outcome> {
    match op {
        BlrCommand::Test { circuit, oracle } => {
            let c = read_circuit(circuit)?;
            let o = build_oracle(oracle, ctx)?;
            let rate = blr_test(&c, o.as_ref(), ctx.delta)?;
            Ok(Outcome::new(true).with("rejection_probability", rat(&rate)))
        }
        BlrCommand::Correct { circuit, x, eps, oracle } => {
            let c = read_circuit(circuit)?;
            let x = parse_bits_arg(x)?;
            let eps = parse_rational_arg(eps)?;
            let o = build_oracle(oracle, ctx)?;
            let r = blr_self_correct(&c, &x, o.as_ref(), ctx.delta, ctx.beta, &eps)?;
            Ok(Outcome::new(r.bit.is_some())
                .with("bit", r.bit.map(|b| b as u8))
                .with("prob_zero", rat(&r.prob_zero))
                .with("prob_one", rat(&r.prob_one))
                .with("threshold", rat(&r.threshold)))
        }
        BlrCommand::Decode { circuit, eps, oracle } => {
            let c = read_circuit(circuit)?;
            let eps = parse_rational_arg(eps)?;
            let o = build_oracle(oracle, ctx)?;
            let r = blr_decode(&c, o.as_ref(), ctx.delta, ctx.beta, &eps)?;
            let pass = r.z.is_some() && r.within_bound != Some(false);
            Ok(Outcome::new(pass)
                .with("z", r.z.as_deref().map(bits))
                .with("test_rate", rat(&r.test_rate))
                .with("precondition_ok", r.precondition_ok)
                .with("disagreement", r.disagreement.as_ref().map(rat))
                .with("bound", rat(&r.bound))
                .with("within_bound", r.within_bound))
        }
    }
}

#[derive(Deserialize, Debug)]
struct PolyFile {
    p: u64,
    m: usize,
    terms: Vec<Term>,
}

#[derive(Args, Debug)]
pub struct SzArgs {
    /// Polynomial file `{"p", "m", "terms": [{"coeff", "exps"}]}`.
    #[arg(long)]
    poly: PathBuf,
    /// Comma-separated field point where the polynomial is nonzero.
    #[arg(long)]
    witness: String,
    #[command(flatten)]
    oracle: OracleArgs,
}

pub fn sz(a: &SzArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let pf: PolyFile = read_json(&a.poly)?;
    let f = FieldPoly::new(pf.p, pf.m, pf.terms, ctx.cap)?;
    let w = a
        .witness
        .split(',')
        .map(|s| s.trim().parse::<u64>().map_err(|_| CliError::Usage(format!("bad field element {s:?}"))))
        .collect::<CliResult<Vec<_>>>()?;
    let o = build_oracle(&a.oracle, ctx)?;
    let r = schwartz_zippel_check(&f, &w, o.as_ref(), ctx.delta, ctx.beta)?;
    Ok(Outcome::new(r.pass)
        .with("degree", f.d())
        .with("zero_fraction", rat(&r.zero_fraction))
        .with("bound", rat(&r.bound))
        .with("accept_probability", rat(&r.accept_probability))
        .with("valid_probability", rat(&r.valid_probability)))
}

#[derive(Subcommand, Debug)]
pub enum ProtocolCommand {
    /// Worst-case error of a protocol for a function, over all input pairs.
    Simulate {
        #[arg(long)]
        proto: PathBuf,
        /// Circuit of `f(x, y)` over `2n` inputs.
        #[arg(long = "fn")]
        function: PathBuf,
    },
    /// The hashing protocol for Equality with `m`-bit messages.
    Equality {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
}

impl ProtocolCommand {
    pub fn name(&self) -> &'static str {
        match self {
            ProtocolCommand::Simulate { .. } => "simulate",
            ProtocolCommand::Equality { .. } => "equality",
        }
    }
}

pub fn protocol(op: &ProtocolCommand, ctx: &Ctx) -> CliResult<Outcome> {
    let oracle = ExactOracle::<Rational>::new(ctx.cap);
    let (p, f, expected) = match op {
        ProtocolCommand::Simulate { proto, function } => {
            let p: OneWayProtocol = read_json(proto)?;
            p.validate()?;
            (p, read_circuit(function)?, None)
        }
        ProtocolCommand::Equality { n, m } => {
            (OneWayProtocol::equality(*n, *m)?, equality_function(*n), Some(Rational::pow2_neg(*m as u32)))
        }
    };
    let r = simulate_protocol(&p, &f, &oracle, ctx.delta, ctx.cap)?;
    let pass = expected.as_ref().is_none_or(|e| *e == r.max_error);
    Ok(Outcome::new(pass)
        .with("mode", to_value(&p.mode))
        .with("max_error", rat(&r.max_error))
        .with("expected", expected.as_ref().map(rat))
        .with("worst_x", bits(&r.worst_x))
        .with("worst_y", bits(&r.worst_y))
        .with("pairs", r.pairs)
        .with("message_bits", json!(p.m)))
}
