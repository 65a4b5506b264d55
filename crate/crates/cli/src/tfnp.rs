//! `refuter`, `lossycode` and `compress`.

use std::path::PathBuf;

use apx::bits::format_bits;
use apx::tfnp::{
    check_lossycode_solution, evaluate_refuter, find_lossycode_solution, reduction_soundness_trial,
    refuter_to_lossycode, solve_lossycode_randomized, solve_refuter_randomized, stretch_amplify,
    worstcase_from_average, BaseScheme, CircuitLossyCode, IteratedScheme, LossyCode, RefuterInstance,
    RefuterInstanceFile, Regime,
};
use apx::{Circuit, Rational};
use clap::{Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::common::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    Paper,
    ExactLength,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::Paper => Regime::Paper,
            RegimeArg::ExactLength => Regime::ExactLength,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum RefuterCommand {
    /// Is the distribution a solution?
    Check {
        #[arg(long)]
        instance: PathBuf,
        /// Flat distribution file.
        #[arg(long)]
        dist: PathBuf,
    },
    /// Sample uniform distributions until one is a solution.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 1000)]
        tries: usize,
    },
    /// Build the LossyCode instance of the reduction.
    Reduce {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = RegimeArg::Paper)]
        regime: RegimeArg,
        /// Write the instance bundle here.
        #[arg(long)]
        bundle: Option<PathBuf>,
        /// Also export the compressor and decompressor as circuits (`nm` within the cap).
        #[arg(long)]
        export_circuits: bool,
        /// Solve the produced instance with this many samples and map the solution back.
        #[arg(long)]
        tries: Option<usize>,
    },
}

impl RefuterCommand {
    pub fn name(&self) -> &'static str {
        match self {
            RefuterCommand::Check { .. } => "check",
            RefuterCommand::Solve { .. } => "solve",
            RefuterCommand::Reduce { .. } => "reduce",
        }
    }
}

fn read_refuter(path: &std::path::Path) -> CliResult<RefuterInstance> {
    let f: RefuterInstanceFile = read_json(path)?;
    Ok(RefuterInstance::from_file(&f)?)
}

pub fn refuter(op: &RefuterCommand, ctx: &Ctx) -> CliResult<Outcome> {
    match op {
        RefuterCommand::Check { instance, dist } => {
            let inst = read_refuter(instance)?;
            let d = read_dist(dist)?;
            let v = evaluate_refuter(&inst, &d)?;
            Ok(Outcome::new(v.is_solution)
                .with("index", v.index)
                .with("predictor", to_value(&v.predictor))
                .with("description_bits", v.description_bits)
                .with("successes", v.successes)
                .with("success_rate", rat(&v.success_rate))
                .with("threshold", rat(&inst.threshold()))
                .with("is_solution", v.is_solution))
        }
        RefuterCommand::Solve { instance, tries } => {
            let inst = read_refuter(instance)?;
            let r = solve_refuter_randomized(&inst, ctx.seed, *tries)?;
            Ok(Outcome::new(r.solution.is_some())
                .with(
                    "solution",
                    r.solution.as_ref().map(|d| d.strings().iter().map(|s| format_bits(s)).collect::<Vec<_>>()),
                )
                .with("tries", r.tries)
                .with("last_success_rate", r.last_success_rate.as_ref().map(rat)))
        }
        RefuterCommand::Reduce { instance, regime, bundle, export_circuits, tries } => {
            let inst = read_refuter(instance)?;
            let regime: Regime = (*regime).into();
            let code = refuter_to_lossycode(&inst, regime)?;
            let lossy = if *export_circuits { Some(to_value(&code.to_circuits(ctx.cap)?)) } else { None };
            let b = json!({
                "refuter": to_value(&inst.to_file()?),
                "regime": to_value(&regime),
                "layout": to_value(code.layout()),
                "lossycode": lossy,
            });
            if let Some(path) = bundle {
                write_text(path, &(serde_json::to_string_pretty(&b).expect("bundle serializes") + "\n"))?;
            }
            let mut out = Outcome::new(true)
                .with("condition_holds", inst.condition_holds())
                .with("layout", to_value(code.layout()))
                .with("bundle", bundle.as_ref().map(|p| p.display().to_string()));
            if let Some(t) = tries {
                let trial = reduction_soundness_trial(&inst, regime, ctx.seed, *t)?;
                out.pass = trial.sound();
                out.set(
                    "trial",
                    json!({
                        "lossy_solution": trial.lossy_solution.as_deref().map(format_bits),
                        "tries": trial.tries,
                        "mapped_is_solution": trial.mapped.as_ref().map(|(_, v)| v.is_solution),
                        "mapped_success_rate": trial.mapped.as_ref().map(|(_, v)| rat(&v.success_rate)),
                    }),
                );
            }
            Ok(out)
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum LossyCommand {
    /// Is `x` a solution, i.e. `D(C(x)) ≠ x`?
    Check {
        /// `{"compressor": circuit, "decompressor": circuit}`.
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        x: String,
    },
    /// Sample until a solution is found, then fall back to enumeration within the cap.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 1000)]
        tries: usize,
    },
}

impl LossyCommand {
    pub fn name(&self) -> &'static str {
        match self {
            LossyCommand::Check { .. } => "check",
            LossyCommand::Solve { .. } => "solve",
        }
    }
}

fn read_lossy(path: &std::path::Path) -> CliResult<CircuitLossyCode> {
    let raw: CircuitLossyCode = read_json(path)?;
    Ok(CircuitLossyCode::new(raw.compressor, raw.decompressor)?)
}

pub fn lossycode(op: &LossyCommand, ctx: &Ctx) -> CliResult<Outcome> {
    match op {
        LossyCommand::Check { instance, x } => {
            let inst = read_lossy(instance)?;
            let x = parse_bits_arg(x)?;
            let y = inst.compress(&x)?;
            let back = inst.decompress(&y)?;
            let ok = check_lossycode_solution(&inst, &x)?;
            Ok(Outcome::new(ok).with("compressed", bits(&y)).with("roundtrip", bits(&back)).with("is_solution", ok))
        }
        LossyCommand::Solve { instance, tries } => {
            let inst = read_lossy(instance)?;
            let r = solve_lossycode_randomized(&inst, ctx.seed, *tries)?;
            let (solution, method) = match r.solution {
                Some(x) => (Some(x), "randomized"),
                None if inst.n() <= ctx.cap => (find_lossycode_solution(&inst, ctx.cap)?, "exhaustive"),
                None => (None, "randomized"),
            };
            Ok(Outcome::new(solution.is_some())
                .with("solution", solution.as_deref().map(format_bits))
                .with("tries", r.tries)
                .with("method", method))
        }
    }
}

/// A one-bit base scheme and the iteration parameters.
#[derive(Deserialize, Debug)]
struct SchemeFile {
    n: usize,
    #[serde(default)]
    r: usize,
    compressor: Circuit,
    decompressor: Circuit,
    ell: usize,
    d: usize,
}

#[derive(Subcommand, Debug)]
pub enum CompressCommand {
    /// Stretch amplification of a randomized base scheme.
    Amplify {
        #[arg(long)]
        params: PathBuf,
        /// Input string of length `ell`; random from the seed when absent.
        #[arg(long)]
        z: Option<String>,
    },
    /// Worst-case scheme from an average-case one by XOR masks.
    W2a {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        z: Option<String>,
    },
}

impl CompressCommand {
    pub fn name(&self) -> &'static str {
        match self {
            CompressCommand::Amplify { .. } => "amplify",
            CompressCommand::W2a { .. } => "w2a",
        }
    }
}

fn scheme_report(s: &IteratedScheme, z: &[bool], per_block: Option<Rational>, ctx: &Ctx) -> CliResult<Outcome> {
    let mut rng = ChaCha20Rng::seed_from_u64(ctx.seed);
    let seeds: Vec<bool> = (0..s.seed_len()).map(|_| rng.gen()).collect();
    let bound = s.length_bound();
    let out_len = Rational::from_integer(s.output_len().into());
    let length_ok = out_len <= bound;
    let roundtrip = s.roundtrip_ok(z, &seeds)?;
    let mut out = Outcome::new(length_ok)
        .with("rounds", to_value(&s.rounds()))
        .with("input_len", s.ell())
        .with("seed_len", s.seed_len())
        .with("output_len", s.output_len())
        .with("length_bound", rat(&bound))
        .with("length_ok", length_ok)
        .with("z", bits(z))
        .with("sample_seeds", bits(&seeds))
        .with("sample_roundtrip", roundtrip);
    if let (Some(eps), true) = (per_block, s.seed_len() <= ctx.cap) {
        let fail = s.failure_probability(z, ctx.cap)?;
        let ub = s.union_bound(&eps);
        out.pass &= fail <= ub;
        out.set("per_block_failure", rat(&eps));
        out.set("failure_probability", rat(&fail));
        out.set("union_bound", rat(&ub));
    } else {
        out.set("failure_probability", Value::Null);
    }
    Ok(out)
}

pub fn compress(op: &CompressCommand, ctx: &Ctx) -> CliResult<Outcome> {
    let (params, z) = match op {
        CompressCommand::Amplify { params, z } | CompressCommand::W2a { params, z } => (params, z),
    };
    let f: SchemeFile = read_json(params)?;
    let base = BaseScheme::new(f.n, f.r, f.compressor, f.decompressor)?;
    let z = match z {
        Some(s) => parse_bits_arg(s)?,
        None => {
            let mut rng = ChaCha20Rng::seed_from_u64(ctx.seed ^ 0x5a5a);
            (0..f.ell).map(|_| rng.gen()).collect()
        }
    };
    match op {
        CompressCommand::Amplify { .. } => {
            let per_block = if base.n + base.r <= ctx.cap { Some(base.worst_block_failure(ctx.cap)?) } else { None };
            let s = stretch_amplify(base, f.ell, f.d)?;
            scheme_report(&s, &z, per_block, ctx)
        }
        CompressCommand::W2a { .. } => {
            let per_block = if base.n <= ctx.cap { Some(base.failure_rate(&[], ctx.cap)?) } else { None };
            let s = worstcase_from_average(base, f.ell, f.d)?;
            scheme_report(&s, &z, per_block, ctx)
        }
    }
}
