//! Built-in invariant suites.

use std::collections::BTreeSet;

use apx::oracle::{check_axioms, exact_count, Axiom, BiasedOracle, ExactOracle, QueryTrace, TracingOracle};
use apx::randvar::{avg_sampler, inequality_suite, random_variable, verify_inequality, LinearCombination};
use apx::restriction::{parity_separating_input, GeneralPotential, Mark, RestrictionConfig, SetSystem, StarString};
use apx::scalar::Scalar;
use apx::tfnp::{random_exact_regime_instance, reduction_soundness_trial, Regime, WeightCode};
use apx::transforms::{blr_decode, blr_test, linear_function};
use apx::{bits, Circuit, CountingOracle, LayeredAc0, Rational};
use clap::{Args, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};

use crate::common::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Quick,
    Full,
}

impl Level {
    pub fn name(&self) -> &'static str {
        match self {
            Level::Quick => "quick",
            Level::Full => "full",
        }
    }
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    #[arg(value_enum)]
    pub level: Level,
    /// Test hook: run the oracle suites against an exact oracle biased by 1/16.
    #[arg(long)]
    corrupt_oracle: bool,
}

struct Suite {
    name: &'static str,
    cases: usize,
    failures: usize,
    detail: Value,
}

impl Suite {
    fn json(&self) -> Value {
        json!({ "name": self.name, "cases": self.cases, "failures": self.failures, "pass": self.failures == 0, "detail": self.detail })
    }
}

/// Input-size limit of each suite.
struct Caps {
    n: usize,
    weight_m: usize,
    circuits: usize,
}

fn axiom_suites(
    oracle: &dyn CountingOracle<Rational>,
    caps: &Caps,
    ctx: &Ctx,
    rng: &mut ChaCha20Rng,
) -> CliResult<Vec<Suite>> {
    let tracing = TracingOracle::new(oracle);
    let coarse = apx::oracle::Precision::new((ctx.delta.inverse() / 2).max(1)).expect("positive");
    for k in 0..caps.circuits {
        let n = 1 + k % caps.n;
        let c = Circuit::random(n, 1, 2 * n + 3, rng);
        for q in [&c, &c.fix_last(false)?, &c.fix_last(true)?] {
            tracing.query(q, ctx.delta)?;
        }
        tracing.query(&c, coarse)?;
        tracing.query(&Circuit::constant(n, k % 2 == 0), ctx.delta)?;
    }
    let trace: QueryTrace<Rational> = tracing.into_trace();
    let report = check_axioms(&trace, ctx.beta)?;
    let count = |a: Axiom| report.violations.iter().filter(|v| v.axiom == a).count();
    let mk = |name, a, cases| Suite { name, cases, failures: count(a), detail: Value::Null };
    Ok(vec![
        mk("basic-axiom", Axiom::Basic, trace.len()),
        mk("boundary-axiom", Axiom::Boundary, caps.circuits),
        Suite {
            detail: json!({ "max_gap": rat(&report.max_precision_gap) }),
            ..mk("precision-consistency", Axiom::PrecisionConsistency, report.precision_pairs)
        },
        Suite {
            detail: json!({ "max_gap": rat(&report.max_local_gap) }),
            ..mk("local-consistency", Axiom::LocalConsistency, report.local_triples)
        },
    ])
}

fn less_than_t(caps: &Caps, ctx: &Ctx) -> CliResult<Suite> {
    let (mut cases, mut failures) = (0, 0);
    for n in 1..=caps.n.min(10) {
        for t in 0..=(1u128 << n) {
            let c = Circuit::threshold_less_than(n, t)?;
            let want = Rational::new((t as u64).into(), (1u64 << n).into());
            cases += 1;
            if exact_count(&c, ctx.cap)? != want {
                failures += 1;
            }
        }
    }
    Ok(Suite { name: "less-than-t", cases, failures, detail: Value::Null })
}

fn avg_sampler_suite(caps: &Caps, ctx: &Ctx, rng: &mut ChaCha20Rng) -> CliResult<Suite> {
    let oracle = ExactOracle::<Rational>::new(ctx.cap);
    let mut failures = 0;
    let cases = 20;
    for _ in 0..cases {
        let n = rng.gen_range(2..=caps.n);
        let vars = (0..rng.gen_range(1..=3))
            .map(|_| random_variable::<Rational, _>(n, 2, false, rng, ctx.cap))
            .collect::<apx::Result<Vec<_>>>()?;
        let coeffs = vars.iter().map(|_| Rational::from_ratio(rng.gen_range(-3..=3), 2)).collect();
        let l = LinearCombination::new(n, vars, coeffs)?;
        let run = avg_sampler(&l, n, &oracle, ctx.delta)?;
        if run.final_value() < run.initial {
            failures += 1;
        }
    }
    Ok(Suite { name: "avg-sampler", cases, failures, detail: Value::Null })
}

fn inequalities(caps: &Caps, ctx: &Ctx, rng: &mut ChaCha20Rng) -> CliResult<Suite> {
    let oracle = ExactOracle::<Rational>::new(ctx.cap);
    let suite = inequality_suite::<Rational, _>(rng, caps.n, caps.n, ctx.delta, ctx.beta, ctx.cap)?;
    let mut failed = Vec::new();
    for inst in &suite {
        if !verify_inequality(inst, &oracle, ctx.delta, ctx.beta, ctx.cap)?.pass {
            failed.push(inst.name());
        }
    }
    Ok(Suite { name: "inequalities", cases: suite.len(), failures: failed.len(), detail: json!(failed) })
}

fn weightcode(caps: &Caps) -> CliResult<Suite> {
    let (mut cases, mut failures) = (0, 0);
    for m in 1..=caps.weight_m {
        for k in 0..=m {
            let code = WeightCode::new(m, k);
            for idx in 0..1u64 << m {
                let y = bits::index_to_bits(idx, m);
                if bits::weight(&y) > k {
                    continue;
                }
                cases += 1;
                if code.decode(&code.encode(&y)?)? != y {
                    failures += 1;
                }
            }
        }
    }
    Ok(Suite { name: "weightcode-roundtrip", cases, failures, detail: Value::Null })
}

fn blr_suite(ctx: &Ctx) -> CliResult<Suite> {
    let oracle = ExactOracle::<Rational>::new(ctx.cap);
    let (mut cases, mut failures) = (0, 0);
    let eps = Rational::from_ratio(1, 100);
    for n in 1..=3 {
        for idx in 0..1u64 << n {
            let z = bits::index_to_bits(idx, n);
            let c = linear_function(&z);
            cases += 1;
            let rate = blr_test(&c, &oracle, ctx.delta)?;
            let dec = blr_decode(&c, &oracle, ctx.delta, ctx.beta, &eps)?;
            if rate != Rational::from_count(0) || dec.z.as_deref() != Some(&z[..]) {
                failures += 1;
            }
        }
    }
    Ok(Suite { name: "blr-linear", cases, failures, detail: Value::Null })
}

fn potential_recursion(caps: &Caps, rng: &mut ChaCha20Rng) -> CliResult<Suite> {
    let (mut cases, mut failures) = (0, 0);
    for _ in 0..10 {
        let n = rng.gen_range(4..=caps.n.max(4));
        let sets: Vec<BTreeSet<usize>> = (0..rng.gen_range(1..=2 * n))
            .map(|_| (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(1..=n)).collect())
            .collect();
        let sys = SetSystem::new(n, sets, 0)?;
        let pot = GeneralPotential::new(&sys, 1, 2);
        let p = Rational::from_ratio(rng.gen_range(1..n as i64), n as u64);
        let q = Rational::from_count(1) - p.clone();
        let mut frontier = vec![StarString::empty()];
        while let Some(x) = frontier.pop() {
            if x.len() == n {
                continue;
            }
            let (xs, xc) = (x.pushed(Mark::Star), x.pushed(Mark::Circle));
            cases += 1;
            if pot.eval(&x, &p) != p.clone() * pot.eval(&xs, &p) + q.clone() * pot.eval(&xc, &p) {
                failures += 1;
            }
            frontier.push(xs);
            frontier.push(xc);
        }
    }
    Ok(Suite { name: "potential-recursion", cases, failures, detail: Value::Null })
}

fn parity_suite(caps: &Caps, ctx: &Ctx, rng: &mut ChaCha20Rng) -> CliResult<Suite> {
    let n = 2 * caps.n;
    let cases = 10;
    let mut failures = 0;
    for _ in 0..cases {
        let gates = rng.gen_range(1..n * n);
        let c = LayeredAc0::random_depth2(n, gates, 5, rng)?;
        let r = parity_separating_input(&c, &RestrictionConfig::default(), ctx.cap)?;
        if c.eval(&r.x)? == bits::parity(&r.x) {
            failures += 1;
        }
    }
    Ok(Suite { name: "parity-separation", cases, failures, detail: Value::Null })
}

fn reduction_soundness(ctx: &Ctx, rng: &mut ChaCha20Rng) -> CliResult<Suite> {
    let cases = 50;
    let (mut failures, mut found) = (0, 0);
    for t in 0..cases {
        let inst = random_exact_regime_instance(rng)?;
        let trial = reduction_soundness_trial(&inst, Regime::ExactLength, ctx.seed.wrapping_add(t), 1000)?;
        found += trial.lossy_solution.is_some() as usize;
        if !trial.sound() {
            failures += 1;
        }
    }
    Ok(Suite {
        name: "reduction-soundness",
        cases: cases as usize,
        failures,
        detail: json!({ "solutions_found": found }),
    })
}

pub fn selftest(a: &SelftestArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let caps = match a.level {
        Level::Quick => Caps { n: 8.min(ctx.cap), weight_m: 10.min(ctx.cap), circuits: 60 },
        Level::Full => Caps { n: 12.min(ctx.cap), weight_m: 16.min(ctx.cap), circuits: 500 },
    };
    let mut rng = ChaCha20Rng::seed_from_u64(ctx.seed);
    let exact = ExactOracle::<Rational>::new(ctx.cap);
    let biased = BiasedOracle::new(&exact, Rational::from_ratio(1, 16));
    let oracle: &dyn CountingOracle<Rational> = if a.corrupt_oracle { &biased } else { &exact };
    let mut suites = axiom_suites(oracle, &caps, ctx, &mut rng)?;
    suites.push(less_than_t(&caps, ctx)?);
    suites.push(avg_sampler_suite(&caps, ctx, &mut rng)?);
    suites.push(inequalities(&caps, ctx, &mut rng)?);
    suites.push(weightcode(&caps)?);
    suites.push(blr_suite(ctx)?);
    suites.push(potential_recursion(&caps, &mut rng)?);
    suites.push(parity_suite(&caps, ctx, &mut rng)?);
    if a.level == Level::Full {
        suites.push(reduction_soundness(ctx, &mut rng)?);
    }
    let pass = suites.iter().all(|s| s.failures == 0);
    Ok(Outcome::new(pass)
        .with("level", a.level.name())
        .with("oracle", oracle.name())
        .with("suites", suites.iter().map(Suite::json).collect::<Vec<_>>()))
}
