//! `restrict` and `parity`.

use std::path::{Path, PathBuf};

use apx::ac0::LayeredAc0File;
use apx::bits::format_bits;
use apx::restriction::{
    derandomized_restriction, parity_separating_input, select_subset, select_subset_run, RestrictionConfig,
};
use apx::{knf_apply_restriction, Knf, LayeredAc0, Rational, Restriction, Simplification};
use clap::{Args, Subcommand};
use serde_json::{json, Value};

use crate::common::*;

#[derive(Args, Debug, Clone)]
pub struct ConfigArgs {
    /// Live-literal bound after restriction.
    #[arg(long, default_value_t = 4)]
    b: usize,
    /// Live-literal bound for layer-2 gates.
    #[arg(long, default_value_t = 4)]
    b2: usize,
    /// Size exponent.
    #[arg(long, default_value_t = 2)]
    k: usize,
}

impl ConfigArgs {
    fn config(&self) -> RestrictionConfig {
        RestrictionConfig { b: self.b, b2: self.b2, k: self.k }
    }
}

#[derive(Subcommand, Debug)]
pub enum RestrictCommand {
    /// Greedy subset selection with narrow-or-wide witnesses.
    Select {
        /// JSON array of formulas.
        #[arg(long)]
        formulas: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: usize,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Simplify every formula under a restriction.
    Apply {
        #[arg(long)]
        formulas: PathBuf,
        /// One of `0`, `1`, `*` per variable.
        #[arg(long)]
        restriction: String,
    },
    /// Selection followed by the derandomized restriction.
    Pipeline {
        #[arg(long)]
        formulas: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: usize,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
}

impl RestrictCommand {
    pub fn name(&self) -> &'static str {
        match self {
            RestrictCommand::Select { .. } => "select",
            RestrictCommand::Apply { .. } => "apply",
            RestrictCommand::Pipeline { .. } => "pipeline",
        }
    }
}

fn read_formulas(path: &Path) -> CliResult<Vec<Knf>> {
    let raw: Vec<Knf> = read_json(path)?;
    Ok(raw.into_iter().map(Knf::validated).collect::<apx::Result<Vec<_>>>()?)
}

fn simplification(s: &Simplification) -> Value {
    match s {
        Simplification::Trivialized(v) => json!({ "trivialized": v }),
        Simplification::Survives { live, residual } => json!({
            "live": live.iter().map(|l| l.to_signed()).collect::<Vec<_>>(),
            "live_vars": s.live_vars(),
            "residual": to_value(residual),
        }),
    }
}

pub fn restrict(op: &RestrictCommand, _ctx: &Ctx) -> CliResult<Outcome> {
    match op {
        RestrictCommand::Select { formulas, n, t, cfg } => {
            let fs = read_formulas(formulas)?;
            let run = select_subset_run::<Rational>(&fs, *n, *t, &cfg.config())?;
            let pass = run.greedy_ok && run.witnesses.iter().all(Option::is_some);
            Ok(Outcome::new(pass)
                .with("set", to_value(&run.set))
                .with("greedy_set", to_value(&run.greedy_set))
                .with("star_string", run.x.to_string())
                .with("greedy_ok", run.greedy_ok)
                .with("path", rats(&run.path))
                .with("witnesses", to_value(&run.witnesses)))
        }
        RestrictCommand::Apply { formulas, restriction } => {
            let fs = read_formulas(formulas)?;
            let rho = Restriction::parse(restriction)?;
            let results = fs
                .iter()
                .map(|f| knf_apply_restriction(f, &rho).map(|s| simplification(&s)))
                .collect::<apx::Result<Vec<_>>>()?;
            Ok(Outcome::new(true).with("restriction", rho.to_text()).with("formulas", results))
        }
        RestrictCommand::Pipeline { formulas, n, t, cfg } => {
            let fs = read_formulas(formulas)?;
            let cfg = cfg.config();
            let sel = select_subset::<Rational>(&fs, *n, *t, &cfg)?;
            let d = derandomized_restriction::<Rational>(&fs, &sel.witnesses, &sel.set, *n, &cfg)?;
            Ok(Outcome::new(true)
                .with("set", to_value(&sel.set))
                .with("witnesses", to_value(&sel.witnesses))
                .with("selection_path", rats(&sel.run.path))
                .with("restriction", d.restriction.to_text())
                .with("derandomization_path", rats(&d.path))
                .with("live", to_value(&d.live))
                .with("trivialized", to_value(&d.trivialized)))
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum ParityCommand {
    /// Find `x` with `C(x) ≠ x₁ ⊕ … ⊕ xₙ`.
    Separate {
        /// Layered AC⁰ circuit file.
        #[arg(long)]
        circuit: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
}

impl ParityCommand {
    pub fn name(&self) -> &'static str {
        match self {
            ParityCommand::Separate { .. } => "separate",
        }
    }
}

pub fn parity(op: &ParityCommand, ctx: &Ctx) -> CliResult<Outcome> {
    let ParityCommand::Separate { circuit, cfg } = op;
    let f: LayeredAc0File = read_json(circuit)?;
    let c = LayeredAc0::from_file(&f)?;
    let r = parity_separating_input(&c, &cfg.config(), ctx.cap)?;
    Ok(Outcome::new(r.circuit_value != r.parity)
        .with("x", format_bits(&r.x))
        .with("circuit_value", r.circuit_value)
        .with("parity", r.parity)
        .with("restriction", r.restriction.clone())
        .with("stages_used", r.stages_used)
        .with("method", to_value(&r.method))
        .with("trace", to_value(&r.trace)))
}
