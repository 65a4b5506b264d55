//! Constructive restriction machinery: potentials, subset selection,
//! derandomized restrictions and the parity counterexample finder.

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::Result;
use crate::oracle::{CountingOracle, Precision};
use crate::scalar::Scalar;

mod derand;
mod parity;
mod potential;
mod select;

pub use derand::{derandomization_hypothesis, derandomized_restriction, restriction_potential, DerandResult};
pub use parity::{parity_separating_input, ParityReport, SeparationMethod, StageTrace};
pub use potential::{
    disjoint_decomposition, meets_log_bound, phi_general, phi_small_sets, wide_threshold, GeneralPotential, Mark,
    Piece, PotentialCase, SetSystem, StarString,
};
pub use select::{
    clause_system, find_witness, select_subset, select_subset_run, verify_witness, SelectionResult, SelectionRun,
    SubClause, Witness,
};

/// The lemma constants: live-literal bound `b` after a restriction, layer-2
/// bound `b2` for depth reduction, and the size exponent `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictionConfig {
    pub b: usize,
    pub b2: usize,
    pub k: usize,
}

impl Default for RestrictionConfig {
    fn default() -> Self {
        RestrictionConfig { b: 4, b2: 4, k: 2 }
    }
}

/// Oracle probability that `c` agrees with parity.
pub fn agreement_fraction<T: Scalar, O: CountingOracle<T> + ?Sized>(
    c: &Circuit,
    oracle: &O,
    delta: Precision,
) -> Result<T> {
    oracle.query(&c.parity_tester()?, delta)
}
