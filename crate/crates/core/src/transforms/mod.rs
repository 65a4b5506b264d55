//! Distinguisher-to-predictor transforms, linearity testing, polynomial
//! identity testing, linear hashing and one-way protocol simulation.

mod blr;
mod extract;
mod hashing;
mod protocol;
mod sz;
mod yao;

pub use blr::{
    blr_decode, blr_self_correct, blr_test, blr_test_circuit, disagreement_circuit, linear_function, BlrDecodeReport,
    SelfCorrection,
};
pub use extract::{extract_predictor, predictor_advantage_on};
pub use hashing::{linear_hash_collision_bound, linear_hash_collision_circuit, HashReport};
pub use protocol::{equality_function, simulate_protocol, OneWayProtocol, ProtocolMode, ProtocolReport};
pub use sz::{schwartz_zippel_check, FieldPoly, SzReport, Term};
pub use yao::{predictor_advantage_on_seeds, yao_predictor, YaoOutcome};

use serde::Serialize;

use crate::circuit::Circuit;

/// A circuit guessing bit `index` of a string from the bits before it.
#[derive(Clone, Debug, Serialize)]
pub struct Predictor<T> {
    pub index: usize,
    pub circuit: Circuit,
    /// Success probability minus 1/2.
    #[serde(skip)]
    pub advantage: T,
}
