//! Approximate-counting oracles over Boolean circuits and the constructive
//! algorithms built on them.
//!
//! The crate is generic over the [`Scalar`] used for probabilities and
//! expectations. Exact rationals ([`Rational`]) are the reference choice:
//! every identity checked by the test-suite holds with zero slack there.
//! `f64` and `f32` instantiations run the same code with rounding.

pub mod ac0;
pub mod bits;
pub mod circuit;
pub mod error;
pub mod knf;
pub mod oracle;
pub mod randvar;
pub mod restriction;
pub mod scalar;
pub mod tfnp;
pub mod transforms;

pub use ac0::{GateKind, LayeredAc0};
pub use bits::Bits;
pub use circuit::{Builder, Circuit, Gate, Permutation, DEFAULT_CAP};
pub use error::{ApxError, Result};
pub use knf::{knf_apply_restriction, Clause, Connective, Knf, Literal, Restriction, Simplification};
pub use oracle::{CountingOracle, EmpiricalOracle, ExactOracle, FlatDistribution, Precision, SamplingOracle};
pub use randvar::RandomVariable;
pub use scalar::Scalar;

/// Exact arbitrary-precision rational, the reference scalar.
pub type Rational = num_rational::BigRational;

/// Exhaustive oracle over exact rationals.
pub type ExactRationalOracle = ExactOracle<Rational>;
/// Exhaustive oracle over `f64`.
pub type ExactF64Oracle = ExactOracle<f64>;
/// Random variable with exact rational support.
pub type RationalVariable = RandomVariable<Rational>;
/// Random variable with `f64` support.
pub type F64Variable = RandomVariable<f64>;
