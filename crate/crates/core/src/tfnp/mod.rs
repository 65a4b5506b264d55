//! Total search problems: Refuter(Yao), LossyCode, the deterministic
//! reduction between them, and iterated compression schemes.

mod compress;
mod encoding;
mod lossy;
mod reduction;
mod refuter;
mod soundness;
mod weightcode;

pub use compress::{
    masked_failure, output_length, recurrence, stretch_amplify, worstcase_from_average, BaseScheme, IteratedScheme,
    Round, SeedUse,
};
pub use encoding::{decode_circuit, description_size, encode_circuit};
pub use lossy::{
    check_lossycode_solution, count_lossycode_solutions, find_lossycode_solution, solve_lossycode_randomized,
    CircuitLossyCode, LossyCode, LossySearch,
};
pub use reduction::{refuter_to_lossycode, ReductionLayout, RefuterLossyCode, Regime};
pub use refuter::{
    check_refuter_solution, evaluate_refuter, random_distribution, solve_refuter_randomized, successes,
    BuiltinGenerator, PredictorGenerator, RefuterInstance, RefuterInstanceFile, RefuterSearch, RefuterVerdict,
};
pub use soundness::{random_exact_regime_instance, reduction_soundness_trial, SoundnessTrial};
pub use weightcode::{bounded_weight_count, WeightCode};
