use apx::bits::{index_to_bits, parse_bits};
use apx::oracle::{
    check_axioms, empirical_count, exact_count, find_local_violation, sample_count, sample_size, Axiom, BiasedOracle,
    QueryTrace, TracingOracle,
};
use apx::{
    Builder, Circuit, CountingOracle, EmpiricalOracle, ExactOracle, FlatDistribution, Permutation, Precision, Rational,
    Result, Scalar,
};
use num_bigint::BigInt;
use num_traits::Signed;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

const CAP: usize = 20;

fn q(a: i64, b: u64) -> Rational {
    Rational::from_ratio(a, b)
}

fn prec(k: u64) -> Precision {
    Precision::new(k).unwrap()
}

/// Accepting inputs counted one at a time.
fn brute(c: &Circuit) -> Rational {
    let n = c.num_inputs();
    let hits = (0..1u64 << n).filter(|&i| c.eval_bit(&index_to_bits(i, n)).unwrap()).count();
    Rational::new(BigInt::from(hits), BigInt::from(1u64 << n))
}

fn dist(lines: &[&str]) -> FlatDistribution {
    FlatDistribution::new(lines.iter().map(|s| parse_bits(s).unwrap()).collect()).unwrap()
}

fn random_circuit(n: usize, seed: u64) -> Circuit {
    Circuit::random(n, 1, 3 * n + 4, &mut ChaCha20Rng::seed_from_u64(seed))
}

struct Constant(Rational);

impl CountingOracle<Rational> for Constant {
    fn query(&self, _c: &Circuit, _delta: Precision) -> Result<Rational> {
        Ok(self.0.clone())
    }

    fn name(&self) -> String {
        "constant".into()
    }
}

#[test]
fn exact_count_examples() {
    assert_eq!(exact_count(&Circuit::null(3), CAP).unwrap(), q(0, 1));
    assert_eq!(exact_count(&Circuit::parity(5), CAP).unwrap(), q(1, 2));
    assert_eq!(exact_count(&Circuit::threshold_less_than(3, 5).unwrap(), CAP).unwrap(), q(5, 8));
    assert!(exact_count(&Circuit::parity(21), CAP).is_err());
    assert!(exact_count(&Circuit::identity(2), CAP).is_err());
}

#[test]
fn threshold_counts_are_forced() {
    for n in 0..=6usize {
        for t in 0..=(1u64 << n) {
            let c = Circuit::threshold_less_than(n, t as u128).unwrap();
            assert_eq!(exact_count(&c, CAP).unwrap(), Rational::new(BigInt::from(t), BigInt::from(1u64 << n)));
        }
    }
}

#[test]
fn sample_count_examples() {
    for seed in 0..5 {
        assert_eq!(sample_count(&Circuit::null(8), prec(10), 0.05, seed).unwrap(), q(0, 1));
        assert_eq!(sample_count(&Circuit::truth(8), prec(10), 0.05, seed).unwrap(), q(1, 1));
    }
    let v = sample_count(&Circuit::parity(8), prec(20), 0.01, 7).unwrap();
    assert!((v - exact_count(&Circuit::parity(8), CAP).unwrap()).abs() <= q(1, 20));
    assert!(sample_count(&Circuit::parity(8), prec(20), 0.0, 7).is_err());
    assert!(sample_count(&Circuit::parity(8), prec(20), 1.0, 7).is_err());
    assert_eq!(sample_size(prec(10), 0.1), ((20f64).ln() * 50.0).ceil() as u64);
}

#[test]
fn sampling_failure_rate_within_gamma() {
    let (gamma, delta) = (0.1, prec(10));
    for seed in 0..3u64 {
        let c = random_circuit(10, seed);
        let exact = exact_count(&c, CAP).unwrap();
        let bad = (0..1000u64)
            .filter(|&t| (sample_count(&c, delta, gamma, 1000 * seed + t).unwrap() - exact.clone()).abs() > q(1, 10))
            .count();
        assert!(bad as f64 <= 1000.0 * gamma * 1.5, "{bad} of 1000 trials missed");
    }
}

#[test]
fn empirical_count_examples() {
    let all = dist(&["00", "01", "10", "11"]);
    assert_eq!(empirical_count(&Circuit::null(2), &all).unwrap(), q(0, 1));
    assert_eq!(empirical_count(&Circuit::and_all(2), &all).unwrap(), q(1, 4));
    let zeros = dist(&["00", "00"]);
    assert_eq!(empirical_count(&Circuit::projection(2, 2).unwrap(), &zeros).unwrap(), q(0, 1));
    assert!(empirical_count(&Circuit::parity(3), &zeros).is_err());
    assert!(FlatDistribution::new(vec![]).is_err());
    assert!(FlatDistribution::parse("01\n1\n").is_err());
}

#[test]
fn empirical_count_reads_prefix() {
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    for _ in 0..20 {
        let k = rng.gen_range(1..=8);
        let t = rng.gen_range(0..=k);
        let strings: Vec<Vec<bool>> = (0..rng.gen_range(1..40)).map(|_| (0..k).map(|_| rng.gen()).collect()).collect();
        let c = random_circuit(t, rng.gen());
        let hits = strings.iter().filter(|s| c.eval_bit(&s[..t]).unwrap()).count();
        let want = Rational::new(BigInt::from(hits), BigInt::from(strings.len()));
        let d = FlatDistribution::new(strings).unwrap();
        assert_eq!(empirical_count(&c, &d).unwrap(), want);
    }
}

#[test]
fn exact_traces_have_no_violations() {
    let exact = ExactOracle::<Rational>::new(CAP);
    let tracer = TracingOracle::new(&exact);
    for seed in 0..40 {
        let c = random_circuit(1 + seed as usize % 8, seed);
        for k in [3u64, 10, 100] {
            tracer.query(&c, prec(k)).unwrap();
            if c.num_inputs() > 0 {
                tracer.query(&c.fix_last(false).unwrap(), prec(k)).unwrap();
                tracer.query(&c.fix_last(true).unwrap(), prec(k)).unwrap();
            }
        }
        tracer.query(&Circuit::constant(seed as usize % 5, seed % 2 == 0), prec(7)).unwrap();
    }
    let report = check_axioms(&tracer.into_trace(), prec(1_000_000)).unwrap();
    assert!(report.passed());
    assert!(report.local_triples > 0 && report.precision_pairs > 0);
    assert_eq!(report.max_local_gap, q(0, 1));
    assert_eq!(report.max_precision_gap, q(0, 1));
}

#[test]
fn boundary_violation_is_reported() {
    let mut trace = QueryTrace::<Rational>::default();
    trace.push(Circuit::null(3), prec(10), q(1, 1));
    let report = check_axioms(&trace, prec(100)).unwrap();
    assert!(report.violations.iter().any(|v| v.axiom == Axiom::Boundary));
    let mut trace = QueryTrace::<Rational>::default();
    trace.push(Circuit::parity(3), prec(10), q(3, 2));
    let report = check_axioms(&trace, prec(100)).unwrap();
    assert!(report.violations.iter().any(|v| v.axiom == Axiom::Basic));
}

#[test]
fn precision_and_local_slack() {
    let c = Circuit::parity(2);
    let mut trace = QueryTrace::<Rational>::default();
    trace.push(c.clone(), prec(10), q(1, 2));
    trace.push(c.clone(), prec(10), q(1, 2) + q(1, 5) + q(1, 100));
    assert!(check_axioms(&trace, prec(100)).unwrap().passed());
    trace.push(c.clone(), prec(10), q(1, 2) + q(1, 5) + q(2, 100));
    let report = check_axioms(&trace, prec(100)).unwrap();
    assert!(report.violations.iter().any(|v| v.axiom == Axiom::PrecisionConsistency));

    let mut trace = QueryTrace::<Rational>::default();
    trace.push(c.clone(), prec(10), q(1, 2));
    trace.push(c.fix_last(false).unwrap(), prec(10), q(1, 2) + q(1, 5) + q(1, 100));
    trace.push(c.fix_last(true).unwrap(), prec(10), q(1, 2) + q(1, 5) + q(1, 100));
    assert!(check_axioms(&trace, prec(100)).unwrap().passed());
    let mut trace = QueryTrace::<Rational>::default();
    trace.push(c.clone(), prec(10), q(1, 2));
    trace.push(c.fix_last(false).unwrap(), prec(10), q(1, 2) + q(1, 5) + q(2, 100));
    trace.push(c.fix_last(true).unwrap(), prec(10), q(1, 2) + q(1, 5) + q(2, 100));
    let report = check_axioms(&trace, prec(100)).unwrap();
    assert!(report.violations.iter().any(|v| v.axiom == Axiom::LocalConsistency));
}

#[test]
fn empirical_traces_keep_first_three_axioms() {
    let mut rng = ChaCha20Rng::seed_from_u64(21);
    for _ in 0..20 {
        let strings: Vec<Vec<bool>> = (0..rng.gen_range(1..10)).map(|_| (0..6).map(|_| rng.gen()).collect()).collect();
        let emp = EmpiricalOracle::<Rational>::new(FlatDistribution::new(strings).unwrap());
        let tracer = TracingOracle::new(&emp);
        for _ in 0..10 {
            let c = random_circuit(rng.gen_range(0..=6), rng.gen());
            for k in [5u64, 50] {
                tracer.query(&c, prec(k)).unwrap();
                if c.num_inputs() > 0 {
                    tracer.query(&c.fix_last(false).unwrap(), prec(k)).unwrap();
                    tracer.query(&c.fix_last(true).unwrap(), prec(k)).unwrap();
                }
            }
            tracer.query(&Circuit::constant(rng.gen_range(0..=6), rng.gen()), prec(5)).unwrap();
        }
        let report = check_axioms(&tracer.into_trace(), prec(100)).unwrap();
        assert!(report.passed_except_local());
    }
}

#[test]
fn descent_examples() {
    let exact = ExactOracle::<Rational>::new(CAP);
    for seed in 0..10 {
        let c = random_circuit(6, seed);
        assert!(find_local_violation(&exact, &c, prec(10), prec(10), CAP).unwrap().is_none());
    }
    let half = Constant(q(1, 2));
    let v = find_local_violation(&half, &Circuit::null(4), prec(10), prec(10), CAP).unwrap().unwrap();
    assert_eq!(v.axiom, Axiom::Boundary);
    assert_eq!(v.circuit.num_inputs(), 0);
    assert_eq!(v.suffix, vec![false; 4]);
    assert_eq!(v.gap, q(1, 2));

    let emp = EmpiricalOracle::<Rational>::new(dist(&["00", "00"]));
    let x2 = Circuit::projection(2, 2).unwrap();
    let v = find_local_violation(&emp, &x2, prec(10), prec(10), CAP).unwrap().unwrap();
    assert_eq!(v.axiom, Axiom::LocalConsistency);
    assert!(v.suffix.is_empty());
    assert_eq!(v.gap, q(1, 2));
}

#[test]
fn biased_oracle_is_caught() {
    let exact = ExactOracle::<Rational>::new(CAP);
    let biased = BiasedOracle::new(&exact, q(1, 16));
    let c = random_circuit(5, 3);
    assert!(find_local_violation(&biased, &c, prec(10), prec(10), CAP).unwrap().is_some());
}

#[test]
fn dueling_sequence_recovers_exact_count() {
    for seed in 0..20 {
        let n = 1 + seed as usize % 10;
        let c = random_circuit(n, seed);
        // P_i over prefixes of length i, built by halving from P_n = c.
        let mut level: Vec<Rational> =
            (0..1u64 << n).map(|i| q(c.eval_bit(&index_to_bits(i, n)).unwrap() as i64, 1)).collect();
        for _ in 0..n {
            let half = level.len() / 2;
            // Index bit n is the top bit, so prefix x_{≤i} pairs entries j and j+half.
            level = (0..half).map(|j| (level[j].clone() + level[j + half].clone()) / q(2, 1)).collect();
        }
        assert_eq!(level[0], exact_count(&c, CAP).unwrap());
    }
}

#[test]
fn generic_scalars_agree() {
    for seed in 0..20 {
        let c = random_circuit(8, seed);
        let r: Rational = ExactOracle::new(CAP).query(&c, prec(10)).unwrap();
        let f: f64 = ExactOracle::new(CAP).query(&c, prec(10)).unwrap();
        let s: f32 = ExactOracle::new(CAP).query(&c, prec(10)).unwrap();
        assert_eq!(f, r.to_f64_lossy());
        assert!((s as f64 - f).abs() < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_matches_brute_force(n in 0usize..=12, seed in any::<u64>()) {
        let c = random_circuit(n, seed);
        prop_assert_eq!(exact_count(&c, CAP).unwrap(), brute(&c));
    }

    #[test]
    fn local_consistency_is_exact(n in 1usize..=16, seed in any::<u64>()) {
        let c = random_circuit(n, seed);
        let p = exact_count(&c, CAP).unwrap();
        let p0 = exact_count(&c.fix_last(false).unwrap(), CAP).unwrap();
        let p1 = exact_count(&c.fix_last(true).unwrap(), CAP).unwrap();
        prop_assert_eq!(p, (p0 + p1) / q(2, 1));
    }

    #[test]
    fn monotone_pairs_count_monotonically(n in 1usize..=10, s1 in any::<u64>(), s2 in any::<u64>()) {
        let c2 = random_circuit(n, s1);
        let h = random_circuit(n, s2);
        let mut b = Builder::new(n);
        let w = b.inputs(1..=n);
        let a = b.embed_bit(&c2, &w);
        let g = b.embed_bit(&h, &w);
        let out = b.and(vec![a, g]);
        let c1 = b.finish_bit(out);
        for i in 0..1u64 << n {
            let x = index_to_bits(i, n);
            prop_assert!(!c1.eval_bit(&x).unwrap() || c2.eval_bit(&x).unwrap());
        }
        prop_assert!(exact_count(&c1, CAP).unwrap() <= exact_count(&c2, CAP).unwrap());
    }

    #[test]
    fn symmetry_and_complement(seed in any::<u64>(), images in Just((1..=7usize).collect::<Vec<_>>()).prop_shuffle()) {
        let c = random_circuit(7, seed);
        let p = exact_count(&c, CAP).unwrap();
        let pi = Permutation::new(images).unwrap();
        prop_assert_eq!(exact_count(&c.permute_inputs(&pi).unwrap(), CAP).unwrap(), p.clone());
        prop_assert_eq!(exact_count(&c.negate(), CAP).unwrap() + p.clone(), q(1, 1));
        let same = c.compose(&Circuit::identity(7)).unwrap();
        prop_assert!(same.function_equal(&c, CAP).unwrap());
        prop_assert_eq!(exact_count(&same, CAP).unwrap(), p.clone());
        if p > q(0, 1) {
            let w = c.find_accepting(CAP).unwrap().unwrap();
            prop_assert!(c.eval_bit(&w).unwrap());
        } else {
            prop_assert!(c.find_accepting(CAP).unwrap().is_none());
        }
    }

    #[test]
    fn empirical_ignores_list_order(seed in any::<u64>(), strings in proptest::collection::vec(proptest::collection::vec(any::<bool>(), 5), 1..30)) {
        let c = random_circuit(4, seed);
        let mut shuffled = strings.clone();
        shuffled.reverse();
        shuffled.rotate_left(seed as usize % strings.len());
        let a = empirical_count(&c, &FlatDistribution::new(strings).unwrap()).unwrap();
        let b = empirical_count(&c, &FlatDistribution::new(shuffled).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }
}
