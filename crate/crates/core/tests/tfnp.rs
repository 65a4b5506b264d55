use apx::bits::{index_to_bits, parse_bits, weight};
use apx::tfnp::{
    bounded_weight_count, check_lossycode_solution, check_refuter_solution, count_lossycode_solutions,
    description_size, evaluate_refuter, find_lossycode_solution, masked_failure, output_length,
    random_exact_regime_instance, reduction_soundness_trial, refuter_to_lossycode, solve_lossycode_randomized,
    solve_refuter_randomized, stretch_amplify, worstcase_from_average, BaseScheme, BuiltinGenerator, CircuitLossyCode,
    LossyCode, RefuterInstance, Regime, WeightCode,
};
use apx::{ApxError, Builder, Circuit, FlatDistribution, Rational, Scalar};
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

const CAP: usize = 20;

fn q(a: i64, b: u64) -> Rational {
    Rational::from_ratio(a, b)
}

fn bits(s: &str) -> Vec<bool> {
    parse_bits(s).unwrap()
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, j| acc * (n - j) / (j + 1))
}

fn constant_instance(n: usize, m: usize, delta: Rational) -> RefuterInstance {
    let s = description_size(&Circuit::constant(0, false)).unwrap();
    RefuterInstance::builtin(n, m, s, delta, BuiltinGenerator::Constant { index: 1, value: false }).unwrap()
}

#[test]
fn refuter_check_examples() {
    let inst = constant_instance(3, 4, q(1, 4));
    let balanced = FlatDistribution::new(vec![bits("000"), bits("100"), bits("011"), bits("111")]).unwrap();
    assert!(check_refuter_solution(&inst, &balanced).unwrap());
    let zeros = FlatDistribution::new(vec![bits("000"); 4]).unwrap();
    assert!(!check_refuter_solution(&inst, &zeros).unwrap());

    let half = constant_instance(3, 4, q(1, 2));
    assert!(!check_refuter_solution(&half, &zeros).unwrap());
    let one_miss = FlatDistribution::new(vec![bits("000"), bits("000"), bits("000"), bits("100")]).unwrap();
    assert!(check_refuter_solution(&half, &one_miss).unwrap());

    let short = FlatDistribution::new(vec![bits("000"); 3]).unwrap();
    assert!(check_refuter_solution(&inst, &short).is_err());
    let tight =
        RefuterInstance::builtin(3, 4, 0, q(1, 4), BuiltinGenerator::Constant { index: 1, value: false }).unwrap();
    assert!(check_refuter_solution(&tight, &balanced).is_err());
}

#[test]
fn refuter_solution_rate_matches_enumeration() {
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    for _ in 0..50 {
        let inst = random_exact_regime_instance(&mut rng).unwrap();
        let strings: Vec<Vec<bool>> = (0..inst.m).map(|_| (0..inst.n).map(|_| rng.gen_bool(0.3)).collect()).collect();
        let d = FlatDistribution::new(strings.clone()).unwrap();
        let v = evaluate_refuter(&inst, &d).unwrap();
        let hits =
            strings.iter().filter(|x| v.predictor.eval_bit(&x[..v.index - 1]).unwrap() == x[v.index - 1]).count();
        assert_eq!(v.success_rate, q(hits as i64, inst.m as u64));
        assert_eq!(v.is_solution, v.success_rate < q(1, 2) + inst.delta.clone());
    }
}

#[test]
fn refuter_randomized_solver() {
    let inst = constant_instance(4, 800, q(1, 2));
    assert!(inst.condition_holds());
    let mut total = 0;
    for seed in 0..100 {
        let r = solve_refuter_randomized(&inst, seed, 10).unwrap();
        let d = r.solution.expect("uniform samples solve the instance");
        assert!(check_refuter_solution(&inst, &d).unwrap());
        total += r.tries;
    }
    assert!(total <= 200, "{total} tries over 100 seeds");

    // Copying bit 1 always succeeds on a distribution with x₂ = x₁; uniform ones fail it.
    let s = description_size(&Circuit::projection(1, 1).unwrap()).unwrap();
    let copy = RefuterInstance::builtin(2, 8, s, q(1, 4), BuiltinGenerator::CopyPrevious { index: 2 }).unwrap();
    let r = solve_refuter_randomized(&copy, 1, 50).unwrap();
    assert!(r.solution.is_some());
    let zeros = FlatDistribution::new(vec![bits("00"); 8]).unwrap();
    assert!(!check_refuter_solution(&copy, &zeros).unwrap());
}

#[test]
fn weight_code_examples() {
    let code = WeightCode::new(4, 1);
    assert_eq!(code.rank(&bits("0000")).unwrap(), BigUint::from(0u8));
    let order = ["0000", "0001", "0010", "0100", "1000"];
    for (r, s) in order.iter().enumerate() {
        assert_eq!(code.rank(&bits(s)).unwrap(), BigUint::from(r));
        assert_eq!(code.unrank(&BigUint::from(r)).unwrap(), bits(s));
        assert_eq!(code.decode(&code.encode(&bits(s)).unwrap()).unwrap(), bits(s));
    }
    assert_eq!(code.codeword_len(), 3);
    assert!(code.unrank(&BigUint::from(5u8)).is_err());
    assert!(WeightCode::new(8, 3).rank(&bits("11110000")).is_err());
}

#[test]
fn weight_code_is_a_bijection() {
    for m in 0..=16usize {
        for k in 0..=m {
            let code = WeightCode::new(m, k);
            let total: u64 = (0..=k as u64).map(|j| binomial(m as u64, j)).sum();
            assert_eq!(bounded_weight_count(m, k), BigUint::from(total));
            let want_len = if total <= 1 { 0 } else { 64 - (total - 1).leading_zeros() as usize };
            assert_eq!(code.codeword_len(), want_len);
            // Exhaustive for small m; all strings of weight ≤ 2 plus a sample otherwise.
            if m > 12 && k > 2 {
                continue;
            }
            let mut ranks = Vec::new();
            for idx in 0..1u64 << m {
                let y = index_to_bits(idx, m);
                if weight(&y) > k {
                    assert!(code.rank(&y).is_err());
                    continue;
                }
                let r = code.rank(&y).unwrap();
                assert_eq!(code.decode(&code.encode(&y).unwrap()).unwrap(), y);
                ranks.push(r);
            }
            ranks.sort();
            let want: Vec<BigUint> = (0..total).map(BigUint::from).collect();
            assert_eq!(ranks, want);
        }
    }
}

#[test]
fn weight_code_roundtrip_for_large_m() {
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    for m in 13..=16usize {
        for k in 3..=m {
            let code = WeightCode::new(m, k);
            for _ in 0..200 {
                let y: Vec<bool> = (0..m).map(|_| rng.gen()).collect();
                match code.rank(&y) {
                    Ok(r) => {
                        assert!(r < *code.count());
                        assert_eq!(code.decode(&code.encode(&y).unwrap()).unwrap(), y);
                    }
                    Err(_) => assert!(weight(&y) > k),
                }
            }
        }
    }
}

#[test]
fn reduction_regime_examples() {
    let g = BuiltinGenerator::Constant { index: 1, value: false };
    let big = RefuterInstance::builtin(8, 1000, 20, q(1, 2), g.clone()).unwrap();
    assert!(big.condition_holds());
    assert!(refuter_to_lossycode(&big, Regime::Paper).is_ok());
    let small = RefuterInstance::builtin(8, 100, 20, q(1, 2), g).unwrap();
    assert!(!small.condition_holds());
    assert!(matches!(refuter_to_lossycode(&small, Regime::Paper), Err(ApxError::RegimeUnmet(_))));
}

#[test]
fn reduction_soundness() {
    let mut rng = ChaCha20Rng::seed_from_u64(2024);
    for t in 0..50 {
        let inst = random_exact_regime_instance(&mut rng).unwrap();
        assert!(inst.n <= 8 && inst.m <= 64);
        let trial = reduction_soundness_trial(&inst, Regime::ExactLength, t, 1000).unwrap();
        let x = trial.lossy_solution.clone().expect("half of all strings are solutions");
        let code = refuter_to_lossycode(&inst, Regime::ExactLength).unwrap();
        assert!(check_lossycode_solution(&code, &x).unwrap());
        let d = code.map_solution(&x).unwrap();
        assert_eq!(d.to_concat(), x);
        assert!(check_refuter_solution(&inst, &d).unwrap());
        assert!(trial.sound());
    }
}

#[test]
fn compressor_inverts_on_successes() {
    let mut rng = ChaCha20Rng::seed_from_u64(99);
    let mut checked = 0;
    for _ in 0..60 {
        let inst = random_exact_regime_instance(&mut rng).unwrap();
        let code = refuter_to_lossycode(&inst, Regime::ExactLength).unwrap();
        for _ in 0..10 {
            let strings: Vec<Vec<bool>> =
                (0..inst.m).map(|_| (0..inst.n).map(|_| rng.gen_bool(0.08)).collect()).collect();
            let d = FlatDistribution::new(strings).unwrap();
            let x = d.to_concat();
            let solved = check_refuter_solution(&inst, &d).unwrap();
            assert_eq!(code.encode_tuple(&d).is_none(), solved);
            if !solved {
                checked += 1;
                assert_eq!(code.decompress(&code.compress(&x).unwrap()).unwrap(), x);
                assert!(!check_lossycode_solution(&code, &x).unwrap());
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn reduction_circuit_export_agrees() {
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let mut exported = 0;
    for _ in 0..40 {
        let inst = random_exact_regime_instance(&mut rng).unwrap();
        if inst.n * inst.m > 16 {
            continue;
        }
        let code = refuter_to_lossycode(&inst, Regime::ExactLength).unwrap();
        let circuits = code.to_circuits(CAP).unwrap();
        for _ in 0..64 {
            let x: Vec<bool> = (0..inst.n * inst.m).map(|_| rng.gen()).collect();
            assert_eq!(circuits.compress(&x).unwrap(), code.compress(&x).unwrap());
            let y = code.compress(&x).unwrap();
            assert_eq!(circuits.decompress(&y).unwrap(), code.decompress(&y).unwrap());
        }
        exported += 1;
    }
    let _ = exported;
}

#[test]
fn lossycode_examples() {
    let inst = CircuitLossyCode::drop_last(3).unwrap();
    assert!(check_lossycode_solution(&inst, &bits("001")).unwrap());
    assert!(!check_lossycode_solution(&inst, &bits("000")).unwrap());
    assert!(check_lossycode_solution(&inst, &bits("01")).is_err());
    let mut rng = ChaCha20Rng::seed_from_u64(12);
    let inst = CircuitLossyCode::random(12, 40, &mut rng).unwrap();
    let count = count_lossycode_solutions(&inst, CAP).unwrap();
    assert!(count >= 1 << 11);
    let found = solve_lossycode_randomized(&inst, 3, 100).unwrap().solution.unwrap();
    assert!(check_lossycode_solution(&inst, &found).unwrap());
}

#[test]
fn lossycode_totality() {
    let mut rng = ChaCha20Rng::seed_from_u64(13);
    for n in 2..=12usize {
        for _ in 0..4 {
            let inst = CircuitLossyCode::random(n, 3 * n, &mut rng).unwrap();
            let count = (0..1u64 << n)
                .filter(|&i| {
                    let x = index_to_bits(i, n);
                    inst.decompressor.eval(&inst.compressor.eval(&x).unwrap()).unwrap() != x
                })
                .count() as u64;
            assert_eq!(count_lossycode_solutions(&inst, CAP).unwrap(), count);
            assert!(count >= 1 << (n - 1));
            assert!(find_lossycode_solution(&inst, CAP).unwrap().is_some());
        }
    }
}

/// Drop-last base scheme on `n`-bit blocks with `r` ignored seed bits.
fn drop_last_scheme(n: usize, r: usize) -> BaseScheme {
    let mut bc = Builder::new(n + r);
    let kept = bc.inputs(1..=n - 1);
    let c = bc.finish(kept);
    let mut bd = Builder::new(n - 1);
    let mut out = bd.inputs(1..=n - 1);
    out.push(bd.constant(false));
    BaseScheme::new(n, r, c, bd.finish(out)).unwrap()
}

fn recurrence_length(n: usize, r: usize, ell: usize, d: usize) -> usize {
    let (mut cur, mut rems) = (ell, 0);
    for _ in 0..d {
        let k = cur / n;
        rems += cur - k * n;
        cur = k * (n - 1);
    }
    cur + rems + d * r
}

#[test]
fn stretch_examples() {
    let id = stretch_amplify(drop_last_scheme(4, 2), 16, 0).unwrap();
    let z: Vec<bool> = (0..16).map(|i| i % 3 == 0).collect();
    assert_eq!(id.output_len(), 16);
    assert_eq!(id.compress(&z, &[]).unwrap(), z);
    assert!(id.roundtrip_ok(&z, &[]).unwrap());

    let s = stretch_amplify(drop_last_scheme(4, 2), 16, 3).unwrap();
    assert_eq!(s.output_len(), recurrence_length(4, 2, 16, 3));
    assert!(Rational::from_count(s.output_len() as u64) <= s.length_bound());
    assert_eq!(s.length_bound(), q(2475, 100));
    assert!(stretch_amplify(drop_last_scheme(4, 2), 0, 3).is_err());
}

#[test]
fn stretch_roundtrip_on_good_blocks() {
    let s = stretch_amplify(drop_last_scheme(4, 0), 8, 2).unwrap();
    for idx in 0..256u64 {
        let z = index_to_bits(idx, 8);
        // Replay the rounds: every compressed block must end in 0.
        let mut cur = z.clone();
        let mut all_good = true;
        for _ in 0..2 {
            let k = cur.len() / 4;
            let mut next = Vec::new();
            for blk in cur[..4 * k].chunks(4) {
                all_good &= !blk[3];
                next.extend_from_slice(&blk[..3]);
            }
            cur = next;
        }
        assert_eq!(s.roundtrip_ok(&z, &[]).unwrap(), all_good, "z = {idx}");
    }
}

#[test]
fn stretch_length_matches_recurrence() {
    for n in 2..=6usize {
        for r in 0..=3usize {
            for ell in 1..=40usize {
                for d in 0..=5usize {
                    let s = stretch_amplify(drop_last_scheme(n, r), ell, d).unwrap();
                    assert_eq!(s.output_len(), recurrence_length(n, r, ell, d));
                    assert_eq!(output_length(n, r, ell, d), s.output_len());
                    assert!(Rational::from_count(s.output_len() as u64) <= s.length_bound());
                }
            }
        }
    }
}

#[test]
fn masked_failure_is_average_rate() {
    let all_ones = Circuit::and_all(3);
    for i in 0..8 {
        assert_eq!(masked_failure(&all_ones, &index_to_bits(i, 3), CAP).unwrap(), q(1, 8));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    for _ in 0..20 {
        let t = Circuit::random(5, 1, 12, &mut rng);
        let avg = apx::oracle::exact_count(&t, CAP).unwrap();
        for i in 0..32 {
            assert_eq!(masked_failure(&t, &index_to_bits(i, 5), CAP).unwrap(), avg);
        }
    }
}

#[test]
fn worst_case_scheme() {
    let base = drop_last_scheme(3, 0);
    let id = worstcase_from_average(base.clone(), 6, 0).unwrap();
    for i in 0..64 {
        assert_eq!(id.failure_probability(&index_to_bits(i, 6), CAP).unwrap(), q(0, 1));
    }
    let w = worstcase_from_average(base.clone(), 6, 2).unwrap();
    assert_eq!(w.seed_len(), 6);
    let per_block = base.failure_rate(&[], CAP).unwrap();
    assert_eq!(per_block, q(1, 2));
    let bound = w.union_bound(&per_block);
    for i in 0..64 {
        let z = index_to_bits(i, 6);
        let fail = w.failure_probability(&z, CAP).unwrap();
        assert!(fail <= bound);
        // The first block alone fails on half the masks.
        assert!(fail >= q(1, 2));
    }
    assert!(worstcase_from_average(drop_last_scheme(3, 1), 6, 2).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn stretch_roundtrips_with_random_seeds(n in 2usize..=5, r in 0usize..=2, ell in 1usize..=24, d in 0usize..=4, seed in any::<u64>()) {
        let s = stretch_amplify(drop_last_scheme(n, r), ell, d).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let z: Vec<bool> = (0..ell).map(|_| rng.gen()).collect();
        let sd: Vec<bool> = (0..s.seed_len()).map(|_| rng.gen()).collect();
        let out = s.compress(&z, &sd).unwrap();
        prop_assert_eq!(out.len(), s.output_len());
        let (back, seeds) = s.decompress(&out).unwrap();
        prop_assert_eq!(seeds, sd);
        prop_assert_eq!(back.len(), ell);
    }
}
