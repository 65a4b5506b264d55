use apx::bits::{bits_to_index, index_to_bits, inner, parse_bits, xor};
use apx::oracle::exact_count;
use apx::randvar::approx_expectation;
use apx::transforms::{
    blr_decode, blr_self_correct, blr_test, equality_function, extract_predictor, linear_function,
    linear_hash_collision_bound, predictor_advantage_on, schwartz_zippel_check, simulate_protocol, yao_predictor,
    FieldPoly, OneWayProtocol, Term,
};
use apx::{ApxError, Builder, Circuit, ExactOracle, FlatDistribution, Precision, RandomVariable, Rational, Scalar};
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

fn exact() -> ExactOracle<Rational> {
    ExactOracle::new(CAP)
}

fn bits(s: &str) -> Vec<bool> {
    parse_bits(s).unwrap()
}

fn truth_table(n: usize, f: impl Fn(&[bool]) -> bool) -> Circuit {
    Circuit::from_function(n, 1, CAP, |x| vec![f(x)]).unwrap()
}

/// Linear function on `z` with the outputs at `flips` inverted.
fn corrupted(z: &[bool], flips: &[u64]) -> Circuit {
    let z = z.to_vec();
    let flips = flips.to_vec();
    truth_table(z.len(), move |x| inner(x, &z) ^ flips.contains(&bits_to_index(x)))
}

/// `Pr_{x,y}[c(x)⊕c(y) ≠ c(x⊕y)]` by enumerating pairs.
fn brute_blr_rate(c: &Circuit) -> Rational {
    let n = c.num_inputs();
    let f: Vec<bool> = (0..1u64 << n).map(|i| c.eval_bit(&index_to_bits(i, n)).unwrap()).collect();
    let mut bad = 0i64;
    for x in 0..1u64 << n {
        for y in 0..1u64 << n {
            if f[x as usize] ^ f[y as usize] != f[(x ^ y) as usize] {
                bad += 1;
            }
        }
    }
    q(bad, 1u64 << (2 * n))
}

fn distance_to_linear(c: &Circuit, z: &[bool]) -> Rational {
    let n = c.num_inputs();
    let far = (0..1u64 << n).filter(|&i| {
        let x = index_to_bits(i, n);
        c.eval_bit(&x).unwrap() != inner(&x, z)
    });
    q(far.count() as i64, 1u64 << n)
}

#[test]
fn yao_duplicate_generator() {
    let mut b = Builder::new(2);
    let u = b.inputs(1..=2);
    let g = b.finish(vec![u[0], u[1], u[0], u[1]]);
    let mut b = Builder::new(4);
    let x = b.inputs(1..=4);
    let e1 = b.eq(x[0], x[2]);
    let e2 = b.eq(x[1], x[3]);
    let out = b.and(vec![e1, e2]);
    let c = b.finish_bit(out);
    let o = yao_predictor(&g, &c, &exact(), prec(100), CAP).unwrap();
    assert_eq!(o.gap, q(3, 4));
    assert!(o.predictor.index == 3 || o.predictor.index == 4);
    // Independent check: enumerate all seeds.
    let i = o.predictor.index;
    let hits = (0..4u64)
        .filter(|&s| {
            let out = g.eval(&index_to_bits(s, 2)).unwrap();
            o.predictor.circuit.eval_bit(&out[..i - 1]).unwrap() == out[i - 1]
        })
        .count();
    let adv = q(hits as i64, 4) - q(1, 2);
    assert_eq!(adv, o.predictor.advantage);
    assert!(adv >= q(3, 16));
}

#[test]
fn yao_rejects_small_gaps() {
    let g = Circuit::random(3, 4, 10, &mut ChaCha20Rng::seed_from_u64(1));
    let err = yao_predictor(&g, &Circuit::truth(4), &exact(), prec(100), CAP).unwrap_err();
    assert!(matches!(err, ApxError::InsufficientAdvantage { .. }));
    let c = Circuit::random(4, 1, 12, &mut ChaCha20Rng::seed_from_u64(2));
    let err = yao_predictor(&Circuit::identity(4), &c, &exact(), prec(100), CAP).unwrap_err();
    assert!(matches!(err, ApxError::InsufficientAdvantage { .. }));
}

#[test]
fn yao_advantage_on_random_instances() {
    let mut rng = ChaCha20Rng::seed_from_u64(77);
    let mut certified = 0;
    for _ in 0..200 {
        let m = rng.gen_range(1..=5);
        let n = rng.gen_range(m + 1..=12 - m);
        let g = Circuit::random(m, n, 3 * n, &mut rng);
        let c = Circuit::random(n, 1, 3 * n, &mut rng);
        match yao_predictor(&g, &c, &exact(), prec(100), CAP) {
            Ok(o) => {
                certified += 1;
                let eps = o.epsilon.clone();
                let i = o.predictor.index;
                let hits = (0..1u64 << m)
                    .filter(|&s| {
                        let out = g.eval(&index_to_bits(s, m)).unwrap();
                        o.predictor.circuit.eval_bit(&out[..i - 1]).unwrap() == out[i - 1]
                    })
                    .count();
                let adv = q(hits as i64, 1u64 << m) - q(1, 2);
                assert!(adv >= eps / q(4 * n as i64, 1));
            }
            Err(ApxError::InsufficientAdvantage { .. }) => {}
            Err(e) => panic!("{e}"),
        }
    }
    assert!(certified > 50);
}

#[test]
fn extract_examples() {
    let d = FlatDistribution::new(vec![bits("00"), bits("00")]).unwrap();
    let p = extract_predictor(&d, &Circuit::projection(2, 2).unwrap(), &q(1, 4)).unwrap();
    assert_eq!(p.index, 2);
    assert_eq!(p.advantage, q(1, 2));
    assert_eq!(p.circuit.is_syntactically_constant().unwrap(), Some(false));

    let all = FlatDistribution::new((0..4).map(|i| index_to_bits(i, 2)).collect()).unwrap();
    let c = Circuit::random(2, 1, 6, &mut ChaCha20Rng::seed_from_u64(4));
    assert!(matches!(extract_predictor(&all, &c, &q(0, 1)), Err(ApxError::NoLocalViolation { .. })));

    let d = FlatDistribution::new(vec![bits("10"), bits("11")]).unwrap();
    let x1 = Circuit::projection(2, 1).unwrap();
    assert!(matches!(extract_predictor(&d, &x1, &q(0, 1)), Err(ApxError::NoLocalViolation { .. })));
}

#[test]
fn extract_reaches_half_threshold() {
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let mut found = 0;
    for _ in 0..300 {
        let k = rng.gen_range(2..=6);
        let t = rng.gen_range(1..=k);
        let strings: Vec<Vec<bool>> = (0..rng.gen_range(1..12)).map(|_| (0..k).map(|_| rng.gen()).collect()).collect();
        let d = FlatDistribution::new(strings.clone()).unwrap();
        let c = Circuit::random(t, 1, 3 * t + 3, &mut rng);
        let tau = q(rng.gen_range(0..=4), 16);
        if let Ok(p) = extract_predictor(&d, &c, &tau) {
            found += 1;
            let hits = strings.iter().filter(|u| p.circuit.eval_bit(&u[..t - 1]).unwrap() == u[t - 1]).count();
            let adv = q(hits as i64, strings.len() as u64) - q(1, 2);
            assert_eq!(adv, predictor_advantage_on::<Rational>(&d, t, &p.circuit).unwrap());
            assert!(adv >= tau / q(2, 1));
        }
    }
    assert!(found > 30);
}

#[test]
fn blr_test_examples() {
    let z = bits("101");
    assert_eq!(blr_test(&linear_function(&z), &exact(), prec(10)).unwrap(), q(0, 1));
    assert_eq!(blr_test(&Circuit::truth(3), &exact(), prec(10)).unwrap(), q(1, 1));
    let noisy = corrupted(&z, &[5]);
    let rate = blr_test(&noisy, &exact(), prec(10)).unwrap();
    assert_eq!(rate, brute_blr_rate(&noisy));
    assert!(rate <= q(3, 8));
}

#[test]
fn blr_self_correct_examples() {
    let z = bits("101");
    let eps = q(1, 200);
    for i in 0..8 {
        let x = index_to_bits(i, 3);
        let s = blr_self_correct(&linear_function(&z), &x, &exact(), prec(1000), prec(1000), &eps).unwrap();
        assert_eq!(s.bit, Some(inner(&x, &z)));
        let s = blr_self_correct(&Circuit::null(3), &x, &exact(), prec(1000), prec(1000), &eps).unwrap();
        assert_eq!(s.bit, Some(false));
    }
    let z = bits("110");
    let noisy = corrupted(&z, &[3]);
    let eps = blr_test(&noisy, &exact(), prec(10)).unwrap();
    for i in 0..8 {
        let x = index_to_bits(i, 3);
        let s = blr_self_correct(&noisy, &x, &exact(), prec(1000), prec(1000), &eps).unwrap();
        assert_eq!(s.bit, Some(inner(&x, &z)));
    }
}

#[test]
fn blr_decode_examples() {
    let r = blr_decode(&linear_function(&bits("101")), &exact(), prec(1000), prec(1000), &q(1, 200)).unwrap();
    assert_eq!(r.z, Some(bits("101")));
    let z = bits("110");
    let noisy = corrupted(&z, &[6]);
    let eps = blr_test(&noisy, &exact(), prec(10)).unwrap();
    let r = blr_decode(&noisy, &exact(), prec(1000), prec(1000), &eps).unwrap();
    assert_eq!(r.z, Some(z));
    assert_eq!(r.disagreement, Some(q(1, 8)));
    assert!(q(1, 8) <= q(5, 1) * eps);

    let maj = truth_table(3, |x| x.iter().filter(|&&b| b).count() >= 2);
    assert_eq!(brute_blr_rate(&maj), q(3, 8));
    let r = blr_decode(&maj, &exact(), prec(1000), prec(1000), &q(1, 200)).unwrap();
    assert!(!r.precondition_ok);
    assert_eq!(r.test_rate, q(3, 8));
    assert!(r.z.is_none());
}

#[test]
fn blr_constants_on_small_corruptions() {
    for n in 1..=4usize {
        let size = 1u64 << n;
        for zi in 0..size {
            let z = index_to_bits(zi, n);
            let mut flip_sets: Vec<Vec<u64>> = vec![vec![]];
            flip_sets.extend((0..size).map(|a| vec![a]));
            flip_sets.extend((0..size).flat_map(|a| (a + 1..size).map(move |b| vec![a, b])));
            for flips in flip_sets {
                let c = corrupted(&z, &flips);
                let rate = blr_test(&c, &exact(), prec(10)).unwrap();
                assert_eq!(rate, brute_blr_rate(&c));
                assert!(rate <= q(3, 1) * distance_to_linear(&c, &z));
                let r = blr_decode(&c, &exact(), prec(1000), prec(1000), &rate).unwrap();
                if let Some(d) = &r.z {
                    assert_eq!(r.disagreement.clone().unwrap(), distance_to_linear(&c, d));
                    assert!(r.disagreement.unwrap() <= q(5, 1) * rate.clone());
                }
            }
        }
    }
}

#[test]
fn blr_decodes_linear_functions() {
    for n in 1..=8usize {
        for zi in 0..1u64 << n {
            let z = index_to_bits(zi, n);
            let r = blr_decode(&linear_function(&z), &exact(), prec(1000), prec(1000), &q(1, 200)).unwrap();
            assert_eq!(r.z, Some(z));
            assert_eq!(r.disagreement, Some(q(0, 1)));
        }
    }
}

#[test]
fn blr_correction_is_linear_below_threshold() {
    let eps = q(1, 200);
    let mut rng = ChaCha20Rng::seed_from_u64(12);
    for n in 1..=4usize {
        for _ in 0..40 {
            let table: Vec<bool> = (0..1u64 << n).map(|_| rng.gen()).collect();
            let c = truth_table(n, |x| table[bits_to_index(x) as usize]);
            let c = if rng.gen_bool(0.5) { linear_function(&index_to_bits(rng.gen_range(0..1u64 << n), n)) } else { c };
            if blr_test(&c, &exact(), prec(1000)).unwrap() > eps {
                continue;
            }
            let g = |x: &[bool]| blr_self_correct(&c, x, &exact(), prec(1000), prec(1000), &eps).unwrap().bit.unwrap();
            for a in 0..1u64 << n {
                for b in 0..1u64 << n {
                    let (xa, xb) = (index_to_bits(a, n), index_to_bits(b, n));
                    assert_eq!(g(&xa) ^ g(&xb), g(&xor(&xa, &xb)));
                }
            }
        }
    }
}

#[test]
fn schwartz_zippel_examples() {
    let f = FieldPoly::new(2, 1, vec![Term { coeff: 1, exps: vec![1] }], CAP).unwrap();
    let r = schwartz_zippel_check(&f, &[1], &exact(), prec(100), prec(100)).unwrap();
    assert_eq!((r.zero_fraction, r.bound), (q(1, 2), q(1, 2)));
    assert!(r.pass);

    let f = FieldPoly::new(3, 2, vec![Term { coeff: 1, exps: vec![1, 1] }], CAP).unwrap();
    let r = schwartz_zippel_check(&f, &[1, 2], &exact(), prec(100), prec(100)).unwrap();
    assert_eq!((r.zero_fraction, r.bound), (q(5, 9), q(2, 3)));
    assert!(r.pass);
    assert!(schwartz_zippel_check(&f, &[0, 2], &exact(), prec(100), prec(100)).is_err());

    let f = FieldPoly::new(5, 2, vec![Term { coeff: 3, exps: vec![0, 0] }], CAP).unwrap();
    let r = schwartz_zippel_check(&f, &[4, 4], &exact(), prec(100), prec(100)).unwrap();
    assert_eq!(r.zero_fraction, q(0, 1));
    assert!(FieldPoly::new(4, 1, vec![], CAP).is_err());
}

#[test]
fn schwartz_zippel_matches_enumeration() {
    let mut rng = ChaCha20Rng::seed_from_u64(19);
    for _ in 0..30 {
        let p = [2u64, 3, 5, 7][rng.gen_range(0..4)];
        let m = rng.gen_range(1..=2);
        let terms: Vec<Term> = (0..rng.gen_range(1..=3))
            .map(|_| Term { coeff: rng.gen_range(1..p), exps: (0..m).map(|_| rng.gen_range(0..=2)).collect() })
            .collect();
        let f = FieldPoly::new(p, m, terms.clone(), CAP).unwrap();
        let points: Vec<Vec<u64>> =
            (0..p.pow(m as u32)).map(|k| (0..m).map(|j| k / p.pow(j as u32) % p).collect()).collect();
        let value = |pt: &[u64]| {
            terms.iter().fold(0u64, |acc, t| {
                let mono = t.exps.iter().zip(pt).fold(t.coeff % p, |a, (&e, &x)| a * x.pow(e) % p);
                (acc + mono) % p
            })
        };
        let zeros = points.iter().filter(|pt| value(pt) == 0).count();
        let Some(w) = points.iter().find(|pt| value(pt) != 0) else { continue };
        let r = schwartz_zippel_check(&f, w, &exact(), prec(100), prec(100)).unwrap();
        assert_eq!(r.zero_fraction, q(zeros as i64, points.len() as u64));
        assert!(r.pass);
    }
}

#[test]
fn protocol_examples() {
    let eq = equality_function(3);
    let trivial = OneWayProtocol::trivial(3, &eq).unwrap();
    assert_eq!(simulate_protocol(&trivial, &eq, &exact(), prec(100), CAP).unwrap().max_error, q(0, 1));
    let hashed = OneWayProtocol::equality(3, 2).unwrap();
    let r = simulate_protocol(&hashed, &eq, &exact(), prec(100), CAP).unwrap();
    assert_eq!(r.max_error, q(1, 4));
    assert_ne!(r.worst_x, r.worst_y);
    assert_eq!(r.pairs, 64);
    for i in 0..8 {
        let x = index_to_bits(i, 3);
        let e = hashed.error_circuit(&x, &x, true).unwrap();
        assert_eq!(exact_count(&e, CAP).unwrap(), q(0, 1));
        for j in 0..8 {
            if i != j {
                let e = hashed.error_circuit(&x, &index_to_bits(j, 3), false).unwrap();
                assert_eq!(exact_count(&e, CAP).unwrap(), q(1, 4));
            }
        }
    }
}

#[test]
fn hashing_examples() {
    let r = linear_hash_collision_bound(2, 1, &bits("01"), &bits("10"), &exact(), prec(100), prec(100)).unwrap();
    assert_eq!(r.probability, q(1, 2));
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    for m in 1..=4usize {
        for _ in 0..5 {
            let x: Vec<bool> = (0..3).map(|_| rng.gen()).collect();
            let mut y = x.clone();
            y[rng.gen_range(0..3)] ^= true;
            let r = linear_hash_collision_bound(3, m, &x, &y, &exact(), prec(100), prec(100)).unwrap();
            assert_eq!(r.probability, q(1, 1u64 << m));
            assert_eq!(r.bound, q(1, 1u64 << m));
            assert!(r.pass);
        }
    }
    assert!(linear_hash_collision_bound(2, 1, &bits("01"), &bits("01"), &exact(), prec(100), prec(100)).is_err());
}

#[test]
fn collision_bias() {
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    for _ in 0..50 {
        let s = rng.gen_range(1..=5);
        let c = Circuit::random(s, 1, 3 * s + 2, &mut rng);
        let x = RandomVariable::<Rational>::indicator(&c).unwrap();
        let pair = x.iid(2).unwrap();
        let same =
            RandomVariable::combine(&[&pair[0], &pair[1]], |v| if v[0] == v[1] { q(1, 1) } else { q(0, 1) }).unwrap();
        let coll = approx_expectation(&same, &exact(), prec(10)).unwrap();
        let e = approx_expectation(&x, &exact(), prec(10)).unwrap();
        assert!(coll >= q(1, 2));
        let bias = e - q(1, 2);
        assert!(bias.clone() * bias >= coll / q(2, 1) - q(1, 4));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rerandomization_preserves_count(n in 0usize..=10, seed in any::<u64>(), shift in any::<u64>()) {
        let c = Circuit::random(n, 1, 3 * n + 4, &mut ChaCha20Rng::seed_from_u64(seed));
        let x = index_to_bits(shift & ((1u64 << n) - 1), n);
        prop_assert_eq!(exact_count(&c.xor_shift(&x).unwrap(), CAP).unwrap(), exact_count(&c, CAP).unwrap());
    }
}

#[test]
fn generic_scalar_blr() {
    let c = corrupted(&bits("1011"), &[2]);
    let r: Rational = blr_test(&c, &exact(), prec(10)).unwrap();
    let f: f64 = blr_test(&c, &ExactOracle::<f64>::new(CAP), prec(10)).unwrap();
    assert_eq!(f, r.to_f64_lossy());
}
