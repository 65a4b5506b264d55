use std::collections::BTreeSet;

use apx::bits::{index_to_bits, parse_bits};
use apx::{
    knf_apply_restriction, Builder, Circuit, Clause, Connective, Knf, Literal, Permutation, Restriction, Simplification,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn table(c: &Circuit) -> Vec<Vec<bool>> {
    (0..1u64 << c.num_inputs()).map(|i| c.eval(&index_to_bits(i, c.num_inputs())).unwrap()).collect()
}

fn table_of(n: usize, f: impl Fn(&[bool]) -> bool) -> Vec<Vec<bool>> {
    (0..1u64 << n).map(|i| vec![f(&index_to_bits(i, n))]).collect()
}

fn x1_and_not_x2() -> Circuit {
    let mut b = Builder::new(2);
    let x1 = b.input(1);
    let x2 = b.input(2);
    let n2 = b.not(x2);
    let g = b.and(vec![x1, n2]);
    b.finish_bit(g)
}

fn bits(s: &str) -> Vec<bool> {
    parse_bits(s).unwrap()
}

#[test]
fn eval_examples() {
    assert!(Circuit::truth(3).eval_bit(&bits("101")).unwrap());
    assert!(!Circuit::parity(3).eval_bit(&bits("110")).unwrap());
    let lt5 = Circuit::threshold_less_than(3, 5).unwrap();
    assert!(lt5.eval_bit(&index_to_bits(4, 3)).unwrap());
    assert!(!lt5.eval_bit(&index_to_bits(5, 3)).unwrap());
    assert!(Circuit::parity(3).eval(&bits("11")).is_err());
}

#[test]
fn threshold_matches_integer_comparison() {
    for n in 0..=5usize {
        for t in 0..=(1u128 << n) {
            let c = Circuit::threshold_less_than(n, t).unwrap();
            assert_eq!(table(&c), table_of(n, |x| (apx::bits::bits_to_index(x) as u128) < t));
        }
    }
    assert!(Circuit::threshold_less_than(3, 9).is_err());
    assert_eq!(table(&Circuit::threshold_less_than(3, 8).unwrap()), table(&Circuit::truth(3)));
}

#[test]
fn fix_last_examples() {
    let c = Circuit::parity(2).fix_last(true).unwrap();
    assert_eq!(table(&c), table_of(1, |x| !x[0]));
    let c = Circuit::null(4).fix_last(false).unwrap();
    assert_eq!(c.num_inputs(), 3);
    assert_eq!(table(&c), table(&Circuit::null(3)));
    let c = Circuit::and_all(2).fix_last(true).unwrap();
    assert_eq!(table(&c), table_of(1, |x| x[0]));
    assert!(Circuit::truth(0).fix_last(true).is_err());
}

#[test]
fn fix_suffix_examples() {
    let c = Circuit::random(4, 1, 12, &mut ChaCha20Rng::seed_from_u64(3));
    assert_eq!(table(&c.fix_suffix(&[]).unwrap()), table(&c));
    let p = Circuit::parity(3).fix_suffix(&bits("11")).unwrap();
    assert_eq!(table(&p), table_of(1, |x| x[0]));
    let lt = Circuit::threshold_less_than(3, 5).unwrap().fix_suffix(&bits("1")).unwrap();
    assert_eq!(table(&lt), table(&Circuit::threshold_less_than(2, 1).unwrap()));
    assert!(Circuit::parity(2).fix_suffix(&bits("000")).is_err());
}

#[test]
fn syntactic_constancy_examples() {
    assert_eq!(Circuit::null(5).is_syntactically_constant().unwrap(), Some(false));
    assert_eq!(Circuit::truth(0).is_syntactically_constant().unwrap(), Some(true));
    let mut b = Builder::new(1);
    let x = b.input(1);
    let nx = b.not(x);
    let g = b.and(vec![x, nx]);
    let contradiction = b.finish_bit(g);
    assert_eq!(contradiction.is_syntactically_constant().unwrap(), None);
    assert_eq!(table(&contradiction), table(&Circuit::null(1)));
}

#[test]
fn swap_and_permute_examples() {
    let s = x1_and_not_x2().swap_adjacent(1).unwrap();
    assert_eq!(table(&s), table_of(2, |x| !x[0] && x[1]));
    assert!(x1_and_not_x2().swap_adjacent(2).is_err());
    assert!(x1_and_not_x2().swap_adjacent(0).is_err());
    let pi = Permutation::new(vec![3, 1, 4, 2]).unwrap();
    assert_eq!(table(&Circuit::parity(4).permute_inputs(&pi).unwrap()), table(&Circuit::parity(4)));
    let c = Circuit::random(5, 2, 20, &mut ChaCha20Rng::seed_from_u64(9));
    assert_eq!(table(&c.permute_inputs(&Permutation::identity(5)).unwrap()), table(&c));
    assert!(Permutation::new(vec![1, 1]).is_err());
}

#[test]
fn compose_examples() {
    let g = Circuit::random(3, 2, 10, &mut ChaCha20Rng::seed_from_u64(5));
    assert_eq!(table(&Circuit::identity(2).compose(&g).unwrap()), table(&g));
    let mut b = Builder::new(2);
    let w = b.inputs(1..=2);
    let dup = b.finish(vec![w[0], w[1], w[0], w[1]]);
    assert_eq!(table(&Circuit::parity(4).compose(&dup).unwrap()), table(&Circuit::null(2)));
    let lt = Circuit::threshold_less_than(3, 6).unwrap();
    assert_eq!(table(&lt.compose(&Circuit::identity(3)).unwrap()), table(&lt));
    assert!(Circuit::parity(3).compose(&dup).is_err());
}

#[test]
fn or_amplify_examples() {
    let c = x1_and_not_x2();
    assert_eq!(table(&c.or_amplify(1).unwrap()), table(&c));
    assert_eq!(table(&Circuit::null(2).or_amplify(3).unwrap()), table(&Circuit::null(6)));
    let x1 = Circuit::projection(1, 1).unwrap();
    assert_eq!(table(&x1.or_amplify(2).unwrap()), table(&Circuit::or_all(2)));
    assert!(c.or_amplify(0).is_err());
}

#[test]
fn tester_and_shift_examples() {
    for n in 0..=6 {
        assert_eq!(table(&Circuit::parity(n).parity_tester().unwrap()), table(&Circuit::truth(n)));
    }
    let c = Circuit::random(4, 1, 15, &mut ChaCha20Rng::seed_from_u64(1));
    assert_eq!(table(&c.xor_shift(&[false; 4]).unwrap()), table(&c));
    let shift = bits("1010");
    let s = c.xor_shift(&shift).unwrap();
    for i in 0..16 {
        let r = index_to_bits(i, 4);
        let xr = apx::bits::xor(&shift, &r);
        assert_eq!(s.eval(&r).unwrap(), c.eval(&xr).unwrap());
    }
    let g = Circuit::random(3, 2, 10, &mut ChaCha20Rng::seed_from_u64(2));
    let v = bits("10");
    let ind = g.indicator_eq(&v).unwrap();
    for i in 0..8 {
        let x = index_to_bits(i, 3);
        assert_eq!(ind.eval_bit(&x).unwrap(), g.eval(&x).unwrap() == v);
    }
}

fn clause(pos: &[usize], neg: &[usize]) -> Clause {
    Clause { pos: pos.iter().copied().collect(), neg: neg.iter().copied().collect() }
}

fn rho(n: usize, fixed: &[(usize, bool)]) -> Restriction {
    let mut r = Restriction::free(n);
    for &(v, b) in fixed {
        r.set(v, Some(b));
    }
    r
}

#[test]
fn knf_restriction_examples() {
    let f = Knf::new(Connective::Cnf, vec![clause(&[1, 2], &[])], 2).unwrap();
    assert_eq!(knf_apply_restriction(&f, &rho(2, &[(1, true)])).unwrap(), Simplification::Trivialized(true));
    let f = Knf::new(Connective::Dnf, vec![clause(&[1, 2], &[])], 2).unwrap();
    assert_eq!(knf_apply_restriction(&f, &rho(2, &[(1, false)])).unwrap(), Simplification::Trivialized(false));
    let f = Knf::new(Connective::Cnf, vec![clause(&[1, 2], &[]), clause(&[3], &[])], 2).unwrap();
    match knf_apply_restriction(&f, &rho(3, &[(3, true)])).unwrap() {
        Simplification::Survives { live, residual } => {
            assert_eq!(live, [Literal::pos(1), Literal::pos(2)].into_iter().collect::<BTreeSet<_>>());
            for i in 0..4 {
                let x = index_to_bits(i, 2);
                assert_eq!(residual.eval(&x), x[0] || x[1]);
            }
        }
        other => panic!("expected survival, got {other:?}"),
    }
    assert!(Knf::new(Connective::Cnf, vec![clause(&[1], &[1])], 2).is_err());
    assert!(knf_apply_restriction(&f, &rho(2, &[])).is_err());
}

#[test]
fn json_roundtrip_and_validation() {
    let c = Circuit::random(4, 2, 15, &mut ChaCha20Rng::seed_from_u64(4));
    let back = Circuit::from_json(&c.to_json()).unwrap();
    assert_eq!(table(&back), table(&c));
    assert!(Circuit::from_json(r#"{"inputs":1,"gates":[{"op":"INPUT","args":[],"input":2}],"outputs":[0]}"#).is_err());
    assert!(Circuit::from_json(r#"{"inputs":1,"gates":[{"op":"NOT","args":[0]}],"outputs":[0]}"#).is_err());
    assert!(Circuit::from_json(r#"{"inputs":1,"gates":[{"op":"INPUT","args":[],"input":1}],"outputs":[]}"#).is_err());
}

fn random_circuit(n: usize, outs: usize, seed: u64) -> Circuit {
    Circuit::random(n, outs, 3 * n + 4, &mut ChaCha20Rng::seed_from_u64(seed))
}

fn perm_strategy(n: usize) -> impl Strategy<Value = Permutation> {
    Just((1..=n).collect::<Vec<_>>()).prop_shuffle().prop_map(|v| Permutation::new(v).unwrap())
}

/// Direct clause semantics, independent of the restriction code.
fn knf_value(f: &Knf, x: &[bool]) -> bool {
    let lit = |v: usize, pos: bool| x[v - 1] == pos;
    match f.connective {
        Connective::Cnf => {
            f.clauses.iter().all(|c| c.pos.iter().any(|&v| lit(v, true)) || c.neg.iter().any(|&v| lit(v, false)))
        }
        Connective::Dnf => {
            f.clauses.iter().any(|c| c.pos.iter().all(|&v| lit(v, true)) && c.neg.iter().all(|&v| lit(v, false)))
        }
    }
}

fn knf_strategy(n: usize) -> impl Strategy<Value = Knf> {
    let lit = (1..=n, any::<bool>());
    let cl = proptest::collection::vec(lit, 0..=3).prop_map(|ls| {
        let mut seen = BTreeSet::new();
        Clause::from_literals(
            ls.into_iter().filter(|(v, _)| seen.insert(*v)).map(|(v, p)| Literal { var: v, positive: p }),
        )
    });
    (any::<bool>(), proptest::collection::vec(cl, 0..6))
        .prop_map(|(cnf, cls)| Knf::new(if cnf { Connective::Cnf } else { Connective::Dnf }, cls, 3).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fix_last_roundtrip(n in 1usize..=10, seed in any::<u64>(), b in any::<bool>()) {
        let c = random_circuit(n, 2, seed);
        let f = c.fix_last(b).unwrap();
        for i in 0..1u64 << (n - 1) {
            let mut x = index_to_bits(i, n - 1);
            let got = f.eval(&x).unwrap();
            x.push(b);
            prop_assert_eq!(got, c.eval(&x).unwrap());
        }
    }

    #[test]
    fn fix_suffix_is_iterated_fix_last(n in 1usize..=8, seed in any::<u64>(), z in proptest::collection::vec(any::<bool>(), 0..=8)) {
        let z = &z[..z.len().min(n)];
        let c = random_circuit(n, 1, seed);
        let mut it = c.clone();
        for &b in z.iter().rev() {
            it = it.fix_last(b).unwrap();
        }
        prop_assert_eq!(table(&c.fix_suffix(z).unwrap()), table(&it));
    }

    #[test]
    fn permute_composes(seed in any::<u64>(), (pi, sigma) in (1usize..=8).prop_flat_map(|n| (perm_strategy(n), perm_strategy(n)))) {
        let n = pi.len();
        let c = random_circuit(n, 1, seed);
        let lhs = c.permute_inputs(&pi.compose(&sigma)).unwrap();
        let rhs = c.permute_inputs(&sigma).unwrap().permute_inputs(&pi).unwrap();
        prop_assert_eq!(table(&lhs), table(&rhs));
        let direct = c.permute_inputs(&pi).unwrap();
        for i in 0..1u64 << n {
            let x = index_to_bits(i, n);
            let y: Vec<bool> = (1..=n).map(|j| x[pi.apply(j) - 1]).collect();
            prop_assert_eq!(direct.eval(&x).unwrap(), c.eval(&y).unwrap());
        }
    }

    #[test]
    fn or_amplify_is_disjunction(n in 1usize..=4, k in 1usize..=3, seed in any::<u64>()) {
        let c = random_circuit(n, 1, seed);
        let a = c.or_amplify(k).unwrap();
        for i in 0..1u64 << (n * k) {
            let x = index_to_bits(i, n * k);
            let any = x.chunks(n).any(|blk| c.eval_bit(blk).unwrap());
            prop_assert_eq!(a.eval_bit(&x).unwrap(), any);
        }
    }

    #[test]
    fn knf_restriction_agrees_with_eval(f in knf_strategy(8), fixed in proptest::collection::vec(proptest::option::of(any::<bool>()), 8)) {
        let rho = Restriction::from_assignment(fixed);
        let circuit = f.to_circuit(8).unwrap();
        let simp = knf_apply_restriction(&f, &rho).unwrap();
        let stars = rho.stars();
        for i in 0..1u64 << stars.len() {
            let x = rho.extend(&index_to_bits(i, stars.len()));
            let truth = knf_value(&f, &x);
            prop_assert_eq!(circuit.eval_bit(&x).unwrap(), truth);
            prop_assert_eq!(f.eval(&x), truth);
            match &simp {
                Simplification::Trivialized(v) => prop_assert_eq!(*v, truth),
                Simplification::Survives { live, residual } => {
                    prop_assert_eq!(residual.eval(&x), truth);
                    prop_assert!(live.iter().all(|l| rho.get(l.var).is_none()));
                }
            }
        }
    }
}

#[test]
fn constant_circuits_are_syntactically_constant() {
    for n in 0..=64 {
        assert_eq!(Circuit::null(n).is_syntactically_constant().unwrap(), Some(false));
        assert_eq!(Circuit::truth(n).is_syntactically_constant().unwrap(), Some(true));
    }
}

#[test]
fn circuits_are_send_and_sync() {
    fn check<T: Send + Sync>() {}
    check::<Circuit>();
    check::<Knf>();
}
