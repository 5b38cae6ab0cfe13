use std::collections::BTreeMap;

use coalgml::formula::{rat, OperatorSymbol, Scalar};
use coalgml::logic::get_logic;
use coalgml::onestep::{argument_tuples, operators_within};
use coalgml::semantics::{
    enumerate_tvalues, frame_check, model_check, read_model, write_model, Caps, Coalgebra, FunctorKind, Model,
    Monoid, Mult, Selection, StateSet, TValue,
};
use coalgml::Error;

fn set(xs: &[usize]) -> StateSet {
    xs.iter().copied().collect()
}

fn count(functor: &FunctorKind, n: usize, caps: &Caps) -> usize {
    enumerate_tvalues(functor, n, caps).unwrap().count()
}

#[test]
fn enumeration_counts() {
    let pow = FunctorKind::Powerset { fin_branching: false };
    assert_eq!(count(&pow, 2, &Caps::default()), 4);
    assert_eq!(count(&FunctorKind::Selection, 1, &Caps::default()), 4);
    assert_eq!(count(&FunctorKind::Selection, 2, &Caps::default()), 256);
    assert_eq!(count(&FunctorKind::InfMultiset, 1, &Caps::new(2, 1)), 4);
    assert_eq!(count(&FunctorKind::FinMultiset, 2, &Caps::new(2, 1)), 9);
    // Weights k/2 on two states summing to 1.
    assert_eq!(count(&FunctorKind::Distribution, 2, &Caps::new(1, 2)), 3);
    let first: Vec<TValue> = enumerate_tvalues(&pow, 2, &Caps::default()).unwrap().collect();
    let again: Vec<TValue> = enumerate_tvalues(&pow, 2, &Caps::default()).unwrap().collect();
    assert_eq!(first, again);
}

#[test]
fn enumeration_respects_carrier_budget() {
    let caps = Caps::default();
    assert!(matches!(enumerate_tvalues(&FunctorKind::Selection, 4, &caps), Err(Error::Budget(_))));
}

#[test]
fn lifting_examples() {
    let pow = FunctorKind::Powerset { fin_branching: false };
    let a = [set(&[0])];
    assert!(pow.lifting_contains(&OperatorSymbol::boxed(), &a, &TValue::Subset(set(&[0]))).unwrap());
    assert!(!pow.lifting_contains(&OperatorSymbol::boxed(), &a, &TValue::Subset(set(&[0, 1]))).unwrap());

    let m = FunctorKind::InfMultiset;
    let geq2 = OperatorSymbol::geq(2);
    assert!(m.lifting_contains(&geq2, &a, &TValue::multiset([(0, Mult::Fin(2)), (1, Mult::Fin(7))])).unwrap());
    assert!(!m.lifting_contains(&geq2, &a, &TValue::multiset([(0, Mult::Fin(1))])).unwrap());
    assert!(m.lifting_contains(&OperatorSymbol::geq(1000), &a, &TValue::multiset([(0, Mult::Inf)])).unwrap());

    let s = FunctorKind::Selection;
    let f = TValue::Selection(Selection::explicit(1, vec![0, 0]).unwrap());
    assert!(s.lifting_contains(&OperatorSymbol::cond(), &[set(&[0]), set(&[])], &f).unwrap());

    assert!(matches!(
        pow.lifting_contains(&geq2, &a, &TValue::Subset(set(&[0]))),
        Err(Error::FunctorMismatch { .. })
    ));
}

#[test]
fn model_check_examples() {
    let k = get_logic("K").unwrap();
    let c = Coalgebra::new(k.functor.clone(), vec!["a".into(), "b".into()], vec![
        TValue::Subset(set(&[1])),
        TValue::Subset(set(&[])),
    ])
    .unwrap();
    let m = Model::new(c, BTreeMap::new()).unwrap();
    assert!(model_check(&m, "a", &k.parse("[][]false").unwrap()).unwrap());
    assert!(!model_check(&m, "a", &k.parse("[]false").unwrap()).unwrap());
    assert!(matches!(model_check(&m, "a", &k.parse("p3").unwrap()), Err(Error::UndefinedProp(3))));

    let g = get_logic("GML").unwrap();
    let c = Coalgebra::numbered(g.functor.clone(), vec![TValue::multiset([(0, Mult::Fin(3))])]).unwrap();
    let m = Model::new(c, BTreeMap::new()).unwrap();
    assert!(model_check(&m, "s0", &g.parse("geq[3](true) & !geq[4](true)").unwrap()).unwrap());

    let p = get_logic("PML").unwrap();
    let c = Coalgebra::numbered(p.functor.clone(), vec![TValue::distribution([(0, rat(1, 1))]).unwrap()]).unwrap();
    let m = Model::new(c, BTreeMap::new()).unwrap();
    assert!(model_check(&m, "s0", &p.parse("L[1/2](true)").unwrap()).unwrap());
}

#[test]
fn frame_check_examples() {
    let k = get_logic("K").unwrap();
    let refl = Coalgebra::numbered(k.functor.clone(), vec![TValue::Subset(set(&[0]))]).unwrap();
    assert!(frame_check(&refl, &[k.parse("[]p0 -> p0").unwrap()], &[0]).unwrap());

    let chain = Coalgebra::numbered(k.functor.clone(), vec![TValue::Subset(set(&[1])), TValue::Subset(set(&[]))]).unwrap();
    assert!(frame_check(&chain, &[k.parse("[]p0 -> [][]p0").unwrap()], &[0]).unwrap());
    let cycle = Coalgebra::numbered(k.functor.clone(), vec![TValue::Subset(set(&[1])), TValue::Subset(set(&[0]))]).unwrap();
    assert!(!frame_check(&cycle, &[k.parse("[]p0 -> [][]p0").unwrap()], &[0]).unwrap());

    let g = get_logic("GML").unwrap();
    let multi = Coalgebra::numbered(g.functor.clone(), vec![
        TValue::multiset([(1, Mult::Fin(1)), (2, Mult::Fin(0))]),
        TValue::multiset([(2, Mult::Fin(2))]),
        TValue::multiset([]),
    ])
    .unwrap();
    let theta = g.parse("geq[1](geq[2](p0)) -> geq[2](p0)").unwrap();
    assert!(!frame_check(&multi, &[theta], &[0]).unwrap());
}

#[test]
fn frame_check_budget() {
    let k = get_logic("K").unwrap();
    let big = Coalgebra::numbered(k.functor.clone(), (0..8).map(|i| TValue::Subset(set(&[(i + 1) % 8]))).collect()).unwrap();
    let theta = k.parse("[](p0 & p1 & p2) -> p0").unwrap();
    assert!(matches!(frame_check(&big, &[theta], &[0, 1, 2]), Err(Error::Budget(_))));
}

#[test]
fn model_file_round_trip() {
    let text = r#"{
        "functor": "InfMultiset",
        "states": ["a", "b"],
        "transition": {"a": {"a": 1, "b": "inf"}, "b": {}},
        "valuation": {"p0": ["a"], "q": ["b"]}
    }"#;
    let (m, aliases) = read_model(text).unwrap();
    assert_eq!(aliases.get("q"), Some(&1));
    assert_eq!(m.coalgebra.transition(0), &TValue::multiset([(0, Mult::Fin(1)), (1, Mult::Inf)]));
    let names: BTreeMap<u32, String> = aliases.iter().map(|(k, v)| (*v, k.clone())).collect();
    let (back, _) = read_model(&write_model(&m, &names)).unwrap();
    assert_eq!(back.coalgebra, m.coalgebra);
    assert_eq!(back.valuation, m.valuation);

    let measure = r#"{
        "functor": {"name": "AddMeasure", "param": "N"},
        "states": ["a", "b"],
        "transition": {"a": {"domain": [["a"], ["b"]], "mu": [1, 2]}, "b": {"domain": [], "mu": []}}
    }"#;
    let (m, _) = read_model(measure).unwrap();
    match m.coalgebra.transition(0) {
        TValue::Measure(mu) => assert_eq!(mu.measure_of(&set(&[0, 1])), Some(&Scalar::Nat(3))),
        other => panic!("{other}"),
    }
    let (back, _) = read_model(&write_model(&m, &BTreeMap::new())).unwrap();
    assert_eq!(back.coalgebra, m.coalgebra);

    let unknown = r#"{"functor": "Powerset", "states": [], "transition": {}, "extra": 1}"#;
    assert!(read_model(unknown).is_err());
    let bad_dist = r#"{"functor": "Distribution", "states": ["a"], "transition": {"a": {"a": "1/2"}}}"#;
    assert!(read_model(bad_dist).is_err());
}

#[test]
fn monoid_laws() {
    for m in [Monoid::Nat, Monoid::ZMod(2), Monoid::ZMod(5), Monoid::NonNegRat] {
        let samples = m.elements(4, 2);
        assert_eq!(m.check_laws(&samples), None, "{}", m.name());
    }
}

/// Every surjection from an `n`-set onto an `m`-set, as tables.
fn surjections(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let total = m.pow(n as u32);
    for code in 0..total {
        let mut f = Vec::with_capacity(n);
        let mut c = code;
        for _ in 0..n {
            f.push(c % m);
            c /= m;
        }
        if (0..m).all(|y| f.contains(&y)) {
            out.push(f);
        }
    }
    out
}

#[test]
fn liftings_are_natural() {
    let functors = [
        (FunctorKind::Powerset { fin_branching: false }, 3),
        (FunctorKind::Selection, 2),
        (FunctorKind::SubSelection(coalgml::semantics::SelectionAxioms::Id), 3),
        (FunctorKind::InfMultiset, 3),
        (FunctorKind::Distribution, 3),
        (FunctorKind::AddMeasure(Monoid::Nat), 2),
        (FunctorKind::AddMeasure(Monoid::ZMod(2)), 3),
        (FunctorKind::BoundedMeasure, 3),
        (FunctorKind::ExactProb, 3),
    ];
    let caps = Caps::new(2, 2);
    for (functor, max_n) in functors {
        let ops = operators_within(&functor, &caps);
        for n in 1..=max_n {
            let values: Vec<TValue> = enumerate_tvalues(&functor, n, &caps).unwrap().collect();
            for m in 1..=n {
                for f in surjections(n, m) {
                    for t in &values {
                        let pushed = t.push(&f);
                        functor.validate(&pushed, m).unwrap_or_else(|e| panic!("{functor}: {t} pushed: {e}"));
                        for op in &ops {
                            for args in argument_tuples(m, op.arity()) {
                                let pre: Vec<StateSet> = args.iter().map(|a| a.preimage(&f)).collect();
                                let left = functor.lifting_contains(op, &pre, t).unwrap();
                                let right = functor.lifting_contains(op, &args, &pushed).unwrap();
                                assert_eq!(left, right, "{functor}: {op} at {t} along {f:?}");
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn axiom_instances_hold_in_sampled_models() {
    use coalgml::logic::logic_names;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for name in logic_names() {
        let l = get_logic(name).unwrap();
        let values: Vec<TValue> = enumerate_tvalues(&l.functor, 2, &Caps::default()).unwrap().collect();
        for _ in 0..20 {
            let trans: Vec<TValue> = (0..2).map(|_| values[rng.gen_range(0..values.len())].clone()).collect();
            let c = Coalgebra::numbered(l.functor.clone(), trans).unwrap();
            let vars: Vec<u32> = (0..3).collect();
            let axioms: Vec<_> = l
                .axioms_for(&coalgml::onestep::universe_within(&l.functor, &Caps::default()))
                .iter()
                .map(|a| a.formula().clone())
                .collect();
            assert!(frame_check(&c, &axioms, &vars).unwrap(), "{name}");
        }
    }
}

mod properties {
    use super::*;
    use coalgml::semantics::{random_tvalue, SelectionAxioms};
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn functors() -> Vec<FunctorKind> {
        vec![
            FunctorKind::Powerset { fin_branching: false },
            FunctorKind::InfMultiset,
            FunctorKind::FinMultiset,
            FunctorKind::Selection,
            FunctorKind::SubSelection(SelectionAxioms::IdDis),
            FunctorKind::Distribution,
            FunctorKind::AddMeasure(Monoid::Nat),
            FunctorKind::AddMeasure(Monoid::ZMod(3)),
            FunctorKind::BoundedMeasure,
            FunctorKind::ExactProb,
        ]
    }

    fn value(functor: &FunctorKind, n: usize, seed: u64) -> TValue {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        random_tvalue(functor, n, &mut rng).unwrap()
    }

    /// A surjection from `0..table.len()` onto its image, renumbered.
    fn onto(table: &[usize]) -> (Vec<usize>, usize) {
        let mut image: Vec<usize> = table.to_vec();
        image.sort_unstable();
        image.dedup();
        (table.iter().map(|x| image.binary_search(x).unwrap()).collect(), image.len())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn push_is_functorial(which in 0usize..10, seed: u64, f in proptest::collection::vec(0usize..3, 1..5), g in proptest::collection::vec(0usize..2, 3)) {
            let functor = &functors()[which];
            let n = f.len();
            let (f, m) = onto(&f);
            let (g, k) = onto(&g[..m]);
            let t = value(functor, n, seed);
            functor.validate(&t, n).unwrap();
            let id: Vec<usize> = (0..n).collect();
            prop_assert!(t.push(&id).same_as(&t, n).unwrap());
            let gf: Vec<usize> = f.iter().map(|x| g[*x]).collect();
            prop_assert!(t.push(&gf).same_as(&t.push(&f).push(&g), k).unwrap());
        }

        #[test]
        fn models_survive_the_file_format(which in 0usize..10, seed: u64, n in 1usize..4, marks in proptest::collection::vec(any::<bool>(), 3)) {
            let functor = &functors()[which];
            let trans: Vec<TValue> = (0..n as u64).map(|i| value(functor, n, seed.wrapping_add(i))).collect();
            let c = Coalgebra::numbered(functor.clone(), trans).unwrap();
            let valuation: BTreeMap<u32, StateSet> = [(0, (0..n).filter(|i| marks[*i]).collect())].into();
            let m = Model::new(c, valuation).unwrap();
            let (back, _) = read_model(&write_model(&m, &BTreeMap::new())).unwrap();
            prop_assert_eq!(back.coalgebra, m.coalgebra);
            prop_assert_eq!(back.valuation, m.valuation);
        }
    }
}
