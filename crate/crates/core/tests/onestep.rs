use coalgml::formula::{Prop, Scalar};
use coalgml::logic::{get_logic, parse_one_step, AxiomScheme, Logic, OneStepAtom, OneStepFormula};
use coalgml::onestep::{
    all_atoms, check_one_step_soundness, check_separation, one_step_eval, one_step_sat_bruteforce, one_step_witness,
    operators_within, saturate, OneStepProblem, Provenance,
};
use coalgml::semantics::{
    enumerate_tvalues, measure_from_sets, subfunctor_member, subfunctor_semantic_member, Caps, FunctorKind, Mult,
    SelectionAxioms, StateSet, TValue,
};
use coalgml::Error;

fn logic(name: &str) -> Logic {
    get_logic(name).unwrap()
}

fn os(l: &Logic, n: usize, text: &str) -> OneStepFormula {
    parse_one_step(text, &l.sig, n).unwrap_or_else(|e| panic!("{text}: {e}"))
}

fn atom(l: &Logic, n: usize, text: &str) -> OneStepAtom {
    match os(l, n, text) {
        Prop::Atom(a) => a,
        other => panic!("{text} is not an atom: {other:?}"),
    }
}

fn set(xs: &[usize]) -> StateSet {
    xs.iter().copied().collect()
}

#[test]
fn eval_examples() {
    let k = logic("K");
    let f = os(&k, 2, "[]{s0} & ![]{}");
    assert!(one_step_eval(&k.functor, &f, &TValue::Subset(set(&[0]))).unwrap());

    let g = logic("GML");
    let f = os(&g, 2, "geq[1]({s0}) | geq[1]({s1})");
    assert!(!one_step_eval(&g.functor, &f, &TValue::multiset([(0, Mult::Fin(0)), (1, Mult::Fin(0))])).unwrap());

    let m = logic("AddMeasure(N)");
    let f = os(&m, 1, "E[1]({s0})");
    let t = measure_from_sets(1, [(set(&[0]), Scalar::Nat(1))]).unwrap();
    m.functor.validate(&t, 1).unwrap();
    assert!(one_step_eval(&m.functor, &f, &t).unwrap());
}

#[test]
fn bruteforce_examples() {
    let k = logic("K");
    let p = OneStepProblem::new(k.clone(), 2, vec![os(&k, 2, "<>{s0}"), os(&k, 2, "!<>{s1}")]);
    assert_eq!(one_step_sat_bruteforce(&p).unwrap().witness, Some(TValue::Subset(set(&[0]))));

    for n in 0..=3 {
        let p = OneStepProblem::new(k.clone(), n, vec![os(&k, n, "<>{}")]);
        let r = one_step_sat_bruteforce(&p).unwrap();
        assert_eq!(r.witness, None);
        assert!(r.absolute);
    }

    let g = logic("GML");
    let mut p = OneStepProblem::new(g.clone(), 1, vec![os(&g, 1, "geq[2]({s0})"), os(&g, 1, "!geq[3]({s0})")]);
    p.caps = Caps::new(3, 1);
    assert_eq!(one_step_sat_bruteforce(&p).unwrap().witness, Some(TValue::multiset([(0, Mult::Fin(2))])));
}

/// Saturates `seed` over every atom of the logic's operators within caps.
fn maximal(l: &Logic, n: usize, seed: Vec<OneStepFormula>, caps: &Caps) -> Vec<OneStepFormula> {
    let universe = all_atoms(&operators_within(&l.functor, caps), n).unwrap();
    saturate(l, n, &seed, &universe).unwrap()
}

#[test]
fn witness_examples() {
    let k = logic("K");
    let phi = maximal(&k, 2, vec![os(&k, 2, "<>{s0}"), os(&k, 2, "!<>{s1}")], &Caps::default());
    let w = one_step_witness(&k, 2, &phi, None, &Caps::default()).unwrap();
    assert_eq!(w.t, TValue::Subset(set(&[0])));
    assert_eq!(w.provenance, Provenance::Constructed);

    let ck = logic("CK");
    let phi = maximal(&ck, 1, vec![os(&ck, 1, "{s0} => {s0}"), os(&ck, 1, "!({s0} => {})")], &Caps::default());
    let w = one_step_witness(&ck, 1, &phi, None, &Caps::default()).unwrap();
    match &w.t {
        TValue::Selection(s) => assert_eq!(s.apply(&set(&[0])), set(&[0])),
        other => panic!("{other}"),
    }
    assert_eq!(w.provenance, Provenance::Constructed);

    let g = logic("GML");
    let caps = Caps::new(3, 1);
    let phi = maximal(&g, 1, vec![os(&g, 1, "geq[2]({s0})"), os(&g, 1, "!geq[3]({s0})")], &caps);
    let w = one_step_witness(&g, 1, &phi, None, &caps).unwrap();
    assert_eq!(w.t, TValue::multiset([(0, Mult::Fin(2))]));
}

#[test]
fn witness_requires_decisive_input() {
    let k = logic("K");
    let err = one_step_witness(&k, 2, &[os(&k, 2, "<>{s0}")], None, &Caps::default());
    // Not decisive: the construction is skipped and the scan finds {s0}.
    assert_eq!(err.unwrap().provenance, Provenance::BruteForce);
    let bad = one_step_witness(&k, 1, &[os(&k, 1, "<>{}")], None, &Caps::default());
    assert!(matches!(bad, Err(Error::NoWitness(_))));
}

#[test]
fn witness_over_coarser_algebra() {
    let k = logic("K");
    // Blocks {s0,s1}, {s2}: only unions of blocks are decided.
    let blocks = vec![set(&[0, 1]), set(&[2])];
    let mut phi = vec![os(&k, 3, "![]{}")];
    phi.push(os(&k, 3, "[]{s0,s1}"));
    phi.push(os(&k, 3, "![]{s2}"));
    phi.push(os(&k, 3, "[]{s0,s1,s2}"));
    let w = one_step_witness(&k, 3, &phi, Some(&blocks), &Caps::default()).unwrap();
    assert_eq!(w.t, TValue::Subset(set(&[0])));
}

#[test]
fn saturate_examples() {
    let k = logic("K");
    let phi = vec![os(&k, 1, "<>{s0}")];
    let universe = vec![atom(&k, 1, "[]{}"), atom(&k, 1, "[]{s0}")];
    let out = saturate(&k, 1, &phi, &universe).unwrap();
    // ◇{s0} is the literal ¬□∅ and already decides the first atom.
    assert_eq!(out, [os(&k, 1, "![]{}"), os(&k, 1, "[]{s0}")]);

    assert!(saturate(&k, 1, &[], &[]).unwrap().is_empty());

    let g = logic("GML");
    let phi = vec![os(&g, 1, "geq[2]({s0})")];
    let universe = vec![atom(&g, 1, "geq[1]({s0})"), atom(&g, 1, "geq[3]({s0})")];
    let out = saturate(&g, 1, &phi, &universe).unwrap();
    assert_eq!(out[1..], [os(&g, 1, "geq[1]({s0})"), os(&g, 1, "geq[3]({s0})")]);

    let bad = saturate(&k, 1, &[os(&k, 1, "[]{}"), os(&k, 1, "![]{}")], &universe_k(&k));
    assert!(matches!(bad, Err(Error::Inconsistent(_))));
}

fn universe_k(k: &Logic) -> Vec<OneStepAtom> {
    all_atoms(&operators_within(&k.functor, &Caps::default()), 1).unwrap()
}

#[test]
fn saturation_is_idempotent() {
    let ck = logic("CK");
    let universe = all_atoms(&operators_within(&ck.functor, &Caps::default()), 2).unwrap();
    let seed = vec![os(&ck, 2, "{s0} => {s1}"), os(&ck, 2, "!({s0,s1} => {})")];
    let once = saturate(&ck, 2, &seed, &universe).unwrap();
    let twice = saturate(&ck, 2, &once, &universe).unwrap();
    assert_eq!(once, twice);
}

#[test]
fn separation_examples() {
    let p = FunctorKind::Powerset { fin_branching: false };
    let a = check_separation(&p, 2, &TValue::Subset(set(&[0])), &TValue::Subset(set(&[1])), &Caps::default()).unwrap();
    assert_eq!(a.unwrap().to_string(), "[]{s0}");

    let m = FunctorKind::InfMultiset;
    let a = check_separation(
        &m,
        1,
        &TValue::multiset([(0, Mult::Fin(1))]),
        &TValue::multiset([(0, Mult::Inf)]),
        &Caps::new(2, 1),
    )
    .unwrap();
    assert_eq!(a.unwrap().to_string(), "geq[2]({s0})");

    let d = FunctorKind::Distribution;
    let t = TValue::distribution([(0, coalgml::formula::rat(1, 1))]).unwrap();
    assert!(matches!(check_separation(&d, 1, &t, &t, &Caps::default()), Err(Error::Precondition(_))));
}

#[test]
fn separation_for_registered_logics() {
    for name in ["K", "CK", "CK+ID", "CK+ID+DIS", "SystemC", "GML", "PML", "AddMeasure(N)", "AddMeasure(Z2)", "GMLminus", "ExactProb"] {
        let l = logic(name);
        let caps = Caps::default();
        for n in 0..=2 {
            let values: Vec<TValue> = enumerate_tvalues(&l.functor, n, &caps).unwrap().collect();
            for (i, a) in values.iter().enumerate() {
                for b in &values[i + 1..] {
                    // One grade above the enumeration cap tells k from ∞.
                    let sep = check_separation(&l.functor, n, a, b, &Caps::new(caps.mult + 1, caps.den)).unwrap();
                    assert!(sep.is_some(), "{name}: {a} and {b} not separated over {n} states");
                }
            }
        }
    }
}

#[test]
fn soundness_examples() {
    let k = logic("K");
    assert!(check_one_step_soundness(&k, 2, &Caps::default()).unwrap().is_empty());
    let g = logic("GML");
    assert!(check_one_step_soundness(&g, 1, &Caps::new(3, 1)).unwrap().is_empty());

    let mut broken = k.clone();
    broken.axioms = vec![AxiomScheme::new(k.parse("[]p -> []q").unwrap()).unwrap()];
    let v = check_one_step_soundness(&broken, 1, &Caps::default()).unwrap();
    assert!(!v.is_empty());
    assert!(v.iter().any(|(inst, t)| *t == TValue::Subset(set(&[0]))
        && *inst == os(&k, 1, "[]{s0} -> []{}")));
}

#[test]
fn registered_logics_are_one_step_sound() {
    for name in coalgml::logic::logic_names() {
        let l = logic(name);
        for n in 0..=2 {
            let v = check_one_step_soundness(&l, n, &Caps::default()).unwrap();
            assert!(v.is_empty(), "{name} over {n} states: {} fails at {}", coalgml::logic::render_one_step(&v[0].0), v[0].1);
        }
    }
}

#[test]
fn subfunctor_examples() {
    let ck_id = logic("CK+ID");
    let id: Vec<AxiomScheme> = ck_id.axioms[2..].to_vec();
    let identity = |n: usize| TValue::Selection(coalgml::semantics::Selection::explicit(n, (0..1u64 << n).collect()).unwrap());
    assert!(subfunctor_member(&id, &identity(2), 2).unwrap());
    // f({x}) = {x, y}
    let widen = TValue::Selection(coalgml::semantics::Selection::explicit(2, vec![0, 0b11, 0b10, 0b11]).unwrap());
    assert!(!subfunctor_member(&id, &widen, 2).unwrap());

    let ck_dis = logic("CK+ID+DIS");
    let id_dis: Vec<AxiomScheme> = ck_dis.axioms[2..].to_vec();
    assert!(subfunctor_member(&id_dis, &identity(2), 2).unwrap());

    assert!(subfunctor_semantic_member(SelectionAxioms::Id, &identity(3), 3).unwrap());
    let empty = TValue::Selection(coalgml::semantics::Selection::explicit(2, vec![0; 4]).unwrap());
    assert!(subfunctor_semantic_member(SelectionAxioms::IdDisCm, &empty, 2).unwrap());
    // f({x,y}) = {x}, f({x}) = {x}, f({y}) = ∅
    let f = TValue::Selection(coalgml::semantics::Selection::explicit(2, vec![0, 0b01, 0, 0b01]).unwrap());
    assert!(subfunctor_semantic_member(SelectionAxioms::IdDis, &f, 2).unwrap());
}

#[test]
fn subfunctor_characterizations_agree() {
    let cases = [
        ("CK+ID", SelectionAxioms::Id, 3),
        ("CK+ID+DIS", SelectionAxioms::IdDis, 3),
        ("SystemC", SelectionAxioms::IdDisCm, 2),
    ];
    for (name, b, max_n) in cases {
        let axioms: Vec<AxiomScheme> = logic(name).axioms[2..].to_vec();
        for n in 0..=max_n {
            // All selections for small carriers; the shrinking ones for |X| = 3.
            let functor = if n <= 2 { FunctorKind::Selection } else { FunctorKind::SubSelection(SelectionAxioms::Id) };
            for t in enumerate_tvalues(&functor, n, &Caps::default()).unwrap() {
                let syntactic = subfunctor_member(&axioms, &t, n).unwrap();
                let semantic = subfunctor_semantic_member(b, &t, n).unwrap();
                assert_eq!(syntactic, semantic, "{name} over {n} states at {t}");
            }
        }
    }
}

mod props {
    use super::*;
    use proptest::prelude::*;

    /// A maximal one-step set seeded by the polarities in `bits` (taken as
    /// far as they stay consistent).
    fn seeded_maximal(l: &Logic, n: usize, bits: &[bool], caps: &Caps) -> Vec<OneStepFormula> {
        let universe = all_atoms(&operators_within(&l.functor, caps), n).unwrap();
        let mut seed: Vec<OneStepFormula> = Vec::new();
        for (a, b) in universe.iter().zip(bits) {
            let lit = if *b { Prop::atom(a.clone()) } else { Prop::not(Prop::atom(a.clone())) };
            seed.push(lit);
            if !coalgml::logic::one_step_consistent(l, n, &seed).unwrap() {
                seed.pop();
            }
        }
        saturate(l, n, &seed, &universe).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn construction_agrees_with_scan(
            which in 0usize..4,
            n in 0usize..=2,
            bits in proptest::collection::vec(any::<bool>(), 0..24),
        ) {
            let name = ["K", "CK", "GML", "AddMeasure(N)"][which];
            let l = logic(name);
            let caps = Caps::default();
            let phi = seeded_maximal(&l, n, &bits, &caps);
            let w = one_step_witness(&l, n, &phi, None, &caps).unwrap();
            prop_assert_eq!(w.provenance, Provenance::Constructed, "{}", name);
            prop_assert!(coalgml::onestep::satisfies_all(&l.functor, &phi, &w.t).unwrap());
            let scan = one_step_sat_bruteforce(&OneStepProblem::new(l.clone(), n, phi.clone())).unwrap();
            prop_assert!(scan.witness.is_some());
        }

        #[test]
        fn saturation_idempotent(
            which in 0usize..3,
            n in 0usize..=2,
            bits in proptest::collection::vec(any::<bool>(), 0..12),
        ) {
            let l = logic(["K", "CK+ID", "GMLminus"][which]);
            let caps = Caps::default();
            let universe = all_atoms(&operators_within(&l.functor, &caps), n).unwrap();
            let once = seeded_maximal(&l, n, &bits, &caps);
            let twice = saturate(&l, n, &once, &universe).unwrap();
            prop_assert_eq!(once, twice);
        }
    }
}
