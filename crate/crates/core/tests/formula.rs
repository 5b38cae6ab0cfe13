use std::collections::BTreeMap;

use coalgml::formula::{
    parse, parse_with_aliases, prop_entails, prop_entails_with, prop_satisfiable, rat, render, substitute, Backend,
    Family, Formula, OperatorSymbol, ParamDomain, Prop, SimilarityType,
};
use coalgml::Error;
use proptest::prelude::*;

fn sig() -> SimilarityType {
    SimilarityType::new(vec![
        (Family::Box, ParamDomain::None),
        (Family::Cond, ParamDomain::None),
        (Family::Geq, ParamDomain::Nat),
        (Family::Prob, ParamDomain::UnitRational),
    ])
}

fn kripke() -> SimilarityType {
    SimilarityType::new(vec![(Family::Box, ParamDomain::None)])
}

fn p(i: u32) -> Formula {
    Formula::atom(i)
}

#[test]
fn implication_is_normalized() {
    let f = parse("p0 -> p1", &kripke()).unwrap();
    assert_eq!(f, Formula::Not(Box::new(Formula::And(Box::new(p(0)), Box::new(Formula::not(p(1)))))));
    assert_eq!(parse("!(p0 & !p1)", &kripke()).unwrap(), f);
}

#[test]
fn precedence_and_associativity() {
    let k = kripke();
    assert_eq!(parse("p0 | p1 & p2", &k).unwrap(), Formula::or(p(0), Formula::and(p(1), p(2))));
    assert_eq!(parse("p0 -> p1 -> p2", &k).unwrap(), Formula::implies(Formula::implies(p(0), p(1)), p(2)));
    assert_eq!(parse("!p0 & p1", &k).unwrap(), Formula::and(Formula::not(p(0)), p(1)));
    assert_eq!(parse("[]p0 & p1", &k).unwrap(), Formula::and(Formula::boxed(p(0)), p(1)));
    assert_eq!(parse("<>p0", &k).unwrap(), Formula::not(Formula::boxed(Formula::not(p(0)))));
    assert_eq!(parse("p0 <-> p1", &k).unwrap(), Formula::iff(p(0), p(1)));
    assert_eq!(parse("true", &k).unwrap(), Formula::top());
    assert_eq!(parse("false", &k).unwrap(), Formula::Bottom);
}

#[test]
fn conditional_arrow_is_lowest_and_right_associative() {
    let s = sig();
    let f = parse("p0 & p1 => p2 => p0", &s).unwrap();
    assert_eq!(f, Formula::cond(Formula::and(p(0), p(1)), Formula::cond(p(2), p(0))));
    assert_eq!(parse("cond(p0, p1)", &s).unwrap(), Formula::cond(p(0), p(1)));
    assert!(matches!(parse("p0 => p1", &kripke()), Err(Error::Syntax { .. })));
}

#[test]
fn parameters() {
    let s = sig();
    assert_eq!(parse("geq[3](p0)", &s).unwrap(), Formula::geq(3, p(0)));
    let l = parse("L[2/4](p0)", &s).unwrap();
    assert_eq!(l, Formula::modal(OperatorSymbol::prob(rat(1, 2)), vec![p(0)]).unwrap());
    assert!(parse("L[3/2](p0)", &s).is_err());
    assert!(parse("geq(p0)", &s).is_err());
    assert!(parse("geq[1](p0, p1)", &s).is_err());
    assert!(parse("E[1](p0)", &s).is_err());
}

#[test]
fn syntax_errors_carry_positions() {
    match parse("p0 & (p1 | ", &kripke()) {
        Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 11),
        other => panic!("{other:?}"),
    }
    assert!(parse("p0 p1", &kripke()).is_err());
    assert!(parse("", &kripke()).is_err());
    assert!(parse("p0 $ p1", &kripke()).is_err());
}

#[test]
fn symbolic_names_are_aliased() {
    let mut aliases = BTreeMap::new();
    let f = parse_with_aliases("rain -> p0 & wet", &kripke(), &mut aliases).unwrap();
    // Fresh indices avoid the ones written explicitly.
    assert_eq!(aliases.len(), 2);
    assert!(!aliases.values().any(|i| *i == 0));
    assert_ne!(aliases["rain"], aliases["wet"]);
    let g = parse_with_aliases("[]rain", &kripke(), &mut aliases).unwrap();
    assert_eq!(g, Formula::boxed(p(aliases["rain"])));
    assert_eq!(f.atoms().len(), 3);
}

#[test]
fn depth_rank_and_substitution() {
    let s = sig();
    let f = parse("[](p0 & geq[2](p1)) | p2", &s).unwrap();
    assert_eq!(f.modal_depth(), 2);
    assert!(!f.is_rank_one());
    assert!(parse("[]p0 -> []!p1", &s).unwrap().is_rank_one());
    assert!(!parse("[]p0 -> p0", &s).unwrap().is_rank_one());
    let sigma: BTreeMap<u32, Formula> = [(0, Formula::boxed(p(1)))].into();
    assert_eq!(substitute(&parse("[]p0 & p0", &s).unwrap(), &sigma), parse("[][]p1 & []p1", &s).unwrap());
}

#[test]
fn entailment_examples() {
    let a = |i: u32| Prop::atom(i);
    assert!(prop_entails(&[a(0), Prop::implies(a(0), a(1))], &a(1)).unwrap());
    assert!(!prop_entails(&[Prop::or(a(0), a(1))], &a(0)).unwrap());
    assert!(prop_entails(&[], &Prop::or(a(0), Prop::not(a(0)))).unwrap());
    assert!(prop_entails(&[a(0), Prop::not(a(0))], &a(7)).unwrap());
    assert!(!prop_satisfiable(&[Prop::iff(a(0), Prop::not(a(0)))]).unwrap());
}

#[test]
fn dpll_handles_many_atoms() {
    // A chain of implications over 40 atoms is past the truth-table limit.
    let a = |i: u32| Prop::atom(i);
    let chain: Vec<Prop<u32>> = (0..39).map(|i| Prop::implies(a(i), a(i + 1))).collect();
    let mut assumptions = chain.clone();
    assumptions.push(a(0));
    assert!(prop_entails(&assumptions, &a(39)).unwrap());
    assert!(!prop_entails(&chain, &a(39)).unwrap());
    assert!(prop_entails_with(&assumptions, &a(39), Backend::TruthTable).is_err());
}

fn formula_strategy() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![(0u32..4).prop_map(Formula::atom), Just(Formula::Bottom), Just(Formula::top())];
    leaf.prop_recursive(4, 32, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::iff(a, b)),
            inner.clone().prop_map(Formula::boxed),
            inner.clone().prop_map(Formula::dia),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::cond(a, b)),
            (0u64..4, inner.clone()).prop_map(|(k, a)| Formula::geq(k, a)),
            (0i64..=4, inner).prop_map(|(n, a)| Formula::modal(OperatorSymbol::prob(rat(n, 4)), vec![a]).unwrap()),
        ]
    })
}

fn prop_strategy() -> impl Strategy<Value = Prop<u32>> {
    let leaf = prop_oneof![(0u32..4).prop_map(Prop::atom), Just(Prop::Bottom)];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Prop::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Prop::and(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Prop::or(a, b)),
        ]
    })
}

proptest! {
    #[test]
    fn render_parse_round_trip(f in formula_strategy()) {
        let text = render(&f);
        prop_assert_eq!(parse(&text, &sig()).unwrap(), f.clone());
        prop_assert_eq!(render(&parse(&text, &sig()).unwrap()), text);
    }

    #[test]
    fn substitution_of_atoms_by_themselves_is_identity(f in formula_strategy()) {
        let sigma: BTreeMap<u32, Formula> = (0..4).map(|i| (i, p(i))).collect();
        prop_assert_eq!(substitute(&f, &sigma), f);
    }

    #[test]
    fn backends_agree(assumptions in proptest::collection::vec(prop_strategy(), 0..3), goal in prop_strategy()) {
        let table = prop_entails_with(&assumptions, &goal, Backend::TruthTable).unwrap();
        prop_assert_eq!(prop_entails_with(&assumptions, &goal, Backend::Dpll).unwrap(), table);
    }

    #[test]
    fn entailment_is_monotone(assumptions in proptest::collection::vec(prop_strategy(), 0..3), extra in prop_strategy(), goal in prop_strategy()) {
        if prop_entails(&assumptions, &goal).unwrap() {
            let mut more = assumptions.clone();
            more.push(extra);
            prop_assert!(prop_entails(&more, &goal).unwrap());
        }
    }

    #[test]
    fn deduction_theorem(a in prop_strategy(), b in prop_strategy()) {
        prop_assert_eq!(prop_entails(&[a.clone()], &b).unwrap(), prop_entails(&[], &Prop::implies(a, b)).unwrap());
    }
}
