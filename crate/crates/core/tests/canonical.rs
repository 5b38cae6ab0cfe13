use std::collections::BTreeSet;

use coalgml::canonical::{
    build_quasi_canonical, check_coherence, check_coherent_family, closure, cross_check_depth_one, enumerate_mcs,
    frame_report, lift_family, mutate, random_coherent_family, verify_truth_lemma, word_cochain, Choice, Cochain,
    CoherentFamily, FrameStatus, Fragment, LiftMode, Tower,
};
use coalgml::logic::get_logic;
use coalgml::semantics::{Caps, FunctorKind, Monoid, Mult, StateSet, TValue};
use coalgml::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fragment(name: &str, props: u32, depth: usize, caps: Caps) -> Fragment {
    Fragment::new(get_logic(name).unwrap(), props, depth, caps)
}

fn tower(name: &str, props: u32, depth: usize, caps: Caps) -> Tower {
    enumerate_mcs(&fragment(name, props, depth, caps)).unwrap()
}

fn set(xs: &[usize]) -> StateSet {
    xs.iter().copied().collect()
}

#[test]
fn closure_sizes() {
    assert_eq!(closure(&fragment("K", 1, 0, Caps::default())).unwrap().len(), 1);
    // p0 and []∅, []{0}, []{1}, []{0,1} over the two assignments.
    assert_eq!(closure(&fragment("K", 1, 1, Caps::default())).unwrap().len(), 5);
    assert_eq!(closure(&fragment("GML", 1, 1, Caps::new(1, 1))).unwrap().len(), 5);
    assert_eq!(closure(&fragment("GML", 1, 1, Caps::new(2, 1))).unwrap().len(), 9);
}

#[test]
fn level_counts() {
    assert_eq!(tower("K", 1, 0, Caps::default()).counts(), vec![2]);
    assert_eq!(tower("K", 1, 1, Caps::default()).counts(), vec![2, 8]);
    assert_eq!(tower("K", 2, 1, Caps::default()).counts(), vec![4, 64]);
    assert_eq!(tower("K", 1, 2, Caps::default()).counts(), vec![2, 8, 512]);
    // Reflexivity forces []A -> A.
    assert_eq!(tower("KT", 1, 1, Caps::default()).counts(), vec![2, 4]);
    // Neither ◇ nor □ graded beyond 1: present or absent on each of 2 states.
    assert_eq!(tower("GML", 1, 1, Caps::new(1, 1)).counts(), vec![2, 8]);
}

#[test]
fn members_are_distinct() {
    let t = tower("K", 1, 2, Caps::default());
    for level in t.levels() {
        let unique: BTreeSet<_> = level.states.iter().collect();
        assert_eq!(unique.len(), level.len());
        for (i, m) in level.states.iter().enumerate() {
            assert_eq!(level.position(m), Some(i));
        }
    }
}

#[test]
fn projections_compose_and_are_onto() {
    let t = tower("K", 1, 2, Caps::default());
    assert!(t.surjective(1) && t.surjective(2));
    for i in 0..t.level(2).len() {
        let j = t.project(2, i, 1).unwrap();
        assert_eq!(t.project(2, i, 0).unwrap(), t.project(1, j, 0).unwrap());
        assert_eq!(t.project(2, i, 2).unwrap(), i);
        assert_eq!(t.level(2).states[i].props, t.level(0).states[t.project(2, i, 0).unwrap()].props);
    }
    assert!(t.project(1, 0, 2).is_err());
}

#[test]
fn membership_is_preserved_by_projection() {
    let t = tower("K", 1, 2, Caps::default());
    let c1 = closure(&fragment("K", 1, 1, Caps::default())).unwrap();
    for f in &c1 {
        let up = t.extension(2, f).unwrap();
        let down = t.extension(1, f).unwrap();
        for i in 0..t.level(2).len() {
            assert_eq!(up.contains(i), down.contains(t.project(2, i, 1).unwrap()));
        }
    }
}

#[test]
fn characteristic_formulas_pick_out_members() {
    let t = tower("K", 1, 2, Caps::default());
    for k in 0..=2 {
        for i in 0..t.level(k).len() {
            assert_eq!(t.extension(k, &t.characteristic(k, i)).unwrap(), StateSet::singleton(i));
        }
    }
}

fn builds() -> Vec<(&'static str, u32, usize, Caps)> {
    vec![
        ("K", 1, 1, Caps::default()),
        ("K", 1, 2, Caps::default()),
        ("KT", 1, 2, Caps::default()),
        ("K4", 1, 2, Caps::default()),
        ("CK", 1, 1, Caps::default()),
        ("CK+ID", 1, 1, Caps::default()),
        ("CK+ID+DIS", 1, 1, Caps::default()),
        ("SystemC", 1, 1, Caps::default()),
        ("GML", 1, 1, Caps::new(2, 1)),
        ("AddMeasure(Z2)", 1, 1, Caps::default()),
        ("AddMeasure(N)", 1, 1, Caps::default()),
        ("GMLminus", 1, 1, Caps::default()),
        ("ExactProb", 1, 1, Caps::new(2, 4)),
        ("PML", 1, 1, Caps::new(2, 2)),
    ]
}

#[test]
fn truth_lemma_holds_for_built_models() {
    for (name, props, depth, caps) in builds() {
        let t = tower(name, props, depth, caps);
        let q = build_quasi_canonical(&t, Choice::Constructed).unwrap();
        assert_eq!(q.model.coalgebra.len(), t.level(depth).len());
        assert_eq!(verify_truth_lemma(&t, &q.model).unwrap(), vec![], "{name}");
        assert_eq!(check_coherence(&t, &q.model).unwrap(), vec![], "{name}");
    }
}

#[test]
fn every_choice_yields_a_model() {
    let t = tower("GML", 1, 1, Caps::new(2, 1));
    for choice in [Choice::Constructed, Choice::Min, Choice::Max] {
        let q = build_quasi_canonical(&t, choice).unwrap();
        assert!(verify_truth_lemma(&t, &q.model).unwrap().is_empty(), "{choice:?}");
    }
    let min = build_quasi_canonical(&t, Choice::Min).unwrap();
    let max = build_quasi_canonical(&t, Choice::Max).unwrap();
    assert_ne!(min.model.coalgebra, max.model.coalgebra);
    assert!("sideways".parse::<Choice>().is_err());
}

#[test]
fn constructions_are_used_where_known() {
    let t = tower("K", 1, 1, Caps::default());
    let q = build_quasi_canonical(&t, Choice::Constructed).unwrap();
    assert_eq!(q.constructed(), 8);
}

#[test]
fn mutations_are_detected() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (name, props, depth, caps) in builds() {
        let t = tower(name, props, depth, caps);
        let q = build_quasi_canonical(&t, Choice::Constructed).unwrap();
        for _ in 0..5 {
            let (i, m) = mutate(&t, &q.model, &mut rng).unwrap().expect("profiles differ");
            let v = verify_truth_lemma(&t, &m).unwrap();
            assert!(v.iter().any(|x| x.state == i), "{name}");
            assert!(!check_coherence(&t, &m).unwrap().is_empty());
        }
    }
}

#[test]
fn truth_lemma_rejects_wrong_carrier() {
    let t = tower("K", 1, 1, Caps::default());
    let small = build_quasi_canonical(&tower("K", 1, 0, Caps::default()), Choice::Constructed).unwrap();
    assert!(matches!(verify_truth_lemma(&t, &small.model), Err(Error::Precondition(_))));
}

#[test]
fn depth_one_matches_axiomatic_consistency() {
    for (name, caps) in [
        ("K", Caps::default()),
        ("CK", Caps::default()),
        ("CK+ID+DIS", Caps::default()),
        ("GML", Caps::new(2, 1)),
        ("AddMeasure(N)", Caps::default()),
        ("GMLminus", Caps::default()),
        ("PML", Caps::new(2, 2)),
    ] {
        let c = cross_check_depth_one(&tower(name, 1, 1, caps)).unwrap();
        assert!(c.agree, "{name}: {c:?}");
    }
    assert!(cross_check_depth_one(&tower("K", 1, 0, Caps::default())).is_err());
}

#[test]
fn frame_conditions_on_built_frames() {
    let t = tower("KT", 1, 2, Caps::default());
    let q = build_quasi_canonical(&t, Choice::Constructed).unwrap();
    // Truncation does not make the frame reflexive; the report measures it.
    let report = frame_report(&t, &q.model).unwrap();
    assert_eq!(report.len(), 1);
    assert!(matches!(report[0].1, FrameStatus::Holds | FrameStatus::Fails(_)));

    let t = tower("GML", 1, 1, Caps::new(2, 1));
    let q = build_quasi_canonical(&t, Choice::Constructed).unwrap();
    assert!(frame_report(&t, &q.model).unwrap().is_empty());
}

#[test]
fn cochain_shapes() {
    let c = word_cochain(2, 3).unwrap();
    assert_eq!((0..=3).map(|n| c.size(n)).collect::<Vec<_>>(), vec![1, 2, 4, 8]);
    // 101 -> 10 -> 1
    assert_eq!(c.projection(2)[5], 2);
    assert_eq!(c.to_level(1)[5], 1);
    assert_eq!(c.stable_from(), 3);
    let constant = Cochain::new(vec![2, 2, 2], vec![vec![1, 0], vec![0, 1]]).unwrap();
    assert_eq!(constant.stable_from(), 0);
    assert!(Cochain::new(vec![2, 2], vec![vec![0, 0]]).is_err());
    assert!(Cochain::new(vec![2, 2], vec![]).is_err());
}

#[test]
fn coherence_of_families() {
    let c = Cochain::new(vec![1, 2], vec![vec![0, 0]]).unwrap();
    let m = FunctorKind::InfMultiset;
    let ok = CoherentFamily {
        cochain: c.clone(),
        values: vec![TValue::multiset([(0, Mult::Fin(3))]), TValue::multiset([(0, Mult::Fin(1)), (1, Mult::Fin(2))])],
    };
    assert!(check_coherent_family(&m, &ok).unwrap());
    let bad = CoherentFamily {
        cochain: c,
        values: vec![TValue::multiset([(0, Mult::Fin(2))]), TValue::multiset([(0, Mult::Fin(1)), (1, Mult::Fin(2))])],
    };
    assert!(!check_coherent_family(&m, &bad).unwrap());
    assert!(lift_family(&m, &bad, LiftMode::Partial).is_err());

    // B_n(x) = n on a constant cochain.
    let constant = Cochain::new(vec![1, 1, 1], vec![vec![0], vec![0]]).unwrap();
    let growing = CoherentFamily {
        cochain: constant,
        values: (0..3).map(|n| TValue::multiset([(0, Mult::Fin(n))])).collect(),
    };
    assert!(!check_coherent_family(&m, &growing).unwrap());
}

#[test]
fn lift_examples() {
    let pow = FunctorKind::Powerset { fin_branching: false };
    let c = word_cochain(2, 2).unwrap();
    let fam = CoherentFamily {
        cochain: c.clone(),
        values: vec![TValue::Subset(set(&[0])), TValue::Subset(set(&[1])), TValue::Subset(set(&[2, 3]))],
    };
    assert_eq!(lift_family(&pow, &fam, LiftMode::Partial).unwrap(), TValue::Subset(set(&[2, 3])));
    assert!(lift_family(&pow, &fam, LiftMode::EventuallyConstant).is_err());

    let stable = Cochain::new(vec![2, 3, 3], vec![vec![0, 1, 1], vec![2, 0, 1]]).unwrap();
    let top = TValue::multiset([(0, Mult::Inf), (2, Mult::Fin(1))]);
    let values = (0..3).map(|n| top.push(&stable.to_level(n))).collect();
    let fam = CoherentFamily { cochain: stable, values };
    assert_eq!(lift_family(&FunctorKind::InfMultiset, &fam, LiftMode::EventuallyConstant).unwrap(), top);
}

#[test]
fn random_families_lift() {
    let functors = [
        FunctorKind::Powerset { fin_branching: false },
        FunctorKind::InfMultiset,
        FunctorKind::FinMultiset,
        FunctorKind::Selection,
        FunctorKind::AddMeasure(Monoid::Nat),
        FunctorKind::AddMeasure(Monoid::ZMod(2)),
        FunctorKind::Distribution,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for functor in functors {
        for _ in 0..40 {
            let fam = random_coherent_family(&functor, 3, 4, &mut rng).unwrap();
            assert!(check_coherent_family(&functor, &fam).unwrap());
            let t = lift_family(&functor, &fam, LiftMode::EventuallyConstant).unwrap();
            let top = fam.cochain.top();
            assert!(t.same_as(&fam.values[top], fam.cochain.size(top)).unwrap(), "{functor}");
        }
    }
}
