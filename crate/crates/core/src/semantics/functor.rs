use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::monoid::Monoid;
use super::stateset::StateSet;
use super::tvalue::{Measure, Mult, Selection, TValue};
use crate::error::{Error, Result};
use crate::formula::{Family, OperatorSymbol, Rational, Scalar};

/// Conditions defining a subfunctor of the selection functor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SelectionAxioms {
    /// `f(A) ⊆ A`.
    Id,
    /// Identity and `f(A ∪ B) ⊆ f(A) ∪ f(B)`.
    IdDis,
    /// Identity, disjunction and cautious monotony.
    IdDisCm,
}

impl SelectionAxioms {
    pub fn name(self) -> &'static str {
        match self {
            SelectionAxioms::Id => "ID",
            SelectionAxioms::IdDis => "ID+DIS",
            SelectionAxioms::IdDisCm => "ID+DIS+CM",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "ID" => Some(SelectionAxioms::Id),
            "ID+DIS" | "ID_DIS" => Some(SelectionAxioms::IdDis),
            "ID+DIS+CM" | "ID_DIS_CM" => Some(SelectionAxioms::IdDisCm),
            _ => None,
        }
    }
}

/// Signature functors with their structures.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FunctorKind {
    /// Covariant powerset; `fin_branching` marks the finite-powerset
    /// reading, which only matters for limits.
    Powerset { fin_branching: bool },
    /// Multisets with multiplicities in `ℕ ∪ {∞}`.
    InfMultiset,
    /// Finitely supported multisets with natural multiplicities.
    FinMultiset,
    Selection,
    SubSelection(SelectionAxioms),
    /// Finitely supported probability distributions with rational weights.
    Distribution,
    /// Partial additive measures with domain closed under disjoint unions.
    AddMeasure(Monoid),
    /// Natural-valued measures on boolean subalgebras.
    BoundedMeasure,
    /// Rational probability measures whose domain contains the carrier and
    /// is closed under relative complement and disjoint unions.
    ExactProb,
}

impl fmt::Display for FunctorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctorKind::Powerset { fin_branching: false } => f.write_str("Powerset"),
            FunctorKind::Powerset { fin_branching: true } => f.write_str("FinPowerset"),
            FunctorKind::InfMultiset => f.write_str("InfMultiset"),
            FunctorKind::FinMultiset => f.write_str("FinMultiset"),
            FunctorKind::Selection => f.write_str("Selection"),
            FunctorKind::SubSelection(b) => write!(f, "SubSelection({})", b.name()),
            FunctorKind::Distribution => f.write_str("Distribution"),
            FunctorKind::AddMeasure(m) => write!(f, "AddMeasure({})", m.name()),
            FunctorKind::BoundedMeasure => f.write_str("BoundedMeasure"),
            FunctorKind::ExactProb => f.write_str("ExactProb"),
        }
    }
}

impl FunctorKind {
    /// Parses the names produced by `Display`.
    pub fn from_name(name: &str, param: Option<&str>) -> Result<Self> {
        let (base, inner) = match (name.find('('), param) {
            (Some(i), None) if name.ends_with(')') => (&name[..i], Some(&name[i + 1..name.len() - 1])),
            (_, p) => (name, p),
        };
        let bad = || Error::Format(format!("unknown functor `{name}`"));
        Ok(match (base, inner) {
            ("Powerset", None) => FunctorKind::Powerset { fin_branching: false },
            ("FinPowerset", None) => FunctorKind::Powerset { fin_branching: true },
            ("InfMultiset", None) => FunctorKind::InfMultiset,
            ("FinMultiset", None) => FunctorKind::FinMultiset,
            ("Selection", None) => FunctorKind::Selection,
            ("SubSelection", Some(b)) => FunctorKind::SubSelection(SelectionAxioms::from_name(b).ok_or_else(bad)?),
            ("Distribution", None) => FunctorKind::Distribution,
            ("AddMeasure", Some(m)) => FunctorKind::AddMeasure(Monoid::from_name(m).ok_or_else(bad)?),
            ("BoundedMeasure", None) => FunctorKind::BoundedMeasure,
            ("ExactProb", None) => FunctorKind::ExactProb,
            _ => return Err(bad()),
        })
    }

    /// Name and optional parameter, as stored in model files.
    pub fn name_and_param(&self) -> (&'static str, Option<String>) {
        match self {
            FunctorKind::Powerset { fin_branching: false } => ("Powerset", None),
            FunctorKind::Powerset { fin_branching: true } => ("FinPowerset", None),
            FunctorKind::InfMultiset => ("InfMultiset", None),
            FunctorKind::FinMultiset => ("FinMultiset", None),
            FunctorKind::Selection => ("Selection", None),
            FunctorKind::SubSelection(b) => ("SubSelection", Some(b.name().into())),
            FunctorKind::Distribution => ("Distribution", None),
            FunctorKind::AddMeasure(m) => ("AddMeasure", Some(m.name())),
            FunctorKind::BoundedMeasure => ("BoundedMeasure", None),
            FunctorKind::ExactProb => ("ExactProb", None),
        }
    }

    /// Whether the operator is interpreted over this functor.
    pub fn interprets(&self, op: &OperatorSymbol) -> bool {
        let p = op.param();
        match (self, op.family()) {
            (FunctorKind::Powerset { .. }, Family::Box) => true,
            (FunctorKind::InfMultiset | FunctorKind::FinMultiset, Family::Geq) => true,
            (FunctorKind::Selection | FunctorKind::SubSelection(_), Family::Cond) => true,
            (FunctorKind::Distribution, Family::Prob) => true,
            (FunctorKind::AddMeasure(m), Family::Exact) => p.is_some_and(|v| m.contains(v)),
            (FunctorKind::BoundedMeasure, Family::Exact) => matches!(p, Some(Scalar::Nat(n)) if *n > 0),
            (FunctorKind::BoundedMeasure, Family::Measurable) => true,
            (FunctorKind::ExactProb, Family::Exact) => {
                matches!(p, Some(Scalar::Rat(r)) if *r >= Rational::zero() && *r <= Rational::one())
            }
            _ => false,
        }
    }

    /// Distinct values are separated by single modal atoms.
    pub fn separating(&self) -> bool {
        true
    }

    /// `TX` is finite for finite `X` (no caps needed).
    pub fn finite_values(&self) -> bool {
        matches!(
            self,
            FunctorKind::Powerset { .. }
                | FunctorKind::Selection
                | FunctorKind::SubSelection(_)
                | FunctorKind::AddMeasure(Monoid::ZMod(_))
        )
    }

    /// Membership of `t` in the predicate lifting of `op` at `args`.
    pub fn lifting_contains(&self, op: &OperatorSymbol, args: &[StateSet], t: &TValue) -> Result<bool> {
        if !self.interprets(op) {
            return Err(Error::FunctorMismatch { op: op.to_string(), functor: self.to_string() });
        }
        if args.len() != op.arity() {
            return Err(Error::Arity { op: op.to_string(), expected: op.arity(), got: args.len() });
        }
        let mismatch = || Error::InvalidValue(format!("{} value for functor {self}", t.kind_name()));
        match (op.family(), t) {
            (Family::Box, TValue::Subset(y)) => Ok(y.is_subset(&args[0])),
            (Family::Geq, TValue::Multiset(ms)) => {
                let k = op.grade().expect("graded");
                let mut total = Mult::Fin(0);
                for (x, m) in ms {
                    if args[0].contains(*x) {
                        total = total.add(*m);
                        if total.at_least(k) {
                            return Ok(true);
                        }
                    }
                }
                Ok(total.at_least(k))
            }
            (Family::Prob, TValue::Distribution(d)) => {
                let p = op.param().and_then(Scalar::as_rat).expect("probability");
                let total: Rational = d.iter().filter(|(x, _)| args[0].contains(**x)).map(|(_, w)| w).sum();
                Ok(total >= *p)
            }
            (Family::Cond, TValue::Selection(f)) => Ok(f.apply(&args[0]).is_subset(&args[1])),
            (Family::Exact, TValue::Measure(m)) => Ok(m.measure_of(&args[0]) == op.param()),
            (Family::Measurable, TValue::Measure(m)) => Ok(m.measure_of(&args[0]).is_some()),
            _ => Err(mismatch()),
        }
    }

    /// Checks that `t` is an element of `TX` for `X = {0, …, n-1}`.
    pub fn validate(&self, t: &TValue, n: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidValue(msg));
        if t.bound() > n {
            return bad(format!("value mentions state {} outside a carrier of {n}", t.bound() - 1));
        }
        match (self, t) {
            (FunctorKind::Powerset { .. }, TValue::Subset(_)) => Ok(()),
            (FunctorKind::InfMultiset, TValue::Multiset(_)) => Ok(()),
            (FunctorKind::FinMultiset, TValue::Multiset(ms)) => {
                if ms.values().any(|m| *m == Mult::Inf) {
                    return bad("infinite multiplicity in a finite multiset".into());
                }
                Ok(())
            }
            (FunctorKind::Selection, TValue::Selection(_)) => Ok(()),
            (FunctorKind::SubSelection(b), TValue::Selection(s)) => {
                if !selection_satisfies(*b, s, n)? {
                    return bad(format!("selection function violates {}", b.name()));
                }
                Ok(())
            }
            (FunctorKind::Distribution, TValue::Distribution(d)) => {
                if d.values().any(|w| *w < Rational::zero()) {
                    return bad("negative weight".into());
                }
                if !d.values().sum::<Rational>().is_one() {
                    return bad("weights do not sum to 1".into());
                }
                Ok(())
            }
            (FunctorKind::AddMeasure(mon), TValue::Measure(m)) => check_additive(mon, m, false),
            (FunctorKind::BoundedMeasure, TValue::Measure(m)) => {
                check_additive(&Monoid::Nat, m, false)?;
                let k = m.support().len();
                let full = (1u64 << k) - 1;
                let dom = m.domain();
                if !dom.contains_key(&0) || !dom.contains_key(&full) {
                    return bad("domain of a bounded measure must contain the empty set and the carrier".into());
                }
                for a in dom.keys() {
                    if !dom.contains_key(&(full & !a)) {
                        return bad("domain not closed under complement".into());
                    }
                    for b in dom.keys() {
                        if !dom.contains_key(&(a | b)) {
                            return bad("domain not closed under union".into());
                        }
                    }
                }
                Ok(())
            }
            (FunctorKind::ExactProb, TValue::Measure(m)) => {
                check_additive(&Monoid::NonNegRat, m, true)?;
                let k = m.support().len();
                let full = (1u64 << k) - 1;
                let dom = m.domain();
                if dom.get(&full) != Some(&Scalar::Rat(Rational::one())) {
                    return bad("the carrier must have probability 1".into());
                }
                for (a, va) in dom {
                    for (b, vb) in dom {
                        if b & !a == 0 {
                            let diff = a & !b;
                            let expect = Scalar::Rat(va.as_rat().expect("rational") - vb.as_rat().expect("rational"));
                            if dom.get(&diff) != Some(&expect) {
                                return bad("domain not closed under relative complement".into());
                            }
                        }
                    }
                }
                Ok(())
            }
            _ => bad(format!("{} value for functor {self}", t.kind_name())),
        }
    }
}

/// Additivity on disjoint unions and closure of the domain under them.
fn check_additive(mon: &Monoid, m: &Measure, unit_interval: bool) -> Result<()> {
    let dom = m.domain();
    for v in dom.values() {
        if !mon.contains(v) {
            return Err(Error::InvalidValue(format!("measure value {v} outside {}", mon.name())));
        }
        if unit_interval && v.as_rat().is_some_and(|r| *r > Rational::one()) {
            return Err(Error::InvalidValue(format!("probability {v} above 1")));
        }
    }
    for (a, va) in dom {
        for (b, vb) in dom.range(a..) {
            if a & b != 0 {
                continue;
            }
            match dom.get(&(a | b)) {
                None => {
                    return Err(Error::InvalidValue("domain not closed under disjoint unions".into()));
                }
                Some(vab) => {
                    if mon.add(va, vb).as_ref() != Some(vab) {
                        return Err(Error::InvalidValue("measure is not additive".into()));
                    }
                }
            }
        }
    }
    Ok(())
}

/// The explicit set-theoretic characterization of a selection subfunctor.
///
/// `f(A)` only depends on `A ∩ support` and lies inside the support, so
/// each condition holds over `X` iff it holds for the local table.
pub fn selection_satisfies(b: SelectionAxioms, s: &Selection, n: usize) -> Result<bool> {
    if s.support().last().is_some_and(|x| *x >= n) {
        return Err(Error::InvalidValue(format!("selection mentions states outside a carrier of {n}")));
    }
    Ok(table_satisfies(b, s.table()))
}

/// [`selection_satisfies`] on an explicit table indexed by subset masks.
pub fn table_satisfies(b: SelectionAxioms, table: &[u64]) -> bool {
    let size = table.len() as u64;
    for a in 0..size {
        if table[a as usize] & !a != 0 {
            return false;
        }
    }
    if b == SelectionAxioms::Id {
        return true;
    }
    for a in 0..size {
        for c in 0..size {
            let fa = table[a as usize];
            let fc = table[c as usize];
            let ok = match b {
                SelectionAxioms::Id => true,
                SelectionAxioms::IdDis => table[(a | c) as usize] & !(fa | fc) == 0,
                // f(C) ⊆ A implies f(A) ∩ C ⊆ f(C)
                SelectionAxioms::IdDisCm => fc & !a != 0 || fa & c & !fc == 0,
            };
            if !ok {
                return false;
            }
        }
    }
    true
}

/// Explicit measure from `(set, value)` pairs over `{0, …, n-1}`.
pub fn measure_from_sets(n: usize, sets: impl IntoIterator<Item = (StateSet, Scalar)>) -> Result<TValue> {
    let mut dom = BTreeMap::new();
    for (s, v) in sets {
        if s.bound() > n {
            return Err(Error::InvalidValue("measurable set outside the carrier".into()));
        }
        if let Some(old) = dom.insert(s.mask(), v.clone()) {
            if old != v {
                return Err(Error::InvalidValue("set given two measures".into()));
            }
        }
    }
    Ok(TValue::Measure(Measure::explicit(n, dom)?))
}

impl FunctorKind {
    /// Measure over `{0, …, n-1}` from the given measurable sets, closed
    /// under disjoint unions (and relative complements for probabilities)
    /// with measures computed from the given ones. Conflicting values are
    /// rejected; the result is validated.
    pub fn complete_measure(&self, n: usize, sets: impl IntoIterator<Item = (StateSet, Scalar)>) -> Result<TValue> {
        let (mon, complements) = match self {
            FunctorKind::AddMeasure(mon) => (mon.clone(), false),
            FunctorKind::BoundedMeasure => (Monoid::Nat, false),
            FunctorKind::ExactProb => (Monoid::NonNegRat, true),
            _ => return Err(Error::InvalidValue(format!("measure value for functor {self}"))),
        };
        let TValue::Measure(m) = measure_from_sets(n, sets)? else { unreachable!() };
        let mut dom = m.domain().clone();
        let conflict = || Error::InvalidValue("measure is not additive".into());
        loop {
            let mut added = BTreeMap::new();
            for (a, va) in &dom {
                for (b, vb) in &dom {
                    let derived = if a & b == 0 {
                        Some((a | b, mon.add(va, vb).ok_or_else(conflict)?))
                    } else if complements && b & !a == 0 {
                        let d = va.as_rat().zip(vb.as_rat()).map(|(x, y)| x - y).ok_or_else(conflict)?;
                        if d < Rational::zero() {
                            return Err(conflict());
                        }
                        Some((a & !b, Scalar::Rat(d)))
                    } else {
                        None
                    };
                    if let Some((c, v)) = derived {
                        match dom.get(&c).or_else(|| added.get(&c)) {
                            Some(old) if *old != v => return Err(conflict()),
                            Some(_) => {}
                            None => {
                                added.insert(c, v);
                            }
                        }
                    }
                }
            }
            if added.is_empty() {
                break;
            }
            dom.extend(added);
        }
        let t = TValue::Measure(Measure::explicit(n, dom)?);
        self.validate(&t, n)?;
        Ok(t)
    }
}

/// Membership of a selection value in `S_B(X)` by the explicit
/// characterization of `B`.
pub fn subfunctor_semantic_member(b: SelectionAxioms, t: &TValue, n: usize) -> Result<bool> {
    match t {
        TValue::Selection(s) => selection_satisfies(b, s, n),
        other => Err(Error::InvalidValue(format!("{} value is not a selection function", other.kind_name()))),
    }
}
