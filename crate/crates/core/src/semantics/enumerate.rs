use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::Zero;

use super::functor::{table_satisfies, FunctorKind};
use super::monoid::Monoid;
use super::stateset::StateSet;
use super::tvalue::{Measure, Mult, Selection, TValue};
use crate::error::{Error, Result};
use crate::formula::{rat, unit_grid, Rational, Scalar};

/// Caps that make enumeration of infinite value spaces finite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Largest finite multiplicity or natural measure value.
    pub mult: u64,
    /// Largest denominator of rational weights and measures.
    pub den: u64,
    /// Largest carrier for which enumeration is attempted.
    pub max_carrier: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { mult: 2, den: 4, max_carrier: 16 }
    }
}

impl Caps {
    pub fn new(mult: u64, den: u64) -> Self {
        Caps { mult, den, ..Caps::default() }
    }
}

/// Boxed stream of values.
pub type Values = Box<dyn Iterator<Item = TValue>>;

/// Deterministic enumeration of `TX` for `X = {0, …, n-1}`, exhaustive
/// within `caps`.
pub fn enumerate_tvalues(functor: &FunctorKind, n: usize, caps: &Caps) -> Result<Values> {
    let too_big = |limit: usize| {
        let limit = limit.min(caps.max_carrier);
        if n > limit {
            Err(Error::Budget(format!("enumeration of {functor} over {n} states (limit {limit})")))
        } else {
            Ok(())
        }
    };
    match functor {
        FunctorKind::Powerset { .. } => {
            too_big(16)?;
            Ok(Box::new(StateSet::all_subsets(n).map(TValue::Subset)))
        }
        FunctorKind::InfMultiset | FunctorKind::FinMultiset => {
            too_big(10)?;
            let mut values: Vec<Mult> = (0..=caps.mult).map(Mult::Fin).collect();
            if *functor == FunctorKind::InfMultiset {
                values.push(Mult::Inf);
            }
            Ok(Box::new(Odometer::new(vec![values.len(); n]).map(move |digits| {
                TValue::multiset(digits.iter().enumerate().map(|(x, d)| (x, values[*d])))
            })))
        }
        FunctorKind::Selection => {
            too_big(3)?;
            Ok(Box::new(selections(n)))
        }
        FunctorKind::SubSelection(b) => {
            too_big(3)?;
            let b = *b;
            Ok(Box::new(shrinking_selections(n).filter(move |t| match t {
                TValue::Selection(s) => table_satisfies(b, s.table()),
                _ => false,
            })))
        }
        FunctorKind::Distribution => {
            too_big(6)?;
            Ok(Box::new(distributions(n, caps.den).into_iter()))
        }
        FunctorKind::AddMeasure(mon) => {
            too_big(3)?;
            let values = mon.elements(caps.mult, caps.den);
            let families = closed_families(n, &[], |fam, a, b| a & b != 0 || fam >> (a | b) & 1 == 1);
            Ok(Box::new(measures(n, families, values, mon.clone(), None).into_iter()))
        }
        FunctorKind::BoundedMeasure => {
            too_big(3)?;
            let values = Monoid::Nat.elements(caps.mult, 1);
            let full = (1u64 << n) - 1;
            let families =
                closed_families(n, &[0, full], |fam, a, b| fam >> (full & !a) & 1 == 1 && fam >> (a | b) & 1 == 1);
            Ok(Box::new(measures(n, families, values, Monoid::Nat, None).into_iter()))
        }
        FunctorKind::ExactProb => {
            too_big(3)?;
            let values: Vec<Scalar> = unit_grid(caps.den).into_iter().map(Scalar::Rat).collect();
            let full = (1u64 << n) - 1;
            let families = closed_families(n, &[full], |fam, a, b| {
                (a & b != 0 || fam >> (a | b) & 1 == 1) && (b & !a != 0 || fam >> (a & !b) & 1 == 1)
            });
            let one = Scalar::Rat(rat(1, 1));
            Ok(Box::new(measures(n, families, values, Monoid::NonNegRat, Some(one)).into_iter()))
        }
    }
}

fn selections(n: usize) -> impl Iterator<Item = TValue> {
    let size = 1usize << n;
    Odometer::new(vec![size; size]).map(move |digits| {
        let table = digits.into_iter().map(|d| d as u64).collect();
        TValue::Selection(Selection::explicit(n, table).expect("well-formed table"))
    })
}

/// Selections with `f(A) ⊆ A`, enumerated without the others.
fn shrinking_selections(n: usize) -> impl Iterator<Item = TValue> {
    let size = 1u64 << n;
    let submasks: Vec<Vec<u64>> = (0..size)
        .map(|a| (0..size).filter(|b| b & !a == 0).collect())
        .collect();
    let bases: Vec<usize> = submasks.iter().map(Vec::len).collect();
    Odometer::new(bases).map(move |digits| {
        let table = digits.iter().enumerate().map(|(a, d)| submasks[a][*d]).collect();
        TValue::Selection(Selection::explicit(n, table).expect("well-formed table"))
    })
}

/// Digit vectors with per-position bases, first digit fastest.
struct Odometer {
    digits: Vec<usize>,
    bases: Vec<usize>,
    done: bool,
}

impl Odometer {
    fn new(bases: Vec<usize>) -> Self {
        let done = bases.contains(&0);
        Odometer { digits: vec![0; bases.len()], bases, done }
    }
}

impl Iterator for Odometer {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.digits.clone();
        self.done = true;
        for i in 0..self.digits.len() {
            self.digits[i] += 1;
            if self.digits[i] < self.bases[i] {
                self.done = false;
                break;
            }
            self.digits[i] = 0;
        }
        Some(out)
    }
}

/// Distributions whose weights share a denominator `d ≤ den`, without
/// repetitions, ordered by smallest common denominator.
fn distributions(n: usize, den: u64) -> Vec<TValue> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut seen = BTreeSet::new();
    for d in 1..=den.max(1) {
        let mut parts = vec![0u64; n];
        compositions(d, 0, &mut parts, &mut |parts| {
            let key: Vec<(usize, Rational)> = parts
                .iter()
                .enumerate()
                .filter(|(_, k)| **k > 0)
                .map(|(x, k)| (x, rat(*k as i64, d as i64)))
                .collect();
            if seen.insert(key.clone()) {
                out.push(TValue::Distribution(key.into_iter().collect()));
            }
        });
    }
    out
}

fn compositions(rest: u64, i: usize, parts: &mut Vec<u64>, emit: &mut dyn FnMut(&[u64])) {
    if i + 1 == parts.len() {
        parts[i] = rest;
        emit(parts);
        return;
    }
    for k in 0..=rest {
        parts[i] = k;
        compositions(rest - k, i + 1, parts, emit);
    }
}

/// Families of subsets of an `n`-set, as bitmasks over subset masks, that
/// contain every set in `required` and satisfy `ok(family, a, b)` for all
/// members `a, b`. Ascending.
fn closed_families(n: usize, required: &[u64], ok: impl Fn(u64, u64, u64) -> bool) -> Vec<u64> {
    let size = 1u64 << n;
    let mut out = Vec::new();
    for fam in 0..1u64 << size {
        if required.iter().any(|r| fam >> r & 1 == 0) {
            continue;
        }
        let members: Vec<u64> = (0..size).filter(|a| fam >> a & 1 == 1).collect();
        if members.iter().all(|a| members.iter().all(|b| ok(fam, *a, *b))) {
            out.push(fam);
        }
    }
    out
}

/// Additive assignments of `values` to each family, in family order and
/// then value order. `total` pins the measure of the carrier.
fn measures(n: usize, families: Vec<u64>, values: Vec<Scalar>, mon: Monoid, total: Option<Scalar>) -> Vec<TValue> {
    let size = 1u64 << n;
    let mut out = Vec::new();
    for fam in families {
        let members: Vec<u64> = (0..size).filter(|a| fam >> a & 1 == 1).collect();
        let mut search = MeasureSearch { values: &values, mon: &mon, total: total.as_ref(), full: size - 1 };
        let mut assign = BTreeMap::new();
        search.run(&members, &mut assign, &mut |a| {
            out.push(TValue::Measure(Measure::explicit(n, a.clone()).expect("small carrier")));
        });
    }
    out
}

struct MeasureSearch<'a> {
    values: &'a [Scalar],
    mon: &'a Monoid,
    total: Option<&'a Scalar>,
    full: u64,
}

impl MeasureSearch<'_> {
    /// Assigns the members in increasing order. Every disjoint pair has its
    /// union above both parts, so additivity is checked when the union is
    /// assigned.
    fn run(&mut self, members: &[u64], assign: &mut BTreeMap<u64, Scalar>, emit: &mut dyn FnMut(&BTreeMap<u64, Scalar>)) {
        let Some((&c, rest)) = members.split_first() else {
            emit(assign);
            return;
        };
        for v in self.values {
            if c == self.full && self.total.is_some_and(|t| t != v) {
                continue;
            }
            if c == 0 && self.mon.add(v, v).as_ref() != Some(v) {
                continue;
            }
            let additive = assign.iter().all(|(a, va)| {
                if *a == 0 || a & !c != 0 {
                    return true;
                }
                match assign.get(&(c & !a)) {
                    Some(vb) => self.mon.add(va, vb).as_ref() == Some(v),
                    None => true,
                }
            });
            if additive {
                assign.insert(c, v.clone());
                self.run(rest, assign, emit);
                assign.remove(&c);
            }
        }
    }
}

/// Least common multiple of the denominators of `rs` (at least 1).
pub fn common_denominator<'a>(rs: impl IntoIterator<Item = &'a Rational>) -> u64 {
    let mut l = 1u64;
    for r in rs {
        if r.is_zero() {
            continue;
        }
        let d: u64 = r.denom().try_into().unwrap_or(u64::MAX);
        l = l.lcm(&d);
    }
    l
}
