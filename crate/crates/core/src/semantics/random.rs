use rand::Rng;

use super::functor::{measure_from_sets, table_satisfies, FunctorKind};
use super::monoid::Monoid;
use super::stateset::StateSet;
use super::tvalue::{Mult, Selection, TValue};
use crate::error::{Error, Result};
use crate::formula::{rat, Scalar};

/// A random value of `TX` for `X = {0, …, n-1}` with small multiplicities,
/// weights and measure values. Measures are built on the unions of some
/// blocks of a random partition.
pub fn random_tvalue(functor: &FunctorKind, n: usize, rng: &mut impl Rng) -> Result<TValue> {
    Ok(match functor {
        FunctorKind::Powerset { .. } => TValue::Subset((0..n).filter(|_| rng.gen_bool(0.5)).collect()),
        FunctorKind::InfMultiset | FunctorKind::FinMultiset => {
            let inf = *functor == FunctorKind::InfMultiset;
            TValue::multiset((0..n).map(|x| {
                let m = if inf && rng.gen_ratio(1, 5) { Mult::Inf } else { Mult::Fin(rng.gen_range(0..=3)) };
                (x, m)
            }))
        }
        FunctorKind::Selection | FunctorKind::SubSelection(_) => {
            if n > 6 {
                return Err(Error::Budget(format!("random selection over {n} states")));
            }
            let shrinking = matches!(functor, FunctorKind::SubSelection(_));
            let mut table: Vec<u64> = (0..1u64 << n).collect();
            for _ in 0..32 {
                let candidate: Vec<u64> = (0..1u64 << n)
                    .map(|a| {
                        let r = rng.gen_range(0..1u64 << n);
                        if shrinking {
                            r & a
                        } else {
                            r
                        }
                    })
                    .collect();
                let ok = match functor {
                    FunctorKind::SubSelection(b) => table_satisfies(*b, &candidate),
                    _ => true,
                };
                if ok {
                    table = candidate;
                    break;
                }
            }
            TValue::Selection(Selection::explicit(n, table)?)
        }
        FunctorKind::Distribution => {
            let mut w: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
            if n > 0 && w.iter().all(|x| *x == 0) {
                w[rng.gen_range(0..n)] = 1;
            }
            let total: i64 = w.iter().sum();
            TValue::distribution(w.iter().enumerate().filter(|(_, x)| **x > 0).map(|(i, x)| (i, rat(*x, total))))?
        }
        FunctorKind::AddMeasure(m) => random_measure(m, n, false, rng)?,
        FunctorKind::BoundedMeasure => random_measure(&Monoid::Nat, n, true, rng)?,
        FunctorKind::ExactProb => {
            let blocks = partition(n, rng);
            let w: Vec<i64> = blocks.iter().map(|_| rng.gen_range(0..=3)).collect();
            let total: i64 = w.iter().sum::<i64>().max(1);
            let mut w = w;
            if w.iter().all(|x| *x == 0) && !w.is_empty() {
                w[0] = 1;
            }
            let vals: Vec<Scalar> = w.iter().map(|x| Scalar::Rat(rat(*x, total))).collect();
            unions(&blocks, &vals, &Monoid::NonNegRat, n)?
        }
    })
}

/// Random partition of `{0, …, n-1}` into nonempty blocks.
fn partition(n: usize, rng: &mut impl Rng) -> Vec<StateSet> {
    let mut blocks: Vec<StateSet> = Vec::new();
    for x in 0..n {
        let i = rng.gen_range(0..=blocks.len());
        if i == blocks.len() {
            blocks.push(StateSet::singleton(x));
        } else {
            blocks[i].insert(x);
        }
    }
    blocks
}

fn random_measure(m: &Monoid, n: usize, all_blocks: bool, rng: &mut impl Rng) -> Result<TValue> {
    let mut blocks = partition(n, rng);
    if !all_blocks {
        blocks.retain(|_| rng.gen_bool(0.7));
    }
    let elems = m.elements(3, 2);
    let vals: Vec<Scalar> = blocks.iter().map(|_| elems[rng.gen_range(0..elems.len())].clone()).collect();
    unions(&blocks, &vals, m, n)
}

/// The measure on all unions of `blocks` with the given block values.
fn unions(blocks: &[StateSet], vals: &[Scalar], m: &Monoid, n: usize) -> Result<TValue> {
    let mut sets = Vec::new();
    for mask in 0..1u64 << blocks.len() {
        let mut a = StateSet::new();
        let mut parts = Vec::new();
        for (i, b) in blocks.iter().enumerate() {
            if mask >> i & 1 == 1 {
                a = a.union(b);
                parts.push(&vals[i]);
            }
        }
        let v = m.sum(parts).ok_or_else(|| Error::InvalidValue("block value outside the monoid".into()))?;
        sets.push((a, v));
    }
    measure_from_sets(n, sets)
}
