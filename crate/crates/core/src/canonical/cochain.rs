use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::formula::{rat, Scalar};
use crate::semantics::{measure_from_sets, FunctorKind, Mult, Selection, StateSet, TValue};

/// Finite sets `X_0, …, X_N` of sizes `sizes` with surjections
/// `p_n: X_{n+1} → X_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    sizes: Vec<usize>,
    projections: Vec<Vec<usize>>,
}

impl Cochain {
    pub fn new(sizes: Vec<usize>, projections: Vec<Vec<usize>>) -> Result<Self> {
        if sizes.is_empty() || projections.len() + 1 != sizes.len() {
            return Err(Error::Precondition(format!(
                "{} levels need {} projections, got {}",
                sizes.len(),
                sizes.len().saturating_sub(1),
                projections.len()
            )));
        }
        for (n, p) in projections.iter().enumerate() {
            if p.len() != sizes[n + 1] || p.iter().any(|y| *y >= sizes[n]) {
                return Err(Error::Precondition(format!("projection {n} is not a map X_{} → X_{n}", n + 1)));
            }
            let mut hit = vec![false; sizes[n]];
            for y in p {
                hit[*y] = true;
            }
            if hit.contains(&false) {
                return Err(Error::Precondition(format!("projection {n} is not onto")));
            }
        }
        Ok(Cochain { sizes, projections })
    }

    /// Index of the last level.
    pub fn top(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn size(&self, n: usize) -> usize {
        self.sizes[n]
    }

    pub fn projection(&self, n: usize) -> &[usize] {
        &self.projections[n]
    }

    /// `X_N → X_n`, composing the projections.
    pub fn to_level(&self, n: usize) -> Vec<usize> {
        let mut f: Vec<usize> = (0..self.sizes[self.top()]).collect();
        for l in (n..self.top()).rev() {
            for x in f.iter_mut() {
                *x = self.projections[l][*x];
            }
        }
        f
    }

    /// Smallest `M` such that every projection from level `M` on is a
    /// bijection.
    pub fn stable_from(&self) -> usize {
        let mut m = self.top();
        while m > 0 && self.sizes[m - 1] == self.sizes[m] {
            m -= 1;
        }
        m
    }
}

/// `A^0, …, A^N` for an alphabet of `letters` symbols; words are numbered
/// in base `letters`, first letter most significant, and projections drop
/// the last letter.
pub fn word_cochain(letters: usize, depth: usize) -> Result<Cochain> {
    let sizes: Vec<usize> = (0..=depth as u32).map(|n| letters.pow(n)).collect();
    let projections = (0..depth).map(|n| (0..sizes[n + 1]).map(|w| w / letters).collect()).collect();
    Cochain::new(sizes, projections)
}

/// Values `t_n ∈ TX_n` over a cochain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoherentFamily {
    pub cochain: Cochain,
    pub values: Vec<TValue>,
}

/// Whether `Tp_n(t_{n+1}) = t_n` for every `n < N`.
pub fn check_coherent_family(functor: &FunctorKind, fam: &CoherentFamily) -> Result<bool> {
    let c = &fam.cochain;
    if fam.values.len() != c.top() + 1 {
        return Err(Error::Precondition(format!("{} values for {} levels", fam.values.len(), c.top() + 1)));
    }
    for (n, t) in fam.values.iter().enumerate() {
        functor.validate(t, c.size(n))?;
    }
    for n in 0..c.top() {
        if !fam.values[n + 1].push(c.projection(n)).same_as(&fam.values[n], c.size(n))? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftMode {
    /// The cochain is constant from some level on, witnessed by a bijective
    /// last projection; the limit is `X_N` exactly.
    EventuallyConstant,
    /// `X_N` stands in for the limit.
    Partial,
}

/// A value over `X_N` inducing the family: the limit of the subsets, the
/// least multiplicity or weight along the thread, the selection choosing
/// `x` for `A` when every level where `A` is a preimage of `B` chooses the
/// image of `x` for `B`, and the measure on all preimages of measurable
/// sets. Verified against every level before returning.
pub fn lift_family(functor: &FunctorKind, fam: &CoherentFamily, mode: LiftMode) -> Result<TValue> {
    if !check_coherent_family(functor, fam)? {
        return Err(Error::Precondition("the family is not coherent".into()));
    }
    let c = &fam.cochain;
    let top = c.top();
    if mode == LiftMode::EventuallyConstant && top > 0 && c.stable_from() == top {
        return Err(Error::Precondition("the cochain shows no stable step".into()));
    }
    let size = c.size(top);
    let maps: Vec<Vec<usize>> = (0..=top).map(|n| c.to_level(n)).collect();
    let t = match &fam.values[top] {
        TValue::Subset(_) => {
            let mut out = StateSet::new();
            for x in 0..size {
                if (0..=top).all(|n| matches!(&fam.values[n], TValue::Subset(a) if a.contains(maps[n][x]))) {
                    out.insert(x);
                }
            }
            TValue::Subset(out)
        }
        TValue::Multiset(_) => {
            let mut entries = Vec::new();
            for x in 0..size {
                let least = (0..=top)
                    .map(|n| match &fam.values[n] {
                        TValue::Multiset(b) => b.get(&maps[n][x]).copied().unwrap_or(Mult::Fin(0)),
                        _ => Mult::Fin(0),
                    })
                    .min()
                    .expect("at least one level");
                entries.push((x, least));
            }
            TValue::multiset(entries)
        }
        TValue::Distribution(_) => {
            let mut entries = Vec::new();
            for x in 0..size {
                let least = (0..=top)
                    .map(|n| match &fam.values[n] {
                        TValue::Distribution(d) => d.get(&maps[n][x]).cloned().unwrap_or_else(|| rat(0, 1)),
                        _ => rat(0, 1),
                    })
                    .min()
                    .expect("at least one level");
                entries.push((x, least));
            }
            TValue::distribution(entries)?
        }
        TValue::Selection(_) => {
            let mut table = Vec::with_capacity(1 << size);
            for a in StateSet::all_subsets(size) {
                let mut fa = StateSet::full(size);
                for n in 0..=top {
                    let b = a.image(&maps[n]);
                    if b.preimage(&maps[n]) != a {
                        continue;
                    }
                    let TValue::Selection(f) = &fam.values[n] else { unreachable!("validated") };
                    fa = fa.intersection(&f.apply(&b).preimage(&maps[n]));
                }
                table.push(fa.mask());
            }
            TValue::Selection(Selection::explicit(size, table)?)
        }
        TValue::Measure(_) => {
            let mut sets: BTreeMap<StateSet, Scalar> = BTreeMap::new();
            for n in 0..=top {
                let TValue::Measure(m) = &fam.values[n] else { unreachable!("validated") };
                for (b, v) in m.sets() {
                    let a = b.preimage(&maps[n]);
                    if let Some(old) = sets.insert(a, v.clone()) {
                        if old != *v {
                            return Err(Error::InvalidValue("levels disagree on a measure".into()));
                        }
                    }
                }
            }
            let t = measure_from_sets(size, sets)?;
            functor.validate(&t, size)?;
            t
        }
    };
    for n in 0..=top {
        if !t.push(&maps[n]).same_as(&fam.values[n], c.size(n))? {
            return Err(Error::InvalidValue(format!("the lift does not project to level {n}")));
        }
    }
    Ok(t)
}

/// A random cochain with at most `levels + 1` levels of size at most
/// `max_size`, whose last projection is a bijection, with the family
/// induced by a random value on the last level.
pub fn random_coherent_family(functor: &FunctorKind, levels: usize, max_size: usize, rng: &mut impl Rng) -> Result<CoherentFamily> {
    let depth = rng.gen_range(1..=levels.max(1));
    let mut sizes = vec![rng.gen_range(1..=max_size)];
    for _ in 1..depth {
        let last = *sizes.last().expect("nonempty");
        sizes.push(rng.gen_range(last..=max_size));
    }
    sizes.push(*sizes.last().expect("nonempty"));
    let mut projections = Vec::new();
    for n in 0..depth {
        let (lo, hi) = (sizes[n], sizes[n + 1]);
        let mut p: Vec<usize> = (0..lo).chain((lo..hi).map(|_| rng.gen_range(0..lo))).collect();
        p.shuffle(rng);
        projections.push(p);
    }
    let cochain = Cochain::new(sizes, projections)?;
    let top_value = crate::semantics::random_tvalue(functor, cochain.size(cochain.top()), rng)?;
    let values = (0..=cochain.top()).map(|n| top_value.push(&cochain.to_level(n))).collect();
    Ok(CoherentFamily { cochain, values })
}
