use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::formula::{Family, OperatorSymbol, Scalar};
use crate::logic::{Logic, OneStepAtom, OneStepFormula};
use crate::semantics::{measure_from_sets, Caps, FunctorKind, Mult, Selection, StateSet, TValue};

use super::eval::{bruteforce, caps_for, literal_of, satisfies_all};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Constructed,
    BruteForce,
}

/// A value satisfying a one-step problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub t: TValue,
    pub provenance: Provenance,
}

/// Decisions of atoms by the literals of `Φ`.
pub fn decisions(fs: &[OneStepFormula]) -> Result<BTreeMap<OneStepAtom, bool>> {
    let mut out = BTreeMap::new();
    for f in fs {
        if let Some((a, pos)) = literal_of(f) {
            if out.insert(a.clone(), pos) == Some(!pos) {
                return Err(Error::Inconsistent(format!("{a} is decided both ways")));
            }
        }
    }
    Ok(out)
}

/// The partition `blocks` of `X` as a quotient map.
struct Quotient {
    blocks: Vec<StateSet>,
}

impl Quotient {
    fn new(n: usize, blocks: Option<&[StateSet]>) -> Result<Self> {
        let blocks: Vec<StateSet> = match blocks {
            Some(b) => b.to_vec(),
            None => (0..n).map(StateSet::singleton).collect(),
        };
        let mut class = vec![usize::MAX; n];
        for (i, b) in blocks.iter().enumerate() {
            if b.is_empty() {
                return Err(Error::Precondition("empty block in the algebra".into()));
            }
            for x in b.iter() {
                if x >= n || class[x] != usize::MAX {
                    return Err(Error::Precondition("algebra blocks must partition the carrier".into()));
                }
                class[x] = i;
            }
        }
        if class.contains(&usize::MAX) {
            return Err(Error::Precondition("algebra blocks must cover the carrier".into()));
        }
        Ok(Quotient { blocks })
    }

    fn k(&self) -> usize {
        self.blocks.len()
    }

    /// Image of a union of blocks; `None` for other sets.
    fn image(&self, a: &StateSet) -> Option<StateSet> {
        let mut out = StateSet::new();
        for (i, b) in self.blocks.iter().enumerate() {
            if b.is_subset(a) {
                out.insert(i);
            } else if !b.is_disjoint(a) {
                return None;
            }
        }
        Some(out)
    }

    fn atom(&self, a: &OneStepAtom) -> Option<OneStepAtom> {
        let args = a.args().iter().map(|s| self.image(s)).collect::<Option<Vec<_>>>()?;
        OneStepAtom::new(a.op().clone(), args, self.k()).ok()
    }

    fn formula(&self, f: &OneStepFormula) -> Option<OneStepFormula> {
        let mut ok = true;
        let g = f.map(&mut |a: &OneStepAtom| match self.atom(a) {
            Some(b) => b,
            None => {
                ok = false;
                a.clone()
            }
        });
        ok.then_some(g)
    }

    /// First element of each block.
    fn section(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.first().expect("nonempty block")).collect()
    }
}

/// `t ⊨¹ Φ` built by the closed-form construction for the logic's functor
/// from the decisions of `Φ` over the algebra generated by `blocks`
/// (singletons when `None`), pushed to `X` along the section picking the
/// first state of each block. Verified; falls back to an exhaustive scan
/// within `caps` when the construction does not verify.
pub fn one_step_witness(
    logic: &Logic,
    n: usize,
    phi: &[OneStepFormula],
    blocks: Option<&[StateSet]>,
    caps: &Caps,
) -> Result<Witness> {
    let functor = &logic.functor;
    let q = Quotient::new(n, blocks)?;
    let section = q.section();
    let dec = decisions(phi)?;
    let mut local = BTreeMap::new();
    for (a, v) in &dec {
        if let Some(b) = q.atom(a) {
            local.insert(b, *v);
        }
    }
    let built = match construct(functor, q.k(), &local) {
        Err(Error::NotDecisive(_)) => None,
        other => other?,
    };
    if let Some(t) = built {
        if functor.validate(&t, q.k()).is_ok() {
            let t = t.push(&section);
            if satisfies_all(functor, phi, &t)? {
                return Ok(Witness { t, provenance: Provenance::Constructed });
            }
        }
    }
    let caps = caps_for(phi, caps);
    let local_phi: Option<Vec<OneStepFormula>> = phi.iter().map(|f| q.formula(f)).collect();
    let found = match local_phi {
        Some(lp) => bruteforce(functor, q.k(), &lp, &caps)?.witness.map(|t| t.push(&section)),
        None => bruteforce(functor, n, phi, &caps)?.witness,
    };
    match found {
        Some(t) if satisfies_all(functor, phi, &t)? => Ok(Witness { t, provenance: Provenance::BruteForce }),
        _ => Err(Error::NoWitness(format!("no {} value satisfies the {} formulas within caps", functor, phi.len()))),
    }
}

fn decided(d: &BTreeMap<OneStepAtom, bool>, op: OperatorSymbol, args: Vec<StateSet>, n: usize) -> Result<bool> {
    let a = OneStepAtom::new(op, args, n)?;
    d.get(&a).copied().ok_or_else(|| Error::NotDecisive(a.to_string()))
}

/// Values `(A, m)` with `E_m A` decided true; at most one `m` per `A`.
fn exact_values(d: &BTreeMap<OneStepAtom, bool>) -> Result<BTreeMap<StateSet, Scalar>> {
    let mut out = BTreeMap::new();
    for (a, v) in d {
        if *v && a.op().family() == Family::Exact {
            let m = a.op().param().expect("E_m has a parameter").clone();
            if let Some(old) = out.insert(a.args()[0].clone(), m.clone()) {
                if old != m {
                    return Err(Error::Inconsistent(format!(
                        "{:?} is given measures {old} and {m}",
                        a.args()[0]
                    )));
                }
            }
        }
    }
    Ok(out)
}

/// The closed-form constructions over `X = {0, …, n-1}`; `None` where no
/// construction is known.
fn construct(functor: &FunctorKind, n: usize, d: &BTreeMap<OneStepAtom, bool>) -> Result<Option<TValue>> {
    let full = StateSet::full(n);
    Ok(Some(match functor {
        FunctorKind::Powerset { .. } => {
            // {x | ◇{x}}
            let mut t = StateSet::new();
            for x in 0..n {
                let others = full.difference(&StateSet::singleton(x));
                if !decided(d, OperatorSymbol::boxed(), vec![others], n)? {
                    t.insert(x);
                }
            }
            TValue::Subset(t)
        }
        FunctorKind::Selection | FunctorKind::SubSelection(_) => {
            if n > crate::semantics::MAX_TABLE_SUPPORT {
                return Err(Error::Budget(format!("selection over {n} states")));
            }
            // f(A) = ⋂{B | A ⇒ B}
            let mut table = Vec::with_capacity(1 << n);
            for a in StateSet::all_subsets(n) {
                let mut fa = full.clone();
                for b in StateSet::all_subsets(n) {
                    if decided(d, OperatorSymbol::cond(), vec![a.clone(), b.clone()], n)? {
                        fa = fa.intersection(&b);
                    }
                }
                table.push(fa.mask());
            }
            TValue::Selection(Selection::explicit(n, table)?)
        }
        FunctorKind::InfMultiset | FunctorKind::FinMultiset => {
            // B(x) is the largest decided grade of {x}; the largest grade of
            // the problem stands for "unbounded" in the infinite case.
            let top = d.keys().filter_map(|a| a.op().grade()).max().unwrap_or(0);
            let mut entries = Vec::new();
            for x in 0..n {
                let s = StateSet::singleton(x);
                let mut best = 0;
                for (a, v) in d {
                    if *v && a.args()[0] == s {
                        if let Some(k) = a.op().grade() {
                            best = best.max(k);
                        }
                    }
                }
                let m = if best == top && best > 0 && *functor == FunctorKind::InfMultiset {
                    Mult::Inf
                } else {
                    Mult::Fin(best)
                };
                entries.push((x, m));
            }
            TValue::multiset(entries)
        }
        FunctorKind::AddMeasure(_) | FunctorKind::ExactProb => {
            let values = exact_values(d)?;
            match functor.complete_measure(n, values) {
                Ok(t) => t,
                Err(Error::InvalidValue(_)) => return Ok(None),
                Err(e) => return Err(e),
            }
        }
        FunctorKind::BoundedMeasure => {
            let values = exact_values(d)?;
            let domain: Vec<StateSet> = d
                .iter()
                .filter(|(a, v)| **v && a.op().family() == Family::Measurable)
                .map(|(a, _)| a.args()[0].clone())
                .collect();
            // Minimal nonempty measurable sets.
            let minimal: Vec<&StateSet> = domain
                .iter()
                .filter(|a| !a.is_empty() && !domain.iter().any(|b| !b.is_empty() && b != *a && b.is_subset(a)))
                .collect();
            let bound = values.values().filter_map(Scalar::as_nat).max().unwrap_or(0);
            let atom_value = |a: &StateSet| -> u64 {
                if let Some(m) = values.get(a).and_then(Scalar::as_nat) {
                    m
                } else if values.keys().any(|b| a.is_subset(b)) {
                    0
                } else {
                    bound + 1
                }
            };
            let sets = domain.iter().map(|b| {
                let m: u64 = minimal.iter().filter(|a| a.is_subset(b)).map(|a| atom_value(a)).sum();
                (b.clone(), Scalar::Nat(m))
            });
            measure_from_sets(n, sets)?
        }
        FunctorKind::Distribution => return Ok(None),
    }))
}
