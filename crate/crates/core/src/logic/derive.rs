use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::formula::{prop_entails, Formula, OperatorSymbol, Prop};
use crate::semantics::StateSet;

use super::atoms::{OneStepAtom, OneStepFormula};
use super::params::ParamUniverse;
use super::registry::{AxiomScheme, Logic};

/// Limits on axiom instantiation: instances of a scheme with `r` variables
/// over `n` states number `2^(n·r)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InstanceBudget {
    pub max_carrier: usize,
    pub max_instances: u64,
}

impl Default for InstanceBudget {
    fn default() -> Self {
        InstanceBudget { max_carrier: 4, max_instances: 4096 }
    }
}

/// Evaluates a propositional formula over scheme variables in `P(X)`.
fn eval_set(f: &Formula, tau: &dyn Fn(u32) -> StateSet, n: usize) -> Result<StateSet> {
    Ok(match f {
        Formula::Atom(i) => tau(*i),
        Formula::Bottom => StateSet::new(),
        Formula::Not(a) => eval_set(a, tau, n)?.complement(n),
        Formula::And(a, b) => eval_set(a, tau, n)?.intersection(&eval_set(b, tau, n)?),
        Formula::Modal(..) => return Err(Error::NotRankOne(crate::formula::render(f))),
    })
}

/// `ψτ` for a rank-1 formula `ψ`.
pub fn instantiate(f: &Formula, tau: &dyn Fn(u32) -> StateSet, n: usize) -> Result<OneStepFormula> {
    Ok(match f {
        Formula::Atom(_) => return Err(Error::NotRankOne(crate::formula::render(f))),
        Formula::Bottom => Prop::Bottom,
        Formula::Not(a) => Prop::not(instantiate(a, tau, n)?),
        Formula::And(a, b) => Prop::and(instantiate(a, tau, n)?, instantiate(b, tau, n)?),
        Formula::Modal(op, args) => {
            let sets = args.iter().map(|a| eval_set(a, tau, n)).collect::<Result<Vec<_>>>()?;
            Prop::atom(OneStepAtom::new(op.clone(), sets, n)?)
        }
    })
}

/// Every assignment of the scheme's variables to subsets of `X`.
pub fn scheme_instances(s: &AxiomScheme, n: usize, budget: &InstanceBudget) -> Result<Vec<OneStepFormula>> {
    if n > budget.max_carrier {
        return Err(Error::Budget(format!("carrier of {n} states exceeds the instance budget of {}", budget.max_carrier)));
    }
    let vars = s.vars();
    let bits = n * vars.len();
    if bits >= 63 || 1u64 << bits > budget.max_instances {
        return Err(Error::Budget(format!(
            "scheme `{s}` has 2^{bits} instances over {n} states (budget {})",
            budget.max_instances
        )));
    }
    let mask = (1u64 << n) - 1;
    let mut out = Vec::with_capacity(1 << bits);
    for code in 0..1u64 << bits {
        let tau = |v: u32| {
            let k = vars.iter().position(|w| *w == v).expect("scheme variable");
            StateSet::from_mask(code >> (k * n) & mask)
        };
        out.push(instantiate(s.formula(), &tau, n)?);
    }
    Ok(out)
}

/// `{ψτ | ψ ∈ A, τ: P → P(X)}` for the schemes of `universe`, deduplicated
/// and sorted.
pub fn instantiate_axioms(logic: &Logic, n: usize, universe: &ParamUniverse) -> Result<Vec<OneStepFormula>> {
    instantiate_axioms_with(logic, n, universe, &InstanceBudget::default())
}

pub fn instantiate_axioms_with(
    logic: &Logic,
    n: usize,
    universe: &ParamUniverse,
    budget: &InstanceBudget,
) -> Result<Vec<OneStepFormula>> {
    let mut out = BTreeSet::new();
    for s in logic.axioms_for(universe) {
        out.extend(scheme_instances(&s, n, budget)?);
    }
    Ok(out.into_iter().collect())
}

fn operators_of<'a>(fs: impl IntoIterator<Item = &'a OneStepFormula>) -> Vec<OperatorSymbol> {
    let mut ops = BTreeSet::new();
    for f in fs {
        f.for_each_atom(&mut |a: &OneStepAtom| {
            ops.insert(a.op().clone());
        });
    }
    ops.into_iter().collect()
}

fn check_query<'a>(logic: &Logic, n: usize, fs: impl IntoIterator<Item = &'a OneStepFormula>) -> Result<()> {
    let mut err = None;
    for f in fs {
        f.for_each_atom(&mut |a: &OneStepAtom| {
            if err.is_some() {
                return;
            }
            if a.carrier() != n {
                err = Some(Error::AtomUniverseMismatch(format!("{a} is over {} states, expected {n}", a.carrier())));
            } else if let Err(e) = logic.check_operator(a.op()) {
                err = Some(e);
            }
        });
    }
    err.map_or(Ok(()), Err)
}

/// One-step reasoning for a logic over a fixed carrier and parameter
/// universe.
#[derive(Clone, Debug)]
pub struct OneStepProver {
    pub n: usize,
    pub universe: ParamUniverse,
    pub instances: Vec<OneStepFormula>,
}

impl OneStepProver {
    pub fn new(logic: &Logic, n: usize, universe: ParamUniverse) -> Result<Self> {
        let instances = instantiate_axioms(logic, n, &universe)?;
        Ok(OneStepProver { n, universe, instances })
    }

    /// Universe inferred from the operators of `fs`.
    pub fn for_query<'a>(logic: &Logic, n: usize, fs: impl IntoIterator<Item = &'a OneStepFormula>) -> Result<Self> {
        let fs: Vec<&OneStepFormula> = fs.into_iter().collect();
        check_query(logic, n, fs.iter().copied())?;
        let ops = operators_of(fs.iter().copied());
        OneStepProver::new(logic, n, ParamUniverse::for_query(&logic.functor, &ops))
    }

    pub fn derivable(&self, f: &OneStepFormula) -> Result<bool> {
        prop_entails(&self.instances, f)
    }

    pub fn consistent(&self, fs: &[OneStepFormula]) -> Result<bool> {
        let mut all = self.instances.clone();
        all.extend(fs.iter().cloned());
        prop_entails(&all, &Prop::Bottom).map(|e| !e)
    }
}

/// `⊢¹ φ`: `φ` follows propositionally from the axiom instances over `X`.
pub fn one_step_derivable(logic: &Logic, n: usize, f: &OneStepFormula) -> Result<bool> {
    OneStepProver::for_query(logic, n, [f])?.derivable(f)
}

/// No finite conjunction of `Φ` is refutable.
pub fn one_step_consistent(logic: &Logic, n: usize, fs: &[OneStepFormula]) -> Result<bool> {
    OneStepProver::for_query(logic, n, fs)?.consistent(fs)
}
