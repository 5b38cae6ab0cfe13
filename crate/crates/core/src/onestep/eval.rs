use crate::error::{Error, Result};
use crate::formula::{Family, OperatorSymbol, Prop, Scalar};
use crate::logic::{default_signature, scheme_instances, AxiomScheme, InstanceBudget, Logic, OneStepAtom, OneStepFormula, ParamUniverse};
use crate::semantics::{common_denominator, enumerate_tvalues, Caps, FunctorKind, StateSet, TValue};

/// `t ⊨¹ φ`.
pub fn one_step_eval(functor: &FunctorKind, f: &OneStepFormula, t: &TValue) -> Result<bool> {
    f.try_eval(&mut |a: &OneStepAtom| functor.lifting_contains(a.op(), a.args(), t))
}

/// `t ⊨¹ φ` for every `φ ∈ Φ`.
pub fn satisfies_all(functor: &FunctorKind, fs: &[OneStepFormula], t: &TValue) -> Result<bool> {
    for f in fs {
        if !one_step_eval(functor, f, t)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Enumeration caps large enough for the parameters occurring in `fs`:
/// multiplicities up to the largest grade or natural value, denominators
/// up to the least common one.
pub fn caps_for(fs: &[OneStepFormula], base: &Caps) -> Caps {
    let mut nat = 0u64;
    let mut rats = Vec::new();
    for f in fs {
        f.for_each_atom(&mut |a: &OneStepAtom| match a.op().param() {
            Some(Scalar::Nat(k)) => nat = nat.max(*k),
            Some(Scalar::Rat(r)) => rats.push(r.clone()),
            None => {}
        });
    }
    Caps {
        mult: base.mult.max(nat),
        den: base.den.max(common_denominator(rats.iter())),
        max_carrier: base.max_carrier,
    }
}

/// A one-step satisfiability question over `X = {0, …, carrier-1}`.
#[derive(Clone, Debug)]
pub struct OneStepProblem {
    pub logic: Logic,
    pub carrier: usize,
    pub phi: Vec<OneStepFormula>,
    pub caps: Caps,
}

impl OneStepProblem {
    /// Caps derived from the parameters of `phi`.
    pub fn new(logic: Logic, carrier: usize, phi: Vec<OneStepFormula>) -> Self {
        let caps = caps_for(&phi, &Caps::default());
        OneStepProblem { logic, carrier, phi, caps }
    }
}

/// Result of an exhaustive scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteForce {
    pub witness: Option<TValue>,
    /// Whether absence of a witness is absolute rather than relative to
    /// the caps.
    pub absolute: bool,
}

/// First value in enumeration order satisfying every formula.
pub fn one_step_sat_bruteforce(p: &OneStepProblem) -> Result<BruteForce> {
    bruteforce(&p.logic.functor, p.carrier, &p.phi, &p.caps)
}

pub(crate) fn bruteforce(functor: &FunctorKind, n: usize, fs: &[OneStepFormula], caps: &Caps) -> Result<BruteForce> {
    for t in enumerate_tvalues(functor, n, caps)? {
        if satisfies_all(functor, fs, &t)? {
            return Ok(BruteForce { witness: Some(t), absolute: true });
        }
    }
    Ok(BruteForce { witness: None, absolute: functor.finite_values() })
}

/// Every tuple of `arity` subsets of an `n`-set, first argument slowest.
pub fn argument_tuples(n: usize, arity: usize) -> Vec<Vec<StateSet>> {
    let subsets: Vec<StateSet> = StateSet::all_subsets(n).collect();
    let mut out: Vec<Vec<StateSet>> = vec![vec![]];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                subsets.iter().map(move |s| {
                    let mut v = prefix.clone();
                    v.push(s.clone());
                    v
                })
            })
            .collect();
    }
    out
}

/// All atoms over `X` for the given operators, in atom order.
pub fn all_atoms(ops: &[OperatorSymbol], n: usize) -> Result<Vec<OneStepAtom>> {
    let mut out = Vec::new();
    for op in ops {
        for args in argument_tuples(n, op.arity()) {
            out.push(OneStepAtom::new(op.clone(), args, n)?);
        }
    }
    out.sort();
    Ok(out)
}

/// Operators of the functor's signature within `caps`.
pub fn operators_within(functor: &FunctorKind, caps: &Caps) -> Vec<OperatorSymbol> {
    default_signature(functor)
        .symbols(caps.mult, caps.den)
        .into_iter()
        .filter(|op| functor.interprets(op))
        .collect()
}

/// An atom satisfied by exactly one of `t1`, `t2`, searching operators
/// within `caps` and all argument tuples.
pub fn check_separation(functor: &FunctorKind, n: usize, t1: &TValue, t2: &TValue, caps: &Caps) -> Result<Option<OneStepAtom>> {
    if t1.same_as(t2, n)? {
        return Err(Error::Precondition("the values are equal".into()));
    }
    for op in operators_within(functor, caps) {
        for args in argument_tuples(n, op.arity()) {
            let a = functor.lifting_contains(&op, &args, t1)?;
            let b = functor.lifting_contains(&op, &args, t2)?;
            if a != b {
                return Ok(Some(OneStepAtom::new(op, args, n)?));
            }
        }
    }
    Ok(None)
}

/// Parameter universe covering every operator within `caps`.
pub fn universe_within(functor: &FunctorKind, caps: &Caps) -> ParamUniverse {
    let ops = operators_within(functor, caps);
    ParamUniverse::for_query(functor, &ops)
}

/// Axiom instances over `X` that fail at some enumerated value.
pub fn check_one_step_soundness(logic: &Logic, n: usize, caps: &Caps) -> Result<Vec<(OneStepFormula, TValue)>> {
    let universe = universe_within(&logic.functor, caps);
    let mut instances = Vec::new();
    for s in logic.axioms_for(&universe) {
        instances.extend(scheme_instances(&s, n, &InstanceBudget::default())?);
    }
    instances.sort();
    instances.dedup();
    let mut out = Vec::new();
    let values: Vec<TValue> = enumerate_tvalues(&logic.functor, n, caps)?.collect();
    for inst in instances {
        for t in &values {
            if !one_step_eval(&logic.functor, &inst, t)? {
                out.push((inst.clone(), t.clone()));
                break;
            }
        }
    }
    Ok(out)
}

/// `t ∈ T_B(X)`: every instance of every scheme holds at `t`, with
/// conditionals read in the full selection functor.
pub fn subfunctor_member(axioms: &[AxiomScheme], t: &TValue, n: usize) -> Result<bool> {
    satisfies_all(&FunctorKind::Selection, &subfunctor_instances(axioms, n)?, t)
}

/// The instances over `n` states that [`subfunctor_member`] checks, for
/// reuse across many values.
pub fn subfunctor_instances(axioms: &[AxiomScheme], n: usize) -> Result<Vec<OneStepFormula>> {
    let functor = FunctorKind::Selection;
    let mut out = Vec::new();
    for s in axioms {
        if s.formula().operators().iter().any(|o| o.family() != Family::Cond) {
            return Err(Error::FunctorMismatch { op: s.to_string(), functor: functor.to_string() });
        }
        out.extend(scheme_instances(s, n, &InstanceBudget { max_carrier: n.max(4), max_instances: u64::MAX >> 1 })?);
    }
    Ok(out)
}

/// Atom–polarity pairs of the literals among `fs`.
pub(crate) fn literal_of(f: &OneStepFormula) -> Option<(&OneStepAtom, bool)> {
    match f {
        Prop::Atom(a) => Some((a, true)),
        Prop::Not(inner) => match &**inner {
            Prop::Atom(a) => Some((a, false)),
            _ => None,
        },
        _ => None,
    }
}
