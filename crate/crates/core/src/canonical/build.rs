use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use super::tower::Tower;
use crate::error::{Error, Result};
use crate::formula::{render, CompiledTheory, Formula, Prop};
use crate::logic::{OneStepAtom, OneStepFormula, OneStepProver};
use crate::onestep::{one_step_witness, satisfies_all, Provenance};
use crate::semantics::{enumerate_tvalues, frame_violation, Coalgebra, Evaluator, Model, StateSet, TValue, FRAME_CHECK_BUDGET};

/// Which value is taken for each state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Choice {
    /// The closed-form construction, falling back to a scan.
    #[default]
    Constructed,
    /// The first realizing value in enumeration order.
    Min,
    /// The last realizing value in enumeration order.
    Max,
}

impl std::str::FromStr for Choice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constructed" => Ok(Choice::Constructed),
            "min" => Ok(Choice::Min),
            "max" => Ok(Choice::Max),
            _ => Err(Error::Precondition(format!("unknown choice `{s}` (constructed, min, max)"))),
        }
    }
}

/// A model over the top level `S_n` of a tower.
#[derive(Clone, Debug)]
pub struct QuasiCanonical {
    pub model: Model,
    /// How each transition value was found; `None` for `Min`/`Max`.
    pub provenance: Vec<Option<Provenance>>,
}

impl QuasiCanonical {
    pub fn constructed(&self) -> usize {
        self.provenance.iter().filter(|p| **p == Some(Provenance::Constructed)).count()
    }
}

/// The one-step set of member `i` of the top level: every modal atom of
/// the level with its arguments read as definable sets of `S_n`, negated
/// where the member rejects it.
pub fn one_step_theory(tower: &Tower, i: usize) -> Result<Vec<OneStepFormula>> {
    let k = tower.depth();
    let level = tower.level(k);
    let n = level.len();
    let m = &level.states[i];
    let mut out = Vec::with_capacity(level.atoms.len());
    for (j, a) in level.atoms.iter().enumerate() {
        let args = a.args().iter().map(|s| level.preimage(s)).collect();
        let atom = OneStepAtom::new(a.op().clone(), args, n)?;
        out.push(Prop::literal(atom, m.profile.contains(j)));
    }
    Ok(out)
}

/// The model on `S_n` with the standard valuation and, for each member,
/// a value satisfying its one-step theory over the algebra of definable
/// sets.
pub fn build_quasi_canonical(tower: &Tower, choice: Choice) -> Result<QuasiCanonical> {
    let frag = &tower.fragment;
    let functor = &frag.logic.functor;
    let k = tower.depth();
    let level = tower.level(k);
    let n = level.len();
    let mut transitions = Vec::with_capacity(n);
    let mut provenance = Vec::with_capacity(n);
    if k == 0 {
        let mut values = enumerate_tvalues(functor, n, &frag.caps)?;
        let first = values.next().ok_or_else(|| Error::NoWitness(format!("{functor} has no values")))?;
        let t = if choice == Choice::Max { values.last().unwrap_or(first) } else { first };
        transitions = vec![t; n];
        provenance = vec![None; n];
    } else {
        if !tower.surjective(k) {
            return Err(Error::Precondition(format!("the projection onto level {} is not onto", k - 1)));
        }
        let blocks = level.fibers(tower.level(k - 1).len());
        let section: Vec<usize> = blocks.iter().map(|b| b.first().expect("onto")).collect();
        let by_profile: BTreeMap<&StateSet, (&TValue, &TValue)> =
            level.profiles.iter().map(|(p, lo, hi)| (p, (lo, hi))).collect();
        for i in 0..n {
            let phi = one_step_theory(tower, i)?;
            let (t, how) = match choice {
                Choice::Constructed => {
                    let caps = frag.realization_caps(blocks.len());
                    let w = one_step_witness(&frag.logic, n, &phi, Some(&blocks), &caps).map_err(|e| match e {
                        Error::NoWitness(msg) => Error::NoWitness(format!("state G{i}: {msg}")),
                        e => e,
                    })?;
                    (w.t, Some(w.provenance))
                }
                Choice::Min | Choice::Max => {
                    let (lo, hi) = by_profile[&level.states[i].profile];
                    let t = if choice == Choice::Min { lo } else { hi }.push(&section);
                    if !satisfies_all(functor, &phi, &t)? {
                        return Err(Error::NoWitness(format!("state G{i}: the realizing value does not lift")));
                    }
                    (t, None)
                }
            };
            transitions.push(t);
            provenance.push(how);
        }
    }
    let names = (0..n).map(|i| format!("G{i}")).collect();
    let coalgebra = Coalgebra::new(functor.clone(), names, transitions)?;
    let valuation = (0..frag.props)
        .map(|p| (p, (0..n).filter(|i| level.states[*i].props.contains(p as usize)).collect()))
        .collect();
    Ok(QuasiCanonical { model: Model::new(coalgebra, valuation)?, provenance })
}

/// A closure formula whose truth at a state differs from its membership.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthViolation {
    pub state: usize,
    pub formula: String,
    pub member: bool,
    pub holds: bool,
}

/// Compares truth in `model` with membership at every state of the top
/// level for every closure formula.
pub fn verify_truth_lemma(tower: &Tower, model: &Model) -> Result<Vec<TruthViolation>> {
    let k = tower.depth();
    let n = tower.level(k).len();
    if model.coalgebra.len() != n {
        return Err(Error::Precondition(format!("model has {} states, level {k} has {n}", model.coalgebra.len())));
    }
    let mut eval = Evaluator::new(model);
    let mut out = Vec::new();
    for f in tower.closure()? {
        let holds = eval.extension(&f)?;
        let member = tower.extension(k, &f)?;
        for i in 0..n {
            if holds.contains(i) != member.contains(i) {
                out.push(TruthViolation { state: i, formula: render(&f), member: member.contains(i), holds: holds.contains(i) });
            }
        }
    }
    Ok(out)
}

/// Pairs `(state, atom)` where the state's value disagrees with its
/// decision of a modal atom of the top level.
pub fn check_coherence(tower: &Tower, model: &Model) -> Result<Vec<(usize, OneStepAtom)>> {
    let functor = model.coalgebra.functor();
    let mut out = Vec::new();
    for i in 0..model.coalgebra.len() {
        for lit in one_step_theory(tower, i)? {
            let (atom, positive) = match &lit {
                Prop::Atom(a) => (a, true),
                Prop::Not(inner) => match &**inner {
                    Prop::Atom(a) => (a, false),
                    _ => unreachable!("literals only"),
                },
                _ => unreachable!("literals only"),
            };
            if functor.lifting_contains(atom.op(), atom.args(), model.coalgebra.transition(i))? != positive {
                out.push((i, atom.clone()));
            }
        }
    }
    Ok(out)
}

/// Replaces the value of a random state by that of a random state with a
/// different modal profile; `None` when all profiles agree.
pub fn mutate(tower: &Tower, model: &Model, rng: &mut impl Rng) -> Result<Option<(usize, Model)>> {
    let level = tower.level(tower.depth());
    let n = level.len();
    let candidates: Vec<usize> =
        (0..n).filter(|i| level.states.iter().any(|s| s.profile != level.states[*i].profile)).collect();
    if candidates.is_empty() {
        return Ok(None);
    }
    let i = candidates[rng.gen_range(0..candidates.len())];
    let others: Vec<usize> = (0..n).filter(|j| level.states[*j].profile != level.states[i].profile).collect();
    let j = others[rng.gen_range(0..others.len())];
    let mut m = model.clone();
    m.coalgebra.set_transition(i, model.coalgebra.transition(j).clone())?;
    Ok(Some((i, m)))
}

/// Outcome of checking one frame condition on a built model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrameStatus {
    Holds,
    /// Fails at the given state for some valuation.
    Fails(usize),
    Skipped(String),
}

/// Each of the fragment's frame conditions checked on the model's frame.
pub fn frame_report(tower: &Tower, model: &Model) -> Result<Vec<(Formula, FrameStatus)>> {
    let mut out = Vec::new();
    for theta in &tower.fragment.frame_conditions {
        let vars = theta.atoms();
        let status = match frame_violation(&model.coalgebra, std::slice::from_ref(theta), &vars, FRAME_CHECK_BUDGET) {
            Ok(None) => FrameStatus::Holds,
            Ok(Some(v)) => FrameStatus::Fails(v.state),
            Err(Error::Budget(msg)) => FrameStatus::Skipped(msg),
            Err(e) => return Err(e),
        };
        out.push((theta.clone(), status));
    }
    Ok(out)
}

/// Profiles of level 1 found by the semantic scan against the assignments
/// to the same atoms consistent with the instantiated axioms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossCheck {
    pub semantic: usize,
    pub syntactic: usize,
    pub agree: bool,
}

pub fn cross_check_depth_one(tower: &Tower) -> Result<CrossCheck> {
    if tower.depth() < 1 {
        return Err(Error::Precondition("the fragment has no modal atoms".into()));
    }
    let level = tower.level(1);
    let n = tower.level(0).len();
    let atoms: Vec<OneStepFormula> = level.atoms.iter().cloned().map(Prop::atom).collect();
    let prover = OneStepProver::for_query(&tower.fragment.logic, n, &atoms)?;
    let theory = CompiledTheory::new(&prover.instances, level.atoms.iter().cloned())?;
    let mut syntactic: BTreeSet<StateSet> = BTreeSet::new();
    for row in theory.models().rows() {
        let mut p = StateSet::new();
        for (j, a) in level.atoms.iter().enumerate() {
            if theory.atom_in_row(a, row) == Some(true) {
                p.insert(j);
            }
        }
        syntactic.insert(p);
    }
    let semantic: BTreeSet<StateSet> = level.profiles.iter().map(|(p, _, _)| p.clone()).collect();
    Ok(CrossCheck { semantic: semantic.len(), syntactic: syntactic.len(), agree: semantic == syntactic })
}
