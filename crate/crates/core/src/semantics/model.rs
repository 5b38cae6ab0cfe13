use std::collections::{BTreeMap, HashMap};

use super::functor::FunctorKind;
use super::stateset::StateSet;
use super::tvalue::TValue;
use crate::error::{Error, Result};
use crate::formula::Formula;

/// A finite coalgebra `γ: C → TC` with named states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coalgebra {
    functor: FunctorKind,
    states: Vec<String>,
    transition: Vec<TValue>,
}

impl Coalgebra {
    /// Validates every transition value over the carrier.
    pub fn new(functor: FunctorKind, states: Vec<String>, transition: Vec<TValue>) -> Result<Self> {
        if states.len() != transition.len() {
            return Err(Error::Format(format!(
                "{} states but {} transition values",
                states.len(),
                transition.len()
            )));
        }
        let mut seen = std::collections::BTreeSet::new();
        for s in &states {
            if !seen.insert(s) {
                return Err(Error::Format(format!("duplicate state `{s}`")));
            }
        }
        for (s, t) in states.iter().zip(&transition) {
            functor
                .validate(t, states.len())
                .map_err(|e| Error::InvalidValue(format!("state `{s}`: {e}")))?;
        }
        Ok(Coalgebra { functor, states, transition })
    }

    /// States named `s0, s1, …`.
    pub fn numbered(functor: FunctorKind, transition: Vec<TValue>) -> Result<Self> {
        let states = (0..transition.len()).map(|i| format!("s{i}")).collect();
        Coalgebra::new(functor, states, transition)
    }

    pub fn functor(&self) -> &FunctorKind {
        &self.functor
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn transition(&self, state: usize) -> &TValue {
        &self.transition[state]
    }

    pub fn transitions(&self) -> &[TValue] {
        &self.transition
    }

    /// Replaces one transition value after validating it.
    pub fn set_transition(&mut self, state: usize, t: TValue) -> Result<()> {
        if state >= self.len() {
            return Err(Error::UnknownState(format!("#{state}")));
        }
        self.functor.validate(&t, self.len())?;
        self.transition[state] = t;
        Ok(())
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }
}

/// A coalgebra with a valuation of finitely many propositions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    pub coalgebra: Coalgebra,
    pub valuation: BTreeMap<u32, StateSet>,
}

impl Model {
    pub fn new(coalgebra: Coalgebra, valuation: BTreeMap<u32, StateSet>) -> Result<Self> {
        let n = coalgebra.len();
        if let Some((p, _)) = valuation.iter().find(|(_, s)| s.bound() > n) {
            return Err(Error::InvalidValue(format!("valuation of p{p} mentions unknown states")));
        }
        Ok(Model { coalgebra, valuation })
    }

    /// `⟦φ⟧ ⊆ C`.
    pub fn extension(&self, f: &Formula) -> Result<StateSet> {
        Evaluator::new(self).extension(f)
    }

    /// Whether `state ⊨ φ`.
    pub fn check(&self, state: usize, f: &Formula) -> Result<bool> {
        if state >= self.coalgebra.len() {
            return Err(Error::UnknownState(format!("#{state}")));
        }
        Ok(self.extension(f)?.contains(state))
    }
}

/// `state ⊨ φ` in `m`, with the state given by name.
pub fn model_check(m: &Model, state: &str, f: &Formula) -> Result<bool> {
    let i = m.coalgebra.index_of(state)?;
    m.check(i, f)
}

/// Computes extensions, caching every subformula.
pub struct Evaluator<'a> {
    model: &'a Model,
    cache: HashMap<Formula, StateSet>,
}

impl<'a> Evaluator<'a> {
    pub fn new(model: &'a Model) -> Self {
        Evaluator { model, cache: HashMap::new() }
    }

    pub fn extension(&mut self, f: &Formula) -> Result<StateSet> {
        if let Some(s) = self.cache.get(f) {
            return Ok(s.clone());
        }
        let c = &self.model.coalgebra;
        let n = c.len();
        let s = match f {
            Formula::Atom(p) => self.model.valuation.get(p).cloned().ok_or(Error::UndefinedProp(*p))?,
            Formula::Bottom => StateSet::new(),
            Formula::Not(a) => self.extension(a)?.complement(n),
            Formula::And(a, b) => {
                let x = self.extension(a)?;
                if x.is_empty() {
                    x
                } else {
                    x.intersection(&self.extension(b)?)
                }
            }
            Formula::Modal(op, args) => {
                let sets = args.iter().map(|a| self.extension(a)).collect::<Result<Vec<_>>>()?;
                let mut out = StateSet::new();
                for (i, t) in c.transitions().iter().enumerate() {
                    if c.functor().lifting_contains(op, &sets, t)? {
                        out.insert(i);
                    }
                }
                out
            }
        };
        self.cache.insert(f.clone(), s.clone());
        Ok(s)
    }
}

/// Default bound on the number of valuations tried by [`frame_check`].
pub const FRAME_CHECK_BUDGET: u64 = 1 << 20;

/// A valuation under which a frame condition fails, with the state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameViolation {
    pub condition: usize,
    pub valuation: BTreeMap<u32, StateSet>,
    pub state: usize,
}

/// Whether every valuation of `vars` satisfies every condition everywhere.
pub fn frame_check(c: &Coalgebra, conditions: &[Formula], vars: &[u32]) -> Result<bool> {
    Ok(frame_violation(c, conditions, vars, FRAME_CHECK_BUDGET)?.is_none())
}

/// First violation in the order conditions, valuations (binary counter
/// over the variables), states.
pub fn frame_violation(c: &Coalgebra, conditions: &[Formula], vars: &[u32], budget: u64) -> Result<Option<FrameViolation>> {
    let n = c.len();
    let total_bits = n * vars.len();
    if total_bits >= 63 || 1u64 << total_bits > budget {
        return Err(Error::Budget(format!(
            "{} variables over {n} states need 2^{total_bits} valuations",
            vars.len()
        )));
    }
    for (ci, theta) in conditions.iter().enumerate() {
        let used: Vec<u32> = theta.atoms();
        if let Some(p) = used.iter().find(|p| !vars.contains(p)) {
            return Err(Error::UndefinedProp(*p));
        }
        for code in 0..1u64 << total_bits {
            let valuation: BTreeMap<u32, StateSet> = vars
                .iter()
                .enumerate()
                .map(|(k, v)| {
                    let bits = (code >> (k * n)) & ((1u64 << n) - 1);
                    (*v, StateSet::from_mask(bits))
                })
                .collect();
            let m = Model { coalgebra: c.clone(), valuation };
            let ext = m.extension(theta)?;
            if let Some(state) = ext.complement(n).first() {
                return Ok(Some(FrameViolation { condition: ci, valuation: m.valuation, state }));
            }
        }
    }
    Ok(None)
}
