use crate::error::{Error, Result};
use crate::formula::{CompiledTheory, Prop};
use crate::logic::{Logic, OneStepAtom, OneStepFormula, OneStepProver};

use super::eval::literal_of;

/// Extends a consistent `Φ` by a literal for every atom of `universe` not
/// yet decided by a literal of `Φ`, in the given order, preferring the
/// positive literal when it is consistent.
pub fn saturate(logic: &Logic, n: usize, phi: &[OneStepFormula], universe: &[OneStepAtom]) -> Result<Vec<OneStepFormula>> {
    let atoms: Vec<OneStepFormula> = universe.iter().cloned().map(Prop::atom).collect();
    let prover = OneStepProver::for_query(logic, n, phi.iter().chain(&atoms))?;
    let decided: std::collections::BTreeSet<&OneStepAtom> = phi.iter().filter_map(|f| literal_of(f).map(|(a, _)| a)).collect();
    let todo: Vec<&OneStepAtom> = universe.iter().filter(|a| !decided.contains(a)).collect();

    let mut theory = prover.instances.clone();
    theory.extend(phi.iter().cloned());
    let mut out = phi.to_vec();
    match CompiledTheory::new(&theory, universe.iter().cloned()) {
        Ok(mut compiled) => {
            if compiled.models().is_empty() {
                return Err(Error::Inconsistent("the one-step set is refutable".into()));
            }
            for a in todo {
                let pos = Prop::atom(a.clone());
                let lit = if compiled.consistent_with(std::slice::from_ref(&pos))? { pos } else { Prop::not(pos) };
                compiled.assume(&lit)?;
                out.push(lit);
            }
        }
        Err(Error::Budget(_)) => {
            if !prover.consistent(phi)? {
                return Err(Error::Inconsistent("the one-step set is refutable".into()));
            }
            let mut extra: Vec<OneStepFormula> = phi.to_vec();
            for a in todo {
                let pos = Prop::atom(a.clone());
                extra.push(pos.clone());
                if !prover.consistent(&extra)? {
                    extra.pop();
                    extra.push(Prop::not(pos));
                }
                out.push(extra.last().expect("just pushed").clone());
            }
        }
        Err(e) => return Err(e),
    }
    Ok(out)
}
