//! One-step semantics: evaluation, satisfiability by enumeration and by
//! closed-form witnesses, saturation, separation and soundness checks.

mod eval;
mod saturate;
mod witness;

pub use eval::{
    all_atoms, argument_tuples, caps_for, check_one_step_soundness, check_separation, one_step_eval,
    one_step_sat_bruteforce, operators_within, satisfies_all, subfunctor_instances, subfunctor_member, universe_within, BruteForce,
    OneStepProblem,
};
pub use saturate::saturate;
pub use witness::{decisions, one_step_witness, Provenance, Witness};
