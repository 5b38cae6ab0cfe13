//! Logics `(Λ, A, Θ)`, the registry of built-in logics and one-step
//! derivability over finite carriers.

mod atoms;
mod derive;
mod params;
mod registry;

pub use atoms::{parse_one_step, render_one_step, OneStepAtom, OneStepFormula};
pub use derive::{
    instantiate, instantiate_axioms, instantiate_axioms_with, one_step_consistent, one_step_derivable, scheme_instances,
    InstanceBudget, OneStepProver,
};
pub use params::ParamUniverse;
pub use registry::{
    default_signature, get_logic, load_logic, logic_names, AxiomScheme, FrameScheme, Logic, SchemeFamily,
    DEFAULT_FRAME_GRADE,
};
