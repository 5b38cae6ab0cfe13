//! Maximally consistent sets of bounded fragments, quasi-canonical models
//! over them, and finite cochains with their coherent families.

mod build;
mod cochain;
mod tower;

pub use build::{
    build_quasi_canonical, check_coherence, cross_check_depth_one, frame_report, mutate, one_step_theory,
    verify_truth_lemma, Choice, CrossCheck, FrameStatus, QuasiCanonical, TruthViolation,
};
pub use cochain::{
    check_coherent_family, lift_family, random_coherent_family, word_cochain, Cochain, CoherentFamily, LiftMode,
};
pub use tower::{closure, enumerate_mcs, fragment_operators, Fragment, Level, Mcs, Tower, CLOSURE_CAP, VALUE_CAP};
