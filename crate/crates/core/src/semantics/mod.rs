//! Coalgebras, their values and the evaluation of modal formulas.

mod enumerate;
mod functor;
mod io;
mod model;
mod monoid;
mod random;
mod stateset;
mod tvalue;

pub use enumerate::{common_denominator, enumerate_tvalues, Caps, Values};
pub use io::{model_to_json, read_model, write_model};
pub use crate::onestep::subfunctor_member;
pub use functor::{measure_from_sets, selection_satisfies, subfunctor_semantic_member, table_satisfies, FunctorKind, SelectionAxioms};
pub use model::{frame_check, frame_violation, model_check, Coalgebra, Evaluator, FrameViolation, Model, FRAME_CHECK_BUDGET};
pub use monoid::Monoid;
pub use random::random_tvalue;
pub use stateset::StateSet;
pub use tvalue::{Measure, Mult, Selection, TValue, MAX_TABLE_SUPPORT};
