//! Coalgebraic modal logic workbench: formulas, one-step reasoning,
//! finite coalgebras and bounded quasi-canonical models.

pub mod canonical;
pub mod error;
pub mod formula;
pub mod logic;
pub mod onestep;
pub mod semantics;

pub use error::{Error, Result};
