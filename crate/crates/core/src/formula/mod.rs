//! Formula syntax and the propositional engine.

mod ast;
mod lexer;
mod parse;
mod prop;
mod render;
mod sat;

pub use ast::{rat, rat_to_string, unit_grid, Family, Formula, OperatorSymbol, ParamDomain, Rational, Scalar, SimilarityType};
pub use parse::{parse, parse_with_aliases};
pub use prop::{
    prop_entails, prop_entails_with, prop_satisfiable, table_of, AtomIndex, Backend, CompiledTheory, Prop, PropAtom,
    Table, TRUTH_TABLE_LIMIT,
};
pub use render::render;

pub(crate) use lexer::{lex, Cursor, Tok};
pub(crate) use parse::{formula as parse_formula_with, parse_param, resolve_operator, unary as parse_unary_with, Leaf};

/// Modal nesting depth.
pub fn modal_depth(f: &Formula) -> usize {
    f.modal_depth()
}

/// Simultaneous substitution of atoms by formulas.
pub fn substitute(f: &Formula, sigma: &std::collections::BTreeMap<u32, Formula>) -> Formula {
    f.substitute(&|i| sigma.get(&i).cloned())
}
