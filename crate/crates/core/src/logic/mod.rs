//! The temporal-epistemic language: syntax, parser, bounded evaluation and
//! the axiom-soundness harness.

mod ast;
mod axioms;
mod eval;
mod parser;

pub use ast::Formula;
pub use axioms::{
    axiom_suite, random_formula, random_positive_formula, Axiom, AxiomOutcome, AxiomReport, Counterexample, FormulaGen,
};
pub use eval::{Evaluator, Verdict};
pub use parser::{parse, ParseError};
