//! The `.east` surface language: reader, parser, type inference,
//! compilation to programs, canonical printing, and the readers for
//! printed formulas and command-line literals.

mod compile;
mod literal;
mod notation;
mod parse;
mod print;
pub mod sexpr;
mod syntax;
mod typeck;

pub use compile::{compile_unit, load, spec_formula, Compiled};
pub use literal::{parse_dash_value, parse_input, parse_sexp_value, parse_table};
pub use notation::parse_formula;
pub use parse::{effective_domains, parse_unit};
pub use print::{expr_sexp, print_unit, prog_sexp, spec_sexp, value_sexp};
pub use syntax::{Prog, SourceUnit, Spec};

/// The introductory example, as shipped in `east/paper_intro.east`.
pub const PAPER_INTRO: &str = include_str!("../../east/paper_intro.east");
pub const BROKEN_GETS: &str = include_str!("../../east/fixtures/broken_gets.east");
pub const BROKEN_IF: &str = include_str!("../../east/fixtures/broken_if.east");
