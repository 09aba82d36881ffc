//! Weakest-precondition generation for reader/writer/state programs with
//! branching, and exhaustive checking of the generated obligations against
//! the operational semantics.

pub mod ast;
pub mod branching;
pub mod checker;
pub mod error;
pub mod fixtures;
pub mod formula;
pub mod frontend;
pub mod rws;
pub mod values;

pub use error::{Error, Result};
