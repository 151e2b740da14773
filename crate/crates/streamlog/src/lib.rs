//! Workbench for two stream reasoning languages built over the same stream
//! model: a Datalog dialect with streaming body literals evaluated
//! incrementally (`ldsr`), and a modal rule language with window and temporal
//! operators (`lars`). The crate parses both, classifies programs into the
//! fragments for which translations exist, runs the seven translations, and
//! evaluates or differentially compares programs under the output profiles.

pub mod atoms;
pub mod cli;
pub mod depgraph;
pub mod error;
pub mod fragments;
pub mod harness;
pub mod lars;
pub mod lex;
pub mod ldsr;
pub mod stream;
pub mod transpile;

pub use error::{Error, Result};

pub fn run() -> i32 {
    cli::main_from(std::env::args_os())
}
