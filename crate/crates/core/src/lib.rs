//! Decision procedures for quantified primal logic (QPL) and its propositional
//! sublogics.
//!
//! The crate decides entailment by saturating the closure of the input,
//! extracts derivations that an independent checker accepts, and builds
//! countermodels from the saturated state when entailment fails.

pub mod algebra;
pub mod calculus;
pub mod closure;
pub mod engine;
pub mod generators;
pub mod semantics;
pub mod syntax;

#[cfg(test)]
mod testgen;
