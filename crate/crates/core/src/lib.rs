//! Parser, analyses and linter for ontologies of fictional, prescribed,
//! simulated and future entities.

pub mod aboutness;
pub mod cli;
pub mod grounding;
pub mod lint;
pub mod model;
pub mod parser;
pub mod span;
pub mod temporal;
