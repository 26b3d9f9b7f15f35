// Errors carry the offending generator, whose rationals make them large.
#![allow(clippy::result_large_err)]

pub mod bridge;
pub mod cli;
pub mod dsl;
pub mod frame;
pub mod presentation;
pub mod quantifier;
pub mod runtime;
pub mod spaces;
pub mod syntax;
