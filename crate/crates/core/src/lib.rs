//! Exact evaluation of index-2 Gauss sums, with a brute-force oracle over
//! small finite fields to check every closed form.

pub mod arith;
pub mod classify;
pub mod cli;
pub mod closed;
pub mod cyclo;
pub mod evaluator;
pub mod explicit;
pub mod ffield;
mod interval;
pub mod oracle;
pub mod quad;
pub mod sweep;

pub use interval::ComplexInterval;
