//! Exact constructions that cover limit inferiors of stabilized families by
//! small objects, together with brute-force checkers for their guarantees.

pub mod error;
pub mod fatou;
pub mod generate;
pub mod kernel;
pub mod measurecover;
pub mod opencover;
pub mod randlab;
pub mod setcover;
pub mod traces;
pub mod verify;

pub use error::{Error, Result};
