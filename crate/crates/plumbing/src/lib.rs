//! File formats, oracles, random generation and the command line for the
//! `plumbing-core` computations.

pub mod cli;
pub mod error;
pub mod format;
pub mod fuzz;
pub mod generate;
pub mod memo;
pub mod parallel;
pub mod report;
pub mod table;

pub use error::{Error, Result};
