//! Ultimately periodic subsets of ℕ, one-variable Presburger formulas, and
//! window-based inference of period/offset decompositions.

pub mod cli;
pub mod error;
pub mod formula;
pub mod inference;
pub mod set;
pub mod sources;
pub mod window;

pub use error::{Error, Result};
pub use set::{BoolOp, Oracle, PrefixSet, SetHandle, UpSet};
