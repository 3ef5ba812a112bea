//! File formats and command-line frontend for `multiree-core`.

pub mod cli;
pub mod format;

pub use multiree_core as core;
