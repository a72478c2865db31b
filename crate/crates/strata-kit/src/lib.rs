//! Command layer and verification suites behind the `strata-kit` binary.

pub mod commands;
pub mod suites;
