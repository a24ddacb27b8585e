//! Command-line tooling and file formats for two-mode click-counting statistics.
//!
//! The numerical work lives in [`clickstat_core`], re-exported here as
//! [`core`]. This crate adds JSON and CSV formats ([`io`]), multi-threaded
//! drivers ([`parallel`]), simulated sweeps ([`synthetic`]) and the
//! `clickstat` binary ([`cli`]).

pub use clickstat_core as core;

pub mod cli;
pub mod io;
pub mod parallel;
pub mod synthetic;
