//! File formats, parallel drivers and the `quasiprob` command line on top
//! of [`quasiprob_core`].

pub mod cli;
pub mod formats;
pub mod parallel;

pub use quasiprob_core as core;
