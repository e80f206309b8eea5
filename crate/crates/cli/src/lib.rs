//! Sweep harness, random instance generation and document output for the
//! `divsmooth` command-line tool. The numeric substance lives in
//! [`divsmooth_core`]; this crate adds sampling, parallel validity sweeps,
//! achievability-gap reporting and the JSON/CSV wire formats.

pub mod cli;
pub mod doc;
pub mod rational;
pub mod sample;
pub mod sweep;
