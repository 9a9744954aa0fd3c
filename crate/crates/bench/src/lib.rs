//! Benchmark harness: experiment configuration, single runs with trace
//! output, and multi-method comparisons.

pub mod compare;
pub mod config;
pub mod experiment;
