//! Toxicity-steered decoding of interpretation sets.
//!
//! The crate pairs a decoding engine that calibrates per-token log-scores toward a target
//! toxicity with an evaluation harness that matches generated interpretation sets against
//! human-written ones. See the `examples/` directory for one runnable program per capability.

pub mod backend;
pub mod cli;
pub mod config;
pub mod dataset;
pub mod engine;
pub mod error;
pub mod eval;
pub mod http;
pub mod session;
pub mod synthetic;
pub mod toxicity;
pub mod vocab;

pub use error::{Error, Result};
