//! Std companion to `graphband-core`: edge-list and pool files, experiment
//! configuration, the repeat runner, CSV output and the self-test suite.

pub mod config;
mod error;
pub mod experiment;
pub mod io;
pub mod output;
pub mod selftest;

pub use error::{Error, Result};
