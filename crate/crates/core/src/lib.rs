//! Contextual bandits with directed graph feedback.
//!
//! The crate implements an epoch-based contextual bandit learner over a finite
//! class of reward functions. Each round the learner sees a context and a
//! feedback graph over the arms; playing an arm reveals the rewards of all of
//! its out-neighbours. Exploration is restricted to a greedy, gap-ordered
//! independence set of the plausible best arms, and the inverse-gap-weighted
//! baseline probabilities can be refined by a small linear program that
//! shares observation duty between adjacent arms.
//!
//! Everything here is `no_std` (with `alloc`): the file formats, thread pool
//! and command line live in the companion `graphband` crate.
//!
//! Modules:
//! - [`graph`]: feedback graphs, generators, connected-subgraph pools and the
//!   greedy exploration-set routine.
//! - [`funcspace`]: bilinear function class, least-squares oracle, confidence
//!   sets and candidate action sets.
//! - [`lp`]: dense two-phase simplex, the sampling LP and a vertex-enumeration
//!   oracle.
//! - [`policy`]: epoch bookkeeping and the four sampling rules.
//! - [`env`]: the stochastic environment and episode loop.
//! - [`stats`]: cross-repeat aggregation of regret curves.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod env;
mod error;
pub mod funcspace;
pub mod graph;
pub mod lp;
pub mod policy;
pub mod stats;

pub use error::{Error, Result};
