//! Dueling-bandit simulation engine.
//!
//! A dueling bandit draws *pairs* of arms and observes only which arm of the
//! pair won the comparison. This crate provides:
//!
//! * [`divergence`]: Bernoulli KL-divergence primitives,
//! * [`preference`]: ground-truth preference matrices, dataset builders and
//!   the asymptotic lower-bound constants they induce,
//! * [`duel_stats`]: sufficient statistics of observed duels and the
//!   empirical divergences built from them,
//! * [`policy`]: the RMED family of pair-selection policies plus an RUCB
//!   baseline,
//! * [`simulator`]: a seeded, reproducible single-run executor and
//!   cross-run aggregation,
//! * [`rng`]: the xoshiro256** generator used for all randomness.
//!
//! Arm indices are 0-based everywhere in this crate; user-facing layers
//! render them 1-based.

pub mod divergence;
pub mod duel_stats;
pub mod policy;
pub mod preference;
pub mod rng;
pub mod simulator;

pub use duel_stats::{DivergenceSnapshot, DuelStats};
pub use policy::{Policy, PolicyConfig, RmedConfig, RmedVariant, RucbConfig};
pub use preference::{BoundReport, PreferenceMatrix};
pub use rng::Xoshiro256StarStar;
pub use simulator::{RegretTrace, RunSpec};
