//! Sequential pair-selection policies.
//!
//! Every policy is an incremental stepper: `next_pair` emits exactly one
//! pair per call and the caller records the duel outcome into the shared
//! [`DuelStats`] before the next call. Round indices `t` start at 1 and the
//! caller must call with `t` equal to the number of rounds already played
//! plus one.

mod rmed;
mod rucb;

pub use rmed::{estimate_best_opponent, rmed1_target, rmed2_target, RmedStepper};
pub use rucb::Rucb;

use crate::duel_stats::DuelStats;
use crate::rng::Xoshiro256StarStar;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolicyError {
    #[error("alpha must be positive, got {0}")]
    NonPositiveAlpha(f64),
    #[error("c must be nonnegative and finite, got {0}")]
    InvalidC(f64),
    #[error("eps must be nonnegative and finite, got {0}")]
    InvalidEps(f64),
    #[error("{0} requires alpha")]
    AlphaRequired(&'static str),
    #[error("alpha is only meaningful for RMED2 and RMED2FH")]
    AlphaNotApplicable,
    #[error("RMED2FH requires the horizon up front")]
    HorizonRequired,
    #[error("horizon is only meaningful for RMED2FH")]
    HorizonNotApplicable,
    #[error("internal policy state corrupted: {0}")]
    CorruptState(&'static str),
}

/// A pair-selection policy driven one round at a time.
pub trait Policy {
    /// Select the pair to duel at round `t` given the statistics of all
    /// previous rounds. RMED ignores `rng`; RUCB draws from it.
    fn next_pair(
        &mut self,
        stats: &DuelStats,
        t: u64,
        rng: &mut Xoshiro256StarStar,
    ) -> Result<(usize, usize), PolicyError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RmedVariant {
    Rmed1,
    Rmed2,
    Rmed2Fh,
}

impl RmedVariant {
    pub fn name(self) -> &'static str {
        match self {
            RmedVariant::Rmed1 => "rmed1",
            RmedVariant::Rmed2 => "rmed2",
            RmedVariant::Rmed2Fh => "rmed2fh",
        }
    }
}

/// Configuration of an RMED-family policy.
///
/// `c` and `eps` define the exploration allowance `f(K) = c * K^(1 + eps)`.
/// `alpha` drives the forced-exploration schedule and is required exactly
/// for RMED2 and RMED2FH; `horizon` is required exactly for RMED2FH.
///
/// `flip_gap_sign` switches the gap estimate used in the best-opponent
/// estimator from `max(mean(i*, j) - 1/2, 0)` to the literal `1/2 -
/// mean(i*, j)`; it exists for sensitivity checks only.
#[derive(Debug, Clone, PartialEq)]
pub struct RmedConfig {
    pub variant: RmedVariant,
    pub c: f64,
    pub eps: f64,
    pub alpha: Option<f64>,
    pub horizon: Option<u64>,
    pub flip_gap_sign: bool,
}

impl RmedConfig {
    pub fn rmed1(c: f64, eps: f64) -> Self {
        Self {
            variant: RmedVariant::Rmed1,
            c,
            eps,
            alpha: None,
            horizon: None,
            flip_gap_sign: false,
        }
    }

    pub fn rmed2(c: f64, eps: f64, alpha: f64) -> Self {
        Self {
            variant: RmedVariant::Rmed2,
            c,
            eps,
            alpha: Some(alpha),
            horizon: None,
            flip_gap_sign: false,
        }
    }

    pub fn rmed2fh(c: f64, eps: f64, alpha: f64, horizon: u64) -> Self {
        Self {
            variant: RmedVariant::Rmed2Fh,
            c,
            eps,
            alpha: Some(alpha),
            horizon: Some(horizon),
            flip_gap_sign: false,
        }
    }

    pub fn validate(&self) -> Result<(), PolicyError> {
        if !self.c.is_finite() || self.c < 0.0 {
            return Err(PolicyError::InvalidC(self.c));
        }
        if !self.eps.is_finite() || self.eps < 0.0 {
            return Err(PolicyError::InvalidEps(self.eps));
        }
        match self.variant {
            RmedVariant::Rmed1 => {
                if self.alpha.is_some() {
                    return Err(PolicyError::AlphaNotApplicable);
                }
                if self.horizon.is_some() {
                    return Err(PolicyError::HorizonNotApplicable);
                }
            }
            RmedVariant::Rmed2 => {
                let alpha = self.alpha.ok_or(PolicyError::AlphaRequired("RMED2"))?;
                if alpha <= 0.0 || !alpha.is_finite() {
                    return Err(PolicyError::NonPositiveAlpha(alpha));
                }
                if self.horizon.is_some() {
                    return Err(PolicyError::HorizonNotApplicable);
                }
            }
            RmedVariant::Rmed2Fh => {
                let alpha = self.alpha.ok_or(PolicyError::AlphaRequired("RMED2FH"))?;
                if alpha <= 0.0 || !alpha.is_finite() {
                    return Err(PolicyError::NonPositiveAlpha(alpha));
                }
                if self.horizon.is_none() {
                    return Err(PolicyError::HorizonRequired);
                }
            }
        }
        Ok(())
    }

    /// Exploration allowance `f(K) = c * K^(1 + eps)`.
    pub fn f_k(&self, k: usize) -> f64 {
        self.c * (k as f64).powf(1.0 + self.eps)
    }

    /// Initial-phase repetitions per pair: 1 for RMED1/RMED2,
    /// `ceil(alpha * loglog(horizon))`, at least 1, for RMED2FH.
    pub fn initial_reps(&self) -> u64 {
        match self.variant {
            RmedVariant::Rmed1 | RmedVariant::Rmed2 => 1,
            RmedVariant::Rmed2Fh => {
                let alpha = self.alpha.expect("validated");
                let horizon = self.horizon.expect("validated");
                (alpha * loglog(horizon as f64)).ceil().max(1.0) as u64
            }
        }
    }
}

/// RUCB baseline configuration; the usual exploration parameter is 0.51.
#[derive(Debug, Clone, PartialEq)]
pub struct RucbConfig {
    pub alpha: f64,
}

impl Default for RucbConfig {
    fn default() -> Self {
        Self { alpha: 0.51 }
    }
}

impl RucbConfig {
    pub fn validate(&self) -> Result<(), PolicyError> {
        if self.alpha <= 0.0 || !self.alpha.is_finite() {
            return Err(PolicyError::NonPositiveAlpha(self.alpha));
        }
        Ok(())
    }
}

/// Any supported policy, ready to be instantiated per run.
#[derive(Debug, Clone, PartialEq)]
pub enum PolicyConfig {
    Rmed(RmedConfig),
    Rucb(RucbConfig),
}

impl PolicyConfig {
    pub fn validate(&self) -> Result<(), PolicyError> {
        match self {
            PolicyConfig::Rmed(c) => c.validate(),
            PolicyConfig::Rucb(c) => c.validate(),
        }
    }

    /// Rounds consumed by the policy's initial phase for `k` arms; a run's
    /// horizon must cover them.
    pub fn initial_rounds(&self, k: usize) -> u64 {
        match self {
            PolicyConfig::Rmed(c) => c.initial_reps() * (k * (k - 1) / 2) as u64,
            PolicyConfig::Rucb(_) => 0,
        }
    }

    pub fn build(&self, k: usize) -> Result<Box<dyn Policy>, PolicyError> {
        self.validate()?;
        Ok(match self {
            PolicyConfig::Rmed(c) => Box::new(RmedStepper::new(c.clone(), k)),
            PolicyConfig::Rucb(c) => Box::new(Rucb::new(c.clone(), k)),
        })
    }
}

/// `ln(ln(max(x, e^e)))`, clamped so the result is always >= 1. The raw
/// double log is undefined or misbehaves below e^e and the selection rules
/// divide by it.
pub fn loglog(x: f64) -> f64 {
    let e_to_e = std::f64::consts::E.exp();
    x.max(e_to_e).ln().ln()
}
