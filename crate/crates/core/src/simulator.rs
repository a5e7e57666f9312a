//! Executes seeded runs: samples duel outcomes, feeds the policy stepper,
//! accumulates regret, and records log-spaced checkpoints. Runs are
//! embarrassingly parallel; aggregation is a single-threaded reduce in run
//! order, so results never depend on thread scheduling.

use crate::duel_stats::{DuelStats, StatsError};
use crate::policy::{PolicyConfig, PolicyError, RmedVariant};
use crate::preference::PreferenceMatrix;
use crate::rng::Xoshiro256StarStar;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("regret is undefined without a Condorcet winner")]
    NoCondorcetWinner,
    #[error("horizon {horizon} is shorter than the policy's initial phase ({required} rounds)")]
    HorizonTooShort { horizon: u64, required: u64 },
    #[error("policy horizon {policy} does not match the run horizon {run}")]
    HorizonMismatch { policy: u64, run: u64 },
    #[error("policy selected arm {arm} but the matrix has {k} arms")]
    PairOutOfRange { arm: usize, k: usize },
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("traces disagree on checkpoint rounds")]
    MismatchedCheckpoints,
    #[error("nothing to aggregate")]
    NoTraces,
}

/// One (matrix, policy, horizon, seed) run to execute.
#[derive(Debug, Clone)]
pub struct RunSpec<'a> {
    pub matrix: &'a PreferenceMatrix,
    pub policy: &'a PolicyConfig,
    pub horizon: u64,
    pub seed: u64,
    /// Strictly increasing rounds at which cumulative regret is recorded.
    pub checkpoints: &'a [u64],
}

/// Cumulative regret of one run sampled at checkpoint rounds, plus the
/// final comparison counts and diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretTrace {
    pub k: usize,
    /// (round, cumulative regret), ascending rounds
    pub checkpoints: Vec<(u64, f64)>,
    /// rounds at which the true winner did not yet beat every arm empirically
    pub winner_miss_rounds: u64,
    /// final per-pair comparison counts, triangular order
    pub pair_counts: Vec<u64>,
    /// self-duels per arm
    pub self_counts: Vec<u64>,
}

impl RegretTrace {
    pub fn final_regret(&self) -> f64 {
        self.checkpoints.last().map(|&(_, r)| r).unwrap_or(0.0)
    }

    /// Total duels including self-duels; equals the horizon for a full run.
    pub fn total_duels(&self) -> u64 {
        self.pair_counts.iter().sum::<u64>() + self.self_counts.iter().sum::<u64>()
    }

    /// Recompute the final regret from the comparison counts alone. Must
    /// agree with the incrementally accumulated value.
    pub fn recomputed_regret(&self, matrix: &PreferenceMatrix) -> Result<f64, SimError> {
        let mut total = 0.0;
        let mut idx = 0;
        for i in 0..self.k {
            for j in (i + 1)..self.k {
                total += self.pair_counts[idx] as f64 * regret_increment(matrix, i, j)?;
                idx += 1;
            }
        }
        for (i, &n) in self.self_counts.iter().enumerate() {
            total += n as f64 * regret_increment(matrix, i, i)?;
        }
        Ok(total)
    }
}

/// Sample a duel outcome: returns `i` with probability `mu[i][j]`, else `j`.
/// A self-pair consumes one draw (discarded) and returns `i`; it updates no
/// statistic and, when `i` is the winner, no regret either.
pub fn duel(matrix: &PreferenceMatrix, i: usize, j: usize, rng: &mut Xoshiro256StarStar) -> usize {
    let x = rng.next_f64();
    if i == j || x < matrix.mu(i, j) {
        i
    } else {
        j
    }
}

/// Regret of comparing `(i, j)`: `(gap(w, i) + gap(w, j)) / 2` where `w` is
/// the Condorcet winner. Zero iff `i == j == w`.
pub fn regret_increment(matrix: &PreferenceMatrix, i: usize, j: usize) -> Result<f64, SimError> {
    let w = matrix
        .condorcet_winner()
        .ok_or(SimError::NoCondorcetWinner)?;
    Ok((matrix.gap(w, i) + matrix.gap(w, j)) * 0.5)
}

/// Compensated accumulator; keeps the incremental regret sum close enough
/// to the count-based recomputation over millions of rounds.
#[derive(Debug, Default, Clone)]
struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    #[inline]
    fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Log-spaced checkpoint rounds: the distinct values of `floor(10^(k/20))`
/// for k = 0, 1, ... up to the horizon, always including the horizon.
pub fn checkpoint_grid(horizon: u64) -> Vec<u64> {
    let mut grid = Vec::new();
    let mut k = 0u32;
    loop {
        let value = if k % 20 == 0 {
            10u64.pow(k / 20)
        } else {
            10f64.powf(k as f64 / 20.0).floor() as u64
        };
        if value > horizon {
            break;
        }
        if grid.last() != Some(&value) {
            grid.push(value);
        }
        k += 1;
    }
    if grid.last() != Some(&horizon) {
        grid.push(horizon);
    }
    grid
}

/// Execute one run. The same spec (including seed) always yields a
/// bit-identical trace.
pub fn run(spec: &RunSpec) -> Result<RegretTrace, SimError> {
    let matrix = spec.matrix;
    let k = matrix.k();
    let w = matrix
        .condorcet_winner()
        .ok_or(SimError::NoCondorcetWinner)?;
    let required = spec.policy.initial_rounds(k);
    if spec.horizon < required {
        return Err(SimError::HorizonTooShort {
            horizon: spec.horizon,
            required,
        });
    }
    if let PolicyConfig::Rmed(cfg) = spec.policy {
        if cfg.variant == RmedVariant::Rmed2Fh {
            let policy_horizon = cfg.horizon.unwrap_or(0);
            if policy_horizon != spec.horizon {
                return Err(SimError::HorizonMismatch {
                    policy: policy_horizon,
                    run: spec.horizon,
                });
            }
        }
    }

    let mut policy = spec.policy.build(k)?;
    let mut rng = Xoshiro256StarStar::from_seed(spec.seed);
    let mut stats = DuelStats::new(k);
    let mut self_counts = vec![0u64; k];
    let mut regret = KahanSum::default();
    let mut winner_miss_rounds = 0u64;
    let mut checkpoints = Vec::with_capacity(spec.checkpoints.len());
    let mut next_cp = 0usize;

    for t in 1..=spec.horizon {
        if !stats.beats_all(w) {
            winner_miss_rounds += 1;
        }
        let (l, m) = policy.next_pair(&stats, t, &mut rng)?;
        if l >= k {
            return Err(SimError::PairOutOfRange { arm: l, k });
        }
        if m >= k {
            return Err(SimError::PairOutOfRange { arm: m, k });
        }
        let winner = duel(matrix, l, m, &mut rng);
        if l == m {
            self_counts[l] += 1;
        } else {
            stats.record(l, m, winner)?;
        }
        regret.add((matrix.gap(w, l) + matrix.gap(w, m)) * 0.5);
        while next_cp < spec.checkpoints.len() && spec.checkpoints[next_cp] == t {
            checkpoints.push((t, regret.sum));
            next_cp += 1;
        }
    }

    Ok(RegretTrace {
        k,
        checkpoints,
        winner_miss_rounds,
        pair_counts: stats.pair_counts().to_vec(),
        self_counts,
    })
}

/// Per-run seeds derived from a base seed: `base + run_index` (wrapping),
/// expanded through splitmix64 when the generator is built.
pub fn run_seed(base_seed: u64, run_index: u64) -> u64 {
    base_seed.wrapping_add(run_index)
}

/// Execute `runs` independent runs in parallel; traces come back in run
/// order regardless of scheduling.
pub fn run_many(
    matrix: &PreferenceMatrix,
    policy: &PolicyConfig,
    horizon: u64,
    runs: u64,
    base_seed: u64,
    checkpoints: &[u64],
) -> Result<Vec<RegretTrace>, SimError> {
    (0..runs)
        .into_par_iter()
        .map(|r| {
            run(&RunSpec {
                matrix,
                policy,
                horizon,
                seed: run_seed(base_seed, r),
                checkpoints,
            })
        })
        .collect()
}

/// Per-checkpoint mean and unbiased standard deviation across runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub rounds: Vec<u64>,
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
    pub runs: usize,
}

pub fn aggregate(traces: &[RegretTrace]) -> Result<Aggregate, SimError> {
    let first = traces.first().ok_or(SimError::NoTraces)?;
    let rounds: Vec<u64> = first.checkpoints.iter().map(|&(t, _)| t).collect();
    for trace in traces {
        let same = trace.checkpoints.len() == rounds.len()
            && trace
                .checkpoints
                .iter()
                .zip(&rounds)
                .all(|(&(t, _), &r)| t == r);
        if !same {
            return Err(SimError::MismatchedCheckpoints);
        }
    }
    let n = traces.len();
    let mut mean = vec![0.0; rounds.len()];
    let mut sd = vec![0.0; rounds.len()];
    for (c, m) in mean.iter_mut().enumerate() {
        *m = traces.iter().map(|t| t.checkpoints[c].1).sum::<f64>() / n as f64;
    }
    if n > 1 {
        for (c, s) in sd.iter_mut().enumerate() {
            let var = traces
                .iter()
                .map(|t| {
                    let d = t.checkpoints[c].1 - mean[c];
                    d * d
                })
                .sum::<f64>()
                / (n - 1) as f64;
            *s = var.sqrt();
        }
    }
    Ok(Aggregate {
        rounds,
        mean,
        sd,
        runs: n,
    })
}
