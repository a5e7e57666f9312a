//! Sufficient statistics of observed duels and the empirical quantities the
//! policies consume: win means, opponent sets, empirical divergences, and
//! the candidate predicate.
//!
//! Pairs are unordered. Each pair {i, j} with i < j stores one comparison
//! count and one tally of wins by the lower-indexed arm; the (j, i) reads are
//! derived as `1 - mean(i, j)`, which keeps the two directions exactly
//! complementary. Unseen pairs read as 1/2 (the 0/0 = 1/2 convention), and so
//! do self-pairs.
//!
//! The per-pair divergence contributions `N * d(mean, 1/2)` are cached and
//! refreshed on record; sums over them are observationally identical to
//! recomputing everything from the raw counters.

use crate::divergence::bernoulli_kl;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("self-duels carry no statistic (arm {a})", a = .0 + 1)]
    SelfDuel(usize),
    #[error("winner {w} is not in the recorded pair ({a}, {b})", w = .winner + 1, a = .i + 1, b = .j + 1)]
    WinnerNotInPair { i: usize, j: usize, winner: usize },
    #[error("arm {a} out of range for {k} arms", a = .arm + 1)]
    ArmOutOfRange { arm: usize, k: usize },
}

/// Per-arm empirical divergences at the current round, with the minimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceSnapshot {
    pub divergences: Vec<f64>,
    /// Arm with minimal divergence; ties broken by lowest index.
    pub istar: usize,
    pub istar_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DuelStats {
    k: usize,
    /// comparison count per unordered pair, triangular order
    counts: Vec<u64>,
    /// wins of the lower-indexed arm per unordered pair
    wins_low: Vec<u64>,
    /// cached `N * d(mean(i,j), 1/2) * [mean(i,j) <= 1/2]`, row-major KxK
    contrib: Vec<f64>,
}

#[inline]
fn pair_index(k: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < k);
    i * (2 * k - i - 1) / 2 + (j - i - 1)
}

pub(crate) fn argmin_lowest(xs: &[f64]) -> (usize, f64) {
    let mut best = 0;
    for i in 1..xs.len() {
        if xs[i] < xs[best] {
            best = i;
        }
    }
    (best, xs[best])
}

impl DuelStats {
    pub fn new(k: usize) -> Self {
        assert!(k >= 2, "need at least 2 arms");
        Self {
            k,
            counts: vec![0; k * (k - 1) / 2],
            wins_low: vec![0; k * (k - 1) / 2],
            contrib: vec![0.0; k * k],
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Record one duel of `i` against `j` won by `winner`. Order of (i, j)
    /// is irrelevant; self-duels are rejected.
    pub fn record(&mut self, i: usize, j: usize, winner: usize) -> Result<(), StatsError> {
        if i >= self.k {
            return Err(StatsError::ArmOutOfRange { arm: i, k: self.k });
        }
        if j >= self.k {
            return Err(StatsError::ArmOutOfRange { arm: j, k: self.k });
        }
        if i == j {
            return Err(StatsError::SelfDuel(i));
        }
        if winner != i && winner != j {
            return Err(StatsError::WinnerNotInPair { i, j, winner });
        }
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        let p = pair_index(self.k, lo, hi);
        self.counts[p] += 1;
        if winner == lo {
            self.wins_low[p] += 1;
        }
        let n = self.counts[p] as f64;
        let mean_lo = self.wins_low[p] as f64 / n;
        let mean_hi = 1.0 - mean_lo;
        self.contrib[lo * self.k + hi] = if mean_lo <= 0.5 {
            n * bernoulli_kl(mean_lo, 0.5)
        } else {
            0.0
        };
        self.contrib[hi * self.k + lo] = if mean_hi <= 0.5 {
            n * bernoulli_kl(mean_hi, 0.5)
        } else {
            0.0
        };
        Ok(())
    }

    /// Comparison count of the unordered pair {i, j}; 0 for i == j.
    #[inline]
    pub fn comparisons(&self, i: usize, j: usize) -> u64 {
        if i == j {
            return 0;
        }
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        self.counts[pair_index(self.k, lo, hi)]
    }

    /// Total duels recorded across all pairs.
    pub fn total_comparisons(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Empirical win rate of `i` over `j`; 1/2 for self-pairs and unseen
    /// pairs. The two orders of a pair sum to exactly 1.
    #[inline]
    pub fn empirical_mean(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.5;
        }
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        let p = pair_index(self.k, lo, hi);
        let n = self.counts[p];
        if n == 0 {
            return 0.5;
        }
        let mean_lo = self.wins_low[p] as f64 / n as f64;
        if i == lo {
            mean_lo
        } else {
            1.0 - mean_lo
        }
    }

    /// Arms that beat `i` empirically: `{j != i : mean(i, j) <= 1/2}`
    /// (non-strict, so fresh stats put every other arm here).
    pub fn empirical_opponents(&self, i: usize) -> Vec<usize> {
        (0..self.k)
            .filter(|&j| j != i && self.empirical_mean(i, j) <= 0.5)
            .collect()
    }

    /// Empirical divergence of arm `i`:
    /// `sum over opponents j of N(i,j) * d(mean(i,j), 1/2)`.
    #[inline]
    pub fn empirical_divergence(&self, i: usize) -> f64 {
        self.contrib[i * self.k..(i + 1) * self.k].iter().sum()
    }

    /// Fill `out` with the divergence of every arm (ascending index).
    pub fn fill_divergences(&self, out: &mut Vec<f64>) {
        out.clear();
        out.extend((0..self.k).map(|i| self.empirical_divergence(i)));
    }

    /// All divergences plus their minimizer.
    pub fn snapshot(&self) -> DivergenceSnapshot {
        let mut divergences = Vec::with_capacity(self.k);
        self.fill_divergences(&mut divergences);
        let (istar, istar_value) = argmin_lowest(&divergences);
        DivergenceSnapshot {
            divergences,
            istar,
            istar_value,
        }
    }

    /// Candidate predicate: is arm `i` still a plausible Condorcet winner at
    /// round `t`, i.e. `I_i - I* <= ln t + f_k` (non-strict)?
    pub fn is_candidate(&self, i: usize, t: u64, f_k: f64) -> bool {
        let snap = self.snapshot();
        snap.divergences[i] - snap.istar_value <= (t as f64).ln() + f_k
    }

    /// Does arm `w` empirically beat every other arm (strictly)?
    pub fn beats_all(&self, w: usize) -> bool {
        (0..self.k).all(|j| j == w || self.empirical_mean(w, j) > 0.5)
    }

    /// Final per-pair comparison counts in triangular order
    /// ((0,1), (0,2), ..., (k-2,k-1)).
    pub fn pair_counts(&self) -> &[u64] {
        &self.counts
    }
}
