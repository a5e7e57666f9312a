//! Relative upper confidence bound baseline.
//!
//! Each round, every ordered pair gets an optimistic index
//! `u[i][j] = mean(i, j) + sqrt(alpha ln t / N(i, j))`, taken as 1 when the
//! pair is unseen and capped at 1 otherwise. The candidate arms are those
//! whose indices are all at least 1/2; `l` is drawn uniformly among them
//! (among all arms when the set is empty) and `m` maximizes `u[m][l]`, ties
//! broken uniformly at random.

use super::{Policy, PolicyError, RucbConfig};
use crate::duel_stats::DuelStats;
use crate::rng::Xoshiro256StarStar;

#[derive(Debug, Clone)]
pub struct Rucb {
    alpha: f64,
    k: usize,
    u: Vec<f64>,
    candidates: Vec<usize>,
    ties: Vec<usize>,
}

impl Rucb {
    pub fn new(cfg: RucbConfig, k: usize) -> Self {
        cfg.validate().expect("invalid RUCB configuration");
        assert!(k >= 2, "need at least 2 arms");
        Self {
            alpha: cfg.alpha,
            k,
            u: vec![0.0; k * k],
            candidates: Vec::with_capacity(k),
            ties: Vec::with_capacity(k),
        }
    }
}

impl Policy for Rucb {
    fn next_pair(
        &mut self,
        stats: &DuelStats,
        t: u64,
        rng: &mut Xoshiro256StarStar,
    ) -> Result<(usize, usize), PolicyError> {
        let k = self.k;
        let ln_t = (t as f64).ln();
        for i in 0..k {
            for j in 0..k {
                if i == j {
                    continue;
                }
                let n = stats.comparisons(i, j);
                self.u[i * k + j] = if n == 0 {
                    1.0
                } else {
                    (stats.empirical_mean(i, j) + (self.alpha * ln_t / n as f64).sqrt()).min(1.0)
                };
            }
        }

        self.candidates.clear();
        for i in 0..k {
            if (0..k).all(|j| j == i || self.u[i * k + j] >= 0.5) {
                self.candidates.push(i);
            }
        }
        let l = if self.candidates.is_empty() {
            rng.gen_index(k)
        } else {
            self.candidates[rng.gen_index(self.candidates.len())]
        };

        let mut best = f64::NEG_INFINITY;
        self.ties.clear();
        for j in 0..k {
            if j == l {
                continue;
            }
            let v = self.u[j * k + l];
            if v > best {
                best = v;
                self.ties.clear();
                self.ties.push(j);
            } else if v == best {
                self.ties.push(j);
            }
        }
        let m = self.ties[rng.gen_index(self.ties.len())];
        Ok((l, m))
    }
}
