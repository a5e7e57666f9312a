//! The RMED family: one main-routine stepper and the per-variant target
//! subroutines.
//!
//! The main routine cycles through a loop set `L_C`. Each round it plays the
//! next arm `l` of `L_C` against a target `m`, removes `l` from the
//! remaining set `L_R`, and then admits into the next loop `L_N` every arm
//! `j` outside `L_R` whose divergence gap passes the candidate predicate
//! `I_j - I* <= ln t + f(K)`. When `L_C` is exhausted it is replaced by
//! `L_N` in ascending order. The candidate scan runs after every draw, with
//! statistics that already include that draw's outcome; since outcomes reach
//! the stepper only before the *next* call, the scan for round `t` is
//! deferred to the start of call `t + 1` (same statistics, same threshold).

use super::{loglog, Policy, PolicyError, RmedConfig, RmedVariant};
use crate::divergence::kl_plus;
use crate::duel_stats::{argmin_lowest, DuelStats};
use crate::rng::Xoshiro256StarStar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    /// Emitting the initial sweep: every pair, `init_reps` times each.
    Initial,
    /// RMED2 only: topping pairs up to the `alpha * loglog t` floor before a
    /// loop starts. Holds the lexicographic pair cursor.
    Forced(usize),
    Main,
}

/// Incremental stepper for RMED1 / RMED2 / RMED2FH.
#[derive(Debug, Clone)]
pub struct RmedStepper {
    variant: RmedVariant,
    k: usize,
    f_k: f64,
    alpha: f64,
    /// loglog(T); the fixed-horizon divisor (RMED2FH only).
    fh_divisor: f64,
    flip_gap_sign: bool,
    init_reps: u64,
    init_total: u64,
    init_emitted: u64,
    phase: Phase,
    /// current loop, ascending
    lc: Vec<usize>,
    cursor: usize,
    /// membership in L_R (not yet drawn this loop)
    in_lr: Vec<bool>,
    /// membership in L_N (admitted to the next loop)
    in_ln: Vec<bool>,
    /// round whose post-draw candidate scan is still owed
    pending_round: Option<u64>,
    /// per-arm frozen targets (RMED2FH, set at the initial-phase boundary)
    frozen_bhat: Vec<usize>,
    // per-call divergence snapshot, keyed by round
    div_buf: Vec<f64>,
    cache_round: u64,
    cache_istar: usize,
    cache_istar_value: f64,
}

impl RmedStepper {
    /// Panics if `cfg` fails [`RmedConfig::validate`] or `k < 2`.
    pub fn new(cfg: RmedConfig, k: usize) -> Self {
        cfg.validate().expect("invalid RMED configuration");
        assert!(k >= 2, "need at least 2 arms");
        let init_reps = cfg.initial_reps();
        let n_pairs = (k * (k - 1) / 2) as u64;
        let fh_divisor = match cfg.variant {
            RmedVariant::Rmed2Fh => loglog(cfg.horizon.expect("validated") as f64),
            _ => f64::NAN,
        };
        Self {
            variant: cfg.variant,
            k,
            f_k: cfg.f_k(k),
            alpha: cfg.alpha.unwrap_or(0.0),
            fh_divisor,
            flip_gap_sign: cfg.flip_gap_sign,
            init_reps,
            init_total: init_reps * n_pairs,
            init_emitted: 0,
            phase: Phase::Initial,
            lc: (0..k).collect(),
            cursor: 0,
            in_lr: vec![true; k],
            in_ln: vec![false; k],
            pending_round: None,
            frozen_bhat: Vec::new(),
            div_buf: Vec::new(),
            cache_round: 0,
            cache_istar: 0,
            cache_istar_value: 0.0,
        }
    }

    fn refresh_snapshot(&mut self, stats: &DuelStats, t: u64) {
        if self.cache_round != t {
            stats.fill_divergences(&mut self.div_buf);
            let (istar, value) = argmin_lowest(&self.div_buf);
            self.cache_istar = istar;
            self.cache_istar_value = value;
            self.cache_round = t;
        }
    }
}

impl Policy for RmedStepper {
    fn next_pair(
        &mut self,
        stats: &DuelStats,
        t: u64,
        _rng: &mut Xoshiro256StarStar,
    ) -> Result<(usize, usize), PolicyError> {
        // Owed candidate scan from the previous main-loop draw. `stats` now
        // includes that draw's outcome; the threshold uses its round index.
        if let Some(tp) = self.pending_round.take() {
            self.refresh_snapshot(stats, t);
            let threshold = (tp as f64).ln() + self.f_k;
            for j in 0..self.k {
                if !self.in_lr[j] && self.div_buf[j] - self.cache_istar_value <= threshold {
                    self.in_ln[j] = true;
                }
            }
        }

        loop {
            match self.phase {
                Phase::Initial => {
                    if self.init_emitted < self.init_total {
                        let idx = (self.init_emitted / self.init_reps) as usize;
                        self.init_emitted += 1;
                        return Ok(lex_pair(self.k, idx));
                    }
                    // phase boundary: all initial outcomes are in `stats`
                    if self.variant == RmedVariant::Rmed2Fh {
                        self.refresh_snapshot(stats, t);
                        let istar = self.cache_istar;
                        self.frozen_bhat = (0..self.k)
                            .map(|i| {
                                estimate_best_opponent_with(stats, i, istar, self.flip_gap_sign)
                            })
                            .collect();
                    }
                    self.phase = match self.variant {
                        RmedVariant::Rmed2 => Phase::Forced(0),
                        _ => Phase::Main,
                    };
                }
                Phase::Forced(cursor) => {
                    let threshold = self.alpha * loglog(t as f64);
                    let n_pairs = self.k * (self.k - 1) / 2;
                    let mut cur = cursor;
                    while cur < n_pairs {
                        let (i, j) = lex_pair(self.k, cur);
                        if (stats.comparisons(i, j) as f64) < threshold {
                            self.phase = Phase::Forced(cur);
                            return Ok((i, j));
                        }
                        cur += 1;
                    }
                    self.phase = Phase::Main;
                }
                Phase::Main => {
                    if self.cursor == self.lc.len() {
                        let next: Vec<usize> = (0..self.k).filter(|&j| self.in_ln[j]).collect();
                        if next.is_empty() {
                            return Err(PolicyError::CorruptState(
                                "next loop set empty at a loop boundary",
                            ));
                        }
                        for j in 0..self.k {
                            self.in_lr[j] = self.in_ln[j];
                            self.in_ln[j] = false;
                        }
                        self.lc = next;
                        self.cursor = 0;
                        if self.variant == RmedVariant::Rmed2 {
                            self.phase = Phase::Forced(0);
                            continue;
                        }
                    }
                    let l = self.lc[self.cursor];
                    self.refresh_snapshot(stats, t);
                    let istar = self.cache_istar;
                    let m = match self.variant {
                        RmedVariant::Rmed1 => rmed1_target_with(stats, l, istar),
                        RmedVariant::Rmed2 => {
                            let bhat =
                                estimate_best_opponent_with(stats, l, istar, self.flip_gap_sign);
                            rmed2_target_with(stats, l, bhat, istar, loglog(t as f64))
                        }
                        RmedVariant::Rmed2Fh => {
                            rmed2_target_with(stats, l, self.frozen_bhat[l], istar, self.fh_divisor)
                        }
                    };
                    self.in_lr[l] = false;
                    self.pending_round = Some(t);
                    self.cursor += 1;
                    return Ok((l, m));
                }
            }
        }
    }
}

/// idx-th unordered pair in lexicographic order: (0,1), (0,2), ..., (k-2,k-1).
fn lex_pair(k: usize, mut idx: usize) -> (usize, usize) {
    for i in 0..k {
        let row = k - 1 - i;
        if idx < row {
            return (i, i + 1 + idx);
        }
        idx -= row;
    }
    unreachable!("pair index out of range");
}

fn rmed1_target_with(stats: &DuelStats, l: usize, istar: usize) -> usize {
    let k = stats.k();
    let mut any_opponent = false;
    let mut istar_is_opponent = false;
    let mut best = f64::INFINITY;
    let mut best_j = l;
    for j in 0..k {
        if j == l {
            continue;
        }
        let mean = stats.empirical_mean(l, j);
        if mean <= 0.5 {
            any_opponent = true;
            if j == istar {
                istar_is_opponent = true;
            }
        }
        if mean < best {
            best = mean;
            best_j = j;
        }
    }
    if !any_opponent || istar_is_opponent {
        istar
    } else {
        best_j
    }
}

/// Target of the RMED1 subroutine: the divergence minimizer `i*` when it
/// already opposes `l` (or nothing does), otherwise the arm that beats `l`
/// hardest. May return `l` itself, in which case the round is a self-duel.
pub fn rmed1_target(stats: &DuelStats, l: usize) -> usize {
    rmed1_target_with(stats, l, stats.snapshot().istar)
}

fn gap_hat(stats: &DuelStats, istar: usize, j: usize, flip: bool) -> f64 {
    let mean = stats.empirical_mean(istar, j);
    if flip {
        0.5 - mean
    } else {
        (mean - 0.5).max(0.0)
    }
}

fn estimate_best_opponent_with(
    stats: &DuelStats,
    i: usize,
    istar: usize,
    flip_gap_sign: bool,
) -> usize {
    let k = stats.k();
    let gap_i = gap_hat(stats, istar, i, flip_gap_sign);
    let mut best: Option<(usize, f64)> = None;
    for j in 0..k {
        if j == i {
            continue;
        }
        let numerator = gap_i + gap_hat(stats, istar, j, flip_gap_sign);
        let dplus = kl_plus(stats.empirical_mean(i, j), 0.5);
        // x / 0 = +inf convention, regardless of the numerator
        let ratio = if dplus == 0.0 {
            f64::INFINITY
        } else {
            numerator / dplus
        };
        match best {
            Some((_, r)) if ratio >= r => {}
            _ => best = Some((j, ratio)),
        }
    }
    best.expect("k >= 2").0
}

/// Plug-in estimate of the cheapest opponent of arm `i`: the `j != i`
/// minimizing `(gap(i*, i) + gap(i*, j)) / d+(mean(i, j), 1/2)` with
/// `x / 0 = +inf`. Ties (including the all-infinite case) resolve to the
/// lowest index.
pub fn estimate_best_opponent(stats: &DuelStats, i: usize, flip_gap_sign: bool) -> usize {
    estimate_best_opponent_with(stats, i, stats.snapshot().istar, flip_gap_sign)
}

fn rmed2_target_with(
    stats: &DuelStats,
    l: usize,
    bhat: usize,
    istar: usize,
    divisor: f64,
) -> usize {
    let bhat_is_opponent = bhat != l && stats.empirical_mean(l, bhat) <= 0.5;
    if bhat_is_opponent
        && (stats.comparisons(l, istar) as f64) >= (stats.comparisons(l, bhat) as f64) / divisor
    {
        bhat
    } else {
        rmed1_target_with(stats, l, istar)
    }
}

/// Target of the RMED2/RMED2FH subroutine given the current best-opponent
/// estimate `bhat` for `l` and the loglog divisor (of `t` for RMED2, of the
/// horizon for RMED2FH): plays `bhat` while it opposes `l` and `i*` has
/// been compared with `l` often enough, else falls back to the RMED1 rule.
pub fn rmed2_target(stats: &DuelStats, l: usize, bhat: usize, divisor: f64) -> usize {
    rmed2_target_with(stats, l, bhat, stats.snapshot().istar, divisor)
}
