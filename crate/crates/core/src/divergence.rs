//! Bernoulli information-divergence primitives.
//!
//! These are the scalar kernels every policy and bound computation is built
//! on: `d(p, q) = p ln(p/q) + (1-p) ln((1-p)/(1-q))`, natural log throughout.

/// KL divergence between Bernoulli(p) and Bernoulli(q), in nats.
///
/// `q` must lie strictly inside (0, 1); `p` may be 0 or 1, handled with the
/// `0 ln 0 = 0` convention so empirical means of all-win streaks stay finite.
/// No smoothing is applied to `p`.
pub fn bernoulli_kl(p: f64, q: f64) -> f64 {
    assert!(
        q > 0.0 && q < 1.0,
        "bernoulli_kl: q must be strictly inside (0, 1), got {q}"
    );
    debug_assert!(
        (0.0..=1.0).contains(&p),
        "bernoulli_kl: p out of [0, 1]: {p}"
    );
    let mut acc = 0.0;
    if p > 0.0 {
        acc += p * (p / q).ln();
    }
    if p < 1.0 {
        acc += (1.0 - p) * ((1.0 - p) / (1.0 - q)).ln();
    }
    // the divergence is nonnegative; clip float round-off near p == q
    acc.max(0.0)
}

/// One-sided divergence `d+(p, q)`: `d(p, q)` when `p < q`, exactly 0 otherwise.
pub fn kl_plus(p: f64, q: f64) -> f64 {
    if p < q {
        bernoulli_kl(p, q)
    } else {
        // still reject the invalid q domain on this branch
        assert!(
            q > 0.0 && q < 1.0,
            "kl_plus: q must be strictly inside (0, 1), got {q}"
        );
        0.0
    }
}
