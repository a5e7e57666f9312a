//! Ground-truth preference matrices: construction, validation, dataset
//! builders, and the asymptotic bound constants they induce.
//!
//! A preference matrix holds `mu[i][j]`, the probability that arm `i` wins a
//! duel against arm `j`. Valid matrices satisfy `mu[i][j] + mu[j][i] = 1`
//! (tolerance 1e-12) and `mu[i][i] = 1/2` exactly. Arm indices are 0-based in
//! code; every rendered message uses 1-based indices.

use crate::divergence::bernoulli_kl;
use thiserror::Error;

/// Tolerance on the `mu[i][j] + mu[j][i] = 1` identity.
pub const ROW_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("mu[{a}][{b}] + mu[{b}][{a}] = {sum} (must equal 1)", a = .i + 1, b = .j + 1)]
    RowSum { i: usize, j: usize, sum: f64 },
    #[error("mu[{a}][{a}] = {value} (diagonal must be exactly 0.5)", a = .i + 1)]
    Diagonal { i: usize, value: f64 },
    #[error("mu[{a}][{b}] = {value} (entries must lie in [0, 1])", a = .i + 1, b = .j + 1)]
    Range { i: usize, j: usize, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("a preference matrix needs at least 2 arms, got {0}")]
    TooFewArms(usize),
    #[error("row {row} has {got} entries, expected {expected}", row = .row + 1)]
    NotSquare {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("invalid preference matrix: {}", format_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("example1 requires q strictly inside (0, 1), got {0}")]
    InvalidQ(f64),
    #[error("arithmetic supports 2..=11 arms (entries must stay in [0, 1]), got {0}")]
    InvalidArmCount(usize),
}

fn format_violations(vs: &[Violation]) -> String {
    vs.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CsvError {
    #[error("empty input")]
    Empty,
    #[error("line {line}: field {field}: cannot parse '{token}' as a number")]
    Parse {
        line: usize,
        field: usize,
        token: String,
    },
    #[error("line {line}: {got} fields, expected {expected}")]
    Ragged {
        line: usize,
        expected: usize,
        got: usize,
    },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("matrix has no Condorcet winner")]
    NoCondorcetWinner,
    #[error("arm {a} is the Condorcet winner and has no superiors", a = .0 + 1)]
    ArmIsWinner(usize),
}

/// K x K matrix of pairwise win probabilities; immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceMatrix {
    k: usize,
    mu: Vec<f64>,
    winner: Option<usize>,
}

impl PreferenceMatrix {
    /// Validate and build a matrix from rows. Returns every violation found,
    /// not just the first.
    pub fn try_new(rows: Vec<Vec<f64>>) -> Result<Self, MatrixError> {
        let k = rows.len();
        if k < 2 {
            return Err(MatrixError::TooFewArms(k));
        }
        for (row, r) in rows.iter().enumerate() {
            if r.len() != k {
                return Err(MatrixError::NotSquare {
                    row,
                    expected: k,
                    got: r.len(),
                });
            }
        }
        let mut violations = Vec::new();
        for i in 0..k {
            if rows[i][i] != 0.5 {
                violations.push(Violation::Diagonal {
                    i,
                    value: rows[i][i],
                });
            }
            for j in 0..k {
                let v = rows[i][j];
                if !(0.0..=1.0).contains(&v) || v.is_nan() {
                    violations.push(Violation::Range { i, j, value: v });
                }
            }
            for j in (i + 1)..k {
                let sum = rows[i][j] + rows[j][i];
                if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                    violations.push(Violation::RowSum { i, j, sum });
                }
            }
        }
        if !violations.is_empty() {
            return Err(MatrixError::Invalid(violations));
        }
        let mu: Vec<f64> = rows.into_iter().flatten().collect();
        let winner = find_condorcet_winner(k, &mu);
        Ok(Self { k, mu, winner })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Win probability of `i` over `j`.
    #[inline]
    pub fn mu(&self, i: usize, j: usize) -> f64 {
        self.mu[i * self.k + j]
    }

    /// Gap of `i` over `j`: `mu[i][j] - 1/2`.
    #[inline]
    pub fn gap(&self, i: usize, j: usize) -> f64 {
        self.mu(i, j) - 0.5
    }

    /// The unique arm that beats every other arm with probability > 1/2,
    /// if one exists. Cached at construction.
    pub fn condorcet_winner(&self) -> Option<usize> {
        self.winner
    }

    /// Arms that beat arm `i` in the true matrix (strict `mu[i][j] < 1/2`),
    /// ascending.
    pub fn superiors(&self, i: usize) -> Vec<usize> {
        (0..self.k)
            .filter(|&j| j != i && self.mu(i, j) < 0.5)
            .collect()
    }

    /// The cheapest opponent for eliminating arm `i`: the superior `j`
    /// minimizing `(gap(w, i) + gap(w, j)) / d(mu[i][j], 1/2)`, ties broken
    /// by lowest index.
    pub fn best_opponent(&self, i: usize) -> Result<usize, BoundError> {
        let w = self.winner.ok_or(BoundError::NoCondorcetWinner)?;
        if i == w {
            return Err(BoundError::ArmIsWinner(i));
        }
        let mut best: Option<(usize, f64)> = None;
        for j in self.superiors(i) {
            let ratio = (self.gap(w, i) + self.gap(w, j)) / bernoulli_kl(self.mu(i, j), 0.5);
            match best {
                Some((_, r)) if ratio >= r => {}
                _ => best = Some((j, ratio)),
            }
        }
        // the winner is always a superior of any other arm, so this is Some
        Ok(best.expect("superiors of a non-winner arm are nonempty").0)
    }

    /// Per-arm minimizers and both asymptotic coefficients (see
    /// [`BoundReport`]). Errors when no Condorcet winner exists.
    pub fn bound_report(&self) -> Result<BoundReport, BoundError> {
        let w = self.winner.ok_or(BoundError::NoCondorcetWinner)?;
        let mut arms = Vec::with_capacity(self.k - 1);
        let mut true_lb = 0.0;
        let mut lb1 = 0.0;
        for i in 0..self.k {
            if i == w {
                continue;
            }
            let b = self.best_opponent(i)?;
            let true_term =
                (self.gap(w, i) + self.gap(w, b)) / (2.0 * bernoulli_kl(self.mu(i, b), 0.5));
            let lb1_term = self.gap(w, i) / (2.0 * bernoulli_kl(self.mu(i, w), 0.5));
            true_lb += true_term;
            lb1 += lb1_term;
            arms.push(ArmBound {
                arm: i,
                best_opponent: b,
                true_lb_term: true_term,
                lb1_term,
            });
        }
        Ok(BoundReport {
            winner: w,
            arms,
            true_lb,
            lb1,
        })
    }

    /// Total asymptotic coefficient of the information-theoretic regret
    /// lower bound (log-round units).
    pub fn true_lb_coefficient(&self) -> Result<f64, BoundError> {
        Ok(self.bound_report()?.true_lb)
    }

    /// Leading constant of RMED1's regret upper bound:
    /// `sum_i gap(w, i) / (2 d(mu[i][w], 1/2))`.
    pub fn rmed1_lb_coefficient(&self) -> Result<f64, BoundError> {
        Ok(self.bound_report()?.lb1)
    }

    /// Serialize as CSV: K lines of K '.'-decimal fields, no header.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.k {
            for j in 0..self.k {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(&format!("{}", self.mu(i, j)));
            }
            out.push('\n');
        }
        out
    }
}

fn find_condorcet_winner(k: usize, mu: &[f64]) -> Option<usize> {
    (0..k).find(|&i| (0..k).all(|j| j == i || mu[i * k + j] > 0.5))
}

/// Asymptotic bound constants of a matrix with a Condorcet winner.
///
/// `true_lb` is the coefficient of `ln T` in the regret lower bound; `lb1`
/// is the corresponding coefficient in RMED1's upper bound. Both totals are
/// the sums of their per-arm terms, and `true_lb <= lb1` always.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub winner: usize,
    pub arms: Vec<ArmBound>,
    pub true_lb: f64,
    pub lb1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArmBound {
    pub arm: usize,
    pub best_opponent: usize,
    pub true_lb_term: f64,
    pub lb1_term: f64,
}

/// Three-arm family: arm 1 beats both others with probability 0.7 while
/// arms 2 and 3 compare as `q` / `1 - q`.
pub fn example1(q: f64) -> Result<PreferenceMatrix, MatrixError> {
    if !(q > 0.0 && q < 1.0) {
        return Err(MatrixError::InvalidQ(q));
    }
    PreferenceMatrix::try_new(vec![
        vec![0.5, 0.7, 0.7],
        vec![0.3, 0.5, q],
        vec![0.3, 1.0 - q, 0.5],
    ])
}

/// Six-ranker evaluation matrix from a full-text search engine study.
pub fn six_rankers() -> PreferenceMatrix {
    PreferenceMatrix::try_new(vec![
        vec![0.50, 0.55, 0.55, 0.54, 0.61, 0.61],
        vec![0.45, 0.50, 0.55, 0.55, 0.58, 0.60],
        vec![0.45, 0.45, 0.50, 0.54, 0.51, 0.56],
        vec![0.46, 0.45, 0.46, 0.50, 0.54, 0.50],
        vec![0.39, 0.42, 0.49, 0.46, 0.50, 0.51],
        vec![0.39, 0.40, 0.44, 0.50, 0.49, 0.50],
    ])
    .expect("six_rankers table is valid")
}

/// Four-arm matrix where the losers beat each other in a cycle, so the
/// cheapest eliminator of each loser is another loser rather than arm 1.
pub fn cyclic() -> PreferenceMatrix {
    PreferenceMatrix::try_new(vec![
        vec![0.5, 0.6, 0.6, 0.6],
        vec![0.4, 0.5, 0.9, 0.1],
        vec![0.4, 0.1, 0.5, 0.9],
        vec![0.4, 0.9, 0.1, 0.5],
    ])
    .expect("cyclic table is valid")
}

/// Totally ordered family: `mu[i][j] = 0.5 + 0.05 (j - i)` with 1-based
/// indices, so arm 1 beats everything. Entries leave [0, 1] past k = 11.
pub fn arithmetic(k: usize) -> Result<PreferenceMatrix, MatrixError> {
    if !(2..=11).contains(&k) {
        return Err(MatrixError::InvalidArmCount(k));
    }
    let mut rows = vec![vec![0.5; k]; k];
    for i in 0..k {
        for j in (i + 1)..k {
            let v = 0.5 + 0.05 * (j - i) as f64;
            rows[i][j] = v;
            rows[j][i] = 1.0 - v;
        }
    }
    PreferenceMatrix::try_new(rows)
}

/// Parse a matrix from CSV text: K lines of K comma-separated decimals,
/// '.' decimal separator, no header. Blank lines are ignored.
pub fn from_csv(text: &str) -> Result<PreferenceMatrix, CsvError> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut expected: Option<usize> = None;
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for (field, token) in line.split(',').enumerate() {
            let token = token.trim();
            let value: f64 = token.parse().map_err(|_| CsvError::Parse {
                line: lineno + 1,
                field: field + 1,
                token: token.to_string(),
            })?;
            row.push(value);
        }
        if let Some(e) = expected {
            if row.len() != e {
                return Err(CsvError::Ragged {
                    line: lineno + 1,
                    expected: e,
                    got: row.len(),
                });
            }
        } else {
            expected = Some(row.len());
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CsvError::Empty);
    }
    Ok(PreferenceMatrix::try_new(rows)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Xoshiro256StarStar;

    #[test]
    fn builders_validate_and_have_winner_one() {
        for m in [
            example1(0.7).unwrap(),
            six_rankers(),
            cyclic(),
            arithmetic(8).unwrap(),
        ] {
            assert_eq!(m.condorcet_winner(), Some(0));
        }
    }

    #[test]
    fn builder_spot_values() {
        assert_eq!(six_rankers().mu(0, 4), 0.61);
        assert_eq!(cyclic().mu(1, 2), 0.9);
        assert_eq!(example1(0.5).unwrap().mu(1, 2), 0.5);
        let a = arithmetic(8).unwrap();
        assert_eq!(a.k(), 8);
        assert!((a.mu(0, 7) - 0.85).abs() < 1e-15);
        assert!((a.mu(7, 0) - 0.15).abs() < 1e-15);
    }

    #[test]
    fn builder_parameter_errors() {
        assert!(matches!(example1(0.0), Err(MatrixError::InvalidQ(_))));
        assert!(matches!(example1(1.0), Err(MatrixError::InvalidQ(_))));
        assert!(matches!(
            arithmetic(12),
            Err(MatrixError::InvalidArmCount(12))
        ));
        assert!(matches!(
            arithmetic(1),
            Err(MatrixError::InvalidArmCount(1))
        ));
        assert!(arithmetic(11).is_ok());
    }

    #[test]
    fn validation_catches_row_sum_and_diagonal() {
        let err = PreferenceMatrix::try_new(vec![vec![0.5, 0.7], vec![0.4, 0.5]]).unwrap_err();
        match err {
            MatrixError::Invalid(vs) => {
                assert!(vs
                    .iter()
                    .any(|v| matches!(v, Violation::RowSum { i: 0, j: 1, .. })));
            }
            other => panic!("unexpected error {other:?}"),
        }
        let err = PreferenceMatrix::try_new(vec![vec![0.6, 0.7], vec![0.3, 0.5]]).unwrap_err();
        match err {
            MatrixError::Invalid(vs) => {
                assert!(vs
                    .iter()
                    .any(|v| matches!(v, Violation::Diagonal { i: 0, .. })));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn non_square_and_too_small() {
        assert!(matches!(
            PreferenceMatrix::try_new(vec![vec![0.5, 0.6], vec![0.4]]),
            Err(MatrixError::NotSquare { row: 1, .. })
        ));
        assert!(matches!(
            PreferenceMatrix::try_new(vec![vec![0.5]]),
            Err(MatrixError::TooFewArms(1))
        ));
    }

    #[test]
    fn cycle_has_no_winner() {
        let m = PreferenceMatrix::try_new(vec![
            vec![0.5, 0.6, 0.4],
            vec![0.4, 0.5, 0.6],
            vec![0.6, 0.4, 0.5],
        ])
        .unwrap();
        assert_eq!(m.condorcet_winner(), None);
    }

    #[test]
    fn superiors_sets() {
        assert_eq!(cyclic().superiors(1), vec![0, 3]);
        assert!(six_rankers().superiors(0).is_empty());
        assert_eq!(example1(0.7).unwrap().superiors(2), vec![0, 1]);
        // entries exactly 1/2 belong to neither side: arms 4 and 6 tie
        assert_eq!(six_rankers().superiors(3), vec![0, 1, 2]);
    }

    #[test]
    fn best_opponents() {
        let c = cyclic();
        assert_eq!(c.best_opponent(1).unwrap(), 3);
        assert_eq!(c.best_opponent(2).unwrap(), 1);
        assert_eq!(c.best_opponent(3).unwrap(), 2);
        assert_eq!(example1(0.7).unwrap().best_opponent(2).unwrap(), 0);
        assert_eq!(example1(0.85).unwrap().best_opponent(2).unwrap(), 1);
        assert_eq!(c.best_opponent(0), Err(BoundError::ArmIsWinner(0)));
    }

    #[test]
    fn bound_report_example1() {
        // frozen from an independent high-precision evaluation
        let r = example1(0.7).unwrap().bound_report().unwrap();
        assert!((r.true_lb - 2.4306393217359403).abs() < 1e-12);
        assert!((r.lb1 - r.true_lb).abs() < 1e-12);
        for ab in &r.arms {
            assert_eq!(ab.best_opponent, 0);
            assert!((ab.true_lb_term - 1.2153196608679702).abs() < 1e-12);
        }
    }

    #[test]
    fn bound_report_cyclic_and_six() {
        let r = cyclic().bound_report().unwrap();
        assert!((r.true_lb - 0.8150751802460983).abs() < 1e-12);
        assert!((r.lb1 - 7.449524424713181).abs() < 1e-11);
        assert!(r.true_lb < r.lb1);

        let r = six_rankers().bound_report().unwrap();
        assert!((r.true_lb - 20.73498178610397).abs() < 1e-10);
        assert_eq!(r.true_lb, r.lb1);
        assert!(r.arms.iter().all(|a| a.best_opponent == 0));
    }

    #[test]
    fn near_degenerate_gap_is_finite() {
        let m = PreferenceMatrix::try_new(vec![vec![0.5, 1.0], vec![0.0, 0.5]]).unwrap();
        let r = m.bound_report().unwrap();
        assert!(r.true_lb.is_finite());
        assert_eq!(r.true_lb, r.lb1); // K = 2: only possible opponent is the winner
    }

    #[test]
    fn no_winner_is_domain_error() {
        let m = PreferenceMatrix::try_new(vec![
            vec![0.5, 0.6, 0.4],
            vec![0.4, 0.5, 0.6],
            vec![0.6, 0.4, 0.5],
        ])
        .unwrap();
        assert_eq!(m.bound_report(), Err(BoundError::NoCondorcetWinner));
    }

    fn random_winner_matrix(rng: &mut Xoshiro256StarStar, k: usize) -> PreferenceMatrix {
        // arm 0 strictly beats everyone; the rest is arbitrary
        let mut rows = vec![vec![0.5; k]; k];
        for i in 0..k {
            for j in (i + 1)..k {
                let v = if i == 0 {
                    0.5 + 0.001 + 0.499 * rng.next_f64()
                } else {
                    0.001 + 0.998 * rng.next_f64()
                };
                rows[i][j] = v;
                rows[j][i] = 1.0 - v;
            }
        }
        PreferenceMatrix::try_new(rows).unwrap()
    }

    #[test]
    fn bound_invariants_on_random_matrices() {
        let mut rng = Xoshiro256StarStar::from_seed(77);
        for _ in 0..50 {
            let k = 2 + rng.gen_index(6);
            let m = random_winner_matrix(&mut rng, k);
            let w = m.condorcet_winner().unwrap();
            let r = m.bound_report().unwrap();
            assert!(r.true_lb <= r.lb1 + 1e-12);
            for i in 0..k {
                if i == w {
                    continue;
                }
                assert!(m.superiors(i).contains(&w));
                assert!(m.superiors(i).contains(&m.best_opponent(i).unwrap()));
            }
        }
    }

    #[test]
    fn csv_round_trip() {
        let m = six_rankers();
        let parsed = from_csv(&m.to_csv()).unwrap();
        assert_eq!(parsed, m);
    }

    #[test]
    fn csv_errors_are_distinct() {
        match from_csv("0.5,0.7\n0.4,0.5\n") {
            Err(CsvError::Matrix(MatrixError::Invalid(vs))) => {
                assert!(matches!(vs[0], Violation::RowSum { i: 0, j: 1, .. }));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            from_csv("0.5\n"),
            Err(CsvError::Matrix(MatrixError::TooFewArms(1)))
        ));
        assert!(matches!(
            from_csv("0.5,0.6\n0.4\n"),
            Err(CsvError::Ragged { line: 2, .. })
        ));
        assert!(matches!(
            from_csv("0.5,abc\n0.5,0.5\n"),
            Err(CsvError::Parse {
                line: 1,
                field: 2,
                ..
            })
        ));
        assert!(matches!(from_csv("  \n"), Err(CsvError::Empty)));
    }
}
