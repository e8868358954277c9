//! Benford reference distributions, leading-digit histograms of summand
//! sets, and the chi-square goodness-of-fit statistic.

use serde::Serialize;

use crate::digits::fib_leading_block_fast;
use crate::error::{Error, Result};
use crate::zeckendorf::ZeckSet;

/// Chi-square critical value at 8 degrees of freedom, 95% confidence.
pub const CHI2_95_8DOF: f64 = 15.51;
/// Chi-square critical value at 8 degrees of freedom, 99% confidence.
pub const CHI2_99_8DOF: f64 = 20.09;

/// Benford probabilities `log_B(1 + 1/d)` for leading digits `d = 1..B-1`.
/// The entries telescope to `log_B B = 1`.
pub fn benford_probs(base: u32) -> Vec<f64> {
    assert!(base >= 2, "leading digits need base at least 2");
    let ln_base = (base as f64).ln();
    (1..base)
        .map(|d| ((d as f64 + 1.0) / d as f64).ln() / ln_base)
        .collect()
}

/// Counts of leading digits `1..base-1`; `counts[d-1]` belongs to digit `d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DigitHistogram {
    base: u32,
    counts: Vec<u64>,
}

impl DigitHistogram {
    pub fn new(base: u32) -> Self {
        assert!(base >= 2, "leading digits need base at least 2");
        DigitHistogram {
            base,
            counts: vec![0; base as usize - 1],
        }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    /// # Panics
    /// Panics unless `1 ≤ digit < base`.
    pub fn record(&mut self, digit: u32) {
        assert!(
            (1..self.base).contains(&digit),
            "leading digit {digit} out of range for base {}",
            self.base
        );
        self.counts[digit as usize - 1] += 1;
    }

    /// Adds `count` occurrences of `digit` at once.
    pub fn record_many(&mut self, digit: u32, count: u64) {
        assert!(
            (1..self.base).contains(&digit),
            "leading digit {digit} out of range for base {}",
            self.base
        );
        self.counts[digit as usize - 1] += count;
    }

    pub fn count(&self, digit: u32) -> u64 {
        self.counts[digit as usize - 1]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Elementwise merge; histograms are an order-independent monoid, so
    /// parallel shards can be folded in any order.
    pub fn merge(&mut self, other: &DigitHistogram) {
        assert_eq!(self.base, other.base, "histogram bases differ");
        for (mine, theirs) in self.counts.iter_mut().zip(&other.counts) {
            *mine += theirs;
        }
    }
}

/// Leading-digit histogram of the summands of `s`, via the fast Fibonacci
/// digit path.
pub fn digit_histogram(s: &ZeckSet, base: u32) -> DigitHistogram {
    let mut hist = DigitHistogram::new(base);
    for i in s {
        hist.record(fib_leading_block_fast(i, base, 1).leading_digit());
    }
    hist
}

/// Outcome of a chi-square goodness-of-fit test of observed digit counts
/// against reference probabilities.
#[derive(Clone, Debug, Serialize)]
pub struct ChiSquareReport {
    pub observed: Vec<u64>,
    pub expected: Vec<f64>,
    pub statistic: f64,
    pub dof: usize,
    pub total: u64,
}

/// `Σ_d (obs_d - k·q_d)^2 / (k·q_d)` with `k = Σ obs`; `dof` is one less
/// than the category count (8 for base 10). The raw statistic is reported
/// for every input — no minimum-expected-count filtering.
pub fn chi_square(observed: &[u64], probs: &[f64]) -> Result<ChiSquareReport> {
    if observed.len() != probs.len() {
        return Err(Error::InvalidParameter(format!(
            "{} observed categories against {} probabilities",
            observed.len(),
            probs.len()
        )));
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(Error::EmptyObservations);
    }
    if probs.iter().any(|&q| q <= 0.0) {
        return Err(Error::InvalidParameter(
            "reference probabilities must be strictly positive".into(),
        ));
    }
    let mass: f64 = probs.iter().sum();
    if (mass - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "reference probabilities sum to {mass}, expected 1"
        )));
    }
    let k = total as f64;
    let expected: Vec<f64> = probs.iter().map(|q| k * q).collect();
    let statistic = observed
        .iter()
        .zip(&expected)
        .map(|(&obs, &exp)| {
            let d = obs as f64 - exp;
            d * d / exp
        })
        .sum();
    Ok(ChiSquareReport {
        observed: observed.to_vec(),
        expected,
        statistic,
        dof: observed.len() - 1,
        total,
    })
}

/// Chi-square of a digit histogram against the Benford law for its base.
pub fn chi_square_benford(hist: &DigitHistogram) -> Result<ChiSquareReport> {
    chi_square(hist.counts(), &benford_probs(hist.base()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeckendorf::zd;
    use num_bigint::BigUint;

    #[test]
    fn benford_probs_basic_shape() {
        let probs = benford_probs(10);
        assert_eq!(probs.len(), 9);
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((probs[0] - std::f64::consts::LOG10_2).abs() < 1e-12);
        assert!((probs[8] - 0.04575).abs() < 1e-5);
        assert!(probs.windows(2).all(|w| w[0] > w[1]));
        assert_eq!(benford_probs(2), vec![1.0]);
    }

    #[test]
    fn histogram_of_small_decompositions() {
        // zd(42) = {5, 8}: values 8 and 34
        let h = digit_histogram(&zd(&BigUint::from(42u32)), 10);
        assert_eq!(h.count(8), 1);
        assert_eq!(h.count(3), 1);
        assert_eq!(h.total(), 2);

        let h = digit_histogram(&zd(&BigUint::from(0u32)), 10);
        assert_eq!(h.total(), 0);

        // zd(10) = {2, 5}: values 2 and 8
        let h = digit_histogram(&zd(&BigUint::from(10u32)), 10);
        assert_eq!(h.count(2), 1);
        assert_eq!(h.count(8), 1);
    }

    #[test]
    fn histogram_merge_adds_counts() {
        let mut a = digit_histogram(&zd(&BigUint::from(42u32)), 10);
        let b = digit_histogram(&zd(&BigUint::from(10u32)), 10);
        a.merge(&b);
        assert_eq!(a.total(), 4);
        assert_eq!(a.count(8), 2);
    }

    #[test]
    fn chi_square_zero_for_exact_proportions() {
        let probs = vec![0.5, 0.25, 0.25];
        let report = chi_square(&[40, 20, 20], &probs).unwrap();
        assert_eq!(report.statistic, 0.0);
        assert_eq!(report.dof, 2);
        assert_eq!(report.total, 80);
        let esum: f64 = report.expected.iter().sum();
        assert!((esum - 80.0).abs() < 1e-9 * 80.0);
    }

    #[test]
    fn chi_square_scales_linearly_with_counts() {
        let probs = benford_probs(10);
        let observed: Vec<u64> = vec![35, 17, 13, 9, 8, 6, 5, 4, 3];
        let base = chi_square(&observed, &probs).unwrap().statistic;
        for c in [2u64, 3, 7] {
            let scaled: Vec<u64> = observed.iter().map(|&o| c * o).collect();
            let stat = chi_square(&scaled, &probs).unwrap().statistic;
            assert!(
                (stat - c as f64 * base).abs() < 1e-9 * stat.max(1.0),
                "c={c}"
            );
        }
    }

    #[test]
    fn chi_square_rejects_bad_input() {
        assert!(matches!(
            chi_square(&[0, 0], &[0.5, 0.5]),
            Err(Error::EmptyObservations)
        ));
        assert!(chi_square(&[1, 2, 3], &[0.5, 0.5]).is_err());
        assert!(chi_square(&[1, 2], &[0.9, 0.2]).is_err());
        assert!(chi_square(&[1, 2], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn thresholds_are_ordered() {
        const { assert!(CHI2_95_8DOF < CHI2_99_8DOF) }
    }

    #[test]
    fn known_statistic_value() {
        // two categories, k=10, probs (0.5, 0.5), observed (7, 3):
        // (7-5)^2/5 + (3-5)^2/5 = 1.6
        let report = chi_square(&[7, 3], &[0.5, 0.5]).unwrap();
        assert!((report.statistic - 1.6).abs() < 1e-12);
    }
}
