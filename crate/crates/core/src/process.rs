//! The random legal-decomposition process and its exact probability laws.
//!
//! The process walks indices `k = 1..=n`: an index adjacent to the
//! previously taken one is skipped outright, any other index is taken
//! independently with probability `p`. The result is always a legal
//! summand set. At `p = phi^-2` the induced law on decomposed values is
//! near-uniform on `[0, F_{n+1})`, which doubles as a cheap almost-uniform
//! sampler of huge integers.
//!
//! Exact laws are computed in [`ExactScalar`] so identities at `phi^-2`
//! hold with zero rounding; simulation draws Bernoulli variates by
//! comparing 128-bit words against `floor(p·2^128)`.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::density::DensitySet;
use crate::error::{Error, Result};
use crate::fib::{fib, FibIndex};
use crate::scalar::ExactScalar;
use crate::zeckendorf::{zd, zd_inverse, ZeckSet};

/// Parameters of one process run: index cap `n`, take-probability `p`,
/// and the master seed for reproducible sampling.
#[derive(Clone, Debug)]
pub struct ProcessConfig {
    n: FibIndex,
    p: ExactScalar,
    seed: u64,
    /// `floor(p · 2^128)`: a 128-bit draw below this means "take".
    threshold: u128,
}

impl ProcessConfig {
    /// Validates `n ≥ 1` and `0 < p < 1` (decided exactly, then frozen to
    /// a 128-bit sampling threshold).
    pub fn new(n: FibIndex, p: ExactScalar, seed: u64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter(
                "process length must be at least 1".into(),
            ));
        }
        if p.sign() != std::cmp::Ordering::Greater
            || (&ExactScalar::one() - &p).sign() != std::cmp::Ordering::Greater
        {
            return Err(Error::InvalidParameter(format!(
                "take-probability must lie strictly inside (0, 1), got {p}"
            )));
        }
        let threshold = bernoulli_threshold(&p);
        Ok(ProcessConfig {
            n,
            p,
            seed,
            threshold,
        })
    }

    pub fn n(&self) -> FibIndex {
        self.n
    }

    pub fn p(&self) -> &ExactScalar {
        &self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// `floor(p · 2^128)` for `p ∈ (0, 1)`.
fn bernoulli_threshold(p: &ExactScalar) -> u128 {
    p.floor_scaled(128)
        .to_u128()
        .expect("threshold of p in (0,1) fits in 128 bits")
}

pub(crate) fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One draw of the process: the random legal set `A_n(p)`.
pub fn sample_a(config: &ProcessConfig) -> ZeckSet {
    let mut rng = trial_rng(config.seed, 0);
    sample_indices(config.n, config.threshold, &mut rng)
}

fn sample_indices(n: FibIndex, threshold: u128, rng: &mut ChaCha8Rng) -> ZeckSet {
    let mut indices = Vec::new();
    let mut last_taken = false;
    for k in 1..=n {
        if last_taken {
            last_taken = false; // adjacent index is blocked, no draw
            continue;
        }
        if rng.random::<u128>() < threshold {
            indices.push(k);
            last_taken = true;
        }
    }
    ZeckSet::from_ascending_unchecked(indices)
}

/// Walks one trial counting only `(W, Z) = (#taken, #taken ∩ S)`.
fn trial_counts(
    n: FibIndex,
    threshold: u128,
    set: &dyn DensitySet,
    rng: &mut ChaCha8Rng,
) -> TrialCounts {
    let mut w = 0u32;
    let mut z = 0u32;
    let mut last_taken = false;
    for k in 1..=n {
        if last_taken {
            last_taken = false;
            continue;
        }
        if rng.random::<u128>() < threshold {
            w += 1;
            if set.member(k) {
                z += 1;
            }
            last_taken = true;
        }
    }
    TrialCounts { w, z }
}

/// Exact law of the decomposed value: probability that the process ends
/// on the set decomposing `m`, for `m ∈ [0, F_{n+1})`.
///
/// With `k` summands this is `p^k (1-p)^{n-2k}` when `m < F_n` and
/// `p^k (1-p)^{n-2k+1}` otherwise; both exponents are non-negative for
/// every legal `m` in range.
pub fn prob_of_m(n: FibIndex, p: &ExactScalar, m: &BigUint) -> Result<ExactScalar> {
    let upper = fib(n + 1);
    if *m >= upper {
        return Err(Error::ValueOutOfRange {
            n,
            m: m.to_string(),
            lo: "0".into(),
            hi: upper.to_string(),
        });
    }
    let k = zd(m).len() as i64;
    let q = &ExactScalar::one() - p;
    let exponent = if *m < fib(n) {
        n as i64 - 2 * k
    } else {
        n as i64 - 2 * k + 1
    };
    debug_assert!(exponent >= 0, "legal decompositions keep exponents ≥ 0");
    Ok(&p.pow(k) * &q.pow(exponent))
}

/// The same law in telescoped product form over the summand indices
/// `a_1 < … < a_k`: a `p` per taken index, a `(1-p)` per free slot, and a
/// trailing block of `n - a_k - 1` free slots (`n - a_k` free slots never
/// arises because the index after a take is blocked, not free; when
/// `a_k = n` no trailing slot exists at all).
pub fn prob_of_m_product(n: FibIndex, p: &ExactScalar, m: &BigUint) -> Result<ExactScalar> {
    use num_traits::Zero;
    if m.is_zero() {
        return Err(Error::InvalidParameter(
            "product form needs at least one summand; use prob_of_m for m = 0".into(),
        ));
    }
    let upper = fib(n + 1);
    if *m >= upper {
        return Err(Error::ValueOutOfRange {
            n,
            m: m.to_string(),
            lo: "1".into(),
            hi: upper.to_string(),
        });
    }
    let a = zd(m);
    let indices = a.indices();
    let q = &ExactScalar::one() - p;
    let mut acc = &q.pow(indices[0] as i64 - 1) * p;
    for pair in indices.windows(2) {
        let gap = pair[1] as i64 - pair[0] as i64 - 2;
        acc = &(&acc * &q.pow(gap)) * p;
    }
    let a_k = *indices.last().expect("m ≥ 1 has summands");
    let tail = if a_k < n {
        n as i64 - a_k as i64 - 1
    } else {
        0
    };
    Ok(&acc * &q.pow(tail))
}

/// Draws from the near-uniform law on `[0, F_{n+1})` by running the
/// process at `p = phi^-2` and decoding the resulting set.
pub fn sample_uniform_like(n: FibIndex, seed: u64) -> BigUint {
    let config =
        ProcessConfig::new(n, ExactScalar::phi_inv_sq(), seed).expect("phi^-2 lies in (0, 1)");
    zd_inverse(&sample_a(&config))
}

/// Exactly uniform draw from `[0, bound)` by rejection on fixed-width bit
/// strings.
///
/// # Panics
/// Panics if `bound` is zero.
pub fn uniform_below<R: Rng + ?Sized>(bound: &BigUint, rng: &mut R) -> BigUint {
    use num_traits::Zero;
    assert!(!bound.is_zero(), "empty sampling range");
    let bits = bound.bits();
    let bytes = bits.div_ceil(8) as usize;
    let top_mask = if bits.is_multiple_of(8) {
        0xffu8
    } else {
        (1u8 << (bits % 8)) - 1
    };
    let mut buf = vec![0u8; bytes];
    loop {
        rng.fill_bytes(&mut buf);
        buf[bytes - 1] &= top_mask; // big-endian bit cap in little-endian bytes
        let candidate = BigUint::from_bytes_le(&buf);
        if candidate < *bound {
            return candidate;
        }
    }
}

/// Exactly uniform draw from `[0, F_{n+1})`, seeded; stream `t` yields the
/// `t`-th independent draw of a reproducible sequence.
pub fn sample_uniform_m(n: FibIndex, seed: u64, stream: u64) -> BigUint {
    let bound = fib(n + 1);
    let mut rng = trial_rng(seed, stream);
    uniform_below(&bound, &mut rng)
}

/// Exact probability that index `k` ends up taken: the alternating sum
/// `p - p^2 + p^3 - … ± p^k`, which satisfies the conditioning recurrence
/// `Prob(F_k) = p^2·Prob(F_{k-2}) + p - p^2`.
pub fn prob_fk_in_a(k: FibIndex, p: &ExactScalar) -> ExactScalar {
    assert!(k >= 1, "indices start at 1");
    let mut sum = p.clone();
    let mut term = p.clone();
    for j in 2..=k {
        term = &term * p;
        if j % 2 == 0 {
            sum = &sum - &term;
        } else {
            sum = &sum + &term;
        }
    }
    sum
}

/// Exact expected number of taken indices, `Σ_{k=1}^n Prob(F_k taken)`,
/// evaluated with a running alternating sum in `O(n)` field operations.
/// Lies within a bounded constant of `n·p/(1+p)`.
pub fn expected_w(n: FibIndex, p: &ExactScalar) -> ExactScalar {
    assert!(n >= 1, "process length must be at least 1");
    let mut term = p.clone(); // (-1)^{k+1} p^k, signed
    let mut per_index = p.clone(); // prob_fk_in_a(k, p)
    let mut total = p.clone();
    for _ in 2..=n {
        term = -&(&term * p);
        per_index = &per_index + &term;
        total = &total + &per_index;
    }
    total
}

/// Per-trial outcome of one process run: `W` indices taken, `Z` of them in
/// the reference set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TrialCounts {
    pub w: u32,
    pub z: u32,
}

/// Aggregates over independent trials of the process.
#[derive(Clone, Debug, Serialize)]
pub struct SimulationSummary {
    pub n: FibIndex,
    pub seed: u64,
    /// Per-trial counts (CSV payload; omitted from JSON summaries).
    #[serde(skip)]
    pub trials: Vec<TrialCounts>,
    pub mean_w: f64,
    pub mean_z: f64,
    /// Unbiased sample variances (zero when fewer than two trials).
    pub var_w: f64,
    pub var_z: f64,
}

/// Runs `trials` independent process draws (trial `t` on PRNG stream `t`)
/// and aggregates `(W, Z)` against `set`. Fully deterministic given
/// `(config, set, trials)`; trials run in parallel.
pub fn simulate_counts(
    config: &ProcessConfig,
    set: &dyn DensitySet,
    trials: u32,
) -> Result<SimulationSummary> {
    if trials < 1 {
        return Err(Error::InvalidParameter(
            "at least one trial is required".into(),
        ));
    }
    let counts: Vec<TrialCounts> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(config.seed, t as u64);
            trial_counts(config.n, config.threshold, set, &mut rng)
        })
        .collect();
    let (mean_w, var_w) = mean_and_variance(counts.iter().map(|c| c.w as f64));
    let (mean_z, var_z) = mean_and_variance(counts.iter().map(|c| c.z as f64));
    Ok(SimulationSummary {
        n: config.n,
        seed: config.seed,
        trials: counts,
        mean_w,
        mean_z,
        var_w,
        var_z,
    })
}

/// Single process trial on a chosen PRNG stream, exposed for experiment
/// drivers that pair one trial with one stream.
pub fn process_trial(config: &ProcessConfig, set: &dyn DensitySet, stream: u64) -> TrialCounts {
    let mut rng = trial_rng(config.seed, stream);
    trial_counts(config.n, config.threshold, set, &mut rng)
}

fn mean_and_variance(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let count = values.clone().count();
    let mean = values.clone().sum::<f64>() / count as f64;
    if count < 2 {
        return (mean, 0.0);
    }
    let ss = values.map(|v| (v - mean) * (v - mean)).sum::<f64>();
    (mean, ss / (count as f64 - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::AllFib;
    use crate::zeckendorf::is_legal;

    fn rational(n: i64, d: i64) -> ExactScalar {
        ExactScalar::from_ratio(n, d)
    }

    #[test]
    fn config_validates_probability() {
        assert!(ProcessConfig::new(5, rational(1, 2), 0).is_ok());
        assert!(ProcessConfig::new(5, ExactScalar::zero(), 0).is_err());
        assert!(ProcessConfig::new(5, ExactScalar::one(), 0).is_err());
        assert!(ProcessConfig::new(5, rational(3, 2), 0).is_err());
        assert!(ProcessConfig::new(0, rational(1, 2), 0).is_err());
    }

    #[test]
    fn samples_are_always_legal() {
        for seed in 0..200u64 {
            let config = ProcessConfig::new(50, rational(2, 5), seed).unwrap();
            let s = sample_a(&config);
            assert!(is_legal(s.indices()));
            assert!(s.max_index().is_none_or(|i| i <= 50));
        }
    }

    #[test]
    fn vanishing_probability_samples_empty() {
        let config = ProcessConfig::new(50, rational(1, 1_000_000_000), 7).unwrap();
        assert!(sample_a(&config).is_empty());
    }

    #[test]
    fn single_step_frequency_matches_p() {
        let trials = 100_000u32;
        let config = ProcessConfig::new(1, rational(1, 2), 42).unwrap();
        let summary = simulate_counts(&config, &AllFib, trials).unwrap();
        let ones = summary.trials.iter().filter(|c| c.w == 1).count() as f64;
        let freq = ones / trials as f64;
        let sigma = (0.25f64 / trials as f64).sqrt();
        assert!((freq - 0.5).abs() < 3.0 * sigma, "freq={freq}");
    }

    #[test]
    fn two_step_tree_frequencies() {
        let trials = 100_000u32;
        let config = ProcessConfig::new(2, rational(1, 2), 11).unwrap();
        let mut hits = [0u32; 3]; // ∅, {1}, {2}
        for t in 0..trials {
            let mut rng = trial_rng(config.seed, t as u64);
            let s = sample_indices(config.n, config.threshold, &mut rng);
            match s.indices() {
                [] => hits[0] += 1,
                [1] => hits[1] += 1,
                [2] => hits[2] += 1,
                other => panic!("impossible outcome {other:?}"),
            }
        }
        let expect = [0.25, 0.5, 0.25];
        for (h, e) in hits.iter().zip(expect) {
            let freq = *h as f64 / trials as f64;
            let sigma = (e * (1.0 - e) / trials as f64).sqrt();
            assert!((freq - e).abs() < 4.0 * sigma, "freq={freq}, expect={e}");
        }
    }

    #[test]
    fn prob_of_m_examples() {
        let p = rational(1, 3);
        let q = &ExactScalar::one() - &p;
        // nothing taken in three steps
        assert_eq!(prob_of_m(3, &p, &BigUint::from(0u32)).unwrap(), q.pow(3));
        // m = 4 = F_1 + F_3, in [F_3, F_4)
        assert_eq!(prob_of_m(3, &p, &BigUint::from(4u32)).unwrap(), p.pow(2));
        assert!(prob_of_m(3, &p, &BigUint::from(5u32)).is_err());
    }

    #[test]
    fn prob_of_m_is_flat_at_phi_inv_sq() {
        let p = ExactScalar::phi_inv_sq();
        let low = prob_of_m(4, &p, &BigUint::from(0u32)).unwrap();
        assert_eq!(low, ExactScalar::phi().pow(-4));
        for m in 1..5u32 {
            assert_eq!(prob_of_m(4, &p, &BigUint::from(m)).unwrap(), low);
        }
        let high = prob_of_m(4, &p, &BigUint::from(5u32)).unwrap();
        assert_eq!(high, ExactScalar::phi().pow(-5));
        for m in 6..8u32 {
            assert_eq!(prob_of_m(4, &p, &BigUint::from(m)).unwrap(), high);
        }
    }

    #[test]
    fn product_form_matches_direct_form() {
        let p = rational(1, 3);
        assert_eq!(
            prob_of_m_product(3, &p, &BigUint::from(4u32)).unwrap(),
            p.pow(2)
        );
        let q = &ExactScalar::one() - &p;
        assert_eq!(
            prob_of_m_product(5, &p, &BigUint::from(1u32)).unwrap(),
            &p * &q.pow(3)
        );
        for m in 1..fib(11).to_u128().unwrap() {
            let m = BigUint::from(m);
            assert_eq!(
                prob_of_m_product(10, &p, &m).unwrap(),
                prob_of_m(10, &p, &m).unwrap(),
                "m={m}"
            );
        }
        assert!(prob_of_m_product(3, &p, &BigUint::from(0u32)).is_err());
    }

    #[test]
    fn law_sums_to_one_exactly() {
        let p = rational(1, 3);
        for n in [1u32, 4, 9] {
            let mut total = ExactScalar::zero();
            let bound = fib(n + 1).to_u128().unwrap();
            for m in 0..bound {
                total = &total + &prob_of_m(n, &p, &BigUint::from(m)).unwrap();
            }
            assert!(total == ExactScalar::one(), "n={n}");
        }
    }

    #[test]
    fn prob_fk_examples_and_recurrence() {
        let p = rational(2, 5);
        assert_eq!(prob_fk_in_a(1, &p), p);
        assert_eq!(prob_fk_in_a(2, &p), &p - &(&p * &p));
        assert_eq!(prob_fk_in_a(3, &rational(1, 2)), rational(3, 8));
        let p2 = &p * &p;
        for k in 3..=30u32 {
            let lhs = prob_fk_in_a(k, &p);
            let rhs = &(&p2 * &prob_fk_in_a(k - 2, &p)) + &(&p - &p2);
            assert_eq!(lhs, rhs, "k={k}");
        }
    }

    #[test]
    fn expected_w_matches_term_sums() {
        let half = rational(1, 2);
        assert_eq!(expected_w(1, &half), half);
        assert_eq!(expected_w(2, &half), rational(3, 4));
        for n in [3u32, 7, 20] {
            let direct: ExactScalar = (1..=n)
                .map(|k| prob_fk_in_a(k, &half))
                .fold(ExactScalar::zero(), |acc, t| &acc + &t);
            assert_eq!(expected_w(n, &half), direct, "n={n}");
        }
        // asymptote n·p/(1+p) = n/3 at p = 1/2
        let n = 300;
        let gap = &expected_w(n, &half) - &rational(n as i64, 3);
        let gap = gap.to_f64().abs();
        assert!(gap < 1.0, "gap={gap}");
    }

    #[test]
    fn uniform_like_masses_at_small_n() {
        // n=1: m=0 w.p. phi^-1 ≈ 0.618, m=1 w.p. phi^-2 ≈ 0.382
        let trials = 50_000;
        let mut zeroes = 0u32;
        for seed in 0..trials {
            if sample_uniform_like(1, seed as u64) == BigUint::from(0u32) {
                zeroes += 1;
            }
        }
        let freq = zeroes as f64 / trials as f64;
        let expect = 1.0 / ((1.0 + 5f64.sqrt()) / 2.0);
        let sigma = (expect * (1.0 - expect) / trials as f64).sqrt();
        assert!((freq - expect).abs() < 4.0 * sigma, "freq={freq}");
    }

    #[test]
    fn uniform_rejection_sampler_stays_in_range() {
        let bound = fib(11); // 144
        let mut rng = trial_rng(5, 0);
        let mut seen_low = false;
        let mut seen_high = false;
        for _ in 0..2000 {
            let v = uniform_below(&bound, &mut rng);
            assert!(v < bound);
            let v = v.to_u128().unwrap();
            seen_low |= v < 72;
            seen_high |= v >= 72;
        }
        assert!(seen_low && seen_high);
    }

    #[test]
    fn simulation_is_deterministic_and_bounded() {
        let config = ProcessConfig::new(200, rational(1, 2), 99).unwrap();
        let a = simulate_counts(&config, &AllFib, 500).unwrap();
        let b = simulate_counts(&config, &AllFib, 500).unwrap();
        assert_eq!(a.trials, b.trials);
        assert!(a.trials.iter().all(|c| c.w == c.z)); // S = everything
        let exact = expected_w(200, &rational(1, 2)).to_f64();
        let band = 4.0 * (a.var_w / 500.0).sqrt();
        assert!(
            (a.mean_w - exact).abs() < band,
            "mean={} exact={exact}",
            a.mean_w
        );
    }
}
