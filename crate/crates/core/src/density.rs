//! Subsets of the Fibonacci numbers with known (asymptotic) density, and
//! the per-integer summand statistics they induce.
//!
//! A [`DensitySet`] is a pure membership predicate over Fibonacci indices
//! together with an optional reference density: the fraction of Fibonacci
//! numbers expected to land in the set as the index range grows. Built-in
//! sets cover leading digit blocks (Benford densities) and value residues
//! modulo an integer (exact rational densities from one Pisano period).

use num_bigint::BigUint;
use num_rational::BigRational;
use serde::Serialize;

use crate::digits::{fib_leading_block_fast, DigitBlock};
use crate::error::{Error, Result};
use crate::fib::FibIndex;
use crate::zeckendorf::{zd, ZeckSet};

/// A subset `S` of the Fibonacci numbers, identified by which indices `i`
/// have `F_i ∈ S`. Predicates must be pure: membership may be queried from
/// many threads at once.
pub trait DensitySet: Send + Sync {
    /// Human-readable name, matching the CLI's set syntax where possible.
    fn label(&self) -> &str;

    /// Whether the `i`-th Fibonacci number belongs to the set.
    fn member(&self, i: FibIndex) -> bool;

    /// Reference density `q(S)` when known in closed form.
    fn known_q(&self) -> Option<f64>;
}

/// Finite density `#{F_i ∈ S : 1 ≤ i ≤ n} / n` as an exact rational.
pub fn q_hat(set: &dyn DensitySet, n: FibIndex) -> BigRational {
    assert!(n >= 1, "density needs at least one index");
    let count = (1..=n).filter(|&i| set.member(i)).count();
    BigRational::new(count.into(), n.into())
}

/// The whole sequence: density 1, useful as a calibration set.
#[derive(Clone, Debug)]
pub struct AllFib;

impl DensitySet for AllFib {
    fn label(&self) -> &str {
        "all"
    }

    fn member(&self, _i: FibIndex) -> bool {
        true
    }

    fn known_q(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// Fibonacci numbers whose significand starts with a fixed digit block;
/// Benford density `log_B((V+1)/V)` where `V` is the block as an integer.
#[derive(Clone, Debug)]
pub struct DigitBlockSet {
    block: DigitBlock,
    label: String,
}

impl DigitBlockSet {
    pub fn block(&self) -> &DigitBlock {
        &self.block
    }
}

/// Builds the set of Fibonacci numbers whose leading digits equal `block`.
pub fn make_digit_block_set(block: DigitBlock) -> DigitBlockSet {
    let label = if block.len() == 1 {
        format!("digit:{}", block.leading_digit())
    } else {
        format!("block:{block}")
    };
    DigitBlockSet { block, label }
}

impl DensitySet for DigitBlockSet {
    fn label(&self) -> &str {
        &self.label
    }

    fn member(&self, i: FibIndex) -> bool {
        fib_leading_block_fast(i, self.block.base(), self.block.len()) == self.block
    }

    fn known_q(&self) -> Option<f64> {
        let v = self.block.block_int() as f64;
        Some(((v + 1.0) / v).ln() / (self.block.base() as f64).ln())
    }
}

/// Fibonacci numbers congruent to a fixed residue modulo `m`. Membership
/// and the exact density both come from one period of the sequence reduced
/// mod `m` — big integers are never consulted.
#[derive(Clone, Debug)]
pub struct ResidueSet {
    modulus: u64,
    residue: u64,
    /// Residues `F_1 mod m, F_2 mod m, …` over one full period.
    period: Vec<u64>,
    label: String,
    q_f64: f64,
}

/// Safety cap on the modulus: the period of the reduced sequence can reach
/// `6·modulus`, and we materialize one full period.
pub const RESIDUE_MODULUS_MAX: u64 = 1 << 20;

/// Builds the set `{F_i : F_i ≡ residue (mod modulus)}`.
pub fn make_value_residue_set(modulus: u64, residue: u64) -> Result<ResidueSet> {
    if modulus < 2 {
        return Err(Error::InvalidParameter(format!(
            "modulus must be at least 2, got {modulus}"
        )));
    }
    if modulus > RESIDUE_MODULUS_MAX {
        return Err(Error::InvalidParameter(format!(
            "modulus {modulus} exceeds supported maximum {RESIDUE_MODULUS_MAX}"
        )));
    }
    if residue >= modulus {
        return Err(Error::InvalidParameter(format!(
            "residue {residue} not below modulus {modulus}"
        )));
    }
    // The pair (F_k, F_{k+1}) mod m walks a finite state space and the
    // walk is invertible, so it returns to the seed pair (1, 2) and the
    // residues repeat from there.
    let seed = (1 % modulus, 2 % modulus);
    let mut period = Vec::new();
    let (mut a, mut b) = seed;
    loop {
        period.push(a);
        let next = (a + b) % modulus;
        a = b;
        b = next;
        if (a, b) == seed {
            break;
        }
    }
    let hits = period.iter().filter(|&&r| r == residue).count();
    let q_f64 = hits as f64 / period.len() as f64;
    Ok(ResidueSet {
        modulus,
        residue,
        period,
        label: format!("mod:{modulus},{residue}"),
        q_f64,
    })
}

impl ResidueSet {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    /// Length of one period of the reduced sequence.
    pub fn period_len(&self) -> usize {
        self.period.len()
    }

    /// Exact density: matching residues per period.
    pub fn exact_density(&self) -> BigRational {
        let hits = self.period.iter().filter(|&&r| r == self.residue).count();
        BigRational::new(hits.into(), self.period.len().into())
    }
}

impl DensitySet for ResidueSet {
    fn label(&self) -> &str {
        &self.label
    }

    fn member(&self, i: FibIndex) -> bool {
        assert!(i >= 1, "Fibonacci indices start at 1");
        self.period[(i as usize - 1) % self.period.len()] == self.residue
    }

    fn known_q(&self) -> Option<f64> {
        Some(self.q_f64)
    }
}

/// Summand statistics of one integer against a set: `X` counts Zeckendorf
/// summands, `Y` counts those lying in the set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RatioStats {
    pub x: u64,
    pub y: u64,
}

impl RatioStats {
    /// `Y/X`, absent for the empty decomposition.
    pub fn ratio(&self) -> Option<f64> {
        (self.x > 0).then(|| self.y as f64 / self.x as f64)
    }
}

/// Counts summands of `m` and how many fall in `set`.
pub fn ratio_stats(m: &BigUint, set: &dyn DensitySet) -> RatioStats {
    ratio_stats_of_set(&zd(m), set)
}

/// Same statistics for an already-decomposed summand set.
pub fn ratio_stats_of_set(s: &ZeckSet, set: &dyn DensitySet) -> RatioStats {
    let x = s.len() as u64;
    let y = s.iter().filter(|&i| set.member(i)).count() as u64;
    RatioStats { x, y }
}
