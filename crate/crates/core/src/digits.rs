//! Leading digits and leading digit blocks of big integers.
//!
//! Two paths compute the first `D` base-`B` digits of a Fibonacci number:
//! an exact path that converts the full integer to base `B`, and a fast
//! path that evaluates `frac((i+1)·log_B phi − log_B sqrt5)` in 128-bit
//! fixed point and locates the digit block by comparing against
//! precomputed boundaries `frac(log_B v)`. Whenever the fractional part
//! falls within a guard band of `2^-64` of a block boundary — or the index
//! is too small for the Binet correction term to be negligible — the fast
//! path silently defers to the exact one, so its answers are always exact.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fib::{fib, FibIndex};

/// Working precision (fraction bits) for fixed-point logarithms. The
/// shift-and-square evaluation loses at most ~2 bits, leaving ~2^-190
/// accuracy before results are truncated to 128 bits.
const LOG_WORK_BITS: u32 = 192;
/// Published fixed-point precision: fractional parts are `value / 2^128`.
const OUT_BITS: u32 = 128;
/// Guard band around digit-block boundaries, `2^-64` in 0.128 fixed point.
/// Inside the band the fast path cannot be trusted and falls back.
const GUARD_BAND: u128 = 1 << 64;
/// Extra bits used when flooring irrational constants to integers.
const CONST_APPROX_BITS: u32 = 224;
/// Below this index the Binet correction term `phi^{-2(i+1)}` is not
/// comfortably inside the guard band, so the exact path is used outright.
const SMALL_EXACT_MAX: FibIndex = 64;
/// Boundary tables larger than this are not materialized; block lookup
/// then computes the two neighbouring boundaries on demand.
const BOUNDARY_TABLE_MAX: u128 = 1 << 14;

/// The first `D` digits of some integer in base `B`: `d1` is the leading
/// digit (never zero), the rest follow in order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DigitBlock {
    base: u32,
    digits: Vec<u32>,
}

impl DigitBlock {
    /// Validates `1 ≤ d1 < base`, `0 ≤ di < base`, and a non-empty block.
    /// Bases outside `2..=256` are rejected (the radix-conversion backend
    /// and the fixed-point tables both assume byte-sized digits).
    pub fn new(base: u32, digits: Vec<u32>) -> Result<Self> {
        validate_base(base)?;
        if digits.is_empty() {
            return Err(Error::InvalidParameter(
                "digit block must contain at least one digit".into(),
            ));
        }
        if digits[0] == 0 {
            return Err(Error::InvalidParameter(
                "leading digit of a block must be nonzero".into(),
            ));
        }
        if let Some(&d) = digits.iter().find(|&&d| d >= base) {
            return Err(Error::InvalidParameter(format!(
                "digit {d} out of range for base {base}"
            )));
        }
        Ok(DigitBlock { base, digits })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// Block length `D`.
    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        false // d1 always exists
    }

    pub fn leading_digit(&self) -> u32 {
        self.digits[0]
    }

    /// The block read as an integer, `d1·B^{D-1} + … + dD`, always in
    /// `[B^{D-1}, B^D)`.
    ///
    /// # Panics
    /// Panics if `B^D` overflows `u128` (beyond any supported table size).
    pub fn block_int(&self) -> u128 {
        self.digits.iter().fold(0u128, |acc, &d| {
            acc.checked_mul(self.base as u128)
                .and_then(|v| v.checked_add(d as u128))
                .expect("digit block exceeds 128-bit integer form")
        })
    }
}

impl fmt::Display for DigitBlock {
    /// `"1"` for single digits, `"1.05"` for longer blocks (matching the
    /// CLI's `block:1.05` syntax); bases above 10 separate trailing digits
    /// with commas.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.digits[0])?;
        if self.digits.len() > 1 {
            write!(f, ".")?;
            let sep = if self.base <= 10 { "" } else { "," };
            for (k, d) in self.digits[1..].iter().enumerate() {
                if k > 0 {
                    write!(f, "{sep}")?;
                }
                write!(f, "{d}")?;
            }
        }
        Ok(())
    }
}

fn validate_base(base: u32) -> Result<()> {
    if (2..=256).contains(&base) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "base {base} outside supported range 2..=256"
        )))
    }
}

/// First `block_len` base-`base` digits of `x`, truncated (not rounded),
/// zero-padded on the right when `x` has fewer digits.
///
/// Rejects `x = 0`, whose significand is undefined.
pub fn significand_block(x: &BigUint, base: u32, block_len: usize) -> Result<DigitBlock> {
    validate_base(base)?;
    if block_len == 0 {
        return Err(Error::InvalidParameter(
            "digit block length must be at least 1".into(),
        ));
    }
    if x.is_zero() {
        return Err(Error::InvalidParameter(
            "significand of zero is undefined".into(),
        ));
    }
    let all = x.to_radix_be(base);
    let digits = (0..block_len)
        .map(|k| all.get(k).copied().unwrap_or(0) as u32)
        .collect();
    Ok(DigitBlock { base, digits })
}

/// Leading base-`base` digit of `x ≥ 1`.
pub fn leading_digit(x: &BigUint, base: u32) -> Result<u32> {
    Ok(significand_block(x, base, 1)?.leading_digit())
}

/// Leading `block_len`-digit block of the `i`-th Fibonacci number, without
/// materializing it when the logarithmic fast path is conclusive.
///
/// Exactness is unconditional: small indices and guard-band hits are
/// answered by [`significand_block`] on the real value.
///
/// # Panics
/// Panics if `i = 0`, the base is outside `2..=256`, or `block_len` is
/// outside `1..=8` (the fast path's provable error budget).
pub fn fib_leading_block_fast(i: FibIndex, base: u32, block_len: usize) -> DigitBlock {
    assert!(i >= 1, "Fibonacci indices start at 1");
    assert!(
        (2..=256).contains(&base),
        "base {base} outside supported range 2..=256"
    );
    assert!(
        (1..=8).contains(&block_len),
        "fast path supports block lengths 1..=8"
    );
    if i < SMALL_EXACT_MAX {
        return exact_block(i, base, block_len);
    }
    let logs = base_logs(base);
    // frac(log_B F_i) ≈ frac((i+1)·log_B phi − log_B sqrt5); wrapping u128
    // arithmetic is arithmetic mod 1 in 0.128 fixed point.
    let t = logs
        .log_phi
        .wrapping_mul(i as u128 + 1)
        .wrapping_sub(logs.log_sqrt5);
    let lo_block = (base as u128).pow(block_len as u32 - 1);
    let hi_block = lo_block * base as u128;
    let resolved = if hi_block - lo_block <= BOUNDARY_TABLE_MAX {
        table_lookup(&logs, base, block_len, lo_block, t)
    } else {
        on_demand_lookup(&logs, base, lo_block, hi_block, t)
    };
    match resolved {
        Some(v) => DigitBlock {
            base,
            digits: block_digits(v, base, block_len),
        },
        None => exact_block(i, base, block_len),
    }
}

fn exact_block(i: FibIndex, base: u32, block_len: usize) -> DigitBlock {
    significand_block(&fib(i), base, block_len).expect("Fibonacci values are positive")
}

fn block_digits(mut v: u128, base: u32, block_len: usize) -> Vec<u32> {
    let mut digits = vec![0u32; block_len];
    for slot in digits.iter_mut().rev() {
        *slot = (v % base as u128) as u32;
        v /= base as u128;
    }
    debug_assert_eq!(v, 0);
    digits
}

/// Block value from a precomputed boundary table, or `None` inside the
/// guard band.
fn table_lookup(
    logs: &BaseLogs,
    base: u32,
    block_len: usize,
    lo_block: u128,
    t: u128,
) -> Option<u128> {
    let table = boundary_table(logs, base, block_len, lo_block);
    // table[0] = 0 ≤ t always, so idx ≥ 1.
    let idx = table.partition_point(|&b| b <= t);
    let j = idx - 1;
    let below = t - table[j];
    // Past the last boundary the next one is frac(log_B B^D) = 0, one full
    // turn up; wrapping subtraction measures the circular distance.
    let above = if idx < table.len() {
        table[idx] - t
    } else {
        0u128.wrapping_sub(t)
    };
    if below < GUARD_BAND || above < GUARD_BAND {
        None
    } else {
        Some(lo_block + j as u128)
    }
}

/// Block value computed without a table: a float estimate of the block is
/// corrected against exactly-computed neighbouring boundaries.
fn on_demand_lookup(
    logs: &BaseLogs,
    base: u32,
    lo_block: u128,
    hi_block: u128,
    t: u128,
) -> Option<u128> {
    let bnd = |v: u128| boundary_fixed(logs, base, v);
    let t_real = (t >> 64) as f64 / (64f64).exp2();
    let estimate = ((lo_block as f64) * (base as f64).powf(t_real)) as u128;
    let mut v = estimate.clamp(lo_block, hi_block - 1);
    while bnd(v) > t {
        v -= 1; // bnd(lo_block) = 0 ≤ t stops the walk
    }
    while v + 1 < hi_block && bnd(v + 1) <= t {
        v += 1;
    }
    let below = t - bnd(v);
    let above = if v + 1 < hi_block {
        bnd(v + 1) - t
    } else {
        0u128.wrapping_sub(t)
    };
    if below < GUARD_BAND || above < GUARD_BAND {
        None
    } else {
        Some(v)
    }
}

/// Per-base fixed-point constants: `log_B phi`, `frac(log_B sqrt5)` (both
/// 0.128 fixed point) and `log2 B` at working precision for boundary
/// computations.
struct BaseLogs {
    log_phi: u128,
    log_sqrt5: u128,
    log2_base: BigUint,
}

impl BaseLogs {
    fn compute(base: u32) -> Self {
        // floor(sqrt5 · 2^S) and floor(phi · 2^S): exact integer anchors
        // whose 2^-S floor error is far below working precision.
        let sqrt5_fp = (BigUint::from(5u32) << (2 * CONST_APPROX_BITS)).sqrt();
        let phi_fp = ((BigUint::one() << CONST_APPROX_BITS) + &sqrt5_fp) >> 1;

        // phi ∈ [1,2): the integer part of log2(phi_fp) cancels the scale.
        let (_, log2_phi) = log2_fixed(&phi_fp);
        // sqrt5 ∈ [2,4): full value is 1 + frac.
        let (_, log2_sqrt5_frac) = log2_fixed(&sqrt5_fp);
        let log2_sqrt5 = (BigUint::one() << LOG_WORK_BITS) + log2_sqrt5_frac;

        let (exp, frac) = log2_fixed(&BigUint::from(base));
        let log2_base = (BigUint::from(exp) << LOG_WORK_BITS) + frac;

        let log_phi = fixed_ratio_frac(&log2_phi, &log2_base);
        let log_sqrt5 = fixed_ratio_frac(&log2_sqrt5, &log2_base);
        BaseLogs {
            log_phi,
            log_sqrt5,
            log2_base,
        }
    }
}

/// `frac(num/den)` truncated to 0.128 fixed point, where `num` and `den`
/// are fixed-point values with `LOG_WORK_BITS` fraction bits.
fn fixed_ratio_frac(num: &BigUint, den: &BigUint) -> u128 {
    let ratio = (num << LOG_WORK_BITS) / den;
    let frac = ratio & ((BigUint::one() << LOG_WORK_BITS) - 1u32);
    (frac >> (LOG_WORK_BITS - OUT_BITS))
        .to_u128()
        .expect("frac fits in 128 bits")
}

/// `(floor(log2 x), frac(log2 x)·2^W)` by shift-and-square bit extraction.
/// Truncating the mantissa at each step only ever underestimates, and the
/// error introduced at step `j` is discounted by `2^-j`, so the total
/// error stays below `2^{-W+2}`.
fn log2_fixed(x: &BigUint) -> (u64, BigUint) {
    assert!(!x.is_zero(), "log of zero");
    let e = x.bits() - 1;
    let mut y = (x << LOG_WORK_BITS) >> e; // mantissa in [2^W, 2^{W+1})
    let mut frac = BigUint::zero();
    for _ in 0..LOG_WORK_BITS {
        y = (&y * &y) >> LOG_WORK_BITS;
        frac <<= 1;
        if y.bits() > (LOG_WORK_BITS + 1) as u64 {
            frac += 1u32;
            y >>= 1;
        }
    }
    (e, frac)
}

/// `frac(log_B v)` in 0.128 fixed point. Exact powers of the base are
/// answered exactly as 0 so that boundary tables start at a true zero and
/// stay strictly increasing.
fn boundary_fixed(logs: &BaseLogs, base: u32, v: u128) -> u128 {
    let mut w = v;
    while w.is_multiple_of(base as u128) {
        w /= base as u128;
    }
    if w == 1 {
        return 0;
    }
    let (e, frac) = log2_fixed(&BigUint::from(v));
    let full = (BigUint::from(e) << LOG_WORK_BITS) + frac;
    fixed_ratio_frac(&full, &logs.log2_base)
}

fn base_logs(base: u32) -> Arc<BaseLogs> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<BaseLogs>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut guard = cache.lock().expect("base-log cache poisoned");
    guard
        .entry(base)
        .or_insert_with(|| Arc::new(BaseLogs::compute(base)))
        .clone()
}

/// Boundary tables keyed by `(base, block_len)`.
type BoundaryCache = Mutex<HashMap<(u32, usize), Arc<Vec<u128>>>>;

fn boundary_table(logs: &BaseLogs, base: u32, block_len: usize, lo_block: u128) -> Arc<Vec<u128>> {
    static CACHE: OnceLock<BoundaryCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut guard = cache.lock().expect("boundary-table cache poisoned");
    guard
        .entry((base, block_len))
        .or_insert_with(|| {
            let count = (lo_block * base as u128 - lo_block) as usize;
            let table = (0..count)
                .map(|j| boundary_fixed(logs, base, lo_block + j as u128))
                .collect();
            Arc::new(table)
        })
        .clone()
}
