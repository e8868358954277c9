//! Fibonacci numbers under the normalization `F_1 = 1`, `F_2 = 2`.
//!
//! Every index in this crate refers to that sequence: 1, 2, 3, 5, 8, 13, ...
//! With the classic sequence written `f(0) = 0, f(1) = 1, f(2) = 1, ...`,
//! the identity is `F_i = f(i + 1)`; the conversion is internal to this
//! module and never leaks through the public API.
//!
//! Values are computed by fast doubling in `O(log i)` big multiplications,
//! so indexing stays cheap at the ~287,000 range reached by 60,001-digit
//! decompositions. Only a small fixed prefix is cached.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Index into the Fibonacci sequence, 1-based (`F_1 = 1`, `F_2 = 2`).
pub type FibIndex = u32;

/// Largest index served from the fixed in-memory cache.
pub const SMALL_FIB_CACHE_MAX: FibIndex = 128;

/// log2(phi), used only to seed index estimates that are then corrected
/// with exact comparisons.
pub(crate) const LOG2_PHI: f64 = 0.694_241_913_630_617_3;
/// log2(sqrt 5).
pub(crate) const LOG2_SQRT5: f64 = 1.160_964_047_443_681;

fn small_cache() -> &'static [BigUint] {
    static CACHE: OnceLock<Vec<BigUint>> = OnceLock::new();
    CACHE.get_or_init(|| {
        // cache[i] = F_i for i in 1..=SMALL_FIB_CACHE_MAX + 1; slot 0 unused
        let len = SMALL_FIB_CACHE_MAX as usize + 2;
        let mut v = Vec::with_capacity(len);
        v.push(BigUint::zero());
        v.push(BigUint::one());
        v.push(BigUint::from(2u32));
        for i in 3..len {
            let next = &v[i - 1] + &v[i - 2];
            v.push(next);
        }
        v
    })
}

/// `(f(n), f(n + 1))` for the classic sequence `f(0) = 0, f(1) = 1`, by
/// fast doubling over the bits of `n`.
fn classic_pair(n: u64) -> (BigUint, BigUint) {
    let mut a = BigUint::zero(); // f(m)
    let mut b = BigUint::one(); // f(m + 1)
    if n == 0 {
        return (a, b);
    }
    let top = 63 - n.leading_zeros() as u64;
    for shift in (0..=top).rev() {
        // f(2m)     = f(m) * (2 f(m+1) - f(m))
        // f(2m + 1) = f(m)^2 + f(m+1)^2
        let twice_b = &b << 1u32;
        let c = &a * (twice_b - &a);
        let d = &a * &a + &b * &b;
        if (n >> shift) & 1 == 1 {
            a = d.clone();
            b = c + d;
        } else {
            a = c;
            b = d;
        }
    }
    (a, b)
}

/// `F_i`.
///
/// # Panics
/// Panics if `i == 0`; the normalization starts at `F_1 = 1`.
pub fn fib(i: FibIndex) -> BigUint {
    assert!(i >= 1, "Fibonacci index 0 is undefined (F_1 = 1, F_2 = 2)");
    if i <= SMALL_FIB_CACHE_MAX {
        small_cache()[i as usize].clone()
    } else {
        classic_pair(i as u64 + 1).0
    }
}

/// `(F_i, F_{i+1})` in one fast-doubling pass.
///
/// # Panics
/// Panics if `i == 0`.
pub fn fib_pair(i: FibIndex) -> (BigUint, BigUint) {
    assert!(i >= 1, "Fibonacci index 0 is undefined (F_1 = 1, F_2 = 2)");
    if i < SMALL_FIB_CACHE_MAX {
        let cache = small_cache();
        (cache[i as usize].clone(), cache[i as usize + 1].clone())
    } else {
        classic_pair(i as u64 + 1)
    }
}

/// The unique `(i, F_i)` with `F_i <= x < F_{i+1}`.
///
/// The index is estimated from the bit length of `x` via log2(phi), then
/// corrected with exact comparisons, so the whole search costs `O(log i)`
/// big multiplications plus a couple of additions.
///
/// # Panics
/// Panics if `x == 0`; no positive Fibonacci number is `<= 0`.
pub fn largest_fib_leq(x: &BigUint) -> (FibIndex, BigUint) {
    let (i, f, _) = largest_fib_leq_pair(x);
    (i, f)
}

/// Like [`largest_fib_leq`], additionally returning `F_{i+1}`.
pub(crate) fn largest_fib_leq_pair(x: &BigUint) -> (FibIndex, BigUint, BigUint) {
    assert!(!x.is_zero(), "no positive Fibonacci number is <= 0");

    // log2(x) from the exponent plus the top 64 bits of the mantissa.
    let bits = x.bits();
    let log2_x = if bits <= 64 {
        let lead: u64 = x.iter_u64_digits().last().unwrap();
        (lead as f64).log2()
    } else {
        let top: BigUint = x >> (bits - 64);
        let lead: u64 = top.iter_u64_digits().next().unwrap();
        (lead as f64).log2() + (bits - 64) as f64
    };

    // f(n) ~ phi^n / sqrt(5), so n ~ (log2 x + log2 sqrt5) / log2 phi.
    let est = ((log2_x + LOG2_SQRT5) / LOG2_PHI).round() as i64;
    let mut n = est.max(2) as u64;
    let (mut lo, mut hi) = classic_pair(n);

    while lo > *x {
        // step down: (f(n-1), f(n)) = (f(n+1) - f(n), f(n))
        let prev = &hi - &lo;
        hi = std::mem::replace(&mut lo, prev);
        n -= 1;
        debug_assert!(n >= 2);
    }
    while hi <= *x {
        let next = &lo + &hi;
        lo = std::mem::replace(&mut hi, next);
        n += 1;
    }
    debug_assert!(lo <= *x && *x < hi);
    // paper index i = classic index n - 1
    ((n - 1) as FibIndex, lo, hi)
}
