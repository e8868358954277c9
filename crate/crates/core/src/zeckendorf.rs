//! Zeckendorf decompositions: computing, validating, inverting, and
//! exhaustively enumerating legal index sets.
//!
//! A legal set is a strictly increasing sequence of Fibonacci indices with
//! every gap at least 2; the empty set stands for `m = 0`.

use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fib::{fib, largest_fib_leq_pair, FibIndex};

/// Exhaustive enumeration refuses to run above this index; the number of
/// legal sets is `F_{n+1}` and grows exponentially.
pub const ENUMERATE_MAX_N: FibIndex = 25;

/// When the remainder falls this many bits behind the sliding window during
/// the greedy walk, re-anchor the window with a fresh logarithmic search
/// instead of subtracting all the way down.
const REANCHOR_BIT_GAP: u64 = 64;

/// A legal Zeckendorf index set: strictly increasing, all gaps >= 2.
///
/// Construction validates legality, so a `ZeckSet` in hand is always a
/// well-formed decomposition; `{8, 13}` and friends are rejected at the
/// door.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ZeckSet {
    indices: Vec<FibIndex>,
}

impl ZeckSet {
    /// Validates and wraps an index sequence.
    pub fn new(indices: Vec<FibIndex>) -> Result<Self> {
        if is_legal(&indices) {
            Ok(ZeckSet { indices })
        } else {
            Err(Error::IllegalDecomposition(format!("{indices:?}")))
        }
    }

    /// The empty set, representing `m = 0`.
    pub fn empty() -> Self {
        ZeckSet::default()
    }

    /// Caller guarantees legality (ascending, gaps >= 2, indices >= 1).
    pub(crate) fn from_ascending_unchecked(indices: Vec<FibIndex>) -> Self {
        debug_assert!(is_legal(&indices), "unchecked ZeckSet was illegal");
        ZeckSet { indices }
    }

    pub fn indices(&self) -> &[FibIndex] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Largest index in the set, `None` when empty.
    pub fn max_index(&self) -> Option<FibIndex> {
        self.indices.last().copied()
    }

    pub fn contains(&self, i: FibIndex) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn iter(&self) -> std::iter::Copied<std::slice::Iter<'_, FibIndex>> {
        self.indices.iter().copied()
    }
}

impl fmt::Display for ZeckSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (pos, i) in self.indices.iter().enumerate() {
            if pos > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl<'a> IntoIterator for &'a ZeckSet {
    type Item = FibIndex;
    type IntoIter = std::iter::Copied<std::slice::Iter<'a, FibIndex>>;
    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

/// True iff the sequence is strictly increasing with all gaps >= 2 and
/// every index >= 1. The empty sequence is legal.
pub fn is_legal(indices: &[FibIndex]) -> bool {
    if let Some(&first) = indices.first() {
        if first < 1 {
            return false;
        }
    }
    indices.windows(2).all(|w| w[0] + 2 <= w[1])
}

/// The Zeckendorf decomposition of `m`; total on non-negative integers,
/// with `zd(0)` the empty set.
///
/// Greedy walk from the top: the largest `F_k <= m` is located once by
/// [`crate::fib::largest_fib_leq`], after which the pair `(F_i, F_{i+1})`
/// slides downward by subtraction, emitting an index whenever the current
/// Fibonacci number fits into the remainder. Memory stays `O(1)` big values
/// regardless of how large `m` is.
pub fn zd(m: &BigUint) -> ZeckSet {
    if m.is_zero() {
        return ZeckSet::empty();
    }
    let (top, f_top, f_top_next) = largest_fib_leq_pair(m);

    let mut indices = Vec::new();
    let mut rem = m.clone();
    let mut i = top;
    let mut cur = f_top; // F_i
    let mut next = f_top_next; // F_{i+1}

    loop {
        if cur <= rem {
            rem -= &cur;
            indices.push(i);
            if rem.is_zero() {
                break;
            }
            // A long slide with a tiny remainder is wasted subtraction;
            // jump straight to the next window.
            if cur.bits() > rem.bits() + REANCHOR_BIT_GAP {
                let (j, f_j, f_j_next) = largest_fib_leq_pair(&rem);
                debug_assert!(j + 2 <= i);
                i = j;
                cur = f_j;
                next = f_j_next;
                continue;
            }
        }
        if i == 1 {
            break;
        }
        // (F_{i-1}, F_i) = (F_{i+1} - F_i, F_i)
        next -= &cur;
        std::mem::swap(&mut cur, &mut next);
        i -= 1;
    }
    debug_assert!(rem.is_zero(), "greedy walk left a nonzero remainder");

    indices.reverse();
    ZeckSet::from_ascending_unchecked(indices)
}

/// The integer represented by a legal set: the sum of its Fibonacci values.
///
/// Legality is enforced by [`ZeckSet::new`], so this is total; illegal raw
/// sequences never reach it.
pub fn zd_inverse(s: &ZeckSet) -> BigUint {
    let Some(max) = s.max_index() else {
        return BigUint::zero();
    };
    // Single ascending pass; O(max) additions, O(1) stored values.
    let mut total = BigUint::zero();
    let mut cur = BigUint::from(1u32); // F_1
    let mut next = BigUint::from(2u32); // F_2
    let mut members = s.iter().peekable();
    for i in 1..=max {
        if members.peek() == Some(&i) {
            total += &cur;
            members.next();
        }
        if i < max {
            let sum = &cur + &next;
            cur = std::mem::replace(&mut next, sum);
        }
    }
    total
}

/// Streams every legal set with maximum index `<= n`, in lexicographic
/// order of the index sequences, starting with the empty set. Exactly
/// `F_{n+1}` sets are produced.
///
/// Refuses `n > ENUMERATE_MAX_N`: the output count is exponential in `n`.
pub fn enumerate_legal(n: FibIndex) -> Result<LegalSets> {
    if n < 1 {
        return Err(Error::InvalidParameter(
            "enumeration requires n >= 1".into(),
        ));
    }
    if n > ENUMERATE_MAX_N {
        return Err(Error::OracleBoundExceeded {
            what: "legal-set enumeration",
            n,
            max: ENUMERATE_MAX_N,
        });
    }
    Ok(LegalSets {
        n,
        current: Some(Vec::new()),
    })
}

/// Iterator over legal sets; see [`enumerate_legal`].
#[derive(Clone, Debug)]
pub struct LegalSets {
    n: FibIndex,
    current: Option<Vec<FibIndex>>,
}

impl Iterator for LegalSets {
    type Item = ZeckSet;

    fn next(&mut self) -> Option<ZeckSet> {
        let cur = self.current.take()?;
        let item = ZeckSet::from_ascending_unchecked(cur.clone());

        // Lexicographic successor: extend with the smallest admissible
        // index, else bump the tail, popping while no bump is possible.
        let mut next = cur;
        let extension = match next.last() {
            None => 1,
            Some(&last) => last + 2,
        };
        if extension <= self.n {
            next.push(extension);
            self.current = Some(next);
        } else {
            loop {
                match next.pop() {
                    None => break, // exhausted
                    Some(last) if last < self.n => {
                        next.push(last + 1);
                        self.current = Some(next);
                        break;
                    }
                    Some(_) => continue,
                }
            }
        }
        Some(item)
    }
}

/// The Fibonacci values of a set's indices, smallest first. Convenience
/// for display paths and tests that want the actual summands.
pub fn summand_values(s: &ZeckSet) -> Vec<BigUint> {
    s.iter().map(fib).collect()
}
