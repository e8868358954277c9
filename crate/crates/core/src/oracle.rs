//! Independent reference implementations used only to test the main code
//! paths against.
//!
//! Nothing here shares an algorithm with what it checks: legality is
//! re-derived from bitmasks over an additive Fibonacci table, process
//! probabilities come from exhaustively unrolling the decision tree, and
//! the golden-mean identities are evaluated directly in the exact field.
//! Everything is bounded to small `n` — an oracle that needs the fast path
//! could not vouch for it.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fib::{fib, FibIndex};
use crate::scalar::ExactScalar;
use crate::zeckendorf::{zd, zd_inverse, ZeckSet};

/// Hard ceiling for tree and bitmask enumeration; `F_21 = 17711` outcomes.
pub const ORACLE_MAX_N: FibIndex = 20;
/// Hard ceiling for the exact golden-mean identity sweep.
pub const PHI_IDENTITY_MAX_N: FibIndex = 200;

/// Exact law of the process at horizon `n`: every reachable summand set
/// with its probability.
#[derive(Clone, Debug)]
pub struct OutcomeTable {
    outcomes: BTreeMap<ZeckSet, ExactScalar>,
}

impl OutcomeTable {
    pub fn get(&self, s: &ZeckSet) -> Option<&ExactScalar> {
        self.outcomes.get(s)
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ZeckSet, &ExactScalar)> {
        self.outcomes.iter()
    }

    /// Exact total probability mass; 1 for any correct table.
    pub fn total_mass(&self) -> ExactScalar {
        self.outcomes
            .values()
            .fold(ExactScalar::zero(), |acc, w| &acc + w)
    }

    /// Exact marginal probability that index `k` is taken.
    pub fn marginal(&self, k: FibIndex) -> ExactScalar {
        self.outcomes
            .iter()
            .filter(|(s, _)| s.contains(k))
            .fold(ExactScalar::zero(), |acc, (_, w)| &acc + w)
    }
}

/// Unrolls the process tree exhaustively: at each free index either branch
/// is taken with exact weight `p` / `1-p`, an index after a take is
/// skipped with weight 1.
pub fn enumerate_process_tree(n: FibIndex, p: &ExactScalar) -> Result<OutcomeTable> {
    if n > ORACLE_MAX_N {
        return Err(Error::OracleBoundExceeded {
            what: "process tree enumeration",
            n,
            max: ORACLE_MAX_N,
        });
    }
    let q = &ExactScalar::one() - p;
    let mut outcomes = BTreeMap::new();
    let mut indices: Vec<FibIndex> = Vec::new();
    walk_tree(1, n, p, &q, ExactScalar::one(), &mut indices, &mut outcomes);
    Ok(OutcomeTable { outcomes })
}

fn walk_tree(
    k: FibIndex,
    n: FibIndex,
    p: &ExactScalar,
    q: &ExactScalar,
    weight: ExactScalar,
    indices: &mut Vec<FibIndex>,
    out: &mut BTreeMap<ZeckSet, ExactScalar>,
) {
    if k > n {
        let set = ZeckSet::new(indices.clone()).expect("tree paths only build legal sets");
        let entry = out.entry(set).or_insert_with(ExactScalar::zero);
        *entry = &*entry + &weight;
        return;
    }
    // skip branch
    walk_tree(k + 1, n, p, q, &weight * q, indices, out);
    // take branch: k+1 is blocked afterwards, jump straight to k+2
    indices.push(k);
    walk_tree(k + 2, n, p, q, &weight * p, indices, out);
    indices.pop();
}

/// Machine-checkable outcome of one verification sweep.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    /// What was verified.
    pub name: String,
    /// Number of individual equalities checked.
    pub checks: u64,
    pub pass: bool,
    /// First failing case, if any.
    pub counterexample: Option<String>,
}

impl VerificationReport {
    fn passing(name: &str, checks: u64) -> Self {
        VerificationReport {
            name: name.into(),
            checks,
            pass: true,
            counterexample: None,
        }
    }

    fn failing(name: &str, checks: u64, witness: String) -> Self {
        VerificationReport {
            name: name.into(),
            checks,
            pass: false,
            counterexample: Some(witness),
        }
    }
}

/// Checks, by exhaustive bitmask enumeration independent of the library's
/// decomposition routines, that legal index sets with maximum index at
/// most `n` decode bijectively onto `[0, F_{n+1})` and that `zd` inverts
/// the decoding.
pub fn brute_force_zeckendorf(n: FibIndex) -> Result<VerificationReport> {
    if n > ORACLE_MAX_N {
        return Err(Error::OracleBoundExceeded {
            what: "bitmask decomposition check",
            n,
            max: ORACLE_MAX_N,
        });
    }
    // own additive table: table[i] = F_i, i = 1..=n; u64 is ample below F_21
    let mut table = vec![0u64; n as usize + 1];
    for i in 1..=n as usize {
        table[i] = match i {
            1 => 1,
            2 => 2,
            _ => table[i - 1] + table[i - 2],
        };
    }
    let bound = if n >= 2 {
        table[n as usize] + table[n as usize - 1]
    } else {
        2 // F_2
    };
    let name = format!("zeckendorf bijection, n={n}");
    let mut seen = vec![false; bound as usize];
    let mut checks = 0u64;
    for mask in 0u32..(1 << n) {
        if mask & (mask << 1) != 0 {
            continue; // adjacent indices
        }
        let indices: Vec<FibIndex> = (0..n)
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| b + 1)
            .collect();
        let value: u64 = indices.iter().map(|&i| table[i as usize]).sum();
        checks += 1;
        if value >= bound {
            return Ok(VerificationReport::failing(
                &name,
                checks,
                format!("mask {mask:b} decodes to {value}, beyond {bound}"),
            ));
        }
        if seen[value as usize] {
            return Ok(VerificationReport::failing(
                &name,
                checks,
                format!("value {value} reached by two legal sets"),
            ));
        }
        seen[value as usize] = true;
        let set = ZeckSet::new(indices.clone()).expect("non-adjacent mask is legal");
        if zd_inverse(&set) != BigUint::from(value) {
            return Ok(VerificationReport::failing(
                &name,
                checks,
                format!("zd_inverse({set}) != {value}"),
            ));
        }
        if zd(&BigUint::from(value)).indices() != indices {
            return Ok(VerificationReport::failing(
                &name,
                checks,
                format!("zd({value}) != {set}"),
            ));
        }
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Ok(VerificationReport::failing(
            &name,
            checks,
            format!("no legal set decodes to {missing}"),
        ));
    }
    Ok(VerificationReport::passing(&name, checks))
}

/// Exact golden-mean identities underpinning the near-uniform law:
/// `F_n·phi^-n + (F_{n+1}-F_n)·phi^-(n+1) = 1`, `p^k (1-p)^{-2k} = 1` at
/// `p = phi^-2`, and `1 - phi^-2 = phi^-1`.
pub fn verify_phi_identities(n_max: FibIndex) -> Result<VerificationReport> {
    if n_max > PHI_IDENTITY_MAX_N {
        return Err(Error::OracleBoundExceeded {
            what: "golden-mean identity sweep",
            n: n_max,
            max: PHI_IDENTITY_MAX_N,
        });
    }
    let name = format!("golden-mean identities, n ≤ {n_max}");
    let one = ExactScalar::one();
    let phi = ExactScalar::phi();
    let p = ExactScalar::phi_inv_sq();
    let q = &one - &p;
    let mut checks = 0u64;

    checks += 1;
    if q != ExactScalar::phi_inv() {
        return Ok(VerificationReport::failing(
            &name,
            checks,
            format!("1 - phi^-2 = {q}, not phi^-1"),
        ));
    }
    for n in 1..=n_max {
        let f_n = ExactScalar::from_biguint(&fib(n));
        let f_next = ExactScalar::from_biguint(&fib(n + 1));
        let mass =
            &(&f_n * &phi.pow(-(n as i64))) + &(&(&f_next - &f_n) * &phi.pow(-(n as i64 + 1)));
        checks += 1;
        if mass != one {
            return Ok(VerificationReport::failing(
                &name,
                checks,
                format!("normalization fails at n={n}: {mass}"),
            ));
        }
        let k = n as i64;
        let unit = &p.pow(k) * &q.pow(-2 * k);
        checks += 1;
        if unit != one {
            return Ok(VerificationReport::failing(
                &name,
                checks,
                format!("p^k(1-p)^-2k fails at k={k}: {unit}"),
            ));
        }
    }
    Ok(VerificationReport::passing(&name, checks))
}
