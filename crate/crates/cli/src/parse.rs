//! Flag-value grammars: probability specs and set specs.

use anyhow::{bail, Context, Result};
use zeckford::{
    make_digit_block_set, make_value_residue_set, AllFib, DensitySet, DigitBlock, ExactScalar,
};

/// Longest digit block the membership fast path supports.
const BLOCK_LEN_MAX: usize = 8;

/// Parses a probability spec: an exact rational `a/b` with `0 < a < b`,
/// or the literal `phi^-2` (the golden probability, exact in `Q(sqrt 5)`).
pub fn parse_p(spec: &str) -> Result<ExactScalar> {
    if spec == "phi^-2" {
        return Ok(ExactScalar::phi_inv_sq());
    }
    let (a, b) = spec
        .split_once('/')
        .with_context(|| format!("probability `{spec}` is neither `a/b` nor `phi^-2`"))?;
    let a: i64 = a
        .parse()
        .with_context(|| format!("numerator `{a}` is not an integer"))?;
    let b: i64 = b
        .parse()
        .with_context(|| format!("denominator `{b}` is not an integer"))?;
    if !(0 < a && a < b) {
        bail!("probability {a}/{b} must satisfy 0 < a/b < 1");
    }
    Ok(ExactScalar::from_ratio(a, b))
}

/// Parses a set spec into a membership predicate over Fibonacci indices:
///
/// - `all` — the whole sequence (density 1)
/// - `digit:D` — leading digit `D` in `base`
/// - `block:D.DD` — leading digit block (digits after the dot, comma
///   separated above base 10), at most 8 digits
/// - `mod:M,R` — values congruent to `R` mod `M`
pub fn parse_set(spec: &str, base: u32) -> Result<Box<dyn DensitySet>> {
    if spec == "all" {
        return Ok(Box::new(AllFib));
    }
    if let Some(d) = spec.strip_prefix("digit:") {
        let d: u32 = d.parse().with_context(|| format!("`{d}` is not a digit"))?;
        let block = DigitBlock::new(base, vec![d])?;
        return Ok(Box::new(make_digit_block_set(block)));
    }
    if let Some(body) = spec.strip_prefix("block:") {
        let digits = parse_block_digits(body, base)?;
        if digits.len() > BLOCK_LEN_MAX {
            bail!("digit blocks support at most {BLOCK_LEN_MAX} digits");
        }
        let block = DigitBlock::new(base, digits)?;
        return Ok(Box::new(make_digit_block_set(block)));
    }
    if let Some(body) = spec.strip_prefix("mod:") {
        let (m, r) = body
            .split_once(',')
            .with_context(|| format!("`mod:{body}` needs the form mod:M,R"))?;
        let m: u64 = m
            .parse()
            .with_context(|| format!("modulus `{m}` is not an integer"))?;
        let r: u64 = r
            .parse()
            .with_context(|| format!("residue `{r}` is not an integer"))?;
        return Ok(Box::new(make_value_residue_set(m, r)?));
    }
    bail!("unknown set `{spec}`; expected all, digit:D, block:D.DD, or mod:M,R");
}

/// `1.05` → `[1, 0, 5]`; above base 10 the digits after the dot are comma
/// separated (`12.0,11` → `[12, 0, 11]`).
fn parse_block_digits(body: &str, base: u32) -> Result<Vec<u32>> {
    let (head, tail) = match body.split_once('.') {
        Some((head, tail)) => (head, Some(tail)),
        None => (body, None),
    };
    let mut digits = vec![head
        .parse()
        .with_context(|| format!("leading digit `{head}` is not an integer"))?];
    if let Some(tail) = tail {
        if base <= 10 {
            for c in tail.chars() {
                digits.push(
                    c.to_digit(10)
                        .with_context(|| format!("`{c}` is not a digit"))?,
                );
            }
        } else {
            for part in tail.split(',') {
                digits.push(
                    part.parse()
                        .with_context(|| format!("digit `{part}` is not an integer"))?,
                );
            }
        }
    }
    Ok(digits)
}
