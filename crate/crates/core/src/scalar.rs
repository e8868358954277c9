//! Exact arithmetic in the quadratic field Q(sqrt 5).
//!
//! Elements are stored as `a + b*sqrt5` with rational `a`, `b`, which makes
//! the golden mean `phi = (1 + sqrt5)/2` and the process probability
//! `phi^-2 = (3 - sqrt5)/2` exactly representable. All identities the
//! library verifies at `p = phi^-2` are checked with zero rounding error in
//! this type; floating point only appears when a value is exported for
//! display or sampling.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An element `a + b*sqrt5` of Q(sqrt 5) with exact rational coordinates.
///
/// The representation is canonical (sqrt5 is irrational), so derived
/// equality is exact mathematical equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    a: BigRational,
    b: BigRational,
}

impl ExactScalar {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        ExactScalar { a, b }
    }

    /// Rational part (coefficient of 1).
    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    /// Coefficient of sqrt5.
    pub fn sqrt5_part(&self) -> &BigRational {
        &self.b
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn from_integer(n: i64) -> Self {
        ExactScalar {
            a: BigRational::from_integer(n.into()),
            b: BigRational::zero(),
        }
    }

    pub fn from_biguint(n: &BigUint) -> Self {
        ExactScalar {
            a: BigRational::from_integer(BigInt::from(n.clone())),
            b: BigRational::zero(),
        }
    }

    pub fn from_rational(r: BigRational) -> Self {
        ExactScalar {
            a: r,
            b: BigRational::zero(),
        }
    }

    /// `num/den` as an exact rational element.
    ///
    /// # Panics
    /// Panics if `den == 0`.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(num.into(), den.into()))
    }

    pub fn sqrt5() -> Self {
        ExactScalar {
            a: BigRational::zero(),
            b: BigRational::one(),
        }
    }

    /// The golden mean `phi = (1 + sqrt5)/2`.
    pub fn phi() -> Self {
        ExactScalar {
            a: BigRational::new(1.into(), 2.into()),
            b: BigRational::new(1.into(), 2.into()),
        }
    }

    /// `phi^-1 = (sqrt5 - 1)/2`.
    pub fn phi_inv() -> Self {
        ExactScalar {
            a: BigRational::new((-1).into(), 2.into()),
            b: BigRational::new(1.into(), 2.into()),
        }
    }

    /// `phi^-2 = (3 - sqrt5)/2`, the probability that makes the random
    /// decomposition process near-uniform.
    pub fn phi_inv_sq() -> Self {
        ExactScalar {
            a: BigRational::new(3.into(), 2.into()),
            b: BigRational::new((-1).into(), 2.into()),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Galois conjugate `a - b*sqrt5`.
    pub fn conjugate(&self) -> Self {
        ExactScalar {
            a: self.a.clone(),
            b: -self.b.clone(),
        }
    }

    /// Field norm `a^2 - 5 b^2`, a rational; zero only for the zero element.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - BigRational::from_integer(5.into()) * &self.b * &self.b
    }

    /// Multiplicative inverse.
    ///
    /// # Panics
    /// Panics on the zero element.
    pub fn inv(&self) -> Self {
        let n = self.norm();
        assert!(!n.is_zero(), "cannot invert zero in Q(sqrt 5)");
        let conj = self.conjugate();
        ExactScalar {
            a: conj.a / n.clone(),
            b: conj.b / n,
        }
    }

    /// `self^exp` by square-and-multiply; negative exponents invert first.
    pub fn pow(&self, exp: i64) -> Self {
        let base = if exp < 0 { self.inv() } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = Self::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        acc
    }

    /// Exact sign of the real value.
    pub fn sign(&self) -> Ordering {
        match (self.a.is_zero(), self.b.is_zero()) {
            (true, true) => Ordering::Equal,
            (false, true) => rational_sign(&self.a),
            (true, false) => rational_sign(&self.b),
            (false, false) => {
                let a_pos = self.a.is_positive();
                let b_pos = self.b.is_positive();
                if a_pos && b_pos {
                    Ordering::Greater
                } else if !a_pos && !b_pos {
                    Ordering::Less
                } else {
                    // mixed signs: compare a^2 against 5 b^2
                    let a2 = &self.a * &self.a;
                    let b2_5 = BigRational::from_integer(5.into()) * &self.b * &self.b;
                    match a2.cmp(&b2_5) {
                        Ordering::Equal => Ordering::Equal, // unreachable: sqrt5 irrational
                        Ordering::Greater => rational_sign(&self.a),
                        Ordering::Less => rational_sign(&self.b),
                    }
                }
            }
        }
    }

    /// Exact comparison of two field elements as real numbers.
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        (self - other).sign()
    }

    /// `floor(value * 2^bits)`, computed exactly.
    ///
    /// The irrational part is bracketed by integer square roots at
    /// increasing precision until the floor is unambiguous; for rational
    /// elements a single exact division suffices.
    pub fn floor_scaled(&self, bits: u32) -> BigInt {
        let scale = BigRational::from_integer(BigInt::one() << bits);
        if self.b.is_zero() {
            return (&self.a * scale).floor().to_integer();
        }
        let mut guard: u32 = 192;
        loop {
            let s5_lo = sqrt5_floor_fixed(guard);
            let s5_hi = &s5_lo + BigInt::one();
            let denom = BigRational::from_integer(BigInt::one() << guard);
            let term_lo = &self.b * BigRational::from_integer(s5_lo) / &denom;
            let term_hi = &self.b * BigRational::from_integer(s5_hi) / &denom;
            let (lo_term, hi_term) = if self.b.is_positive() {
                (term_lo, term_hi)
            } else {
                (term_hi, term_lo)
            };
            let lo = ((&self.a + lo_term) * &scale).floor().to_integer();
            let hi = ((&self.a + hi_term) * &scale).floor().to_integer();
            if lo == hi {
                return lo;
            }
            guard = guard.checked_mul(2).expect("sqrt5 bracketing diverged");
        }
    }

    /// Approximate real value; exact floor at 80 fractional bits, then one
    /// f64 rounding.
    pub fn to_f64(&self) -> f64 {
        const BITS: u32 = 80;
        let scaled = self.floor_scaled(BITS);
        scaled.to_f64().unwrap_or(f64::NAN) / (BITS as f64).exp2()
    }
}

fn rational_sign(r: &BigRational) -> Ordering {
    if r.is_positive() {
        Ordering::Greater
    } else if r.is_negative() {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

/// `floor(sqrt5 * 2^frac_bits)` as a big integer.
fn sqrt5_floor_fixed(frac_bits: u32) -> BigInt {
    let shifted = BigUint::from(5u32) << (2 * frac_bits);
    BigInt::from(shifted.sqrt())
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        if self.a.is_zero() {
            return write!(f, "{}*sqrt5", self.b);
        }
        if self.b.is_negative() {
            write!(f, "{} - {}*sqrt5", self.a, -self.b.clone())
        } else {
            write!(f, "{} + {}*sqrt5", self.a, self.b)
        }
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar {
            a: -self.a.clone(),
            b: -self.b.clone(),
        }
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -&self
    }
}

impl Add for &ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar {
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
        }
    }
}

impl Sub for &ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar {
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
        }
    }
}

impl Mul for &ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &ExactScalar) -> ExactScalar {
        // (a1 + b1 s)(a2 + b2 s) = a1 a2 + 5 b1 b2 + (a1 b2 + a2 b1) s
        let five = BigRational::from_integer(5.into());
        ExactScalar {
            a: &self.a * &rhs.a + five * &self.b * &rhs.b,
            b: &self.a * &rhs.b + &rhs.a * &self.b,
        }
    }
}

impl Div for &ExactScalar {
    type Output = ExactScalar;
    // division in a field is multiplication by the inverse
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &ExactScalar) -> ExactScalar {
        self * &rhs.inv()
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &ExactScalar) -> ExactScalar {
                (&self).$method(rhs)
            }
        }
        impl $trait<ExactScalar> for &ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);
forward_owned_binop!(Div, div);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_satisfies_its_minimal_polynomial() {
        let phi = ExactScalar::phi();
        let lhs = &phi * &phi;
        let rhs = &phi + &ExactScalar::one();
        assert_eq!(lhs, rhs); // phi^2 = phi + 1
    }

    #[test]
    fn phi_inverse_identities() {
        let phi = ExactScalar::phi();
        assert_eq!(&phi * &ExactScalar::phi_inv(), ExactScalar::one());
        assert_eq!(phi.pow(-2), ExactScalar::phi_inv_sq());
        // 1 - phi^-2 = phi^-1
        let lhs = &ExactScalar::one() - &ExactScalar::phi_inv_sq();
        assert_eq!(lhs, ExactScalar::phi_inv());
    }

    #[test]
    fn pow_and_inv_agree() {
        let x = ExactScalar::new(
            BigRational::new(3.into(), 7.into()),
            BigRational::new(2.into(), 5.into()),
        );
        assert_eq!(x.pow(-3), x.pow(3).inv());
        assert_eq!(x.pow(0), ExactScalar::one());
        assert_eq!(&x.pow(4) * &x.pow(-4), ExactScalar::one());
    }

    #[test]
    fn sign_handles_mixed_coefficients() {
        // 3 - sqrt5 > 0, 2 - sqrt5 < 0
        let pos = ExactScalar::new(
            BigRational::from_integer(3.into()),
            BigRational::from_integer((-1).into()),
        );
        let neg = ExactScalar::new(
            BigRational::from_integer(2.into()),
            BigRational::from_integer((-1).into()),
        );
        assert_eq!(pos.sign(), Ordering::Greater);
        assert_eq!(neg.sign(), Ordering::Less);
        assert_eq!(ExactScalar::zero().sign(), Ordering::Equal);
        assert_eq!(
            ExactScalar::phi_inv_sq().cmp_value(&ExactScalar::one()),
            Ordering::Less
        );
    }

    #[test]
    fn floor_scaled_exact_for_rationals() {
        let half = ExactScalar::from_ratio(1, 2);
        assert_eq!(half.floor_scaled(4), BigInt::from(8));
        let third = ExactScalar::from_ratio(-1, 3);
        assert_eq!(third.floor_scaled(2), BigInt::from(-2)); // floor(-4/3)
    }

    #[test]
    fn floor_scaled_brackets_sqrt5() {
        // sqrt5 * 2^10 = 2289.73...
        assert_eq!(ExactScalar::sqrt5().floor_scaled(10), BigInt::from(2289));
    }

    #[test]
    fn to_f64_of_phi() {
        let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
        assert!((ExactScalar::phi().to_f64() - phi).abs() < 1e-12);
        assert!((ExactScalar::phi_inv_sq().to_f64() - phi.powi(-2)).abs() < 1e-12);
    }
}
