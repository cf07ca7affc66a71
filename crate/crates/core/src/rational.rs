//! Exact rational arithmetic.
//!
//! Values are [`num_rational::BigRational`]: arbitrary-precision, always in
//! lowest terms with positive denominator. This module adds the canonical
//! string form used everywhere in serialized output: `"p"` when the
//! denominator is one, `"p/q"` otherwise.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::Result;

pub type Rational = BigRational;

/// Rational from an integer numerator.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational `p/q`. Panics on `q == 0` (test/construction convenience).
pub fn rat(p: i64, q: i64) -> Rational {
    assert!(q != 0, "zero denominator");
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Canonical display form: `"p"` or `"p/q"`, lowest terms, `q > 0`.
pub fn rat_to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p"` or `"p/q"`.
pub fn rat_from_string(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p, Some(q)),
        None => (s, None),
    };
    let p: BigInt = num
        .trim()
        .parse()
        .map_err(|_| Error::InvalidInput(format!("bad rational numerator: {s:?}")))?;
    let q: BigInt = match den {
        Some(q) => q
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad rational denominator: {s:?}")))?,
        None => BigInt::one(),
    };
    if q.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(Rational::new(p, q))
}

/// `base^exp` for a possibly negative exponent; errors on `0^negative`.
pub fn rat_pow(base: &Rational, exp: i64) -> Result<Rational> {
    if base.is_zero() && exp < 0 {
        return Err(Error::DivisionByZero);
    }
    if exp >= 0 {
        Ok(base.pow(exp as u32 as i32))
    } else {
        Ok(base.pow(exp as i32))
    }
}

/// True when a rational is a nonnegative value.
pub fn rat_is_nonnegative(r: &Rational) -> bool {
    !r.is_negative()
}
