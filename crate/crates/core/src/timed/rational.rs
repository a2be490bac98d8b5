//! Exact time values.
//!
//! Delays and clock values are arbitrary-precision rationals so that the
//! repeated halving done by the guard searches never loses integrality
//! information.

use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// A nonnegative (by convention) exact time value.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRationalError(pub String);

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn half() -> Rational {
    ratio(1, 2)
}

pub fn is_integer(t: &Rational) -> bool {
    t.is_integer()
}

/// Integral part, for nonnegative values.
pub fn floor(t: &Rational) -> Rational {
    t.floor()
}

pub fn frac(t: &Rational) -> Rational {
    t - t.floor()
}

/// Integral part as a machine integer, saturating at `u32::MAX`.
pub fn floor_u32(t: &Rational) -> u32 {
    t.floor().to_integer().to_u32().unwrap_or(u32::MAX)
}

/// Parses `3`, `1.25`, `.5` or `7/3`.
pub fn parse(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let s = s.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| err())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(err());
    }
    if !ip.chars().all(|c| c.is_ascii_digit()) || !fp.chars().all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{ip}{fp}");
    let num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| err())?;
    let den = num::pow(BigInt::from(10), fp.len());
    let r = Rational::new(num, den);
    Ok(if neg { -r } else { r })
}

/// Renders a rational as a terminating decimal when possible and as `p/q`
/// otherwise.
pub fn format(t: &Rational) -> String {
    if t.is_integer() {
        return t.to_integer().to_string();
    }
    let mut den = t.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return format!("{}/{}", t.numer(), t.denom());
    }
    let places = twos.max(fives);
    let scaled = (t * Rational::from_integer(num::pow(BigInt::from(10), places))).to_integer();
    let neg = scaled.is_negative();
    let digits = scaled.abs().to_string();
    let digits = format!("{:0>width$}", digits, width = places + 1);
    let (ip, fp) = digits.split_at(digits.len() - places);
    format!("{}{}.{}", if neg { "-" } else { "" }, ip, fp)
}

/// Display adapter for a rational in the textual word syntax.
pub struct Decimal<'a>(pub &'a Rational);

impl fmt::Display for Decimal<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format(self.0))
    }
}
