//! Scalar domains the polynomial code is generic over: exact rationals with
//! arbitrary-precision integer parts, and double-precision complex numbers.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar. `BigRational` keeps gcd(|num|, den) = 1 and den > 0
/// by construction, which is exactly the representation invariant we need.
pub type Rat = BigRational;

/// Field of coefficients for the generic polynomial routines.
///
/// Both `Rat` (exact path) and `Complex64` (numeric path) implement this.
pub trait Field:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_i64(v: i64) -> Self;

    /// Relative size used for pivot selection in elimination. Exact scalars
    /// only distinguish zero from nonzero; floats report magnitude.
    fn pivot_weight(&self) -> f64;

    /// k-th of `count` interpolation nodes. Exact path uses integers,
    /// numeric path uses unit-circle nodes for conditioning.
    fn interpolation_node(k: usize, count: usize) -> Self;
}

impl Field for Rat {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn pivot_weight(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            1.0
        }
    }

    fn interpolation_node(k: usize, _count: usize) -> Self {
        Self::from_i64(k as i64)
    }
}

impl Field for Complex64 {
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }

    fn pivot_weight(&self) -> f64 {
        self.norm()
    }

    fn interpolation_node(k: usize, count: usize) -> Self {
        let theta = 2.0 * std::f64::consts::PI * (k as f64) / (count as f64);
        Complex64::new(theta.cos(), theta.sin())
    }
}

/// Formats a rational as "p/q" with the denominator always present.
pub fn rat_to_string(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses "p/q" or a bare integer "p".
pub fn rat_from_str(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| Error::invalid(format!("bad rational numerator: {num:?}")))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| Error::invalid(format!("bad rational denominator: {den:?}")))?;
    if d.is_zero() {
        return Err(Error::invalid("rational with zero denominator"));
    }
    Ok(BigRational::new(n, d))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn rat_to_complex(r: &Rat) -> Complex64 {
    Complex64::new(rat_to_f64(r), 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_string_round_trip() {
        let r = rat_from_str("-6/4").unwrap();
        assert_eq!(rat_to_string(&r), "-3/2");
        assert_eq!(rat_to_string(&rat_from_str("5").unwrap()), "5/1");
        assert_eq!(rat_to_string(&rat_from_str("0/7").unwrap()), "0/1");
    }

    #[test]
    fn rational_rejects_zero_denominator() {
        assert!(rat_from_str("1/0").is_err());
    }
}
