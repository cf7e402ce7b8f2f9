//! Exact rationals and their string form.
//!
//! Interchange formats never carry floating point: a rational is written as
//! `"num/den"` or as a bare integer `"int"`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always in lowest terms with a positive denominator.
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRatError(pub String);

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `"-49/10"`, `"7"` or `"+3/4"`. The Unicode minus sign is accepted.
pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let err = || ParseRatError(s.to_string());
    let t = s.trim().replace('\u{2212}', "-");
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t.as_str(), "1"),
    };
    let num = num.strip_prefix('+').unwrap_or(num);
    if num.is_empty() || den.is_empty() || den.starts_with(['-', '+']) {
        return Err(err());
    }
    let n: BigInt = num.parse().map_err(|_| err())?;
    let d: BigInt = den.parse().map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    Ok(Rat::new(n, d))
}

/// Canonical string form, inverse of [`parse_rat`].
pub fn format_rat(q: &Rat) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn sign(q: &Rat) -> Ordering {
    q.cmp(&Rat::zero())
}

/// Nearest double; exact for values that fit and graceful for huge numerators.
pub fn to_f64(q: &Rat) -> f64 {
    if let Some(v) = q.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let (n, d) = (q.numer(), q.denom());
    let shift = n.bits() as i64 - d.bits() as i64;
    let scaled = if shift > 0 {
        Rat::new(n.clone(), d << shift as usize)
    } else {
        Rat::new(n << (-shift) as usize, d.clone())
    };
    scaled.to_f64().unwrap_or(0.0) * 2f64.powi(shift as i32)
}

/// Closest dyadic rational to `x` with 2^-bits resolution.
pub fn from_f64_dyadic(x: f64, bits: u32) -> Rat {
    let scale = 2f64.powi(bits as i32);
    let n = (x * scale).round();
    Rat::new(BigInt::from(n as i128), BigInt::one() << bits as usize)
}

pub fn abs(q: &Rat) -> Rat {
    q.abs()
}

/// Serde adapter writing a [`Rat`] as its canonical string.
pub mod rat_serde {
    use super::{format_rat, parse_rat, Rat};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_and_integer() {
        assert_eq!(parse_rat("-49/10").unwrap(), rat(-49, 10));
        assert_eq!(parse_rat("\u{2212}49/10").unwrap(), rat(-49, 10));
        assert_eq!(parse_rat("6/4").unwrap(), rat(3, 2));
        assert_eq!(parse_rat(" 7 ").unwrap(), int(7));
        assert_eq!(parse_rat("+3/4").unwrap(), rat(3, 4));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "1/0", "1.5", "a", "1/-2", "/3", "3/"] {
            assert!(parse_rat(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn format_round_trips() {
        for q in [rat(-79, 16), int(0), int(-3), rat(46, 75)] {
            assert_eq!(parse_rat(&format_rat(&q)).unwrap(), q);
        }
        assert_eq!(format_rat(&rat(8, 4)), "2");
    }

    #[test]
    fn to_f64_handles_huge_parts() {
        let big = Rat::new(BigInt::from(3) << 2000usize, BigInt::from(2) << 2000usize);
        assert!((to_f64(&big) - 1.5).abs() < 1e-15);
    }
}
