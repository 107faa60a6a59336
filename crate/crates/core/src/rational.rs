//! Exact rational helpers on top of `num-rational`.
//!
//! Rationals travel through reports and files as `"num/den"` strings; the
//! denominator is always written, even when it is 1.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn big(v: &BigInt) -> Rational {
    Rational::from_integer(v.clone())
}

/// Formats as `num/den` in lowest terms with a positive denominator.
pub fn to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `num/den` or a bare integer.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    // Direct conversion loses nothing for the magnitudes we produce, but very
    // large numerators and denominators overflow f64 individually.
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            let shift = r.denom().bits().max(r.numer().bits()).saturating_sub(1000);
            let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

pub fn pow(base: &Rational, exp: u32) -> Rational {
    num_traits::pow(base.clone(), exp as usize)
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i);
        acc = acc.div_floor(&BigInt::from(i + 1));
    }
    acc
}

/// Small binomial coefficient as `i64`; callers stay well below overflow.
pub fn binomial_i64(n: i64, k: i64) -> i64 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1i64, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_strings() {
        assert_eq!(to_string(&frac(2, 6)), "1/3");
        assert_eq!(to_string(&int(-4)), "-4/1");
        assert_eq!(parse("-4/1").unwrap(), int(-4));
        assert_eq!(parse("7").unwrap(), int(7));
        assert_eq!(parse(" 3/-6 ").unwrap(), frac(-1, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(binomial_i64(6, 3), 20);
        assert_eq!(binomial_i64(2, -1), 0);
        assert_eq!(factorial(5), BigInt::from(120));
    }

    #[test]
    fn huge_to_f64() {
        let r = Rational::new((BigInt::one() << 2000u32) + 1, BigInt::one() << 2001u32);
        assert!((to_f64(&r) - 0.5).abs() < 1e-12);
    }
}
