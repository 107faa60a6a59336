use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

/// Exponent of the codomain norm ℓ_p^d.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PNorm {
    Finite(u32),
    Infinity,
}

impl Serialize for PNorm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PNorm::Finite(p) => s.serialize_u32(*p),
            PNorm::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for PNorm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match &v {
            serde_json::Value::Number(n) => n
                .as_u64()
                .filter(|&p| p >= 1)
                .map(|p| PNorm::Finite(p as u32))
                .ok_or_else(|| serde::de::Error::custom("p must be a positive integer")),
            serde_json::Value::String(s) => {
                s.parse().map_err(|e: Error| serde::de::Error::custom(e.to_string()))
            }
            _ => Err(serde::de::Error::custom("p must be an integer or \"inf\"")),
        }
    }
}

impl std::str::FromStr for PNorm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(PNorm::Infinity),
            other => other
                .parse::<u32>()
                .ok()
                .filter(|&p| p >= 1)
                .map(PNorm::Finite)
                .ok_or_else(|| Error::Parse(format!("bad norm exponent p={other:?}"))),
        }
    }
}

impl std::fmt::Display for PNorm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PNorm::Finite(p) => write!(f, "{p}"),
            PNorm::Infinity => write!(f, "inf"),
        }
    }
}

/// Codomain norm ℓ_p and the power `q` distances are raised to.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub p: PNorm,
    pub q: f64,
}

impl NormSpec {
    pub fn new(p: PNorm, q: f64) -> Result<Self> {
        if !(q.is_finite() && q >= 1.0) {
            return Err(Error::InvalidParams(format!("power q={q} must be a real >= 1")));
        }
        Ok(NormSpec { p, q })
    }

    /// `‖·‖_2^2`, the usual choice for X = ℝ.
    pub fn euclidean_squared() -> Self {
        NormSpec { p: PNorm::Finite(2), q: 2.0 }
    }

    pub fn integer_q(&self) -> Option<u32> {
        (self.q.fract() == 0.0 && self.q <= u32::MAX as f64).then_some(self.q as u32)
    }

    /// `‖v‖_p^q` is rational for every rational `v`: `p = ∞`, or `q` an
    /// integer multiple of a finite `p` (this covers `p = 1` and `p = 2, q` even).
    pub fn is_rational_closed(&self) -> bool {
        match (self.p, self.integer_q()) {
            (_, None) => false,
            (PNorm::Infinity, Some(_)) => true,
            (PNorm::Finite(p), Some(q)) => q % p == 0,
        }
    }

    pub(crate) fn exact_exponents(&self) -> Result<(PNorm, u32)> {
        if !self.is_rational_closed() {
            return Err(Error::NotRationalClosed(format!("p={}, q={}", self.p, self.q)));
        }
        Ok((self.p, self.integer_q().expect("checked")))
    }
}

/// Relative tolerance of float-mode comparisons.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

/// Scalar field of a [`TorusFunction`](super::TorusFunction): exact rationals or `f64`.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    const MODE: Mode;

    fn from_i64(v: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;
    fn abs_val(&self) -> Self;
    fn powi(&self, e: u32) -> Self;
    /// `self^q` for real `q ≥ 0`; exact scalars need `q` integral.
    fn pow_real(&self, q: f64) -> Result<Self>;
    /// `self ≤ other`, with relative slack [`FLOAT_TOLERANCE`] for floats.
    fn approx_le(&self, other: &Self) -> bool;
    /// `self = other`, with relative slack [`FLOAT_TOLERANCE`] for floats.
    fn approx_eq(&self, other: &Self) -> bool;

    /// `‖v‖_p^q`.
    fn norm_q_power(v: &[Self], spec: &NormSpec) -> Result<Self>;

    fn to_json(&self) -> serde_json::Value;
    fn from_json(v: &serde_json::Value) -> Result<Self>;
}

impl Scalar for Rational {
    const MODE: Mode = Mode::Exact;

    fn from_i64(v: i64) -> Self {
        rational::int(v)
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        rational::to_f64(self)
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn powi(&self, e: u32) -> Self {
        rational::pow(self, e)
    }

    fn pow_real(&self, q: f64) -> Result<Self> {
        if q < 0.0 || q.fract() != 0.0 {
            return Err(Error::NotRationalClosed(format!("exponent {q}")));
        }
        Ok(rational::pow(self, q as u32))
    }

    fn approx_le(&self, other: &Self) -> bool {
        self <= other
    }

    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }

    fn norm_q_power(v: &[Self], spec: &NormSpec) -> Result<Self> {
        if let (1, Some(q)) = (v.len(), spec.integer_q()) {
            // every p-norm on a scalar is its absolute value
            return Ok(rational::pow(&v[0].abs(), q));
        }
        let (p, q) = spec.exact_exponents()?;
        Ok(match p {
            PNorm::Infinity => {
                let max = v.iter().map(|x| x.abs()).max().unwrap_or_else(Rational::zero);
                rational::pow(&max, q)
            }
            PNorm::Finite(p) => {
                let s = v.iter().fold(Rational::zero(), |acc, x| acc + rational::pow(&x.abs(), p));
                rational::pow(&s, q / p)
            }
        })
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(rational::to_string(self))
    }

    fn from_json(v: &serde_json::Value) -> Result<Self> {
        match v {
            serde_json::Value::String(s) => rational::parse(s),
            serde_json::Value::Number(n) if n.is_i64() => Ok(rational::int(n.as_i64().unwrap())),
            other => Err(Error::Parse(format!("expected \"num/den\", got {other}"))),
        }
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_rational(r: &Rational) -> Self {
        rational::to_f64(r)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn powi(&self, e: u32) -> Self {
        f64::powi(*self, e as i32)
    }

    fn pow_real(&self, q: f64) -> Result<Self> {
        Ok(if q.fract() == 0.0 { f64::powi(*self, q as i32) } else { self.powf(q) })
    }

    fn approx_le(&self, other: &Self) -> bool {
        *self <= *other + FLOAT_TOLERANCE * other.abs().max(1.0)
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (*self - *other).abs() <= FLOAT_TOLERANCE * self.abs().max(other.abs()).max(1.0)
    }

    fn norm_q_power(v: &[Self], spec: &NormSpec) -> Result<Self> {
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Precondition("non-finite vector entry".into()));
        }
        let norm = match spec.p {
            PNorm::Infinity => v.iter().fold(0.0f64, |acc, x| acc.max(x.abs())),
            PNorm::Finite(1) => v.iter().map(|x| x.abs()).sum(),
            PNorm::Finite(p) => {
                v.iter().map(|x| x.abs().powi(p as i32)).sum::<f64>().powf(1.0 / p as f64)
            }
        };
        Ok(match spec.integer_q() {
            Some(q) => norm.powi(q as i32),
            None => norm.powf(spec.q),
        })
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }

    fn from_json(v: &serde_json::Value) -> Result<Self> {
        match v {
            serde_json::Value::Number(n) => n.as_f64().ok_or_else(|| Error::Parse(n.to_string())),
            serde_json::Value::String(s) => Ok(rational::to_f64(&rational::parse(s)?)),
            other => Err(Error::Parse(format!("expected a number, got {other}"))),
        }
    }
}

/// `‖v‖_p` in floating point, used where the unpowered norm is irrational.
pub fn norm_f64(v: &[f64], p: PNorm) -> f64 {
    match p {
        PNorm::Infinity => v.iter().fold(0.0f64, |acc, x| acc.max(x.abs())),
        PNorm::Finite(p) => v.iter().map(|x| x.abs().powi(p as i32)).sum::<f64>().powf(1.0 / p as f64),
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn spec(p: PNorm, q: f64) -> NormSpec {
        NormSpec::new(p, q).unwrap()
    }

    #[test]
    fn norm_examples() {
        let v = [int(3), int(4)];
        assert_eq!(Rational::norm_q_power(&v, &spec(PNorm::Finite(2), 2.0)).unwrap(), int(25));
        let w = [int(1), int(-2)];
        assert_eq!(Rational::norm_q_power(&w, &spec(PNorm::Finite(1), 3.0)).unwrap(), int(27));
        assert_eq!(Rational::norm_q_power(&w, &spec(PNorm::Infinity, 2.0)).unwrap(), int(4));
        assert_eq!(f64::norm_q_power(&[3.0, 4.0], &spec(PNorm::Finite(2), 3.0)).unwrap(), 125.0);
    }

    #[test]
    fn exact_mode_rejects_irrational_norms() {
        let v = [int(1), int(1)];
        let err = Rational::norm_q_power(&v, &spec(PNorm::Finite(2), 3.0)).unwrap_err();
        assert!(matches!(err, Error::NotRationalClosed(_)));
        assert!(Rational::norm_q_power(&v, &spec(PNorm::Finite(2), 2.5)).is_err());
        assert!(spec(PNorm::Finite(3), 6.0).is_rational_closed());
        assert!(NormSpec::new(PNorm::Finite(2), 0.5).is_err());
        assert_eq!(Rational::norm_q_power(&[int(-2)], &spec(PNorm::Finite(2), 3.0)).unwrap(), int(8));
    }

    #[test]
    fn pnorm_parsing() {
        assert_eq!("inf".parse::<PNorm>().unwrap(), PNorm::Infinity);
        assert_eq!("3".parse::<PNorm>().unwrap(), PNorm::Finite(3));
        assert!("0".parse::<PNorm>().is_err());
        let j = serde_json::to_string(&spec(PNorm::Infinity, 2.0)).unwrap();
        let back: NormSpec = serde_json::from_str(&j).unwrap();
        assert_eq!(back.p, PNorm::Infinity);
    }
}
