use rand::Rng;
use serde_json::{json, Value};

use super::{Domain, Mode, NormSpec, Permutation, Scalar, Torus};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// A function ℤ_m^n → ℝ^d stored densely in row-major point order.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusFunction<T> {
    torus: Torus,
    d: usize,
    values: Vec<T>,
}

impl<T: Scalar> TorusFunction<T> {
    /// `values` holds `m^n` consecutive blocks of `d` entries.
    pub fn new(torus: Torus, d: usize, values: Vec<T>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParams("codomain dimension d must be at least 1".into()));
        }
        if values.len() != torus.size() * d {
            return Err(Error::DimensionMismatch { expected: torus.size() * d, got: values.len() });
        }
        if T::MODE == Mode::Float && values.iter().any(|v| !v.to_f64().is_finite()) {
            return Err(Error::InvalidParams("function values must be finite".into()));
        }
        Ok(TorusFunction { torus, d, values })
    }

    pub fn from_fn(torus: Torus, d: usize, mut f: impl FnMut(&[i64]) -> Vec<T>) -> Result<Self> {
        let mut values = Vec::with_capacity(torus.size() * d);
        let mut coords = vec![0; torus.n()];
        for i in 0..torus.size() {
            torus.write_coords(i, &mut coords);
            let v = f(&coords);
            if v.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: v.len() });
            }
            values.extend(v);
        }
        TorusFunction::new(torus, d, values)
    }

    /// Real-valued function.
    pub fn scalar(torus: Torus, mut f: impl FnMut(&[i64]) -> T) -> Self {
        TorusFunction::from_fn(torus, 1, |x| vec![f(x)]).expect("shape is consistent")
    }

    /// Integer values drawn uniformly from `[-radius, radius]`, point by point
    /// in index order.
    pub fn random<R: Rng + ?Sized>(torus: Torus, d: usize, radius: i64, rng: &mut R) -> Result<Self> {
        if radius < 0 {
            return Err(Error::InvalidParams(format!("radius {radius} is negative")));
        }
        let values = (0..torus.size() * d).map(|_| T::from_i64(rng.gen_range(-radius..=radius))).collect();
        TorusFunction::new(torus, d, values)
    }

    pub fn constant(torus: Torus, value: &[T]) -> Self {
        let values = (0..torus.size()).flat_map(|_| value.iter().cloned()).collect();
        TorusFunction { torus, d: value.len(), values }
    }

    pub fn torus(&self) -> Torus {
        self.torus
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Value at the point with row-major index `idx`.
    pub fn at(&self, idx: usize) -> &[T] {
        &self.values[idx * self.d..(idx + 1) * self.d]
    }

    pub fn at_coords(&self, coords: &[i64]) -> &[T] {
        self.at(self.torus.index(coords))
    }

    /// `f(x) - f(y)` by indices.
    pub fn diff(&self, x: usize, y: usize) -> Vec<T> {
        self.at(x).iter().zip(self.at(y)).map(|(a, b)| a.clone() - b.clone()).collect()
    }

    /// Pointwise `f - g`.
    pub fn sub(&self, other: &TorusFunction<T>) -> Result<Self> {
        self.same_shape(other)?;
        let values =
            self.values.iter().zip(&other.values).map(|(a, b)| a.clone() - b.clone()).collect();
        Ok(TorusFunction { torus: self.torus, d: self.d, values })
    }

    pub fn scale(&self, lambda: &T) -> Self {
        let values = self.values.iter().map(|v| v.clone() * lambda.clone()).collect();
        TorusFunction { torus: self.torus, d: self.d, values }
    }

    pub fn add_constant(&self, c: &[T]) -> Result<Self> {
        if c.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: c.len() });
        }
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| v.clone() + c[i % self.d].clone())
            .collect();
        Ok(TorusFunction { torus: self.torus, d: self.d, values })
    }

    /// `x ↦ f(x + a)`.
    pub fn translate(&self, a: &[i64]) -> Result<Self> {
        self.torus.check_dim(a.len())?;
        let mut values = Vec::with_capacity(self.values.len());
        for i in 0..self.torus.size() {
            values.extend_from_slice(self.at(self.torus.offset_index(i, a)));
        }
        Ok(TorusFunction { torus: self.torus, d: self.d, values })
    }

    /// `f^π(x) = f(x^π)`.
    pub fn permute(&self, pi: &Permutation) -> Result<Self> {
        self.torus.check_dim(pi.len())?;
        let mut values = Vec::with_capacity(self.values.len());
        for i in 0..self.torus.size() {
            let x = self.torus.coords(i);
            values.extend_from_slice(self.at_coords(&pi.apply(&x)));
        }
        Ok(TorusFunction { torus: self.torus, d: self.d, values })
    }

    /// Largest `‖f(x)‖_p^q` over the torus.
    pub fn max_norm_q_power(&self, spec: &NormSpec) -> Result<T> {
        let mut best = T::zero();
        for i in 0..self.torus.size() {
            let v = T::norm_q_power(self.at(i), spec)?;
            if v > best {
                best = v;
            }
        }
        Ok(best)
    }

    /// `∫ ‖f‖^q dμ`.
    pub fn mean_norm_q_power(&self, spec: &NormSpec) -> Result<T> {
        // validate once so the closure below cannot fail
        T::norm_q_power(self.at(0), spec)?;
        Ok(super::mean_over(&Domain::Torus(self.torus), |x| {
            T::norm_q_power(self.at_coords(x), spec).expect("validated")
        }))
    }

    pub(crate) fn same_shape(&self, other: &TorusFunction<T>) -> Result<()> {
        if self.torus.n() != other.torus.n() {
            return Err(Error::DimensionMismatch { expected: self.torus.n(), got: other.torus.n() });
        }
        if self.torus.m() != other.torus.m() {
            return Err(Error::ModulusMismatch { expected: self.torus.m(), got: other.torus.m() });
        }
        if self.d != other.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: other.d });
        }
        Ok(())
    }

    /// `{ "m", "n", "d", "mode", "values" }` with one array per point.
    pub fn to_json(&self) -> Value {
        let mode = match T::MODE {
            Mode::Exact => "exact",
            Mode::Float => "float",
        };
        let values: Vec<Value> = (0..self.torus.size())
            .map(|i| Value::Array(self.at(i).iter().map(|v| v.to_json()).collect()))
            .collect();
        json!({
            "m": self.torus.m(),
            "n": self.torus.n(),
            "d": self.d,
            "mode": mode,
            "values": values,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let field = |name: &str| {
            v.get(name)
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::Parse(format!("missing integer field {name:?}")))
        };
        let torus = Torus::new(field("m")? as u32, field("n")? as usize)?;
        let d = field("d")? as usize;
        let mode = v.get("mode").and_then(Value::as_str).unwrap_or("exact");
        let expected = match T::MODE {
            Mode::Exact => "exact",
            Mode::Float => "float",
        };
        if mode != expected {
            return Err(Error::Parse(format!("function is in {mode} mode, expected {expected}")));
        }
        let rows = v
            .get("values")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing \"values\" array".into()))?;
        if rows.len() != torus.size() {
            return Err(Error::DimensionMismatch { expected: torus.size(), got: rows.len() });
        }
        let mut values = Vec::with_capacity(torus.size() * d);
        for row in rows {
            let row = row.as_array().ok_or_else(|| Error::Parse("value rows must be arrays".into()))?;
            if row.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: row.len() });
            }
            for x in row {
                values.push(T::from_json(x)?);
            }
        }
        TorusFunction::new(torus, d, values)
    }
}

impl TorusFunction<Rational> {
    /// The same function with floating-point values.
    pub fn to_float(&self) -> TorusFunction<f64> {
        let values = self.values.iter().map(Scalar::to_f64).collect();
        TorusFunction { torus: self.torus, d: self.d, values }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int, Rational};
    use crate::torus::PNorm;

    #[test]
    fn json_layout() {
        let t = Torus::new(2, 2).unwrap();
        let f = TorusFunction::<Rational>::scalar(t, |x| frac(x[0], 3) + int(x[1]));
        let j = f.to_json();
        assert_eq!(j["mode"], "exact");
        assert_eq!(j["values"][1][0], "1/1");
        assert_eq!(j["values"][2][0], "1/3");
        assert_eq!(TorusFunction::<Rational>::from_json(&j).unwrap(), f);
        assert!(TorusFunction::<f64>::from_json(&j).is_err());
    }

    #[test]
    fn rejects_bad_shapes() {
        let t = Torus::new(3, 1).unwrap();
        assert!(TorusFunction::new(t, 1, vec![int(1), int(2)]).is_err());
        assert!(TorusFunction::new(t, 1, vec![1.0, f64::NAN, 0.0]).is_err());
        let bad = serde_json::json!({"m": 3, "n": 1, "d": 1, "mode": "exact", "values": [["1/1"], ["2/1"]]});
        assert!(TorusFunction::<Rational>::from_json(&bad).is_err());
    }

    #[test]
    fn permute_inverse_round_trip() {
        let t = Torus::new(3, 3).unwrap();
        let f = TorusFunction::<Rational>::scalar(t, |x| int(x[0] + 5 * x[1] + 25 * x[2]));
        let pi = Permutation::new(vec![1, 2, 0]).unwrap();
        let g = f.permute(&pi).unwrap().permute(&pi.inverse()).unwrap();
        assert_eq!(g, f);
        let spec = NormSpec::new(PNorm::Finite(1), 3.0).unwrap();
        assert_eq!(
            f.permute(&pi).unwrap().mean_norm_q_power(&spec).unwrap(),
            f.mean_norm_q_power(&spec).unwrap()
        );
    }
}
