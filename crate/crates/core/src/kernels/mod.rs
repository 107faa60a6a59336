//! Convolution kernels on ℤ_m^n: the parity boxes `S(j,k)` and `L_B`, their
//! averaging operators `𝓔_j` and `Δ_B`, and the edge measures β₁, β₂.

mod edges;

pub use edges::{beta2_normalizer, edge_energy, EdgeMeasure};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::torus::{Permutation, Scalar, Torus, TorusFunction};

/// Parameters `(n, m, k, q)` of the `S(j,k)` scheme.
///
/// Only `m` even, `k` odd and `k < m/2` are enforced here. The stronger
/// `k ≥ 2n` is left to the caller.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SchemeParams {
    pub n: usize,
    pub m: u32,
    pub k: u32,
    pub q: u32,
}

impl SchemeParams {
    pub fn new(n: usize, m: u32, k: u32, q: u32) -> Result<Self> {
        if m % 2 != 0 {
            return Err(Error::InvalidParams(format!("m={m} must be even")));
        }
        if k % 2 == 0 {
            return Err(Error::InvalidParams(format!("k={k} must be odd")));
        }
        if 2 * k >= m {
            return Err(Error::InvalidParams(format!("k={k} must satisfy k < m/2 = {}", m / 2)));
        }
        if q == 0 {
            return Err(Error::InvalidParams("q must be at least 1".into()));
        }
        Torus::new(m, n)?;
        Ok(SchemeParams { n, m, k, q })
    }

    pub fn torus(&self) -> Torus {
        Torus::new(self.m, self.n).expect("validated at construction")
    }

    pub fn k_i64(&self) -> i64 {
        self.k as i64
    }
}

/// Even integers in `[-k, k]` (equivalently in `(-k, k)`, since `k` is odd).
pub(crate) fn evens(k: i64) -> Vec<i64> {
    (-k..=k).filter(|v| v % 2 == 0).collect()
}

/// Odd integers in `[-k, k]`.
pub(crate) fn odds(k: i64) -> Vec<i64> {
    (-k..=k).filter(|v| v.rem_euclid(2) == 1).collect()
}

pub(crate) fn cartesian(factors: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::with_capacity(factors.len())];
    for f in factors {
        out = out
            .into_iter()
            .flat_map(|p| {
                f.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

fn check_coord(params: &SchemeParams, j: usize) -> Result<()> {
    if j >= params.n {
        return Err(Error::OutOfRange { index: j, size: params.n });
    }
    Ok(())
}

/// Validated, sorted, duplicate-free subset of `0..n`.
pub fn coord_set(n: usize, set: &[usize]) -> Result<Vec<bool>> {
    let mut mask = vec![false; n];
    for &i in set {
        if i >= n {
            return Err(Error::OutOfRange { index: i, size: n });
        }
        if std::mem::replace(&mut mask[i], true) {
            return Err(Error::InvalidParams(format!("coordinate {i} repeated in {set:?}")));
        }
    }
    Ok(mask)
}

/// Per-coordinate factor values of `S(j,k)`: even on `j`, odd elsewhere.
fn s_jk_factors(params: &SchemeParams, j: usize) -> Vec<Vec<i64>> {
    let k = params.k_i64();
    (0..params.n).map(|c| if c == j { evens(k) } else { odds(k) }).collect()
}

/// `S(j,k) = { y ∈ [-k,k]^n : y_j even, y_l odd for l ≠ j }` as signed
/// integer vectors, `j` 0-based. Has `k(k+1)^{n-1}` elements.
pub fn build_s_jk(params: &SchemeParams, j: usize) -> Result<Vec<Vec<i64>>> {
    check_coord(params, j)?;
    Ok(cartesian(&s_jk_factors(params, j)))
}

fn l_b_factors(params: &SchemeParams, mask: &[bool]) -> Vec<Vec<i64>> {
    let k = params.k_i64();
    mask.iter().map(|&inside| if inside { evens(k) } else { vec![0] }).collect()
}

/// `L_B`: even coordinates in `(-k, k)` on `B`, zero off `B`. Has `k^{|B|}` elements.
pub fn build_l_b(params: &SchemeParams, b: &[usize]) -> Result<Vec<Vec<i64>>> {
    let mask = coord_set(params.n, b)?;
    Ok(cartesian(&l_b_factors(params, &mask)))
}

/// One coordinate's factor of a product kernel: `(offset, weight)` pairs.
pub type Factor = Vec<(i64, Rational)>;

/// A probability measure on ℤ_m^n with exact rational weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    torus: Torus,
    // sorted by point index, weights positive
    support: Vec<(usize, Rational)>,
    product: Option<Vec<Factor>>,
}

impl Kernel {
    pub fn new(torus: Torus, weights: impl IntoIterator<Item = (Vec<i64>, Rational)>) -> Result<Self> {
        let mut support = Vec::new();
        for (p, w) in weights {
            torus.check_dim(p.len())?;
            if w <= Rational::zero() {
                return Err(Error::InvalidParams(format!("kernel weight {w} at {p:?} is not positive")));
            }
            support.push((torus.index(&p), w));
        }
        support.sort_by_key(|(i, _)| *i);
        if let Some(w) = support.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidParams(format!(
                "support point {:?} listed twice",
                torus.coords(w[0].0)
            )));
        }
        let total: Rational = support.iter().map(|(_, w)| w.clone()).sum();
        if !total.is_one() {
            return Err(Error::InvalidParams(format!("kernel mass is {total}, not 1")));
        }
        Ok(Kernel { torus, support, product: None })
    }

    pub fn uniform(torus: Torus, points: &[Vec<i64>]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParams("uniform kernel on an empty set".into()));
        }
        let w = rational::frac(1, points.len() as i64);
        Kernel::new(torus, points.iter().map(|p| (p.clone(), w.clone())))
    }

    pub fn point_mass(torus: Torus, at: &[i64]) -> Result<Self> {
        Kernel::new(torus, [(at.to_vec(), Rational::one())])
    }

    /// Product measure `⊗_c factors[c]`; remembers its factors so that
    /// convolution can average one coordinate at a time.
    pub fn product(torus: Torus, factors: Vec<Factor>) -> Result<Self> {
        torus.check_dim(factors.len())?;
        for f in &factors {
            let mass: Rational = f.iter().map(|(_, w)| w.clone()).sum();
            if !mass.is_one() {
                return Err(Error::InvalidParams(format!("factor mass is {mass}, not 1")));
            }
        }
        let mut pts: Vec<(Vec<i64>, Rational)> = vec![(Vec::new(), Rational::one())];
        for f in &factors {
            pts = pts
                .into_iter()
                .flat_map(|(p, w)| {
                    f.iter().map(move |(o, fw)| {
                        let mut q = p.clone();
                        q.push(*o);
                        (q, w.clone() * fw.clone())
                    })
                })
                .collect();
        }
        let mut k = Kernel::new(torus, pts)?;
        k.product = Some(factors);
        Ok(k)
    }

    fn uniform_product(torus: Torus, values: Vec<Vec<i64>>) -> Result<Self> {
        let factors = values
            .into_iter()
            .map(|vals| {
                let w = rational::frac(1, vals.len() as i64);
                vals.into_iter().map(|v| (v, w.clone())).collect()
            })
            .collect();
        Kernel::product(torus, factors)
    }

    /// Convex combination `Σ c_i ν_i`.
    pub fn mixture(parts: &[(Rational, &Kernel)]) -> Result<Self> {
        let torus = parts.first().ok_or_else(|| Error::InvalidParams("empty mixture".into()))?.1.torus;
        let mut acc = std::collections::BTreeMap::<usize, Rational>::new();
        for (c, k) in parts {
            if k.torus != torus {
                return Err(Error::InvalidParams("mixture of kernels on different tori".into()));
            }
            for (i, w) in &k.support {
                *acc.entry(*i).or_insert_with(Rational::zero) += c.clone() * w.clone();
            }
        }
        Kernel::new(
            torus,
            acc.into_iter().filter(|(_, w)| !w.is_zero()).map(|(i, w)| (torus.coords(i), w)),
        )
    }

    pub fn torus(&self) -> Torus {
        self.torus
    }

    pub fn support(&self) -> &[(usize, Rational)] {
        &self.support
    }

    pub fn product_factors(&self) -> Option<&[Factor]> {
        self.product.as_deref()
    }

    pub fn weight(&self, coords: &[i64]) -> Rational {
        self.weight_at(self.torus.index(coords))
    }

    pub fn weight_at(&self, idx: usize) -> Rational {
        match self.support.binary_search_by_key(&idx, |(i, _)| *i) {
            Ok(pos) => self.support[pos].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    /// `ν^π(x) = ν(x^π)`.
    pub fn permute(&self, pi: &Permutation) -> Result<Kernel> {
        self.torus.check_dim(pi.len())?;
        let inv = pi.inverse();
        let support = self.support.iter().map(|(i, w)| (inv.apply(&self.torus.coords(*i)), w.clone()));
        let mut out = Kernel::new(self.torus, support)?;
        out.product = self.product.as_ref().map(|f| inv_factors(f, pi));
        Ok(out)
    }

    /// `{ "m", "n", "mode": "exact", "support": [{ "point", "weight" }], "product"? }`.
    pub fn to_json(&self) -> Value {
        let support: Vec<Value> = self
            .support
            .iter()
            .map(|(i, w)| json!({ "point": self.torus.coords(*i), "weight": rational::to_string(w) }))
            .collect();
        let mut v = json!({
            "m": self.torus.m(),
            "n": self.torus.n(),
            "mode": "exact",
            "support": support,
        });
        if let Some(f) = &self.product {
            let factors: Vec<Value> = f
                .iter()
                .map(|fac| {
                    Value::Array(fac.iter().map(|(o, w)| json!([o, rational::to_string(w)])).collect())
                })
                .collect();
            v["product"] = Value::Array(factors);
        }
        v
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let field = |name: &str| {
            v.get(name)
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::Parse(format!("missing integer field {name:?}")))
        };
        let torus = Torus::new(field("m")? as u32, field("n")? as usize)?;
        let bad = |what: &str| Error::Parse(format!("malformed kernel {what}"));
        if let Some(factors) = v.get("product").and_then(Value::as_array) {
            let mut parsed = Vec::new();
            for fac in factors {
                let mut f = Vec::new();
                for pair in fac.as_array().ok_or_else(|| bad("factor"))? {
                    let o = pair.get(0).and_then(Value::as_i64).ok_or_else(|| bad("offset"))?;
                    let w = pair.get(1).and_then(Value::as_str).ok_or_else(|| bad("weight"))?;
                    f.push((o, rational::parse(w)?));
                }
                parsed.push(f);
            }
            return Kernel::product(torus, parsed);
        }
        let entries = v.get("support").and_then(Value::as_array).ok_or_else(|| bad("support"))?;
        let mut weights = Vec::new();
        for e in entries {
            let p = e
                .get("point")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("point"))?
                .iter()
                .map(|c| c.as_i64().ok_or_else(|| bad("coordinate")))
                .collect::<Result<Vec<_>>>()?;
            let w = e.get("weight").and_then(Value::as_str).ok_or_else(|| bad("weight"))?;
            weights.push((p, rational::parse(w)?));
        }
        Kernel::new(torus, weights)
    }
}

fn inv_factors(f: &[Factor], pi: &Permutation) -> Vec<Factor> {
    // ν(x^π) = Π_c w_c(x_{π(c)}): coordinate i = π(c) carries factor π⁻¹(i).
    let inv = pi.inverse();
    (0..f.len()).map(|i| f[inv.image(i)].clone()).collect()
}

/// The uniform measure `ν_j` on `S(j,k)`.
pub fn nu_j(params: &SchemeParams, j: usize) -> Result<Kernel> {
    check_coord(params, j)?;
    Kernel::uniform_product(params.torus(), s_jk_factors(params, j))
}

/// All `n` kernels `ν_1, …, ν_n` of the scheme.
pub fn scheme_kernels(params: &SchemeParams) -> Vec<Kernel> {
    (0..params.n).map(|j| nu_j(params, j).expect("valid coordinate")).collect()
}

/// The uniform measure on `L_B`.
pub fn l_b_kernel(params: &SchemeParams, b: &[usize]) -> Result<Kernel> {
    let mask = coord_set(params.n, b)?;
    Kernel::uniform_product(params.torus(), l_b_factors(params, &mask))
}

fn check_kernel<T: Scalar>(f: &TorusFunction<T>, nu: &Kernel) -> Result<()> {
    let (a, b) = (f.torus(), nu.torus());
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch { expected: a.n(), got: b.n() });
    }
    if a.m() != b.m() {
        return Err(Error::ModulusMismatch { expected: a.m(), got: b.m() });
    }
    Ok(())
}

/// `(f * ν)(x) = Σ_y ν(y) f(x - y)`; product kernels are applied one
/// coordinate at a time.
pub fn convolve<T: Scalar>(f: &TorusFunction<T>, nu: &Kernel) -> Result<TorusFunction<T>> {
    check_kernel(f, nu)?;
    match &nu.product {
        Some(factors) => Ok(convolve_separable(f, factors)),
        None => convolve_direct(f, nu),
    }
}

/// The double sum over output points and kernel support, ignoring any
/// product structure.
pub fn convolve_direct<T: Scalar>(f: &TorusFunction<T>, nu: &Kernel) -> Result<TorusFunction<T>> {
    check_kernel(f, nu)?;
    let torus = f.torus();
    let d = f.dim();
    let offsets: Vec<(Vec<i64>, T)> = nu
        .support
        .iter()
        .map(|(i, w)| (torus.coords(*i).iter().map(|c| -c).collect(), T::from_rational(w)))
        .collect();
    let rows: Vec<Vec<T>> = (0..torus.size())
        .into_par_iter()
        .map(|x| {
            let mut acc = vec![T::zero(); d];
            for (neg, w) in &offsets {
                let src = f.at(torus.offset_index(x, neg));
                for (a, v) in acc.iter_mut().zip(src) {
                    *a = a.clone() + w.clone() * v.clone();
                }
            }
            acc
        })
        .collect();
    TorusFunction::new(torus, d, rows.into_iter().flatten().collect())
}

fn convolve_separable<T: Scalar>(f: &TorusFunction<T>, factors: &[Factor]) -> TorusFunction<T> {
    let torus = f.torus();
    let d = f.dim();
    let mut cur = f.clone();
    for (c, fac) in factors.iter().enumerate() {
        if fac.len() == 1 && fac[0].0 == 0 {
            continue;
        }
        let taps: Vec<(Vec<i64>, T)> = fac
            .iter()
            .map(|(o, w)| {
                let mut off = vec![0; torus.n()];
                off[c] = -o;
                (off, T::from_rational(w))
            })
            .collect();
        let rows: Vec<Vec<T>> = (0..torus.size())
            .into_par_iter()
            .map(|x| {
                let mut acc = vec![T::zero(); d];
                for (off, w) in &taps {
                    for (a, v) in acc.iter_mut().zip(cur.at(torus.offset_index(x, off))) {
                        *a = a.clone() + w.clone() * v.clone();
                    }
                }
                acc
            })
            .collect();
        cur = TorusFunction::new(torus, d, rows.into_iter().flatten().collect()).expect("same shape");
    }
    cur
}

/// `𝓔_j f(x)`, the average of `f(x + y)` over `y ∈ S(j,k)`. The set is
/// symmetric, so this is the convolution `f * ν_j`.
pub fn e_j<T: Scalar>(f: &TorusFunction<T>, params: &SchemeParams, j: usize) -> Result<TorusFunction<T>> {
    convolve(f, &nu_j(params, j)?)
}

/// `Δ_B f(x)`, the average of `f(x + y)` over `y ∈ L_B`.
pub fn delta_b<T: Scalar>(f: &TorusFunction<T>, params: &SchemeParams, b: &[usize]) -> Result<TorusFunction<T>> {
    convolve(f, &l_b_kernel(params, b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use crate::torus::torus_abs;

    fn params(n: usize, m: u32, k: u32) -> SchemeParams {
        SchemeParams::new(n, m, k, 2).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(SchemeParams::new(2, 7, 3, 2).is_err());
        assert!(SchemeParams::new(2, 8, 2, 2).is_err());
        assert!(SchemeParams::new(2, 8, 5, 2).is_err());
        assert!(SchemeParams::new(2, 8, 3, 0).is_err());
        assert!(SchemeParams::new(2, 8, 3, 2).is_ok());
    }

    #[test]
    fn s_jk_examples() {
        assert_eq!(build_s_jk(&params(1, 8, 1), 0).unwrap(), vec![vec![0]]);
        assert_eq!(build_s_jk(&params(2, 8, 1), 0).unwrap(), vec![vec![0, -1], vec![0, 1]]);
        assert_eq!(build_s_jk(&params(2, 8, 3), 0).unwrap().len(), 12);
        assert!(build_s_jk(&params(2, 8, 3), 2).is_err());
    }

    #[test]
    fn s_jk_and_l_b_cardinalities() {
        for n in 1..=3usize {
            for k in [1u32, 3, 5] {
                let p = params(n, 16, k);
                for j in 0..n {
                    let set = build_s_jk(&p, j).unwrap();
                    assert_eq!(set.len(), (k * (k + 1).pow(n as u32 - 1)) as usize);
                }
                let all: Vec<usize> = (0..n).collect();
                for mask in 0u32..(1 << n) {
                    let b: Vec<usize> = all.iter().copied().filter(|i| mask >> i & 1 == 1).collect();
                    assert_eq!(build_l_b(&p, &b).unwrap().len(), k.pow(b.len() as u32) as usize);
                }
            }
        }
    }

    #[test]
    fn l_b_examples() {
        let p = params(2, 8, 3);
        assert_eq!(build_l_b(&p, &[]).unwrap(), vec![vec![0, 0]]);
        assert_eq!(build_l_b(&p, &[0]).unwrap(), vec![vec![-2, 0], vec![0, 0], vec![2, 0]]);
        assert_eq!(build_l_b(&p, &[0, 1]).unwrap().len(), 9);
        assert!(build_l_b(&p, &[0, 0]).is_err());
        assert!(build_l_b(&p, &[3]).is_err());
    }

    #[test]
    fn kernel_invariants() {
        let t = Torus::new(4, 1).unwrap();
        assert!(Kernel::new(t, [(vec![0], frac(1, 2))]).is_err());
        assert!(Kernel::new(t, [(vec![0], frac(1, 2)), (vec![4], frac(1, 2))]).is_err());
        assert!(Kernel::new(t, [(vec![0], int(2)), (vec![1], int(-1))]).is_err());
        let k = Kernel::new(t, [(vec![0], frac(1, 2)), (vec![1], frac(1, 2))]).unwrap();
        assert_eq!(k.weight(&[5]), frac(1, 2));
        assert_eq!(k.weight(&[2]), int(0));
    }

    #[test]
    fn convolve_identities() {
        let p = params(1, 8, 3);
        let t = p.torus();
        let f = TorusFunction::<Rational>::scalar(t, |x| int(torus_abs(x[0], 8)));
        let delta = Kernel::point_mass(t, &[0]).unwrap();
        assert_eq!(convolve(&f, &delta).unwrap(), f);
        let c = TorusFunction::<Rational>::constant(t, &[frac(3, 5)]);
        assert_eq!(convolve(&c, &nu_j(&p, 0).unwrap()).unwrap(), c);
        let e = e_j(&f, &p, 0).unwrap();
        assert_eq!(e.at(0)[0], frac(4, 3));
    }

    #[test]
    fn e_j_torus_abs_profile() {
        let p = params(1, 8, 3);
        let f = TorusFunction::<Rational>::scalar(p.torus(), |x| int(torus_abs(x[0], 8)));
        let e = e_j(&f, &p, 0).unwrap();
        let got: Vec<Rational> = (0..8).map(|i| e.at(i)[0].clone()).collect();
        let want: Vec<Rational> =
            [4, 5, 6, 7, 8, 7, 6, 5].iter().map(|&v| frac(v, 3)).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn trivial_operators() {
        let p = params(2, 8, 1);
        let t = p.torus();
        let f = TorusFunction::<Rational>::scalar(t, |x| int(x[0] * 3 - x[1] * x[1]));
        // S(1,1) for n = 1 is {0}
        let p1 = params(1, 8, 1);
        let g = TorusFunction::<Rational>::scalar(p1.torus(), |x| int(x[0] * x[0]));
        assert_eq!(e_j(&g, &p1, 0).unwrap(), g);
        assert_eq!(delta_b(&f, &params(2, 8, 3), &[]).unwrap(), f);
    }

    #[test]
    fn permuted_product_kernel_keeps_factors_consistent() {
        let p = params(3, 8, 3);
        let nu = nu_j(&p, 0).unwrap();
        let pi = Permutation::new(vec![2, 0, 1]).unwrap();
        let permuted = nu.permute(&pi).unwrap();
        let rebuilt = Kernel::product(p.torus(), permuted.product_factors().unwrap().to_vec()).unwrap();
        assert_eq!(rebuilt.support(), permuted.support());
    }

    #[test]
    fn kernel_json_round_trip() {
        let p = params(2, 8, 3);
        let nu = nu_j(&p, 1).unwrap();
        assert_eq!(Kernel::from_json(&nu.to_json()).unwrap(), nu);
        let mut plain = nu.clone();
        plain.product = None;
        let back = Kernel::from_json(&plain.to_json()).unwrap();
        assert_eq!(back.support(), nu.support());
    }
}
