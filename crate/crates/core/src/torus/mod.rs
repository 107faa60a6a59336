//! The discrete torus ℤ_m^n: points, sign vectors, coordinate permutations,
//! vector-valued functions and uniform averages.
//!
//! Points are stored by their canonical residues in `0..m`. Whenever a point
//! has to be compared against a box `[-k, k]^n` the residues are mapped to
//! signed representatives in `[-⌊m/2⌋, ⌈m/2⌉ - 1]`.

mod function;
mod norm;

pub use function::TorusFunction;
pub use norm::{norm_f64, Mode, FLOAT_TOLERANCE, NormSpec, PNorm, Scalar};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of a torus ℤ_m^n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Torus {
    m: u32,
    n: usize,
}

/// Largest torus we are willing to materialize densely.
pub const MAX_POINTS: usize = 1 << 24;

impl Torus {
    pub fn new(m: u32, n: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParams(format!("modulus m={m} must be at least 2")));
        }
        if n == 0 {
            return Err(Error::InvalidParams("dimension n must be at least 1".into()));
        }
        let size = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if size > MAX_POINTS as u128 {
            return Err(Error::BudgetExceeded { needed: size, budget: MAX_POINTS as u128 });
        }
        Ok(Torus { m, n })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of points, `m^n`.
    pub fn size(&self) -> usize {
        (self.m as usize).pow(self.n as u32)
    }

    pub fn reduce(&self, z: i64) -> i64 {
        z.rem_euclid(self.m as i64)
    }

    /// Representative of `z` in `[-⌊m/2⌋, ⌈m/2⌉ - 1]`.
    pub fn signed_rep(&self, z: i64) -> i64 {
        let m = self.m as i64;
        let r = z.rem_euclid(m);
        if r >= (m + 1) / 2 {
            r - m
        } else {
            r
        }
    }

    pub fn abs(&self, z: i64) -> i64 {
        torus_abs(self.reduce(z), self.m)
    }

    /// Row-major index of a coordinate vector; coordinates are reduced first.
    pub fn index(&self, coords: &[i64]) -> usize {
        debug_assert_eq!(coords.len(), self.n);
        let m = self.m as i64;
        coords
            .iter()
            .fold(0usize, |acc, &c| acc * self.m as usize + c.rem_euclid(m) as usize)
    }

    /// Canonical coordinates of the point with row-major index `idx`.
    pub fn coords(&self, idx: usize) -> Vec<i64> {
        let mut out = vec![0; self.n];
        self.write_coords(idx, &mut out);
        out
    }

    /// Signed representatives of the coordinates of point `idx`.
    pub fn signed_coords(&self, idx: usize) -> Vec<i64> {
        self.coords(idx).into_iter().map(|c| self.signed_rep(c)).collect()
    }

    pub fn write_coords(&self, mut idx: usize, out: &mut [i64]) {
        let m = self.m as usize;
        for c in out.iter_mut().rev() {
            *c = (idx % m) as i64;
            idx /= m;
        }
    }

    /// Index of `point(idx) + offset`.
    pub fn offset_index(&self, idx: usize, offset: &[i64]) -> usize {
        let m = self.m as i64;
        let mut stride = 1usize;
        let mut rest = idx;
        let mut out = 0usize;
        for &o in offset.iter().rev() {
            let c = (rest % self.m as usize) as i64;
            rest /= self.m as usize;
            out += (c + o).rem_euclid(m) as usize * stride;
            stride *= self.m as usize;
        }
        out
    }

    pub fn point(&self, idx: usize) -> TorusPoint {
        TorusPoint { torus: *self, coords: self.coords(idx) }
    }

    pub fn points(&self) -> impl Iterator<Item = TorusPoint> + '_ {
        (0..self.size()).map(move |i| self.point(i))
    }

    fn check(&self, other: &Torus) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        if self.m != other.m {
            return Err(Error::ModulusMismatch { expected: self.m, got: other.m });
        }
        Ok(())
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<()> {
        if self.n != n {
            return Err(Error::DimensionMismatch { expected: self.n, got: n });
        }
        Ok(())
    }
}

/// `|z| = min(z, m - z)` for a residue `0 <= z < m`.
pub fn torus_abs(z: i64, m: u32) -> i64 {
    let m = m as i64;
    let z = z.rem_euclid(m);
    z.min(m - z)
}

/// A point of ℤ_m^n with coordinates reduced to `0..m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TorusPoint {
    torus: Torus,
    coords: Vec<i64>,
}

impl TorusPoint {
    pub fn new(torus: Torus, coords: &[i64]) -> Result<Self> {
        torus.check_dim(coords.len())?;
        Ok(TorusPoint { torus, coords: coords.iter().map(|&c| torus.reduce(c)).collect() })
    }

    pub fn zero(torus: Torus) -> Self {
        TorusPoint { torus, coords: vec![0; torus.n] }
    }

    pub fn torus(&self) -> Torus {
        self.torus
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn signed(&self) -> Vec<i64> {
        self.coords.iter().map(|&c| self.torus.signed_rep(c)).collect()
    }

    pub fn index(&self) -> usize {
        self.torus.index(&self.coords)
    }

    pub fn add(&self, other: &TorusPoint) -> Result<TorusPoint> {
        self.torus.check(&other.torus)?;
        self.add_raw(&other.coords)
    }

    pub fn sub(&self, other: &TorusPoint) -> Result<TorusPoint> {
        self.torus.check(&other.torus)?;
        let neg: Vec<i64> = other.coords.iter().map(|c| -c).collect();
        self.add_raw(&neg)
    }

    pub fn neg(&self) -> TorusPoint {
        let neg: Vec<i64> = self.coords.iter().map(|c| -c).collect();
        TorusPoint::new(self.torus, &neg).expect("same dimension")
    }

    pub fn add_signs(&self, eps: &SignVector) -> Result<TorusPoint> {
        let raw: Vec<i64> = eps.signs().iter().map(|&s| s as i64).collect();
        self.add_raw(&raw)
    }

    /// `x + amount·e_j` (0-based `j`).
    pub fn shift(&self, j: usize, amount: i64) -> Result<TorusPoint> {
        if j >= self.torus.n {
            return Err(Error::OutOfRange { index: j, size: self.torus.n });
        }
        let mut coords = self.coords.clone();
        coords[j] = self.torus.reduce(coords[j] + amount);
        Ok(TorusPoint { torus: self.torus, coords })
    }

    /// Coordinatewise sum with an integer vector, reduced mod m.
    pub fn add_raw(&self, offset: &[i64]) -> Result<TorusPoint> {
        self.torus.check_dim(offset.len())?;
        let coords = self
            .coords
            .iter()
            .zip(offset)
            .map(|(&a, &b)| self.torus.reduce(a + b))
            .collect();
        Ok(TorusPoint { torus: self.torus, coords })
    }

    /// `x^π = (x_{π(1)}, …, x_{π(n)})`.
    pub fn permute(&self, pi: &Permutation) -> Result<TorusPoint> {
        self.torus.check_dim(pi.len())?;
        Ok(TorusPoint { torus: self.torus, coords: pi.apply(&self.coords) })
    }
}

/// Which sign alphabet a [`SignVector`] draws from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Alphabet {
    /// `{-1, 1}`, the measure τ.
    Full,
    /// `{-1, 0, 1}`, the measure σ.
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignVector {
    signs: Vec<i8>,
    alphabet: Alphabet,
}

impl SignVector {
    pub fn new(signs: Vec<i8>, alphabet: Alphabet) -> Result<Self> {
        let ok = signs.iter().all(|&s| match alphabet {
            Alphabet::Full => s == 1 || s == -1,
            Alphabet::Mixed => (-1..=1).contains(&s),
        });
        if !ok {
            return Err(Error::InvalidParams(format!("signs {signs:?} outside {alphabet:?} alphabet")));
        }
        Ok(SignVector { signs, alphabet })
    }

    pub fn full(signs: &[i8]) -> Result<Self> {
        SignVector::new(signs.to_vec(), Alphabet::Full)
    }

    pub fn mixed(signs: &[i8]) -> Result<Self> {
        SignVector::new(signs.to_vec(), Alphabet::Mixed)
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn as_i64(&self) -> Vec<i64> {
        self.signs.iter().map(|&s| s as i64).collect()
    }

    /// Every vector of the alphabet in a fixed lexicographic order
    /// (`-1 < 0 < 1`).
    pub fn all(n: usize, alphabet: Alphabet) -> Vec<SignVector> {
        all_signs(n, alphabet)
            .into_iter()
            .map(|signs| SignVector { signs, alphabet })
            .collect()
    }
}

/// Raw enumeration of `{-1,1}^n` or `{-1,0,1}^n`.
pub fn all_signs(n: usize, alphabet: Alphabet) -> Vec<Vec<i8>> {
    let letters: &[i8] = match alphabet {
        Alphabet::Full => &[-1, 1],
        Alphabet::Mixed => &[-1, 0, 1],
    };
    let mut out = vec![Vec::with_capacity(n)];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                letters.iter().map(move |&l| {
                    let mut v = prefix.clone();
                    v.push(l);
                    v
                })
            })
            .collect();
    }
    out
}

/// Coordinatewise product `x ⊙ ε` taken on signed representatives.
pub fn odot(torus: &Torus, x: &[i64], eps: &[i8]) -> Result<Vec<i64>> {
    torus.check_dim(x.len())?;
    torus.check_dim(eps.len())?;
    Ok(x.iter().zip(eps).map(|(&c, &e)| torus.signed_rep(c) * e as i64).collect())
}

/// `⟨ε, ε'⟩ = Σ ε_j ε'_j`.
pub fn inner_sign(a: &[i8], b: &[i8]) -> Result<i64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    Ok(a.iter().zip(b).map(|(&x, &y)| x as i64 * y as i64).sum())
}

/// A permutation of `0..n`, stored as its image table: `π(i) = map[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; map.len()];
        for &v in &map {
            if v >= map.len() || std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidPermutation(map));
            }
        }
        Ok(Permutation(map))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self> {
        let mut map: Vec<usize> = (0..n).collect();
        if a >= n || b >= n {
            return Err(Error::InvalidPermutation(map));
        }
        map.swap(a, b);
        Ok(Permutation(map))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn image(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v] = i;
        }
        Permutation(inv)
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Self {
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    /// Relabel coordinates: `out[i] = v[π(i)]`.
    pub fn apply<T: Clone>(&self, v: &[T]) -> Vec<T> {
        self.0.iter().map(|&i| v[i].clone()).collect()
    }

    /// All `n!` permutations in lexicographic order of their image tables.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        loop {
            out.push(Permutation(cur.clone()));
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
            let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }
}

/// The finite probability spaces the uniform averages run over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    /// μ, uniform on ℤ_m^n; `g` receives canonical coordinates.
    Torus(Torus),
    /// τ, uniform on `{-1,1}^n`.
    FullSigns(usize),
    /// σ, uniform on `{-1,0,1}^n`.
    MixedSigns(usize),
}

/// Exact (or float) uniform average of `g` over a finite domain.
pub fn mean_over<T: Scalar>(domain: &Domain, g: impl Fn(&[i64]) -> T + Sync) -> T {
    match *domain {
        Domain::Torus(t) => {
            let total = sum_indices::<T, _>(t.size(), |i| g(&t.coords(i)));
            total / T::from_i64(t.size() as i64)
        }
        Domain::FullSigns(n) | Domain::MixedSigns(n) => {
            let alphabet =
                if matches!(domain, Domain::FullSigns(_)) { Alphabet::Full } else { Alphabet::Mixed };
            let all = all_signs(n, alphabet);
            let count = all.len();
            let total = all.iter().fold(T::zero(), |acc, s| {
                let raw: Vec<i64> = s.iter().map(|&c| c as i64).collect();
                acc + g(&raw)
            });
            total / T::from_i64(count as i64)
        }
    }
}

/// `Σ_{i < count} f(i)`. Exact scalars reduce in parallel; floats reduce
/// sequentially in index order so results do not depend on thread count.
pub fn sum_indices<T: Scalar, F: Fn(usize) -> T + Sync>(count: usize, f: F) -> T {
    match T::MODE {
        Mode::Exact => (0..count)
            .into_par_iter()
            .fold(T::zero, |acc, i| acc + f(i))
            .reduce(T::zero, |a, b| a + b),
        Mode::Float => (0..count).fold(T::zero(), |acc, i| acc + f(i)),
    }
}
