//! Classical and bivariate Bernoulli numbers in exact arithmetic.
//!
//! The classical numbers use the convention `B_1 = 1/2`, i.e. they are defined
//! by `r = Σ_{a<r} B_a C(r,a)`. The bivariate numbers `B_{r,s}` are the
//! coefficients of
//!
//! ```text
//! F(x, y) = (x - y) e^{x+y} / (e^x - e^y) = Σ_{r,s} B_{r,s} x^r y^s / (r! s!)
//! ```

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, big, int, Rational};

/// `B_0, …, B_N` with `B_1 = 1/2`.
pub fn classical_bernoulli(n: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
    b.push(int(1));
    for t in 1..=n {
        let r = t as u64 + 1;
        let partial: Rational = b.iter().enumerate().map(|(a, ba)| ba * big(&rational::binomial(r, a as u64))).sum();
        b.push((int(r as i64) - partial) / int(r as i64));
    }
    b
}

/// Bernoulli numbers with `B_1 = -1/2`, from `Σ_{j≤t} C(t+1,j) B_j = 0`.
fn bernoulli_minus(n: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
    b.push(int(1));
    for t in 1..=n {
        let r = t as u64 + 1;
        let partial: Rational = b.iter().enumerate().map(|(j, bj)| bj * big(&rational::binomial(r, j as u64))).sum();
        b.push(-partial / int(r as i64));
    }
    b
}

/// The square table `B_{r,s}`, `0 ≤ r, s ≤ N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BernoulliTable {
    n: usize,
    entries: Vec<Vec<Rational>>,
}

/// Outcome of checking the bivariate recursion on a whole table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecursionCheck {
    pub holds: bool,
    pub checked: usize,
    pub first_failure: Option<(usize, usize)>,
}

/// Computes `B_{r,s}` for `r, s ≤ N` from `F(x,y) = e^x G(x - y)` with
/// `G(u) = u / (e^u - 1)`.
pub fn bivariate_bernoulli(n: usize) -> BernoulliTable {
    let bm = bernoulli_minus(2 * n);
    let fact: Vec<Rational> = (0..=2 * n as u32).map(|i| big(&rational::factorial(i))).collect();
    let entries = (0..=n)
        .map(|r| {
            (0..=n)
                .map(|s| {
                    let sum: Rational = (s..=r + s)
                        .map(|t| {
                            &bm[t] * big(&rational::binomial(t as u64, s as u64)) / (&fact[t] * &fact[r + s - t])
                        })
                        .sum();
                    let signed = if s % 2 == 0 { sum } else { -sum };
                    signed * &fact[r] * &fact[s]
                })
                .collect()
        })
        .collect();
    BernoulliTable { n, entries }
}

impl BernoulliTable {
    pub fn max_index(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, s: usize) -> Option<&Rational> {
        self.entries.get(r).and_then(|row| row.get(s))
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.entries
    }

    /// Checks `r - s = Σ_{a<r} B_{a,s} C(r,a) - Σ_{b<s} B_{r,b} C(s,b)` for all
    /// `r, s ≤ N`.
    pub fn verify_recursion(&self) -> RecursionCheck {
        let mut checked = 0;
        for r in 0..=self.n {
            for s in 0..=self.n {
                checked += 1;
                let left: Rational =
                    (0..r).map(|a| &self.entries[a][s] * big(&rational::binomial(r as u64, a as u64))).sum();
                let right: Rational =
                    (0..s).map(|b| &self.entries[r][b] * big(&rational::binomial(s as u64, b as u64))).sum();
                if left - right != int(r as i64 - s as i64) {
                    return RecursionCheck { holds: false, checked, first_failure: Some((r, s)) };
                }
            }
        }
        RecursionCheck { holds: true, checked, first_failure: None }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..=self.n).all(|r| (0..r).all(|s| self.entries[r][s] == self.entries[s][r]))
    }

    /// `max_{r,s} |B_{r,s}| 2^{r+s} / (r! s!)` and where it is attained
    /// (first in row-major order).
    pub fn bound_ratio(&self) -> (Rational, (usize, usize)) {
        let mut best = (Rational::zero(), (0, 0));
        for (r, row) in self.entries.iter().enumerate() {
            for (s, b) in row.iter().enumerate() {
                let v = b.abs() * rational::pow(&int(2), (r + s) as u32)
                    / (big(&rational::factorial(r as u32)) * big(&rational::factorial(s as u32)));
                if v > best.0 {
                    best = (v, (r, s));
                }
            }
        }
        best
    }

    /// `Σ_{r,s ≤ N} B_{r,s} x^r y^s / (r! s!)`, summed exactly.
    pub fn series(&self, x: &Rational, y: &Rational) -> Rational {
        let mut total = Rational::zero();
        for (r, row) in self.entries.iter().enumerate() {
            let xr = rational::pow(x, r as u32) / big(&rational::factorial(r as u32));
            for (s, b) in row.iter().enumerate() {
                let ys = rational::pow(y, s as u32) / big(&rational::factorial(s as u32));
                total += b * &xr * ys;
            }
        }
        total
    }

    /// Header `r\s,0,…,N`, then one row per `r` starting with `r`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r\\s");
        for s in 0..=self.n {
            out.push_str(&format!(",{s}"));
        }
        out.push('\n');
        for (r, row) in self.entries.iter().enumerate() {
            out.push_str(&r.to_string());
            for b in row {
                out.push(',');
                out.push_str(&rational::to_string(b));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty CSV".into()))?;
        let cols: Vec<&str> = header.split(',').collect();
        if cols.first() != Some(&"r\\s") {
            return Err(Error::Parse(format!("unexpected header {header:?}")));
        }
        let n = cols.len().checked_sub(2).ok_or_else(|| Error::Parse("header has no columns".into()))?;
        for (s, c) in cols[1..].iter().enumerate() {
            if c.trim() != s.to_string() {
                return Err(Error::Parse(format!("header column {c:?} out of order")));
            }
        }
        let mut entries = Vec::with_capacity(n + 1);
        for (r, line) in lines.enumerate() {
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != n + 2 || cells[0].trim() != r.to_string() {
                return Err(Error::Parse(format!("malformed row {r}: {line:?}")));
            }
            entries.push(cells[1..].iter().map(|c| rational::parse(c.trim())).collect::<Result<Vec<_>>>()?);
        }
        if entries.len() != n + 1 {
            return Err(Error::Parse(format!("expected {} rows, got {}", n + 1, entries.len())));
        }
        Ok(BernoulliTable { n, entries })
    }
}

/// `F(x, y) = (x - y) e^{x+y} / (e^x - e^y)` in floating point.
pub fn generating_function(x: f64, y: f64) -> f64 {
    if x == y {
        return x.exp();
    }
    (x - y) * (x + y).exp() / (x.exp() - y.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn classical_values() {
        let b = classical_bernoulli(6);
        assert_eq!(b[..5], [int(1), frac(1, 2), frac(1, 6), int(0), frac(-1, 30)]);
        assert_eq!(b[6], frac(1, 42));
    }

    #[test]
    fn minus_convention_values() {
        let b = bernoulli_minus(4);
        assert_eq!(b, vec![int(1), frac(-1, 2), frac(1, 6), int(0), frac(-1, 30)]);
    }

    #[test]
    fn table_examples() {
        let t = bivariate_bernoulli(6);
        assert_eq!(t.get(0, 0), Some(&int(1)));
        assert_eq!(t.get(1, 1), Some(&frac(1, 3)));
        assert_eq!(t.get(0, 1), Some(&frac(1, 2)));
        let col: Vec<Rational> = (0..=6).map(|r| t.get(r, 0).unwrap().clone()).collect();
        assert_eq!(col, classical_bernoulli(6));
        assert!(t.is_symmetric());
        let check = t.verify_recursion();
        assert!(check.holds, "{check:?}");
        assert_eq!(check.checked, 49);
    }

    #[test]
    fn recursion_detects_corruption() {
        let mut t = bivariate_bernoulli(4);
        t.entries[1][1] = frac(1, 4);
        let check = t.verify_recursion();
        assert!(!check.holds);
        assert_eq!(check.first_failure, Some((1, 2)));
    }

    #[test]
    fn bound_ratio_small_entries() {
        let t = bivariate_bernoulli(1);
        // (0,0) → 1, (1,0) → 1, (1,1) → 4/3
        assert_eq!(t.bound_ratio(), (frac(4, 3), (1, 1)));
    }

    #[test]
    fn series_matches_generating_function() {
        let t = bivariate_bernoulli(20);
        let approx = rational::to_f64(&t.series(&frac(1, 2), &frac(1, 4)));
        assert!((approx - generating_function(0.5, 0.25)).abs() < 1e-10);
    }

    #[test]
    fn csv_round_trip() {
        let t = bivariate_bernoulli(5);
        let csv = t.to_csv();
        assert!(csv.starts_with("r\\s,0,1,2,3,4,5\n0,1/1,1/2,"));
        assert_eq!(BernoulliTable::from_csv(&csv).unwrap(), t);
        assert!(BernoulliTable::from_csv("r\\s,0\n0,1/0\n").is_err());
    }
}
