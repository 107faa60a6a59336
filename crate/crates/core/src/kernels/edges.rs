use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::torus::{all_signs, sum_indices, Alphabet, NormSpec, Permutation, Scalar, Torus, TorusFunction};

use super::SchemeParams;

type Weight = dyn Fn(&[i64], &[i64]) -> Rational + Send + Sync;

/// A symmetric probability measure on pairs `(x, y)` with `y - x ∈ {-1,0,1}^n`.
///
/// The weight is stored as a rule `(x, δ) ↦ β(x, x + δ)`, where `x` is given
/// by canonical coordinates and `δ` by its entries in `{-1, 0, 1}`.
#[derive(Clone)]
pub struct EdgeMeasure {
    torus: Torus,
    label: String,
    weight: Arc<Weight>,
}

impl fmt::Debug for EdgeMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EdgeMeasure").field("torus", &self.torus).field("label", &self.label).finish()
    }
}

fn zeros(delta: &[i64]) -> usize {
    delta.iter().filter(|&&d| d == 0).count()
}

fn require_edges(torus: &Torus) -> Result<()> {
    if torus.m() < 3 {
        // δ and -δ coincide mod 2, so pairs would be counted twice
        return Err(Error::InvalidParams(format!("edge measures need m ≥ 3, got m={}", torus.m())));
    }
    Ok(())
}

/// `Z = Σ_{ℓ=0}^{n} (n/k)^{qℓ}`, the normalizer of the β₂ measure. Defined for
/// any positive `k`.
pub fn beta2_normalizer(n: usize, k: u32, q: u32) -> Rational {
    let ratio = rational::pow(&rational::frac(n as i64, k as i64), q);
    (0..=n as u32).map(|l| rational::pow(&ratio, l)).sum()
}

impl EdgeMeasure {
    /// Builds a measure from a weight rule. The rule must be symmetric,
    /// nonnegative and of total mass one; [`EdgeMeasure::validate`] checks this.
    pub fn from_rule(
        torus: Torus,
        label: impl Into<String>,
        rule: impl Fn(&[i64], &[i64]) -> Rational + Send + Sync + 'static,
    ) -> Result<Self> {
        require_edges(&torus)?;
        Ok(EdgeMeasure { torus, label: label.into(), weight: Arc::new(rule) })
    }

    /// β₁: half the mass uniform on `{(x, x + ε) : ε ∈ {-1,1}^n}`, half uniform
    /// on `{(x, x ± e_j)}`.
    pub fn beta1(torus: Torus) -> Result<Self> {
        let n = torus.n();
        let size = torus.size() as i64;
        let diag = rational::frac(1, 2 * size * (1i64 << n));
        let axis = rational::frac(1, 2 * size * 2 * n as i64);
        EdgeMeasure::from_rule(torus, "beta1", move |_x, delta| {
            let z = zeros(delta);
            let mut w = Rational::zero();
            if z == 0 {
                w += diag.clone();
            }
            if z + 1 == delta.len() {
                w += axis.clone();
            }
            w
        })
    }

    /// β₂: for `S = {i : x_i = y_i}` the weight is
    /// `(n/k)^{q|S|} / (Z · 2^{n-|S|} · m^n · C(n,|S|))`. Diagonal pairs `x = y`
    /// carry weight too.
    pub fn beta2(params: &SchemeParams) -> Result<Self> {
        let torus = params.torus();
        let n = params.n;
        let z = beta2_normalizer(n, params.k, params.q);
        let ratio = rational::pow(&rational::frac(n as i64, params.k as i64), params.q);
        let size = rational::int(torus.size() as i64);
        let table: Vec<Rational> = (0..=n)
            .map(|s| {
                let den = z.clone()
                    * rational::pow(&rational::int(2), (n - s) as u32)
                    * size.clone()
                    * rational::big(&rational::binomial(n as u64, s as u64));
                rational::pow(&ratio, s as u32) / den
            })
            .collect();
        EdgeMeasure::from_rule(torus, "beta2", move |_x, delta| table[zeros(delta)].clone())
    }

    /// β₃ = (β₁ + β₂)/2.
    pub fn beta3(params: &SchemeParams) -> Result<Self> {
        let b1 = EdgeMeasure::beta1(params.torus())?;
        let b2 = EdgeMeasure::beta2(params)?;
        EdgeMeasure::mixture(&[(rational::frac(1, 2), &b1), (rational::frac(1, 2), &b2)])
    }

    /// Convex combination of measures on the same torus.
    pub fn mixture(parts: &[(Rational, &EdgeMeasure)]) -> Result<Self> {
        let torus = parts.first().ok_or_else(|| Error::InvalidParams("empty mixture".into()))?.1.torus;
        if parts.iter().any(|(_, b)| b.torus != torus) {
            return Err(Error::InvalidParams("mixture of edge measures on different tori".into()));
        }
        let mass: Rational = parts.iter().map(|(c, _)| c.clone()).sum();
        if !mass.is_one() || parts.iter().any(|(c, _)| *c < Rational::zero()) {
            return Err(Error::InvalidParams("mixture coefficients must be nonnegative with sum 1".into()));
        }
        let label = parts.iter().map(|(c, b)| format!("{}*{}", rational::to_string(c), b.label)).collect::<Vec<_>>();
        let terms: Vec<(Rational, Arc<Weight>)> = parts.iter().map(|(c, b)| (c.clone(), b.weight.clone())).collect();
        EdgeMeasure::from_rule(torus, label.join("+"), move |x, d| {
            terms.iter().fold(Rational::zero(), |acc, (c, w)| acc + c.clone() * w(x, d))
        })
    }

    /// `β̄(x, y) = (1/n!) Σ_π β(x^π, y^π)`.
    pub fn symmetrized(&self) -> Result<Self> {
        let perms = Permutation::all(self.torus.n());
        let count = rational::int(perms.len() as i64);
        let w = self.weight.clone();
        EdgeMeasure::from_rule(self.torus, format!("sym({})", self.label), move |x, d| {
            let total = perms.iter().fold(Rational::zero(), |acc, p| acc + w(&p.apply(x), &p.apply(d)));
            total / count.clone()
        })
    }

    pub fn torus(&self) -> Torus {
        self.torus
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `β(x, y)` for canonical coordinates; zero unless `y - x ∈ {-1,0,1}^n`.
    pub fn weight(&self, x: &[i64], y: &[i64]) -> Result<Rational> {
        self.torus.check_dim(x.len())?;
        self.torus.check_dim(y.len())?;
        let delta: Vec<i64> = x.iter().zip(y).map(|(a, b)| self.torus.signed_rep(b - a)).collect();
        if delta.iter().any(|d| d.abs() > 1) {
            return Ok(Rational::zero());
        }
        let x: Vec<i64> = x.iter().map(|&c| self.torus.reduce(c)).collect();
        Ok((self.weight)(&x, &delta))
    }

    /// Calls `visit(x_index, y_index, weight)` for every pair with nonzero weight.
    pub fn for_each_edge(&self, mut visit: impl FnMut(usize, usize, &Rational)) {
        let deltas: Vec<Vec<i64>> = all_signs(self.torus.n(), Alphabet::Mixed)
            .into_iter()
            .map(|s| s.into_iter().map(i64::from).collect())
            .collect();
        for x in 0..self.torus.size() {
            let xc = self.torus.coords(x);
            for d in &deltas {
                let w = (self.weight)(&xc, d);
                if !w.is_zero() {
                    visit(x, self.torus.offset_index(x, d), &w);
                }
            }
        }
    }

    pub fn total_mass(&self) -> Rational {
        let mut total = Rational::zero();
        self.for_each_edge(|_, _, w| total += w.clone());
        total
    }

    /// Checks nonnegativity, symmetry and unit mass.
    pub fn validate(&self) -> Result<()> {
        let mut bad = None;
        self.for_each_edge(|x, y, w| {
            if bad.is_some() {
                return;
            }
            if *w < Rational::zero() {
                bad = Some(format!("negative weight at {x}->{y}"));
                return;
            }
            let back = self.weight(&self.torus.coords(y), &self.torus.coords(x)).expect("same torus");
            if back != *w {
                bad = Some(format!("asymmetric weight at {x}<->{y}"));
            }
        });
        if let Some(msg) = bad {
            return Err(Error::Precondition(msg));
        }
        let mass = self.total_mass();
        if !mass.is_one() {
            return Err(Error::Precondition(format!("{} has mass {mass}", self.label)));
        }
        Ok(())
    }
}

/// `Σ_{x,y} β(x,y) ‖f(x) - f(y)‖_p^q`.
pub fn edge_energy<T: Scalar>(f: &TorusFunction<T>, beta: &EdgeMeasure, spec: &NormSpec) -> Result<T> {
    let torus = f.torus();
    if torus != beta.torus {
        return Err(Error::InvalidParams("function and edge measure live on different tori".into()));
    }
    let deltas: Vec<Vec<i64>> = all_signs(torus.n(), Alphabet::Mixed)
        .into_iter()
        .map(|s| s.into_iter().map(i64::from).collect())
        .filter(|d: &Vec<i64>| d.iter().any(|&c| c != 0))
        .collect();
    if T::MODE == crate::torus::Mode::Exact {
        spec_check::<T>(spec)?;
    }
    let total = sum_indices::<T, _>(torus.size(), |x| {
        let xc = torus.coords(x);
        deltas.iter().fold(T::zero(), |acc, d| {
            let w = (beta.weight)(&xc, d);
            if w.is_zero() {
                return acc;
            }
            let diff = f.diff(x, torus.offset_index(x, d));
            let norm = T::norm_q_power(&diff, spec).expect("norm checked up front");
            acc + T::from_rational(&w) * norm
        })
    });
    Ok(total)
}

fn spec_check<T: Scalar>(spec: &NormSpec) -> Result<()> {
    T::norm_q_power(&[T::zero()], spec).map(|_| ())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use crate::torus::{torus_abs, PNorm};

    #[test]
    fn beta1_weights_and_mass() {
        let t = Torus::new(5, 1).unwrap();
        let b = EdgeMeasure::beta1(t).unwrap();
        assert_eq!(b.weight(&[2], &[3]).unwrap(), frac(1, 10));
        assert_eq!(b.weight(&[2], &[2]).unwrap(), int(0));
        assert_eq!(b.total_mass(), int(1));

        let t = Torus::new(4, 2).unwrap();
        let b = EdgeMeasure::beta1(t).unwrap();
        assert_eq!(b.weight(&[0, 0], &[1, 3]).unwrap(), frac(1, 128));
        assert_eq!(b.weight(&[0, 0], &[1, 0]).unwrap(), frac(1, 128));
        assert_eq!(b.weight(&[0, 0], &[2, 0]).unwrap(), int(0));
        b.validate().unwrap();
    }

    #[test]
    fn beta2_normalizer_example() {
        assert_eq!(beta2_normalizer(2, 4, 2), frac(21, 16));
    }

    #[test]
    fn measures_have_unit_mass() {
        for (n, m, k, q) in [(1, 8, 3, 2), (2, 8, 3, 2), (2, 10, 3, 3), (3, 8, 1, 1)] {
            let p = SchemeParams::new(n, m, k, q).unwrap();
            EdgeMeasure::beta1(p.torus()).unwrap().validate().unwrap();
            EdgeMeasure::beta2(&p).unwrap().validate().unwrap();
            EdgeMeasure::beta3(&p).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn edge_measures_need_m_at_least_three() {
        assert!(EdgeMeasure::beta1(Torus::new(2, 2).unwrap()).is_err());
    }

    #[test]
    fn energy_of_torus_abs() {
        let t = Torus::new(4, 1).unwrap();
        let f = TorusFunction::<Rational>::scalar(t, |x| int(torus_abs(x[0], 4)));
        let b = EdgeMeasure::beta1(t).unwrap();
        let spec = NormSpec::new(PNorm::Finite(2), 2.0).unwrap();
        assert_eq!(edge_energy(&f, &b, &spec).unwrap(), int(1));
        let ff = TorusFunction::<f64>::scalar(t, |x| torus_abs(x[0], 4) as f64);
        assert!((edge_energy(&ff, &b, &spec).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetrization_of_symmetric_measure_is_identity() {
        let p = SchemeParams::new(2, 8, 3, 2).unwrap();
        let b = EdgeMeasure::beta2(&p).unwrap();
        let s = b.symmetrized().unwrap();
        let t = p.torus();
        for x in 0..t.size() {
            for y in [t.offset_index(x, &[1, 0]), t.offset_index(x, &[1, -1])] {
                let (xc, yc) = (t.coords(x), t.coords(y));
                assert_eq!(b.weight(&xc, &yc).unwrap(), s.weight(&xc, &yc).unwrap());
            }
        }
    }
}
