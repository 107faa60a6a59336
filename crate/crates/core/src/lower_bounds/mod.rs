//! Witnesses for the lower bounds on the constants of any smoothing and
//! approximation scheme: the truncated jigsaw, marginal quantities, the
//! point-mass witness, and the lattice walk behind the `S(j,k)` smoothing bound.

mod symmetrize;

pub use symmetrize::{
    random_kernel, symmetrize, verify_conv_perm, verify_norm_identity, verify_symmetrization, SymmetrizedScheme,
};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::check::Check;
use crate::error::{Error, Result};
use crate::identities::{k_counts, odd_box};
use crate::kernels::{Kernel, SchemeParams};
use crate::rational::{self, Rational};
use crate::torus::{all_signs, torus_abs, Alphabet, Torus, TorusFunction};

/// The truncated jigsaw `g_s`: with `r` the representative of `t` mod `12s`
/// in `[-6s, 6s)`, `g_s(t) = min(max(|r| - s, 0), s)`.
pub fn jigsaw(t: i64, s: i64) -> i64 {
    assert!(s >= 1, "jigsaw scale must be positive");
    let period = 12 * s;
    let r = (t + 6 * s).rem_euclid(period) - 6 * s;
    (r.abs() - s).clamp(0, s)
}

/// `f_s(x) = (g_s(x_1), …, g_s(x_n))` evaluated on canonical residues, and
/// whether `12s` fails to divide `m` (then `f_s` is not periodic on the torus).
pub fn jigsaw_vector_fn(s: i64, torus: Torus) -> (TorusFunction<Rational>, bool) {
    let f = TorusFunction::from_fn(torus, torus.n(), |x| x.iter().map(|&c| rational::int(jigsaw(c, s))).collect())
        .expect("one value per coordinate");
    (f, torus.m() as i64 % (12 * s) != 0)
}

/// Checks, for every `s ≤ s_max` over one period: `0 ≤ g_s ≤ s`,
/// 1-Lipschitz, `12s`-periodic, zero on `[0, s] ∪ [11s, 12s)`, and
/// `g_s(x - y) ≥ s` there whenever `3s ≤ |y| ≤ 4s`.
pub fn verify_jigsaw_properties(s_max: i64) -> Check {
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for s in 1..=s_max {
        let period = 12 * s;
        for t in 0..period {
            checked += 1;
            let g = jigsaw(t, s);
            if !(0..=s).contains(&g) || (jigsaw(t + 1, s) - g).abs() > 1 || jigsaw(t + period, s) != g {
                failures.push(format!("s={s} t={t}"));
            }
        }
        for x in (0..=s).chain(period - s..period) {
            checked += 1;
            let far = (3 * s..=4 * s).flat_map(|y| [y, -y]).all(|y| jigsaw(x - y, s) >= s);
            if jigsaw(x, s) != 0 || !far {
                failures.push(format!("s={s} window x={x}"));
            }
        }
    }
    let detail = match failures.first() {
        None => format!("{checked} cases, s <= {s_max}"),
        Some(f) => format!("{} failures, first {f}", failures.len()),
    };
    Check::new("jigsaw_properties", failures.is_empty(), detail)
}

/// The threshold used for the tail check: the largest odd `s ≤ (k-1)/2`,
/// for which the `S(j,k)` tail is `(k - s)/k > 1/2`. `None` for `k = 1`.
pub fn tail_threshold(k: u32) -> Option<i64> {
    let half = (k as i64 - 1) / 2;
    let s = if half % 2 == 1 { half } else { half - 1 };
    (s >= 1).then_some(s)
}

/// A probability distribution on ℤ_m.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarginalDistribution {
    probs: Vec<Rational>,
}

impl MarginalDistribution {
    pub fn new(probs: Vec<Rational>) -> Result<Self> {
        if probs.iter().any(|p| p.is_negative()) {
            return Err(Error::InvalidParams("negative probability".into()));
        }
        let total: Rational = probs.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidParams(format!("marginal mass is {total}")));
        }
        Ok(MarginalDistribution { probs })
    }

    pub fn m(&self) -> usize {
        self.probs.len()
    }

    /// `P(r)` for any integer `r`, read mod `m`.
    pub fn at(&self, r: i64) -> &Rational {
        &self.probs[r.rem_euclid(self.m() as i64) as usize]
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    /// `Σ_z |P(z+1) - P(z-1)|`.
    pub fn variation(&self) -> Rational {
        (0..self.m() as i64).map(|z| (self.at(z + 1) - self.at(z - 1)).abs()).sum()
    }
}

/// `P_j(ν)(r) = Σ_{x_j = r} ν(x)`.
pub fn marginal(nu: &Kernel, j: usize) -> Result<MarginalDistribution> {
    let t = nu.torus();
    if j >= t.n() {
        return Err(Error::OutOfRange { index: j, size: t.n() });
    }
    let mut probs = vec![Rational::zero(); t.m() as usize];
    for (idx, w) in nu.support() {
        probs[t.coords(*idx)[j] as usize] += w;
    }
    MarginalDistribution::new(probs)
}

fn check_family(kernels: &[Kernel]) -> Result<Torus> {
    let t = kernels.first().ok_or_else(|| Error::InvalidParams("empty kernel family".into()))?.torus();
    if kernels.len() != t.n() || kernels.iter().any(|k| k.torus() != t) {
        return Err(Error::InvalidParams(format!("need n = {} kernels on one torus", t.n())));
    }
    Ok(t)
}

/// `(1/n) Σ_j Σ_z |P_j(ν_j)(z+1) - P_j(ν_j)(z-1)|`.
pub fn marginal_variation(kernels: &[Kernel]) -> Result<Rational> {
    check_family(kernels)?;
    let total: Rational =
        kernels.iter().enumerate().map(|(j, nu)| marginal(nu, j).map(|p| p.variation())).sum::<Result<_>>()?;
    Ok(total / rational::int(kernels.len() as i64))
}

/// `(1/n) Σ_j Σ_{|x_j| > s} ν_j(x)`, with `|·|` the torus absolute value.
pub fn tail_mass(kernels: &[Kernel], s: i64) -> Result<Rational> {
    let t = check_family(kernels)?;
    let mut total = Rational::zero();
    for (j, nu) in kernels.iter().enumerate() {
        for (idx, w) in nu.support() {
            if torus_abs(t.coords(*idx)[j], t.m()) > s {
                total += w;
            }
        }
    }
    Ok(total / rational::int(kernels.len() as i64))
}

/// Quantities of the point-mass witness `f(x) = m^n δ_x ∈ L_1(ℤ_m^n, μ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaWitness {
    pub q: u32,
    /// `N(ε) = Σ_z |Σ_j ε_j (ν_j(z+e_j) - ν_j(z-e_j))|`, the `L_1` norm of the
    /// smoothed Rademacher sum (the same at every `x`), per sign vector.
    pub norms: Vec<Rational>,
    /// `E_τ N(ε)^q`, the smoothing left side for this `f`.
    pub lhs: Rational,
    /// `D_j = Σ_z |ν_j(z-e_j) - ν_j(z+e_j)|`.
    pub gradients: Vec<Rational>,
    /// `Σ_w |P_j(ν_j)(w-1) - P_j(ν_j)(w+1)|`.
    pub marginal_gradients: Vec<Rational>,
}

/// Work cap `2^n · m^n · n` for [`delta_smoothing_value`].
pub const DELTA_BUDGET: u128 = 1 << 26;

pub fn delta_smoothing_value(kernels: &[Kernel], q: u32) -> Result<DeltaWitness> {
    let t = check_family(kernels)?;
    let n = t.n();
    let work = (1u128 << n) * t.size() as u128 * n as u128;
    if work > DELTA_BUDGET {
        return Err(Error::BudgetExceeded { needed: work, budget: DELTA_BUDGET });
    }
    let unit = |j: usize, a: i64| {
        let mut v = vec![0i64; n];
        v[j] = a;
        v
    };
    let grads: Vec<Vec<Rational>> = kernels
        .iter()
        .enumerate()
        .map(|(j, nu)| {
            (0..t.size())
                .map(|z| nu.weight_at(t.offset_index(z, &unit(j, 1))) - nu.weight_at(t.offset_index(z, &unit(j, -1))))
                .collect()
        })
        .collect();
    let signs = all_signs(n, Alphabet::Full);
    let norms: Vec<Rational> = signs
        .iter()
        .map(|eps| {
            (0..t.size())
                .map(|z| {
                    let s: Rational = grads
                        .iter()
                        .zip(eps)
                        .map(|(g, &e)| if e > 0 { g[z].clone() } else { -g[z].clone() })
                        .sum();
                    s.abs()
                })
                .sum()
        })
        .collect();
    let lhs = norms.iter().map(|v| rational::pow(v, q)).sum::<Rational>() / rational::int(signs.len() as i64);
    let gradients = grads.iter().map(|g| g.iter().map(|v| v.abs()).sum()).collect();
    let marginal_gradients =
        kernels.iter().enumerate().map(|(j, nu)| marginal(nu, j).map(|p| p.variation())).collect::<Result<_>>()?;
    Ok(DeltaWitness { q, norms, lhs, gradients, marginal_gradients })
}

impl DeltaWitness {
    /// `E_τ N^q ≥ (Σ_j D_j² / 2)^{q/2}` (compared after squaring), from
    /// `E|Σ ε_j a_j| ≥ ‖a‖_2 / √2`, Minkowski and Jensen; `D_j ≥` its
    /// marginal relaxation; equality `E_τ N^q = D_1^q` when `n = 1`.
    pub fn checks(&self) -> Vec<Check> {
        let half_sum: Rational =
            self.gradients.iter().map(|d| d * d).sum::<Rational>() / rational::int(2);
        let lower = rational::pow(&half_sum, self.q);
        let lhs_sq = &self.lhs * &self.lhs;
        let mut checks = vec![Check::new(
            "delta_rademacher_lower",
            lhs_sq >= lower,
            format!("lhs^2 {} >= {}", rational::to_string(&lhs_sq), rational::to_string(&lower)),
        )];
        let relaxed = self.gradients.iter().zip(&self.marginal_gradients).all(|(d, p)| d >= p);
        checks.push(Check::new("delta_marginal_relaxation", relaxed, "D_j >= marginal variation for every j"));
        if self.gradients.len() == 1 {
            let exact = rational::pow(&self.gradients[0], self.q);
            checks.push(Check::new(
                "delta_single_coordinate",
                self.lhs == exact,
                format!("{} = {}", rational::to_string(&self.lhs), rational::to_string(&exact)),
            ));
        }
        checks
    }

    pub fn to_json(&self) -> Value {
        let list = |v: &[Rational]| v.iter().map(rational::to_string).collect::<Vec<_>>();
        json!({
            "q": self.q,
            "norms": list(&self.norms),
            "lhs": rational::to_string(&self.lhs),
            "gradients": list(&self.gradients),
            "marginal_gradients": list(&self.marginal_gradients),
        })
    }
}

/// `Σ_{y ∈ 𝕊} |pMmk(y)|` for the `S(j,k)` scheme.
pub fn odd_box_abs_sum(params: &SchemeParams) -> BigInt {
    odd_box(params).iter().map(|y| BigInt::from(k_counts(y, params).pmmk().abs())).sum()
}

/// The law of `Σ_{i ≤ n} ξ_i` for i.i.d. `ξ` on `{-1, 0, 1}` with
/// `P(ξ = ±1) = 1/(k+1)`, stored as integer counts over `(k+1)^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeWalk {
    n: usize,
    k: u32,
    // counts[s + n] = (k+1)^n · P(Σξ = s)
    counts: Vec<BigInt>,
}

impl LatticeWalk {
    pub fn new(n: usize, k: u32) -> Result<Self> {
        Ok(LatticeWalk::sweep(n, k)?.pop().expect("n + 1 entries"))
    }

    /// The laws for `0, 1, …, n_max` steps, built by one pass of the recursion.
    pub fn sweep(n_max: usize, k: u32) -> Result<Vec<Self>> {
        if k % 2 == 0 {
            return Err(Error::InvalidParams(format!("k={k} must be odd")));
        }
        let mut out = vec![LatticeWalk { n: 0, k, counts: vec![BigInt::one()] }];
        let zero_weight = BigInt::from(k - 1);
        for n in 1..=n_max {
            let prev = &out[n - 1].counts;
            let mut next = vec![BigInt::zero(); 2 * n + 1];
            for (i, c) in prev.iter().enumerate() {
                // prev index i is s + n - 1; next index is s + n
                next[i] += c;
                next[i + 1] += c * &zero_weight;
                next[i + 2] += c;
            }
            out.push(LatticeWalk { n, k, counts: next });
        }
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `p = P(ξ ≠ 0) = 2/(k+1)`.
    pub fn p(&self) -> Rational {
        rational::frac(2, self.k as i64 + 1)
    }

    fn total(&self) -> BigInt {
        num_traits::pow(BigInt::from(self.k + 1), self.n)
    }

    pub fn probability(&self, s: i64) -> Rational {
        let idx = s + self.n as i64;
        if idx < 0 || idx as usize >= self.counts.len() {
            return Rational::zero();
        }
        Rational::new(self.counts[idx as usize].clone(), self.total())
    }

    fn weighted(&self, w: impl Fn(i64) -> BigInt) -> Rational {
        let sum: BigInt = self.counts.iter().enumerate().map(|(i, c)| c * w(i as i64 - self.n as i64)).sum();
        Rational::new(sum, self.total())
    }

    /// `E[Z]` with `Z = |Σ ξ_i|`.
    pub fn expected_abs(&self) -> Rational {
        self.weighted(|s| BigInt::from(s.abs()))
    }

    /// `E[Z^r]`.
    pub fn moment(&self, r: u32) -> Rational {
        self.weighted(|s| num_traits::pow(BigInt::from(s), r as usize))
    }

    pub fn second_moment_formula(&self) -> Rational {
        rational::int(self.n as i64) * self.p()
    }

    /// `np + n(n-1)p²`, as stated in the source of the bound.
    pub fn fourth_moment_stated(&self) -> Rational {
        let (n, p) = (rational::int(self.n as i64), self.p());
        &n * &p + &n * (&n - rational::int(1)) * &p * &p
    }

    /// `np + 3n(n-1)p²`, from `E[ξ⁴] = E[ξ²] = p` and independence.
    pub fn fourth_moment_exact(&self) -> Rational {
        let (n, p) = (rational::int(self.n as i64), self.p());
        &n * &p + rational::int(3) * &n * (&n - rational::int(1)) * &p * &p
    }

    /// Whether `E[Z]` lies within a factor `c` of `min(√(np), np)`.
    pub fn within_factor_of_scale(&self, c: i64) -> bool {
        self.within_scale(&rational::frac(1, c), &rational::int(c))
    }

    /// Whether `lo · min(√(np), np) ≤ E[Z] ≤ hi · min(√(np), np)`, decided
    /// exactly (squares are compared in the `√(np)` regime).
    pub fn within_scale(&self, lo: &Rational, hi: &Rational) -> bool {
        let (ez, np) = (self.expected_abs(), self.second_moment_formula());
        if np >= rational::int(1) {
            let ez2 = &ez * &ez;
            ez2 >= lo * lo * &np && ez2 <= hi * hi * &np
        } else {
            ez >= lo * &np && ez <= hi * &np
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "k": self.k,
            "p": rational::to_string(&self.p()),
            "expected_abs": rational::to_string(&self.expected_abs()),
            "second_moment": rational::to_string(&self.moment(2)),
            "fourth_moment": rational::to_string(&self.moment(4)),
        })
    }
}
