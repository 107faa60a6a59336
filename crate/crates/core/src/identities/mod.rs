//! The signed indicator sums `b_{i,j}` and `a`, the `±k` counting
//! functionals, and exact verification of the identities relating them.
//!
//! Offsets `z` are given in any integer representation; membership tests
//! compare residues mod `m`.

mod report;
mod sums;

pub use report::{Sweep, SweepMode, VerificationReport};
pub use sums::{verify_weighted_sums, WeightedSumsReport};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::bernoulli::BernoulliTable;
use crate::error::{Error, Result};
use crate::kernels::{cartesian, evens, odds, SchemeParams};
use crate::rational::{self, Rational};
use crate::torus::{all_signs, Alphabet, Torus};

/// Numbers of coordinates congruent to `k` and to `-k` mod `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct KCounts {
    pub pk: usize,
    pub mk: usize,
}

impl KCounts {
    pub fn pmk(&self) -> usize {
        self.pk + self.mk
    }

    pub fn pmmk(&self) -> i64 {
        self.pk as i64 - self.mk as i64
    }
}

pub fn k_counts(y: &[i64], params: &SchemeParams) -> KCounts {
    let t = params.torus();
    let (plus, minus) = (t.reduce(params.k_i64()), t.reduce(-params.k_i64()));
    let mut c = KCounts { pk: 0, mk: 0 };
    for &v in y {
        let r = t.reduce(v);
        if r == plus {
            c.pk += 1;
        } else if r == minus {
            c.mk += 1;
        }
    }
    c
}

/// Counts of `y ⊙ ε`.
pub fn k_counts_signed(y: &[i64], eps: &[i8], params: &SchemeParams) -> Result<KCounts> {
    check_signs(params.n, eps)?;
    check_len(params.n, y.len())?;
    let prod: Vec<i64> = y.iter().zip(eps).map(|(&v, &e)| v * e as i64).collect();
    Ok(k_counts(&prod, params))
}

fn check_len(n: usize, got: usize) -> Result<()> {
    if got != n {
        return Err(Error::DimensionMismatch { expected: n, got });
    }
    Ok(())
}

fn check_signs(n: usize, eps: &[i8]) -> Result<()> {
    check_len(n, eps.len())?;
    if eps.iter().any(|&e| e != 1 && e != -1) {
        return Err(Error::InvalidParams(format!("{eps:?} is not a vector of ±1")));
    }
    Ok(())
}

/// The odd box `𝕊 = { y ∈ [-k,k]^n : every y_t odd }`, lexicographic, as
/// signed vectors. Has `(k+1)^n` points.
pub fn odd_box(params: &SchemeParams) -> Vec<Vec<i64>> {
    cartesian(&vec![odds(params.k_i64()); params.n])
}

/// Whether the residue class of `z` meets `𝕊`.
pub fn in_odd_box(z: &[i64], params: &SchemeParams) -> bool {
    let t = params.torus();
    z.len() == params.n
        && z.iter().all(|&v| {
            let s = t.signed_rep(v);
            s.rem_euclid(2) == 1 && s.abs() <= params.k_i64()
        })
}

fn congruent(t: &Torus, a: i64, b: i64) -> bool {
    t.reduce(a) == t.reduce(b)
}

/// `z_c ∈ center + L`, with `L` the even integers in `(-k, k)`, tested by
/// walking `L`.
fn in_shifted_evens(t: &Torus, z: i64, center: i64, evens: &[i64]) -> bool {
    evens.iter().any(|&l| congruent(t, z, center + l))
}

fn subsets_of_size(n: usize, i: usize) -> impl Iterator<Item = u32> {
    (0u32..1 << n).filter(move |s| s.count_ones() as usize == i)
}

/// `b_{i,j}(z, ε)` by enumerating every `S ⊆ [n]` with `|S| = i` and every
/// `δ ∈ {-1,1}^S` with `⟨δ, ε_S⟩ = i - 2j`.
pub fn b_bruteforce(z: &[i64], eps: &[i8], i: usize, j: usize, params: &SchemeParams) -> Result<i64> {
    check_len(params.n, z.len())?;
    check_signs(params.n, eps)?;
    if j > i || i > params.n {
        return Err(Error::InvalidParams(format!("need 0 ≤ j ≤ i ≤ n, got i={i}, j={j}")));
    }
    let t = params.torus();
    let k = params.k_i64();
    let ev = evens(k);
    let n = params.n;
    let target = i as i64 - 2 * j as i64;
    let mut total = 0i64;
    for s in subsets_of_size(n, i) {
        let members: Vec<usize> = (0..n).filter(|c| s >> c & 1 == 1).collect();
        for bits in 0u32..1 << i {
            let delta = |pos: usize| if bits >> pos & 1 == 1 { 1i64 } else { -1 };
            let inner: i64 = members.iter().enumerate().map(|(pos, &c)| delta(pos) * eps[c] as i64).sum();
            if inner != target {
                continue;
            }
            let on_s = members.iter().enumerate().all(|(pos, &c)| congruent(&t, z[c], delta(pos) * k));
            if !on_s {
                continue;
            }
            let off = |sign: i64| {
                (0..n).filter(|c| s >> c & 1 == 0).all(|c| in_shifted_evens(&t, z[c], sign * eps[c] as i64, &ev))
            };
            total += off(1) as i64 - off(-1) as i64;
        }
    }
    Ok(total)
}

/// `a(z, ε) = Σ_j ε_j (1_{e_j + S(j,k)}(z) - 1_{-e_j + S(j,k)}(z))`.
pub fn a_bruteforce(z: &[i64], eps: &[i8], params: &SchemeParams) -> Result<i64> {
    check_len(params.n, z.len())?;
    check_signs(params.n, eps)?;
    let t = params.torus();
    let k = params.k_i64();
    let (ev, od) = (evens(k), odds(k));
    let in_shifted = |j: usize, sign: i64| {
        (0..params.n).all(|c| {
            let shift = if c == j { sign } else { 0 };
            let allowed = if c == j { &ev } else { &od };
            allowed.iter().any(|&v| congruent(&t, z[c], v + shift))
        })
    };
    Ok((0..params.n).map(|j| eps[j] as i64 * (in_shifted(j, 1) as i64 - in_shifted(j, -1) as i64)).sum())
}

/// Closed form of `b_{i,j}(z, ε)` on `𝕊` for `i < pmk(z)`.
pub fn b_closed_form(z: &[i64], eps: &[i8], i: usize, j: usize, params: &SchemeParams) -> Result<i64> {
    check_signs(params.n, eps)?;
    if !in_odd_box(z, params) {
        return Err(Error::Precondition(format!("{z:?} is outside the odd box")));
    }
    let c = k_counts_signed(z, eps, params)?;
    let pmk = c.pmk() as i64;
    if j > i || i as i64 >= pmk {
        return Err(Error::Precondition(format!(
            "closed form needs j ≤ i < pmk(z) = {pmk}, got i={i}, j={j}"
        )));
    }
    let (i, j) = (i as i64, j as i64);
    Ok(if c.mk as i64 == j {
        rational::binomial_i64(pmk - j, i - j)
    } else if c.pk as i64 == i - j {
        -rational::binomial_i64(pmk - (i - j), j)
    } else {
        0
    })
}

/// `h_{α,β} = B_{α-β,β}`.
pub fn h_coeff(alpha: usize, beta: usize, table: &BernoulliTable) -> Result<Rational> {
    if beta > alpha {
        return Err(Error::InvalidParams(format!("h needs β ≤ α, got α={alpha}, β={beta}")));
    }
    table
        .get(alpha - beta, beta)
        .cloned()
        .ok_or(Error::OutOfRange { index: alpha, size: table.max_index() + 1 })
}

fn index_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..=n).flat_map(|i| (0..=i).map(move |j| (i, j))).collect()
}

/// The `(point, sign)` index pairs a sweep visits: everything when the
/// domain fits the budget, otherwise a seeded sample of `budget` pairs.
pub(crate) fn tuples(points: usize, signs: usize, sweep: &Sweep) -> (Vec<(usize, usize)>, SweepMode) {
    let total = points as u128 * signs as u128;
    if total <= sweep.budget as u128 {
        let all = (0..points).flat_map(|p| (0..signs).map(move |e| (p, e))).collect();
        return (all, SweepMode::Exhaustive);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sweep.seed);
    let mut picked = sample(&mut rng, total as usize, sweep.budget as usize).into_vec();
    picked.sort_unstable();
    (picked.into_iter().map(|t| (t / signs, t % signs)).collect(), SweepMode::Sampled(sweep.seed))
}

fn run_sweep(
    identity: &str,
    params: &SchemeParams,
    points: &[Vec<i64>],
    sweep: &Sweep,
    check: impl Fn(&[i64], &[i8]) -> (u64, Vec<String>) + Sync,
) -> VerificationReport {
    let signs = all_signs(params.n, Alphabet::Full);
    let (work, mode) = tuples(points.len(), signs.len(), sweep);
    let results: Vec<(u64, Vec<String>)> = work.par_iter().map(|&(p, e)| check(&points[p], &signs[e])).collect();
    let mut report = VerificationReport::new(identity, domain_json(params), mode);
    for (count, failures) in results {
        report.checked += count;
        report.extend_failures(failures);
    }
    report
}

pub(crate) fn domain_json(params: &SchemeParams) -> serde_json::Value {
    json!({ "n": params.n, "m": params.m, "k": params.k })
}

/// Brute-force `b_{i,j}` against the closed form (`i < pmk`) or zero
/// (`i ≥ pmk`) on `𝕊`, together with `a(z, ε) = pMmk(z ⊙ ε)`.
pub fn verify_closed_form(params: &SchemeParams, sweep: &Sweep) -> VerificationReport {
    let pairs = index_pairs(params.n);
    run_sweep("b_closed_form", params, &odd_box(params), sweep, |z, eps| {
        let mut failures = Vec::new();
        let pmk = k_counts(z, params).pmk();
        for &(i, j) in &pairs {
            let brute = b_bruteforce(z, eps, i, j, params).expect("valid inputs");
            let want = if i < pmk { b_closed_form(z, eps, i, j, params).expect("in range") } else { 0 };
            if brute != want {
                failures.push(format!("z={z:?} eps={eps:?} i={i} j={j}: brute {brute}, expected {want}"));
            }
        }
        let a = a_bruteforce(z, eps, params).expect("valid inputs");
        let want = k_counts_signed(z, eps, params).expect("valid inputs").pmmk();
        if a != want {
            failures.push(format!("z={z:?} eps={eps:?}: a = {a}, pMmk = {want}"));
        }
        (pairs.len() as u64 + 1, failures)
    })
}

/// `b_{i,j}(z, ε) = 0` on `𝕊` whenever `i ≥ pmk(z)`.
pub fn verify_vanishing(params: &SchemeParams, sweep: &Sweep) -> VerificationReport {
    let pairs = index_pairs(params.n);
    run_sweep("b_vanishing", params, &odd_box(params), sweep, |z, eps| {
        let pmk = k_counts(z, params).pmk();
        let mut checked = 0;
        let mut failures = Vec::new();
        for &(i, j) in pairs.iter().filter(|(i, _)| *i >= pmk) {
            checked += 1;
            let b = b_bruteforce(z, eps, i, j, params).expect("valid inputs");
            if b != 0 {
                failures.push(format!("z={z:?} eps={eps:?} i={i} j={j}: b = {b}"));
            }
        }
        (checked, failures)
    })
}

/// `a` and every `b_{i,j}` vanish at residues outside `𝕊`.
pub fn verify_off_box(params: &SchemeParams, sweep: &Sweep) -> VerificationReport {
    let t = params.torus();
    let outside: Vec<Vec<i64>> =
        (0..t.size()).map(|i| t.coords(i)).filter(|z| !in_odd_box(z, params)).collect();
    let pairs = index_pairs(params.n);
    run_sweep("off_box_vanishing", params, &outside, sweep, |z, eps| {
        let mut failures = Vec::new();
        for &(i, j) in &pairs {
            let b = b_bruteforce(z, eps, i, j, params).expect("valid inputs");
            if b != 0 {
                failures.push(format!("z={z:?} eps={eps:?} i={i} j={j}: b = {b}"));
            }
        }
        let a = a_bruteforce(z, eps, params).expect("valid inputs");
        if a != 0 {
            failures.push(format!("z={z:?} eps={eps:?}: a = {a}"));
        }
        (pairs.len() as u64 + 1, failures)
    })
}

/// `Σ_{α ≤ n} Σ_{β ≤ α} h_{α,β} b_{α,β}(y, ε)`.
pub fn expansion_rhs(y: &[i64], eps: &[i8], params: &SchemeParams, table: &BernoulliTable) -> Result<Rational> {
    let mut total = Rational::from_integer(0.into());
    for (a, b) in index_pairs(params.n) {
        let bv = b_bruteforce(y, eps, a, b, params)?;
        if bv != 0 {
            total += h_coeff(a, b, table)? * rational::int(bv);
        }
    }
    Ok(total)
}

/// `pMmk(y ⊙ ε) = Σ h_{α,β} b_{α,β}(y, ε)` on `𝕊`. Off `𝕊` the right side
/// vanishes while `pMmk` need not (e.g. `y = (k, 0)`), so there only the
/// vanishing of the right side is checked.
pub fn verify_expansion(params: &SchemeParams, table: &BernoulliTable, sweep: &Sweep) -> Result<VerificationReport> {
    if table.max_index() < params.n {
        return Err(Error::OutOfRange { index: params.n, size: table.max_index() + 1 });
    }
    let t = params.torus();
    let all: Vec<Vec<i64>> = (0..t.size()).map(|i| t.coords(i)).collect();
    Ok(run_sweep("expansion", params, &all, sweep, |y, eps| {
        let rhs = expansion_rhs(y, eps, params, table).expect("table covers n");
        let want = if in_odd_box(y, params) {
            rational::int(k_counts_signed(y, eps, params).expect("valid inputs").pmmk())
        } else {
            rational::int(0)
        };
        let failures = if rhs == want {
            Vec::new()
        } else {
            vec![format!("y={y:?} eps={eps:?}: rhs {}, expected {}", rational::to_string(&rhs), rational::to_string(&want))]
        };
        (1, failures)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernoulli::bivariate_bernoulli;
    use crate::rational::{frac, int};

    fn params(n: usize, m: u32, k: u32) -> SchemeParams {
        SchemeParams::new(n, m, k, 2).unwrap()
    }

    #[test]
    fn counts_examples() {
        let p = params(2, 8, 3);
        assert_eq!(k_counts(&[3, 5], &p), KCounts { pk: 1, mk: 1 });
        assert_eq!(k_counts(&[3, 5], &p).pmmk(), 0);
        assert_eq!(k_counts(&[3, 3], &p).pmmk(), 2);
        assert_eq!(k_counts(&[1, -2], &p).pmk(), 0);
        assert_eq!(k_counts_signed(&[3, 5], &[-1, 1], &p).unwrap(), KCounts { pk: 0, mk: 2 });
    }

    #[test]
    fn odd_box_size() {
        for (n, k) in [(1, 1), (2, 3), (3, 3)] {
            let p = params(n, 8, k);
            let pts = odd_box(&p);
            assert_eq!(pts.len(), (k as usize + 1).pow(n as u32));
            assert!(pts.iter().all(|z| in_odd_box(z, &p)));
        }
        assert!(!in_odd_box(&[2, 1], &params(2, 8, 3)));
        assert!(in_odd_box(&[5, 1], &params(2, 8, 3)));
        assert!(!in_odd_box(&[5, 1], &params(2, 12, 3)));
    }

    #[test]
    fn b_and_a_examples() {
        let p = params(1, 8, 1);
        assert_eq!(b_bruteforce(&[1], &[1], 0, 0, &p).unwrap(), 1);
        assert_eq!(a_bruteforce(&[1], &[1], &p).unwrap(), 1);
        let p = params(2, 8, 3);
        assert_eq!(b_bruteforce(&[2, 1], &[1, 1], 1, 0, &p).unwrap(), 0);
        assert_eq!(a_bruteforce(&[2, 1], &[1, -1], &p).unwrap(), 0);
        assert!(b_bruteforce(&[1, 1], &[1, 1], 0, 1, &p).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let p = params(2, 8, 3);
        // pmk = 2, mk(z⊙ε) = 0
        assert_eq!(b_closed_form(&[3, 3], &[1, 1], 1, 0, &p).unwrap(), 2);
        // z⊙ε = (3, -3): mk = 1 selects the first case at j = 1, pk = 1 the second at j = 0
        assert_eq!(b_closed_form(&[3, -3], &[1, 1], 1, 1, &p).unwrap(), 1);
        assert_eq!(b_closed_form(&[3, -3], &[1, 1], 1, 0, &p).unwrap(), -1);
        assert_eq!(b_closed_form(&[3, 3], &[1, 1], 1, 1, &p).unwrap(), 0);
        for (i, j) in [(1, 1), (1, 0)] {
            let z = [3, -3];
            assert_eq!(b_bruteforce(&z, &[1, 1], i, j, &p).unwrap(), b_closed_form(&z, &[1, 1], i, j, &p).unwrap());
        }
        assert!(b_closed_form(&[3, 1], &[1, 1], 1, 0, &p).is_err());
        assert!(b_closed_form(&[2, 1], &[1, 1], 0, 0, &p).is_err());
    }

    #[test]
    fn h_examples() {
        let t = bivariate_bernoulli(4);
        assert_eq!(h_coeff(0, 0, &t).unwrap(), int(1));
        assert_eq!(h_coeff(1, 0, &t).unwrap(), frac(1, 2));
        assert_eq!(h_coeff(1, 1, &t).unwrap(), frac(1, 2));
        assert_eq!(h_coeff(2, 1, &t).unwrap(), frac(1, 3));
        assert!(h_coeff(1, 2, &t).is_err());
        assert!(h_coeff(9, 0, &t).is_err());
    }

    #[test]
    fn small_sweeps_pass() {
        let table = bivariate_bernoulli(3);
        let sweep = Sweep::default();
        for (n, k) in [(1, 1), (2, 1), (2, 3)] {
            let p = params(n, 8, k);
            for r in [
                verify_closed_form(&p, &sweep),
                verify_vanishing(&p, &sweep),
                verify_off_box(&p, &sweep),
                verify_expansion(&p, &table, &sweep).unwrap(),
            ] {
                assert!(r.passed(), "{}", r.to_json());
                assert_eq!(r.mode, SweepMode::Exhaustive);
            }
        }
    }

    #[test]
    fn expansion_off_box_counterexample() {
        let p = params(2, 8, 3);
        let table = bivariate_bernoulli(2);
        assert_eq!(expansion_rhs(&[3, 0], &[1, 1], &p, &table).unwrap(), int(0));
        assert_eq!(k_counts(&[3, 0], &p).pmmk(), 1);
    }

    #[test]
    fn sampled_sweep_is_seeded() {
        let p = params(2, 8, 3);
        let sweep = Sweep { budget: 10, seed: 7 };
        let a = verify_closed_form(&p, &sweep);
        let b = verify_closed_form(&p, &sweep);
        assert_eq!(a.mode, SweepMode::Sampled(7));
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.checked, 10 * 7);
    }
}
