//! Rademacher and metric cotype ratios, the empirical constants of a
//! smoothing and approximation scheme, and the inequalities that chain them.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::check::Check;
use crate::error::{Error, Result};
use crate::kernels::{e_j, edge_energy, EdgeMeasure, SchemeParams};
use crate::rational::{self, Rational};
use crate::torus::{all_signs, norm_f64, sum_indices, Alphabet, NormSpec, PNorm, Scalar, TorusFunction};

/// Largest `n` for which sign sums are enumerated.
pub const MAX_SIGN_DIM: usize = 24;

fn signed_sum<T: Scalar>(xs: &[Vec<T>], eps: &[i8]) -> Vec<T> {
    let d = xs[0].len();
    let mut acc = vec![T::zero(); d];
    for (x, &e) in xs.iter().zip(eps) {
        for (a, v) in acc.iter_mut().zip(x) {
            *a = if e > 0 { a.clone() + v.clone() } else { a.clone() - v.clone() };
        }
    }
    acc
}

fn check_vectors<T: Scalar>(xs: &[Vec<T>]) -> Result<()> {
    if xs.is_empty() || xs.len() > MAX_SIGN_DIM {
        return Err(Error::InvalidParams(format!("need 1 ≤ n ≤ {MAX_SIGN_DIM} vectors, got {}", xs.len())));
    }
    let d = xs[0].len();
    if let Some(bad) = xs.iter().find(|x| x.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: bad.len() });
    }
    Ok(())
}

/// `E_ε ‖Σ_j ε_j x_j‖^q` over `ε ∈ {-1,1}^n`.
pub fn rademacher_average<T: Scalar>(xs: &[Vec<T>], spec: &NormSpec) -> Result<T> {
    check_vectors(xs)?;
    let n = xs.len();
    let total = sum_indices::<T, _>(1 << n, |bits| {
        let eps: Vec<i8> = (0..n).map(|j| if bits >> j & 1 == 1 { 1 } else { -1 }).collect();
        T::norm_q_power(&signed_sum(xs, &eps), spec).unwrap_or_else(|_| T::zero())
    });
    T::norm_q_power(&xs[0], spec)?;
    Ok(total / T::from_i64(1 << n))
}

fn sum_of_powers<T: Scalar>(xs: &[Vec<T>], spec: &NormSpec) -> Result<T> {
    xs.iter().try_fold(T::zero(), |acc, x| Ok(acc + T::norm_q_power(x, spec)?))
}

/// `Σ_j ‖x_j‖^q / E_ε ‖Σ_j ε_j x_j‖^q`.
pub fn rademacher_cotype_ratio<T: Scalar>(xs: &[Vec<T>], spec: &NormSpec) -> Result<T> {
    let den = rademacher_average(xs, spec)?;
    if den.is_zero() {
        return Err(Error::ZeroDenominator("all vectors are zero"));
    }
    Ok(sum_of_powers(xs, spec)? / den)
}

/// `E_ε ‖Σ_j ε_j x_j‖^p / Σ_j ‖x_j‖^p`, with `p = p_type` as the outer power.
pub fn rademacher_type_ratio<T: Scalar>(xs: &[Vec<T>], p_type: f64, spec: &NormSpec) -> Result<T> {
    let typed = NormSpec::new(spec.p, p_type)?;
    check_vectors(xs)?;
    let den = sum_of_powers(xs, &typed)?;
    if den.is_zero() {
        return Err(Error::ZeroDenominator("all vectors are zero"));
    }
    Ok(rademacher_average(xs, &typed)? / den)
}

/// Both sides of the metric cotype inequality for one function.
#[derive(Clone, Debug, PartialEq)]
pub struct CotypeReport<T> {
    /// `Σ_j E_x ‖f(x + (m/2)e_j) - f(x)‖^q`.
    pub lhs: T,
    /// `E_{σ×μ} ‖f(x + δ) - f(x)‖^q`, before the factor `m^q`.
    pub edge_mean: T,
    /// `m^q · edge_mean`.
    pub rhs: T,
    pub ratio: Option<T>,
    pub params: Value,
    pub f: String,
}

impl<T: Scalar> CotypeReport<T> {
    pub fn to_json(&self) -> Value {
        json!({
            "lhs": self.lhs.to_json(),
            "edge_mean": self.edge_mean.to_json(),
            "rhs": self.rhs.to_json(),
            "ratio": self.ratio.as_ref().map(Scalar::to_json),
            "params": self.params,
            "f": self.f,
        })
    }
}

fn unit(n: usize, j: usize, amount: i64) -> Vec<i64> {
    let mut v = vec![0; n];
    v[j] = amount;
    v
}

/// `E_x ‖g(x + a) - g(x)‖^q`.
fn mean_increment<T: Scalar>(g: &TorusFunction<T>, a: &[i64], spec: &NormSpec) -> Result<T> {
    let t = g.torus();
    T::norm_q_power(&vec![T::zero(); g.dim()], spec)?;
    let total = sum_indices::<T, _>(t.size(), |x| {
        T::norm_q_power(&g.diff(t.offset_index(x, a), x), spec).expect("norm checked")
    });
    Ok(total / T::from_i64(t.size() as i64))
}

/// `E_{δ∼σ} E_x ‖g(x + δ) - g(x)‖^q`, with δ uniform on `{-1,0,1}^n`.
pub fn mixed_edge_mean<T: Scalar>(g: &TorusFunction<T>, spec: &NormSpec) -> Result<T> {
    let n = g.torus().n();
    if n > MAX_SIGN_DIM {
        return Err(Error::InvalidParams(format!("n={n} too large to enumerate signs")));
    }
    let deltas = all_signs(n, Alphabet::Mixed);
    let mut total = T::zero();
    for d in &deltas {
        let a: Vec<i64> = d.iter().map(|&c| c as i64).collect();
        total = total + mean_increment(g, &a, spec)?;
    }
    Ok(total / T::from_i64(deltas.len() as i64))
}

fn ratio<T: Scalar>(num: &T, den: &T) -> Option<T> {
    (!den.is_zero()).then(|| num.clone() / den.clone())
}

/// `Σ_j E‖f(x + (m/2)e_j) - f(x)‖^q` against `m^q E_{σ×μ}‖f(x + δ) - f(x)‖^q`.
pub fn metric_cotype_ratio<T: Scalar>(
    f: &TorusFunction<T>,
    spec: &NormSpec,
    descriptor: &str,
) -> Result<CotypeReport<T>> {
    let t = f.torus();
    if t.m() % 2 != 0 {
        return Err(Error::InvalidParams(format!("metric cotype needs m even, got m={}", t.m())));
    }
    let half = t.m() as i64 / 2;
    let mut lhs = T::zero();
    for j in 0..t.n() {
        lhs = lhs + mean_increment(f, &unit(t.n(), j, half), spec)?;
    }
    let edge_mean = mixed_edge_mean(f, spec)?;
    let rhs = T::from_i64(t.m() as i64).pow_real(spec.q)? * edge_mean.clone();
    Ok(CotypeReport {
        ratio: ratio(&lhs, &rhs),
        lhs,
        edge_mean,
        rhs,
        params: json!({ "n": t.n(), "m": t.m(), "d": f.dim(), "p": spec.p, "q": spec.q }),
        f: descriptor.to_string(),
    })
}

/// Numerators and denominators of the empirical `A^q` and `S^q`.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemeConstants<T> {
    /// `(1/n) Σ_j E_x ‖𝓔_j f - f‖^q`.
    pub approx_num: T,
    /// Edge energy of `f` under β₁.
    pub approx_den: T,
    /// `E_{μ×τ} ‖Σ_j ε_j (𝓔_j f(x+e_j) - 𝓔_j f(x-e_j))‖^q`.
    pub smooth_num: T,
    /// Edge energy of `f` under β₂.
    pub smooth_den: T,
}

impl<T: Scalar> SchemeConstants<T> {
    pub fn a_q(&self) -> Option<T> {
        ratio(&self.approx_num, &self.approx_den)
    }

    pub fn s_q(&self) -> Option<T> {
        ratio(&self.smooth_num, &self.smooth_den)
    }

    pub fn quantities(&self, prefix: &str) -> BTreeMap<String, Value> {
        let null = |v: Option<T>| v.as_ref().map(Scalar::to_json).unwrap_or(Value::Null);
        BTreeMap::from([
            (format!("{prefix}approx_num"), self.approx_num.to_json()),
            (format!("{prefix}approx_den"), self.approx_den.to_json()),
            (format!("{prefix}smooth_num"), self.smooth_num.to_json()),
            (format!("{prefix}smooth_den"), self.smooth_den.to_json()),
            (format!("{prefix}A_q"), null(self.a_q())),
            (format!("{prefix}S_q"), null(self.s_q())),
        ])
    }
}

fn check_spec(params: &SchemeParams, spec: &NormSpec) -> Result<()> {
    if spec.q != params.q as f64 {
        return Err(Error::InvalidParams(format!("norm exponent q={} differs from scheme q={}", spec.q, params.q)));
    }
    Ok(())
}

fn check_torus<T: Scalar>(f: &TorusFunction<T>, params: &SchemeParams) -> Result<()> {
    if f.torus() != params.torus() {
        return Err(Error::InvalidParams("function does not live on the scheme torus".into()));
    }
    Ok(())
}

/// `D_j(x) = 𝓔_j f(x + e_j) - 𝓔_j f(x - e_j)` for every `j`, as functions.
fn smoothed_gradients<T: Scalar>(smoothed: &[TorusFunction<T>]) -> Vec<TorusFunction<T>> {
    smoothed
        .iter()
        .enumerate()
        .map(|(j, g)| {
            let t = g.torus();
            let plus = g.translate(&unit(t.n(), j, 1)).expect("same torus");
            let minus = g.translate(&unit(t.n(), j, -1)).expect("same torus");
            plus.sub(&minus).expect("same shape")
        })
        .collect()
}

/// `E_{μ×τ} ‖Σ_j ε_j D_j(x)‖^q`.
fn rademacher_smoothing<T: Scalar>(grads: &[TorusFunction<T>], spec: &NormSpec) -> Result<T> {
    let t = grads[0].torus();
    let n = grads.len();
    T::norm_q_power(&vec![T::zero(); grads[0].dim()], spec)?;
    let total = sum_indices::<T, _>(t.size(), |x| {
        let rows: Vec<Vec<T>> = grads.iter().map(|g| g.at(x).to_vec()).collect();
        rademacher_average(&rows, spec).expect("checked") * T::from_i64(1 << n)
    });
    Ok(total / T::from_i64(t.size() as i64 * (1 << n)))
}

pub fn scheme_constants<T: Scalar>(
    params: &SchemeParams,
    f: &TorusFunction<T>,
    spec: &NormSpec,
) -> Result<SchemeConstants<T>> {
    check_spec(params, spec)?;
    check_torus(f, params)?;
    let n = params.n;
    let smoothed: Vec<TorusFunction<T>> = (0..n).map(|j| e_j(f, params, j)).collect::<Result<_>>()?;
    let mut approx = T::zero();
    for g in &smoothed {
        approx = approx + g.sub(f)?.mean_norm_q_power(spec)?;
    }
    let grads = smoothed_gradients(&smoothed);
    Ok(SchemeConstants {
        approx_num: approx / T::from_i64(n as i64),
        approx_den: edge_energy(f, &EdgeMeasure::beta1(params.torus())?, spec)?,
        smooth_num: rademacher_smoothing(&grads, spec)?,
        smooth_den: edge_energy(f, &EdgeMeasure::beta2(params)?, spec)?,
    })
}

/// Checks and measured sides produced by [`verify_pipeline`].
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineReport {
    pub checks: Vec<Check>,
    pub quantities: BTreeMap<String, Value>,
}

impl PipelineReport {
    pub fn passed(&self) -> bool {
        crate::check::all_passed(&self.checks)
    }
}

fn pointwise_check(name: &str, failures: Vec<String>, checked: usize) -> Check {
    let detail = match failures.first() {
        None => format!("{checked} cases"),
        Some(first) => format!("{} of {checked} cases fail; first: {first}", failures.len()),
    };
    Check::new(name, failures.is_empty(), detail)
}

/// `‖v‖` when it is exactly representable: scalar targets, `ℓ_1` and `ℓ_∞`.
fn exact_norm<T: Scalar>(v: &[T], p: PNorm) -> Option<T> {
    let spec = if v.len() == 1 { NormSpec::new(PNorm::Infinity, 1.0) } else { NormSpec::new(p, 1.0) }.ok()?;
    spec.is_rational_closed().then(|| T::norm_q_power(v, &spec).ok()).flatten()
}

fn show<T: Scalar>(v: &T) -> String {
    v.to_json().to_string().trim_matches('"').to_string()
}

/// The `ℓ_1` increment bound: `(1/n) Σ_j E‖f(x+e_j) - f(x)‖^q` over
/// `2^q E_{σ×μ}‖f(x+δ) - f(x)‖^q`; `None` when the denominator vanishes.
pub fn quote_ratio<T: Scalar>(f: &TorusFunction<T>, spec: &NormSpec) -> Result<Option<T>> {
    let (num, den) = quote_sides(f, spec)?;
    Ok(ratio(&num, &den))
}

fn quote_sides<T: Scalar>(f: &TorusFunction<T>, spec: &NormSpec) -> Result<(T, T)> {
    let n = f.torus().n();
    let mut axis = T::zero();
    for j in 0..n {
        axis = axis + mean_increment(f, &unit(n, j, 1), spec)?;
    }
    let den = T::from_i64(2).pow_real(spec.q)? * mixed_edge_mean(f, spec)?;
    Ok((axis / T::from_i64(n as i64), den))
}

/// Checks, for one `f` and the `S(j,k)` kernels:
///
/// 1. `‖f(x+(m/2)e_j) - f(x)‖^q ≤ 3^{q-1}(‖𝓔_jf(x+(m/2)e_j) - 𝓔_jf(x)‖^q + ‖𝓔_jf - f‖^q(x+(m/2)e_j) + ‖𝓔_jf - f‖^q(x))`
///    at every `x, j`;
/// 2. `‖𝓔_jf(x+(m/2)e_j) - 𝓔_jf(x)‖^q ≤ (Σ_t ‖·‖)^q ≤ (m/4)^{q-1} Σ_t ‖𝓔_jf(x+2te_j) - 𝓔_jf(x+2(t-1)e_j)‖^q`
///    at every `x, j`; the middle term is computed in floating point when the
///    norm is irrational;
/// 3. `Σ_j E‖f(x+(m/2)e_j) - f(x)‖^q ≤ 3^{q-1}(2 Σ_j E‖𝓔_jf - f‖^q + (m/4)^q Σ_j E‖D_j‖^q)`;
/// 4. `(1/n) Σ_j E‖f(x+e_j) - f(x)‖^q ≤ C 2^q E_{σ×μ}‖f(x+δ) - f(x)‖^q` with `C = quote_constant`.
pub fn verify_pipeline<T: Scalar>(
    f: &TorusFunction<T>,
    params: &SchemeParams,
    spec: &NormSpec,
    quote_constant: &Rational,
) -> Result<PipelineReport> {
    check_spec(params, spec)?;
    check_torus(f, params)?;
    if params.m % 4 != 0 {
        return Err(Error::InvalidParams(format!("pipeline needs 4 | m, got m={}", params.m)));
    }
    let t = params.torus();
    let n = params.n;
    let q = params.q;
    let half = params.m as i64 / 2;
    let quarter = params.m as i64 / 4;
    let three = T::from_i64(3).powi(q - 1);
    let holder = T::from_i64(quarter).powi(q - 1);
    let norm = |v: &[T]| T::norm_q_power(v, spec).expect("norm checked");
    T::norm_q_power(&vec![T::zero(); f.dim()], spec)?;

    let smoothed: Vec<TorusFunction<T>> = (0..n).map(|j| e_j(f, params, j)).collect::<Result<_>>()?;
    let cases: Vec<(usize, usize)> = (0..t.size()).flat_map(|x| (0..n).map(move |j| (x, j))).collect();

    let pointwise: Vec<(Option<String>, Option<String>, Option<String>, Option<String>)> = cases
        .par_iter()
        .map(|&(x, j)| {
            let g = &smoothed[j];
            let far = t.offset_index(x, &unit(n, j, half));
            let lhs = norm(&f.diff(far, x));
            let t1 = norm(&g.diff(far, x));
            let t2 = norm(&g.at(far).iter().zip(f.at(far)).map(|(a, b)| a.clone() - b.clone()).collect::<Vec<_>>());
            let t3 = norm(&g.at(x).iter().zip(f.at(x)).map(|(a, b)| a.clone() - b.clone()).collect::<Vec<_>>());
            let bound = three.clone() * (t1.clone() + t2 + t3);
            let tri = (!lhs.approx_le(&bound)).then(|| format!("x={:?} j={j}: {} > {}", t.coords(x), show(&lhs), show(&bound)));

            let steps: Vec<Vec<T>> = (1..=quarter)
                .map(|s| {
                    let a = t.offset_index(x, &unit(n, j, 2 * s));
                    let b = t.offset_index(x, &unit(n, j, 2 * (s - 1)));
                    g.diff(a, b)
                })
                .collect();
            let powered: T = steps.iter().fold(T::zero(), |acc, v| acc + norm(v));
            let outer = holder.clone() * powered;
            let tel = (!t1.approx_le(&outer)).then(|| format!("x={:?} j={j}: {} > {}", t.coords(x), show(&t1), show(&outer)));

            let (mid_tri, mid_hold) = match steps.iter().map(|v| exact_norm(v, spec.p)).collect::<Option<Vec<T>>>() {
                Some(norms) => {
                    let s = norms.into_iter().fold(T::zero(), |a, b| a + b);
                    let mid = s.powi(q);
                    (
                        (!t1.approx_le(&mid)).then(|| format!("x={:?} j={j}: {} > {}", t.coords(x), show(&t1), show(&mid))),
                        (!mid.approx_le(&outer)).then(|| format!("x={:?} j={j}: {} > {}", t.coords(x), show(&mid), show(&outer))),
                    )
                }
                None => {
                    let to_f = |v: &[T]| v.iter().map(Scalar::to_f64).collect::<Vec<f64>>();
                    let mid: f64 = steps.iter().map(|v| norm_f64(&to_f(v), spec.p)).sum::<f64>().powi(q as i32);
                    let (a, b) = (t1.to_f64(), outer.to_f64());
                    (
                        (!a.approx_le(&mid)).then(|| format!("x={:?} j={j}: {a} > {mid} (float)", t.coords(x))),
                        (!mid.approx_le(&b)).then(|| format!("x={:?} j={j}: {mid} > {b} (float)", t.coords(x))),
                    )
                }
            };
            (tri, tel, mid_tri, mid_hold)
        })
        .collect();
    let collect = |pick: fn(&(Option<String>, Option<String>, Option<String>, Option<String>)) -> &Option<String>| {
        pointwise.iter().filter_map(|r| pick(r).clone()).collect::<Vec<_>>()
    };
    let mut checks = vec![
        pointwise_check("triangle", collect(|r| &r.0), cases.len()),
        pointwise_check("telescope", collect(|r| &r.1), cases.len()),
        pointwise_check("telescope_triangle", collect(|r| &r.2), cases.len()),
        pointwise_check("telescope_holder", collect(|r| &r.3), cases.len()),
    ];

    let mut lhs = T::zero();
    let mut approx = T::zero();
    for (j, g) in smoothed.iter().enumerate() {
        lhs = lhs + mean_increment(f, &unit(n, j, half), spec)?;
        approx = approx + g.sub(f)?.mean_norm_q_power(spec)?;
    }
    let mut smooth = T::zero();
    for d in smoothed_gradients(&smoothed) {
        smooth = smooth + d.mean_norm_q_power(spec)?;
    }
    let integrated = three.clone() * (T::from_i64(2) * approx.clone() + T::from_i64(quarter).powi(q) * smooth.clone());
    checks.push(Check::new(
        "integrated",
        lhs.approx_le(&integrated),
        format!("{} <= {}", show(&lhs), show(&integrated)),
    ));

    let (axis, quote_den) = quote_sides(f, spec)?;
    let c = T::from_rational(quote_constant);
    let quote_rhs = c * quote_den.clone();
    checks.push(Check::new(
        "quote_ell1",
        axis.approx_le(&quote_rhs),
        format!("{} <= {} (C = {})", show(&axis), show(&quote_rhs), rational::to_string(quote_constant)),
    ));

    let quantities = BTreeMap::from([
        ("cotype_lhs".to_string(), lhs.to_json()),
        ("approx_sum".to_string(), approx.to_json()),
        ("smooth_sum".to_string(), smooth.to_json()),
        ("integrated_rhs".to_string(), integrated.to_json()),
        ("quote_lhs".to_string(), axis.to_json()),
        ("quote_rhs".to_string(), quote_rhs.to_json()),
        (
            "quote_ratio".to_string(),
            ratio(&axis, &quote_den).as_ref().map(Scalar::to_json).unwrap_or(Value::Null),
        ),
    ]);
    Ok(PipelineReport { checks, quantities })
}

/// The constant of the assembled bound for real-valued `f` and `q ≥ 2`:
/// `4 · 3^{q-1}`, using cotype constant 1 for ℝ.
pub fn combine_constant(q: u32) -> Rational {
    rational::int(4 * 3i64.pow(q - 1))
}

/// `Σ_j E‖f(x+(m/2)e_j) - f(x)‖^q ≤ C (n A^q + m^q S^q) ∫‖f(x) - f(y)‖^q dβ₃`
/// for real-valued `f`, with `C` from [`combine_constant`].
pub fn verify_combine<T: Scalar>(f: &TorusFunction<T>, params: &SchemeParams, spec: &NormSpec) -> Result<Check> {
    check_spec(params, spec)?;
    if f.dim() != 1 || params.q < 2 {
        return Err(Error::Precondition("the assembled bound is checked for real-valued f and q ≥ 2".into()));
    }
    let cot = metric_cotype_ratio(f, spec, "f")?;
    let sc = scheme_constants(params, f, spec)?;
    let beta3 = EdgeMeasure::beta3(params)?;
    let energy = edge_energy(f, &beta3, spec)?;
    let (Some(a), Some(s)) = (sc.a_q(), sc.s_q()) else {
        return Ok(Check::new("combine", cot.lhs.is_zero(), format!("constant f, lhs {}", show(&cot.lhs))));
    };
    let c = T::from_rational(&combine_constant(params.q));
    let bracket = T::from_i64(params.n as i64) * a + T::from_i64(params.m as i64).powi(params.q) * s;
    let rhs = c * bracket * energy;
    Ok(Check::new("combine", cot.lhs.approx_le(&rhs), format!("{} <= {}", show(&cot.lhs), show(&rhs))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use crate::torus::{torus_abs, Torus};

    fn l2() -> NormSpec {
        NormSpec::new(PNorm::Finite(2), 2.0).unwrap()
    }

    fn abs_fn(m: u32) -> TorusFunction<Rational> {
        TorusFunction::scalar(Torus::new(m, 1).unwrap(), |x| int(torus_abs(x[0], m)))
    }

    #[test]
    fn rademacher_examples() {
        assert_eq!(rademacher_cotype_ratio(&[vec![int(1)]], &l2()).unwrap(), int(1));
        let basis: Vec<Vec<Rational>> =
            (0..3).map(|j| (0..3).map(|i| int((i == j) as i64)).collect()).collect();
        assert_eq!(rademacher_cotype_ratio(&basis, &l2()).unwrap(), int(1));
        assert_eq!(rademacher_type_ratio(&basis, 2.0, &l2()).unwrap(), int(1));
        let ones = vec![vec![int(1)], vec![int(1)]];
        assert_eq!(rademacher_cotype_ratio(&ones, &l2()).unwrap(), int(1));
        assert_eq!(rademacher_type_ratio(&ones, 1.0, &l2()).unwrap(), frac(1, 2));
        assert!(rademacher_cotype_ratio(&[vec![int(0)]], &l2()).is_err());
    }

    #[test]
    fn cotype_example() {
        let r = metric_cotype_ratio(&abs_fn(4), &l2(), "torus_abs").unwrap();
        assert_eq!((r.lhs.clone(), r.rhs.clone()), (int(2), frac(32, 3)));
        assert_eq!(r.ratio, Some(frac(3, 16)));
        let c = TorusFunction::<Rational>::constant(Torus::new(4, 2).unwrap(), &[int(1)]);
        let r = metric_cotype_ratio(&c, &l2(), "const").unwrap();
        assert_eq!(r.ratio, None);
        assert!(metric_cotype_ratio(&abs_fn(5), &l2(), "odd").is_err());
    }

    #[test]
    fn one_coordinate_factorization() {
        let g1 = abs_fn(8);
        let t2 = Torus::new(8, 2).unwrap();
        let g2 = TorusFunction::<Rational>::scalar(t2, |x| int(torus_abs(x[0], 8)));
        let a = metric_cotype_ratio(&g1, &l2(), "g").unwrap();
        let b = metric_cotype_ratio(&g2, &l2(), "g").unwrap();
        assert_eq!(a.lhs, b.lhs);
        assert_eq!(a.edge_mean, b.edge_mean);
    }

    #[test]
    fn scheme_constant_examples() {
        let p = SchemeParams::new(1, 8, 3, 2).unwrap();
        let sc = scheme_constants(&p, &abs_fn(8), &l2()).unwrap();
        assert_eq!(sc.smooth_num, frac(1, 3));
        let p1 = SchemeParams::new(1, 8, 1, 2).unwrap();
        let sc = scheme_constants(&p1, &abs_fn(8), &l2()).unwrap();
        assert_eq!(sc.approx_num, int(0));
        let c = TorusFunction::<Rational>::constant(p.torus(), &[int(4)]);
        let sc = scheme_constants(&p, &c, &l2()).unwrap();
        assert_eq!((sc.a_q(), sc.s_q()), (None, None));
    }

    #[test]
    fn pipeline_on_torus_abs() {
        let p = SchemeParams::new(1, 8, 3, 2).unwrap();
        let r = verify_pipeline(&abs_fn(8), &p, &l2(), &int(3)).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
        assert!(verify_combine(&abs_fn(8), &p, &l2()).unwrap().passed());
        let odd = SchemeParams::new(1, 10, 3, 2).unwrap();
        let f = TorusFunction::<Rational>::scalar(odd.torus(), |x| int(x[0]));
        assert!(verify_pipeline(&f, &odd, &l2(), &int(3)).is_err());
    }

    #[test]
    fn float_mode_agrees() {
        let p = SchemeParams::new(1, 8, 3, 2).unwrap();
        let ff = TorusFunction::<f64>::scalar(p.torus(), |x| torus_abs(x[0], 8) as f64);
        let sc = scheme_constants(&p, &ff, &l2()).unwrap();
        assert!((sc.smooth_num - 1.0 / 3.0).abs() < 1e-12);
        let r = verify_pipeline(&ff, &p, &l2(), &int(3)).unwrap();
        assert!(r.passed());
    }
}
