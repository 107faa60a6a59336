use num_traits::Zero;
use rayon::prelude::*;
use serde_json::Value;

use super::{
    a_bruteforce, b_bruteforce, domain_json, in_odd_box, index_pairs, k_counts_signed, odd_box, tuples, Sweep,
    VerificationReport,
};
use crate::error::Result;
use crate::kernels::{delta_b, e_j, SchemeParams};
use crate::rational::{self, Rational};
use crate::torus::{all_signs, Alphabet, TorusFunction};

/// Reports for the four summation identities checked by
/// [`verify_weighted_sums`].
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSumsReport {
    pub reports: Vec<VerificationReport>,
}

impl WeightedSumsReport {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(VerificationReport::passed)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.reports.iter().map(VerificationReport::to_json).collect())
    }
}

struct Sparse {
    // (offset, value, offset lies in the odd box)
    terms: Vec<(Vec<i64>, i64, bool)>,
}

/// The `(S, δ)` terms of the right side of the `b_{i,j}` identity: the
/// complement mask of `S` and the two evaluation offsets `δk ± ε_{S^c}`.
fn b_rhs_terms(params: &SchemeParams, eps: &[i8], i: usize, j: usize) -> Vec<(usize, Vec<i64>, Vec<i64>)> {
    let n = params.n;
    let k = params.k_i64();
    let mut out = Vec::new();
    for s in (0u32..1 << n).filter(|s| s.count_ones() as usize == i) {
        let members: Vec<usize> = (0..n).filter(|c| s >> c & 1 == 1).collect();
        for bits in 0u32..1 << i {
            let mut delta = vec![0i64; n];
            for (pos, &c) in members.iter().enumerate() {
                delta[c] = if bits >> pos & 1 == 1 { 1 } else { -1 };
            }
            let inner: i64 = members.iter().map(|&c| delta[c] * eps[c] as i64).sum();
            if inner != i as i64 - 2 * j as i64 {
                continue;
            }
            let complement = (!s as usize) & ((1 << n) - 1);
            let shift = |sign: i64| -> Vec<i64> {
                (0..n).map(|c| if s >> c & 1 == 1 { delta[c] * k } else { sign * eps[c] as i64 }).collect()
            };
            out.push((complement, shift(1), shift(-1)));
        }
    }
    out
}

fn add_scaled(acc: &mut [Rational], row: &[Rational], c: &Rational) {
    for (a, v) in acc.iter_mut().zip(row) {
        *a += c * v;
    }
}

fn show(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(rational::to_string).collect();
    format!("[{}]", parts.join(", "))
}

/// Checks, for every `(x, ε)` (or a seeded sample):
///
/// * `Σ_y b_{i,j}(y-x,ε) f(y) = k^{n-i} Σ_{S,δ} (Δ_{S^c} f(x+δk+ε_{S^c}) - Δ_{S^c} f(x+δk-ε_{S^c}))`,
///   and the same with the left sum restricted to `y ∈ x + 𝕊`;
/// * `Σ_y a(y-x,ε) f(y) = k(k+1)^{n-1} Σ_j ε_j (𝓔_j f(x+e_j) - 𝓔_j f(x-e_j))`;
/// * `Σ_j ε_j (𝓔_j f(x+e_j) - 𝓔_j f(x-e_j)) = Σ_{y ∈ x+𝕊} pMmk((y-x)⊙ε) f(y) / (k(k+1)^{n-1})`.
pub fn verify_weighted_sums(
    f: &TorusFunction<Rational>,
    params: &SchemeParams,
    sweep: &Sweep,
) -> Result<WeightedSumsReport> {
    let torus = params.torus();
    if f.torus() != torus {
        return Err(crate::Error::InvalidParams("function does not live on the scheme torus".into()));
    }
    let n = params.n;
    let d = f.dim();
    let k = params.k_i64();
    let signs = all_signs(n, Alphabet::Full);
    let pairs = index_pairs(n);
    let offsets: Vec<Vec<i64>> = (0..torus.size()).map(|i| torus.signed_coords(i)).collect();
    let box_pts = odd_box(params);

    let sparse = |value: &dyn Fn(&[i64]) -> i64| Sparse {
        terms: offsets
            .iter()
            .filter_map(|z| {
                let v = value(z);
                (v != 0).then(|| (z.clone(), v, in_odd_box(z, params)))
            })
            .collect(),
    };
    let b_tables: Vec<Vec<Sparse>> = signs
        .iter()
        .map(|e| {
            pairs
                .iter()
                .map(|&(i, j)| sparse(&|z| b_bruteforce(z, e, i, j, params).expect("valid inputs")))
                .collect()
        })
        .collect();
    let a_tables: Vec<Sparse> =
        signs.iter().map(|e| sparse(&|z| a_bruteforce(z, e, params).expect("valid inputs"))).collect();
    let pmmk_tables: Vec<Vec<(Vec<i64>, i64)>> = signs
        .iter()
        .map(|e| {
            box_pts.iter().map(|z| (z.clone(), k_counts_signed(z, e, params).expect("valid").pmmk())).collect()
        })
        .collect();
    let rhs_terms: Vec<Vec<Vec<(usize, Vec<i64>, Vec<i64>)>>> = signs
        .iter()
        .map(|e| pairs.iter().map(|&(i, j)| b_rhs_terms(params, e, i, j)).collect())
        .collect();

    let deltas: Vec<TorusFunction<Rational>> = (0..1usize << n)
        .map(|mask| {
            let b: Vec<usize> = (0..n).filter(|c| mask >> c & 1 == 1).collect();
            delta_b(f, params, &b)
        })
        .collect::<Result<_>>()?;
    let smoothed: Vec<TorusFunction<Rational>> = (0..n).map(|j| e_j(f, params, j)).collect::<Result<_>>()?;
    let card = rational::int(k * (k + 1).pow(n as u32 - 1));
    let k_pow: Vec<Rational> = (0..=n).map(|i| rational::int(k.pow((n - i) as u32))).collect();

    let (work, mode) = tuples(torus.size(), signs.len(), sweep);
    let names = ["b_identity", "b_identity_restricted", "a_identity", "with_cardinality"];

    let results: Vec<[(u64, Vec<String>); 4]> = work
        .par_iter()
        .map(|&(x, e)| {
            let eps = &signs[e];
            let mut out: [(u64, Vec<String>); 4] = Default::default();
            let at = |g: &TorusFunction<Rational>, off: &[i64]| g.at(torus.offset_index(x, off)).to_vec();
            let xc = torus.coords(x);

            for (p, &(i, j)) in pairs.iter().enumerate() {
                let mut full = vec![Rational::zero(); d];
                let mut restricted = vec![Rational::zero(); d];
                for (z, v, inside) in &b_tables[e][p].terms {
                    let c = rational::int(*v);
                    let row = at(f, z);
                    add_scaled(&mut full, &row, &c);
                    if *inside {
                        add_scaled(&mut restricted, &row, &c);
                    }
                }
                let mut rhs = vec![Rational::zero(); d];
                for (mask, plus, minus) in &rhs_terms[e][p] {
                    add_scaled(&mut rhs, &at(&deltas[*mask], plus), &k_pow[i]);
                    add_scaled(&mut rhs, &at(&deltas[*mask], minus), &-k_pow[i].clone());
                }
                for (slot, lhs) in [(0, &full), (1, &restricted)] {
                    out[slot].0 += 1;
                    if *lhs != rhs {
                        out[slot].1.push(format!(
                            "x={xc:?} eps={eps:?} i={i} j={j}: lhs {} rhs {}",
                            show(lhs),
                            show(&rhs)
                        ));
                    }
                }
            }

            let mut rademacher = vec![Rational::zero(); d];
            for (jj, g) in smoothed.iter().enumerate() {
                let mut unit = vec![0i64; n];
                unit[jj] = 1;
                let plus = at(g, &unit);
                unit[jj] = -1;
                let minus = at(g, &unit);
                let s = rational::int(eps[jj] as i64);
                add_scaled(&mut rademacher, &plus, &s);
                add_scaled(&mut rademacher, &minus, &-s);
            }

            let mut a_lhs = vec![Rational::zero(); d];
            for (z, v, _) in &a_tables[e].terms {
                add_scaled(&mut a_lhs, &at(f, z), &rational::int(*v));
            }
            let a_rhs: Vec<Rational> = rademacher.iter().map(|r| r * &card).collect();
            out[2].0 += 1;
            if a_lhs != a_rhs {
                out[2].1.push(format!("x={xc:?} eps={eps:?}: lhs {} rhs {}", show(&a_lhs), show(&a_rhs)));
            }

            let mut counted = vec![Rational::zero(); d];
            for (z, v) in &pmmk_tables[e] {
                if *v != 0 {
                    add_scaled(&mut counted, &at(f, z), &rational::int(*v));
                }
            }
            let counted: Vec<Rational> = counted.iter().map(|c| c / &card).collect();
            out[3].0 += 1;
            if rademacher != counted {
                out[3].1.push(format!(
                    "x={xc:?} eps={eps:?}: lhs {} rhs {}",
                    show(&rademacher),
                    show(&counted)
                ));
            }
            out
        })
        .collect();

    let mut reports: Vec<VerificationReport> =
        names.iter().map(|name| VerificationReport::new(name, domain_json(params), mode)).collect();
    for r in results {
        for (report, (count, failures)) in reports.iter_mut().zip(r) {
            report.checked += count;
            report.extend_failures(failures);
        }
    }
    Ok(WeightedSumsReport { reports })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn constant_and_point_functions() {
        let p = SchemeParams::new(2, 8, 3, 2).unwrap();
        let t = p.torus();
        let c = TorusFunction::<Rational>::constant(t, &[int(5)]);
        let r = verify_weighted_sums(&c, &p, &Sweep::default()).unwrap();
        assert!(r.passed(), "{}", r.to_json());
        let spike = TorusFunction::<Rational>::scalar(t, |x| int((x == [0, 0]) as i64));
        let r = verify_weighted_sums(&spike, &p, &Sweep::default()).unwrap();
        assert!(r.passed(), "{}", r.to_json());
        assert_eq!(r.reports[0].checked, 64 * 4 * 6);
    }

    #[test]
    fn vector_valued_function() {
        let p = SchemeParams::new(2, 8, 1, 2).unwrap();
        let t = p.torus();
        let f = TorusFunction::from_fn(t, 2, |x| vec![int(x[0] * x[1]), int(3 - x[0])]).unwrap();
        let r = verify_weighted_sums(&f, &p, &Sweep::default()).unwrap();
        assert!(r.passed(), "{}", r.to_json());
    }
}
