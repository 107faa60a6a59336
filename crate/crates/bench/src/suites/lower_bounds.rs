use num_traits::pow;
use cotype_core::calibration::{frozen, JIGSAW_SCALES, JIGSAW_SLOPE, WALK_LOWER, WALK_UPPER};
use cotype_core::check::Check;
use cotype_core::kernels::{scheme_kernels, SchemeParams};
use cotype_core::lower_bounds::{
    delta_smoothing_value, jigsaw_vector_fn, marginal_variation, odd_box_abs_sum, tail_mass, tail_threshold,
    verify_jigsaw_properties, LatticeWalk,
};
use cotype_core::metrics::scheme_constants;
use cotype_core::rational::{self, frac, Rational};
use cotype_core::torus::{NormSpec, PNorm};
use cotype_core::Error;
use num_bigint::BigInt;

use super::{exact_only, scheme_params};
use crate::config::RunConfig;
use crate::{ConfigError, Report};

pub(super) fn run(config: &RunConfig, report: &mut Report) -> Result<(), ConfigError> {
    exact_only(config)?;
    let params = scheme_params(config)?;
    let (n, k) = (params.n, params.k as i64);
    let kernels = scheme_kernels(&params);
    let show = rational::to_string;

    report.check(verify_jigsaw_properties(4));

    let mv = marginal_variation(&kernels)?;
    report.quantity("marginal_variation", show(&mv));
    report.check(Check::new("marginal_variation", mv == frac(2, k), format!("{} = 2/{k}", show(&mv))));

    for s in 0..=k {
        report.quantity(format!("tail_mass.s={s}"), show(&tail_mass(&kernels, s)?));
    }
    for s in [(k + 1) / 2, (k + 3) / 2] {
        report.quantity(format!("tail_mass_half_k.s={s}"), show(&tail_mass(&kernels, s)?));
    }
    if let Some(s) = tail_threshold(params.k) {
        let tail = tail_mass(&kernels, s)?;
        report.check(Check::new(
            "tail_majority",
            tail >= frac(1, 2),
            format!("tail mass {} at s = {s}", show(&tail)),
        ));
    }

    let boxed = pow(BigInt::from(k + 1), n);
    let enumerable = boxed <= BigInt::from(config.budget);
    let box_sum = enumerable.then(|| odd_box_abs_sum(&params));
    if let Some(sum) = &box_sum {
        let stated = Rational::new(sum.clone(), BigInt::from(k) * pow(BigInt::from(k + 1), n - 1));
        report.quantity("odd_box_mean_stated_prefactor", show(&stated));
        report.quantity("odd_box_mean_uniform", show(&Rational::new(sum.clone(), boxed.clone())));
    }

    match delta_smoothing_value(&kernels, params.q) {
        Ok(w) => {
            report.quantity("delta_witness", w.to_json());
            for c in w.checks() {
                report.check(c);
            }
            if let Some(sum) = &box_sum {
                let expect = Rational::new(sum.clone(), BigInt::from(k) * pow(BigInt::from(k + 1), n - 1));
                let ok = w.norms.iter().all(|v| *v == expect);
                report.check(Check::new("delta_odd_box", ok, format!("N(eps) = {} for every eps", show(&expect))));
            }
        }
        Err(Error::BudgetExceeded { needed, .. }) => {
            report.quantity("delta_witness", format!("skipped: {needed} steps over budget"));
        }
        Err(e) => return Err(e.into()),
    }

    walk_checks(&params, box_sum.as_ref(), report)?;
    jigsaw_checks(&params, report)?;
    Ok(())
}

fn walk_checks(params: &SchemeParams, box_sum: Option<&BigInt>, report: &mut Report) -> Result<(), ConfigError> {
    let show = rational::to_string;
    let w = LatticeWalk::new(params.n, params.k)?;
    let ez = w.expected_abs();
    report.quantity("walk", w.to_json());
    report.quantity("walk_np", show(&w.second_moment_formula()));
    if let Some(sum) = box_sum {
        let uniform = Rational::new(sum.clone(), pow(BigInt::from(params.k + 1), params.n));
        report.check(Check::new("walk_enumeration", ez == uniform, format!("E[Z] = {} by enumeration", show(&uniform))));
    }
    let (m2, m4) = (w.moment(2), w.moment(4));
    report.check(Check::new("second_moment", m2 == w.second_moment_formula(), format!("E[Z^2] = {}", show(&m2))));
    report.check(Check::new(
        "fourth_moment_stated",
        m4 == w.fourth_moment_stated(),
        format!("E[Z^4] = {} vs np + n(n-1)p^2 = {}", show(&m4), show(&w.fourth_moment_stated())),
    ));
    report.check(Check::new(
        "fourth_moment_exact",
        m4 == w.fourth_moment_exact(),
        format!("E[Z^4] = {} vs np + 3n(n-1)p^2 = {}", show(&m4), show(&w.fourth_moment_exact())),
    ));
    report.check(Check::new("factor_three", w.within_factor_of_scale(3), "E[Z] within 3x of min(sqrt(np), np)"));
    report.check(Check::new(
        "walk_frozen_scale",
        w.within_scale(&frozen(WALK_LOWER), &frozen(WALK_UPPER)),
        format!("E[Z] / min(sqrt(np), np) in [{WALK_LOWER}, {WALK_UPPER}]"),
    ));
    Ok(())
}

/// Empirical `A` with `q = 1` over the jigsaw functions whose period divides `m`.
fn jigsaw_checks(params: &SchemeParams, report: &mut Report) -> Result<(), ConfigError> {
    let p1 = SchemeParams::new(params.n, params.m, params.k, 1)?;
    let spec = NormSpec::new(PNorm::Infinity, 1.0)?;
    let mut best: Option<Rational> = None;
    for s in JIGSAW_SCALES.into_iter().filter(|s| params.m as i64 % (12 * s) == 0) {
        let (f, _) = jigsaw_vector_fn(s, p1.torus());
        if let Some(a) = scheme_constants(&p1, &f, &spec)?.a_q() {
            report.quantity(format!("jigsaw_A.s={s}"), rational::to_string(&a));
            if best.as_ref().is_none_or(|b| a > *b) {
                best = Some(a);
            }
        }
    }
    if let Some(a) = best {
        report.quantity("jigsaw_A", rational::to_string(&a));
        if (params.n, params.m) == (1, 48) {
            let bound = frozen(JIGSAW_SLOPE) * rational::int(params.k as i64);
            report.check(Check::new(
                "jigsaw_scaling",
                a >= bound,
                format!("A = {} >= {JIGSAW_SLOPE} * k", rational::to_string(&a)),
            ));
        }
    }
    Ok(())
}
