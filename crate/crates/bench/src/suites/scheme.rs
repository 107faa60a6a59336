use cotype_core::calibration::{frozen, QUOTE_CONSTANT};
use cotype_core::metrics::{scheme_constants, verify_combine, verify_pipeline};
use cotype_core::torus::{NormSpec, Scalar, TorusFunction};

use super::{functions, label_prefix, norm_spec, scheme_params};
use crate::config::{Mode, RunConfig};
use crate::{ConfigError, Report};

pub(super) fn run(config: &RunConfig, report: &mut Report) -> Result<(), ConfigError> {
    let params = scheme_params(config)?;
    let spec = norm_spec(config)?;
    let fs = functions(config, params.torus(), report)?;
    match config.mode {
        Mode::Exact => measure(config, &spec, &fs, report),
        Mode::Float => {
            let fl: Vec<(String, TorusFunction<f64>)> = fs.iter().map(|(l, f)| (l.clone(), f.to_float())).collect();
            measure(config, &spec, &fl, report)
        }
    }
}

fn measure<T: Scalar>(
    config: &RunConfig,
    spec: &NormSpec,
    fs: &[(String, TorusFunction<T>)],
    report: &mut Report,
) -> Result<(), ConfigError> {
    let params = scheme_params(config)?;
    let quote = frozen(QUOTE_CONSTANT);
    let many = fs.len() > 1;
    let (mut max_a, mut max_s): (Option<T>, Option<T>) = (None, None);
    for (label, f) in fs {
        let prefix = label_prefix(label, many);
        let sc = scheme_constants(&params, f, spec)?;
        for (k, v) in sc.quantities(&prefix) {
            report.quantity(k, v);
        }
        for (slot, v) in [(&mut max_a, sc.a_q()), (&mut max_s, sc.s_q())] {
            if let Some(v) = v {
                if slot.as_ref().is_none_or(|b| v > *b) {
                    *slot = Some(v);
                }
            }
        }
        if params.m % 4 == 0 {
            let pipe = verify_pipeline(f, &params, spec, &quote)?;
            for (k, v) in pipe.quantities {
                report.quantity(format!("{prefix}{k}"), v);
            }
            for mut c in pipe.checks {
                c.name = format!("{prefix}{}", c.name);
                report.check(c);
            }
        }
        if f.dim() == 1 && params.q >= 2 {
            let mut c = verify_combine(f, &params, spec)?;
            c.name = format!("{prefix}combine");
            report.check(c);
        }
    }
    report.quantity("max_A_q", max_a.as_ref().map(Scalar::to_json).unwrap_or_default());
    report.quantity("max_S_q", max_s.as_ref().map(Scalar::to_json).unwrap_or_default());
    report.quantity("quote_constant", QUOTE_CONSTANT);
    report.quantity("pipeline_checked", params.m % 4 == 0);
    Ok(())
}
