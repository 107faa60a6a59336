use cotype_core::calibration::{frozen, COTYPE_RATIO_BOUND, DEFAULT_RADIUS};
use cotype_core::check::Check;
use cotype_core::kernels::SchemeParams;
use cotype_core::metrics::{metric_cotype_ratio, verify_combine};
use cotype_core::rational::{frac, Rational};
use cotype_core::torus::{NormSpec, PNorm, Scalar, Torus, TorusFunction};

use super::{functions, label_prefix, norm_spec};
use crate::config::{Family, Mode, RunConfig};
use crate::{ConfigError, Report};

pub(super) fn run(config: &RunConfig, report: &mut Report) -> Result<(), ConfigError> {
    if config.m % 2 != 0 {
        return Err(ConfigError::new(format!("metric cotype needs m even, got m={}", config.m)));
    }
    let torus = Torus::new(config.m, config.n)?;
    let spec = norm_spec(config)?;
    let fs = functions(config, torus, report)?;
    match config.mode {
        Mode::Exact => {
            let best = measure(config, &spec, &fs, report)?;
            report.quantity("max_ratio", best.as_ref().map(Scalar::to_json).unwrap_or_default());
            exact_checks(config, best.as_ref(), report);
        }
        Mode::Float => {
            let fl: Vec<(String, TorusFunction<f64>)> = fs.iter().map(|(l, f)| (l.clone(), f.to_float())).collect();
            let best = measure(config, &spec, &fl, report)?;
            report.quantity("max_ratio", best.as_ref().map(Scalar::to_json).unwrap_or_default());
        }
    }
    Ok(())
}

fn exact_checks(config: &RunConfig, best: Option<&Rational>, report: &mut Report) {
    if is_frozen_instance(config) {
        let ok = best.is_some_and(|r| *r <= frozen(COTYPE_RATIO_BOUND));
        report.check(Check::new("cotype_frozen_bound", ok, format!("max ratio <= {COTYPE_RATIO_BOUND}")));
    }
    if config.function == Family::TorusAbs && (config.n, config.m, config.q) == (1, 4, 2) {
        let ok = best == Some(&frac(3, 16));
        report.check(Check::new("torus_abs_ratio", ok, "ratio 3/16 on Z_4 with q = 2"));
    }
}

/// The instance the frozen bound was measured on.
fn is_frozen_instance(config: &RunConfig) -> bool {
    config.function == Family::Random
        && (config.n, config.m, config.q, config.d) == (2, 20, 2, 1)
        && config.p == PNorm::Finite(2)
        && config.radius == DEFAULT_RADIUS
        && config.seed() == 0
        && config.count == 100
}

fn measure<T: Scalar>(
    config: &RunConfig,
    spec: &NormSpec,
    fs: &[(String, TorusFunction<T>)],
    report: &mut Report,
) -> Result<Option<T>, ConfigError> {
    let many = fs.len() > 1;
    let scheme = SchemeParams::new(config.n, config.m, config.k, config.q).ok();
    let mut best: Option<T> = None;
    for (label, f) in fs {
        let prefix = label_prefix(label, many);
        let r = metric_cotype_ratio(f, spec, label)?;
        report.quantity(format!("{prefix}lhs"), r.lhs.to_json());
        report.quantity(format!("{prefix}rhs"), r.rhs.to_json());
        report.quantity(format!("{prefix}edge_mean"), r.edge_mean.to_json());
        report.quantity(format!("{prefix}ratio"), r.ratio.as_ref().map(Scalar::to_json).unwrap_or_default());
        if let Some(v) = r.ratio {
            if best.as_ref().is_none_or(|b| v > *b) {
                best = Some(v);
            }
        }
        if let Some(params) = &scheme {
            if f.dim() == 1 && config.q >= 2 {
                let mut c = verify_combine(f, params, spec)?;
                c.name = format!("{prefix}combine");
                report.check(c);
            }
        }
    }
    Ok(best)
}
