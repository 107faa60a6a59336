//! One module per suite; each turns a [`RunConfig`] into a [`Report`].

mod bernoulli;
mod cotype;
mod identities;
mod lower_bounds;
mod scheme;
mod symmetrize;

use cotype_core::calibration::seeded_function;
use cotype_core::check::Check;
use cotype_core::identities::{Sweep, VerificationReport};
use cotype_core::kernels::SchemeParams;
use cotype_core::lower_bounds::jigsaw_vector_fn;
use cotype_core::rational::{self, Rational};
use cotype_core::torus::{NormSpec, Torus, TorusFunction};

use crate::config::{Family, Mode, RunConfig, Suite};
use crate::{ConfigError, Report};

pub(crate) fn run(suite: Suite, config: &RunConfig) -> Result<Report, ConfigError> {
    let mut report = Report::new(suite.name(), config.params_json(), config.mode == Mode::Float);
    match suite {
        Suite::Bernoulli => bernoulli::run(config, &mut report)?,
        Suite::Identities => identities::run(config, &mut report)?,
        Suite::Cotype => cotype::run(config, &mut report)?,
        Suite::Scheme => scheme::run(config, &mut report)?,
        Suite::LowerBounds => lower_bounds::run(config, &mut report)?,
        Suite::Symmetrize => symmetrize::run(config, &mut report)?,
        Suite::All => unreachable!("expanded by run_suite"),
    }
    Ok(report)
}

fn exact_only(config: &RunConfig) -> Result<(), ConfigError> {
    if config.mode == Mode::Float {
        return Err(ConfigError::new(format!("suite {} runs in exact mode only", config.suite)));
    }
    Ok(())
}

fn scheme_params(config: &RunConfig) -> Result<SchemeParams, ConfigError> {
    Ok(SchemeParams::new(config.n, config.m, config.k, config.q)?)
}

fn norm_spec(config: &RunConfig) -> Result<NormSpec, ConfigError> {
    Ok(NormSpec::new(config.p, config.q as f64)?)
}

fn sweep(config: &RunConfig) -> Sweep {
    Sweep { budget: config.budget, seed: config.seed() }
}

/// The functions named by the config's family, with labels.
fn functions(config: &RunConfig, torus: Torus, report: &mut Report) -> Result<Vec<(String, TorusFunction<Rational>)>, ConfigError> {
    let n = torus.n();
    Ok(match &config.function {
        Family::TorusAbs => {
            let f = TorusFunction::scalar(torus, |x| rational::int(x.iter().map(|&c| torus.abs(c)).sum()));
            vec![("torus_abs".into(), f)]
        }
        Family::Coordinates => {
            let f = TorusFunction::from_fn(torus, n, |x| x.iter().map(|&c| rational::int(torus.abs(c))).collect())?;
            vec![("coordinates".into(), f)]
        }
        Family::Constant => {
            vec![("constant".into(), TorusFunction::constant(torus, &vec![rational::int(1); config.d]))]
        }
        Family::Jigsaw(s) => {
            let (f, not_periodic) = jigsaw_vector_fn(*s, torus);
            report.quantity("jigsaw_not_periodic", not_periodic);
            vec![(format!("jigsaw:{s}"), f)]
        }
        Family::Random => (0..config.count as u64)
            .map(|i| {
                let seed = config.seed() + i;
                Ok((format!("seed={seed}"), seeded_function(torus, config.d, config.radius, seed)?))
            })
            .collect::<Result<_, ConfigError>>()?,
        Family::File(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError::new(format!("reading {}: {e}", path.display())))?;
            let value = serde_json::from_str(&text).map_err(|e| ConfigError::new(format!("{}: {e}", path.display())))?;
            let f = TorusFunction::<Rational>::from_json(&value)?;
            if f.torus() != torus {
                return Err(ConfigError::new(format!("{} is not defined on Z_{}^{}", path.display(), torus.m(), n)));
            }
            vec![(format!("file:{}", path.display()), f)]
        }
    })
}

fn record_verification(report: &mut Report, prefix: &str, v: &VerificationReport) {
    report.quantity(format!("{prefix}{}.checked", v.identity), v.checked as u64);
    report.quantity(format!("{prefix}{}.mode", v.identity), v.mode.to_string());
    let detail = match v.failures.first() {
        None => format!("{} cases ({})", v.checked, v.mode),
        Some(first) => format!("{} of {} cases fail; first: {first}", v.failure_count, v.checked),
    };
    report.check(Check::new(format!("{prefix}{}", v.identity), v.passed(), detail));
}

/// Prefix for per-function quantity names: empty for a single function.
fn label_prefix(label: &str, many: bool) -> String {
    if many {
        format!("{label}.")
    } else {
        String::new()
    }
}
