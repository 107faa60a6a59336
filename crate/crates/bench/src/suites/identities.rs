use cotype_core::bernoulli::bivariate_bernoulli;
use cotype_core::identities::{verify_closed_form, verify_expansion, verify_off_box, verify_vanishing, verify_weighted_sums};

use super::{exact_only, functions, record_verification, scheme_params, sweep};
use crate::config::RunConfig;
use crate::{ConfigError, Report};

pub(super) fn run(config: &RunConfig, report: &mut Report) -> Result<(), ConfigError> {
    exact_only(config)?;
    let params = scheme_params(config)?;
    let sweep = sweep(config);
    record_verification(report, "", &verify_closed_form(&params, &sweep));
    record_verification(report, "", &verify_vanishing(&params, &sweep));
    record_verification(report, "", &verify_off_box(&params, &sweep));
    let table = bivariate_bernoulli(params.n);
    record_verification(report, "", &verify_expansion(&params, &table, &sweep)?);
    let fs = functions(config, params.torus(), report)?;
    let many = fs.len() > 1;
    for (label, f) in fs {
        let prefix = if many { format!("{label}.") } else { String::new() };
        for v in verify_weighted_sums(&f, &params, &sweep)?.reports {
            record_verification(report, &prefix, &v);
        }
    }
    Ok(())
}
