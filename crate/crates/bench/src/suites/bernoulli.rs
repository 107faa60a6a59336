use cotype_core::bernoulli::{bivariate_bernoulli, classical_bernoulli, generating_function};
use cotype_core::check::Check;
use cotype_core::rational::{self, frac, to_f64};

use super::exact_only;
use crate::config::RunConfig;
use crate::report::write_atomic;
use crate::{ConfigError, Report};

const GOLDEN_N12: &str = include_str!("../../../core/golden/bernoulli_n12.csv");

/// Truncation used for the generating-function comparison.
const SERIES_N: usize = 20;
const SERIES_TOLERANCE: f64 = 1e-10;

pub(super) fn run(config: &RunConfig, report: &mut Report) -> Result<(), ConfigError> {
    exact_only(config)?;
    let n = config.size;
    let table = bivariate_bernoulli(n);

    let rec = table.verify_recursion();
    let detail = match rec.first_failure {
        None => format!("{} entries", rec.checked),
        Some((r, s)) => format!("fails at ({r},{s})"),
    };
    report.check(Check::new("recursion", rec.holds, detail));
    report.check(Check::new("symmetry", table.is_symmetric(), "B_{r,s} = B_{s,r}"));
    let classical = classical_bernoulli(n);
    let column_ok = (0..=n).all(|r| table.get(r, 0) == Some(&classical[r]));
    report.check(Check::new("classical_column", column_ok, "B_{r,0} = B_r with B_1 = 1/2"));
    if n >= 1 {
        let b11 = table.get(1, 1).expect("n >= 1");
        report.quantity("B_1_1", rational::to_string(b11));
        report.check(Check::new("b11", *b11 == frac(1, 3), format!("B_1_1 = {}", rational::to_string(b11))));
    }

    let (ratio, at) = table.bound_ratio();
    report.quantity("bound_ratio", rational::to_string(&ratio));
    report.quantity("bound_ratio_at", format!("{},{}", at.0, at.1));

    let (x, y) = (frac(1, 2), frac(1, 4));
    let series = to_f64(&bivariate_bernoulli(SERIES_N).series(&x, &y));
    let err = (series - generating_function(0.5, 0.25)).abs();
    report.quantity("series_n20_error", err);
    report.check(Check::new(
        "generating_function",
        err < SERIES_TOLERANCE,
        format!("|series - closed form| = {err:e} at (1/2, 1/4), N = {SERIES_N}"),
    ));

    let csv = table.to_csv();
    if n == 12 {
        report.check(Check::new("golden_csv", csv == GOLDEN_N12, "table matches the stored N = 12 CSV"));
    }
    if let Some(path) = &config.csv {
        write_atomic(path, csv.as_bytes()).map_err(|e| ConfigError::new(format!("writing {}: {e}", path.display())))?;
    }
    Ok(())
}
