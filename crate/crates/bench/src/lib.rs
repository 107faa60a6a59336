//! Batch driver for the `cotype-core` verification suites: configuration,
//! suite orchestration, and JSON and CSV reports.
//!
//! Exit status is 0 when every check passes, 1 when some check fails, and 2
//! when the configuration is rejected.

pub mod config;
pub mod report;
pub mod suites;

pub use config::{Family, Mode, RunConfig, Suite};
pub use report::Report;

use std::time::Instant;

/// A configuration the suites cannot run with.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

impl ConfigError {
    pub fn new(msg: impl Into<String>) -> Self {
        ConfigError(msg.into())
    }
}

impl From<cotype_core::Error> for ConfigError {
    fn from(e: cotype_core::Error) -> Self {
        ConfigError(e.to_string())
    }
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "COTYPE_BENCH_THREADS";

pub fn run_suite(config: &RunConfig) -> Result<Report, ConfigError> {
    let start = Instant::now();
    let mut report = match config.suite {
        Suite::All => {
            let mut all = Report::new("all", config.params_json(), config.mode == Mode::Float);
            for suite in Suite::EACH {
                all.suites.push(run_suite(&config.for_suite(suite))?);
            }
            all
        }
        suite => suites::run(suite, config)?,
    };
    report.timing_ms = start.elapsed().as_millis();
    Ok(report)
}

/// Runs on a dedicated pool of `threads` workers (all cores when `None`).
pub fn run_with_threads(config: &RunConfig, threads: Option<usize>) -> Result<Report, ConfigError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| ConfigError::new(format!("thread pool: {e}")))?;
    pool.install(|| run_suite(config))
}

/// Thread cap from [`THREADS_ENV`], if set to a positive integer.
pub fn threads_from_env() -> Result<Option<usize>, ConfigError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t > 0 => Ok(Some(t)),
            _ => Err(ConfigError::new(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}

pub fn exit_code(result: &Result<Report, ConfigError>) -> i32 {
    match result {
        Ok(r) if r.passed() => EXIT_PASS,
        Ok(_) => EXIT_FAIL,
        Err(_) => EXIT_CONFIG,
    }
}

/// Runs, writes the report (to `out` or stdout) and returns the exit code.
pub fn execute(config: &RunConfig, threads: Option<usize>) -> i32 {
    let result = run_with_threads(config, threads);
    match &result {
        Err(e) => eprintln!("error: {e}"),
        Ok(report) => {
            match &config.out {
                Some(path) => {
                    if let Err(e) = report.write_atomic(path) {
                        eprintln!("error: writing {}: {e}", path.display());
                        return EXIT_CONFIG;
                    }
                }
                None => print!("{}", report.render()),
            }
            for f in report.failures() {
                eprintln!("FAIL {f}");
            }
        }
    }
    exit_code(&result)
}
