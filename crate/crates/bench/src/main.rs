use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use cotype_bench::config::{parse_config_text, RunConfig};
use cotype_bench::{execute, threads_from_env, EXIT_CONFIG};

/// Run a verification suite and write its JSON report.
#[derive(Parser, Debug)]
#[command(name = "cotype-bench", version)]
struct Cli {
    /// bernoulli | identities | cotype | scheme | lower-bounds | symmetrize | all
    suite: Option<String>,
    /// Flat `key = value` file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    q: Option<String>,
    /// Codomain norm exponent: a positive integer or `inf`.
    #[arg(long)]
    p: Option<String>,
    /// Codomain dimension.
    #[arg(long)]
    d: Option<String>,
    /// Largest Bernoulli index.
    #[arg(long)]
    size: Option<String>,
    /// torus_abs | coordinates | constant | jigsaw:<s> | random | file:<path>
    #[arg(long)]
    function: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Number of random functions or kernel families.
    #[arg(long)]
    count: Option<String>,
    /// Random values lie in [-radius, radius].
    #[arg(long)]
    radius: Option<String>,
    /// Support size of random kernels.
    #[arg(long)]
    support: Option<String>,
    /// exact | float
    #[arg(long)]
    mode: Option<String>,
    /// Cap on enumerated cases before sampling.
    #[arg(long)]
    budget: Option<String>,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<String>,
    /// CSV path for the Bernoulli table.
    #[arg(long)]
    csv: Option<String>,
}

impl Cli {
    fn flags(&self) -> BTreeMap<String, String> {
        let pairs = [
            ("suite", &self.suite),
            ("n", &self.n),
            ("m", &self.m),
            ("k", &self.k),
            ("q", &self.q),
            ("p", &self.p),
            ("d", &self.d),
            ("size", &self.size),
            ("function", &self.function),
            ("seed", &self.seed),
            ("count", &self.count),
            ("radius", &self.radius),
            ("support", &self.support),
            ("mode", &self.mode),
            ("budget", &self.budget),
            ("out", &self.out),
            ("csv", &self.csv),
        ];
        pairs.into_iter().filter_map(|(k, v)| v.clone().map(|v| (k.to_string(), v))).collect()
    }
}

fn load(cli: &Cli) -> Result<(RunConfig, Option<usize>), String> {
    let mut map = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))?;
            parse_config_text(&text).map_err(|e| e.to_string())?
        }
        None => BTreeMap::new(),
    };
    map.extend(cli.flags());
    let config = RunConfig::from_map(&map).map_err(|e| e.to_string())?;
    let threads = threads_from_env().map_err(|e| e.to_string())?;
    Ok((config, threads))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(EXIT_CONFIG as u8);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match load(&cli) {
        Ok((config, threads)) => ExitCode::from(execute(&config, threads) as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG as u8)
        }
    }
}
