//! Run configuration: a flat `key = value` file overlaid by command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde_json::{json, Value};

use cotype_core::torus::PNorm;

use crate::ConfigError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Bernoulli,
    Identities,
    Cotype,
    Scheme,
    LowerBounds,
    Symmetrize,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] =
        [Suite::Bernoulli, Suite::Identities, Suite::Cotype, Suite::Scheme, Suite::LowerBounds, Suite::Symmetrize];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Bernoulli => "bernoulli",
            Suite::Identities => "identities",
            Suite::Cotype => "cotype",
            Suite::Scheme => "scheme",
            Suite::LowerBounds => "lower-bounds",
            Suite::Symmetrize => "symmetrize",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|suite| suite.name() == s)
            .ok_or_else(|| ConfigError::new(format!("unknown suite {s:?}")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

/// Where the functions under test come from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// `x ↦ Σ_j |x_j|`.
    TorusAbs,
    /// `x ↦ (|x_1|, …, |x_n|)`.
    Coordinates,
    /// `x ↦ (g_s(x_1), …, g_s(x_n))`.
    Jigsaw(i64),
    Constant,
    /// `count` seeded functions with values in `[-radius, radius]`.
    Random,
    /// A function stored as JSON.
    File(PathBuf),
}

impl Family {
    fn parse(s: &str) -> Result<Self, ConfigError> {
        Ok(match s {
            "torus_abs" => Family::TorusAbs,
            "coordinates" => Family::Coordinates,
            "constant" => Family::Constant,
            "random" => Family::Random,
            _ => {
                if let Some(v) = s.strip_prefix("jigsaw:") {
                    let scale = v.parse().ok().filter(|&s: &i64| s >= 1);
                    Family::Jigsaw(scale.ok_or_else(|| ConfigError::new(format!("bad jigsaw scale {v:?}")))?)
                } else if let Some(path) = s.strip_prefix("file:") {
                    Family::File(PathBuf::from(path))
                } else {
                    return Err(ConfigError::new(format!("unknown function family {s:?}")));
                }
            }
        })
    }

    pub fn label(&self) -> String {
        match self {
            Family::TorusAbs => "torus_abs".into(),
            Family::Coordinates => "coordinates".into(),
            Family::Jigsaw(s) => format!("jigsaw:{s}"),
            Family::Constant => "constant".into(),
            Family::Random => "random".into(),
            Family::File(p) => format!("file:{}", p.display()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub suite: Suite,
    pub n: usize,
    pub m: u32,
    pub k: u32,
    pub q: u32,
    pub p: PNorm,
    pub d: usize,
    /// Largest Bernoulli index.
    pub size: usize,
    pub function: Family,
    pub seed: Option<u64>,
    pub count: usize,
    pub radius: i64,
    /// Support size of random kernels.
    pub support: usize,
    pub mode: Mode,
    pub budget: u64,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

/// Keys accepted in config files and as `--key` flags.
pub const KEYS: [&str; 17] = [
    "suite", "n", "m", "k", "q", "p", "d", "size", "function", "seed", "count", "radius", "support", "mode", "budget",
    "out", "csv",
];

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::new(format!("line {}: expected key = value", lineno + 1)))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(ConfigError::new(format!("line {}: unknown key {key:?}", lineno + 1)));
        }
        out.insert(key.to_string(), value.trim().to_string());
    }
    Ok(out)
}

fn get<T: FromStr>(map: &BTreeMap<String, String>, key: &str, default: T) -> Result<T, ConfigError> {
    match map.get(key) {
        None => Ok(default),
        Some(v) => v.parse().map_err(|_| ConfigError::new(format!("bad value {v:?} for {key}"))),
    }
}

impl RunConfig {
    /// Builds a config from merged key/value pairs, filling defaults.
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self, ConfigError> {
        if let Some(bad) = map.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(ConfigError::new(format!("unknown key {bad:?}")));
        }
        let suite = map.get("suite").ok_or_else(|| ConfigError::new("no suite given"))?.parse()?;
        let mode = match map.get("mode").map(String::as_str).unwrap_or("exact") {
            "exact" => Mode::Exact,
            "float" => Mode::Float,
            other => return Err(ConfigError::new(format!("mode must be exact or float, got {other:?}"))),
        };
        let p = map
            .get("p")
            .map(|v| v.parse::<PNorm>())
            .transpose()
            .map_err(|e| ConfigError::new(e.to_string()))?
            .unwrap_or(PNorm::Finite(2));
        let seed = map.get("seed").map(|v| v.parse()).transpose().map_err(|_| ConfigError::new("bad seed"))?;
        let function = Family::parse(map.get("function").map(String::as_str).unwrap_or("torus_abs"))?;
        let config = RunConfig {
            suite,
            n: get(map, "n", 2)?,
            m: get(map, "m", 8)?,
            k: get(map, "k", 3)?,
            q: get(map, "q", 2)?,
            p,
            d: get(map, "d", 1)?,
            size: get(map, "size", 12)?,
            function,
            seed,
            count: get(map, "count", 1)?,
            radius: get(map, "radius", cotype_core::calibration::DEFAULT_RADIUS)?,
            support: get(map, "support", 4)?,
            mode,
            budget: get(map, "budget", 1_000_000)?,
            out: map.get("out").map(PathBuf::from),
            csv: map.get("csv").map(PathBuf::from),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.n == 0 || self.d == 0 || self.count == 0 {
            return Err(ConfigError::new("n, d and count must be positive"));
        }
        if self.radius < 0 {
            return Err(ConfigError::new("radius must be nonnegative"));
        }
        let random = self.function == Family::Random || self.suite == Suite::Symmetrize;
        if random && self.seed.is_none() {
            return Err(ConfigError::new("random families need --seed"));
        }
        Ok(())
    }

    /// The config for one suite of an `all` run.
    pub fn for_suite(&self, suite: Suite) -> RunConfig {
        RunConfig { suite, ..self.clone() }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// Parameters echoed into reports; output paths are excluded.
    pub fn params_json(&self) -> Value {
        json!({
            "n": self.n,
            "m": self.m,
            "k": self.k,
            "q": self.q,
            "p": self.p.to_string(),
            "d": self.d,
            "size": self.size,
            "function": self.function.label(),
            "seed": self.seed,
            "count": self.count,
            "radius": self.radius,
            "support": self.support,
            "mode": match self.mode { Mode::Exact => "exact", Mode::Float => "float" },
            "budget": self.budget,
        })
    }
}
