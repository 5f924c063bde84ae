//! Config files, value ranges and flag/config/default resolution.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::optimize::DEConfig;

/// Keys accepted in a `key=value` config file.
pub const CONFIG_KEYS: &[&str] = &[
    "omega_q",
    "g_over_gstar",
    "g",
    "ansatz",
    "objective",
    "seed",
    "dim_override",
    "out",
    "state",
    "extent",
    "points",
    "population_size",
    "mutation_factor",
    "crossover_rate",
    "max_generations",
    "convergence_tol",
];

/// Parsed `key=value` config file. Blank lines and `#` comments are ignored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("config line {}: expected key=value, got '{line}'", lineno + 1)))?;
            let key = k.trim().replace('-', "_");
            if !CONFIG_KEYS.contains(&key.as_str()) {
                return Err(Error::Parse(format!("config line {}: unknown key '{}'", lineno + 1, k.trim())));
            }
            if entries.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(Error::Parse(format!("config line {}: duplicate key '{key}'", lineno + 1)));
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn get<T>(&self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        self.entries
            .get(key)
            .map(|v| v.parse::<T>().map_err(|e| Error::Parse(format!("config key '{key}': {e}"))))
            .transpose()
    }

    /// Flag value if given, else the config value, else `default`.
    pub fn resolve<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        Ok(self.resolve_opt(flag, key)?.unwrap_or(default))
    }

    pub fn resolve_opt<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }
}

/// Comma-separated list of reals, e.g. `20,176`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealList(pub Vec<f64>);

impl FromStr for RealList {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v = s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("'{t}': {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if v.is_empty() {
            return Err(Error::Parse("empty list".into()));
        }
        Ok(Self(v))
    }
}

/// A single value or an inclusive `start:stop:count` linear range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GRange {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GRange {
    pub fn single(v: f64) -> Self {
        Self { start: v, stop: v, count: 1 }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|i| if i + 1 == self.count { self.stop } else { self.start + i as f64 * step }).collect()
    }
}

impl FromStr for GRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("'{t}': {e}")));
        let parts: Vec<&str> = s.split(':').collect();
        let range = match parts.as_slice() {
            [v] => Self::single(num(v)?),
            [a, b, n] => {
                let count = n.trim().parse::<usize>().map_err(|e| Error::Parse(format!("count '{n}': {e}")))?;
                Self { start: num(a)?, stop: num(b)?, count }
            }
            _ => return Err(Error::Parse(format!("expected VALUE or START:STOP:COUNT, got '{s}'"))),
        };
        if range.count == 0 {
            return Err(Error::Parse("range count must be >= 1".into()));
        }
        if !(range.start.is_finite() && range.stop.is_finite()) {
            return Err(Error::Parse(format!("range bounds must be finite, got '{s}'")));
        }
        Ok(range)
    }
}

impl fmt::Display for GRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.count == 1 {
            write!(f, "{}", self.start)
        } else {
            write!(f, "{}:{}:{}", self.start, self.stop, self.count)
        }
    }
}

/// Optimizer objective for a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// Maximize overlap with the exact eigenstate.
    Fidelity,
    /// Minimize the analytic NOQ energy.
    Energy,
}

impl Objective {
    pub fn name(self) -> &'static str {
        match self {
            Objective::Fidelity => "fidelity",
            Objective::Energy => "energy",
        }
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fidelity" => Ok(Objective::Fidelity),
            "energy" => Ok(Objective::Energy),
            other => Err(Error::Parse(format!("unknown objective '{other}'"))),
        }
    }
}

/// Optional replacements for the differential-evolution defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DeOverrides {
    pub population_size: Option<usize>,
    pub mutation_factor: Option<f64>,
    pub crossover_rate: Option<f64>,
    pub max_generations: Option<usize>,
    pub convergence_tol: Option<f64>,
}

impl DeOverrides {
    pub fn from_config(cfg: &ConfigFile) -> Result<Self> {
        Ok(Self {
            population_size: cfg.get("population_size")?,
            mutation_factor: cfg.get("mutation_factor")?,
            crossover_rate: cfg.get("crossover_rate")?,
            max_generations: cfg.get("max_generations")?,
            convergence_tol: cfg.get("convergence_tol")?,
        })
    }

    pub fn apply(&self, mut cfg: DEConfig) -> DEConfig {
        if let Some(v) = self.population_size {
            cfg.population_size = v;
        }
        if let Some(v) = self.mutation_factor {
            cfg.mutation_factor = v;
        }
        if let Some(v) = self.crossover_rate {
            cfg.crossover_rate = v;
        }
        if let Some(v) = self.max_generations {
            cfg.max_generations = v;
        }
        if let Some(v) = self.convergence_tol {
            cfg.convergence_tol = v;
        }
        cfg
    }
}

/// Output destination; `None` or `-` means stdout.
pub fn output_path(p: Option<PathBuf>) -> Option<PathBuf> {
    p.filter(|p| p.as_os_str() != "-")
}
