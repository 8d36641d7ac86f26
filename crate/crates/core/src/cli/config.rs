//! Run configuration: flags layered over an optional `key=value` file.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::sdp::{ConditionSet, SolverMethod, SolverSettings};
use crate::shadow::RotationGroup;

/// Keys accepted in a config file; `-` and `_` are interchangeable.
pub const CONFIG_KEYS: &[&str] = &[
    "hchain",
    "bond",
    "fcidump",
    "state",
    "singlets",
    "conditions",
    "shadows",
    "sweep",
    "seed",
    "seeds",
    "epsilon",
    "noise",
    "tol",
    "max_iter",
    "solver",
    "rotations",
    "out",
    "format",
    "threads",
    "states_out",
    "load",
];

#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(msg: impl Into<String>) -> Result<T, UsageError> {
    Err(UsageError(msg.into()))
}

/// Parsed `key=value` file. `#` starts a comment.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, UsageError> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return usage(format!("config line {}: expected key=value", n + 1));
            };
            let key = k.trim().replace('-', "_");
            if !CONFIG_KEYS.contains(&key.as_str()) {
                return usage(format!("config line {}: unknown key '{}'", n + 1, k.trim()));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    /// `flag` if given, else the parsed config value.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, UsageError>
    where
        T::Err: fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| UsageError(format!("config key {key}: {e}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InputSource {
    HChain { n_atoms: usize, bond_length: f64 },
    Fcidump(PathBuf),
}

/// Inclusive range of shadow counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ShadowRange {
    pub first: usize,
    pub last: usize,
}

impl ShadowRange {
    pub fn single(n: usize) -> Self {
        Self { first: n, last: n }
    }

    pub fn counts(&self) -> Vec<usize> {
        (self.first..=self.last).collect()
    }
}

impl FromStr for ShadowRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s
            .split_once("..")
            .ok_or_else(|| format!("sweep '{s}' is not of the form A..B"))?;
        let b = b.strip_prefix('=').unwrap_or(b);
        let first: usize = a.trim().parse().map_err(|e| format!("sweep start: {e}"))?;
        let last: usize = b.trim().parse().map_err(|e| format!("sweep end: {e}"))?;
        if first > last {
            return Err(format!("sweep start {first} exceeds end {last}"));
        }
        Ok(Self { first, last })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(format!("unknown format '{s}' (expected csv or json)")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Csv => "csv",
            Self::Json => "json",
        })
    }
}

/// Fully resolved settings of one invocation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub input: Option<InputSource>,
    /// Singlet rank of the target: 0 ground, 1 first excited singlet, ...
    pub state_index: usize,
    /// Excited singlets listed by `fci`.
    pub singlets: usize,
    pub conditions: ConditionSet,
    pub shadows: ShadowRange,
    pub seeds: Vec<u64>,
    pub epsilon: f64,
    pub noise: bool,
    pub tol: f64,
    pub max_iter: usize,
    pub solver: SolverMethod,
    pub rotations: RotationGroup,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub threads: Option<usize>,
    pub states_out: Option<PathBuf>,
    pub load: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: None,
            state_index: 1,
            singlets: 4,
            conditions: ConditionSet::DQG,
            shadows: ShadowRange { first: 0, last: 11 },
            seeds: vec![0],
            epsilon: 0.0,
            noise: true,
            tol: 1e-7,
            max_iter: SolverSettings::default().max_iterations,
            solver: SolverMethod::Auto,
            rotations: RotationGroup::default(),
            out: None,
            format: OutputFormat::Csv,
            threads: None,
            states_out: None,
            load: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), UsageError> {
        if let Some(InputSource::HChain { n_atoms, bond_length }) = &self.input {
            if *n_atoms == 0 {
                return usage("--hchain must be at least 1");
            }
            if !(bond_length.is_finite() && *bond_length > 0.0) {
                return usage(format!("--bond must be positive, got {bond_length}"));
            }
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return usage(format!("--epsilon must be >= 0, got {}", self.epsilon));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return usage(format!("--tol must be positive, got {}", self.tol));
        }
        if self.max_iter == 0 {
            return usage("--max-iter must be positive");
        }
        if self.seeds.is_empty() {
            return usage("--seeds must be at least 1");
        }
        if self.threads == Some(0) {
            return usage("thread count must be positive");
        }
        Ok(())
    }

    pub fn solver_settings(&self) -> SolverSettings {
        let mut s = SolverSettings::default().with_tolerance(self.tol);
        s.method = self.solver;
        s.max_iterations = self.max_iter;
        s
    }

    /// `key=value` lines that reproduce this configuration.
    pub fn to_config_text(&self) -> String {
        let mut lines = Vec::new();
        match &self.input {
            Some(InputSource::HChain { n_atoms, bond_length }) => {
                lines.push(format!("hchain={n_atoms}"));
                lines.push(format!("bond={bond_length:?}"));
            }
            Some(InputSource::Fcidump(p)) => lines.push(format!("fcidump={}", p.display())),
            None => {}
        }
        lines.push(format!("state={}", self.state_index));
        lines.push(format!("singlets={}", self.singlets));
        lines.push(format!("conditions={}", self.conditions));
        lines.push(format!("sweep={}..{}", self.shadows.first, self.shadows.last));
        lines.push(format!("seed={}", self.seeds[0]));
        lines.push(format!("seeds={}", self.seeds.len()));
        lines.push(format!("epsilon={:?}", self.epsilon));
        lines.push(format!("noise={}", self.noise));
        lines.push(format!("tol={:?}", self.tol));
        lines.push(format!("max_iter={}", self.max_iter));
        lines.push(format!("solver={}", self.solver));
        lines.push(format!("rotations={}", self.rotations));
        lines.push(format!("format={}", self.format));
        lines.join("\n") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_parsing() {
        let c = ConfigFile::parse("# run\nhchain = 4\nmax-iter=10 # cap\n\n").unwrap();
        assert_eq!(c.pick::<usize>(None, "hchain").unwrap(), Some(4));
        assert_eq!(c.pick::<usize>(None, "max_iter").unwrap(), Some(10));
        assert_eq!(c.pick(Some(6usize), "hchain").unwrap(), Some(6));
        assert!(ConfigFile::parse("colour=red").is_err());
        assert!(ConfigFile::parse("hchain").is_err());
        assert!(c.pick::<f64>(None, "bond").unwrap().is_none());
        let bad = ConfigFile::parse("hchain=four").unwrap();
        assert!(bad.pick::<usize>(None, "hchain").is_err());
    }

    #[test]
    fn sweep_ranges() {
        assert_eq!("0..12".parse::<ShadowRange>().unwrap().counts().len(), 13);
        assert_eq!("3..=3".parse::<ShadowRange>().unwrap(), ShadowRange::single(3));
        assert!("5..2".parse::<ShadowRange>().is_err());
        assert!("7".parse::<ShadowRange>().is_err());
    }
}
