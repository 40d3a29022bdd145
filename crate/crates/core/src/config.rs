//! Run configuration: a TOML key-value file overlaid with command-line
//! flags.
//!
//! ```toml
//! experiment = "bb84"
//! seed = 7
//! trials = 100000
//! pe = 0.25
//! phi = "uniform"     # or a number, "lo:hi", or [lo, hi]
//! ```

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{ChannelDistribution, ParamDist};
use crate::protocols::{FpbConfig, KeyPorts};

/// Environment variable consulted for the default seed.
pub const SEED_ENV: &str = "POLQEC_SEED";
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    CorrectSingle,
    CompareSetups,
    FpbSweep,
    Bb84,
    PassiveCoherent,
    Mesoscopic,
    Distinguishability,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::CorrectSingle,
        Experiment::CompareSetups,
        Experiment::FpbSweep,
        Experiment::Bb84,
        Experiment::PassiveCoherent,
        Experiment::Mesoscopic,
        Experiment::Distinguishability,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::CorrectSingle => "correct-single",
            Experiment::CompareSetups => "compare-setups",
            Experiment::FpbSweep => "fpb-sweep",
            Experiment::Bb84 => "bb84",
            Experiment::PassiveCoherent => "passive-coherent",
            Experiment::Mesoscopic => "mesoscopic",
            Experiment::Distinguishability => "distinguishability",
        }
    }

    /// Number of trials (or grid points) when none is configured.
    pub fn default_trials(self) -> u64 {
        match self {
            Experiment::Bb84 => 100_000,
            Experiment::CorrectSingle | Experiment::CompareSetups => 1_000,
            Experiment::FpbSweep => 20,
            Experiment::PassiveCoherent | Experiment::Mesoscopic | Experiment::Distinguishability => 50,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| ConfigError::Invalid(format!("unknown experiment `{s}`")))
    }
}

/// A parameter distribution as written in a config file or flag.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum DistSpec {
    Value(f64),
    Range([f64; 2]),
    Text(String),
}

impl DistSpec {
    fn resolve(&self, key: &str, full_range: (f64, f64)) -> Result<ParamDist, ConfigError> {
        match self {
            DistSpec::Value(x) => Ok(ParamDist::Fixed(*x)),
            DistSpec::Range([lo, hi]) => Ok(ParamDist::Uniform(*lo, *hi)),
            DistSpec::Text(t) => parse_dist(t, full_range).ok_or_else(|| {
                ConfigError::Invalid(format!(
                    "key `{key}`: expected a number, \"uniform\" or \"lo:hi\", got \"{t}\""
                ))
            }),
        }
    }
}

fn parse_dist(t: &str, full_range: (f64, f64)) -> Option<ParamDist> {
    let t = t.trim();
    if t == "uniform" {
        return Some(ParamDist::Uniform(full_range.0, full_range.1));
    }
    if let Some((lo, hi)) = t.split_once(':') {
        return Some(ParamDist::Uniform(lo.trim().parse().ok()?, hi.trim().parse().ok()?));
    }
    t.parse().ok().map(ParamDist::Fixed)
}

/// Keys accepted in a config file. Every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub experiment: Option<String>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub lambda: Option<DistSpec>,
    pub xi: Option<DistSpec>,
    pub phi: Option<DistSpec>,
    pub pe: Option<f64>,
    pub pe_grid: Option<String>,
    pub both_ports: Option<bool>,
    pub alpha: Option<f64>,
    pub m_bases: Option<u32>,
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

impl FileConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: origin.to_owned(),
            message: e.to_string().trim_end().to_owned(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Values present in `over` replace those in `self`.
    pub fn overlay(self, over: FileConfig) -> FileConfig {
        FileConfig {
            experiment: over.experiment.or(self.experiment),
            seed: over.seed.or(self.seed),
            trials: over.trials.or(self.trials),
            lambda: over.lambda.or(self.lambda),
            xi: over.xi.or(self.xi),
            phi: over.phi.or(self.phi),
            pe: over.pe.or(self.pe),
            pe_grid: over.pe_grid.or(self.pe_grid),
            both_ports: over.both_ports.or(self.both_ports),
            alpha: over.alpha.or(self.alpha),
            m_bases: over.m_bases.or(self.m_bases),
            json: over.json.or(self.json),
            csv: over.csv.or(self.csv),
        }
    }
}

/// Inclusive `start:stop:step` grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

impl FromStr for Grid {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ConfigError::Invalid(format!("pe_grid: expected start:stop:step, got \"{s}\""));
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?;
        let [start, stop, step] = parts[..] else {
            return Err(bad());
        };
        if step <= 0.0 || stop < start {
            return Err(bad());
        }
        Ok(Grid { start, stop, step })
    }
}

/// Fully resolved, validated configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub trials: u64,
    pub channel: ChannelDistribution,
    pub pe: Option<f64>,
    pub pe_grid: Grid,
    pub key_ports: KeyPorts,
    pub alpha: f64,
    pub m_bases: u32,
    #[serde(skip)]
    pub json_out: Option<PathBuf>,
    #[serde(skip)]
    pub csv_out: Option<PathBuf>,
}

impl RunConfig {
    /// Defaults for `experiment`, with no file and no flags.
    pub fn defaults(experiment: Experiment) -> Self {
        Self::resolve(FileConfig {
            experiment: Some(experiment.name().to_owned()),
            ..Default::default()
        })
        .expect("defaults are valid")
    }

    pub fn resolve(raw: FileConfig) -> Result<Self, ConfigError> {
        let experiment: Experiment = raw
            .experiment
            .as_deref()
            .ok_or_else(|| ConfigError::Invalid("no experiment selected".into()))?
            .parse()?;
        let seed = match raw.seed {
            Some(s) => s,
            None => match std::env::var(SEED_ENV) {
                Ok(v) => v.trim().parse().map_err(|_| {
                    ConfigError::Invalid(format!("{SEED_ENV}=\"{v}\" is not a 64-bit integer"))
                })?,
                Err(_) => DEFAULT_SEED,
            },
        };
        let trials = raw.trials.unwrap_or_else(|| experiment.default_trials());
        if trials < 1 {
            return Err(ConfigError::Invalid("trials must be at least 1".into()));
        }

        let defaults = ChannelDistribution::default();
        let channel = ChannelDistribution {
            lambda_phase: match &raw.lambda {
                Some(d) => d.resolve("lambda", (0.0, TAU))?,
                None => defaults.lambda_phase,
            },
            xi_phase: match &raw.xi {
                Some(d) => d.resolve("xi", (0.0, TAU))?,
                None => defaults.xi_phase,
            },
            phi_mix: match &raw.phi {
                Some(d) => d.resolve("phi", (0.0, FRAC_PI_2))?,
                None => defaults.phi_mix,
            },
        };

        if let Some(pe) = raw.pe {
            FpbConfig::new(pe).map_err(|e| ConfigError::Invalid(format!("pe: {e}")))?;
        }
        let pe_grid: Grid = raw.pe_grid.as_deref().unwrap_or("0:0.5:0.025").parse()?;
        if pe_grid.start < 0.0 || pe_grid.stop > 0.5 {
            return Err(ConfigError::Invalid(
                "pe_grid must lie inside the valid range [0, 0.5]".into(),
            ));
        }

        let alpha = raw.alpha.unwrap_or(3.0);
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(ConfigError::Invalid(format!("alpha must be a non-negative amplitude, got {alpha}")));
        }
        let m_bases = raw.m_bases.unwrap_or(5);
        if m_bases.is_multiple_of(2) {
            return Err(ConfigError::Invalid(format!("m_bases must be odd and positive, got {m_bases}")));
        }

        Ok(RunConfig {
            experiment,
            seed,
            trials,
            channel,
            pe: raw.pe,
            pe_grid,
            key_ports: if raw.both_ports.unwrap_or(false) { KeyPorts::Both } else { KeyPorts::Port1 },
            alpha,
            m_bases,
            json_out: raw.json,
            csv_out: raw.csv,
        })
    }
}

/// Reads the optional config file and overlays flag values on top of it.
pub fn load_config(path: Option<&Path>, flags: FileConfig) -> Result<RunConfig, ConfigError> {
    let base = match path {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    RunConfig::resolve(base.overlay(flags))
}

/// Parses a `--phi`/`--lambda`/`--xi` flag value.
pub fn parse_dist_flag(s: &str) -> Result<DistSpec, String> {
    if parse_dist(s, (0.0, 1.0)).is_some() {
        Ok(DistSpec::Text(s.to_owned()))
    } else {
        Err(format!("expected a number, \"uniform\" or \"lo:hi\", got \"{s}\""))
    }
}
