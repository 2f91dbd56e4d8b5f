//! Run configuration: defaults, then a flat `key = value` file, then flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use cvtelefid_core::fock::Tolerances;
use serde::Serialize;

use crate::CliError;

pub const CONFIG_ENV: &str = "CVTELEFID_CONFIG";
pub const MIN_CUTOFF: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub cutoff: usize,
    /// Gauss–Hermite points per axis for the noise channel.
    pub gh_order: usize,
    /// Gauss–Hermite points per axis over teleportation outcomes.
    pub outcome_order: usize,
    pub tolerances: BTreeMap<String, f64>,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
    pub deterministic_reduction: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let t = Tolerances::default();
        let tolerances = [
            ("norm", t.norm),
            ("hermiticity", t.hermiticity),
            ("trace", t.trace),
            ("unitary", t.unitary),
            ("tail", t.tail),
            ("separation", t.separation),
            ("channel_trace", t.channel_trace),
            ("probability", t.probability),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        Self {
            cutoff: 60,
            gh_order: 20,
            outcome_order: 24,
            tolerances,
            output_format: OutputFormat::Csv,
            output_path: None,
            deterministic_reduction: false,
        }
    }
}

/// Values given on the command line; `None` leaves the lower layer alone.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub cutoff: Option<usize>,
    pub gh_order: Option<usize>,
    pub format: Option<OutputFormat>,
    pub out: Option<PathBuf>,
    pub deterministic: bool,
}

fn parse_value<T: FromStr>(path: &Path, line: usize, key: &str, raw: &str) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    raw.parse::<T>().map_err(|e| CliError::Config {
        path: path.to_path_buf(),
        line,
        message: format!("{key}: {e}"),
    })
}

impl RunConfig {
    /// Applies a `key = value` config text on top of `self`.
    pub fn apply_text(&mut self, path: &Path, text: &str) -> Result<(), CliError> {
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw_line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| CliError::Config {
                path: path.to_path_buf(),
                line,
                message: format!("expected key = value, got '{content}'"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "cutoff" => self.cutoff = parse_value(path, line, key, value)?,
                "gh_order" => self.gh_order = parse_value(path, line, key, value)?,
                "outcome_order" => self.outcome_order = parse_value(path, line, key, value)?,
                "format" => self.output_format = parse_value(path, line, key, value)?,
                "out" => self.output_path = Some(PathBuf::from(value)),
                "deterministic" => self.deterministic_reduction = parse_value(path, line, key, value)?,
                _ => match key.strip_prefix("tol.") {
                    Some(name) if self.tolerances.contains_key(name) => {
                        let v = parse_value(path, line, key, value)?;
                        self.tolerances.insert(name.to_string(), v);
                    }
                    _ => {
                        return Err(CliError::Config {
                            path: path.to_path_buf(),
                            line,
                            message: format!("unknown key '{key}'"),
                        })
                    }
                },
            }
        }
        Ok(())
    }

    pub fn apply_overrides(&mut self, o: &Overrides) {
        if let Some(c) = o.cutoff {
            self.cutoff = c;
        }
        if let Some(g) = o.gh_order {
            self.gh_order = g;
        }
        if let Some(f) = o.format {
            self.output_format = f;
        }
        if let Some(p) = &o.out {
            self.output_path = Some(p.clone());
        }
        self.deterministic_reduction |= o.deterministic;
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.cutoff < MIN_CUTOFF {
            return Err(CliError::Usage(format!("cutoff must be >= {MIN_CUTOFF}, got {}", self.cutoff)));
        }
        if self.gh_order == 0 || self.outcome_order == 0 {
            return Err(CliError::Usage("quadrature orders must be >= 1".into()));
        }
        for (name, v) in &self.tolerances {
            if !(*v > 0.0 && v.is_finite()) {
                return Err(CliError::Usage(format!("tolerance {name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Defaults, then the config file (if any), then flags; validated.
    pub fn load(config_path: Option<&Path>, overrides: &Overrides) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = config_path {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
                path: path.to_path_buf(),
                line: 0,
                message: e.to_string(),
            })?;
            cfg.apply_text(path, &text)?;
        }
        cfg.apply_overrides(overrides);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn core_tolerances(&self) -> Tolerances {
        let mut t = Tolerances::default();
        for (name, &v) in &self.tolerances {
            match name.as_str() {
                "norm" => t.norm = v,
                "hermiticity" => t.hermiticity = v,
                "trace" => t.trace = v,
                "unitary" => t.unitary = v,
                "tail" => t.tail = v,
                "separation" => t.separation = v,
                "channel_trace" => t.channel_trace = v,
                "probability" => t.probability = v,
                _ => {}
            }
        }
        t
    }
}
