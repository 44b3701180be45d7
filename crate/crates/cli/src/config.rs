//! Run configuration: `--config` JSON files, flag overrides and the cutoff
//! environment override.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use iontrap_core::Branch;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const CUTOFF_ENV: &str = "IONTRAP_CUTOFF";
pub const DEFAULT_CUTOFF: usize = 150;
pub const MIN_CUTOFF: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Fig,
    Solve,
    Validate,
    Cat,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// `min:max:step`, inclusive of `max` when it falls on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EtaRange {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl EtaRange {
    pub const DEFAULT: EtaRange = EtaRange {
        min: 0.0,
        max: 1.0,
        step: 0.01,
    };

    pub fn new(min: f64, max: f64, step: f64) -> CliResult<Self> {
        if !(min.is_finite() && max.is_finite() && step.is_finite()) {
            return Err(CliError::usage("eta range must be finite"));
        }
        if !(step > 0.0) {
            return Err(CliError::usage(format!("eta step must be > 0, got {step}")));
        }
        if min > max {
            return Err(CliError::usage(format!("eta range has min {min} > max {max}")));
        }
        if min < 0.0 {
            return Err(CliError::usage(format!("eta must be >= 0, got min {min}")));
        }
        let r = Self { min, max, step };
        if r.len() > 1_000_000 {
            return Err(CliError::usage("eta range has more than 1e6 points"));
        }
        Ok(r)
    }

    pub fn len(&self) -> usize {
        ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid points computed as `min + i·step`, so no error accumulates.
    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.min + i as f64 * self.step).collect()
    }
}

impl FromStr for EtaRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [min, max, step] = parts.as_slice() else {
            return Err(format!("expected min:max:step, got `{s}`"));
        };
        let num = |t: &str| -> Result<f64, String> {
            t.trim().parse::<f64>().map_err(|e| format!("bad number `{t}`: {e}"))
        };
        EtaRange::new(num(min)?, num(max)?, num(step)?).map_err(|e| e.message)
    }
}

impl fmt::Display for EtaRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.min, self.max, self.step)
    }
}

impl<'de> Deserialize<'de> for EtaRange {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Triple([f64; 3]),
            Object { min: f64, max: f64, step: f64 },
        }
        let (min, max, step) = match Raw::deserialize(d)? {
            Raw::Text(s) => return s.parse().map_err(serde::de::Error::custom),
            Raw::Triple([a, b, c]) => (a, b, c),
            Raw::Object { min, max, step } => (min, max, step),
        };
        EtaRange::new(min, max, step).map_err(|e| serde::de::Error::custom(e.message))
    }
}

/// Contents of a `--config` file. Every field is optional; command-line
/// flags take precedence over values given here.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<CommandKind>,
    pub omega: Option<f64>,
    pub eta: Option<f64>,
    pub eta_range: Option<EtaRange>,
    pub detuning: Option<f64>,
    pub eps: Option<f64>,
    pub order: Option<usize>,
    pub cutoff: Option<usize>,
    pub branches: Option<Vec<Branch>>,
    pub output_path: Option<PathBuf>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::usage(format!("invalid config {}: {e}", path.display())))
    }
}

/// Flag, then config file, then `IONTRAP_CUTOFF`, then 150. Anything below
/// 60 is rejected.
pub fn resolve_cutoff(flag: Option<usize>, config: Option<usize>) -> CliResult<usize> {
    let cutoff = match flag.or(config) {
        Some(c) => c,
        None => match std::env::var(CUTOFF_ENV) {
            Ok(v) => v.trim().parse().map_err(|e| {
                CliError::usage(format!("{CUTOFF_ENV}=`{v}` is not a cutoff: {e}"))
            })?,
            Err(_) => DEFAULT_CUTOFF,
        },
    };
    if cutoff < MIN_CUTOFF {
        return Err(CliError::usage(format!(
            "cutoff must be at least {MIN_CUTOFF}, got {cutoff}"
        )));
    }
    Ok(cutoff)
}

/// Explicit format, else by output extension, else CSV.
pub fn resolve_format(explicit: Option<Format>, out: Option<&Path>) -> Format {
    explicit.unwrap_or_else(|| match out.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
        _ => Format::Csv,
    })
}

pub fn parse_branches(s: &str) -> Result<Vec<Branch>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let b: Branch = part.parse()?;
        if !out.contains(&b) {
            out.push(b);
        }
    }
    if out.is_empty() {
        return Err("no branches given".into());
    }
    Ok(out)
}
