//! Run configuration: defaults, `key = value` files, `MODHEAT_` environment
//! overrides and command-line flags, applied in that order.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::CliError;

pub const ENV_PREFIX: &str = "MODHEAT_";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(CliError::Argument(format!(
                "unknown output format {other:?} (expected csv or json)"
            ))),
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

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub quad_tol: f64,
    pub oracle_window: i64,
    pub oracle_terms: usize,
    pub gamma_ball_radius: u32,
    pub zero_threshold: f64,
    pub output_format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            quad_tol: 1e-10,
            oracle_window: 80,
            oracle_terms: 65,
            gamma_ball_radius: 24,
            zero_threshold: 1e-8,
            output_format: OutputFormat::Csv,
        }
    }
}

pub const KEYS: [&str; 6] = [
    "quad_tol",
    "oracle_window",
    "oracle_terms",
    "gamma_ball_radius",
    "zero_threshold",
    "output_format",
];

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Argument(format!("invalid value {value:?} for {key}")))
}

impl RunConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "quad_tol" => self.quad_tol = parse_value(key, value)?,
            "oracle_window" => self.oracle_window = parse_value(key, value)?,
            "oracle_terms" => self.oracle_terms = parse_value(key, value)?,
            "gamma_ball_radius" => self.gamma_ball_radius = parse_value(key, value)?,
            "zero_threshold" => self.zero_threshold = parse_value(key, value)?,
            "output_format" => self.output_format = value.parse()?,
            _ => return Err(CliError::Argument(format!("unknown configuration key {key:?}"))),
        }
        Ok(())
    }

    /// Applies a flat `key = value` file; `#` starts a comment.
    pub fn apply_file_text(&mut self, text: &str) -> Result<(), CliError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Argument(format!("config line {}: expected key = value", i + 1)))?;
            self.set(key.trim(), value)
                .map_err(|e| CliError::Argument(format!("config line {}: {}", i + 1, e.message())))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Argument(format!("cannot read config {}: {e}", path.display())))?;
        self.apply_file_text(&text)
    }

    /// Applies `MODHEAT_<KEY>` variables from the given environment.
    pub fn apply_env(&mut self, env: &BTreeMap<String, String>) -> Result<(), CliError> {
        for key in KEYS {
            let var = format!("{ENV_PREFIX}{}", key.to_ascii_uppercase());
            if let Some(v) = env.get(&var) {
                self.set(key, v)
                    .map_err(|e| CliError::Argument(format!("{var}: {}", e.message())))?;
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(CliError::Argument(format!("{name} must be a positive number, got {x}")))
            }
        };
        positive("quad_tol", self.quad_tol)?;
        positive("zero_threshold", self.zero_threshold)?;
        if !(1..=250).contains(&self.oracle_window) {
            return Err(CliError::Argument(format!(
                "oracle_window must be in 1..=250, got {}",
                self.oracle_window
            )));
        }
        if self.oracle_terms == 0 || self.oracle_terms > 10_000 {
            return Err(CliError::Argument(format!(
                "oracle_terms must be in 1..=10000, got {}",
                self.oracle_terms
            )));
        }
        if !(1..=30).contains(&self.gamma_ball_radius) {
            return Err(CliError::Argument(format!(
                "gamma_ball_radius must be in 1..=30, got {}",
                self.gamma_ball_radius
            )));
        }
        Ok(())
    }
}

/// Values given on the command line; `None` leaves the layer below in place.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub quad_tol: Option<f64>,
    pub oracle_window: Option<i64>,
    pub oracle_terms: Option<usize>,
    pub gamma_ball_radius: Option<u32>,
    pub zero_threshold: Option<f64>,
    pub output_format: Option<OutputFormat>,
}

impl Overrides {
    pub fn apply(&self, c: &mut RunConfig) {
        if let Some(v) = self.quad_tol {
            c.quad_tol = v;
        }
        if let Some(v) = self.oracle_window {
            c.oracle_window = v;
        }
        if let Some(v) = self.oracle_terms {
            c.oracle_terms = v;
        }
        if let Some(v) = self.gamma_ball_radius {
            c.gamma_ball_radius = v;
        }
        if let Some(v) = self.zero_threshold {
            c.zero_threshold = v;
        }
        if let Some(v) = self.output_format {
            c.output_format = v;
        }
    }
}

/// Defaults, then the file, then the environment, then the flags.
pub fn resolve(file: Option<&Path>, env: &BTreeMap<String, String>, flags: &Overrides) -> Result<RunConfig, CliError> {
    let mut c = RunConfig::default();
    if let Some(path) = file {
        c.apply_file(path)?;
    }
    c.apply_env(env)?;
    flags.apply(&mut c);
    c.validate()?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layers_in_order() {
        let mut c = RunConfig::default();
        c.apply_file_text("quad_tol = 1e-12\n# comment\noracle_terms=70  # trailing\n")
            .unwrap();
        assert_eq!(c.quad_tol, 1e-12);
        assert_eq!(c.oracle_terms, 70);
        let env = BTreeMap::from([("MODHEAT_ORACLE_TERMS".to_string(), "80".to_string())]);
        c.apply_env(&env).unwrap();
        assert_eq!(c.oracle_terms, 80);
        let flags = Overrides {
            oracle_terms: Some(90),
            ..Overrides::default()
        };
        flags.apply(&mut c);
        assert_eq!(c.oracle_terms, 90);
        assert_eq!(c.quad_tol, 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let mut c = RunConfig::default();
        assert!(c.apply_file_text("nonsense").is_err());
        assert!(c.apply_file_text("colour = blue").is_err());
        assert!(c.apply_file_text("quad_tol = fast").is_err());
        let c = RunConfig {
            quad_tol: 0.0,
            ..RunConfig::default()
        };
        assert!(c.validate().is_err());
        assert!(RunConfig::default().validate().is_ok());
    }
}
