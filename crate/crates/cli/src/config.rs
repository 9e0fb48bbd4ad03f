//! JSON run configuration.

use std::path::PathBuf;

use nniquad::{ControllerParams, Error as CoreError, QuadParams, SimConfig};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub quad: QuadParams,
    pub controller: ControllerParams,
    pub sim: SimConfig,
    pub output_path: PathBuf,
    pub output_format: OutputFormat,
    pub emit_plot: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            quad: QuadParams::default(),
            controller: ControllerParams::default(),
            sim: SimConfig::default(),
            output_path: PathBuf::from("trajectory.csv"),
            output_format: OutputFormat::Csv,
            emit_plot: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("PARSE_ERROR at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("VALIDATION_ERROR in `{field}`: {message}")]
    Validation { field: String, message: String },
}

/// Parses and validates a configuration document. Absent fields take the
/// nominal defaults; unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    /// Field-level checks. The sector-bound condition is not checked here so
    /// that out-of-range controllers can still be loaded and analysed.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let scoped = |section: &str, e: CoreError| match e {
            CoreError::InvalidParameter { name, reason } => ConfigError::Validation {
                field: format!("{section}.{name}"),
                message: reason,
            },
            other => ConfigError::Validation { field: section.into(), message: other.to_string() },
        };
        self.quad.validate().map_err(|e| scoped("quad", e))?;
        self.controller.validate().map_err(|e| scoped("controller", e))?;
        self.sim.validate().map_err(|e| scoped("sim", e))?;
        if self.output_path.as_os_str().is_empty() || self.output_path.file_name().is_none() {
            return Err(ConfigError::Validation {
                field: "output_path".into(),
                message: "must name a file".into(),
            });
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
