//! Versioned, self-describing JSON model files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cli::RunConfig;
use crate::error::{Result, SrlError};
use crate::tuning::SrlFit;

pub const FORMAT_NAME: &str = "srlpac-model";
pub const FORMAT_MAJOR: u32 = 1;
pub const FORMAT_VERSION: &str = "1.0";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub format_version: String,
    pub config: RunConfig,
    /// Observations in the training partition; later rows are test data.
    pub n_train: usize,
    pub n_total: usize,
    pub fit: SrlFit,
}

impl ModelFile {
    pub fn new(config: RunConfig, n_train: usize, n_total: usize, fit: SrlFit) -> Self {
        Self {
            format: FORMAT_NAME.to_string(),
            format_version: FORMAT_VERSION.to_string(),
            config,
            n_train,
            n_total,
            fit,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let format = value.get("format").and_then(|v| v.as_str()).unwrap_or("");
        if format != FORMAT_NAME {
            return Err(SrlError::ModelFormat(format!(
                "not a {FORMAT_NAME} file (format field: {format:?})"
            )));
        }
        let version = value
            .get("format_version")
            .and_then(|v| v.as_str())
            .ok_or_else(|| SrlError::ModelFormat("missing format_version".into()))?;
        let major: u32 = version
            .split('.')
            .next()
            .and_then(|m| m.parse().ok())
            .ok_or_else(|| {
                SrlError::ModelFormat(format!("malformed format_version {version:?}"))
            })?;
        if major != FORMAT_MAJOR {
            return Err(SrlError::ModelFormat(format!(
                "model format version {version} is not supported (this build reads {FORMAT_MAJOR}.x)"
            )));
        }
        serde_json::from_value(value).map_err(|e| SrlError::ModelFormat(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
