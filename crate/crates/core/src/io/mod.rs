//! File formats: JSON config, machines and fit documents, CSV tables.

mod config;
mod tables;

use std::path::Path;

use thiserror::Error;

pub use config::{
    ActuatorTemplate, CalibrationConfig, CampaignConfig, CampaignPlan, DesignConfig, FitConfig,
    FreeBeams, MachineEntry, OutputNames, SpecimenTemplate,
};
pub use tables::{
    format_float, read_measurements, read_points, write_measurements, write_points, FitDocument,
    Parsed, RowError, MEASUREMENT_HEADER, POINT_HEADER,
};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {message}")]
    File { path: String, message: String },
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: bad header, expected `{expected}`")]
    Header { path: String, expected: String },
}

impl IoError {
    pub(crate) fn file(path: &Path, err: impl std::fmt::Display) -> Self {
        IoError::File {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| IoError::file(path, e))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| IoError::file(path, e))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text = std::fs::read_to_string(path).map_err(|e| IoError::file(path, e))?;
    serde_json::from_str(&text).map_err(|e| IoError::file(path, e))
}
