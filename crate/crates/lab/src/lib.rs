//! IO, scenarios and the command-line driver around `mulop-core`.
//!
//! Reports are JSON documents with a top-level `"schema": 1`; tabular
//! by-products (witness traces, decay sequences) are CSV.

pub mod formats;
pub mod names;
pub mod scenarios;

use mulop_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Config(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERDICT: u8 = 2;
pub const EXIT_CONFIG: u8 = 3;

impl LabError {
    /// 2 when a construction or check failed on valid input, 3 for bad
    /// configuration or unmet preconditions.
    pub fn exit_code(&self) -> u8 {
        match self {
            LabError::Core(
                Error::FlatAtScale { .. }
                | Error::InvarianceViolation { .. }
                | Error::StarvedSide { .. }
                | Error::NoClusterPoint { .. }
                | Error::EmptyTrace,
            ) => EXIT_VERDICT,
            _ => EXIT_CONFIG,
        }
    }

    /// Variant name for machine-readable reports.
    pub fn kind(&self) -> String {
        match self {
            LabError::Core(e) => {
                let debug = format!("{e:?}");
                debug.split([' ', '(', '{']).next().unwrap_or("").to_string()
            }
            LabError::Config(_) => String::from("Config"),
            LabError::Io(_) => String::from("Io"),
            LabError::Json(_) => String::from("Json"),
            LabError::Csv(_) => String::from("Csv"),
        }
    }
}
