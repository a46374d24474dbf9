//! Batch front-end for `macroq`: manifests of states and measures, optional
//! parameter sweeps, and CSV/JSON reports.

pub mod inspect;
pub mod manifest;
pub mod measure;
pub mod presets;
pub mod report;
pub mod runner;

pub use manifest::{MeasureEntry, OutputFormat, RunManifest, StateEntry, Sweep};
pub use measure::MeasureSpec;
pub use report::ReportRow;
pub use runner::{run, RunOptions};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("unknown preset `{tag}` (known: {known})")]
    UnknownPreset { tag: String, known: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    State(#[from] macroq::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;
