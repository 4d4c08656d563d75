//! Command implementations behind the `eprb` binary.
//!
//! Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 internal
//! failure while running an audit or simulation. Output files are written
//! to a temporary file in the target directory and renamed into place.

mod commands;
mod config;

use std::path::Path;

use thiserror::Error;

pub use commands::{
    cmd_audit, cmd_certify, cmd_scan, cmd_simulate, default_scan_deltas, AUDIT_JSON, AUDIT_TEXT,
    CURVE_CSV, RECORDS_JSONL, SUMMARY_CSV,
};
pub use config::{
    parse_binding, parse_model, parse_policy, AuditConfig, BindingConfig, GrandmaModeConfig,
    ModelConfig, PolicyConfig, Resolved, RunConfig, DEFAULT_N_TRIALS, DEFAULT_OUT,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Internal(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io(_) => "io",
            CliError::Internal(_) => "internal",
        }
    }

    /// One-line JSON description for standard error.
    pub fn to_json_line(&self) -> String {
        serde_json::json!({
            "error": self.kind(),
            "code": self.exit_code(),
            "message": self.to_string(),
        })
        .to_string()
    }
}

impl From<crate::engine::EngineError> for CliError {
    fn from(e: crate::engine::EngineError) -> Self {
        use crate::engine::EngineError;
        match e {
            EngineError::Io(e) => CliError::Io(e.to_string()),
            EngineError::Csv(e) if e.is_io_error() => CliError::Io(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<crate::analysis::AnalysisError> for CliError {
    fn from(e: crate::analysis::AnalysisError) -> Self {
        match e {
            crate::analysis::AnalysisError::Engine(e) => e.into(),
            other => CliError::Internal(other.to_string()),
        }
    }
}

/// Write `path` atomically: temp file in the same directory, then rename.
pub(crate) fn write_atomic<F>(path: &Path, fill: F) -> Result<(), CliError>
where
    F: FnOnce(&mut std::io::BufWriter<&mut tempfile::NamedTempFile>) -> Result<(), CliError>,
{
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    {
        let mut w = std::io::BufWriter::new(&mut tmp);
        fill(&mut w)?;
        use std::io::Write;
        w.flush().map_err(io)?;
    }
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
