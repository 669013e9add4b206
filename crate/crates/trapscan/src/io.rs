use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;
use trapscan_core::simulator::AppModel;
use trapscan_core::Trace;

/// Failure to turn a file into a valid value. Every variant is an input
/// error from the command line's point of view.
#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {}", path.display())]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("invalid content in {}", path.display())]
    Invariant { path: PathBuf, source: trapscan_core::Error },
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T, LoadError> {
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.into(), source })?;
    serde_json::from_str(&text).map_err(|source| LoadError::Parse { path: path.into(), source })
}

/// Reads a trace and checks its invariants.
pub fn load_trace(path: &Path) -> Result<Trace, LoadError> {
    let trace: Trace = load_json(path)?;
    trace.validate().map_err(|source| LoadError::Invariant { path: path.into(), source })?;
    Ok(trace)
}

pub fn load_model(path: &Path) -> Result<AppModel, LoadError> {
    let model: AppModel = load_json(path)?;
    model.validate().map_err(|source| LoadError::Invariant { path: path.into(), source })?;
    Ok(model)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("in-memory values serialize");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> std::io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, to_json(value))
}

/// File-name-safe version of a trace id.
pub fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '_') { c } else { '_' })
        .collect()
}
