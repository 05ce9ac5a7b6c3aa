use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

pub const TOOLKIT: &str = "conelab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Syntax {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Invalid {
        path: String,
        #[source]
        source: conelab::Error,
    },
    #[error("{path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] conelab::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type CliResult<T> = Result<T, CliError>;

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.display().to_string(),
        source,
    })
}

/// Parses a JSON file, reporting syntax and schema errors as `path:line:column`.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Syntax {
        path: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Attaches the input path to a validation error.
pub fn in_file<T>(path: &Path, r: conelab::Result<T>) -> CliResult<T> {
    r.map_err(|source| CliError::Invalid {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
}

/// A failed verdict: the invariant that broke and the statement being checked.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub invariant: String,
    pub claim: String,
    pub detail: String,
}

impl Failure {
    pub fn new(invariant: impl Into<String>, claim: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            invariant: invariant.into(),
            claim: claim.into(),
            detail: detail.into(),
        }
    }
}

/// Canonical report: toolkit version, the full configuration, the verdict and the payload.
/// Contains no timings or timestamps, so identical inputs give byte-identical files.
#[derive(Serialize)]
pub struct Report<'a, C: Serialize, R: Serialize> {
    pub toolkit: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: &'a C,
    pub verdict: Outcome,
    pub failures: Vec<Failure>,
    pub result: R,
}

impl<'a, C: Serialize, R: Serialize> Report<'a, C, R> {
    pub fn new(command: &'static str, config: &'a C, failures: Vec<Failure>, result: R) -> Self {
        Self {
            toolkit: TOOLKIT,
            version: VERSION,
            command,
            config,
            verdict: if failures.is_empty() { Outcome::Pass } else { Outcome::Fail },
            failures,
            result,
        }
    }

    pub fn to_json(&self) -> CliResult<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// Writes `text` to `out`, or to stdout when no path is given.
pub fn emit(out: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Write {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
