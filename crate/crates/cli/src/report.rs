use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_REJECT: u8 = 1;
pub const EXIT_LIMIT: u8 = 2;
pub const EXIT_USAGE: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn input(path: &Path, e: impl Display) -> Self {
        CliError::Input {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }
}

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// What a command prints: prose for people, key=value pairs for scripts.
#[derive(Debug, Default)]
pub struct Report {
    pub code: u8,
    pub human: Vec<String>,
    pub fields: Vec<(String, String)>,
    /// Prose is the payload; printed even under --porcelain.
    pub raw: bool,
}

impl Report {
    pub fn new(code: u8, status: &str) -> Self {
        Self {
            code,
            human: Vec::new(),
            fields: vec![("status".into(), status.into())],
            raw: false,
        }
    }

    pub fn say(mut self, line: impl Into<String>) -> Self {
        self.human.push(line.into());
        self
    }

    pub fn field(mut self, key: &str, value: impl Display) -> Self {
        self.fields.push((key.into(), value.to_string()));
        self
    }

    /// Write errors (a closed pipe) are ignored.
    pub fn print(&self, porcelain: bool) {
        let mut out = std::io::stdout().lock();
        let _ = if porcelain && !self.raw {
            self.fields
                .iter()
                .try_for_each(|(k, v)| writeln!(out, "{k}={v}"))
        } else {
            self.human.iter().try_for_each(|l| writeln!(out, "{l}"))
        };
    }
}
