use std::fmt;
use std::path::Path;

use serde::Serialize;
use sicprob::io::{parse_document, Document};

use crate::manifest::ManifestBuilder;
use crate::output::{render, write_atomic};

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    VerificationFailed = 1,
    InvalidInput = 2,
    NotFound = 3,
    Internal = 4,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Internal(String),
}

impl CliError {
    pub fn status(&self) -> ExitStatus {
        match self {
            CliError::Input(_) => ExitStatus::InvalidInput,
            CliError::Internal(_) => ExitStatus::Internal,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "invalid input: {msg}"),
            CliError::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

impl From<sicprob::Error> for CliError {
    fn from(e: sicprob::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub struct Session {
    manifest: ManifestBuilder,
    quiet: bool,
}

impl Session {
    pub fn new(command_line: Vec<String>, quiet: bool) -> Self {
        Self {
            manifest: ManifestBuilder::start(command_line),
            quiet,
        }
    }

    pub fn record_seed(&mut self, seed: u64) {
        self.manifest.seed(seed);
    }

    /// Reads and schema-checks a document, recording its digest.
    pub fn read_document(&mut self, path: &Path) -> CliResult<Document> {
        let bytes =
            std::fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        self.manifest.input(&path.display().to_string(), &bytes);
        let text = std::str::from_utf8(&bytes)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        parse_document(text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    pub fn say(&self, line: impl fmt::Display) {
        if !self.quiet {
            println!("{line}");
        }
    }

    /// Writes `payload` plus the run manifest when a destination was given.
    pub fn emit<T: Serialize>(&self, path: Option<&Path>, payload: &T) -> CliResult<()> {
        let Some(path) = path else { return Ok(()) };
        let text = render(payload, &self.manifest.finish())
            .map_err(|e| CliError::Internal(e.to_string()))?;
        write_atomic(path, &text)
            .map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))
    }
}

pub fn format_values(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.12}")).collect();
    format!("[{}]", parts.join(", "))
}
