use fold_dynamics_core::Error;
use serde::Serialize;
use std::fmt;

pub const EXIT_OK: u8 = 0;
pub const EXIT_NUMERICAL: u8 = 1;
pub const EXIT_HALT: u8 = 2;
pub const EXIT_CONFIG: u8 = 64;

/// A failed command with its exit code and a machine-readable kind.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub code: u8,
    pub kind: String,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Self { code: EXIT_CONFIG, kind: "Config".into(), message: message.into() }
    }

    pub fn io(context: &str, e: std::io::Error) -> Self {
        Self { code: EXIT_NUMERICAL, kind: "Io".into(), message: format!("{context}: {e}") }
    }

    pub fn halt(kind: &str, message: impl Into<String>) -> Self {
        Self { code: EXIT_HALT, kind: kind.into(), message: message.into() }
    }

    /// JSON line for stderr.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("failure serialises")
    }
}

/// Variant name of a core error.
pub fn error_kind(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string()
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DegenerateRadial { .. } => EXIT_HALT,
            _ => EXIT_NUMERICAL,
        };
        Self { code, kind: error_kind(&e), message: e.to_string() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl std::error::Error for Failure {}
