use std::fmt::Debug;
use std::path::Path;

use serde_json::json;

/// A failed command. Validation errors are problems with inputs or
/// arguments (exit 2); internal errors are everything else (exit 3).
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{kind}: {message}")]
    Validation { kind: String, message: String },
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn validation(kind: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Validation {
            kind: kind.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } => 2,
            CliError::Internal(_) => 3,
        }
    }

    pub fn kind(&self) -> &str {
        match self {
            CliError::Validation { kind, .. } => kind,
            CliError::Internal(_) => "Internal",
        }
    }

    /// One-line JSON object for stderr.
    pub fn report(&self) -> String {
        let message = match self {
            CliError::Validation { message, .. } => message.clone(),
            CliError::Internal(m) => m.clone(),
        };
        json!({ "error": { "kind": self.kind(), "message": message, "exit_code": self.exit_code() } })
            .to_string()
    }

    pub fn read(path: &Path, e: std::io::Error) -> Self {
        let kind = match e.kind() {
            std::io::ErrorKind::NotFound => "FileNotFound",
            _ => "Unreadable",
        };
        CliError::validation(kind, format!("{}: {e}", path.display()))
    }

    pub fn write(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Internal(format!("writing {}: {e}", path.display()))
    }
}

/// Variant name of a library error, e.g. `MalformedLine`.
fn variant_name<E: Debug>(e: &E) -> String {
    let debug = format!("{e:?}");
    debug
        .split(|c: char| !c.is_alphanumeric() && c != '_')
        .next()
        .unwrap_or("Error")
        .to_string()
}

macro_rules! validation_from {
    ($($ty:path),* $(,)?) => {$(
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::validation(variant_name(&e), e.to_string())
            }
        }
    )*};
}

validation_from!(
    bfmn_core::ingest::IngestError,
    bfmn_core::normalize::NormalizeError,
    bfmn_core::valence::ValenceError,
    bfmn_core::network::NetworkError,
    bfmn_core::metrics::MetricsError,
    bfmn_core::nullmodel::NullModelError,
);

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Internal(format!("json: {e}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use bfmn_core::network::NetworkError;

    #[test]
    fn kinds_come_from_variant_names() {
        let e: CliError = NetworkError::NotACue("zebra".into()).into();
        assert_eq!(e.kind(), "NotACue");
        assert_eq!(e.exit_code(), 2);
        let v: serde_json::Value = serde_json::from_str(&e.report()).unwrap();
        assert_eq!(v["error"]["kind"], "NotACue");
    }
}
