use serde_json::json;

use crate::config::ConfigErrors;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigErrors),
    #[error(transparent)]
    Core(#[from] evsim_core::Error),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 0 success, 1 io, 2 config (including stability), 3 numerical domain,
    /// 4 verification failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Config(_) | CliError::Core(evsim_core::Error::Unstable { .. }) => 2,
            CliError::Core(_) => 3,
            CliError::Verification(_) => 4,
        }
    }

    /// Machine-readable form written to stderr.
    pub fn to_json(&self) -> serde_json::Value {
        let kind = match self {
            CliError::Io { .. } => "io",
            CliError::Config(_) | CliError::Core(evsim_core::Error::Unstable { .. }) => "config",
            CliError::Core(_) => "domain",
            CliError::Verification(_) => "verification",
        };
        let mut value = json!({
            "error": kind,
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        });
        match self {
            CliError::Config(errors) => value["details"] = json!(errors.0),
            CliError::Core(e) => value["module"] = json!(e.module()),
            _ => {}
        }
        value
    }
}
