use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] orthwalk::Error),
    #[error("{0}")]
    Io(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::Io(_) => "Io",
            CliError::Config(_) => "InvalidConfig",
            CliError::Usage(_) => "Usage",
        }
    }

    /// 3 for resource limits, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(orthwalk::Error::ResourceLimit(_)) => 3,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "error": { "code": self.code(), "message": self.to_string() } })
    }
}
