use serde_json::json;
use translab_core::Error;

/// Failure of a command, split by exit status.
#[derive(Debug)]
pub enum CliError {
    /// Malformed request: exit status 2.
    Config(String),
    /// A well-formed run that could not complete: exit status 3.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn to_json(&self) -> String {
        let (kind, message) = match self {
            CliError::Config(m) => ("config", m),
            CliError::Numerical(m) => ("numerical", m),
        };
        let v = json!({
            "error": { "kind": kind, "message": message },
            "exit_code": self.exit_code(),
            "version": translab_core::VERSION,
        });
        serde_json::to_string_pretty(&v).expect("error serializes")
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_config() {
            CliError::Config(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}
