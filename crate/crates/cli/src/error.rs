use std::fmt;

/// Errors with a stable machine-readable code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse(String),
    Validation(&'static str, String),
    Computation(&'static str, String),
    Io(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Parse(_) => "parse_error",
            CliError::Validation(code, _) | CliError::Computation(code, _) => code,
            CliError::Io(_) => "io",
        }
    }

    pub fn exit_status(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) | CliError::Validation(..) => 2,
            CliError::Computation(..) | CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Parse(m) | CliError::Io(m) => f.write_str(m.trim_end()),
            CliError::Validation(_, m) | CliError::Computation(_, m) => f.write_str(m),
        }
    }
}
