use std::fmt;

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_IO: u8 = 2;
pub const EXIT_PIPELINE: u8 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Pipeline(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::Pipeline(_) => EXIT_PIPELINE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "i/o: {m}"),
            CliError::Pipeline(m) => write!(f, "pipeline: {m}"),
        }
    }
}

impl From<xscale_core::Error> for CliError {
    fn from(e: xscale_core::Error) -> Self {
        if e.is_io() {
            CliError::Io(e.to_string())
        } else if e.is_config() {
            CliError::Usage(e.to_string())
        } else {
            CliError::Pipeline(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
