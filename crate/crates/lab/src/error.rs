use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = LabError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}, line {line}: {message}", path.display())]
    Csv { path: PathBuf, line: u64, message: String },
    #[error("{}: empty dataset", path.display())]
    EmptyDataset { path: PathBuf },
    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("{}: {message}", path.display())]
    Model { path: PathBuf, message: String },
    #[error("{what}: dimension {found} does not match {expected}")]
    Dimension { what: String, expected: usize, found: usize },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] gtn_core::Error),
}

impl LabError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io { path: path.into(), source }
    }

    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        LabError::Config { field: field.into(), message: message.into() }
    }

    /// Stable short identifier, printed in brackets before the message.
    pub fn code(&self) -> &'static str {
        match self {
            LabError::Io { .. } => "io",
            LabError::Csv { .. } => "csv",
            LabError::EmptyDataset { .. } => "empty_dataset",
            LabError::Config { .. } => "config",
            LabError::Model { .. } => "model",
            LabError::Dimension { .. } => "dimension",
            LabError::Usage(_) => "usage",
            LabError::Core(_) => "compute",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Usage(_) | LabError::Config { .. } => 2,
            _ => 1,
        }
    }

    /// `error[code]: message`, always on one line.
    pub fn one_line(&self) -> String {
        let msg = self.to_string().replace(['\n', '\r'], " ");
        format!("error[{}]: {}", self.code(), msg.trim())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_line_has_code_and_no_newlines() {
        let e = LabError::Usage("first\nsecond".into());
        assert_eq!(e.one_line(), "error[usage]: first second");
        let e = LabError::EmptyDataset { path: "a.csv".into() };
        assert_eq!(e.one_line(), "error[empty_dataset]: a.csv: empty dataset");
        assert_eq!(e.exit_code(), 1);
    }
}
