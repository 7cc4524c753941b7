use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid state: {0}")]
    State(String),
    #[error("degenerate displacement: d1 equals d2")]
    DegenerateDisplacement,
    #[error("parse error at byte {offset}: {msg}")]
    Parse { offset: u64, msg: String },
    #[error("unsupported dataset version {found} (expected {expected})")]
    Version { found: u16, expected: u16 },
    #[error("csv error in {file} (row {row}, column {column}): {msg}")]
    Csv {
        file: String,
        row: usize,
        column: usize,
        msg: String,
    },
    #[error(transparent)]
    Sim(#[from] crate::sim::SimError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
