use thiserror::Error;

#[derive(Debug, Error)]
pub enum NnError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid state: {0}")]
    State(String),
    #[error("non-finite value produced in {0}")]
    NonFinite(&'static str),
    #[error("checkpoint parse error at byte {offset}: {msg}")]
    Parse { offset: u64, msg: String },
    #[error("unsupported checkpoint version {found} (expected {expected})")]
    Version { found: u16, expected: u16 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
