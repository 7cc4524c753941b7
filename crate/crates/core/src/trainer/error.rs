use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("MAPE undefined: dataset contains a zero stiffness label")]
    ZeroLabel,
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error(transparent)]
    Data(#[from] crate::data::DataError),
    #[error(transparent)]
    Nn(#[from] crate::nn::NnError),
    #[error(transparent)]
    Sim(#[from] crate::sim::SimError),
    #[error("report serialization: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
