use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("actuation time {t} outside [0, {duration}]")]
    ActuationDomain { t: f64, duration: f64 },
    #[error("integrator produced a non-finite state at step {step}")]
    IntegratorBlowup { step: usize },
}
