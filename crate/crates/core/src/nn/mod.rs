//! Dense-tensor numeric core with reverse-mode gradients.
//!
//! Everything is f64 and deterministic: forward passes are pure functions of
//! (input, parameters), gradient reductions use a fixed summation order that
//! does not depend on the worker count, and all initialization is driven by
//! explicit seeds.

mod adam;
mod checkpoint;
mod conv1d;
mod dense;
mod error;
mod gradcheck;
pub mod init;
pub mod linalg;
mod loss;
mod lstm;
mod param;
mod tensor;

pub use adam::{adam_step, AdamConfig};
pub use checkpoint::{load_checkpoint, save_checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use conv1d::{conv1d_output_len, Conv1d, Conv1dCache};
pub use dense::{Activation, Dense, DenseCache};
pub use error::NnError;
pub use gradcheck::{gradient_check, GradCheckConfig, GradCheckReport};
pub use loss::mse_loss;
pub use lstm::{
    bilstm_backward, bilstm_forward, lstm_backward, lstm_forward, lstm_step, BilstmCache,
    Direction, LstmCache, LstmCellParams,
};
pub use param::Parameter;
pub use tensor::Tensor;
