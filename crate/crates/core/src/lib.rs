//! Stiffness regression workbench: a planar squeeze-and-release gripper
//! simulator, IMU episode datasets, a small f64 neural-network stack with
//! reverse-mode gradients, three sequence-regression architectures, and a
//! k-fold cross-validation trainer with domain-gap mixing experiments.

pub mod data;
pub mod models;
pub mod nn;
pub mod sim;
pub mod trainer;

pub use data::{ChannelStats, DataError, Dataset, FoldPlan};
pub use models::{Model, ModelKind, ModelSpec};
pub use nn::{NnError, Parameter, Tensor};
pub use sim::{
    DomainShift, Episode, EpisodeConfig, GripperConfig, GripperState, ImuFrame, ObjectSpec,
    Provenance, Shape, SimError,
};
pub use trainer::{MetricsReport, TrainConfig, TrainError};
