//! Deterministic planar squeeze-and-release simulation.
//!
//! Two hinged-link finger chains hang from fixed bases and close on a fixed
//! deformable object under a torque profile, then release. Contact is a
//! one-sided penalty spring-damper; integration is semi-implicit Euler with
//! 10x oversampling relative to the 200-sample IMU output. Everything is a
//! pure function of (configs, seed): episodes are bit-reproducible and safe
//! to generate from any number of workers.

mod actuation;
mod config;
mod contact;
pub(crate) mod dynamics;
mod episode;
mod error;
mod imu;
mod state;

pub use actuation::actuation_profile;
pub use config::{DomainShift, EpisodeConfig, GripperConfig, ObjectSpec, Shape};
pub use contact::{contact_force, penetration_depth};
pub use dynamics::{step_dynamics, tip_penetration};
pub use episode::{
    generate_dataset, peak_penetration, rest_tip, simulate_episode, simulate_episode_traced,
    stiffness_grid, Episode, EpisodeTrace, Provenance, EPISODE_CHANNELS, EPISODE_STEPS,
    EPISODE_VALUES,
};
pub use error::SimError;
pub use imu::{imu_readout, ImuFrame};
pub use state::GripperState;
