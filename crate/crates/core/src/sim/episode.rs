//! Episode simulation and dataset generation.

use rand::Rng;
use rayon::prelude::*;

use crate::nn::init::{derive_seed, seeded_rng};

use super::actuation::actuation_profile;
use super::dynamics::{finger_pose, step_dynamics, tip_penetration};
use super::imu::imu_readout;
use super::{EpisodeConfig, GripperConfig, GripperState, ObjectSpec, Shape, SimError};

pub const EPISODE_STEPS: usize = 200;
pub const EPISODE_CHANNELS: usize = 12;
pub const EPISODE_VALUES: usize = EPISODE_STEPS * EPISODE_CHANNELS;

/// Where an episode came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    Sim,
    ShiftedSim,
    ExternalReal,
}

impl Provenance {
    pub fn code(self) -> u8 {
        match self {
            Provenance::Sim => 0,
            Provenance::ShiftedSim => 1,
            Provenance::ExternalReal => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Provenance> {
        match code {
            0 => Some(Provenance::Sim),
            1 => Some(Provenance::ShiftedSim),
            2 => Some(Provenance::ExternalReal),
            _ => None,
        }
    }
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Provenance::Sim => write!(f, "sim"),
            Provenance::ShiftedSim => write!(f, "shifted-sim"),
            Provenance::ExternalReal => write!(f, "external-real"),
        }
    }
}

/// One squeeze/release recording: a 200 x 12 signal matrix (finger-1 accel
/// xyz, finger-1 gyro xyz, finger-2 accel xyz, finger-2 gyro xyz) with its
/// stiffness label.
#[derive(Clone, Debug, PartialEq)]
pub struct Episode {
    signal: Vec<f64>,
    pub stiffness_label: f64,
    pub shape: Shape,
    pub provenance: Provenance,
    pub seed: u64,
}

impl Episode {
    pub fn from_parts(
        signal: Vec<f64>,
        stiffness_label: f64,
        shape: Shape,
        provenance: Provenance,
        seed: u64,
    ) -> Result<Episode, SimError> {
        if signal.len() != EPISODE_VALUES {
            return Err(SimError::Config(format!(
                "episode signal must hold {EPISODE_VALUES} values (200 x 12), got {}",
                signal.len()
            )));
        }
        if !signal.iter().all(|v| v.is_finite()) {
            return Err(SimError::Config("episode signal contains non-finite values".into()));
        }
        if !(stiffness_label > 0.0) || !stiffness_label.is_finite() {
            return Err(SimError::Config(format!(
                "stiffness label must be strictly positive, got {stiffness_label}"
            )));
        }
        Ok(Episode {
            signal,
            stiffness_label,
            shape,
            provenance,
            seed,
        })
    }

    /// Row-major signal, time-major channel-minor.
    pub fn signal(&self) -> &[f64] {
        &self.signal
    }

    pub fn at(&self, step: usize, channel: usize) -> f64 {
        self.signal[step * EPISODE_CHANNELS + channel]
    }

    /// Replaces the signal, keeping the label and tags.
    pub(crate) fn with_signal(&self, signal: Vec<f64>) -> Episode {
        debug_assert_eq!(signal.len(), EPISODE_VALUES);
        Episode {
            signal,
            ..*self
        }
    }
}

/// Diagnostics gathered while simulating.
#[derive(Clone, Copy, Debug, Default)]
pub struct EpisodeTrace {
    pub peak_tip_penetration: f64,
    pub peak_joint_deflection: f64,
}

fn scene_fits(gripper: &GripperConfig, object: &ObjectSpec) -> Result<(), SimError> {
    let half = 0.5 * gripper.finger_base_separation;
    if object.center[0].abs() + object.size >= half {
        return Err(SimError::Config(format!(
            "object (center x {}, size {}) does not fit between fingers at +-{half}",
            object.center[0], object.size
        )));
    }
    Ok(())
}

/// Simulates one squeeze-and-release episode. Identical inputs (including the
/// seed) produce a bit-identical episode.
pub fn simulate_episode(
    gripper: &GripperConfig,
    object: &ObjectSpec,
    cfg: &EpisodeConfig,
) -> Result<Episode, SimError> {
    simulate_episode_traced(gripper, object, cfg).map(|(ep, _)| ep)
}

/// Like [`simulate_episode`], additionally returning squeeze diagnostics.
pub fn simulate_episode_traced(
    gripper: &GripperConfig,
    object: &ObjectSpec,
    cfg: &EpisodeConfig,
) -> Result<(Episode, EpisodeTrace), SimError> {
    gripper.validate()?;
    object.validate()?;
    cfg.validate()?;
    scene_fits(gripper, object)?;

    let shift = cfg.domain_shift.clone().unwrap_or_default();
    let provenance = if shift.is_identity() {
        Provenance::Sim
    } else {
        Provenance::ShiftedSim
    };

    // Shift scales perturb the dynamics; biases perturb the sensors.
    let mut eff_gripper = gripper.clone();
    eff_gripper.joint_damping *= shift.joint_damping_scale;
    let mut eff_object = object.clone();
    eff_object.contact_damping *= shift.contact_damping_scale;

    let mut rng = seeded_rng(cfg.seed);
    let jitter = shift.torque_profile_jitter * (2.0 * rng.random::<f64>() - 1.0);
    let torque_factor = 1.0 + jitter;

    let total = cfg.total_steps();
    let oversample = cfg.oversample();
    let dt = cfg.integration_dt;

    let mut signal = Vec::with_capacity(EPISODE_VALUES);
    let mut state = GripperState::rest(gripper);
    let mut trace = EpisodeTrace::default();

    for step in 1..=total {
        let t_prev = (step - 1) as f64 * dt;
        let torque = actuation_profile(t_prev, cfg, gripper)? * torque_factor;
        let next = step_dynamics(&state, &eff_gripper, &eff_object, torque, cfg.gravity, dt)?;

        let pen = tip_penetration(&next, &eff_gripper, &eff_object);
        if pen > trace.peak_tip_penetration {
            trace.peak_tip_penetration = pen;
        }
        for &a in &next.joint_angles {
            if a.abs() > trace.peak_joint_deflection {
                trace.peak_joint_deflection = a.abs();
            }
        }

        if step % oversample == 0 {
            let frames = imu_readout(&state, &next, &eff_gripper, dt, cfg.gravity, &shift)?;
            for frame in frames {
                signal.extend_from_slice(&frame.accel);
                signal.extend_from_slice(&frame.gyro);
            }
        }
        state = next;
    }

    let episode = Episode::from_parts(signal, object.stiffness, object.shape, provenance, cfg.seed)?;
    Ok((episode, trace))
}

/// Evenly spaced stiffness labels over `[min, max]` (midpoint when n = 1).
pub fn stiffness_grid(range: (f64, f64), count: usize) -> Vec<f64> {
    let (min, max) = range;
    if count == 1 {
        return vec![0.5 * (min + max)];
    }
    (0..count)
        .map(|i| min + i as f64 * (max - min) / (count - 1) as f64)
        .collect()
}

/// Generates `count` episodes with labels on a uniform grid over
/// `stiffness_range`, cycling through `shapes`. Per-episode seeds derive from
/// the master seed, so results are independent of worker count and order.
pub fn generate_dataset(
    gripper: &GripperConfig,
    count: usize,
    stiffness_range: (f64, f64),
    shapes: &[Shape],
    cfg: &EpisodeConfig,
    seed: u64,
) -> Result<Vec<Episode>, SimError> {
    if count == 0 {
        return Err(SimError::Config("episode count must be positive".into()));
    }
    if shapes.is_empty() {
        return Err(SimError::Config("shape set must not be empty".into()));
    }
    if !(stiffness_range.0 > 0.0) || stiffness_range.0 >= stiffness_range.1 {
        return Err(SimError::Config(format!(
            "stiffness range must satisfy 0 < min < max, got {stiffness_range:?}"
        )));
    }
    let labels = stiffness_grid(stiffness_range, count);
    (0..count)
        .into_par_iter()
        .map(|i| {
            let shape = shapes[i % shapes.len()];
            let object = ObjectSpec {
                stiffness: labels[i],
                ..ObjectSpec::reference(shape, labels[i])
            };
            let mut episode_cfg = cfg.clone();
            episode_cfg.seed = derive_seed(seed, i as u64);
            simulate_episode(gripper, &object, &episode_cfg)
        })
        .collect()
}

/// Peak fingertip penetration over a whole episode, for physics checks.
pub fn peak_penetration(
    gripper: &GripperConfig,
    object: &ObjectSpec,
    cfg: &EpisodeConfig,
) -> Result<f64, SimError> {
    simulate_episode_traced(gripper, object, cfg).map(|(_, t)| t.peak_tip_penetration)
}

/// Fingertip position at rest, for geometry sanity checks.
pub fn rest_tip(gripper: &GripperConfig, finger: usize) -> [f64; 2] {
    let state = GripperState::rest(gripper);
    finger_pose(finger, &state, gripper).tip()
}
