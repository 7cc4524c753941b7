//! IMU model: one sensor per finger, mounted part-way along the chain.
//!
//! The accelerometer reports specific force in the sensor frame (x along the
//! mount link, y in-plane perpendicular, z out of plane), computed as the
//! finite difference of the mount-point velocity minus in-plane gravity,
//! plus any bias from the domain shift. The gyroscope reports the link's
//! planar rotation rate on the out-of-plane axis; in-plane gyro channels
//! carry bias only.

use super::dynamics::finger_pose;
use super::{DomainShift, GripperConfig, GripperState, SimError};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImuFrame {
    /// m/s^2, sensor frame
    pub accel: [f64; 3],
    /// rad/s, sensor frame
    pub gyro: [f64; 3],
}

impl ImuFrame {
    pub fn is_finite(&self) -> bool {
        self.accel.iter().chain(&self.gyro).all(|v| v.is_finite())
    }
}

/// Mount link index and offset along it for the configured fraction.
fn mount_site(gripper: &GripperConfig) -> (usize, f64) {
    let distance = gripper.imu_mount_fraction * gripper.finger_length();
    let raw = (distance / gripper.link_length).floor() as usize;
    let link = raw.min(gripper.links_per_finger - 1);
    (link, distance - link as f64 * gripper.link_length)
}

fn mount_state(
    finger: usize,
    state: &GripperState,
    gripper: &GripperConfig,
) -> ([f64; 2], f64, f64) {
    let n = gripper.links_per_finger;
    let (link, offset) = mount_site(gripper);
    let pose = finger_pose(finger, state, gripper);
    let angle = pose.angles[link];
    let dir = [angle.cos(), angle.sin()];
    let point = [
        pose.joints[link][0] + offset * dir[0],
        pose.joints[link][1] + offset * dir[1],
    ];
    let vels = &state.joint_velocities[finger * n..(finger + 1) * n];
    let velocity = pose.point_velocity(link, point, vels);
    (velocity, angle, pose.omegas[link])
}

/// Reads both IMUs across one integrator step (`state_prev` -> `state`).
pub fn imu_readout(
    state_prev: &GripperState,
    state: &GripperState,
    gripper: &GripperConfig,
    dt: f64,
    gravity: f64,
    shift: &DomainShift,
) -> Result<[ImuFrame; 2], SimError> {
    if dt <= 0.0 {
        return Err(SimError::Config(format!("imu readout needs dt > 0, got {dt}")));
    }
    let mut frames = [ImuFrame {
        accel: [0.0; 3],
        gyro: [0.0; 3],
    }; 2];
    for finger in 0..2 {
        let (v_prev, _, _) = mount_state(finger, state_prev, gripper);
        let (v_now, angle, omega) = mount_state(finger, state, gripper);
        let accel_world = [(v_now[0] - v_prev[0]) / dt, (v_now[1] - v_prev[1]) / dt];
        // Specific force: motion minus gravity (at rest the sensor reads +g up).
        let f = [accel_world[0], accel_world[1] + gravity];
        let (c, s) = (angle.cos(), angle.sin());
        frames[finger] = ImuFrame {
            accel: [
                f[0] * c + f[1] * s + shift.accel_bias[0],
                -f[0] * s + f[1] * c + shift.accel_bias[1],
                shift.accel_bias[2],
            ],
            gyro: [
                shift.gyro_bias[0],
                shift.gyro_bias[1],
                omega + shift.gyro_bias[2],
            ],
        };
    }
    Ok(frames)
}
