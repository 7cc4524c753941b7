//! Planar chain dynamics stepped with semi-implicit Euler.
//!
//! Per hinge: `alpha = tau_total / I_eff`, `v += alpha*dt`, `theta += v*dt`,
//! where `I_eff` is the inertia of the hinge's distal sub-chain treated as a
//! rigid body about that hinge at the current pose. Torque sources are the
//! actuation profile, the hinge spring/damper, in-plane gravity, and penalty
//! contact.

use super::contact::{closest_point_t, contact_force, contact_samples, penetration_depth};
use super::{GripperConfig, GripperState, ObjectSpec, SimError};

/// Fingers hang from their bases along -y at rest.
pub(crate) const BASE_ANGLE: f64 = -std::f64::consts::FRAC_PI_2;

/// Sign applied to the actuation torque so that positive profile values close
/// the gripper (finger 0 on the left curls toward +x, finger 1 mirrors).
pub(crate) fn closing_sign(finger: usize) -> f64 {
    if finger == 0 {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn finger_base(finger: usize, gripper: &GripperConfig) -> [f64; 2] {
    let half = 0.5 * gripper.finger_base_separation;
    if finger == 0 {
        [-half, 0.0]
    } else {
        [half, 0.0]
    }
}

/// Pose of one finger chain: hinge positions, link end points, centers of
/// mass, absolute link angles, and absolute angular velocities.
pub(crate) struct FingerPose {
    pub joints: Vec<[f64; 2]>,
    pub ends: Vec<[f64; 2]>,
    pub coms: Vec<[f64; 2]>,
    pub angles: Vec<f64>,
    pub omegas: Vec<f64>,
}

impl FingerPose {
    pub fn tip(&self) -> [f64; 2] {
        *self.ends.last().expect("finger has at least one link")
    }

    /// Velocity of a world-space point rigidly attached to link `link`.
    pub fn point_velocity(&self, link: usize, point: [f64; 2], velocities: &[f64]) -> [f64; 2] {
        let mut v = [0.0, 0.0];
        for j in 0..=link {
            let r = [point[0] - self.joints[j][0], point[1] - self.joints[j][1]];
            v[0] += velocities[j] * -r[1];
            v[1] += velocities[j] * r[0];
        }
        v
    }
}

/// Forward kinematics for finger `finger` (0 or 1).
pub(crate) fn finger_pose(
    finger: usize,
    state: &GripperState,
    gripper: &GripperConfig,
) -> FingerPose {
    let n = gripper.links_per_finger;
    let offset = finger * n;
    let angles_rel = &state.joint_angles[offset..offset + n];
    let vels = &state.joint_velocities[offset..offset + n];

    let mut joints = Vec::with_capacity(n);
    let mut ends = Vec::with_capacity(n);
    let mut coms = Vec::with_capacity(n);
    let mut angles = Vec::with_capacity(n);
    let mut omegas = Vec::with_capacity(n);

    let mut pos = finger_base(finger, gripper);
    let mut angle = BASE_ANGLE;
    let mut omega = 0.0;
    for i in 0..n {
        angle += angles_rel[i];
        omega += vels[i];
        let dir = [angle.cos(), angle.sin()];
        joints.push(pos);
        coms.push([
            pos[0] + 0.5 * gripper.link_length * dir[0],
            pos[1] + 0.5 * gripper.link_length * dir[1],
        ]);
        let end = [
            pos[0] + gripper.link_length * dir[0],
            pos[1] + gripper.link_length * dir[1],
        ];
        ends.push(end);
        angles.push(angle);
        omegas.push(omega);
        pos = end;
    }
    FingerPose {
        joints,
        ends,
        coms,
        angles,
        omegas,
    }
}

/// Per-finger velocity slice.
fn finger_velocities<'a>(finger: usize, state: &'a GripperState, n: usize) -> &'a [f64] {
    &state.joint_velocities[finger * n..(finger + 1) * n]
}

fn cross(r: [f64; 2], f: [f64; 2]) -> f64 {
    r[0] * f[1] - r[1] * f[0]
}

/// One semi-implicit Euler step under the given per-hinge actuation torque.
pub fn step_dynamics(
    state: &GripperState,
    gripper: &GripperConfig,
    object: &ObjectSpec,
    torque: f64,
    gravity: f64,
    dt: f64,
) -> Result<GripperState, SimError> {
    let n = gripper.links_per_finger;
    debug_assert_eq!(state.dof(), 2 * n);
    let mass = gripper.link_mass;
    let length = gripper.link_length;
    let rod_inertia = mass * length * length / 12.0;

    let mut next = state.clone();
    next.time = state.time + dt;

    for finger in 0..2 {
        let pose = finger_pose(finger, state, gripper);
        let vels = finger_velocities(finger, state, n);
        let sign = closing_sign(finger);

        // Contact forces per link, evaluated at the shape's sample patch.
        let mut forces_by_link: Vec<Vec<([f64; 2], [f64; 2])>> = vec![Vec::new(); n];
        for i in 0..n {
            let (a, b) = (pose.joints[i], pose.ends[i]);
            let t_closest = closest_point_t(a, b, object.center);
            let (samples, count) = contact_samples(object.shape, t_closest);
            for &(t, w) in samples.iter().take(count) {
                let point = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
                let v = pose.point_velocity(i, point, vels);
                let f = contact_force(object, point, v);
                if f != [0.0, 0.0] {
                    forces_by_link[i].push((point, [w * f[0], w * f[1]]));
                }
            }
        }

        for j in 0..n {
            let idx = finger * n + j;
            let pj = pose.joints[j];

            let mut tau = sign * torque;
            tau -= gripper.joint_stiffness * state.joint_angles[idx];
            tau -= gripper.joint_damping * state.joint_velocities[idx];

            let mut inertia = 0.0;
            for i in j..n {
                let r_com = [pose.coms[i][0] - pj[0], pose.coms[i][1] - pj[1]];
                inertia += rod_inertia + mass * (r_com[0] * r_com[0] + r_com[1] * r_com[1]);
                // In-plane gravity along -y.
                tau += cross(r_com, [0.0, -mass * gravity]);
                for (point, force) in &forces_by_link[i] {
                    let r = [point[0] - pj[0], point[1] - pj[1]];
                    tau += cross(r, *force);
                }
            }

            let alpha = tau / inertia;
            let v = state.joint_velocities[idx] + alpha * dt;
            next.joint_accelerations[idx] = alpha;
            next.joint_velocities[idx] = v;
            next.joint_angles[idx] = state.joint_angles[idx] + v * dt;
        }
    }

    if !next.is_finite() {
        return Err(SimError::IntegratorBlowup {
            step: (next.time / dt).round() as usize,
        });
    }
    Ok(next)
}

/// Deepest current penetration of either fingertip into the object.
pub fn tip_penetration(state: &GripperState, gripper: &GripperConfig, object: &ObjectSpec) -> f64 {
    let mut depth: f64 = 0.0;
    for finger in 0..2 {
        let pose = finger_pose(finger, state, gripper);
        depth = depth.max(penetration_depth(object, pose.tip()));
    }
    depth
}
