use super::GripperConfig;

/// Generalized coordinates of both finger chains. Angles are hinge
/// deflections from the rest pose (fingers hanging straight down); finger 0
/// occupies indices `[0, n)`, finger 1 `[n, 2n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GripperState {
    pub joint_angles: Vec<f64>,
    pub joint_velocities: Vec<f64>,
    pub joint_accelerations: Vec<f64>,
    pub time: f64,
}

impl GripperState {
    pub fn rest(gripper: &GripperConfig) -> Self {
        let n = 2 * gripper.links_per_finger;
        GripperState {
            joint_angles: vec![0.0; n],
            joint_velocities: vec![0.0; n],
            joint_accelerations: vec![0.0; n],
            time: 0.0,
        }
    }

    pub fn dof(&self) -> usize {
        self.joint_angles.len()
    }

    pub fn is_finite(&self) -> bool {
        self.joint_angles.iter().all(|v| v.is_finite())
            && self.joint_velocities.iter().all(|v| v.is_finite())
            && self.joint_accelerations.iter().all(|v| v.is_finite())
            && self.time.is_finite()
    }
}
