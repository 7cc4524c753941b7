use serde::{Deserialize, Serialize};

use super::SimError;

/// Object geometry variants. The shape decides the contact model: radial
/// single-point for `Ball`, face normals with multi-point link contact for
/// `Box`, and a wider radial patch for `Cylinder`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Ball,
    Box,
    Cylinder,
}

impl Shape {
    pub const ALL: [Shape; 3] = [Shape::Ball, Shape::Box, Shape::Cylinder];

    pub fn code(self) -> u8 {
        match self {
            Shape::Ball => 0,
            Shape::Box => 1,
            Shape::Cylinder => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Shape> {
        match code {
            0 => Some(Shape::Ball),
            1 => Some(Shape::Box),
            2 => Some(Shape::Cylinder),
            _ => None,
        }
    }
}

impl std::str::FromStr for Shape {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "ball" => Ok(Shape::Ball),
            "box" => Ok(Shape::Box),
            "cylinder" => Ok(Shape::Cylinder),
            other => Err(format!("unknown shape '{other}' (ball|box|cylinder)")),
        }
    }
}

impl std::fmt::Display for Shape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Shape::Ball => write!(f, "ball"),
            Shape::Box => write!(f, "box"),
            Shape::Cylinder => write!(f, "cylinder"),
        }
    }
}

/// Two-finger planar gripper: each finger is a chain of hinged links hanging
/// from its base, with a linear torsion spring and damper at every hinge.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct GripperConfig {
    pub links_per_finger: usize,
    /// meters
    pub link_length: f64,
    /// kilograms
    pub link_mass: f64,
    /// N*m/rad per hinge
    pub joint_stiffness: f64,
    /// N*m*s/rad per hinge
    pub joint_damping: f64,
    /// N*m
    pub actuation_torque_max: f64,
    /// meters between the two finger bases
    pub finger_base_separation: f64,
    /// fraction of the finger length where the IMU sits, in (0, 1]
    pub imu_mount_fraction: f64,
}

impl Default for GripperConfig {
    fn default() -> Self {
        // Reference constants; calibrated so penalty contact at stiffness
        // 1400 N/m stays stable at dt = 1e-3 and peak penetration decreases
        // monotonically with stiffness.
        GripperConfig {
            links_per_finger: 8,
            link_length: 0.03,
            link_mass: 0.05,
            joint_stiffness: 2.0,
            joint_damping: 0.015,
            actuation_torque_max: 0.2,
            finger_base_separation: 0.16,
            imu_mount_fraction: 0.75,
        }
    }
}

impl GripperConfig {
    pub fn finger_length(&self) -> f64 {
        self.links_per_finger as f64 * self.link_length
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.links_per_finger < 2 {
            return Err(SimError::Config(format!(
                "links_per_finger must be >= 2, got {}",
                self.links_per_finger
            )));
        }
        for (name, v) in [
            ("link_length", self.link_length),
            ("link_mass", self.link_mass),
            ("joint_stiffness", self.joint_stiffness),
            ("joint_damping", self.joint_damping),
            ("actuation_torque_max", self.actuation_torque_max),
            ("finger_base_separation", self.finger_base_separation),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(SimError::Config(format!("{name} must be strictly positive, got {v}")));
            }
        }
        if !(self.imu_mount_fraction > 0.0 && self.imu_mount_fraction <= 1.0) {
            return Err(SimError::Config(format!(
                "imu_mount_fraction must lie in (0, 1], got {}",
                self.imu_mount_fraction
            )));
        }
        Ok(())
    }
}

/// Squeezed object: a fixed deformable obstacle with penalty-spring skin.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub shape: Shape,
    /// N/m
    pub stiffness: f64,
    /// N*s/m
    pub contact_damping: f64,
    /// characteristic half-extent, meters
    pub size: f64,
    /// meters
    pub center: [f64; 2],
}

impl ObjectSpec {
    /// Reference object for the default gripper: centered between the
    /// fingers with its widest section at fingertip depth, so the tips press
    /// it as they curl in. The cylinder is slightly larger on top of its
    /// wider contact patch, keeping the three squeeze signatures distinct.
    pub fn reference(shape: Shape, stiffness: f64) -> ObjectSpec {
        ObjectSpec {
            shape,
            stiffness,
            contact_damping: 0.8,
            size: if shape == Shape::Cylinder { 0.055 } else { 0.05 },
            center: [0.0, -0.24],
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.stiffness > 0.0) || !self.stiffness.is_finite() {
            return Err(SimError::Config(format!(
                "object stiffness must be strictly positive, got {}",
                self.stiffness
            )));
        }
        if !(self.size > 0.0) || !self.size.is_finite() {
            return Err(SimError::Config(format!("object size must be strictly positive, got {}", self.size)));
        }
        if !(self.contact_damping > 0.0) || !self.contact_damping.is_finite() {
            return Err(SimError::Config(format!(
                "contact_damping must be strictly positive, got {}",
                self.contact_damping
            )));
        }
        if !self.center.iter().all(|c| c.is_finite()) {
            return Err(SimError::Config("object center must be finite".into()));
        }
        Ok(())
    }
}

/// Multiplicative dynamics perturbations and additive sensor biases that
/// stand in for unmodeled real-world discrepancy. The identity shift leaves
/// episodes bit-identical to the unshifted path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DomainShift {
    pub joint_damping_scale: f64,
    pub contact_damping_scale: f64,
    /// m/s^2, added to both IMUs
    pub accel_bias: [f64; 3],
    /// rad/s, added to both IMUs
    pub gyro_bias: [f64; 3],
    /// dimensionless; per-episode multiplicative torque perturbation drawn
    /// uniformly from [1 - j, 1 + j]
    pub torque_profile_jitter: f64,
}

impl Default for DomainShift {
    fn default() -> Self {
        DomainShift {
            joint_damping_scale: 1.0,
            contact_damping_scale: 1.0,
            accel_bias: [0.0; 3],
            gyro_bias: [0.0; 3],
            torque_profile_jitter: 0.0,
        }
    }
}

impl DomainShift {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn is_identity(&self) -> bool {
        self.joint_damping_scale == 1.0
            && self.contact_damping_scale == 1.0
            && self.accel_bias == [0.0; 3]
            && self.gyro_bias == [0.0; 3]
            && self.torque_profile_jitter == 0.0
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.joint_damping_scale > 0.0) || !(self.contact_damping_scale > 0.0) {
            return Err(SimError::Config("domain shift scales must be strictly positive".into()));
        }
        if self.torque_profile_jitter < 0.0 {
            return Err(SimError::Config("torque_profile_jitter must be non-negative".into()));
        }
        let finite = self.accel_bias.iter().chain(&self.gyro_bias).all(|v| v.is_finite())
            && self.joint_damping_scale.is_finite()
            && self.contact_damping_scale.is_finite()
            && self.torque_profile_jitter.is_finite();
        if !finite {
            return Err(SimError::Config("domain shift values must be finite".into()));
        }
        Ok(())
    }
}

/// One squeeze-and-release recording setup.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct EpisodeConfig {
    /// seconds
    pub duration: f64,
    /// seconds
    pub integration_dt: f64,
    /// fixed output length
    pub sample_count: usize,
    /// m/s^2, acting along -y in the squeeze plane
    pub gravity: f64,
    pub seed: u64,
    pub domain_shift: Option<DomainShift>,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        EpisodeConfig {
            duration: 2.0,
            integration_dt: 1e-3,
            sample_count: super::episode::EPISODE_STEPS,
            gravity: 9.81,
            seed: 0,
            domain_shift: None,
        }
    }
}

impl EpisodeConfig {
    /// Integrator steps between consecutive output samples.
    pub fn oversample(&self) -> usize {
        let total = (self.duration / self.integration_dt).round() as usize;
        total / self.sample_count
    }

    pub fn total_steps(&self) -> usize {
        (self.duration / self.integration_dt).round() as usize
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.sample_count != super::episode::EPISODE_STEPS {
            return Err(SimError::Config(format!(
                "sample_count is fixed at {}, got {}",
                super::episode::EPISODE_STEPS,
                self.sample_count
            )));
        }
        if !(self.duration > 0.0) || !(self.integration_dt > 0.0) {
            return Err(SimError::Config("duration and integration_dt must be positive".into()));
        }
        if !(self.gravity >= 0.0) || !self.gravity.is_finite() {
            return Err(SimError::Config(format!("gravity must be non-negative, got {}", self.gravity)));
        }
        let steps = self.duration / self.integration_dt;
        let rounded = steps.round();
        if (steps - rounded).abs() > 1e-9 * rounded.max(1.0) {
            return Err(SimError::Config(format!(
                "duration {} is not an integer number of dt {} steps",
                self.duration, self.integration_dt
            )));
        }
        let total = rounded as usize;
        if total == 0 || total % self.sample_count != 0 {
            return Err(SimError::Config(format!(
                "total steps {} must be a positive multiple of sample_count {}",
                total, self.sample_count
            )));
        }
        if let Some(shift) = &self.domain_shift {
            shift.validate()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        GripperConfig::default().validate().unwrap();
        ObjectSpec::reference(Shape::Ball, 700.0).validate().unwrap();
        EpisodeConfig::default().validate().unwrap();
        DomainShift::identity().validate().unwrap();
    }

    #[test]
    fn bad_configs_are_rejected() {
        let mut g = GripperConfig::default();
        g.links_per_finger = 1;
        assert!(g.validate().is_err());
        let mut g = GripperConfig::default();
        g.link_mass = 0.0;
        assert!(g.validate().is_err());
        let mut g = GripperConfig::default();
        g.imu_mount_fraction = 1.2;
        assert!(g.validate().is_err());

        let mut o = ObjectSpec::reference(Shape::Box, 500.0);
        o.stiffness = -1.0;
        assert!(o.validate().is_err());

        let mut e = EpisodeConfig::default();
        e.integration_dt = 3e-4; // not an integer multiple of the sample grid
        assert!(e.validate().is_err());

        let mut s = DomainShift::identity();
        s.joint_damping_scale = 0.0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn identity_shift_detection() {
        assert!(DomainShift::identity().is_identity());
        let mut s = DomainShift::identity();
        s.gyro_bias[2] = 0.1;
        assert!(!s.is_identity());
    }

    #[test]
    fn oversample_for_defaults_is_ten() {
        let cfg = EpisodeConfig::default();
        assert_eq!(cfg.total_steps(), 2000);
        assert_eq!(cfg.oversample(), 10);
    }
}
