use super::{EpisodeConfig, GripperConfig, SimError};

fn smoothstep(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * (3.0 - 2.0 * u)
}

/// Per-hinge actuation torque magnitude over the episode: ramps up from zero,
/// holds the closing plateau, flips sign around mid-episode to open, and
/// holds the opening plateau. Ramps are smoothstep over 5% of the duration.
///
/// Positive values close the gripper; the per-finger sign convention lives in
/// the dynamics.
pub fn actuation_profile(
    t: f64,
    cfg: &EpisodeConfig,
    gripper: &GripperConfig,
) -> Result<f64, SimError> {
    let duration = cfg.duration;
    if !(0.0..=duration).contains(&t) {
        return Err(SimError::ActuationDomain { t, duration });
    }
    let max = gripper.actuation_torque_max;
    let ramp = 0.05 * duration;
    let half = 0.5 * duration;
    let flip_start = half - 0.5 * ramp;

    let torque = if t < ramp {
        max * smoothstep(t / ramp)
    } else if t < flip_start {
        max
    } else if t < flip_start + ramp {
        max * (1.0 - 2.0 * smoothstep((t - flip_start) / ramp))
    } else {
        -max
    };
    Ok(torque)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (EpisodeConfig, GripperConfig) {
        (EpisodeConfig::default(), GripperConfig::default())
    }

    #[test]
    fn ramp_starts_at_zero() {
        let (cfg, g) = setup();
        assert_eq!(actuation_profile(0.0, &cfg, &g).unwrap(), 0.0);
    }

    #[test]
    fn plateaus_hit_plus_minus_max() {
        let (cfg, g) = setup();
        let t1 = cfg.duration / 4.0;
        assert_eq!(actuation_profile(t1, &cfg, &g).unwrap(), g.actuation_torque_max);
        let t2 = 3.0 * cfg.duration / 4.0;
        assert_eq!(actuation_profile(t2, &cfg, &g).unwrap(), -g.actuation_torque_max);
    }

    #[test]
    fn magnitude_never_exceeds_max_and_is_continuous() {
        let (cfg, g) = setup();
        let mut prev = actuation_profile(0.0, &cfg, &g).unwrap();
        let dt = cfg.duration / 4000.0;
        for i in 1..=4000 {
            let t = i as f64 * dt;
            let tau = actuation_profile(t, &cfg, &g).unwrap();
            assert!(tau.abs() <= g.actuation_torque_max + 1e-12);
            // Steepest segment is the sign flip: slope 3 * max / ramp.
            let max_step = 3.1 * g.actuation_torque_max / (0.05 * cfg.duration) * dt;
            assert!((tau - prev).abs() <= max_step, "jump at t={t}");
            prev = tau;
        }
    }

    #[test]
    fn out_of_domain_time_is_error() {
        let (cfg, g) = setup();
        assert!(actuation_profile(-0.1, &cfg, &g).is_err());
        assert!(actuation_profile(cfg.duration + 0.1, &cfg, &g).is_err());
    }
}
