use rand_distr::{Distribution, Normal};

use crate::nn::init::{derive_seed, seeded_rng};
use crate::sim::{Episode, EPISODE_CHANNELS};

use super::{DataError, Dataset};

/// Default augmentation levels for the sim-only domain-gap point.
pub const NOISE_STD_ACCEL: f64 = 0.7;
pub const NOISE_STD_GYRO: f64 = 0.06;

fn is_accel_channel(c: usize) -> bool {
    c % 6 < 3
}

/// Adds zero-mean Gaussian noise: `std_accel` on channels 0-2 and 6-8,
/// `std_gyro` on channels 3-5 and 9-11. The label and tags are untouched and
/// the result is deterministic per seed.
pub fn add_gaussian_noise(
    episode: &Episode,
    std_accel: f64,
    std_gyro: f64,
    seed: u64,
) -> Result<Episode, DataError> {
    if std_accel < 0.0 || std_gyro < 0.0 {
        return Err(DataError::Config(format!(
            "noise standard deviations must be non-negative, got {std_accel} / {std_gyro}"
        )));
    }
    let accel = Normal::new(0.0, std_accel)
        .map_err(|e| DataError::Config(format!("bad accel noise: {e}")))?;
    let gyro = Normal::new(0.0, std_gyro)
        .map_err(|e| DataError::Config(format!("bad gyro noise: {e}")))?;
    let mut rng = seeded_rng(seed);
    let signal = episode
        .signal()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let c = i % EPISODE_CHANNELS;
            if is_accel_channel(c) {
                v + accel.sample(&mut rng)
            } else {
                v + gyro.sample(&mut rng)
            }
        })
        .collect();
    Ok(episode.with_signal(signal))
}

impl Dataset {
    /// Noise-augments every episode; per-episode seeds derive from
    /// `master_seed`.
    pub fn with_gaussian_noise(
        &self,
        std_accel: f64,
        std_gyro: f64,
        master_seed: u64,
    ) -> Result<Dataset, DataError> {
        if self.is_standardized() {
            return Err(DataError::State("noise augmentation applies to raw signals".into()));
        }
        let episodes = self
            .episodes()
            .iter()
            .enumerate()
            .map(|(i, ep)| add_gaussian_noise(ep, std_accel, std_gyro, derive_seed(master_seed, i as u64)))
            .collect::<Result<_, _>>()?;
        Ok(Dataset::new(episodes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{Provenance, Shape, EPISODE_VALUES};

    fn episode() -> Episode {
        let signal = (0..EPISODE_VALUES).map(|i| (i as f64 * 0.01).sin()).collect();
        Episode::from_parts(signal, 650.0, Shape::Cylinder, Provenance::Sim, 5).unwrap()
    }

    #[test]
    fn zero_noise_leaves_episode_unchanged() {
        let ep = episode();
        let noised = add_gaussian_noise(&ep, 0.0, 0.0, 3).unwrap();
        assert_eq!(noised, ep);
    }

    #[test]
    fn noise_is_deterministic_per_seed() {
        let ep = episode();
        let a = add_gaussian_noise(&ep, 0.7, 0.06, 11).unwrap();
        let b = add_gaussian_noise(&ep, 0.7, 0.06, 11).unwrap();
        assert_eq!(a, b);
        let c = add_gaussian_noise(&ep, 0.7, 0.06, 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn label_and_tags_survive() {
        let ep = episode();
        let noised = add_gaussian_noise(&ep, 0.7, 0.06, 11).unwrap();
        assert_eq!(noised.stiffness_label, ep.stiffness_label);
        assert_eq!(noised.shape, ep.shape);
        assert_eq!(noised.provenance, ep.provenance);
        assert_eq!(noised.seed, ep.seed);
    }

    #[test]
    fn sample_std_matches_targets_within_ten_percent() {
        // Pool the noise over a small dataset and check per-channel-group std.
        let ds = Dataset::new((0..20).map(|_| episode()).collect());
        let noised = ds.with_gaussian_noise(NOISE_STD_ACCEL, NOISE_STD_GYRO, 7).unwrap();
        let mut accel_sq = 0.0;
        let mut accel_n = 0.0;
        let mut gyro_sq = 0.0;
        let mut gyro_n = 0.0;
        for (clean, noisy) in ds.episodes().iter().zip(noised.episodes()) {
            for (i, (a, b)) in clean.signal().iter().zip(noisy.signal()).enumerate() {
                let d = b - a;
                if is_accel_channel(i % EPISODE_CHANNELS) {
                    accel_sq += d * d;
                    accel_n += 1.0;
                } else {
                    gyro_sq += d * d;
                    gyro_n += 1.0;
                }
            }
        }
        let accel_std = (accel_sq / accel_n).sqrt();
        let gyro_std = (gyro_sq / gyro_n).sqrt();
        assert!((accel_std - NOISE_STD_ACCEL).abs() < 0.1 * NOISE_STD_ACCEL, "{accel_std}");
        assert!((gyro_std - NOISE_STD_GYRO).abs() < 0.1 * NOISE_STD_GYRO, "{gyro_std}");
    }

    #[test]
    fn negative_std_is_config_error() {
        assert!(matches!(
            add_gaussian_noise(&episode(), -0.1, 0.06, 0),
            Err(DataError::Config(_))
        ));
    }
}
