use crate::sim::{Episode, EPISODE_CHANNELS};

use super::DataError;

/// Per-channel first and second moments pooled over all episodes and time
/// steps, plus a fingerprint of the dataset the statistics came from (used
/// to prove that validation/test partitions were standardized with training
/// statistics only).
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelStats {
    pub mean: [f64; EPISODE_CHANNELS],
    pub std: [f64; EPISODE_CHANNELS],
    pub source_fingerprint: u64,
}

/// Floor for degenerate (constant) channels.
pub const STD_FLOOR: f64 = 1e-8;

/// Immutable collection of episodes. `stats` is present exactly when the
/// signals have been standardized, and records which dataset provided the
/// statistics.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Dataset {
    episodes: Vec<Episode>,
    stats: Option<ChannelStats>,
}

impl Dataset {
    pub fn new(episodes: Vec<Episode>) -> Dataset {
        Dataset {
            episodes,
            stats: None,
        }
    }

    pub fn episodes(&self) -> &[Episode] {
        &self.episodes
    }

    pub fn len(&self) -> usize {
        self.episodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.episodes.is_empty()
    }

    pub fn is_standardized(&self) -> bool {
        self.stats.is_some()
    }

    pub fn stats(&self) -> Option<&ChannelStats> {
        self.stats.as_ref()
    }

    /// New dataset holding the selected episodes (cloned), unstandardized
    /// flag preserved.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            episodes: indices.iter().map(|&i| self.episodes[i].clone()).collect(),
            stats: self.stats.clone(),
        }
    }

    /// Content hash covering labels, tags, seeds, and signal bits.
    pub fn content_fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut mix = |v: u64| {
            h ^= v;
            h = h.wrapping_mul(0x0000_0100_0000_01B3);
        };
        mix(self.episodes.len() as u64);
        for ep in &self.episodes {
            mix(ep.stiffness_label.to_bits());
            mix(ep.seed);
            mix(ep.shape.code() as u64);
            mix(ep.provenance.code() as u64);
            for v in ep.signal() {
                mix(v.to_bits());
            }
        }
        h
    }

    /// Per-channel mean and (population) standard deviation pooled over all
    /// episodes and time steps. Constant channels get the `STD_FLOOR`.
    pub fn compute_stats(&self) -> Result<ChannelStats, DataError> {
        if self.is_empty() {
            return Err(DataError::Config("cannot compute statistics of an empty dataset".into()));
        }
        let mut mean = [0.0; EPISODE_CHANNELS];
        let mut sq = [0.0; EPISODE_CHANNELS];
        let n = (self.episodes.len() * crate::sim::EPISODE_STEPS) as f64;
        for ep in &self.episodes {
            for row in ep.signal().chunks_exact(EPISODE_CHANNELS) {
                for (c, &v) in row.iter().enumerate() {
                    mean[c] += v;
                    sq[c] += v * v;
                }
            }
        }
        let mut std = [0.0; EPISODE_CHANNELS];
        for c in 0..EPISODE_CHANNELS {
            mean[c] /= n;
            let var = (sq[c] / n - mean[c] * mean[c]).max(0.0);
            std[c] = var.sqrt().max(STD_FLOOR);
        }
        Ok(ChannelStats {
            mean,
            std,
            source_fingerprint: self.content_fingerprint(),
        })
    }

    /// Returns a standardized copy: each channel mapped to
    /// `(x - mean) / std` with the given statistics. Labels and tags are
    /// untouched; the stats (and their provenance fingerprint) are recorded
    /// on the result.
    pub fn standardized(&self, stats: &ChannelStats) -> Result<Dataset, DataError> {
        if self.is_standardized() {
            return Err(DataError::State("dataset is already standardized".into()));
        }
        let episodes = self
            .episodes
            .iter()
            .map(|ep| {
                let signal = ep
                    .signal()
                    .chunks_exact(EPISODE_CHANNELS)
                    .flat_map(|row| {
                        row.iter()
                            .enumerate()
                            .map(|(c, &v)| (v - stats.mean[c]) / stats.std[c])
                    })
                    .collect();
                ep.with_signal(signal)
            })
            .collect();
        Ok(Dataset {
            episodes,
            stats: Some(stats.clone()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{Episode, Provenance, Shape, EPISODE_VALUES};

    pub(crate) fn synthetic_episode(seed: u64, label: f64) -> Episode {
        let mut signal = vec![0.0; EPISODE_VALUES];
        let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
        for v in signal.iter_mut() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            *v = (state >> 11) as f64 / (1u64 << 53) as f64 * 4.0 - 2.0;
        }
        Episode::from_parts(signal, label, Shape::Box, Provenance::Sim, seed).unwrap()
    }

    fn dataset(n: usize) -> Dataset {
        Dataset::new((0..n).map(|i| synthetic_episode(i as u64, 300.0 + i as f64)).collect())
    }

    #[test]
    fn constant_channel_gets_floored_std() {
        let signal = vec![3.5; EPISODE_VALUES];
        let ep = Episode::from_parts(signal, 500.0, Shape::Ball, Provenance::Sim, 0).unwrap();
        let ds = Dataset::new(vec![ep]);
        let stats = ds.compute_stats().unwrap();
        for c in 0..EPISODE_CHANNELS {
            assert_eq!(stats.mean[c], 3.5);
            assert_eq!(stats.std[c], STD_FLOOR);
        }
    }

    #[test]
    fn symmetric_pair_gives_mean_zero_std_one() {
        let mut signal = vec![0.0; EPISODE_VALUES];
        for (i, v) in signal.iter_mut().enumerate() {
            *v = if (i / EPISODE_CHANNELS) % 2 == 0 { 1.0 } else { -1.0 };
        }
        let ep = Episode::from_parts(signal, 500.0, Shape::Ball, Provenance::Sim, 0).unwrap();
        let ds = Dataset::new(vec![ep]);
        let stats = ds.compute_stats().unwrap();
        for c in 0..EPISODE_CHANNELS {
            assert_eq!(stats.mean[c], 0.0);
            assert_eq!(stats.std[c], 1.0);
        }
    }

    #[test]
    fn standardize_maps_mean_to_zero_and_mean_plus_std_to_one() {
        let ds = dataset(4);
        let stats = ds.compute_stats().unwrap();
        let z = ds.standardized(&stats).unwrap();
        // Recomputing stats on the standardized data: ~N(0, 1) per channel.
        let restat = z.compute_stats().unwrap();
        for c in 0..EPISODE_CHANNELS {
            assert!(restat.mean[c].abs() < 1e-9, "mean {}", restat.mean[c]);
            assert!((restat.std[c] - 1.0).abs() < 1e-9, "std {}", restat.std[c]);
        }
    }

    #[test]
    fn double_standardization_is_rejected() {
        let ds = dataset(2);
        let stats = ds.compute_stats().unwrap();
        let z = ds.standardized(&stats).unwrap();
        assert!(matches!(z.standardized(&stats), Err(DataError::State(_))));
    }

    #[test]
    fn stats_record_their_source_dataset() {
        let train = dataset(3);
        let test = Dataset::new(vec![synthetic_episode(99, 777.0)]);
        let stats = train.compute_stats().unwrap();
        let z = test.standardized(&stats).unwrap();
        assert_eq!(z.stats().unwrap().source_fingerprint, train.content_fingerprint());
        assert_ne!(z.stats().unwrap().source_fingerprint, test.content_fingerprint());
    }

    #[test]
    fn empty_dataset_stats_is_config_error() {
        let ds = Dataset::new(vec![]);
        assert!(matches!(ds.compute_stats(), Err(DataError::Config(_))));
    }

    #[test]
    fn fingerprint_sees_signal_bits() {
        let a = dataset(2);
        let mut eps = a.episodes().to_vec();
        let mut sig = eps[0].signal().to_vec();
        sig[0] += 1e-12;
        eps[0] = Episode::from_parts(
            sig,
            eps[0].stiffness_label,
            eps[0].shape,
            eps[0].provenance,
            eps[0].seed,
        )
        .unwrap();
        let b = Dataset::new(eps);
        assert_ne!(a.content_fingerprint(), b.content_fingerprint());
    }
}
