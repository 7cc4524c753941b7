use rand::seq::SliceRandom;

use crate::nn::init::seeded_rng;

use super::{DataError, Dataset};

/// Eq. `k = |F1 - F2| / |d1 - d2|`: stiffness from two force/displacement
/// probe readings.
pub fn stiffness_from_force_displacement(
    f1: f64,
    f2: f64,
    d1: f64,
    d2: f64,
) -> Result<f64, DataError> {
    if d1 == d2 {
        return Err(DataError::DegenerateDisplacement);
    }
    Ok((f1 - f2).abs() / (d1 - d2).abs())
}

/// Returns the sim episodes plus `n_real` episodes sampled (without
/// replacement, deterministically by seed) from `real`, provenance
/// preserved.
pub fn mix_datasets(
    sim: &Dataset,
    real: &Dataset,
    n_real: usize,
    seed: u64,
) -> Result<Dataset, DataError> {
    if sim.is_standardized() || real.is_standardized() {
        return Err(DataError::State("mixing applies to raw datasets".into()));
    }
    if n_real > real.len() {
        return Err(DataError::Config(format!(
            "requested {n_real} real episodes but only {} are available",
            real.len()
        )));
    }
    let mut indices: Vec<usize> = (0..real.len()).collect();
    indices.shuffle(&mut seeded_rng(seed));
    indices.truncate(n_real);
    indices.sort_unstable();
    let mut episodes = sim.episodes().to_vec();
    episodes.extend(indices.into_iter().map(|i| real.episodes()[i].clone()));
    Ok(Dataset::new(episodes))
}
