//! Seeded weight initialization.
//!
//! ChaCha8 keeps draws identical across platforms and rand releases with the
//! same major version.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Tensor;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform in [-limit, limit).
fn uniform_tensor(shape: &[usize], limit: f64, rng: &mut ChaCha8Rng) -> Tensor {
    let mut t = Tensor::zeros(shape);
    for v in t.data_mut() {
        *v = limit * (2.0 * rng.random::<f64>() - 1.0);
    }
    t
}

/// He-style fan-in scaled uniform, for ReLU conv/dense weights.
pub fn he_uniform(shape: &[usize], fan_in: usize, rng: &mut ChaCha8Rng) -> Tensor {
    let limit = (6.0 / fan_in as f64).sqrt();
    uniform_tensor(shape, limit, rng)
}

/// Glorot-style uniform, for LSTM weight matrices.
pub fn glorot_uniform(
    shape: &[usize],
    fan_in: usize,
    fan_out: usize,
    rng: &mut ChaCha8Rng,
) -> Tensor {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    uniform_tensor(shape, limit, rng)
}

/// Deterministically derive a sub-seed from a master seed and an index.
/// SplitMix64 finalizer; stable across platforms.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
