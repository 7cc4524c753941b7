use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::data::{ChannelStats, Dataset};
use crate::models::{build, Model, ModelKind, ModelSpec};
use crate::nn::init::{derive_seed, seeded_rng};
use crate::nn::{load_checkpoint, mse_loss, save_checkpoint, AdamConfig, Tensor};
use crate::sim::EPISODE_CHANNELS;

use super::metrics::{assemble_batch, evaluate};
use super::{TrainConfig, TrainError};

/// Everything needed to reproduce inference later: the architecture, the
/// trained parameters, the training-partition standardization statistics,
/// and the target normalization.
#[derive(Clone)]
pub struct TrainedCheckpoint {
    pub kind: ModelKind,
    pub init_seed: u64,
    pub target_scale: f64,
    pub stats: ChannelStats,
    pub tensors: Vec<(String, Tensor)>,
}

#[derive(Serialize, Deserialize)]
struct CheckpointMeta {
    kind: ModelKind,
    init_seed: u64,
    target_scale: f64,
    stats_fingerprint: u64,
}

impl TrainedCheckpoint {
    pub fn save(&self, path: &Path) -> Result<(), TrainError> {
        let meta = serde_json::to_string(&CheckpointMeta {
            kind: self.kind,
            init_seed: self.init_seed,
            target_scale: self.target_scale,
            stats_fingerprint: self.stats.source_fingerprint,
        })?;
        let mean = Tensor::from_vec(&[EPISODE_CHANNELS], self.stats.mean.to_vec())?;
        let std = Tensor::from_vec(&[EPISODE_CHANNELS], self.stats.std.to_vec())?;
        let mut entries: Vec<(String, &Tensor)> = vec![
            ("__stats.mean".into(), &mean),
            ("__stats.std".into(), &std),
        ];
        for (name, tensor) in &self.tensors {
            entries.push((name.clone(), tensor));
        }
        save_checkpoint(path, &meta, &entries)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<TrainedCheckpoint, TrainError> {
        let (meta, entries) = load_checkpoint(path)?;
        let meta: CheckpointMeta = serde_json::from_str(&meta)?;
        let mut mean = None;
        let mut std = None;
        let mut tensors = Vec::new();
        for (name, tensor) in entries {
            match name.as_str() {
                "__stats.mean" => mean = Some(tensor),
                "__stats.std" => std = Some(tensor),
                _ => tensors.push((name, tensor)),
            }
        }
        let (mean, std) = match (mean, std) {
            (Some(m), Some(s)) if m.len() == EPISODE_CHANNELS && s.len() == EPISODE_CHANNELS => (m, s),
            _ => {
                return Err(TrainError::Config(
                    "checkpoint lacks channel statistics".into(),
                ))
            }
        };
        let mut stats = ChannelStats {
            mean: [0.0; EPISODE_CHANNELS],
            std: [1.0; EPISODE_CHANNELS],
            source_fingerprint: meta.stats_fingerprint,
        };
        stats.mean.copy_from_slice(mean.data());
        stats.std.copy_from_slice(std.data());
        Ok(TrainedCheckpoint {
            kind: meta.kind,
            init_seed: meta.init_seed,
            target_scale: meta.target_scale,
            stats,
            tensors,
        })
    }

    pub fn to_model(&self) -> Result<Model, TrainError> {
        let mut model = build(ModelSpec {
            kind: self.kind,
            seed: self.init_seed,
        });
        model.load_tensors(&self.tensors)?;
        Ok(model)
    }

    /// Standardizes a raw dataset with the stored statistics and evaluates.
    pub fn evaluate_on(&self, raw: &Dataset) -> Result<(f64, f64), TrainError> {
        let ds = raw.standardized(&self.stats)?;
        evaluate(&self.to_model()?, &ds, self.target_scale)
    }
}

/// Result of training one fold.
pub struct FoldOutcome {
    pub fold: usize,
    pub best_epoch: usize,
    /// Validation metrics at the best epoch.
    pub val_mae: f64,
    pub val_mape: f64,
    /// Per test-set metrics at the best epoch, in input order.
    pub test_metrics: Vec<(f64, f64)>,
    /// Mean training loss per epoch (normalized-target space).
    pub train_losses: Vec<f64>,
    pub checkpoint: TrainedCheckpoint,
}

/// Trains one fold: standardizes everything with training statistics, runs
/// seeded shuffled mini-batches with Adam, validates each epoch (plus any
/// test sets), and retains the checkpoint from the epoch with the lowest
/// validation MAPE. Deterministic for fixed inputs and seeds.
pub fn train_fold(
    train: &Dataset,
    val: &Dataset,
    tests: &[&Dataset],
    spec: ModelSpec,
    cfg: &TrainConfig,
    fold: usize,
) -> Result<FoldOutcome, TrainError> {
    if train.is_empty() || val.is_empty() {
        return Err(TrainError::Config("training and validation partitions must be non-empty".into()));
    }
    cfg.validate()?;

    let stats = train.compute_stats()?;
    let strain = train.standardized(&stats)?;
    let sval = val.standardized(&stats)?;
    let stests: Vec<Dataset> = tests
        .iter()
        .map(|t| t.standardized(&stats))
        .collect::<Result<_, _>>()?;

    let mut model = build(spec);
    let adam = AdamConfig {
        learning_rate: cfg.learning_rate,
        ..AdamConfig::default()
    };
    // Distinct shuffle stream per fold, derived from the run seed.
    let mut shuffle_rng = seeded_rng(derive_seed(cfg.seed, 0x0051_0000 + fold as u64));

    let mut best: Option<(usize, f64, f64, Vec<(f64, f64)>, Vec<(String, Tensor)>)> = None;
    let mut train_losses = Vec::with_capacity(cfg.epochs);
    let mut order: Vec<usize> = (0..strain.len()).collect();

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut shuffle_rng);
        let mut loss_sum = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            let (x, y) = assemble_batch(&strain, batch, cfg.target_scale);
            let (pred, caches) = model.forward_train(&x)?;
            let (loss, d_loss) = mse_loss(&pred, &y)?;
            if !loss.is_finite() {
                return Err(TrainError::Numeric(format!(
                    "training loss diverged at fold {fold}, epoch {epoch}"
                )));
            }
            model.backward(&caches, &d_loss)?;
            model.adam_step(&adam);
            loss_sum += loss * batch.len() as f64;
        }
        train_losses.push(loss_sum / strain.len() as f64);

        let (val_mae, val_mape) = evaluate(&model, &sval, cfg.target_scale)?;
        let is_better = best.as_ref().map_or(true, |(_, _, b, _, _)| val_mape < *b);
        if is_better {
            let test_metrics = stests
                .iter()
                .map(|t| evaluate(&model, t, cfg.target_scale))
                .collect::<Result<Vec<_>, _>>()?;
            best = Some((epoch, val_mae, val_mape, test_metrics, model.export_tensors()));
        }
    }

    let (best_epoch, val_mae, val_mape, test_metrics, tensors) =
        best.expect("at least one epoch ran");
    Ok(FoldOutcome {
        fold,
        best_epoch,
        val_mae,
        val_mape,
        test_metrics,
        train_losses,
        checkpoint: TrainedCheckpoint {
            kind: spec.kind,
            init_seed: spec.seed,
            target_scale: cfg.target_scale,
            stats,
            tensors,
        },
    })
}
