//! The three experiment protocols: architecture comparison, shape
//! generalization, and domain-gap mixing.

use std::collections::HashSet;

use crate::data::{mix_datasets, Dataset, NOISE_STD_ACCEL, NOISE_STD_GYRO};
use crate::models::{ModelKind, ModelSpec};
use crate::nn::init::derive_seed;
use crate::sim::Shape;

use super::cv::{cross_validate, CvOutcome};
use super::metrics::MetricsReport;
use super::{TrainConfig, TrainError};

/// Cross-validates every architecture on identical folds (the fold plan
/// depends only on the dataset size and `cfg.seed`).
pub fn experiment_arch_compare(
    sim: &Dataset,
    cfg: &TrainConfig,
) -> Result<Vec<(ModelKind, CvOutcome)>, TrainError> {
    ModelKind::ALL
        .iter()
        .map(|&kind| {
            let outcome = cross_validate(sim, &[], ModelSpec { kind, seed: cfg.seed }, cfg)?;
            Ok((kind, outcome))
        })
        .collect()
}

pub struct ShapeGenOutcome {
    pub per_shape: Vec<(Shape, MetricsReport)>,
    /// Metrics over the union of all shape test sets.
    pub pooled: MetricsReport,
    pub cv: CvOutcome,
}

/// Trains the bidirectional model on the mixed-shape dataset and reports
/// best-epoch test metrics separately per shape, plus pooled.
pub fn experiment_shape_generalization(
    mixed: &Dataset,
    shape_tests: &[(Shape, Dataset)],
    cfg: &TrainConfig,
) -> Result<ShapeGenOutcome, TrainError> {
    if shape_tests.is_empty() {
        return Err(TrainError::Config("at least one shape test set is required".into()));
    }
    let pooled_ds = Dataset::new(
        shape_tests
            .iter()
            .flat_map(|(_, ds)| ds.episodes().iter().cloned())
            .collect(),
    );
    let mut tests: Vec<&Dataset> = shape_tests.iter().map(|(_, ds)| ds).collect();
    tests.push(&pooled_ds);

    let cv = cross_validate(
        mixed,
        &tests,
        ModelSpec {
            kind: ModelKind::ConvBiLstmNet,
            seed: cfg.seed,
        },
        cfg,
    )?;
    let mut reports = cv.test_reports.clone();
    let pooled = reports.pop().expect("pooled report present");
    let per_shape = shape_tests
        .iter()
        .map(|(s, _)| *s)
        .zip(reports)
        .collect();
    Ok(ShapeGenOutcome {
        per_shape,
        pooled,
        cv,
    })
}

pub struct DomainGapPoint {
    pub n_real: usize,
    pub report: MetricsReport,
    pub cv: CvOutcome,
}

/// Domain-gap mixing sweep. Point 0 trains on noise-augmented sim data; each
/// point `n > 0` trains on sim data plus `n` shifted episodes. Every point
/// is cross-validated and tested against the same fixed shifted test set.
pub fn experiment_domain_gap(
    sim: &Dataset,
    shifted: &Dataset,
    test_shifted: &Dataset,
    schedule: &[usize],
    cfg: &TrainConfig,
) -> Result<Vec<DomainGapPoint>, TrainError> {
    if schedule.is_empty() {
        return Err(TrainError::Config("schedule must be non-empty".into()));
    }
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(TrainError::Config("schedule must be strictly ascending".into()));
    }
    // The test set must not leak into the mixing pool.
    let pool: HashSet<(u64, u64, u8)> = shifted
        .episodes()
        .iter()
        .map(|e| (e.seed, e.stiffness_label.to_bits(), e.provenance.code()))
        .collect();
    if test_shifted
        .episodes()
        .iter()
        .any(|e| pool.contains(&(e.seed, e.stiffness_label.to_bits(), e.provenance.code())))
    {
        return Err(TrainError::Config(
            "shifted test set overlaps the shifted training pool".into(),
        ));
    }

    schedule
        .iter()
        .map(|&n| {
            let train_ds = if n == 0 {
                sim.with_gaussian_noise(NOISE_STD_ACCEL, NOISE_STD_GYRO, derive_seed(cfg.seed, 0xA0))?
            } else {
                mix_datasets(sim, shifted, n, derive_seed(cfg.seed, n as u64))?
            };
            let cv = cross_validate(
                &train_ds,
                &[test_shifted],
                ModelSpec {
                    kind: ModelKind::ConvBiLstmNet,
                    seed: cfg.seed,
                },
                cfg,
            )?;
            Ok(DomainGapPoint {
                n_real: n,
                report: cv.test_reports[0].clone(),
                cv,
            })
        })
        .collect()
}
