use crate::data::{kfold_split, Dataset};
use crate::models::ModelSpec;
use crate::nn::init::derive_seed;

use super::fold::{train_fold, FoldOutcome};
use super::metrics::{FoldMetrics, MetricsReport};
use super::{TrainConfig, TrainError};

/// Outcome of a k-fold run: the validation report, one report per provided
/// test set (metrics taken at each fold's best-validation epoch), and the
/// raw fold outcomes (checkpoints included).
pub struct CvOutcome {
    pub validation_report: MetricsReport,
    pub test_reports: Vec<MetricsReport>,
    pub folds: Vec<FoldOutcome>,
}

/// K-fold cross-validation: a fresh, per-fold-seeded model is trained on
/// k-1 folds and validated on the held-out fold; optional test sets are
/// scored each epoch and reported at the best-validation epoch.
pub fn cross_validate(
    ds: &Dataset,
    tests: &[&Dataset],
    spec: ModelSpec,
    cfg: &TrainConfig,
) -> Result<CvOutcome, TrainError> {
    if ds.is_standardized() {
        return Err(TrainError::Config(
            "cross-validation expects a raw dataset; standardization happens per fold".into(),
        ));
    }
    let plan = kfold_split(ds.len(), cfg.k_folds, cfg.seed)?;
    let mut folds = Vec::with_capacity(cfg.k_folds);
    for fold in 0..cfg.k_folds {
        let train = ds.subset(&plan.training_indices(fold));
        let val = ds.subset(&plan.validation_indices(fold));
        let fold_spec = ModelSpec {
            kind: spec.kind,
            seed: derive_seed(spec.seed, 100 + fold as u64),
        };
        folds.push(train_fold(&train, &val, tests, fold_spec, cfg, fold)?);
    }

    let validation_report = MetricsReport::from_folds(
        folds
            .iter()
            .map(|f| FoldMetrics {
                fold: f.fold,
                best_epoch: f.best_epoch,
                mae: f.val_mae,
                mape: f.val_mape,
            })
            .collect(),
    );
    let test_reports = (0..tests.len())
        .map(|t| {
            MetricsReport::from_folds(
                folds
                    .iter()
                    .map(|f| FoldMetrics {
                        fold: f.fold,
                        best_epoch: f.best_epoch,
                        mae: f.test_metrics[t].0,
                        mape: f.test_metrics[t].1,
                    })
                    .collect(),
            )
        })
        .collect();
    Ok(CvOutcome {
        validation_report,
        test_reports,
        folds,
    })
}
