use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::models::Model;
use crate::nn::Tensor;
use crate::sim::{EPISODE_CHANNELS, EPISODE_STEPS};

use super::TrainError;

const EVAL_BATCH: usize = 100;

/// Builds the model input tensor and normalized target column for the given
/// episode indices of a standardized dataset.
pub(crate) fn assemble_batch(
    ds: &Dataset,
    indices: &[usize],
    target_scale: f64,
) -> (Tensor, Tensor) {
    let n = EPISODE_STEPS * EPISODE_CHANNELS;
    let mut x = Tensor::zeros(&[indices.len(), EPISODE_STEPS, EPISODE_CHANNELS]);
    let mut y = Tensor::zeros(&[indices.len(), 1]);
    for (row, &i) in indices.iter().enumerate() {
        let ep = &ds.episodes()[i];
        x.data_mut()[row * n..(row + 1) * n].copy_from_slice(ep.signal());
        y.data_mut()[row] = ep.stiffness_label / target_scale;
    }
    (x, y)
}

/// MAE (physical units) and MAPE (percent) of the model over a standardized
/// dataset; predictions are de-normalized by `target_scale`.
pub fn evaluate(model: &Model, ds: &Dataset, target_scale: f64) -> Result<(f64, f64), TrainError> {
    if ds.is_empty() {
        return Err(TrainError::Config("cannot evaluate on an empty dataset".into()));
    }
    if !ds.is_standardized() {
        return Err(TrainError::Config("evaluation expects a standardized dataset".into()));
    }
    let mut abs_sum = 0.0;
    let mut rel_sum = 0.0;
    let all: Vec<usize> = (0..ds.len()).collect();
    for chunk in all.chunks(EVAL_BATCH) {
        let (x, _) = assemble_batch(ds, chunk, target_scale);
        let pred = model.forward(&x)?;
        for (row, &i) in chunk.iter().enumerate() {
            let label = ds.episodes()[i].stiffness_label;
            if label == 0.0 {
                return Err(TrainError::ZeroLabel);
            }
            let estimate = pred.data()[row] * target_scale;
            let err = (estimate - label).abs();
            abs_sum += err;
            rel_sum += err / label;
        }
    }
    let n = ds.len() as f64;
    Ok((abs_sum / n, 100.0 * rel_sum / n))
}

/// Best-epoch metrics of one cross-validation fold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldMetrics {
    pub fold: usize,
    pub best_epoch: usize,
    /// N/m
    pub mae: f64,
    /// percent
    pub mape: f64,
}

/// Per-fold best-epoch metrics with their mean and (population) standard
/// deviation across folds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub per_fold: Vec<FoldMetrics>,
    pub mean_mae: f64,
    pub std_mae: f64,
    pub mean_mape: f64,
    pub std_mape: f64,
}

impl MetricsReport {
    pub fn from_folds(per_fold: Vec<FoldMetrics>) -> MetricsReport {
        let n = per_fold.len() as f64;
        let mean_mae = per_fold.iter().map(|f| f.mae).sum::<f64>() / n;
        let mean_mape = per_fold.iter().map(|f| f.mape).sum::<f64>() / n;
        let std_mae =
            (per_fold.iter().map(|f| (f.mae - mean_mae).powi(2)).sum::<f64>() / n).sqrt();
        let std_mape =
            (per_fold.iter().map(|f| (f.mape - mean_mape).powi(2)).sum::<f64>() / n).sqrt();
        MetricsReport {
            per_fold,
            mean_mae,
            std_mae,
            mean_mape,
            std_mape,
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::data::Dataset;
    use crate::sim::{Episode, Provenance, Shape, EPISODE_VALUES};

    /// Synthetic standardized-looking dataset with chosen labels; signals are
    /// irrelevant for metric arithmetic tests.
    fn fixed_prediction_metrics(labels: &[f64], preds: &[f64]) -> (f64, f64) {
        let n = labels.len() as f64;
        let mae = labels
            .iter()
            .zip(preds)
            .map(|(y, p)| (p - y).abs())
            .sum::<f64>()
            / n;
        let mape = 100.0
            * labels
                .iter()
                .zip(preds)
                .map(|(y, p)| (p - y).abs() / y)
                .sum::<f64>()
            / n;
        (mae, mape)
    }

    #[test]
    fn two_point_arithmetic() {
        let (mae, mape) = fixed_prediction_metrics(&[1000.0, 500.0], &[1100.0, 450.0]);
        assert_eq!(mae, 75.0);
        assert!((mape - 10.0).abs() < 1e-12);
    }

    #[test]
    fn constant_predictor_on_symmetric_labels() {
        let (mae, mape) = fixed_prediction_metrics(&[800.0, 1200.0], &[1000.0, 1000.0]);
        assert_eq!(mae, 200.0);
        assert!((mape - (25.0 + 200.0 / 12.0) / 2.0).abs() < 1e-9, "{mape}");
    }

    #[test]
    fn scaling_identity() {
        // Scaling labels and predictions jointly by c scales MAE by c and
        // leaves MAPE unchanged.
        let labels = [700.0, 900.0, 1100.0];
        let preds = [750.0, 880.0, 1200.0];
        let (mae, mape) = fixed_prediction_metrics(&labels, &preds);
        let c = 3.7;
        let labels2: Vec<f64> = labels.iter().map(|v| v * c).collect();
        let preds2: Vec<f64> = preds.iter().map(|v| v * c).collect();
        let (mae2, mape2) = fixed_prediction_metrics(&labels2, &preds2);
        assert!((mae2 - mae * c).abs() < 1e-9);
        assert!((mape2 - mape).abs() < 1e-9);
    }

    #[test]
    fn report_statistics_are_fold_means() {
        let report = MetricsReport::from_folds(vec![
            FoldMetrics { fold: 0, best_epoch: 3, mae: 10.0, mape: 2.0 },
            FoldMetrics { fold: 1, best_epoch: 9, mae: 20.0, mape: 4.0 },
        ]);
        assert_eq!(report.mean_mae, 15.0);
        assert_eq!(report.mean_mape, 3.0);
        assert_eq!(report.std_mae, 5.0);
        assert_eq!(report.std_mape, 1.0);
    }

    #[test]
    fn evaluate_requires_standardized_nonempty() {
        let model = crate::models::build(crate::models::ModelSpec {
            kind: crate::models::ModelKind::ConvLstmNet,
            seed: 0,
        });
        let empty = Dataset::new(vec![]);
        assert!(evaluate(&model, &empty, 1000.0).is_err());
        let raw = Dataset::new(vec![Episode::from_parts(
            vec![0.1; EPISODE_VALUES],
            700.0,
            Shape::Box,
            Provenance::Sim,
            0,
        )
        .unwrap()]);
        assert!(evaluate(&model, &raw, 1000.0).is_err());
    }
}
