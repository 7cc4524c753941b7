use super::{NnError, Tensor};

/// Mean squared error over the batch: returns the scalar loss and the
/// gradient w.r.t. the predictions, `2 (pred - target) / batch_elements`.
pub fn mse_loss(pred: &Tensor, target: &Tensor) -> Result<(f64, Tensor), NnError> {
    if pred.shape() != target.shape() {
        return Err(NnError::Shape(format!(
            "mse_loss shapes differ: {:?} vs {:?}",
            pred.shape(),
            target.shape()
        )));
    }
    let n = pred.len();
    if n == 0 {
        return Err(NnError::Shape("mse_loss on empty tensors".into()));
    }
    let inv = 1.0 / n as f64;
    let mut grad = Tensor::zeros(pred.shape());
    let mut loss = 0.0;
    for ((g, p), t) in grad.data_mut().iter_mut().zip(pred.data()).zip(target.data()) {
        let diff = p - t;
        loss += diff * diff;
        *g = 2.0 * diff * inv;
    }
    Ok((loss * inv, grad))
}
