use super::Tensor;

/// Trainable tensor with its gradient and Adam moment buffers.
///
/// All four tensors share one shape; moments start at zero and
/// `step_count` advances by exactly one per optimizer step.
#[derive(Clone, Debug)]
pub struct Parameter {
    pub value: Tensor,
    pub grad: Tensor,
    pub m: Tensor,
    pub v: Tensor,
    pub step_count: u64,
}

impl Parameter {
    pub fn new(value: Tensor) -> Self {
        let shape = value.shape().to_vec();
        Parameter {
            value,
            grad: Tensor::zeros(&shape),
            m: Tensor::zeros(&shape),
            v: Tensor::zeros(&shape),
            step_count: 0,
        }
    }

    pub fn zero_grad(&mut self) {
        self.grad.fill(0.0);
    }
}
