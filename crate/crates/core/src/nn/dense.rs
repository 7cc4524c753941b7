use super::init::{he_uniform, seeded_rng};
use super::linalg::{col_sums_acc, matmul, matmul_a_bt, matmul_at_b_acc};
use super::{NnError, Parameter, Tensor};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Identity,
}

/// Fully-connected layer: `y = act(x . W + b)` with `W [dim_in x dim_out]`.
#[derive(Clone, Debug)]
pub struct Dense {
    pub weights: Parameter,
    pub bias: Parameter,
    pub activation: Activation,
    dim_in: usize,
    dim_out: usize,
}

pub struct DenseCache {
    input: Tensor,
    pre_act: Tensor,
}

impl Dense {
    pub fn new(dim_in: usize, dim_out: usize, activation: Activation, seed: u64) -> Self {
        let mut rng = seeded_rng(seed);
        let weights = he_uniform(&[dim_in, dim_out], dim_in, &mut rng);
        Dense {
            weights: Parameter::new(weights),
            bias: Parameter::new(Tensor::zeros(&[dim_out])),
            activation,
            dim_in,
            dim_out,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_in, self.dim_out)
    }

    pub fn forward(&self, input: &Tensor) -> Result<(Tensor, DenseCache), NnError> {
        let shape = input.shape();
        if shape.len() != 2 || shape[1] != self.dim_in {
            return Err(NnError::Shape(format!(
                "dense expects [batch x {}], got {:?}",
                self.dim_in, shape
            )));
        }
        let batch = shape[0];
        let mut pre = Tensor::zeros(&[batch, self.dim_out]);
        matmul(
            input.data(),
            self.weights.value.data(),
            batch,
            self.dim_in,
            self.dim_out,
            pre.data_mut(),
        );
        let bias = self.bias.value.data();
        for row in pre.data_mut().chunks_exact_mut(self.dim_out) {
            for (p, b) in row.iter_mut().zip(bias) {
                *p += *b;
            }
        }
        let mut out = pre.clone();
        if self.activation == Activation::Relu {
            for v in out.data_mut() {
                if *v < 0.0 {
                    *v = 0.0;
                }
            }
        }
        Ok((
            out,
            DenseCache {
                input: input.clone(),
                pre_act: pre,
            },
        ))
    }

    pub fn backward(&mut self, cache: &DenseCache, d_out: &Tensor) -> Result<Tensor, NnError> {
        let batch = cache.input.shape()[0];
        if d_out.shape() != [batch, self.dim_out] {
            return Err(NnError::Shape(format!(
                "dense backward expects [{} x {}], got {:?}",
                batch,
                self.dim_out,
                d_out.shape()
            )));
        }
        // Through the activation.
        let mut d_pre = d_out.clone();
        if self.activation == Activation::Relu {
            for (d, p) in d_pre.data_mut().iter_mut().zip(cache.pre_act.data()) {
                if *p <= 0.0 {
                    *d = 0.0;
                }
            }
        }
        matmul_at_b_acc(
            cache.input.data(),
            d_pre.data(),
            batch,
            self.dim_in,
            self.dim_out,
            self.weights.grad.data_mut(),
        );
        col_sums_acc(d_pre.data(), batch, self.dim_out, self.bias.grad.data_mut());
        let mut d_in = Tensor::zeros(&[batch, self.dim_in]);
        matmul_a_bt(
            d_pre.data(),
            self.weights.value.data(),
            batch,
            self.dim_out,
            self.dim_in,
            d_in.data_mut(),
        );
        Ok(d_in)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_dense(dim: usize) -> Dense {
        let mut w = Tensor::zeros(&[dim, dim]);
        for i in 0..dim {
            w.data_mut()[i * dim + i] = 1.0;
        }
        Dense {
            weights: Parameter::new(w),
            bias: Parameter::new(Tensor::zeros(&[dim])),
            activation: Activation::Identity,
            dim_in: dim,
            dim_out: dim,
        }
    }

    #[test]
    fn identity_weights_pass_through() {
        let d = identity_dense(3);
        let x = Tensor::from_vec(&[2, 3], vec![1.0, -2.0, 3.0, 0.5, 0.0, -0.5]).unwrap();
        let (y, _) = d.forward(&x).unwrap();
        assert_eq!(y.data(), x.data());
    }

    #[test]
    fn relu_zeroes_negative_preactivations() {
        let mut d = identity_dense(2);
        d.activation = Activation::Relu;
        let x = Tensor::from_vec(&[1, 2], vec![-3.0, 4.0]).unwrap();
        let (y, _) = d.forward(&x).unwrap();
        assert_eq!(y.data(), &[0.0, 4.0]);
    }

    #[test]
    fn shape_mismatch_is_error() {
        let d = Dense::new(5, 2, Activation::Identity, 0);
        assert!(matches!(
            d.forward(&Tensor::zeros(&[1, 4])),
            Err(NnError::Shape(_))
        ));
    }
}
