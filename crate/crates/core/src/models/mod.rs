//! The three sequence-regression architectures, assembled from the numeric
//! core: a strided-convolution feature extractor, an optional recurrent
//! block, and a dense regression head mapping a standardized
//! `[batch x 200 x 12]` episode batch to one stiffness prediction per
//! episode (in normalized-target space).

use serde::{Deserialize, Serialize};

use crate::nn::init::derive_seed;
use crate::nn::{
    adam_step, bilstm_backward, bilstm_forward, conv1d_output_len, lstm_backward, lstm_forward,
    AdamConfig, Activation, BilstmCache, Conv1d, Conv1dCache, Dense, DenseCache, Direction,
    LstmCache, LstmCellParams, NnError, Parameter, Tensor,
};
use crate::sim::{EPISODE_CHANNELS, EPISODE_STEPS};

/// Regression head widths shared by all architectures.
pub const HEAD_WIDTHS: [usize; 5] = [512, 256, 128, 64, 1];
/// Feature extractor widths for the purely convolutional model.
pub const CONVNET_FILTERS: [usize; 3] = [128, 256, 512];
/// Feature extractor widths for the recurrent models.
pub const RECURRENT_FILTERS: [usize; 3] = [128, 256, 256];
/// Units per recurrent cell.
pub const LSTM_UNITS: usize = 128;
/// Temporal kernel width of every convolution.
pub const CONV_WIDTH: usize = 3;
/// Temporal stride of every convolution.
pub const CONV_STRIDE: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    ConvNet,
    ConvLstmNet,
    ConvBiLstmNet,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::ConvNet, ModelKind::ConvLstmNet, ModelKind::ConvBiLstmNet];
}

impl std::str::FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "conv" | "convnet" => Ok(ModelKind::ConvNet),
            "conv-lstm" | "convlstmnet" => Ok(ModelKind::ConvLstmNet),
            "conv-bilstm" | "convbilstmnet" => Ok(ModelKind::ConvBiLstmNet),
            other => Err(format!("unknown model kind '{other}' (conv|conv-lstm|conv-bilstm)")),
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelKind::ConvNet => write!(f, "conv"),
            ModelKind::ConvLstmNet => write!(f, "conv-lstm"),
            ModelKind::ConvBiLstmNet => write!(f, "conv-bilstm"),
        }
    }
}

/// Architecture choice plus the seed that fully determines initialization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub seed: u64,
}

enum RecurrentBlock {
    None,
    /// Two stacked forward-direction cells.
    Stacked(LstmCellParams, LstmCellParams),
    /// One forward and one reversed cell, concatenated.
    Bidirectional(LstmCellParams, LstmCellParams),
}

pub struct Model {
    pub spec: ModelSpec,
    convs: Vec<Conv1d>,
    recurrent: RecurrentBlock,
    head: Vec<Dense>,
}

enum RecurrentCaches {
    None,
    Stacked {
        first: LstmCache,
        second: LstmCache,
        hidden1: Tensor,
        time: usize,
    },
    Bidirectional {
        cache: BilstmCache,
        time: usize,
    },
}

pub struct ModelCaches {
    conv: Vec<(Conv1dCache, Tensor)>,
    recurrent: RecurrentCaches,
    head: Vec<DenseCache>,
    conv_out_shape: Vec<usize>,
}

fn relu_forward(mut x: Tensor) -> (Tensor, Tensor) {
    let pre = x.clone();
    for v in x.data_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    (x, pre)
}

fn relu_backward(d_out: &mut Tensor, pre: &Tensor) {
    for (d, p) in d_out.data_mut().iter_mut().zip(pre.data()) {
        if *p <= 0.0 {
            *d = 0.0;
        }
    }
}

/// Instantiates the layer stack for a spec; same spec and seed give
/// bit-identical parameters.
pub fn build(spec: ModelSpec) -> Model {
    let filters = match spec.kind {
        ModelKind::ConvNet => CONVNET_FILTERS,
        _ => RECURRENT_FILTERS,
    };
    let mut convs = Vec::with_capacity(3);
    let mut ch_in = EPISODE_CHANNELS;
    for (i, &ch_out) in filters.iter().enumerate() {
        convs.push(Conv1d::new(CONV_WIDTH, ch_in, ch_out, CONV_STRIDE, derive_seed(spec.seed, i as u64)));
        ch_in = ch_out;
    }

    let final_len = conv1d_output_len(
        conv1d_output_len(conv1d_output_len(EPISODE_STEPS, CONV_STRIDE), CONV_STRIDE),
        CONV_STRIDE,
    );
    let (recurrent, head_in) = match spec.kind {
        ModelKind::ConvNet => (RecurrentBlock::None, final_len * filters[2]),
        ModelKind::ConvLstmNet => (
            RecurrentBlock::Stacked(
                LstmCellParams::new(filters[2], LSTM_UNITS, derive_seed(spec.seed, 10)),
                LstmCellParams::new(LSTM_UNITS, LSTM_UNITS, derive_seed(spec.seed, 11)),
            ),
            LSTM_UNITS,
        ),
        ModelKind::ConvBiLstmNet => (
            RecurrentBlock::Bidirectional(
                LstmCellParams::new(filters[2], LSTM_UNITS, derive_seed(spec.seed, 10)),
                LstmCellParams::new(filters[2], LSTM_UNITS, derive_seed(spec.seed, 11)),
            ),
            2 * LSTM_UNITS,
        ),
    };

    let mut head = Vec::with_capacity(HEAD_WIDTHS.len());
    let mut dim_in = head_in;
    for (i, &width) in HEAD_WIDTHS.iter().enumerate() {
        let activation = if i + 1 == HEAD_WIDTHS.len() {
            Activation::Identity
        } else {
            Activation::Relu
        };
        head.push(Dense::new(dim_in, width, activation, derive_seed(spec.seed, 20 + i as u64)));
        dim_in = width;
    }

    Model {
        spec,
        convs,
        recurrent,
        head,
    }
}

impl Model {
    /// Temporal lengths after each convolution for a given input length.
    pub fn feature_lengths(input_len: usize) -> [usize; 3] {
        let l1 = conv1d_output_len(input_len, CONV_STRIDE);
        let l2 = conv1d_output_len(l1, CONV_STRIDE);
        let l3 = conv1d_output_len(l2, CONV_STRIDE);
        [l1, l2, l3]
    }

    /// Width of the vector entering the regression head.
    pub fn head_input_width(&self) -> usize {
        self.head[0].dims().0
    }

    /// One prediction per episode; inference-only wrapper over
    /// [`Model::forward_train`].
    pub fn forward(&self, batch: &Tensor) -> Result<Tensor, NnError> {
        self.forward_train(batch).map(|(y, _)| y)
    }

    /// Forward pass returning the caches needed by [`Model::backward`].
    pub fn forward_train(&self, batch: &Tensor) -> Result<(Tensor, ModelCaches), NnError> {
        let shape = batch.shape();
        if shape.len() != 3 || shape[1] != EPISODE_STEPS || shape[2] != EPISODE_CHANNELS {
            return Err(NnError::Shape(format!(
                "model expects [batch x {EPISODE_STEPS} x {EPISODE_CHANNELS}], got {shape:?}"
            )));
        }
        let b = shape[0];

        let mut x = batch.clone();
        let mut conv_caches = Vec::with_capacity(self.convs.len());
        for conv in &self.convs {
            let (y, cache) = conv.forward(&x)?;
            let (y, pre) = relu_forward(y);
            conv_caches.push((cache, pre));
            x = y;
        }
        let conv_out_shape = x.shape().to_vec();
        let time = conv_out_shape[1];

        let (features, recurrent_caches) = match &self.recurrent {
            RecurrentBlock::None => (x.reshaped(&[b, time * conv_out_shape[2]])?, RecurrentCaches::None),
            RecurrentBlock::Stacked(l1, l2) => {
                let (h1, _, c1) = lstm_forward(&x, l1, Direction::Forward)?;
                let (h2, final2, c2) = lstm_forward(&h1, l2, Direction::Forward)?;
                drop(h2);
                (
                    final2,
                    RecurrentCaches::Stacked {
                        first: c1,
                        second: c2,
                        hidden1: h1,
                        time,
                    },
                )
            }
            RecurrentBlock::Bidirectional(fwd, bwd) => {
                let (out, cache) = bilstm_forward(&x, fwd, bwd)?;
                // Final states of both passes: forward at t = T-1, reversed
                // pass at aligned index 0.
                let u = LSTM_UNITS;
                let mut features = Tensor::zeros(&[b, 2 * u]);
                for bi in 0..b {
                    let f_src = (bi * time + (time - 1)) * 2 * u;
                    let b_src = (bi * time) * 2 * u + u;
                    features.data_mut()[bi * 2 * u..bi * 2 * u + u]
                        .copy_from_slice(&out.data()[f_src..f_src + u]);
                    features.data_mut()[bi * 2 * u + u..(bi + 1) * 2 * u]
                        .copy_from_slice(&out.data()[b_src..b_src + u]);
                }
                (features, RecurrentCaches::Bidirectional { cache, time })
            }
        };

        let mut h = features;
        let mut head_caches = Vec::with_capacity(self.head.len());
        for dense in &self.head {
            let (y, cache) = dense.forward(&h)?;
            head_caches.push(cache);
            h = y;
        }
        if !h.is_finite() {
            return Err(NnError::NonFinite("model forward"));
        }
        Ok((
            h,
            ModelCaches {
                conv: conv_caches,
                recurrent: recurrent_caches,
                head: head_caches,
                conv_out_shape,
            },
        ))
    }

    /// Accumulates parameter gradients from the prediction gradient.
    pub fn backward(&mut self, caches: &ModelCaches, d_pred: &Tensor) -> Result<(), NnError> {
        let b = caches.conv_out_shape[0];
        let mut d = d_pred.clone();
        for (dense, cache) in self.head.iter_mut().zip(&caches.head).rev() {
            d = dense.backward(cache, &d)?;
        }

        let mut d_conv_out = match (&mut self.recurrent, &caches.recurrent) {
            (RecurrentBlock::None, RecurrentCaches::None) => d.reshaped(&caches.conv_out_shape)?,
            (RecurrentBlock::Stacked(l1, l2), RecurrentCaches::Stacked { first, second, hidden1, time }) => {
                // Upstream hits only the final hidden state of the top cell.
                let u = LSTM_UNITS;
                let mut d_h2 = Tensor::zeros(&[b, *time, u]);
                for bi in 0..b {
                    let dst = (bi * time + (time - 1)) * u;
                    d_h2.data_mut()[dst..dst + u].copy_from_slice(&d.data()[bi * u..(bi + 1) * u]);
                }
                let d_h1 = lstm_backward(l2, second, &d_h2)?;
                let _ = hidden1;
                lstm_backward(l1, first, &d_h1)?
            }
            (RecurrentBlock::Bidirectional(fwd, bwd), RecurrentCaches::Bidirectional { cache, time }) => {
                let u = LSTM_UNITS;
                let mut d_out = Tensor::zeros(&[b, *time, 2 * u]);
                for bi in 0..b {
                    let f_dst = (bi * time + (time - 1)) * 2 * u;
                    let b_dst = (bi * time) * 2 * u + u;
                    d_out.data_mut()[f_dst..f_dst + u]
                        .copy_from_slice(&d.data()[bi * 2 * u..bi * 2 * u + u]);
                    d_out.data_mut()[b_dst..b_dst + u]
                        .copy_from_slice(&d.data()[bi * 2 * u + u..(bi + 1) * 2 * u]);
                }
                bilstm_backward(fwd, bwd, cache, &d_out)?
            }
            _ => return Err(NnError::State("cache does not match the model's recurrent block".into())),
        };

        for (conv, (cache, pre)) in self.convs.iter_mut().zip(&caches.conv).rev() {
            relu_backward(&mut d_conv_out, pre);
            d_conv_out = conv.backward(cache, &d_conv_out)?;
        }
        Ok(())
    }

    pub fn zero_grads(&mut self) {
        for p in self.params_mut() {
            p.zero_grad();
        }
    }

    pub fn adam_step(&mut self, cfg: &AdamConfig) {
        let mut params = self.params_mut();
        adam_step(&mut params, cfg);
    }

    /// Exact trainable scalar count.
    pub fn param_count(&self) -> usize {
        self.named_params().iter().map(|(_, p)| p.value.len()).sum()
    }

    pub fn named_params(&self) -> Vec<(String, &Parameter)> {
        let mut out = Vec::new();
        for (i, c) in self.convs.iter().enumerate() {
            out.push((format!("conv{i}.kernel"), &c.kernel));
            out.push((format!("conv{i}.bias"), &c.bias));
        }
        match &self.recurrent {
            RecurrentBlock::None => {}
            RecurrentBlock::Stacked(a, b) | RecurrentBlock::Bidirectional(a, b) => {
                for (tag, cell) in [("lstm0", a), ("lstm1", b)] {
                    out.push((format!("{tag}.input_weights"), &cell.input_weights));
                    out.push((format!("{tag}.recurrent_weights"), &cell.recurrent_weights));
                    out.push((format!("{tag}.bias"), &cell.bias));
                }
            }
        }
        for (i, d) in self.head.iter().enumerate() {
            out.push((format!("dense{i}.weights"), &d.weights));
            out.push((format!("dense{i}.bias"), &d.bias));
        }
        out
    }

    pub fn params_mut(&mut self) -> Vec<&mut Parameter> {
        let mut out = Vec::new();
        for c in self.convs.iter_mut() {
            out.push(&mut c.kernel);
            out.push(&mut c.bias);
        }
        match &mut self.recurrent {
            RecurrentBlock::None => {}
            RecurrentBlock::Stacked(a, b) | RecurrentBlock::Bidirectional(a, b) => {
                for cell in [a, b] {
                    out.push(&mut cell.input_weights);
                    out.push(&mut cell.recurrent_weights);
                    out.push(&mut cell.bias);
                }
            }
        }
        for d in self.head.iter_mut() {
            out.push(&mut d.weights);
            out.push(&mut d.bias);
        }
        out
    }

    /// Snapshot of all parameter values, named.
    pub fn export_tensors(&self) -> Vec<(String, Tensor)> {
        self.named_params()
            .into_iter()
            .map(|(n, p)| (n, p.value.clone()))
            .collect()
    }

    /// Restores parameter values by name; every model parameter must be
    /// present with a matching shape.
    pub fn load_tensors(&mut self, entries: &[(String, Tensor)]) -> Result<(), NnError> {
        use std::collections::HashMap;
        let by_name: HashMap<&str, &Tensor> =
            entries.iter().map(|(n, t)| (n.as_str(), t)).collect();
        let names: Vec<String> = self.named_params().iter().map(|(n, _)| n.clone()).collect();
        for (name, param) in names.iter().zip(self.params_mut()) {
            let tensor = by_name
                .get(name.as_str())
                .ok_or_else(|| NnError::State(format!("checkpoint is missing parameter '{name}'")))?;
            if tensor.shape() != param.value.shape() {
                return Err(NnError::Shape(format!(
                    "parameter '{name}': checkpoint shape {:?} vs model shape {:?}",
                    tensor.shape(),
                    param.value.shape()
                )));
            }
            param.value = (*tensor).clone();
        }
        Ok(())
    }
}
