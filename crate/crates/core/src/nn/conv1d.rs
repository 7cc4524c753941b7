use rayon::prelude::*;

use super::init::{he_uniform, seeded_rng};
use super::linalg::{axpy, dot};
use super::{NnError, Parameter, Tensor};

/// Fixed number of batch partitions for gradient reduction. Partial sums are
/// folded in partition order, so results do not depend on the thread count.
const GRAD_CHUNKS: usize = 8;

/// Output length under "same" zero padding.
pub fn conv1d_output_len(time: usize, stride: usize) -> usize {
    time.div_ceil(stride)
}

/// 1D cross-correlation layer with "same" zero padding.
///
/// Input `[batch x time x ch_in]`, kernel `[width x ch_in x ch_out]`,
/// output `[batch x ceil(time/stride) x ch_out]`.
#[derive(Clone, Debug)]
pub struct Conv1d {
    pub kernel: Parameter,
    pub bias: Parameter,
    pub stride: usize,
    width: usize,
    ch_in: usize,
    ch_out: usize,
}

/// Forward byproducts needed by `backward`.
pub struct Conv1dCache {
    input: Tensor,
    out_len: usize,
}

impl Conv1d {
    pub fn new(width: usize, ch_in: usize, ch_out: usize, stride: usize, seed: u64) -> Self {
        assert!(width >= 1 && stride >= 1);
        let mut rng = seeded_rng(seed);
        let fan_in = width * ch_in;
        let kernel = he_uniform(&[width, ch_in, ch_out], fan_in, &mut rng);
        Conv1d {
            kernel: Parameter::new(kernel),
            bias: Parameter::new(Tensor::zeros(&[ch_out])),
            stride,
            width,
            ch_in,
            ch_out,
        }
    }

    pub fn ch_in(&self) -> usize {
        self.ch_in
    }

    pub fn ch_out(&self) -> usize {
        self.ch_out
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Left pad for "same" output: total pad is whatever makes
    /// `(out_len - 1) * stride + width` cover the input.
    fn pad_left(&self, time: usize) -> usize {
        let out_len = conv1d_output_len(time, self.stride);
        let span = (out_len - 1) * self.stride + self.width;
        let pad_total = span.saturating_sub(time);
        pad_total / 2
    }

    pub fn forward(&self, input: &Tensor) -> Result<(Tensor, Conv1dCache), NnError> {
        let shape = input.shape();
        if shape.len() != 3 || shape[2] != self.ch_in {
            return Err(NnError::Shape(format!(
                "conv1d expects [batch x time x {}], got {:?}",
                self.ch_in, shape
            )));
        }
        let (batch, time) = (shape[0], shape[1]);
        let out_len = conv1d_output_len(time, self.stride);
        let pad_left = self.pad_left(time) as isize;
        let mut out = Tensor::zeros(&[batch, out_len, self.ch_out]);

        let x = input.data();
        let k = self.kernel.value.data();
        let bias = self.bias.value.data();
        let (ci, co, w, stride) = (self.ch_in, self.ch_out, self.width, self.stride);

        let sample = |b: usize, y: &mut [f64]| {
            let x_b = &x[b * time * ci..(b + 1) * time * ci];
            for to in 0..out_len {
                let y_row = &mut y[to * co..(to + 1) * co];
                y_row.copy_from_slice(bias);
                for wi in 0..w {
                    let ti = (to * stride + wi) as isize - pad_left;
                    if ti < 0 || ti >= time as isize {
                        continue;
                    }
                    let x_row = &x_b[ti as usize * ci..(ti as usize + 1) * ci];
                    let k_slab = &k[wi * ci * co..(wi + 1) * ci * co];
                    for (c, &xv) in x_row.iter().enumerate() {
                        axpy(y_row, xv, &k_slab[c * co..(c + 1) * co]);
                    }
                }
            }
        };
        out.data_mut()
            .par_chunks_mut(out_len * co)
            .enumerate()
            .for_each(|(b, y)| sample(b, y));

        Ok((
            out,
            Conv1dCache {
                input: input.clone(),
                out_len,
            },
        ))
    }

    /// Backpropagates `d_out`, accumulating kernel/bias gradients and
    /// returning the input gradient.
    pub fn backward(&mut self, cache: &Conv1dCache, d_out: &Tensor) -> Result<Tensor, NnError> {
        let in_shape = cache.input.shape();
        let (batch, time) = (in_shape[0], in_shape[1]);
        let expect = [batch, cache.out_len, self.ch_out];
        if d_out.shape() != expect {
            return Err(NnError::Shape(format!(
                "conv1d backward expects {:?}, got {:?}",
                expect,
                d_out.shape()
            )));
        }
        let pad_left = self.pad_left(time) as isize;
        let (ci, co, w, stride, out_len) = (self.ch_in, self.ch_out, self.width, self.stride, cache.out_len);
        let x = cache.input.data();
        let k = self.kernel.value.data();
        let dy = d_out.data();

        // Input gradient: each batch row independent.
        let mut d_in = Tensor::zeros(&[batch, time, ci]);
        d_in
            .data_mut()
            .par_chunks_mut(time * ci)
            .enumerate()
            .for_each(|(b, dx_b)| {
                let dy_b = &dy[b * out_len * co..(b + 1) * out_len * co];
                for to in 0..out_len {
                    let dy_row = &dy_b[to * co..(to + 1) * co];
                    for wi in 0..w {
                        let ti = (to * stride + wi) as isize - pad_left;
                        if ti < 0 || ti >= time as isize {
                            continue;
                        }
                        let dx_row = &mut dx_b[ti as usize * ci..(ti as usize + 1) * ci];
                        let k_slab = &k[wi * ci * co..(wi + 1) * ci * co];
                        for (c, dxv) in dx_row.iter_mut().enumerate() {
                            *dxv += dot(&k_slab[c * co..(c + 1) * co], dy_row);
                        }
                    }
                }
            });

        // Kernel/bias gradients: fixed batch partitions, folded in order.
        let chunk = batch.div_ceil(GRAD_CHUNKS).max(1);
        let partials: Vec<(Vec<f64>, Vec<f64>)> = (0..batch.div_ceil(chunk))
            .into_par_iter()
            .map(|ch| {
                let b0 = ch * chunk;
                let b1 = (b0 + chunk).min(batch);
                let mut dk = vec![0.0; w * ci * co];
                let mut db = vec![0.0; co];
                for b in b0..b1 {
                    let x_b = &x[b * time * ci..(b + 1) * time * ci];
                    let dy_b = &dy[b * out_len * co..(b + 1) * out_len * co];
                    for to in 0..out_len {
                        let dy_row = &dy_b[to * co..(to + 1) * co];
                        axpy(&mut db, 1.0, dy_row);
                        for wi in 0..w {
                            let ti = (to * stride + wi) as isize - pad_left;
                            if ti < 0 || ti >= time as isize {
                                continue;
                            }
                            let x_row = &x_b[ti as usize * ci..(ti as usize + 1) * ci];
                            let dk_slab = &mut dk[wi * ci * co..(wi + 1) * ci * co];
                            for (c, &xv) in x_row.iter().enumerate() {
                                axpy(&mut dk_slab[c * co..(c + 1) * co], xv, dy_row);
                            }
                        }
                    }
                }
                (dk, db)
            })
            .collect();
        for (dk, db) in partials {
            axpy(self.kernel.grad.data_mut(), 1.0, &dk);
            axpy(self.bias.grad.data_mut(), 1.0, &db);
        }

        Ok(d_in)
    }
}
