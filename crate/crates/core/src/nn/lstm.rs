use super::init::{glorot_uniform, seeded_rng};
use super::linalg::{col_sums_acc, matmul, matmul_a_bt, matmul_at_b_acc};
use super::{NnError, Parameter, Tensor};

/// Time-processing direction. `Backward` consumes the sequence in reversed
/// order and re-reverses its outputs, so index `t` of the hidden sequence
/// always lines up with index `t` of the input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// One LSTM cell. Gate blocks are packed in the fixed order
/// input, forget, candidate, output along the `4 * units` axis.
#[derive(Clone, Debug)]
pub struct LstmCellParams {
    /// `[4*units x input_dim]`
    pub input_weights: Parameter,
    /// `[4*units x units]`
    pub recurrent_weights: Parameter,
    /// `[4*units]`; the forget block starts at 1.
    pub bias: Parameter,
    pub units: usize,
    input_dim: usize,
}

impl LstmCellParams {
    pub fn new(input_dim: usize, units: usize, seed: u64) -> Self {
        let mut rng = seeded_rng(seed);
        let input_weights = glorot_uniform(&[4 * units, input_dim], input_dim, units, &mut rng);
        let recurrent_weights = glorot_uniform(&[4 * units, units], units, units, &mut rng);
        let mut bias = Tensor::zeros(&[4 * units]);
        bias.data_mut()[units..2 * units].fill(1.0);
        LstmCellParams {
            input_weights: Parameter::new(input_weights),
            recurrent_weights: Parameter::new(recurrent_weights),
            bias: Parameter::new(bias),
            units,
            input_dim,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }
}

/// Per-step byproducts kept for backpropagation through time.
pub struct LstmCache {
    // Indexed by processing step; `order[s]` is the input time index.
    gates: Vec<Vec<f64>>,  // post-activation i,f,g,o  [batch x 4U]
    cells: Vec<Vec<f64>>,  // c_t                      [batch x U]
    tanh_c: Vec<Vec<f64>>, // tanh(c_t)                [batch x U]
    h_prev: Vec<Vec<f64>>, // h_{t-1}                  [batch x U]
    c_prev: Vec<Vec<f64>>, // c_{t-1}                  [batch x U]
    xs: Vec<Vec<f64>>,     // x_t                      [batch x D]
    order: Vec<usize>,
    batch: usize,
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// One recurrence step. Exposed so saturation behavior can be probed with a
/// chosen initial state.
pub fn lstm_step(
    params: &LstmCellParams,
    x_t: &[f64],
    h_prev: &[f64],
    c_prev: &[f64],
    batch: usize,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let u = params.units;
    let d = params.input_dim;
    debug_assert_eq!(x_t.len(), batch * d);
    debug_assert_eq!(h_prev.len(), batch * u);

    let mut gates = vec![0.0; batch * 4 * u];
    matmul_a_bt(x_t, params.input_weights.value.data(), batch, d, 4 * u, &mut gates);
    let mut rec = vec![0.0; batch * 4 * u];
    matmul_a_bt(h_prev, params.recurrent_weights.value.data(), batch, u, 4 * u, &mut rec);
    let bias = params.bias.value.data();
    for (row, rrow) in gates
        .chunks_exact_mut(4 * u)
        .zip(rec.chunks_exact(4 * u))
    {
        for ((g, r), b) in row.iter_mut().zip(rrow).zip(bias) {
            *g += *r + *b;
        }
        for g in row[..2 * u].iter_mut() {
            *g = sigmoid(*g); // input, forget
        }
        for g in row[2 * u..3 * u].iter_mut() {
            *g = g.tanh(); // candidate
        }
        for g in row[3 * u..].iter_mut() {
            *g = sigmoid(*g); // output
        }
    }

    let mut c = vec![0.0; batch * u];
    let mut h = vec![0.0; batch * u];
    for b in 0..batch {
        let gr = &gates[b * 4 * u..(b + 1) * 4 * u];
        let (cb, hb) = (&mut c[b * u..(b + 1) * u], &mut h[b * u..(b + 1) * u]);
        let cp = &c_prev[b * u..(b + 1) * u];
        for j in 0..u {
            let (i_g, f_g, g_g, o_g) = (gr[j], gr[u + j], gr[2 * u + j], gr[3 * u + j]);
            cb[j] = f_g * cp[j] + i_g * g_g;
            hb[j] = o_g * cb[j].tanh();
        }
    }
    (gates, c, h)
}

/// Runs the recurrence over a `[batch x time x input_dim]` sequence.
/// Returns the aligned hidden sequence `[batch x time x units]`, the final
/// hidden state `[batch x units]`, and the cache for `lstm_backward`.
pub fn lstm_forward(
    input: &Tensor,
    params: &LstmCellParams,
    direction: Direction,
) -> Result<(Tensor, Tensor, LstmCache), NnError> {
    let shape = input.shape();
    if shape.len() != 3 || shape[2] != params.input_dim {
        return Err(NnError::Shape(format!(
            "lstm expects [batch x time x {}], got {:?}",
            params.input_dim, shape
        )));
    }
    let (batch, time, d) = (shape[0], shape[1], shape[2]);
    let u = params.units;
    let order: Vec<usize> = match direction {
        Direction::Forward => (0..time).collect(),
        Direction::Backward => (0..time).rev().collect(),
    };

    let mut cache = LstmCache {
        gates: Vec::with_capacity(time),
        cells: Vec::with_capacity(time),
        tanh_c: Vec::with_capacity(time),
        h_prev: Vec::with_capacity(time),
        c_prev: Vec::with_capacity(time),
        xs: Vec::with_capacity(time),
        order: order.clone(),
        batch,
    };

    let x = input.data();
    let mut h = vec![0.0; batch * u];
    let mut c = vec![0.0; batch * u];
    let mut out = Tensor::zeros(&[batch, time, u]);
    for &t in &order {
        let mut x_t = vec![0.0; batch * d];
        for b in 0..batch {
            x_t[b * d..(b + 1) * d].copy_from_slice(&x[(b * time + t) * d..(b * time + t + 1) * d]);
        }
        let (gates, c_new, h_new) = lstm_step(params, &x_t, &h, &c, batch);
        let tanh_c: Vec<f64> = c_new.iter().map(|v| v.tanh()).collect();
        for b in 0..batch {
            out.data_mut()[(b * time + t) * u..(b * time + t + 1) * u]
                .copy_from_slice(&h_new[b * u..(b + 1) * u]);
        }
        cache.xs.push(x_t);
        cache.h_prev.push(h);
        cache.c_prev.push(c);
        cache.gates.push(gates);
        cache.tanh_c.push(tanh_c);
        cache.cells.push(c_new.clone());
        h = h_new;
        c = c_new;
    }
    let final_h = Tensor::from_vec(&[batch, u], h)?;
    Ok((out, final_h, cache))
}

/// Backpropagation through time. `d_hidden` is the gradient w.r.t. the
/// aligned hidden sequence; parameter gradients accumulate into `params`,
/// the input gradient is returned.
pub fn lstm_backward(
    params: &mut LstmCellParams,
    cache: &LstmCache,
    d_hidden: &Tensor,
) -> Result<Tensor, NnError> {
    let u = params.units;
    let d = params.input_dim;
    let batch = cache.batch;
    let time = cache.order.len();
    if d_hidden.shape() != [batch, time, u] {
        return Err(NnError::Shape(format!(
            "lstm backward expects [{batch} x {time} x {u}], got {:?}",
            d_hidden.shape()
        )));
    }
    if cache.gates.len() != time {
        return Err(NnError::State("lstm cache does not match sequence".into()));
    }

    let dh_seq = d_hidden.data();
    let mut d_in = Tensor::zeros(&[batch, time, d]);
    let mut dh_rec = vec![0.0; batch * u];
    let mut dc_rec = vec![0.0; batch * u];
    let mut da = vec![0.0; batch * 4 * u];
    let mut dx_t = vec![0.0; batch * d];
    let mut dh_next = vec![0.0; batch * u];

    for s in (0..time).rev() {
        let t = cache.order[s];
        let gates = &cache.gates[s];
        let tanh_c = &cache.tanh_c[s];
        let c_prev = &cache.c_prev[s];

        for b in 0..batch {
            let gr = &gates[b * 4 * u..(b + 1) * 4 * u];
            let tc = &tanh_c[b * u..(b + 1) * u];
            let cp = &c_prev[b * u..(b + 1) * u];
            let da_b = &mut da[b * 4 * u..(b + 1) * 4 * u];
            for j in 0..u {
                let dh = dh_seq[(b * time + t) * u + j] + dh_rec[b * u + j];
                let (i_g, f_g, g_g, o_g) = (gr[j], gr[u + j], gr[2 * u + j], gr[3 * u + j]);
                let d_o = dh * tc[j];
                let dc = dc_rec[b * u + j] + dh * o_g * (1.0 - tc[j] * tc[j]);
                let d_f = dc * cp[j];
                let d_i = dc * g_g;
                let d_g = dc * i_g;
                da_b[j] = d_i * i_g * (1.0 - i_g);
                da_b[u + j] = d_f * f_g * (1.0 - f_g);
                da_b[2 * u + j] = d_g * (1.0 - g_g * g_g);
                da_b[3 * u + j] = d_o * o_g * (1.0 - o_g);
                dc_rec[b * u + j] = dc * f_g;
            }
        }

        matmul_at_b_acc(&da, &cache.xs[s], batch, 4 * u, d, params.input_weights.grad.data_mut());
        matmul_at_b_acc(
            &da,
            &cache.h_prev[s],
            batch,
            4 * u,
            u,
            params.recurrent_weights.grad.data_mut(),
        );
        col_sums_acc(&da, batch, 4 * u, params.bias.grad.data_mut());

        matmul(&da, params.input_weights.value.data(), batch, 4 * u, d, &mut dx_t);
        for b in 0..batch {
            d_in.data_mut()[(b * time + t) * d..(b * time + t + 1) * d]
                .copy_from_slice(&dx_t[b * d..(b + 1) * d]);
        }
        matmul(&da, params.recurrent_weights.value.data(), batch, 4 * u, u, &mut dh_next);
        dh_rec.copy_from_slice(&dh_next);
    }
    Ok(d_in)
}

pub struct BilstmCache {
    fwd: LstmCache,
    bwd: LstmCache,
}

/// Concatenates the forward and backward hidden sequences along the feature
/// axis: output `[batch x time x 2*units]`.
pub fn bilstm_forward(
    input: &Tensor,
    params_fwd: &LstmCellParams,
    params_bwd: &LstmCellParams,
) -> Result<(Tensor, BilstmCache), NnError> {
    if params_fwd.units != params_bwd.units {
        return Err(NnError::Shape(format!(
            "bilstm unit mismatch: {} vs {}",
            params_fwd.units, params_bwd.units
        )));
    }
    let (out_f, _, cache_f) = lstm_forward(input, params_fwd, Direction::Forward)?;
    let (out_b, _, cache_b) = lstm_forward(input, params_bwd, Direction::Backward)?;
    let (batch, time, u) = (input.shape()[0], input.shape()[1], params_fwd.units);
    let mut out = Tensor::zeros(&[batch, time, 2 * u]);
    let (of, ob) = (out_f.data(), out_b.data());
    let o = out.data_mut();
    for b in 0..batch {
        for t in 0..time {
            let src = (b * time + t) * u;
            let dst = (b * time + t) * 2 * u;
            o[dst..dst + u].copy_from_slice(&of[src..src + u]);
            o[dst + u..dst + 2 * u].copy_from_slice(&ob[src..src + u]);
        }
    }
    Ok((
        out,
        BilstmCache {
            fwd: cache_f,
            bwd: cache_b,
        },
    ))
}

pub fn bilstm_backward(
    params_fwd: &mut LstmCellParams,
    params_bwd: &mut LstmCellParams,
    cache: &BilstmCache,
    d_out: &Tensor,
) -> Result<Tensor, NnError> {
    let u = params_fwd.units;
    let batch = cache.fwd.batch;
    let time = cache.fwd.order.len();
    if d_out.shape() != [batch, time, 2 * u] {
        return Err(NnError::Shape(format!(
            "bilstm backward expects [{batch} x {time} x {}], got {:?}",
            2 * u,
            d_out.shape()
        )));
    }
    let mut d_f = Tensor::zeros(&[batch, time, u]);
    let mut d_b = Tensor::zeros(&[batch, time, u]);
    let src = d_out.data();
    for b in 0..batch {
        for t in 0..time {
            let s = (b * time + t) * 2 * u;
            let d = (b * time + t) * u;
            d_f.data_mut()[d..d + u].copy_from_slice(&src[s..s + u]);
            d_b.data_mut()[d..d + u].copy_from_slice(&src[s + u..s + 2 * u]);
        }
    }
    let dx_f = lstm_backward(params_fwd, &cache.fwd, &d_f)?;
    let mut dx = lstm_backward(params_bwd, &cache.bwd, &d_b)?;
    for (a, b) in dx.data_mut().iter_mut().zip(dx_f.data()) {
        *a += *b;
    }
    Ok(dx)
}
