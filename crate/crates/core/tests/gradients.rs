//! Finite-difference verification of every layer's backward pass.
//!
//! The numeric side of each check only calls forward code, so it is an
//! independent oracle for the analytic gradients.

use sgrip_core::nn::{
    bilstm_backward, bilstm_forward, gradient_check, lstm_backward, lstm_forward, mse_loss,
    Activation, Conv1d, Dense, Direction, GradCheckConfig, LstmCellParams, Tensor,
};

fn random_tensor(shape: &[usize], seed: u64) -> Tensor {
    // Small deterministic pseudo-random values; no dependence on the layers.
    let mut t = Tensor::zeros(shape);
    let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
    for v in t.data_mut() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        *v = (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0;
    }
    t
}

struct ConvHarness {
    layer: Conv1d,
    input: Tensor,
    target: Tensor,
}

#[test]
fn conv1d_gradients_match_finite_differences() {
    let layer = Conv1d::new(3, 8, 3, 2, 21);
    let input = random_tensor(&[2, 8, 8], 1);
    let out_shape = [2, 4, 3];
    let target = random_tensor(&out_shape, 2);
    let mut h = ConvHarness { layer, input, target };

    let report = gradient_check(
        &mut h,
        |h| {
            let (y, _) = h.layer.forward(&h.input).unwrap();
            mse_loss(&y, &h.target).unwrap().0
        },
        |h| {
            h.layer.kernel.zero_grad();
            h.layer.bias.zero_grad();
            let (y, cache) = h.layer.forward(&h.input).unwrap();
            let (_, dl) = mse_loss(&y, &h.target).unwrap();
            h.layer.backward(&cache, &dl).unwrap();
            vec![
                ("kernel".into(), h.layer.kernel.grad.data().to_vec()),
                ("bias".into(), h.layer.bias.grad.data().to_vec()),
            ]
        },
        |h| vec![&mut h.layer.kernel.value, &mut h.layer.bias.value],
        &GradCheckConfig::default(),
    );
    assert!(report.max_rel_err < 1e-6, "conv1d err {}", report.max_rel_err);
}

#[test]
fn conv1d_input_gradient_matches_finite_differences() {
    let mut layer = Conv1d::new(3, 2, 3, 2, 5);
    let input = random_tensor(&[2, 6, 2], 7);
    let target = random_tensor(&[2, 3, 3], 8);

    let loss_at = |layer: &Conv1d, x: &Tensor| {
        let (y, _) = layer.forward(x).unwrap();
        mse_loss(&y, &target).unwrap().0
    };

    let (y, cache) = layer.forward(&input).unwrap();
    let (_, dl) = mse_loss(&y, &target).unwrap();
    let dx = layer.backward(&cache, &dl).unwrap();

    let h = 1e-6;
    let mut diff_sq = 0.0;
    let mut num_sq = 0.0;
    for i in 0..input.len() {
        let mut xp = input.clone();
        xp.data_mut()[i] += h;
        let mut xm = input.clone();
        xm.data_mut()[i] -= h;
        let numeric = (loss_at(&layer, &xp) - loss_at(&layer, &xm)) / (2.0 * h);
        let d = dx.data()[i] - numeric;
        diff_sq += d * d;
        num_sq += numeric * numeric;
    }
    let rel = diff_sq.sqrt() / num_sq.sqrt().max(1e-12);
    assert!(rel < 1e-6, "conv1d input grad err {rel}");
}

#[test]
fn dense_gradients_match_finite_differences() {
    struct H {
        layer: Dense,
        input: Tensor,
        target: Tensor,
    }
    let mut h = H {
        layer: Dense::new(5, 2, Activation::Relu, 3),
        input: random_tensor(&[3, 5], 11),
        target: random_tensor(&[3, 2], 12),
    };
    let report = gradient_check(
        &mut h,
        |h| {
            let (y, _) = h.layer.forward(&h.input).unwrap();
            mse_loss(&y, &h.target).unwrap().0
        },
        |h| {
            h.layer.weights.zero_grad();
            h.layer.bias.zero_grad();
            let (y, cache) = h.layer.forward(&h.input).unwrap();
            let (_, dl) = mse_loss(&y, &h.target).unwrap();
            h.layer.backward(&cache, &dl).unwrap();
            vec![
                ("weights".into(), h.layer.weights.grad.data().to_vec()),
                ("bias".into(), h.layer.bias.grad.data().to_vec()),
            ]
        },
        |h| vec![&mut h.layer.weights.value, &mut h.layer.bias.value],
        &GradCheckConfig::default(),
    );
    assert!(report.max_rel_err < 1e-7, "dense err {}", report.max_rel_err);
}

#[test]
fn mse_gradient_matches_finite_differences() {
    let pred = random_tensor(&[4, 1], 31);
    let target = random_tensor(&[4, 1], 32);
    let (_, grad) = mse_loss(&pred, &target).unwrap();
    let h = 1e-6;
    for i in 0..pred.len() {
        let mut pp = pred.clone();
        pp.data_mut()[i] += h;
        let mut pm = pred.clone();
        pm.data_mut()[i] -= h;
        let numeric =
            (mse_loss(&pp, &target).unwrap().0 - mse_loss(&pm, &target).unwrap().0) / (2.0 * h);
        let rel = (grad.data()[i] - numeric).abs() / numeric.abs().max(1e-12);
        assert!(rel < 1e-8, "mse coord {i} err {rel}");
    }
}

struct LstmHarness {
    params: LstmCellParams,
    input: Tensor,
    target: Tensor,
    direction: Direction,
}

fn lstm_loss(h: &mut LstmHarness) -> f64 {
    let (out, _, _) = lstm_forward(&h.input, &h.params, h.direction).unwrap();
    mse_loss(&out, &h.target).unwrap().0
}

fn lstm_grads(h: &mut LstmHarness) -> Vec<(String, Vec<f64>)> {
    h.params.input_weights.zero_grad();
    h.params.recurrent_weights.zero_grad();
    h.params.bias.zero_grad();
    let (out, _, cache) = lstm_forward(&h.input, &h.params, h.direction).unwrap();
    let (_, dl) = mse_loss(&out, &h.target).unwrap();
    lstm_backward(&mut h.params, &cache, &dl).unwrap();
    vec![
        ("input_weights".into(), h.params.input_weights.grad.data().to_vec()),
        (
            "recurrent_weights".into(),
            h.params.recurrent_weights.grad.data().to_vec(),
        ),
        ("bias".into(), h.params.bias.grad.data().to_vec()),
    ]
}

fn check_lstm(h: &mut LstmHarness, tol: f64, label: &str) {
    let report = gradient_check(
        h,
        lstm_loss,
        lstm_grads,
        |h| {
            vec![
                &mut h.params.input_weights.value,
                &mut h.params.recurrent_weights.value,
                &mut h.params.bias.value,
            ]
        },
        &GradCheckConfig::default(),
    );
    assert!(report.max_rel_err < tol, "{label} err {}", report.max_rel_err);
}

#[test]
fn lstm_single_step_matches_finite_differences() {
    let mut h = LstmHarness {
        params: LstmCellParams::new(3, 4, 17),
        input: random_tensor(&[2, 1, 3], 18),
        target: random_tensor(&[2, 1, 4], 19),
        direction: Direction::Forward,
    };
    check_lstm(&mut h, 1e-6, "lstm T=1");
}

#[test]
fn lstm_bptt_matches_finite_differences() {
    let mut h = LstmHarness {
        params: LstmCellParams::new(3, 4, 23),
        input: random_tensor(&[2, 7, 3], 24),
        target: random_tensor(&[2, 7, 4], 25),
        direction: Direction::Forward,
    };
    check_lstm(&mut h, 1e-5, "lstm T=7");
}

#[test]
fn reversed_lstm_bptt_matches_finite_differences() {
    let mut h = LstmHarness {
        params: LstmCellParams::new(2, 3, 29),
        input: random_tensor(&[2, 5, 2], 30),
        target: random_tensor(&[2, 5, 3], 31),
        direction: Direction::Backward,
    };
    check_lstm(&mut h, 1e-5, "reversed lstm");
}

#[test]
fn lstm_input_gradient_matches_finite_differences() {
    let mut params = LstmCellParams::new(2, 3, 37);
    let input = random_tensor(&[1, 4, 2], 38);
    let target = random_tensor(&[1, 4, 3], 39);

    let loss_at = |p: &LstmCellParams, x: &Tensor| {
        let (out, _, _) = lstm_forward(x, p, Direction::Forward).unwrap();
        mse_loss(&out, &target).unwrap().0
    };
    let (out, _, cache) = lstm_forward(&input, &params, Direction::Forward).unwrap();
    let (_, dl) = mse_loss(&out, &target).unwrap();
    let dx = lstm_backward(&mut params, &cache, &dl).unwrap();

    let h = 1e-6;
    let mut diff_sq = 0.0f64;
    let mut num_sq = 0.0f64;
    for i in 0..input.len() {
        let mut xp = input.clone();
        xp.data_mut()[i] += h;
        let mut xm = input.clone();
        xm.data_mut()[i] -= h;
        let numeric = (loss_at(&params, &xp) - loss_at(&params, &xm)) / (2.0 * h);
        let d = dx.data()[i] - numeric;
        diff_sq += d * d;
        num_sq += numeric * numeric;
    }
    let rel = diff_sq.sqrt() / num_sq.sqrt().max(1e-12);
    assert!(rel < 1e-6, "lstm input grad err {rel}");
}

struct BilstmHarness {
    fwd: LstmCellParams,
    bwd: LstmCellParams,
    input: Tensor,
    target: Tensor,
}

#[test]
fn bilstm_gradients_match_finite_differences() {
    let mut h = BilstmHarness {
        fwd: LstmCellParams::new(3, 2, 41),
        bwd: LstmCellParams::new(3, 2, 42),
        input: random_tensor(&[2, 5, 3], 43),
        target: random_tensor(&[2, 5, 4], 44),
    };
    let report = gradient_check(
        &mut h,
        |h| {
            let (out, _) = bilstm_forward(&h.input, &h.fwd, &h.bwd).unwrap();
            mse_loss(&out, &h.target).unwrap().0
        },
        |h| {
            for p in [&mut h.fwd, &mut h.bwd] {
                p.input_weights.zero_grad();
                p.recurrent_weights.zero_grad();
                p.bias.zero_grad();
            }
            let (out, cache) = bilstm_forward(&h.input, &h.fwd, &h.bwd).unwrap();
            let (_, dl) = mse_loss(&out, &h.target).unwrap();
            bilstm_backward(&mut h.fwd, &mut h.bwd, &cache, &dl).unwrap();
            vec![
                ("fwd.input".into(), h.fwd.input_weights.grad.data().to_vec()),
                ("fwd.rec".into(), h.fwd.recurrent_weights.grad.data().to_vec()),
                ("fwd.bias".into(), h.fwd.bias.grad.data().to_vec()),
                ("bwd.input".into(), h.bwd.input_weights.grad.data().to_vec()),
                ("bwd.rec".into(), h.bwd.recurrent_weights.grad.data().to_vec()),
                ("bwd.bias".into(), h.bwd.bias.grad.data().to_vec()),
            ]
        },
        |h| {
            vec![
                &mut h.fwd.input_weights.value,
                &mut h.fwd.recurrent_weights.value,
                &mut h.fwd.bias.value,
                &mut h.bwd.input_weights.value,
                &mut h.bwd.recurrent_weights.value,
                &mut h.bwd.bias.value,
            ]
        },
        &GradCheckConfig::default(),
    );
    assert!(report.max_rel_err < 1e-5, "bilstm err {}", report.max_rel_err);
}
