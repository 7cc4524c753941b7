use super::Parameter;

/// Adam hyperparameters. Defaults: lr 0.001, betas (0.9, 0.999), eps 1e-8.
#[derive(Clone, Copy, Debug)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// One bias-corrected Adam update over a parameter set. Moments and
/// `step_count` advance, then gradients are zeroed.
pub fn adam_step(params: &mut [&mut Parameter], cfg: &AdamConfig) {
    for p in params.iter_mut() {
        p.step_count += 1;
        let t = p.step_count as i32;
        let bc1 = 1.0 - cfg.beta1.powi(t);
        let bc2 = 1.0 - cfg.beta2.powi(t);
        let value = p.value.data_mut();
        let grad = p.grad.data_mut();
        let m = p.m.data_mut();
        let v = p.v.data_mut();
        for i in 0..value.len() {
            let g = grad[i];
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
            let m_hat = m[i] / bc1;
            let v_hat = v[i] / bc2;
            value[i] -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
        }
        grad.fill(0.0);
    }
}
