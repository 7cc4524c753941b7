//! Central finite-difference verification of analytic gradients.
//!
//! The numeric side only ever calls the forward/loss path, so it stays
//! independent of the backward code it checks. Errors are reported per
//! parameter tensor as `|analytic - numeric| / max(|numeric|, tiny)` over
//! the checked coordinates (Euclidean norms), which makes a uniformly
//! doubled gradient read as an error of 1.

use rand::seq::SliceRandom;

use super::init::seeded_rng;
use super::Tensor;

#[derive(Clone, Copy, Debug)]
pub struct GradCheckConfig {
    /// Central-difference step.
    pub step: f64,
    /// Above this many coordinates per tensor, check a seeded subsample.
    pub max_coords: usize,
    pub seed: u64,
}

impl Default for GradCheckConfig {
    fn default() -> Self {
        GradCheckConfig {
            step: 1e-6,
            max_coords: 10_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GradCheckReport {
    pub max_rel_err: f64,
    pub worst_param: String,
    pub coords_checked: usize,
    pub per_param: Vec<(String, f64)>,
}

/// Checks analytic gradients of a scalar loss against central finite
/// differences.
///
/// * `loss` evaluates the forward path at the current parameter values.
/// * `analytic_grads` computes and returns the gradients `(name, grad)` in a
///   fixed order (it must not leave stale gradient state behind).
/// * `params` returns mutable handles on the parameter value tensors, in the
///   same order as `analytic_grads`.
pub fn gradient_check<M>(
    model: &mut M,
    loss: impl Fn(&mut M) -> f64,
    analytic_grads: impl Fn(&mut M) -> Vec<(String, Vec<f64>)>,
    params: impl Fn(&mut M) -> Vec<&mut Tensor>,
    cfg: &GradCheckConfig,
) -> GradCheckReport {
    let grads = analytic_grads(model);
    let mut rng = seeded_rng(cfg.seed);
    let mut per_param = Vec::with_capacity(grads.len());
    let mut coords_checked = 0;

    for (pi, (name, grad)) in grads.iter().enumerate() {
        let n = grad.len();
        let coords: Vec<usize> = if n <= cfg.max_coords {
            (0..n).collect()
        } else {
            let mut all: Vec<usize> = (0..n).collect();
            all.shuffle(&mut rng);
            all.truncate(cfg.max_coords);
            all.sort_unstable();
            all
        };
        let mut diff_sq = 0.0;
        let mut num_sq = 0.0;
        for &ci in &coords {
            {
                let mut ps = params(model);
                ps[pi].data_mut()[ci] += cfg.step;
            }
            let lp = loss(model);
            {
                let mut ps = params(model);
                ps[pi].data_mut()[ci] -= 2.0 * cfg.step;
            }
            let lm = loss(model);
            {
                let mut ps = params(model);
                ps[pi].data_mut()[ci] += cfg.step;
            }
            let numeric = (lp - lm) / (2.0 * cfg.step);
            let d = grad[ci] - numeric;
            diff_sq += d * d;
            num_sq += numeric * numeric;
        }
        coords_checked += coords.len();
        let rel = diff_sq.sqrt() / num_sq.sqrt().max(1e-12);
        per_param.push((name.clone(), rel));
    }

    let (worst_param, max_rel_err) = per_param
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(n, e)| (n.clone(), *e))
        .unwrap_or_default();
    GradCheckReport {
        max_rel_err,
        worst_param,
        coords_checked,
        per_param,
    }
}
