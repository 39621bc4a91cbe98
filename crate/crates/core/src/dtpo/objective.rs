//! The tree surrogate objective: the advantage-weighted ratio between new
//! and behavior probabilities of the taken actions, written in terms of
//! logits so its gradient can shift the regression targets.

use ndarray::{Array2, ArrayView2};

/// Row-wise softmax, shifted by the row maximum.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// `mean_t σ(l_t)[a_t] / π_old(a_t | s_t) · Â_t`
pub fn ldt_objective(
    logits: ArrayView2<'_, f64>,
    actions: &[usize],
    behavior_probs: ArrayView2<'_, f64>,
    advantages: &[f64],
) -> f64 {
    let t_len = actions.len();
    if t_len == 0 {
        return 0.0;
    }
    let total: f64 = (0..t_len)
        .map(|t| {
            let row = logits.row(t);
            let p = softmax(row.as_slice().expect("contiguous rows"));
            let a = actions[t];
            p[a] / behavior_probs[[t, a]] * advantages[t]
        })
        .sum();
    total / t_len as f64
}

/// The same objective with the new probabilities given directly, one row
/// per step (used to compare whole trees on a batch).
pub fn ldt_of_probabilities<'a>(
    probs: impl IntoIterator<Item = &'a [f64]>,
    actions: &[usize],
    behavior_probs: ArrayView2<'_, f64>,
    advantages: &[f64],
) -> f64 {
    let t_len = actions.len();
    if t_len == 0 {
        return 0.0;
    }
    let total: f64 = probs
        .into_iter()
        .enumerate()
        .map(|(t, p)| {
            let a = actions[t];
            p[a] / behavior_probs[[t, a]] * advantages[t]
        })
        .sum();
    total / t_len as f64
}

/// Gradient of each step's summand with respect to its own logits:
/// `Â_t / π_old(a_t) · σ(l_t)[a_t] · (onehot(a_t) - σ(l_t))`. Rows are
/// independent; the `1/T` of the mean is not applied.
pub fn ldt_gradient(
    logits: ArrayView2<'_, f64>,
    actions: &[usize],
    behavior_probs: ArrayView2<'_, f64>,
    advantages: &[f64],
) -> Array2<f64> {
    let mut grad = Array2::<f64>::zeros(logits.raw_dim());
    for (t, mut row) in grad.rows_mut().into_iter().enumerate() {
        let p = softmax(logits.row(t).as_slice().expect("contiguous rows"));
        let a = actions[t];
        let scale = advantages[t] / behavior_probs[[t, a]] * p[a];
        for (c, g) in row.iter_mut().enumerate() {
            let indicator = if c == a { 1.0 } else { 0.0 };
            *g = scale * (indicator - p[c]);
        }
    }
    grad
}
