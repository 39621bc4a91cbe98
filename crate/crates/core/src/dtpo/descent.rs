//! Incremental regression-tree descent on a differentiable loss.
//!
//! Each round fits a fresh tree to the previous tree's predictions moved
//! one step against the loss gradient, so the new tree replaces (rather
//! than adds to) the model. The best tree seen is returned.

use ndarray::{Array2, ArrayView2};

use crate::error::Result;
use crate::tree::{fit_regression_tree, DecisionTree};

/// A loss over a full `n x k` prediction matrix, to be minimised.
pub trait DifferentiableLoss {
    fn value(&self, predictions: ArrayView2<'_, f64>) -> f64;

    fn gradient(&self, predictions: ArrayView2<'_, f64>) -> Array2<f64>;
}

#[derive(Debug, Clone)]
pub struct DescentOutcome {
    pub tree: DecisionTree,
    pub best_loss: f64,
    /// Loss of every fitted tree, starting with the initial one.
    pub losses: Vec<f64>,
}

pub fn predict_all(tree: &DecisionTree, x: ArrayView2<'_, f64>) -> Array2<f64> {
    let mut out = Array2::<f64>::zeros((x.nrows(), tree.n_outputs()));
    for (i, row) in x.rows().into_iter().enumerate() {
        let features = row.to_vec();
        let p = tree.predict_unchecked(&features);
        out.row_mut(i).assign(&ndarray::ArrayView1::from(p));
    }
    out
}

/// Fits `T_0` to `initial`, then for `iterations` rounds fits
/// `T_i(X) ≈ Y_{i-1} - η ∇L(Y_{i-1})` where `Y_{i-1}` are the predictions
/// of `T_{i-1}`. Returns the tree with the lowest loss of its own
/// predictions (earliest on ties).
pub fn incremental_tree_descent(
    x: ArrayView2<'_, f64>,
    initial: ArrayView2<'_, f64>,
    loss: &dyn DifferentiableLoss,
    learning_rate: f64,
    iterations: usize,
    leaf_budget: usize,
) -> Result<DescentOutcome> {
    let mut tree = fit_regression_tree(x, initial, leaf_budget)?;
    let mut predictions = predict_all(&tree, x);
    let mut best_loss = loss.value(predictions.view());
    let mut best = tree.clone();
    let mut losses = vec![best_loss];

    for _ in 0..iterations {
        let grad = loss.gradient(predictions.view());
        let targets = &predictions - &(grad * learning_rate);
        tree = fit_regression_tree(x, targets.view(), leaf_budget)?;
        predictions = predict_all(&tree, x);
        let value = loss.value(predictions.view());
        losses.push(value);
        if value < best_loss {
            best_loss = value;
            best = tree.clone();
        }
    }
    Ok(DescentOutcome {
        tree: best,
        best_loss,
        losses,
    })
}
