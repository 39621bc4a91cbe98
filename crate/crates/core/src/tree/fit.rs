//! Greedy multi-output regression tree learning.
//!
//! Splits minimise the size-weighted mean over outputs of the per-child
//! mean squared error, which is proportional to the summed squared error of
//! both children. Candidate thresholds are midpoints between consecutive
//! distinct feature values. Growth is best-first: the frontier leaf whose
//! best split removes the most squared error is expanded next, until the
//! leaf budget is spent or no frontier leaf can be split.

use ndarray::ArrayView2;

use super::{DecisionTree, Node};
use crate::error::{Error, Result};

/// Nodes whose targets all lie within this range are pure.
const PURITY_TOLERANCE: f64 = 1e-12;

/// Relative margin below which two costs count as tied.
const TIE_TOLERANCE: f64 = 1e-10;

/// `a` is below `b` by more than floating-point noise relative to the
/// magnitudes involved (`scale` sets a floor for values near zero).
pub(crate) fn clearly_less(a: f64, b: f64, scale: f64) -> bool {
    b - a > TIE_TOLERANCE * a.abs().max(b.abs()).max(scale)
}

#[derive(Debug, Clone)]
struct Split {
    feature: usize,
    threshold: f64,
    /// Parent squared error minus the children's.
    reduction: f64,
    parent_sse: f64,
}

enum Slot {
    Leaf { samples: Vec<usize> },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

struct Frontier {
    slot: usize,
    split: Option<Split>,
}

/// Fits a tree with at most `leaf_budget` leaves to targets `y` (one row per
/// sample of `x`). Leaves predict the column-wise mean of their targets.
pub fn fit_regression_tree(
    x: ArrayView2<'_, f64>,
    y: ArrayView2<'_, f64>,
    leaf_budget: usize,
) -> Result<DecisionTree> {
    // Reborrow so both views share one lifetime.
    let (x, y) = (x.view(), y.view());
    let (n, m) = x.dim();
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    if y.nrows() != n {
        return Err(Error::DimensionMismatch { expected: n, got: y.nrows() });
    }
    if y.ncols() == 0 {
        return Err(Error::DimensionMismatch { expected: 1, got: 0 });
    }
    if leaf_budget == 0 {
        return Err(Error::InvalidConfig("leaf budget must be positive".into()));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("features"));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("targets"));
    }

    let mut builder = Builder {
        x,
        y,
        slots: Vec::new(),
        sorted: Vec::with_capacity(n),
    };
    let root_samples: Vec<usize> = (0..n).collect();
    let root_split = if leaf_budget > 1 {
        builder.best_split(&root_samples)
    } else {
        None
    };
    builder.slots.push(Slot::Leaf { samples: root_samples });
    let mut frontier = vec![Frontier { slot: 0, split: root_split }];
    let mut leaves = 1;

    while leaves < leaf_budget {
        // Largest reduction first; ties go to the earliest created leaf,
        // which is the lowest position since the frontier is append-only.
        let mut chosen: Option<usize> = None;
        for (pos, f) in frontier.iter().enumerate() {
            let Some(split) = &f.split else { continue };
            let better = match chosen {
                None => true,
                Some(c) => {
                    let best = frontier[c].split.as_ref().expect("chosen has a split");
                    clearly_less(-split.reduction, -best.reduction, split.parent_sse.max(best.parent_sse))
                }
            };
            if better {
                chosen = Some(pos);
            }
        }
        let Some(pos) = chosen else { break };
        let entry = frontier.remove(pos);
        let split = entry.split.expect("chosen has a split");

        let Slot::Leaf { samples } =
            std::mem::replace(&mut builder.slots[entry.slot], Slot::Leaf { samples: Vec::new() })
        else {
            unreachable!("frontier holds leaves only")
        };
        let (left, right): (Vec<usize>, Vec<usize>) = samples
            .iter()
            .partition(|&&i| x[[i, split.feature]] <= split.threshold);
        leaves += 1;

        let expand = leaves < leaf_budget;
        let left_split = if expand { builder.best_split(&left) } else { None };
        let right_split = if expand { builder.best_split(&right) } else { None };
        let left_slot = builder.slots.len();
        builder.slots.push(Slot::Leaf { samples: left });
        let right_slot = builder.slots.len();
        builder.slots.push(Slot::Leaf { samples: right });
        builder.slots[entry.slot] = Slot::Split {
            feature: split.feature,
            threshold: split.threshold,
            left: left_slot,
            right: right_slot,
        };
        frontier.push(Frontier { slot: left_slot, split: left_split });
        frontier.push(Frontier { slot: right_slot, split: right_split });
    }

    let nodes = builder
        .slots
        .iter()
        .map(|slot| match slot {
            Slot::Leaf { samples } => Node::Leaf { output: builder.mean(samples) },
            Slot::Split { feature, threshold, left, right } => Node::Split {
                feature: *feature,
                threshold: *threshold,
                left: *left,
                right: *right,
            },
        })
        .collect();
    DecisionTree::from_nodes(nodes, m)
}

struct Builder<'a> {
    x: ArrayView2<'a, f64>,
    y: ArrayView2<'a, f64>,
    slots: Vec<Slot>,
    sorted: Vec<usize>,
}

impl Builder<'_> {
    /// Column means, summed in sample order.
    fn mean(&self, samples: &[usize]) -> Vec<f64> {
        let k = self.y.ncols();
        let mut sums = vec![0.0; k];
        for &i in samples {
            for (c, s) in sums.iter_mut().enumerate() {
                *s += self.y[[i, c]];
            }
        }
        let n = samples.len() as f64;
        sums.into_iter().map(|s| s / n).collect()
    }

    fn is_pure(&self, samples: &[usize]) -> bool {
        (0..self.y.ncols()).all(|c| {
            let (lo, hi) = samples.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                let v = self.y[[i, c]];
                (lo.min(v), hi.max(v))
            });
            hi - lo <= PURITY_TOLERANCE
        })
    }

    /// Best `(feature, threshold)` for `samples`, or `None` when the node
    /// must stay a leaf (single sample, pure, or no separating threshold).
    fn best_split(&mut self, samples: &[usize]) -> Option<Split> {
        let n = samples.len();
        if n < 2 || self.is_pure(samples) {
            return None;
        }
        let k = self.y.ncols();
        // Centre the targets on the node mean to limit cancellation in the
        // running sum-of-squares.
        let mean = self.mean(samples);
        let mut total_sum = vec![0.0; k];
        let mut total_sq = vec![0.0; k];
        for &i in samples {
            for c in 0..k {
                let v = self.y[[i, c]] - mean[c];
                total_sum[c] += v;
                total_sq[c] += v * v;
            }
        }
        let parent_sse: f64 = (0..k)
            .map(|c| total_sq[c] - total_sum[c] * total_sum[c] / n as f64)
            .sum();

        let mut best: Option<(usize, f64, f64)> = None;
        let mut left_sum = vec![0.0; k];
        let mut left_sq = vec![0.0; k];
        for feature in 0..self.x.ncols() {
            self.sorted.clear();
            self.sorted.extend_from_slice(samples);
            let x = self.x;
            self.sorted
                .sort_by(|&a, &b| x[[a, feature]].total_cmp(&x[[b, feature]]).then(a.cmp(&b)));
            left_sum.iter_mut().for_each(|v| *v = 0.0);
            left_sq.iter_mut().for_each(|v| *v = 0.0);

            for pos in 0..n - 1 {
                let i = self.sorted[pos];
                for c in 0..k {
                    let v = self.y[[i, c]] - mean[c];
                    left_sum[c] += v;
                    left_sq[c] += v * v;
                }
                let lo = x[[i, feature]];
                let hi = x[[self.sorted[pos + 1], feature]];
                if lo == hi {
                    continue;
                }
                let n_left = (pos + 1) as f64;
                let n_right = (n - pos - 1) as f64;
                let mut cost = 0.0;
                for c in 0..k {
                    let right_sum = total_sum[c] - left_sum[c];
                    let right_sq = total_sq[c] - left_sq[c];
                    cost += left_sq[c] - left_sum[c] * left_sum[c] / n_left;
                    cost += right_sq - right_sum * right_sum / n_right;
                }
                let better = match best {
                    None => true,
                    Some((_, _, best_cost)) => clearly_less(cost, best_cost, parent_sse),
                };
                if better {
                    best = Some((feature, midpoint(lo, hi), cost));
                }
            }
        }
        best.map(|(feature, threshold, cost)| Split {
            feature,
            threshold,
            reduction: (parent_sse - cost).max(0.0),
            parent_sse,
        })
    }
}

/// Size-weighted mean over outputs of each child's mean squared error.
pub fn split_gain(y: ArrayView2<'_, f64>, left: &[usize], right: &[usize]) -> f64 {
    let k = y.ncols() as f64;
    let total = (left.len() + right.len()) as f64;
    let child = |rows: &[usize]| -> f64 {
        if rows.is_empty() {
            return 0.0;
        }
        let n = rows.len() as f64;
        let per_output: f64 = (0..y.ncols())
            .map(|c| {
                let mean = rows.iter().map(|&i| y[[i, c]]).sum::<f64>() / n;
                rows.iter().map(|&i| (y[[i, c]] - mean).powi(2)).sum::<f64>() / n
            })
            .sum();
        n / total * per_output / k
    };
    child(left) + child(right)
}

/// Midpoint of two consecutive distinct values that still separates them.
pub(crate) fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo + (hi - lo) / 2.0;
    if mid >= hi || !mid.is_finite() {
        lo
    } else {
        mid
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn train_mse(tree: &DecisionTree, x: &ndarray::Array2<f64>, y: &ndarray::Array2<f64>) -> f64 {
        let mut total = 0.0;
        for (xr, yr) in x.rows().into_iter().zip(y.rows()) {
            let p = tree.predict(xr.as_slice().unwrap()).unwrap();
            total += p.iter().zip(yr.iter()).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        }
        total / (x.nrows() * y.ncols()) as f64
    }

    #[test]
    fn separable_two_points() {
        let x = array![[0.0], [1.0]];
        let y = array![[0.0], [1.0]];
        let tree = fit_regression_tree(x.view(), y.view(), 2).unwrap();
        let Node::Split { threshold, .. } = tree.nodes()[0] else { panic!("expected split") };
        assert!((0.0..1.0).contains(&threshold));
        assert_eq!(tree.predict(&[0.0]).unwrap(), &[0.0]);
        assert_eq!(tree.predict(&[1.0]).unwrap(), &[1.0]);
        assert_eq!(train_mse(&tree, &x, &y), 0.0);
    }

    #[test]
    fn hand_evaluated_gain() {
        // Targets (0, 2, 1) split as {0, 2} | {1} (x <= 1.5): the left child
        // has mean 1 and MSE 1, the right child MSE 0.
        let y = array![[0.0], [2.0], [1.0]];
        assert!((split_gain(y.view(), &[0, 1], &[2]) - 2.0 / 3.0).abs() < 1e-15);

        // The other candidate, x <= 0.5, gives {0} | {2, 1} with G = 1/6,
        // so the learner picks v = 0.5.
        assert!((split_gain(y.view(), &[0], &[1, 2]) - 1.0 / 6.0).abs() < 1e-15);
        let x = array![[0.0], [1.0], [2.0]];
        let tree = fit_regression_tree(x.view(), y.view(), 2).unwrap();
        let Node::Split { threshold, .. } = tree.nodes()[0] else { panic!("expected split") };
        assert_eq!(threshold, 0.5);
    }

    #[test]
    fn budget_one_is_global_mean() {
        let x = array![[0.0], [1.0], [2.0], [3.0]];
        let y = array![[1.0, 0.0], [3.0, 0.0], [5.0, 1.0], [7.0, 1.0]];
        let tree = fit_regression_tree(x.view(), y.view(), 1).unwrap();
        assert_eq!(tree.leaf_count(), 1);
        assert_eq!(tree.predict(&[10.0]).unwrap(), &[4.0, 0.5]);
    }

    #[test]
    fn pure_targets_stay_a_leaf() {
        let x = array![[0.0], [1.0], [2.0]];
        let y = array![[0.3], [0.3], [0.3]];
        let tree = fit_regression_tree(x.view(), y.view(), 8).unwrap();
        assert_eq!(tree.leaf_count(), 1);
    }

    #[test]
    fn constant_features_stay_a_leaf() {
        let x = array![[1.0, 2.0], [1.0, 2.0], [1.0, 2.0]];
        let y = array![[0.0], [1.0], [2.0]];
        let tree = fit_regression_tree(x.view(), y.view(), 8).unwrap();
        assert_eq!(tree.leaf_count(), 1);
        assert_eq!(tree.predict(&[0.0, 0.0]).unwrap(), &[1.0]);
    }

    #[test]
    fn best_first_spends_budget_on_largest_reduction() {
        // Right half has a big jump, left half a small one; with 3 leaves the
        // second split must go right.
        let x = array![[0.0], [1.0], [2.0], [3.0], [10.0], [11.0], [12.0], [13.0]];
        let y = array![[0.0], [0.0], [0.1], [0.1], [5.0], [5.0], [9.0], [9.0]];
        let tree = fit_regression_tree(x.view(), y.view(), 3).unwrap();
        assert_eq!(tree.leaf_count(), 3);
        assert_eq!(tree.predict(&[11.0]).unwrap(), &[5.0]);
        assert_eq!(tree.predict(&[12.0]).unwrap(), &[9.0]);
        assert!((tree.predict(&[0.0]).unwrap()[0] - 0.05).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let empty = ndarray::Array2::<f64>::zeros((0, 2));
        let y = ndarray::Array2::<f64>::zeros((0, 1));
        assert_eq!(fit_regression_tree(empty.view(), y.view(), 2).unwrap_err(), Error::EmptyDataset);
        let x = array![[0.0], [1.0]];
        let y = array![[0.0]];
        assert_eq!(
            fit_regression_tree(x.view(), y.view(), 2).unwrap_err(),
            Error::DimensionMismatch { expected: 2, got: 1 }
        );
        let y = array![[0.0], [f64::NAN]];
        assert!(fit_regression_tree(x.view(), y.view(), 2).is_err());
    }

    #[test]
    fn midpoint_of_adjacent_floats() {
        let lo = 1.0f64;
        let hi = f64::from_bits(lo.to_bits() + 1);
        let m = midpoint(lo, hi);
        assert!(lo <= m && m < hi);
        assert_eq!(midpoint(0.0, 1.0), 0.5);
    }
}
