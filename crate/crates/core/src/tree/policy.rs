use serde::{Deserialize, Serialize};

use super::{DecisionTree, Node};
use crate::error::Result;

/// Leaf probability vectors must sum to one within this tolerance.
pub const PROBABILITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyMode {
    Stochastic,
    Deterministic,
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// A decision tree whose leaves are action distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyTree {
    tree: DecisionTree,
    mode: PolicyMode,
}

impl PolicyTree {
    /// One leaf assigning probability `1 / n_actions` to every action.
    pub fn uniform(n_features: usize, n_actions: usize) -> Self {
        let p = 1.0 / n_actions as f64;
        Self {
            tree: DecisionTree::leaf(n_features, vec![p; n_actions]),
            mode: PolicyMode::Stochastic,
        }
    }

    /// Wraps a tree, classifying it as deterministic when every leaf is
    /// one-hot.
    pub fn from_tree(tree: DecisionTree) -> Self {
        let one_hot = tree.nodes().iter().all(|n| match n {
            Node::Leaf { output } => {
                output.iter().all(|&v| v == 0.0 || v == 1.0) && output.iter().sum::<f64>() == 1.0
            }
            Node::Split { .. } => true,
        });
        let mode = if one_hot { PolicyMode::Deterministic } else { PolicyMode::Stochastic };
        Self { tree, mode }
    }

    /// Wraps a tree whose leaves are distributions, keeping it stochastic
    /// even if every leaf happens to be one-hot.
    pub fn stochastic(tree: DecisionTree) -> Self {
        Self {
            tree,
            mode: PolicyMode::Stochastic,
        }
    }

    pub fn tree(&self) -> &DecisionTree {
        &self.tree
    }

    pub fn into_tree(self) -> DecisionTree {
        self.tree
    }

    pub fn mode(&self) -> PolicyMode {
        self.mode
    }

    pub fn n_actions(&self) -> usize {
        self.tree.n_outputs()
    }

    pub fn n_features(&self) -> usize {
        self.tree.n_features()
    }

    pub fn leaf_count(&self) -> usize {
        self.tree.leaf_count()
    }

    /// True when every leaf is a probability vector.
    pub fn is_valid_distribution(&self) -> bool {
        self.tree.nodes().iter().all(|n| match n {
            Node::Leaf { output } => {
                output.iter().all(|&v| v >= 0.0)
                    && (output.iter().sum::<f64>() - 1.0).abs() <= PROBABILITY_TOLERANCE
            }
            Node::Split { .. } => true,
        })
    }

    pub fn probabilities(&self, observation: &[f64]) -> Result<&[f64]> {
        self.tree.predict(observation)
    }

    pub(crate) fn probabilities_unchecked(&self, observation: &[f64]) -> &[f64] {
        self.tree.predict_unchecked(observation)
    }

    /// Most probable action at `observation`.
    pub fn act(&self, observation: &[f64]) -> Result<usize> {
        Ok(argmax(self.probabilities(observation)?))
    }

    /// Puts all probability mass of every leaf on its most probable action.
    pub fn determinize(&self) -> PolicyTree {
        let tree = self.tree.map_leaves(|p| {
            let mut one_hot = vec![0.0; p.len()];
            one_hot[argmax(p)] = 1.0;
            one_hot
        });
        PolicyTree {
            tree,
            mode: PolicyMode::Deterministic,
        }
    }

    /// Collapses every split whose children are leaves with the same argmax
    /// action into a single leaf (carrying the left child's output), bottom
    /// up until no such split remains. The greedy action is unchanged for
    /// every input.
    pub fn merge_redundant(&self) -> PolicyTree {
        fn collapse(nodes: &[Node], i: usize, out: &mut Vec<Node>) -> usize {
            let slot = out.len();
            match &nodes[i] {
                Node::Leaf { output } => {
                    out.push(Node::Leaf { output: output.clone() });
                }
                Node::Split { feature, threshold, left, right } => {
                    out.push(Node::Leaf { output: Vec::new() });
                    let l = collapse(nodes, *left, out);
                    let r = collapse(nodes, *right, out);
                    let merged = match (&out[l], &out[r]) {
                        (Node::Leaf { output: a }, Node::Leaf { output: b }) if argmax(a) == argmax(b) => {
                            Some(a.clone())
                        }
                        _ => None,
                    };
                    match merged {
                        Some(output) => {
                            out.truncate(slot);
                            out.push(Node::Leaf { output });
                        }
                        None => {
                            out[slot] = Node::Split {
                                feature: *feature,
                                threshold: *threshold,
                                left: l,
                                right: r,
                            };
                        }
                    }
                }
            }
            slot
        }

        let mut nodes = Vec::with_capacity(self.tree.node_count());
        collapse(self.tree.nodes(), 0, &mut nodes);
        let tree = DecisionTree::from_nodes(nodes, self.tree.n_features())
            .expect("collapsing a valid tree yields a valid tree");
        PolicyTree { tree, mode: self.mode }
    }
}
