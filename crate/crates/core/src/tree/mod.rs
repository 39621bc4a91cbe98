//! Binary decision trees with axis-aligned threshold splits and
//! vector-valued leaves.
//!
//! A sample is routed left iff `x[feature] <= threshold`. The same structure
//! serves as a generic multi-output regressor ([`DecisionTree`]) and, with
//! probability-vector leaves, as a policy ([`PolicyTree`]).

mod fit;
pub mod io;
mod policy;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fit::{fit_regression_tree, split_gain};
pub use io::{to_dot, TreeDocument};
pub use policy::{argmax, PolicyMode, PolicyTree};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        output: Vec<f64>,
    },
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        matches!(self, Node::Leaf { .. })
    }
}

/// Flat node array, root at index 0, stored in pre-order.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    nodes: Vec<Node>,
    n_features: usize,
    n_outputs: usize,
}

impl DecisionTree {
    /// Single leaf predicting `output` for any input of `n_features` values.
    pub fn leaf(n_features: usize, output: Vec<f64>) -> Self {
        let n_outputs = output.len();
        Self {
            nodes: vec![Node::Leaf { output }],
            n_features,
            n_outputs,
        }
    }

    /// Builds a tree from raw nodes, checking that they form a single binary
    /// tree rooted at index 0 with consistent leaf widths. Nodes are
    /// renumbered into pre-order.
    pub fn from_nodes(nodes: Vec<Node>, n_features: usize) -> Result<Self> {
        let malformed = |msg: String| Err(Error::MalformedInput(msg));
        if nodes.is_empty() {
            return malformed("tree has no nodes".into());
        }
        let mut n_outputs = None;
        for (i, node) in nodes.iter().enumerate() {
            match node {
                Node::Split { feature, threshold, left, right } => {
                    if *feature >= n_features {
                        return malformed(format!(
                            "node {i} splits on feature {feature} but only {n_features} features exist"
                        ));
                    }
                    if !threshold.is_finite() {
                        return malformed(format!("node {i} has a non-finite threshold"));
                    }
                    for child in [left, right] {
                        if *child >= nodes.len() {
                            return malformed(format!("node {i} references missing child {child}"));
                        }
                        if *child == 0 {
                            return malformed(format!("node {i} references the root as a child"));
                        }
                    }
                }
                Node::Leaf { output } => {
                    if output.is_empty() {
                        return malformed(format!("leaf {i} has an empty output"));
                    }
                    if output.iter().any(|v| !v.is_finite()) {
                        return malformed(format!("leaf {i} has a non-finite output"));
                    }
                    match n_outputs {
                        None => n_outputs = Some(output.len()),
                        Some(k) if k != output.len() => {
                            return malformed(format!(
                                "leaf {i} has {} outputs, expected {k}",
                                output.len()
                            ))
                        }
                        Some(_) => {}
                    }
                }
            }
        }
        let Some(n_outputs) = n_outputs else {
            return malformed("tree has no leaves".into());
        };

        // Pre-order walk; every node must be reached exactly once.
        let mut seen = vec![false; nodes.len()];
        let mut order = Vec::with_capacity(nodes.len());
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            if seen[i] {
                return malformed(format!("node {i} is reachable along more than one path"));
            }
            seen[i] = true;
            order.push(i);
            if let Node::Split { left, right, .. } = &nodes[i] {
                stack.push(*right);
                stack.push(*left);
            }
        }
        if let Some(orphan) = seen.iter().position(|s| !s) {
            return malformed(format!("node {orphan} is not reachable from the root"));
        }

        let mut new_index = vec![0usize; nodes.len()];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        let renumbered = order
            .iter()
            .map(|&old| match &nodes[old] {
                Node::Split { feature, threshold, left, right } => Node::Split {
                    feature: *feature,
                    threshold: *threshold,
                    left: new_index[*left],
                    right: new_index[*right],
                },
                leaf => leaf.clone(),
            })
            .collect();
        Ok(Self {
            nodes: renumbered,
            n_features,
            n_outputs,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_outputs(&self) -> usize {
        self.n_outputs
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    /// Index of the leaf reached by `x`. Does not check the input length.
    pub fn leaf_index(&self, x: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { .. } => return i,
                Node::Split { feature, threshold, left, right } => {
                    i = if x[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    /// Output vector of the leaf reached by `x`.
    pub fn predict(&self, x: &[f64]) -> Result<&[f64]> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                got: x.len(),
            });
        }
        Ok(self.predict_unchecked(x))
    }

    pub(crate) fn predict_unchecked(&self, x: &[f64]) -> &[f64] {
        match &self.nodes[self.leaf_index(x)] {
            Node::Leaf { output } => output,
            Node::Split { .. } => unreachable!("leaf_index returns leaves"),
        }
    }

    /// Applies `f` to every leaf output, keeping the structure.
    pub fn map_leaves(&self, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> Self {
        let nodes: Vec<Node> = self
            .nodes
            .iter()
            .map(|n| match n {
                Node::Leaf { output } => Node::Leaf { output: f(output) },
                split => split.clone(),
            })
            .collect();
        let n_outputs = nodes
            .iter()
            .find_map(|n| match n {
                Node::Leaf { output } => Some(output.len()),
                _ => None,
            })
            .unwrap_or(self.n_outputs);
        Self {
            nodes,
            n_features: self.n_features,
            n_outputs,
        }
    }
}
