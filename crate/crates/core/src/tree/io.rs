//! JSON persistence and Graphviz export.
//!
//! The JSON document has the shape
//!
//! ```json
//! {"feature_names": ["x", "y"], "action_names": ["zero", "one"],
//!  "nodes": [{"type": "split", "feature": 0, "threshold": 0.5, "left": 1, "right": 2},
//!            {"type": "leaf", "output": [1.0, 0.0]},
//!            {"type": "leaf", "output": [0.0, 1.0]}]}
//! ```
//!
//! with node 0 as the root.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{argmax, DecisionTree, Node, PolicyMode, PolicyTree};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeDocument {
    pub feature_names: Vec<String>,
    pub action_names: Vec<String>,
    pub nodes: Vec<Node>,
}

fn default_names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}_{i}")).collect()
}

impl TreeDocument {
    /// Document for `tree`; empty name lists are filled with `f_j` / `a_c`.
    pub fn new(tree: &DecisionTree, feature_names: &[&str], action_names: &[&str]) -> Result<Self> {
        let feature_names = if feature_names.is_empty() {
            default_names("f", tree.n_features())
        } else {
            feature_names.iter().map(|s| s.to_string()).collect()
        };
        let action_names = if action_names.is_empty() {
            default_names("a", tree.n_outputs())
        } else {
            action_names.iter().map(|s| s.to_string()).collect()
        };
        if feature_names.len() != tree.n_features() {
            return Err(Error::DimensionMismatch {
                expected: tree.n_features(),
                got: feature_names.len(),
            });
        }
        if action_names.len() != tree.n_outputs() {
            return Err(Error::DimensionMismatch {
                expected: tree.n_outputs(),
                got: action_names.len(),
            });
        }
        Ok(Self {
            feature_names,
            action_names,
            nodes: tree.nodes().to_vec(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tree documents always serialize")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        serde_json::from_slice(bytes).map_err(|e| Error::MalformedInput(e.to_string()))
    }

    /// Validates the node list and rebuilds the tree.
    pub fn to_tree(&self) -> Result<DecisionTree> {
        let tree = DecisionTree::from_nodes(self.nodes.clone(), self.feature_names.len())?;
        if !self.action_names.is_empty() && self.action_names.len() != tree.n_outputs() {
            return Err(Error::MalformedInput(format!(
                "{} action names for {} leaf outputs",
                self.action_names.len(),
                tree.n_outputs()
            )));
        }
        Ok(tree)
    }

    pub fn to_policy(&self) -> Result<PolicyTree> {
        Ok(PolicyTree::from_tree(self.to_tree()?))
    }
}

impl DecisionTree {
    pub fn to_json(&self) -> String {
        TreeDocument::new(self, &[], &[])
            .expect("generated names always match")
            .to_json()
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        TreeDocument::from_json(bytes)?.to_tree()
    }
}

fn escape(label: &str) -> String {
    label.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz digraph of `tree`. Splits read `name ≤ threshold` (the
/// threshold printed with its exact round-trip representation); leaves show
/// the action name in deterministic mode and the probability vector
/// otherwise. Nodes are emitted in pre-order as `n0, n1, ...`.
pub fn to_dot(tree: &DecisionTree, feature_names: &[String], action_names: &[String], mode: PolicyMode) -> String {
    let mut out = String::from("digraph policy {\n    node [shape=box, fontname=\"Helvetica\"];\n");
    for (i, node) in tree.nodes().iter().enumerate() {
        match node {
            Node::Split { feature, threshold, .. } => {
                let name = feature_names.get(*feature).cloned().unwrap_or_else(|| format!("f_{feature}"));
                let _ = writeln!(out, "    n{i} [label=\"{} ≤ {threshold}\"];", escape(&name));
            }
            Node::Leaf { output } => {
                let label = match mode {
                    PolicyMode::Deterministic => {
                        let a = argmax(output);
                        action_names.get(a).cloned().unwrap_or_else(|| format!("a_{a}"))
                    }
                    PolicyMode::Stochastic => {
                        let parts: Vec<String> = output.iter().map(|p| format!("{p:.3}")).collect();
                        format!("[{}]", parts.join(", "))
                    }
                };
                let _ = writeln!(out, "    n{i} [label=\"{}\", shape=ellipse];", escape(&label));
            }
        }
    }
    for (i, node) in tree.nodes().iter().enumerate() {
        if let Node::Split { left, right, .. } = node {
            let _ = writeln!(out, "    n{i} -> n{left} [label=\"true\"];");
            let _ = writeln!(out, "    n{i} -> n{right} [label=\"false\"];");
        }
    }
    out.push_str("}\n");
    out
}
