//! Decision Tree Policy Optimization.
//!
//! Trains a single crisp decision tree as a reinforcement learning policy by
//! repeatedly refitting a multi-output regression tree to action
//! probabilities shifted along the policy gradient. A small MLP critic
//! supplies advantage estimates.
//!
//! The crate is organised as:
//!
//! - [`env`]: the environment contract and the bundled control / grid tasks
//! - [`tree`]: greedy multi-output regression trees, policy trees, JSON/DOT I/O
//! - [`advantage`]: generalized advantage estimation
//! - [`critic`]: MLP value function, Adam, clipped value loss
//! - [`dtpo`]: the training loop and the incremental tree-descent primitive
//! - [`eval`]: deterministic policy evaluation

pub mod advantage;
pub mod critic;
pub mod dtpo;
pub mod env;
pub mod error;
pub mod eval;
pub mod rng;
pub mod tree;

pub use advantage::{compute_gae, normalize, AdvantageSet, RolloutBatch};
pub use critic::{AdamState, CriticNet};
pub use dtpo::{train, train_with, IterationMetrics, TrainConfig, TrainOutcome};
pub use env::{EnvKind, EnvSpec, Environment, Observation, StepResult};
pub use error::{Error, Result};
pub use eval::{evaluate, EvalReport};
pub use tree::{DecisionTree, Node, PolicyMode, PolicyTree};
