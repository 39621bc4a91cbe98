//! Greedy evaluation of policy trees over independent episodes.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::{EnvKind, Environment};
use crate::error::{Error, Result};
use crate::rng::{seeded, Rng};
use crate::tree::{argmax, PolicyTree};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Undiscounted return of each rollout, in rollout order.
    pub returns: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation over `sqrt(rollouts)`.
    pub stderr: f64,
    pub rollouts: usize,
    pub seed: u64,
}

impl EvalReport {
    pub const CSV_HEADER: &'static str = "rollouts,seed,mean,stderr";

    pub fn from_returns(returns: Vec<f64>, seed: u64) -> Self {
        let (mean, stderr) = mean_and_stderr(&returns);
        Self {
            rollouts: returns.len(),
            returns,
            mean,
            stderr,
            seed,
        }
    }

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{}", self.rollouts, self.seed, self.mean, self.stderr)
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2} ± {:.2}", self.mean, self.stderr)
    }
}

/// Mean and standard error (sample std with `n - 1`, over `sqrt(n)`).
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Plays one full episode with the most probable action at every step and
/// returns the undiscounted return.
pub fn run_episode(env: &mut dyn Environment, policy: &PolicyTree, rng: &mut Rng) -> Result<f64> {
    let mut obs = env.reset(rng);
    let mut total = 0.0;
    loop {
        let action = argmax(policy.probabilities(&obs)?);
        let step = env.step(action, rng)?;
        total += step.reward;
        if step.done() {
            return Ok(total);
        }
        obs = step.observation;
    }
}

/// Evaluates `policy` greedily on `rollouts` episodes. Rollout `i` runs on
/// its own generator derived from `(seed, i)`, so the report does not
/// depend on how rollouts are scheduled across threads.
pub fn evaluate(kind: EnvKind, policy: &PolicyTree, rollouts: usize, seed: u64) -> Result<EvalReport> {
    let spec = kind.spec();
    if policy.n_features() != spec.feature_count {
        return Err(Error::DimensionMismatch {
            expected: spec.feature_count,
            got: policy.n_features(),
        });
    }
    if policy.n_actions() != spec.action_count {
        return Err(Error::DimensionMismatch {
            expected: spec.action_count,
            got: policy.n_actions(),
        });
    }
    let returns = (0..rollouts)
        .into_par_iter()
        .map(|i| {
            let mut env = kind.make();
            let mut rng = seeded(seed, i as u64);
            run_episode(env.as_mut(), policy, &mut rng)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(EvalReport::from_returns(returns, seed))
}
