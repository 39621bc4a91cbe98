//! Generalized advantage estimation over a batch of consecutive steps.

use ndarray::Array2;

/// Standard deviations below this make [`normalize`] return zeros.
pub const MIN_STD: f64 = 1e-8;

/// `T` consecutive environment steps collected under one policy. Episodes
/// are concatenated; a step with `terminated` or `truncated` set is the
/// last of its episode.
#[derive(Debug, Clone, PartialEq)]
pub struct RolloutBatch {
    /// `T x m`
    pub observations: Array2<f64>,
    pub actions: Vec<usize>,
    pub rewards: Vec<f64>,
    pub terminated: Vec<bool>,
    pub truncated: Vec<bool>,
    /// `T x n`: the distribution each action was sampled from.
    pub behavior_probs: Array2<f64>,
    /// Critic values `V(s_0) .. V(s_T)`; `V(s_T)` bootstraps the unfinished
    /// final episode.
    pub values: Vec<f64>,
    /// Critic value of the state actually reached by step `t`. Equal to
    /// `values[t + 1]` except at episode ends, where `values[t + 1]` belongs
    /// to the next episode's first state.
    pub next_values: Vec<f64>,
    /// Undiscounted returns of the episodes that finished inside the batch.
    pub episode_returns: Vec<f64>,
}

impl RolloutBatch {
    pub fn len(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rewards.is_empty()
    }

    pub fn done(&self, t: usize) -> bool {
        self.terminated[t] || self.truncated[t]
    }
}

/// Backward-recursive GAE. With `δ_t = r_t + γ V(s_{t+1}) (1 - terminated_t) - V(s_t)`,
/// returns `Â_t = δ_t + γλ (1 - done_t) Â_{t+1}` with `Â_T = 0`. Truncated
/// steps keep their bootstrap term but stop the recursion.
pub fn compute_gae(batch: &RolloutBatch, gamma: f64, lambda: f64) -> Vec<f64> {
    gae(
        &batch.rewards,
        &batch.values[..batch.len()],
        &batch.next_values,
        &batch.terminated,
        &batch.truncated,
        gamma,
        lambda,
    )
}

/// [`compute_gae`] over bare slices, all of length `T`.
pub fn gae(
    rewards: &[f64],
    values: &[f64],
    next_values: &[f64],
    terminated: &[bool],
    truncated: &[bool],
    gamma: f64,
    lambda: f64,
) -> Vec<f64> {
    let t_len = rewards.len();
    let mut advantages = vec![0.0; t_len];
    let mut running = 0.0;
    for t in (0..t_len).rev() {
        let bootstrap = if terminated[t] { 0.0 } else { gamma * next_values[t] };
        let delta = rewards[t] + bootstrap - values[t];
        let carry = if terminated[t] || truncated[t] { 0.0 } else { gamma * lambda * running };
        running = delta + carry;
        advantages[t] = running;
    }
    advantages
}

/// Shifts and scales to zero mean and unit (population) variance. Inputs
/// with a standard deviation below [`MIN_STD`] map to zeros.
pub fn normalize(raw: &[f64]) -> Vec<f64> {
    if raw.is_empty() {
        return Vec::new();
    }
    let n = raw.len() as f64;
    let mean = raw.iter().sum::<f64>() / n;
    let var = raw.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    if std < MIN_STD {
        return vec![0.0; raw.len()];
    }
    raw.iter().map(|v| (v - mean) / std).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdvantageSet {
    pub raw: Vec<f64>,
    pub normalized: Vec<f64>,
    /// `raw + V(s_t)`: regression targets for the critic.
    pub value_targets: Vec<f64>,
}

impl AdvantageSet {
    pub fn from_batch(batch: &RolloutBatch, gamma: f64, lambda: f64) -> Self {
        let raw = compute_gae(batch, gamma, lambda);
        let normalized = normalize(&raw);
        let value_targets = raw.iter().zip(&batch.values).map(|(a, v)| a + v).collect();
        Self {
            raw,
            normalized,
            value_targets,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(rewards: &[f64], gamma: f64, lambda: f64) -> Vec<f64> {
        let n = rewards.len();
        let zeros = vec![0.0; n];
        let flags = vec![false; n];
        gae(rewards, &zeros, &zeros, &flags, &flags, gamma, lambda)
    }

    #[test]
    fn single_step() {
        assert_eq!(run(&[1.0], 0.99, 0.95), vec![1.0]);
    }

    #[test]
    fn two_steps_hand_computed() {
        // Â_1 = δ_1 = 1, Â_0 = δ_0 + γλ Â_1 = 1 + 0.25.
        assert_eq!(run(&[1.0, 1.0], 0.5, 0.5), vec![1.25, 1.0]);
    }

    #[test]
    fn lambda_zero_is_td_error() {
        let rewards = [0.5, -1.0, 2.0, 0.0];
        let values = [0.1, 0.4, -0.3, 0.8];
        let next = [0.4, -0.3, 0.8, 0.6];
        let term = [false, false, true, false];
        let trunc = [false; 4];
        let adv = gae(&rewards, &values, &next, &term, &trunc, 0.9, 0.0);
        for t in 0..4 {
            let boot = if term[t] { 0.0 } else { 0.9 * next[t] };
            assert_eq!(adv[t], rewards[t] + boot - values[t]);
        }
    }

    #[test]
    fn truncation_bootstraps_termination_does_not() {
        let rewards = [1.0];
        let values = [0.0];
        let next = [10.0];
        let term = gae(&rewards, &values, &next, &[true], &[false], 0.5, 1.0);
        let trunc = gae(&rewards, &values, &next, &[false], &[true], 0.5, 1.0);
        assert_eq!(term, vec![1.0]);
        assert_eq!(trunc, vec![6.0]);
    }

    #[test]
    fn episode_boundary_isolates() {
        let values = [0.0; 4];
        let flags_term = [false, true, false, false];
        let trunc = [false; 4];
        let a = gae(&[1.0, 1.0, 0.0, 0.0], &values, &values, &flags_term, &trunc, 0.9, 0.9);
        let b = gae(&[1.0, 1.0, 50.0, -3.0], &values, &values, &flags_term, &trunc, 0.9, 0.9);
        assert_eq!(a[..2], b[..2]);
    }

    #[test]
    fn normalize_cases() {
        assert_eq!(normalize(&[1.0, 3.0]), vec![-1.0, 1.0]);
        assert_eq!(normalize(&[2.5; 5]), vec![0.0; 5]);
        assert_eq!(normalize(&[7.0]), vec![0.0]);
        let out = normalize(&[0.3, -2.0, 5.5, 1.25, 0.0]);
        let mean = out.iter().sum::<f64>() / 5.0;
        let std = (out.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 5.0).sqrt();
        assert!(mean.abs() < 1e-9);
        assert!((std - 1.0).abs() < 1e-6);
    }

    #[test]
    fn value_targets_add_values() {
        let batch = RolloutBatch {
            observations: Array2::zeros((2, 1)),
            actions: vec![0, 1],
            rewards: vec![1.0, 0.0],
            terminated: vec![false, true],
            truncated: vec![false, false],
            behavior_probs: Array2::from_elem((2, 2), 0.5),
            values: vec![0.5, 0.25, 0.0],
            next_values: vec![0.25, 0.0],
            episode_returns: vec![1.0],
        };
        let set = AdvantageSet::from_batch(&batch, 1.0, 1.0);
        // δ_1 = 0 - 0.25, δ_0 = 1 + 0.25 - 0.5
        assert_eq!(set.raw, vec![0.75 - 0.25, -0.25]);
        assert_eq!(set.value_targets, vec![1.0, 0.0]);
        assert_eq!(set.normalized, vec![1.0, -1.0]);
    }
}
