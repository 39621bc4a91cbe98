//! On-policy experience collection.

use ndarray::Array2;
use rand::Rng as _;

use crate::advantage::RolloutBatch;
use crate::critic::CriticNet;
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::tree::PolicyTree;

/// Draws an index from `probs` by inversion. Falls back to the last action
/// with positive mass when rounding leaves `u` above the cumulative sum.
pub fn sample_categorical(probs: &[f64], rng: &mut Rng) -> usize {
    let u: f64 = rng.gen();
    let mut cumulative = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        cumulative += p;
        if u < cumulative {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1)
}

/// Runs the stochastic `policy` for exactly `timesteps` steps, starting
/// from a fresh reset and resetting whenever an episode ends. Critic values
/// are attached for every visited state, for the state after the last step
/// and for the final state of every truncated episode.
pub fn collect_rollouts(
    env: &mut dyn Environment,
    policy: &PolicyTree,
    critic: &CriticNet,
    timesteps: usize,
    rng: &mut Rng,
) -> Result<RolloutBatch> {
    let n_features = env.spec().feature_count;
    let n_actions = env.spec().action_count;
    if policy.n_features() != n_features {
        return Err(Error::DimensionMismatch { expected: n_features, got: policy.n_features() });
    }
    if policy.n_actions() != n_actions {
        return Err(Error::DimensionMismatch { expected: n_actions, got: policy.n_actions() });
    }
    let mut observations = Array2::<f64>::zeros((timesteps, n_features));
    let mut behavior_probs = Array2::<f64>::zeros((timesteps, n_actions));
    let mut actions = Vec::with_capacity(timesteps);
    let mut rewards = Vec::with_capacity(timesteps);
    let mut terminated = Vec::with_capacity(timesteps);
    let mut truncated = Vec::with_capacity(timesteps);
    let mut episode_returns = Vec::new();
    // (step index, observation reached) for truncated episode ends.
    let mut truncated_finals: Vec<(usize, Vec<f64>)> = Vec::new();

    let mut obs = env.reset(rng);
    let mut episode_return = 0.0;
    for t in 0..timesteps {
        let probs = policy.probabilities_unchecked(&obs);
        let action = sample_categorical(probs, rng);
        observations.row_mut(t).assign(&ndarray::ArrayView1::from(obs.as_slice()));
        behavior_probs.row_mut(t).assign(&ndarray::ArrayView1::from(probs));

        let step = env.step(action, rng)?;
        episode_return += step.reward;
        actions.push(action);
        rewards.push(step.reward);
        terminated.push(step.terminated);
        truncated.push(step.truncated && !step.terminated);
        if step.done() {
            episode_returns.push(episode_return);
            episode_return = 0.0;
            if !step.terminated {
                truncated_finals.push((t, step.observation.into_inner()));
            }
            obs = env.reset(rng);
        } else {
            obs = step.observation;
        }
    }

    let mut values = critic.values(observations.view());
    values.push(critic.value(&obs)?);
    let mut next_values: Vec<f64> = values[1..].to_vec();
    for (t, final_obs) in &truncated_finals {
        next_values[*t] = critic.value(final_obs)?;
    }
    for t in 0..timesteps {
        if terminated[t] {
            next_values[t] = 0.0;
        }
    }

    Ok(RolloutBatch {
        observations,
        actions,
        rewards,
        terminated,
        truncated,
        behavior_probs,
        values,
        next_values,
        episode_returns,
    })
}
