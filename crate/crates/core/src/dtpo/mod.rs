//! The DTPO training loop.
//!
//! Every iteration collects a batch with the current stochastic tree,
//! shifts the log-probabilities of the visited states one gradient step
//! along the surrogate objective, and fits a new tree of bounded size to
//! the resulting distributions. The new tree replaces the incumbent only if
//! it scores higher on the same batch.

pub mod descent;
pub mod metrics;
pub mod objective;
pub mod rollout;

use std::time::Instant;

use ndarray::{Array2, Axis};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::advantage::AdvantageSet;
use crate::critic::{train_epochs, AdamState, CriticNet};
use crate::env::{EnvKind, Environment};
use crate::error::{Error, Result};
use crate::eval::evaluate;
use crate::rng::{seeded, stream, Rng};
use crate::tree::{fit_regression_tree, PolicyTree};

pub use descent::{incremental_tree_descent, predict_all, DescentOutcome, DifferentiableLoss};
pub use metrics::{read_csv, write_csv, IterationMetrics, CSV_HEADER};
pub use objective::{ldt_gradient, ldt_objective, ldt_of_probabilities, softmax};
pub use rollout::{collect_rollouts, sample_categorical};

/// Added to probabilities before taking logs.
pub const LOG_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    /// Step size η applied to the surrogate gradient in logit space.
    pub eta: f64,
    pub gamma: f64,
    pub lambda: f64,
    /// Environment steps per iteration.
    pub timesteps: usize,
    pub iterations: usize,
    pub leaves: usize,
    pub critic_epochs: usize,
    pub critic_batch_size: usize,
    pub critic_hidden: usize,
    pub critic_learning_rate: f64,
    pub value_clip: f64,
    pub eval_every: usize,
    pub eval_rollouts: usize,
    pub seed: u64,
    /// When false the `seconds` column is written as 0 so that metrics
    /// files from identical runs compare equal byte for byte.
    pub record_wall_time: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            eta: 1.0,
            gamma: 0.99,
            lambda: 0.95,
            timesteps: 10_000,
            iterations: 1500,
            leaves: 16,
            critic_epochs: 4,
            critic_batch_size: 64,
            critic_hidden: crate::critic::HIDDEN,
            critic_learning_rate: crate::critic::LEARNING_RATE,
            value_clip: 0.2,
            eval_every: 10,
            eval_rollouts: 30,
            seed: 0,
            record_wall_time: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return bad("eta must be positive");
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return bad("gamma must be in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return bad("lambda must be in [0, 1]");
        }
        if self.timesteps == 0 {
            return bad("timesteps must be at least 1");
        }
        if self.leaves == 0 {
            return bad("leaves must be at least 1");
        }
        if self.critic_batch_size == 0 || self.critic_hidden == 0 {
            return bad("critic batch size and width must be at least 1");
        }
        if !(self.critic_learning_rate.is_finite() && self.critic_learning_rate > 0.0) {
            return bad("critic learning rate must be positive");
        }
        if !(self.value_clip.is_finite() && self.value_clip > 0.0) {
            return bad("value clip must be positive");
        }
        if self.eval_every == 0 || self.eval_rollouts == 0 {
            return bad("eval_every and eval_rollouts must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Best evaluated policy: merged, then determinized.
    pub policy: PolicyTree,
    /// Its mean return at the evaluation where it was found.
    pub best_return: f64,
    /// Iteration at which `policy` was found (0 for the initial policy).
    pub best_iteration: usize,
    /// The stochastic incumbent after the last iteration.
    pub final_policy: PolicyTree,
    pub critic: CriticNet,
    pub history: Vec<IterationMetrics>,
}

/// Mutable state carried between iterations.
pub struct Trainer {
    kind: EnvKind,
    config: TrainConfig,
    env: Box<dyn Environment>,
    policy: PolicyTree,
    critic: CriticNet,
    adam: AdamState,
    rollout_rng: Rng,
    critic_rng: Rng,
    eval_rng: Rng,
    iteration: usize,
    env_steps: u64,
    best_policy: PolicyTree,
    best_return: f64,
    best_iteration: usize,
    started: Instant,
    history: Vec<IterationMetrics>,
}

/// The greedy form of a stochastic policy that gets evaluated.
pub fn greedy_policy(policy: &PolicyTree) -> PolicyTree {
    policy.merge_redundant().determinize()
}

impl Trainer {
    /// Builds the initial state and evaluates the initial uniform policy.
    pub fn new(kind: EnvKind, config: TrainConfig) -> Result<Self> {
        config.validate()?;
        let spec = kind.spec();
        let mut critic_rng = seeded(config.seed, stream::CRITIC);
        let critic = CriticNet::new(spec.feature_count, config.critic_hidden, &mut critic_rng);
        let adam = AdamState::with_learning_rate(critic.params().len(), config.critic_learning_rate);
        let policy = PolicyTree::uniform(spec.feature_count, spec.action_count);
        let mut eval_rng = seeded(config.seed, stream::EVALUATION);
        let best_policy = greedy_policy(&policy);
        let best_return = evaluate(kind, &best_policy, config.eval_rollouts, eval_rng.gen())?.mean;
        Ok(Self {
            kind,
            env: kind.make(),
            rollout_rng: seeded(config.seed, stream::ROLLOUT),
            config,
            policy,
            critic,
            adam,
            critic_rng,
            eval_rng,
            iteration: 0,
            env_steps: 0,
            best_policy,
            best_return,
            best_iteration: 0,
            started: Instant::now(),
            history: Vec::new(),
        })
    }

    pub fn policy(&self) -> &PolicyTree {
        &self.policy
    }

    pub fn best_return(&self) -> f64 {
        self.best_return
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// Runs one iteration and returns its metrics.
    pub fn step(&mut self) -> Result<IterationMetrics> {
        self.iteration += 1;
        let cfg = &self.config;
        let batch = collect_rollouts(
            self.env.as_mut(),
            &self.policy,
            &self.critic,
            cfg.timesteps,
            &mut self.rollout_rng,
        )?;
        self.env_steps += batch.len() as u64;
        let adv = AdvantageSet::from_batch(&batch, cfg.gamma, cfg.lambda);

        let logits = batch.behavior_probs.mapv(|p| (p + LOG_FLOOR).ln());
        let grad = ldt_gradient(logits.view(), &batch.actions, batch.behavior_probs.view(), &adv.normalized);
        let shifted = logits + grad * cfg.eta;
        let mut targets = Array2::<f64>::zeros(shifted.raw_dim());
        for (mut out, row) in targets.axis_iter_mut(Axis(0)).zip(shifted.axis_iter(Axis(0))) {
            let p = softmax(row.as_slice().expect("contiguous rows"));
            out.assign(&ndarray::ArrayView1::from(&p[..]));
        }
        let candidate = PolicyTree::stochastic(fit_regression_tree(
            batch.observations.view(),
            targets.view(),
            cfg.leaves,
        )?);

        let incumbent_probs = batch.behavior_probs.rows().into_iter().map(|r| r.to_vec()).collect::<Vec<_>>();
        let ldt_before = ldt_of_probabilities(
            incumbent_probs.iter().map(Vec::as_slice),
            &batch.actions,
            batch.behavior_probs.view(),
            &adv.normalized,
        );
        let candidate_probs = predict_all(candidate.tree(), batch.observations.view());
        let ldt_after = ldt_of_probabilities(
            candidate_probs.rows().into_iter().map(|r| r.to_slice().expect("contiguous rows")),
            &batch.actions,
            batch.behavior_probs.view(),
            &adv.normalized,
        );
        let accepted = ldt_after > ldt_before;
        if accepted {
            self.policy = candidate;
        }

        let critic_loss = train_epochs(
            &mut self.critic,
            &mut self.adam,
            batch.observations.view(),
            &adv.value_targets,
            cfg.critic_epochs,
            cfg.critic_batch_size,
            cfg.value_clip,
            &mut self.critic_rng,
        );

        let evaluate_now = self.iteration % cfg.eval_every == 0 || self.iteration == cfg.iterations;
        let det_eval_return = if evaluate_now {
            let greedy = greedy_policy(&self.policy);
            let report = evaluate(self.kind, &greedy, cfg.eval_rollouts, self.eval_rng.gen())?;
            if report.mean > self.best_return {
                self.best_return = report.mean;
                self.best_policy = greedy;
                self.best_iteration = self.iteration;
            }
            Some(report.mean)
        } else {
            None
        };

        let mean_batch_return = if batch.episode_returns.is_empty() {
            None
        } else {
            Some(batch.episode_returns.iter().sum::<f64>() / batch.episode_returns.len() as f64)
        };
        let metrics = IterationMetrics {
            iteration: self.iteration,
            env_steps: self.env_steps,
            mean_batch_return,
            ldt_before,
            ldt_after,
            accepted,
            critic_loss,
            det_eval_return,
            best_return: self.best_return,
            leaves: self.policy.leaf_count(),
            seconds: if cfg.record_wall_time {
                self.started.elapsed().as_secs_f64()
            } else {
                0.0
            },
        };
        self.history.push(metrics.clone());
        Ok(metrics)
    }

    pub fn finish(self) -> TrainOutcome {
        TrainOutcome {
            policy: self.best_policy,
            best_return: self.best_return,
            best_iteration: self.best_iteration,
            final_policy: self.policy,
            critic: self.critic,
            history: self.history,
        }
    }
}

/// Trains on `kind` for `config.iterations` iterations.
pub fn train(kind: EnvKind, config: &TrainConfig) -> Result<TrainOutcome> {
    train_with(kind, config, |_| {})
}

/// [`train`], calling `on_iteration` after every iteration.
pub fn train_with(
    kind: EnvKind,
    config: &TrainConfig,
    mut on_iteration: impl FnMut(&IterationMetrics),
) -> Result<TrainOutcome> {
    let mut trainer = Trainer::new(kind, config.clone())?;
    for _ in 0..config.iterations {
        let m = trainer.step()?;
        on_iteration(&m);
    }
    Ok(trainer.finish())
}
