//! Environment contract and the bundled tasks.
//!
//! Environments are single-threaded state machines. They hold no random
//! generator of their own; callers pass one to `reset` and `step`, so the
//! same seed and action sequence always replays the same trajectory.

mod blackjack;
mod cartpole;
mod frozenlake;
mod pendulum;
mod swingup;
mod xor;

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;

pub use blackjack::Blackjack;
pub use cartpole::CartPole;
pub use frozenlake::{FrozenLake, LakeMap};
pub use pendulum::Pendulum;
pub use swingup::CartPoleSwingup;
pub use xor::Xor;

/// Fixed-length feature vector emitted by an environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Observation(Vec<f64>);

impl Observation {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Observation {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Observation {
    fn from(values: Vec<f64>) -> Self {
        Self(values)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub observation: Observation,
    pub reward: f64,
    pub terminated: bool,
    pub truncated: bool,
}

impl StepResult {
    pub fn done(&self) -> bool {
        self.terminated || self.truncated
    }
}

/// Static metadata of an environment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvSpec {
    pub name: &'static str,
    pub feature_count: usize,
    pub action_count: usize,
    pub max_episode_steps: usize,
    pub feature_names: &'static [&'static str],
    pub action_names: &'static [&'static str],
}

pub trait Environment: Send {
    fn spec(&self) -> &EnvSpec;

    /// Starts a new episode and zeroes the step counter.
    fn reset(&mut self, rng: &mut Rng) -> Observation;

    /// Advances one transition. The episode must be reset after a step that
    /// reports `terminated` or `truncated`.
    fn step(&mut self, action: usize, rng: &mut Rng) -> Result<StepResult>;
}

/// Raw transition model of a task; [`TimeLimit`] adds the episode
/// bookkeeping shared by every environment.
pub trait Dynamics: Send {
    fn spec(&self) -> EnvSpec;

    fn reset(&mut self, rng: &mut Rng) -> Vec<f64>;

    /// Returns `(observation, reward, terminated)`.
    fn transition(&mut self, action: usize, rng: &mut Rng) -> (Vec<f64>, f64, bool);
}

/// Step counting, truncation at `max_episode_steps` and misuse checks.
pub struct TimeLimit<D> {
    dynamics: D,
    spec: EnvSpec,
    steps: usize,
    finished: bool,
}

impl<D: Dynamics> TimeLimit<D> {
    pub fn new(dynamics: D) -> Self {
        let spec = dynamics.spec();
        Self {
            dynamics,
            spec,
            steps: 0,
            finished: true,
        }
    }

    pub fn dynamics(&self) -> &D {
        &self.dynamics
    }

    pub fn elapsed_steps(&self) -> usize {
        self.steps
    }
}

impl<D: Dynamics> Environment for TimeLimit<D> {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn reset(&mut self, rng: &mut Rng) -> Observation {
        self.steps = 0;
        self.finished = false;
        Observation(self.dynamics.reset(rng))
    }

    fn step(&mut self, action: usize, rng: &mut Rng) -> Result<StepResult> {
        if action >= self.spec.action_count {
            return Err(Error::InvalidAction {
                action,
                action_count: self.spec.action_count,
            });
        }
        if self.finished {
            return Err(Error::SteppedFinishedEpisode);
        }
        let (obs, reward, terminated) = self.dynamics.transition(action, rng);
        self.steps += 1;
        let truncated = self.steps >= self.spec.max_episode_steps;
        self.finished = terminated || truncated;
        Ok(StepResult {
            observation: Observation(obs),
            reward,
            terminated,
            truncated,
        })
    }
}

/// The bundled environments, selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EnvKind {
    CartPole,
    CartPoleSwingup,
    Pendulum,
    FrozenLake4x4,
    FrozenLake8x8,
    Blackjack,
    Xor,
}

impl EnvKind {
    pub const ALL: [EnvKind; 7] = [
        EnvKind::CartPole,
        EnvKind::CartPoleSwingup,
        EnvKind::Pendulum,
        EnvKind::FrozenLake4x4,
        EnvKind::FrozenLake8x8,
        EnvKind::Blackjack,
        EnvKind::Xor,
    ];

    /// Canonical command-line name.
    pub fn name(self) -> &'static str {
        match self {
            EnvKind::CartPole => "cartpole",
            EnvKind::CartPoleSwingup => "cartpole-swingup",
            EnvKind::Pendulum => "pendulum",
            EnvKind::FrozenLake4x4 => "frozenlake4x4",
            EnvKind::FrozenLake8x8 => "frozenlake8x8",
            EnvKind::Blackjack => "blackjack",
            EnvKind::Xor => "xor",
        }
    }

    pub fn names() -> Vec<&'static str> {
        Self::ALL.iter().map(|k| k.name()).collect()
    }

    pub fn make(self) -> Box<dyn Environment> {
        match self {
            EnvKind::CartPole => Box::new(TimeLimit::new(CartPole::default())),
            EnvKind::CartPoleSwingup => Box::new(TimeLimit::new(CartPoleSwingup::default())),
            EnvKind::Pendulum => Box::new(TimeLimit::new(Pendulum::default())),
            EnvKind::FrozenLake4x4 => Box::new(TimeLimit::new(FrozenLake::new(LakeMap::Map4x4))),
            EnvKind::FrozenLake8x8 => Box::new(TimeLimit::new(FrozenLake::new(LakeMap::Map8x8))),
            EnvKind::Blackjack => Box::new(TimeLimit::new(Blackjack::default())),
            EnvKind::Xor => Box::new(TimeLimit::new(Xor::default())),
        }
    }

    pub fn spec(self) -> EnvSpec {
        match self {
            EnvKind::CartPole => CartPole::default().spec(),
            EnvKind::CartPoleSwingup => CartPoleSwingup::default().spec(),
            EnvKind::Pendulum => Pendulum::default().spec(),
            EnvKind::FrozenLake4x4 => FrozenLake::new(LakeMap::Map4x4).spec(),
            EnvKind::FrozenLake8x8 => FrozenLake::new(LakeMap::Map8x8).spec(),
            EnvKind::Blackjack => Blackjack::default().spec(),
            EnvKind::Xor => Xor::default().spec(),
        }
    }
}

impl fmt::Display for EnvKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnvKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        let kind = match key.as_str() {
            "cartpole" | "cartpolev1" => EnvKind::CartPole,
            "cartpoleswingup" | "swingup" => EnvKind::CartPoleSwingup,
            "pendulum" | "pendulumv1" | "pendulumdiscrete" | "pendulumbangbang" => EnvKind::Pendulum,
            "frozenlake4x4" | "frozenlake" => EnvKind::FrozenLake4x4,
            "frozenlake8x8" => EnvKind::FrozenLake8x8,
            "blackjack" => EnvKind::Blackjack,
            "xor" => EnvKind::Xor,
            _ => return Err(Error::UnknownEnvironment(s.to_string())),
        };
        Ok(kind)
    }
}
