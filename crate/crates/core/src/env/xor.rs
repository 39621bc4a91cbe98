use rand::Rng as _;

use super::{Dynamics, EnvSpec};
use crate::rng::Rng;

/// Reinforcement-learning form of the XOR task.
///
/// The state is a point drawn uniformly from the unit square and redrawn
/// after every step. Action `[x > 0.5] xor [y > 0.5]` earns 1, the other
/// action earns 0.
#[derive(Debug, Clone, Copy, Default)]
pub struct Xor {
    point: [f64; 2],
}

impl Xor {
    pub fn correct_action(point: &[f64]) -> usize {
        usize::from((point[0] > 0.5) ^ (point[1] > 0.5))
    }

    pub fn set_point(&mut self, x: f64, y: f64) {
        self.point = [x, y];
    }

    fn resample(&mut self, rng: &mut Rng) -> Vec<f64> {
        self.point = [rng.gen::<f64>(), rng.gen::<f64>()];
        self.point.to_vec()
    }
}

impl Dynamics for Xor {
    fn spec(&self) -> EnvSpec {
        EnvSpec {
            name: "xor",
            feature_count: 2,
            action_count: 2,
            max_episode_steps: 1000,
            feature_names: &["x", "y"],
            action_names: &["zero", "one"],
        }
    }

    fn reset(&mut self, rng: &mut Rng) -> Vec<f64> {
        self.resample(rng)
    }

    fn transition(&mut self, action: usize, rng: &mut Rng) -> (Vec<f64>, f64, bool) {
        let reward = if action == Self::correct_action(&self.point) { 1.0 } else { 0.0 };
        (self.resample(rng), reward, false)
    }
}
