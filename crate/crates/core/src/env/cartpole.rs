use rand::Rng as _;

use super::{Dynamics, EnvSpec};
use crate::rng::Rng;

/// Classic cart-pole balancing with explicit Euler integration.
///
/// Action 0 pushes the cart left, action 1 pushes it right. Every step taken
/// earns one reward unit; the episode terminates once the pole tilts past
/// 12 degrees or the cart leaves `[-2.4, 2.4]`.
#[derive(Debug, Clone)]
pub struct CartPole {
    pub gravity: f64,
    pub cart_mass: f64,
    pub pole_mass: f64,
    /// Half the pole length.
    pub half_length: f64,
    pub force: f64,
    pub tau: f64,
    pub x_threshold: f64,
    pub theta_threshold: f64,
    state: [f64; 4],
}

impl Default for CartPole {
    fn default() -> Self {
        Self {
            gravity: 9.8,
            cart_mass: 1.0,
            pole_mass: 0.1,
            half_length: 0.5,
            force: 10.0,
            tau: 0.02,
            x_threshold: 2.4,
            theta_threshold: 12.0 * 2.0 * std::f64::consts::PI / 360.0,
            state: [0.0; 4],
        }
    }
}

impl CartPole {
    pub fn state(&self) -> [f64; 4] {
        self.state
    }

    pub fn set_state(&mut self, state: [f64; 4]) {
        self.state = state;
    }
}

impl Dynamics for CartPole {
    fn spec(&self) -> EnvSpec {
        EnvSpec {
            name: "cartpole",
            feature_count: 4,
            action_count: 2,
            max_episode_steps: 500,
            feature_names: &["cart position", "cart velocity", "pole angle", "pole angular velocity"],
            action_names: &["left", "right"],
        }
    }

    fn reset(&mut self, rng: &mut Rng) -> Vec<f64> {
        for v in self.state.iter_mut() {
            *v = rng.gen_range(-0.05..0.05);
        }
        self.state.to_vec()
    }

    fn transition(&mut self, action: usize, _rng: &mut Rng) -> (Vec<f64>, f64, bool) {
        let [x, x_dot, theta, theta_dot] = self.state;
        let force = if action == 1 { self.force } else { -self.force };
        let total_mass = self.cart_mass + self.pole_mass;
        let polemass_length = self.pole_mass * self.half_length;
        let (sin, cos) = theta.sin_cos();

        let temp = (force + polemass_length * theta_dot * theta_dot * sin) / total_mass;
        let theta_acc = (self.gravity * sin - cos * temp)
            / (self.half_length * (4.0 / 3.0 - self.pole_mass * cos * cos / total_mass));
        let x_acc = temp - polemass_length * theta_acc * cos / total_mass;

        self.state = [
            x + self.tau * x_dot,
            x_dot + self.tau * x_acc,
            theta + self.tau * theta_dot,
            theta_dot + self.tau * theta_acc,
        ];
        let [x, _, theta, _] = self.state;
        let terminated = x.abs() > self.x_threshold || theta.abs() > self.theta_threshold;
        (self.state.to_vec(), 1.0, terminated)
    }
}
