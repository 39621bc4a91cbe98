use rand_distr::{Distribution, Normal};

use super::{Dynamics, EnvSpec};
use crate::rng::Rng;

/// Cart-pole variant where the pole starts hanging below the cart.
///
/// Dynamics follow the frictional swing-up model with two discrete pushes of
/// magnitude `force`. The per-step reward is `(1 + cos θ) / 2` scaled by
/// `cos(x / x_threshold · π/2)`, so it peaks at 1 with the pole upright over
/// the track centre. Leaving the track terminates the episode.
#[derive(Debug, Clone)]
pub struct CartPoleSwingup {
    pub gravity: f64,
    pub cart_mass: f64,
    pub pole_mass: f64,
    pub pole_length: f64,
    pub force: f64,
    pub friction: f64,
    pub dt: f64,
    pub x_threshold: f64,
    /// (x, x_dot, theta, theta_dot)
    state: [f64; 4],
}

impl Default for CartPoleSwingup {
    fn default() -> Self {
        Self {
            gravity: 9.82,
            cart_mass: 0.5,
            pole_mass: 0.5,
            pole_length: 0.6,
            force: 10.0,
            friction: 0.1,
            dt: 0.01,
            x_threshold: 2.4,
            state: [0.0; 4],
        }
    }
}

impl CartPoleSwingup {
    fn observe(&self) -> Vec<f64> {
        let [x, x_dot, theta, theta_dot] = self.state;
        vec![x, x_dot, theta.cos(), theta.sin(), theta_dot]
    }

    pub fn reward_at(&self, x: f64, theta: f64) -> f64 {
        let upright = (theta.cos() + 1.0) / 2.0;
        let centred = (x / self.x_threshold * std::f64::consts::FRAC_PI_2).cos();
        upright * centred
    }
}

impl Dynamics for CartPoleSwingup {
    fn spec(&self) -> EnvSpec {
        EnvSpec {
            name: "cartpole-swingup",
            feature_count: 5,
            action_count: 2,
            max_episode_steps: 1000,
            feature_names: &[
                "cart position",
                "cart velocity",
                "pole angle cosine",
                "pole angle sine",
                "pole angular velocity",
            ],
            action_names: &["left", "right"],
        }
    }

    fn reset(&mut self, rng: &mut Rng) -> Vec<f64> {
        let noise = Normal::new(0.0, 0.2).expect("valid std");
        let mean = [0.0, 0.0, std::f64::consts::PI, 0.0];
        for (s, m) in self.state.iter_mut().zip(mean) {
            *s = m + noise.sample(rng);
        }
        self.observe()
    }

    fn transition(&mut self, action: usize, _rng: &mut Rng) -> (Vec<f64>, f64, bool) {
        let [x, x_dot, theta, theta_dot] = self.state;
        let push = if action == 1 { self.force } else { -self.force };
        let total = self.cart_mass + self.pole_mass;
        let mpl = self.pole_mass * self.pole_length;
        let (s, c) = theta.sin_cos();

        let x_acc = (-2.0 * mpl * theta_dot * theta_dot * s
            + 3.0 * self.pole_mass * self.gravity * s * c
            + 4.0 * push
            - 4.0 * self.friction * x_dot)
            / (4.0 * total - 3.0 * self.pole_mass * c * c);
        let theta_acc = (-3.0 * mpl * theta_dot * theta_dot * s * c
            + 6.0 * total * self.gravity * s
            + 6.0 * (push - self.friction * x_dot) * c)
            / (4.0 * self.pole_length * total - 3.0 * mpl * c * c);

        self.state = [
            x + x_dot * self.dt,
            x_dot + x_acc * self.dt,
            theta + theta_dot * self.dt,
            theta_dot + theta_acc * self.dt,
        ];
        let [x, _, theta, _] = self.state;
        let terminated = x.abs() > self.x_threshold;
        (self.observe(), self.reward_at(x, theta), terminated)
    }
}
