use std::f64::consts::PI;

use rand::Rng as _;

use super::{Dynamics, EnvSpec};
use crate::rng::Rng;

/// Inverted pendulum with bang-bang control: action 0 applies the maximum
/// torque in the negative direction, action 1 in the positive direction.
#[derive(Debug, Clone)]
pub struct Pendulum {
    pub max_speed: f64,
    pub max_torque: f64,
    pub dt: f64,
    pub gravity: f64,
    pub mass: f64,
    pub length: f64,
    /// (theta, theta_dot)
    state: [f64; 2],
}

impl Default for Pendulum {
    fn default() -> Self {
        Self {
            max_speed: 8.0,
            max_torque: 2.0,
            dt: 0.05,
            gravity: 10.0,
            mass: 1.0,
            length: 1.0,
            state: [0.0; 2],
        }
    }
}

/// Wraps an angle into `[-π, π)`.
fn angle_normalize(theta: f64) -> f64 {
    (theta + PI).rem_euclid(2.0 * PI) - PI
}

impl Pendulum {
    fn observe(&self) -> Vec<f64> {
        let [theta, theta_dot] = self.state;
        vec![theta.cos(), theta.sin(), theta_dot]
    }

    pub fn set_state(&mut self, theta: f64, theta_dot: f64) {
        self.state = [theta, theta_dot];
    }
}

impl Dynamics for Pendulum {
    fn spec(&self) -> EnvSpec {
        EnvSpec {
            name: "pendulum",
            feature_count: 3,
            action_count: 2,
            max_episode_steps: 200,
            feature_names: &["angle cosine", "angle sine", "angular velocity"],
            action_names: &["torque left", "torque right"],
        }
    }

    fn reset(&mut self, rng: &mut Rng) -> Vec<f64> {
        self.state = [rng.gen_range(-PI..PI), rng.gen_range(-1.0..1.0)];
        self.observe()
    }

    fn transition(&mut self, action: usize, _rng: &mut Rng) -> (Vec<f64>, f64, bool) {
        let [theta, theta_dot] = self.state;
        let torque = if action == 1 { self.max_torque } else { -self.max_torque };
        let cost = angle_normalize(theta).powi(2) + 0.1 * theta_dot * theta_dot + 0.001 * torque * torque;

        let g = self.gravity;
        let (m, l) = (self.mass, self.length);
        let new_theta_dot = (theta_dot
            + (3.0 * g / (2.0 * l) * theta.sin() + 3.0 / (m * l * l) * torque) * self.dt)
            .clamp(-self.max_speed, self.max_speed);
        let new_theta = theta + new_theta_dot * self.dt;
        self.state = [new_theta, new_theta_dot];
        (self.observe(), -cost, false)
    }
}
