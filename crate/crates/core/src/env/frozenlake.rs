use rand::Rng as _;

use super::{Dynamics, EnvSpec};
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LakeMap {
    Map4x4,
    Map8x8,
}

impl LakeMap {
    pub fn rows(self) -> &'static [&'static str] {
        match self {
            LakeMap::Map4x4 => &["SFFF", "FHFH", "FFFH", "HFFG"],
            LakeMap::Map8x8 => &[
                "SFFFFFFF", "FFFFFFFF", "FFFHFFFF", "FFFFFHFF", "FFFHFFFF", "FHHFFFHF", "FHFFHFHF",
                "FFFHFFFG",
            ],
        }
    }
}

/// Action indices: 0 left, 1 down, 2 right, 3 up.
pub const LEFT: usize = 0;
pub const DOWN: usize = 1;
pub const RIGHT: usize = 2;
pub const UP: usize = 3;

/// Slippery grid world. The intended move is replaced by the intended
/// direction or one of its two perpendicular neighbours, each with
/// probability 1/3. Reaching `G` pays 1 and ends the episode; falling into
/// `H` ends it with no reward. Observations are `(row, col)`.
#[derive(Debug, Clone)]
pub struct FrozenLake {
    map: LakeMap,
    size: usize,
    tiles: Vec<u8>,
    position: (usize, usize),
}

impl FrozenLake {
    pub fn new(map: LakeMap) -> Self {
        let rows = map.rows();
        let tiles: Vec<u8> = rows.iter().flat_map(|r| r.bytes()).collect();
        Self {
            map,
            size: rows.len(),
            tiles,
            position: (0, 0),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn tile(&self, row: usize, col: usize) -> u8 {
        self.tiles[row * self.size + col]
    }

    pub fn position(&self) -> (usize, usize) {
        self.position
    }

    pub fn set_position(&mut self, row: usize, col: usize) {
        self.position = (row, col);
    }

    /// The three directions an intended action may resolve to.
    pub fn slip_directions(action: usize) -> [usize; 3] {
        [(action + 3) % 4, action, (action + 1) % 4]
    }

    /// Deterministic move in `direction`, clamped to the grid.
    pub fn moved(&self, (row, col): (usize, usize), direction: usize) -> (usize, usize) {
        let last = self.size - 1;
        match direction {
            LEFT => (row, col.saturating_sub(1)),
            DOWN => ((row + 1).min(last), col),
            RIGHT => (row, (col + 1).min(last)),
            UP => (row.saturating_sub(1), col),
            _ => unreachable!("direction out of range"),
        }
    }

    fn observe(&self) -> Vec<f64> {
        vec![self.position.0 as f64, self.position.1 as f64]
    }
}

impl Dynamics for FrozenLake {
    fn spec(&self) -> EnvSpec {
        let (name, max_episode_steps) = match self.map {
            LakeMap::Map4x4 => ("frozenlake4x4", 100),
            LakeMap::Map8x8 => ("frozenlake8x8", 200),
        };
        EnvSpec {
            name,
            feature_count: 2,
            action_count: 4,
            max_episode_steps,
            feature_names: &["row", "column"],
            action_names: &["left", "down", "right", "up"],
        }
    }

    fn reset(&mut self, _rng: &mut Rng) -> Vec<f64> {
        self.position = (0, 0);
        self.observe()
    }

    fn transition(&mut self, action: usize, rng: &mut Rng) -> (Vec<f64>, f64, bool) {
        let direction = Self::slip_directions(action)[rng.gen_range(0..3)];
        self.position = self.moved(self.position, direction);
        let tile = self.tile(self.position.0, self.position.1);
        let reward = if tile == b'G' { 1.0 } else { 0.0 };
        (self.observe(), reward, tile == b'G' || tile == b'H')
    }
}
