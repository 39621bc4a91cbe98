use rand::Rng as _;

use super::{Dynamics, EnvSpec};
use crate::rng::Rng;

/// Infinite-deck card values: ace, 2..9, and four ten-valued ranks.
const DECK: [u32; 13] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 10, 10, 10];

#[derive(Debug, Clone, Default)]
struct Hand(Vec<u32>);

impl Hand {
    fn raw(&self) -> u32 {
        self.0.iter().sum()
    }

    fn usable_ace(&self) -> bool {
        self.0.contains(&1) && self.raw() + 10 <= 21
    }

    fn total(&self) -> u32 {
        if self.usable_ace() {
            self.raw() + 10
        } else {
            self.raw()
        }
    }

    fn bust(&self) -> bool {
        self.total() > 21
    }

    fn score(&self) -> u32 {
        if self.bust() {
            0
        } else {
            self.total()
        }
    }
}

/// Repeated hands of simplified blackjack against a dealer who draws to 17.
///
/// Action 0 sticks, action 1 hits. Each hand pays +1, 0 or -1 when it
/// resolves and a fresh hand is dealt; the episode ends after
/// `hands_per_episode` hands. Observations are
/// `(player total, dealer showing card, usable ace)`.
#[derive(Debug, Clone)]
pub struct Blackjack {
    pub hands_per_episode: usize,
    hands_played: usize,
    player: Hand,
    dealer: Hand,
}

impl Default for Blackjack {
    fn default() -> Self {
        Self {
            hands_per_episode: 100,
            hands_played: 0,
            player: Hand::default(),
            dealer: Hand::default(),
        }
    }
}

fn draw(rng: &mut Rng) -> u32 {
    DECK[rng.gen_range(0..DECK.len())]
}

impl Blackjack {
    fn deal(&mut self, rng: &mut Rng) {
        self.player = Hand(vec![draw(rng), draw(rng)]);
        self.dealer = Hand(vec![draw(rng), draw(rng)]);
    }

    fn observe(&self) -> Vec<f64> {
        vec![
            self.player.total() as f64,
            self.dealer.0[0] as f64,
            if self.player.usable_ace() { 1.0 } else { 0.0 },
        ]
    }

    pub fn hands_played(&self) -> usize {
        self.hands_played
    }
}

impl Dynamics for Blackjack {
    fn spec(&self) -> EnvSpec {
        EnvSpec {
            name: "blackjack",
            feature_count: 3,
            action_count: 2,
            max_episode_steps: 2000,
            feature_names: &["player sum", "dealer card", "usable ace"],
            action_names: &["stick", "hit"],
        }
    }

    fn reset(&mut self, rng: &mut Rng) -> Vec<f64> {
        self.hands_played = 0;
        self.deal(rng);
        self.observe()
    }

    fn transition(&mut self, action: usize, rng: &mut Rng) -> (Vec<f64>, f64, bool) {
        let outcome = if action == 1 {
            self.player.0.push(draw(rng));
            self.player.bust().then_some(-1.0)
        } else {
            while self.dealer.total() < 17 {
                self.dealer.0.push(draw(rng));
            }
            let (p, d) = (self.player.score(), self.dealer.score());
            Some(match p.cmp(&d) {
                std::cmp::Ordering::Greater => 1.0,
                std::cmp::Ordering::Less => -1.0,
                std::cmp::Ordering::Equal => 0.0,
            })
        };
        match outcome {
            None => (self.observe(), 0.0, false),
            Some(reward) => {
                self.hands_played += 1;
                let terminated = self.hands_played >= self.hands_per_episode;
                if !terminated {
                    self.deal(rng);
                }
                (self.observe(), reward, terminated)
            }
        }
    }
}
