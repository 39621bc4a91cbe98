use dtpo_core::{DecisionTree, Node, PolicyTree};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random tree with `leaves` leaves over `m` features in [0, 1). Leaf
/// distributions come from a small pool so sibling leaves often share an
/// argmax and ties between actions occur.
pub fn random_policy(rng: &mut ChaCha8Rng, m: usize, k: usize, leaves: usize) -> PolicyTree {
    fn grow(rng: &mut ChaCha8Rng, nodes: &mut Vec<Node>, m: usize, pool: &[Vec<f64>], leaves: usize) -> usize {
        let id = nodes.len();
        if leaves == 1 {
            nodes.push(Node::Leaf { output: pool[rng.gen_range(0..pool.len())].clone() });
            return id;
        }
        nodes.push(Node::Leaf { output: Vec::new() });
        let left_leaves = rng.gen_range(1..leaves);
        let feature = rng.gen_range(0..m);
        let threshold = rng.gen_range(0.0..1.0);
        let left = grow(rng, nodes, m, pool, left_leaves);
        let right = grow(rng, nodes, m, pool, leaves - left_leaves);
        nodes[id] = Node::Split { feature, threshold, left, right };
        id
    }
    let pool: Vec<Vec<f64>> = (0..3)
        .map(|_| {
            let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0..4) as f64 + 1.0).collect();
            let s: f64 = raw.iter().sum();
            raw.into_iter().map(|v| v / s).collect()
        })
        .collect();
    let mut nodes = Vec::new();
    grow(rng, &mut nodes, m, &pool, leaves);
    PolicyTree::stochastic(DecisionTree::from_nodes(nodes, m).unwrap())
}
