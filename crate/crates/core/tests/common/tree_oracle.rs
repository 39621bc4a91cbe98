//! Exhaustive greedy reference for the regression-tree learner: every
//! step rescans every leaf, feature and threshold from scratch.

use ndarray::Array2;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const TIE: f64 = 1e-9;

pub fn sse(y: &Array2<f64>, rows: &[usize]) -> f64 {
    let n = rows.len() as f64;
    (0..y.ncols())
        .map(|c| {
            let mean = rows.iter().map(|&i| y[[i, c]]).sum::<f64>() / n;
            rows.iter().map(|&i| (y[[i, c]] - mean).powi(2)).sum::<f64>()
        })
        .sum()
}

pub fn mean(y: &Array2<f64>, rows: &[usize]) -> Vec<f64> {
    (0..y.ncols())
        .map(|c| {
            let mut s = 0.0;
            for &i in rows {
                s += y[[i, c]];
            }
            s / rows.len() as f64
        })
        .collect()
}

pub fn pure(y: &Array2<f64>, rows: &[usize]) -> bool {
    (0..y.ncols()).all(|c| {
        let lo = rows.iter().map(|&i| y[[i, c]]).fold(f64::INFINITY, f64::min);
        let hi = rows.iter().map(|&i| y[[i, c]]).fold(f64::NEG_INFINITY, f64::max);
        hi - lo <= 1e-12
    })
}

/// (feature, threshold, reduction, parent sse) of the best split of `rows`.
pub fn best_split(x: &Array2<f64>, y: &Array2<f64>, rows: &[usize]) -> Option<(usize, f64, f64, f64)> {
    if rows.len() < 2 || pure(y, rows) {
        return None;
    }
    let parent = sse(y, rows);
    let mut best: Option<(usize, f64, f64)> = None;
    for f in 0..x.ncols() {
        let mut values: Vec<f64> = rows.iter().map(|&i| x[[i, f]]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for w in values.windows(2) {
            let t = w[0] + (w[1] - w[0]) / 2.0;
            let t = if t >= w[1] { w[0] } else { t };
            let left: Vec<usize> = rows.iter().copied().filter(|&i| x[[i, f]] <= t).collect();
            let right: Vec<usize> = rows.iter().copied().filter(|&i| x[[i, f]] > t).collect();
            let cost = sse(y, &left) + sse(y, &right);
            let better = match best {
                None => true,
                Some((_, _, b)) => b - cost > TIE * b.abs().max(cost.abs()).max(parent),
            };
            if better {
                best = Some((f, t, cost));
            }
        }
    }
    best.map(|(f, t, cost)| (f, t, (parent - cost).max(0.0), parent))
}

pub enum Shape {
    Leaf(Vec<f64>),
    Split(usize, f64, Box<Shape>, Box<Shape>),
}

pub fn grow(x: &Array2<f64>, y: &Array2<f64>, budget: usize) -> Shape {
    // Leaves in creation order, each with a path of (feature, threshold, went_left).
    let mut leaves: Vec<(Vec<(usize, f64, bool)>, Vec<usize>)> = vec![(Vec::new(), (0..x.nrows()).collect())];
    while leaves.len() < budget {
        let mut chosen: Option<(usize, (usize, f64, f64, f64))> = None;
        for (pos, (_, rows)) in leaves.iter().enumerate() {
            let Some(s) = best_split(x, y, rows) else { continue };
            let better = match &chosen {
                None => true,
                Some((_, b)) => s.2 - b.2 > TIE * s.2.abs().max(b.2.abs()).max(s.3.max(b.3)),
            };
            if better {
                chosen = Some((pos, s));
            }
        }
        let Some((pos, (f, t, _, _))) = chosen else { break };
        let (path, rows) = leaves.remove(pos);
        let left: Vec<usize> = rows.iter().copied().filter(|&i| x[[i, f]] <= t).collect();
        let right: Vec<usize> = rows.iter().copied().filter(|&i| x[[i, f]] > t).collect();
        let mut lp = path.clone();
        lp.push((f, t, true));
        let mut rp = path;
        rp.push((f, t, false));
        leaves.push((lp, left));
        leaves.push((rp, right));
    }
    build(&leaves, y, 0)
}

pub fn build(leaves: &[(Vec<(usize, f64, bool)>, Vec<usize>)], y: &Array2<f64>, depth: usize) -> Shape {
    if leaves.len() == 1 && leaves[0].0.len() == depth {
        return Shape::Leaf(mean(y, &leaves[0].1));
    }
    let (f, t, _) = leaves[0].0[depth];
    let (l, r): (Vec<_>, Vec<_>) = leaves.iter().cloned().partition(|(p, _)| p[depth].2);
    Shape::Split(f, t, Box::new(build(&l, y, depth + 1)), Box::new(build(&r, y, depth + 1)))
}

pub fn predict<'a>(shape: &'a Shape, q: &[f64]) -> &'a [f64] {
    match shape {
        Shape::Leaf(v) => v,
        Shape::Split(f, t, l, r) => predict(if q[*f] <= *t { l } else { r }, q),
    }
}

pub fn leaf_count(shape: &Shape) -> usize {
    match shape {
        Shape::Leaf(_) => 1,
        Shape::Split(_, _, l, r) => leaf_count(l) + leaf_count(r),
    }
}

pub fn random_dataset(rng: &mut ChaCha8Rng) -> (Array2<f64>, Array2<f64>) {
    let n = rng.gen_range(1..=30);
    let m = rng.gen_range(1..=3);
    let k = rng.gen_range(1..=3);
    // Half of the datasets use a coarse grid so that repeated feature
    // values and tied splits are common.
    let grid = rng.gen_bool(0.5);
    let x = Array2::from_shape_fn((n, m), |_| {
        if grid {
            rng.gen_range(0..4) as f64
        } else {
            rng.gen_range(-1.0..1.0)
        }
    });
    let y = Array2::from_shape_fn((n, k), |_| {
        if grid {
            rng.gen_range(0..3) as f64
        } else {
            rng.gen_range(-2.0..2.0)
        }
    });
    (x, y)
}


/// Fits `x, y` with the learner and compares it with the reference on the
/// training rows and `probes` extra random points.
pub fn check_against_learner(
    x: &Array2<f64>,
    y: &Array2<f64>,
    budget: usize,
    probes: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(), String> {
    let fitted = dtpo_core::tree::fit_regression_tree(x.view(), y.view(), budget).map_err(|e| e.to_string())?;
    let oracle = grow(x, y, budget);
    if fitted.leaf_count() != leaf_count(&oracle) {
        return Err(format!("leaf count {} vs {}", fitted.leaf_count(), leaf_count(&oracle)));
    }
    let mut points: Vec<Vec<f64>> = x.rows().into_iter().map(|r| r.to_vec()).collect();
    for _ in 0..probes {
        points.push((0..x.ncols()).map(|_| rng.gen_range(-1.5..4.5)).collect());
    }
    for q in &points {
        let got = fitted.predict(q).map_err(|e| e.to_string())?;
        if got != predict(&oracle, q) {
            return Err(format!("prediction differs at {q:?}"));
        }
    }
    Ok(())
}
