use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use dtpo_core::critic::train_epochs;
use dtpo_core::dtpo::{collect_rollouts, Trainer};
use dtpo_core::rng::seeded;
use dtpo_core::tree::fit_regression_tree;
use dtpo_core::{AdamState, AdvantageSet, CriticNet, EnvKind, PolicyTree, TrainConfig};
use ndarray::Array2;
use rand::Rng;

fn tree_fit(c: &mut Criterion) {
    let mut rng = seeded(0, 0);
    let n = 10_000;
    let x = Array2::from_shape_fn((n, 4), |_| rng.gen_range(-1.0..1.0));
    let y = Array2::from_shape_fn((n, 2), |_| rng.gen_range(0.0..1.0));
    let mut group = c.benchmark_group("fit_regression_tree");
    group.sample_size(10);
    for leaves in [4, 16, 64] {
        group.bench_with_input(BenchmarkId::from_parameter(leaves), &leaves, |b, &leaves| {
            b.iter(|| fit_regression_tree(black_box(x.view()), black_box(y.view()), leaves).unwrap())
        });
    }
    group.finish();
}

fn rollouts(c: &mut Criterion) {
    let policy = PolicyTree::uniform(4, 2);
    let critic = CriticNet::new(4, 64, &mut seeded(0, 1));
    c.bench_function("collect_rollouts cartpole 10k", |b| {
        let mut env = EnvKind::CartPole.make();
        let mut rng = seeded(0, 2);
        b.iter(|| collect_rollouts(env.as_mut(), &policy, &critic, 10_000, &mut rng).unwrap())
    });
}

fn critic(c: &mut Criterion) {
    let policy = PolicyTree::uniform(4, 2);
    let mut rng = seeded(0, 3);
    let base = CriticNet::new(4, 64, &mut rng);
    let mut env = EnvKind::CartPole.make();
    let batch = collect_rollouts(env.as_mut(), &policy, &base, 10_000, &mut rng).unwrap();
    let adv = AdvantageSet::from_batch(&batch, 0.99, 0.95);
    let mut group = c.benchmark_group("critic");
    group.sample_size(10);
    group.bench_function("train_epochs 4x64 over 10k", |b| {
        b.iter(|| {
            let mut net = base.clone();
            let mut adam = AdamState::new(net.params().len());
            train_epochs(&mut net, &mut adam, batch.observations.view(), &adv.value_targets, 4, 64, 0.2, &mut rng)
        })
    });
    group.finish();
}

fn iteration(c: &mut Criterion) {
    let mut group = c.benchmark_group("dtpo iteration");
    group.sample_size(10);
    for kind in [EnvKind::CartPole, EnvKind::Xor] {
        let config = TrainConfig {
            eval_every: usize::MAX,
            eval_rollouts: 1,
            ..TrainConfig::default()
        };
        let mut trainer = Trainer::new(kind, config).unwrap();
        group.bench_function(kind.name(), |b| b.iter(|| trainer.step().unwrap()));
    }
    group.finish();
}

criterion_group!(benches, tree_fit, rollouts, critic, iteration);
criterion_main!(benches);
