use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use dtpo_core::dtpo::{train_with, write_csv};
use dtpo_core::rng::final_evaluation_seed;
use dtpo_core::tree::{to_dot, TreeDocument};
use dtpo_core::{evaluate, EnvKind, PolicyTree};

mod config;

use config::RunSettings;

/// Train, evaluate and export decision-tree policies.
#[derive(Debug, Parser)]
#[command(name = "dtpo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train one policy per seed and evaluate the best of each.
    Train(TrainArgs),
    /// Evaluate a saved policy greedily.
    Evaluate(EvaluateArgs),
    /// Train across leaf budgets and seeds, writing sweep.csv.
    Sweep(SweepArgs),
    /// Write a saved policy as a Graphviz digraph.
    ExportDot(ExportArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Environment name (cartpole, cartpole-swingup, pendulum, frozenlake4x4,
    /// frozenlake8x8, blackjack, xor).
    #[arg(long)]
    env: Option<String>,
    /// Flat TOML file with any of these options; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, conflicts_with = "seeds")]
    seed: Option<u64>,
    /// Comma-separated list of seeds.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(long)]
    iterations: Option<usize>,
    /// Environment steps collected per iteration.
    #[arg(long)]
    timesteps: Option<usize>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    eval_every: Option<usize>,
    #[arg(long)]
    eval_rollouts: Option<usize>,
    /// Rollouts for the final evaluation of each trained policy.
    #[arg(long)]
    rollouts: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write 0 in the `seconds` metrics column.
    #[arg(long)]
    no_wall_time: bool,
    /// Suppress progress output.
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Maximum number of leaves.
    #[arg(long)]
    leaves: Option<usize>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated leaf budgets.
    #[arg(long, value_delimiter = ',')]
    leaves: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    env: String,
    /// Policy JSON written by `train`.
    #[arg(long)]
    policy: PathBuf,
    #[arg(long, default_value_t = config::DEFAULT_ROLLOUTS)]
    rollouts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct ExportArgs {
    /// Policy JSON written by `train`.
    #[arg(long)]
    policy: PathBuf,
    /// Destination file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CommonArgs {
    fn settings(&self) -> Result<RunSettings> {
        let mut s = RunSettings::default();
        if let Some(path) = &self.config {
            s.apply_file(path)?;
        }
        if let Some(env) = &self.env {
            s.env = Some(env.parse::<EnvKind>()?);
        }
        if let Some(seed) = self.seed {
            s.seeds = vec![seed];
        }
        if let Some(seeds) = &self.seeds {
            s.seeds = seeds.clone();
        }
        let t = &mut s.train;
        macro_rules! set {
            ($($field:ident => $target:expr),*) => {
                $(if let Some(v) = self.$field { $target = v; })*
            };
        }
        set!(iterations => t.iterations, timesteps => t.timesteps, eta => t.eta,
             gamma => t.gamma, lambda => t.lambda, eval_every => t.eval_every,
             eval_rollouts => t.eval_rollouts, rollouts => s.rollouts);
        if self.no_wall_time {
            s.train.record_wall_time = false;
        }
        if let Some(out) = &self.out {
            s.out = out.clone();
        }
        if s.seeds.is_empty() {
            anyhow::bail!("at least one seed is required");
        }
        Ok(s)
    }
}

/// Result of training and evaluating one seed.
struct SeedResult {
    policy: PolicyTree,
    mean: f64,
    stderr: f64,
}

fn train_seed(kind: EnvKind, s: &RunSettings, seed: u64, quiet: bool, write_metrics: Option<&Path>) -> Result<SeedResult> {
    let mut cfg = s.train.clone();
    cfg.seed = seed;
    let label = format!("{kind} seed {seed} leaves {}", cfg.leaves);
    let outcome = train_with(kind, &cfg, |m| {
        if !quiet {
            if let Some(ret) = m.det_eval_return {
                eprintln!(
                    "[{label}] iter {:>5}  eval {ret:>9.3}  best {:>9.3}  leaves {:>3}",
                    m.iteration, m.best_return, m.leaves
                );
            }
        }
    })?;
    if let Some(path) = write_metrics {
        let mut file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_csv(&mut file, &outcome.history)?;
        file.flush()?;
    }
    let report = evaluate(kind, &outcome.policy, s.rollouts, final_evaluation_seed(seed))?;
    Ok(SeedResult {
        policy: outcome.policy,
        mean: report.mean,
        stderr: report.stderr,
    })
}

fn policy_document(kind: EnvKind, policy: &PolicyTree) -> Result<TreeDocument> {
    let spec = kind.spec();
    Ok(TreeDocument::new(policy.tree(), spec.feature_names, spec.action_names)?)
}

fn run_train(args: &TrainArgs) -> Result<()> {
    let mut s = args.common.settings()?;
    if let Some(leaves) = args.leaves {
        s.train.leaves = leaves;
    }
    let kind = s.env()?;
    fs::create_dir_all(&s.out).with_context(|| format!("creating {}", s.out.display()))?;
    for &seed in &s.seeds {
        let metrics = s.out.join(format!("metrics_{seed}.csv"));
        let result = train_seed(kind, &s, seed, args.common.quiet, Some(&metrics))?;
        let doc = policy_document(kind, &result.policy)?;
        fs::write(s.out.join(format!("policy_{seed}.json")), doc.to_json())?;
        let dot = to_dot(result.policy.tree(), &doc.feature_names, &doc.action_names, result.policy.mode());
        fs::write(s.out.join(format!("policy_{seed}.dot")), dot)?;
        println!(
            "{kind} seed {seed}: {:.3} ± {:.3} over {} rollouts ({} leaves)",
            result.mean,
            result.stderr,
            s.rollouts,
            result.policy.leaf_count()
        );
    }
    Ok(())
}

fn run_sweep(args: &SweepArgs) -> Result<()> {
    let mut s = args.common.settings()?;
    if let Some(leaves) = &args.leaves {
        s.budgets = leaves.clone();
    }
    s.budgets.sort_unstable();
    s.budgets.dedup();
    let kind = s.env()?;
    fs::create_dir_all(&s.out).with_context(|| format!("creating {}", s.out.display()))?;
    let path = s.out.join("sweep.csv");
    let mut file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    writeln!(file, "env,leaves,seed,return")?;
    for &budget in &s.budgets {
        let mut run = s.clone();
        run.train.leaves = budget;
        for &seed in &s.seeds {
            let result = train_seed(kind, &run, seed, args.common.quiet, None)?;
            writeln!(file, "{kind},{budget},{seed},{}", result.mean)?;
            file.flush()?;
            println!("{kind} leaves {budget} seed {seed}: {:.3} ± {:.3}", result.mean, result.stderr);
        }
    }
    Ok(())
}

fn load_policy(path: &Path) -> Result<(TreeDocument, PolicyTree)> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let doc = TreeDocument::from_json(&bytes).with_context(|| format!("parsing {}", path.display()))?;
    let policy = doc.to_policy()?;
    Ok((doc, policy))
}

fn run_evaluate(args: &EvaluateArgs) -> Result<()> {
    let kind: EnvKind = args.env.parse()?;
    let (_, policy) = load_policy(&args.policy)?;
    let report = evaluate(kind, &policy, args.rollouts, args.seed)?;
    println!("{kind}: {report} over {} rollouts", report.rollouts);
    Ok(())
}

fn run_export(args: &ExportArgs) -> Result<()> {
    let (doc, policy) = load_policy(&args.policy)?;
    let merged = policy.merge_redundant();
    let dot = to_dot(merged.tree(), &doc.feature_names, &doc.action_names, merged.mode());
    match &args.out {
        Some(path) => fs::write(path, dot).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{dot}"),
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Train(a) => run_train(a),
        Command::Evaluate(a) => run_evaluate(a),
        Command::Sweep(a) => run_sweep(a),
        Command::ExportDot(a) => run_export(a),
    }
}
