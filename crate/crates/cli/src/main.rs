//! `request`: command-line pipeline from corpora to relation-type predictions.

mod args;
mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use crate::args::{
    EvaluateArgs, ExtractArgs, GraphArgs, PairArgs, PredictArgs, StatsArgs, SweepArgs, SynthArgs,
    TrainArgs,
};
use crate::config::PipelineConfig;

#[derive(Debug, Parser)]
#[command(name = "request", version, about = "Relation extraction with indirect supervision from QA")]
pub struct Cli {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true, help_heading = "Global options", value_name = "PATH")]
    config: Option<PathBuf>,
    /// Root seed. Each stage derives its own seed from it by a fixed label.
    #[arg(long, global = true, help_heading = "Global options", value_name = "N")]
    seed: Option<u64>,
    /// Worker threads; 1 runs everything on the calling thread.
    #[arg(long, global = true, help_heading = "Global options", value_name = "N")]
    threads: Option<usize>,
    /// Output directory, created if missing [default: .]
    #[arg(long, global = true, help_heading = "Global options", value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a seeded synthetic relation corpus, test split and QA corpus.
    Synth(SynthArgs),
    /// Turn question/answer sentences into positive and negative QA pairs.
    GenQaPairs(PairArgs),
    /// Write the feature multiset of every relation mention and QA pair.
    ExtractFeatures(ExtractArgs),
    /// Build the feature network from a relation corpus and a QA corpus.
    BuildGraph(GraphArgs),
    /// Report features shared between the two corpora of a graph.
    Stats(StatsArgs),
    /// Learn embeddings for a graph.
    Train(TrainArgs),
    /// Type the mentions of a test corpus with a trained model.
    Predict(PredictArgs),
    /// Score predictions against gold labels.
    Evaluate(EvaluateArgs),
    /// Tabulate precision, recall and F1 over a range of thresholds.
    SweepEta(SweepArgs),
}

/// Settings shared by every subcommand after config and flags are merged.
pub struct Env {
    pub cfg: PipelineConfig,
    pub seed: Option<u64>,
    pub out: PathBuf,
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = PipelineConfig::load(cli.config.as_deref())?;
    if let Some(t) = cli.threads {
        cfg.train.threads = t;
    }
    let threads = cfg.train.threads;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build_global()
        .context("starting worker pool")?;
    let out = cli.out.unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let ctx = Env {
        cfg,
        seed: cli.seed,
        out,
    };
    match cli.command {
        Command::Synth(a) => commands::synth(ctx, a),
        Command::GenQaPairs(a) => commands::gen_qa_pairs(ctx, a),
        Command::ExtractFeatures(a) => commands::extract_features(ctx, a),
        Command::BuildGraph(a) => commands::build_graph(ctx, a),
        Command::Stats(a) => commands::stats(ctx, a),
        Command::Train(a) => commands::train(ctx, a),
        Command::Predict(a) => commands::predict(ctx, a),
        Command::Evaluate(a) => commands::evaluate(ctx, a),
        Command::SweepEta(a) => commands::sweep_eta(ctx, a),
    }
}

/// Usage errors exit with 2 (from clap), pipeline errors with 1.
fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
