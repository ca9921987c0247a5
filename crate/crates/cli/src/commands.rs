//! One function per subcommand. Every output lands in the `--out`
//! directory under a fixed file name.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{ensure, Context, Result};
use request_core::corpus::{load_qa_corpus, load_re_corpus, save_qa_corpus, save_qa_records, save_re_corpus};
use request_core::eval::sweep_eta as sweep;
use request_core::inference::{score_corpus, write_predictions, read_labels};
use request_core::rng::derive_seed;
use request_core::train::{read_model, write_model};
use request_core::{
    build_graph as build, evaluate as score, extract_features as extract, generate_pairs,
    generate_synthetic, predict_corpus, shared_feature_stats, BrownClusterMap, FeatureConfig,
    FeatureVocabulary, HeterogeneousGraph, LabeledCorpus, Model, QACorpus,
};
use serde_json::json;

use crate::args::{
    CorpusArgs, EvaluateArgs, ExtractArgs, FeatureFlags, GraphArgs, ModelInput, PairArgs,
    PredictArgs, StatsArgs, SweepArgs, SynthArgs, TrainArgs,
};
use crate::config::ensure_distinct;
use crate::Env;

pub const TRAIN_SENTENCES: &str = "train_sentences.jsonl";
pub const TRAIN_MENTIONS: &str = "train_mentions.jsonl";
pub const TEST_SENTENCES: &str = "test_sentences.jsonl";
pub const TEST_MENTIONS: &str = "test_mentions.jsonl";
pub const GOLD: &str = "gold.tsv";
pub const QA_SENTENCES: &str = "qa_sentences.jsonl";
pub const QA_RECORDS: &str = "qa.jsonl";
pub const QA_PAIRS: &str = "qa_pairs.jsonl";
pub const PAIR_REPORT: &str = "pair_report.json";
pub const FEATURES: &str = "features.jsonl";
pub const STATS: &str = "stats.json";
pub const MODEL: &str = "model.txt";
pub const TRAIN_LOG: &str = "train_log.csv";
pub const PREDICTIONS: &str = "predictions.tsv";
pub const METRICS: &str = "metrics.json";
pub const SWEEP: &str = "sweep.tsv";

impl Env {
    /// The stage seed: derived from `--seed` when given, else the config value.
    fn seed(&self, label: &str, configured: u64) -> u64 {
        self.seed.map_or(configured, |root| derive_seed(root, label))
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn features(&self, flags: &FeatureFlags) -> Result<(FeatureConfig, BrownClusterMap)> {
        let mut cfg = self.cfg.features.clone();
        flags.apply(&mut cfg);
        cfg.validate()?;
        let brown = match flags.brown.as_ref().or(self.cfg.paths.brown.as_ref()) {
            Some(p) => BrownClusterMap::load(p)?,
            None => BrownClusterMap::new(),
        };
        Ok((cfg, brown))
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_corpora(c: &CorpusArgs) -> Result<(LabeledCorpus, QACorpus)> {
    let re = load_re_corpus(&c.sentences, &c.mentions)?;
    let qa = match (&c.qa_sentences, &c.qa) {
        (Some(s), Some(q)) => load_qa_corpus(s, q)?,
        _ => QACorpus::default(),
    };
    Ok((re, qa))
}

pub fn synth(env: Env, args: SynthArgs) -> Result<()> {
    let mut cfg = env.cfg.synth.clone();
    args.apply(&mut cfg);
    cfg.seed = env.seed("synth", cfg.seed);
    let data = generate_synthetic(&cfg)?;
    save_re_corpus(&data.train, &env.path(TRAIN_SENTENCES), &env.path(TRAIN_MENTIONS))?;
    save_re_corpus(&data.test, &env.path(TEST_SENTENCES), &env.path(TEST_MENTIONS))?;
    let mut gold = String::new();
    for (id, t) in &data.gold {
        writeln!(gold, "{id}\t{t}")?;
    }
    write(&env.path(GOLD), &gold)?;
    save_qa_corpus(&data.qa, &env.path(QA_SENTENCES), &env.path(QA_RECORDS))?;
    eprintln!(
        "synth: {} training mentions, {} test mentions, {} questions -> {}",
        data.train.mentions.len(),
        data.test.mentions.len(),
        data.qa.questions.len(),
        env.out.display()
    );
    Ok(())
}

pub fn gen_qa_pairs(env: Env, args: PairArgs) -> Result<()> {
    let mut cfg = env.cfg.pairs.clone();
    args.apply(&mut cfg);
    cfg.seed = env.seed("pairs", cfg.seed);
    let (out_pairs, out_report) = (env.path(QA_PAIRS), env.path(PAIR_REPORT));
    ensure_distinct(
        &[&args.qa_sentences, &args.qa],
        &[out_pairs.clone(), out_report.clone()],
    )?;
    let corpus = load_qa_corpus(&args.qa_sentences, &args.qa)?;
    let (with_pairs, report) = generate_pairs(&corpus, &cfg)?;
    save_qa_records(&with_pairs, &out_pairs)?;
    write(&out_report, &(serde_json::to_string_pretty(&report)? + "\n"))?;
    eprintln!(
        "gen-qa-pairs: {} positive and {} negative pairs from {} questions ({} without entity, {} positive sentences dropped)",
        report.positive_pairs,
        report.negative_pairs,
        report.questions_processed,
        report.questions_without_entity,
        report.positive_sentences_dropped
    );
    Ok(())
}

pub fn extract_features(env: Env, args: ExtractArgs) -> Result<()> {
    let (cfg, brown) = env.features(&args.features)?;
    let (re, qa) = load_corpora(&args.corpus)?;
    let mut out = String::new();
    let mut emit = |side: &str, id: &str, fv: request_core::FeatureVector| -> Result<()> {
        let features: BTreeMap<&str, u32> = fv.iter().collect();
        let line = json!({ "side": side, "id": id, "features": features });
        writeln!(out, "{line}")?;
        Ok(())
    };
    for m in &re.mentions {
        let s = re
            .sentence(&m.m1.sentence_id)
            .with_context(|| format!("mention {}: unknown sentence", m.id))?;
        emit("re", &m.id, extract(&m.m1, &m.m2, s, &brown, &cfg)?)?;
    }
    for p in &qa.pairs {
        let s = qa
            .sentence(&p.m1.sentence_id)
            .with_context(|| format!("pair {}: unknown sentence", p.id))?;
        emit("qa", &p.id, extract(&p.m1, &p.m2, s, &brown, &cfg)?)?;
    }
    write(&env.path(FEATURES), &out)?;
    eprintln!(
        "extract-features: {} mentions, {} pairs",
        re.mentions.len(),
        qa.pairs.len()
    );
    Ok(())
}

pub fn build_graph(env: Env, args: GraphArgs) -> Result<()> {
    let (cfg, brown) = env.features(&args.features)?;
    let (re, qa) = load_corpora(&args.corpus)?;
    let g = build(&re, &qa, &cfg, &brown)?;
    g.save(&env.out)?;
    eprintln!(
        "build-graph: {} features ({} relation, {} QA, {} shared), {} + {} edges",
        g.vocab.len(),
        g.vocab.re_size(),
        g.vocab.qa_size(),
        g.vocab.shared_size(),
        g.re.edges.len(),
        g.qa.edges.len()
    );
    Ok(())
}

pub fn stats(env: Env, args: StatsArgs) -> Result<()> {
    let g = HeterogeneousGraph::load(&args.graph)?;
    let s = shared_feature_stats(&g);
    write(&env.path(STATS), &(serde_json::to_string_pretty(&s)? + "\n"))?;
    for (name, side) in [("relation", &s.re), ("qa", &s.qa)] {
        println!(
            "{name:<8} vocabulary {:>7}  shared {:>7}  distinct {:>6.1}%  occurrence {:>6.1}%",
            side.vocabulary, side.shared, side.distinct_pct, side.occurrence_pct
        );
    }
    Ok(())
}

pub fn train(env: Env, args: TrainArgs) -> Result<()> {
    let mut cfg = env.cfg.train.clone();
    args.apply(&mut cfg);
    cfg.seed = env.seed("train", cfg.seed);
    let g = HeterogeneousGraph::load(&args.graph)?;
    if !g.has_qa() && cfg.mode != request_core::TrainMode::Joint {
        eprintln!("train: graph has no QA pairs, running relation-only training");
    }
    let (store, log) = request_core::train::<f64>(&g, &cfg)?;
    write_model(&Model::from_graph(store, &g), &env.path(MODEL))?;
    write(&env.path(TRAIN_LOG), &log.to_csv())?;
    let last = log.final_objective().context("training log is empty")?;
    eprintln!(
        "train: {} iterations, objective {:.4} (relation {:.4}, qa {:.4}), {}",
        log.iterations,
        last.total,
        last.re,
        last.qa,
        if log.converged {
            "converged"
        } else {
            "stopped at max_iterations"
        }
    );
    Ok(())
}

fn load_for_scoring(
    env: &Env,
    input: &ModelInput,
) -> Result<(Model<f64>, FeatureVocabulary, LabeledCorpus, FeatureConfig, BrownClusterMap)> {
    let (cfg, brown) = env.features(&input.features)?;
    let model = read_model::<f64>(&input.model)?;
    let vocab = FeatureVocabulary::from_names(model.features.clone());
    let test = load_re_corpus(&input.sentences, &input.mentions)?;
    Ok((model, vocab, test, cfg, brown))
}

pub fn predict(env: Env, args: PredictArgs) -> Result<()> {
    let mut inf = env.cfg.inference.clone();
    args.apply(&mut inf);
    ensure!(inf.eta.is_finite(), "eta must be finite");
    let (model, vocab, test, cfg, brown) = load_for_scoring(&env, &args.input)?;
    let records = predict_corpus(&test, &model, &vocab, &cfg, &brown, &inf)?;
    write_predictions(&env.path(PREDICTIONS), &records)?;
    let typed = records.iter().filter(|r| r.predicted != request_core::NONE_TYPE).count();
    eprintln!(
        "predict: {} mentions, {typed} typed, {} None",
        records.len(),
        records.len() - typed
    );
    Ok(())
}

pub fn evaluate(env: Env, args: EvaluateArgs) -> Result<()> {
    let pred = read_labels(&args.predictions)?;
    let gold = read_labels(&args.gold)?;
    let report = score(&pred, &gold)?;
    write(&env.path(METRICS), &(serde_json::to_string_pretty(&report)? + "\n"))?;
    print!("{}", report.to_table());
    Ok(())
}

pub fn sweep_eta(env: Env, args: SweepArgs) -> Result<()> {
    let mut similarity = env.cfg.inference.similarity;
    if let Some(s) = args.input.similarity {
        similarity = s;
    }
    let etas = args
        .etas
        .clone()
        .unwrap_or_else(|| (0..=18).map(|i| f64::from(i) / 20.0).collect());
    ensure!(etas.iter().all(|e| e.is_finite()), "thresholds must be finite");
    let (model, vocab, test, cfg, brown) = load_for_scoring(&env, &args.input)?;
    let gold = read_labels(&args.gold)?;
    let scored = score_corpus(&test, &model, &vocab, &cfg, &brown, similarity)?;
    let rows = sweep(&scored, &model.types, &gold, &etas)?;
    let mut out = String::from("eta\tprecision\trecall\tf1\n");
    for (eta, r) in &rows {
        writeln!(out, "{eta}\t{}\t{}\t{}", r.precision, r.recall, r.f1)?;
    }
    write(&env.path(SWEEP), &out)?;
    print!("{out}");
    if let Some((eta, best)) = rows.iter().max_by(|a, b| a.1.f1.total_cmp(&b.1.f1)) {
        eprintln!("sweep-eta: best F1 {:.4} at eta {eta}", best.f1);
    }
    Ok(())
}
