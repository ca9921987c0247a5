//! Subcommand flags. Each config-backed flag mirrors one field of the
//! owning stage's config; an absent flag keeps the config file's value.

use std::path::PathBuf;

use clap::Args;
use request_core::{
    FeatureConfig, InferenceConfig, PairGenConfig, Similarity, SynthConfig, TrainConfig, TrainMode,
};

/// Copies every flag that was given into the matching config field.
macro_rules! overlay {
    ($args:expr, $cfg:expr, [$($field:ident),* $(,)?]) => {
        $(if let Some(v) = $args.$field.clone() {
            $cfg.$field = v;
        })*
    };
}

#[derive(Debug, Clone, Args)]
pub struct FeatureFlags {
    /// Tokens on each side of a mention used for collocations [default: 3]
    #[arg(long)]
    pub window: Option<usize>,
    /// Brown cluster prefix lengths, comma separated [default: 4,8,12]
    #[arg(long, value_delimiter = ',')]
    pub prefix_lengths: Option<Vec<usize>>,
    /// Brown cluster file (`bitstring token frequency` lines)
    #[arg(long, value_name = "PATH")]
    pub brown: Option<PathBuf>,
}

impl FeatureFlags {
    pub fn apply(&self, cfg: &mut FeatureConfig) {
        overlay!(self, cfg, [window, prefix_lengths]);
    }
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// Target relation types, excluding None [default: 24]
    #[arg(long)]
    pub num_types: Option<usize>,
    /// Training relation mentions [default: 20000]
    #[arg(long)]
    pub num_mentions: Option<usize>,
    /// Test relation mentions [default: 2000]
    #[arg(long)]
    pub num_test_mentions: Option<usize>,
    /// Questions in the QA corpus [default: 500]
    #[arg(long)]
    pub num_questions: Option<usize>,
    /// Indicative words over all types [default: 2400]
    #[arg(long)]
    pub vocab_size: Option<usize>,
    /// Background words [default: 200]
    #[arg(long)]
    pub background_size: Option<usize>,
    /// Indicative words per true-relation mention [default: 10]
    #[arg(long)]
    pub features_per_mention: Option<usize>,
    /// Background words per mention [default: 1]
    #[arg(long)]
    pub background_per_mention: Option<usize>,
    /// Zipf exponent of indicative word choice [default: 1.0]
    #[arg(long)]
    pub zipf_exponent: Option<f64>,
    /// Fraction of mentions whose true label is None [default: 0.2]
    #[arg(long)]
    pub none_fraction: Option<f64>,
    /// Fraction of linkable training mentions given an extra wrong type [default: 0]
    #[arg(long)]
    pub fp_rate: Option<f64>,
    /// Fraction of true-relation training mentions relabeled None [default: 0]
    #[arg(long)]
    pub fn_rate: Option<f64>,
    /// Fraction of each type's indicative words visible to QA [default: 0.5]
    #[arg(long)]
    pub qa_share: Option<f64>,
    /// QA-only indicative words per type [default: 10]
    #[arg(long)]
    pub qa_only_words: Option<usize>,
    /// Positive answer sentences per question [default: 4]
    #[arg(long)]
    pub positives_per_question: Option<usize>,
    /// Negative answer sentences per question [default: 2]
    #[arg(long)]
    pub negatives_per_question: Option<usize>,
    /// Entity names per side [default: 20]
    #[arg(long)]
    pub entity_pool: Option<usize>,
}

impl SynthArgs {
    pub fn apply(&self, cfg: &mut SynthConfig) {
        overlay!(
            self,
            cfg,
            [
                num_types,
                num_mentions,
                num_test_mentions,
                num_questions,
                vocab_size,
                background_size,
                features_per_mention,
                background_per_mention,
                zipf_exponent,
                none_fraction,
                fp_rate,
                fn_rate,
                qa_share,
                qa_only_words,
                positives_per_question,
                negatives_per_question,
                entity_pool,
            ]
        );
    }
}

#[derive(Debug, Clone, Args)]
pub struct PairArgs {
    /// Sentences of the QA corpus (JSON lines)
    #[arg(long, value_name = "PATH")]
    pub qa_sentences: PathBuf,
    /// Question and answer records (JSON lines)
    #[arg(long, value_name = "PATH")]
    pub qa: PathBuf,
    /// Upper bound on negative pairs sampled per sentence [default: 6]
    #[arg(long)]
    pub neg_pairs_per_sentence: Option<usize>,
    /// Also sample negative pairs from positive answer sentences [default: false]
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub sample_negatives_from_positives: Option<bool>,
}

impl PairArgs {
    pub fn apply(&self, cfg: &mut PairGenConfig) {
        overlay!(
            self,
            cfg,
            [neg_pairs_per_sentence, sample_negatives_from_positives]
        );
    }
}

/// A relation corpus plus an optional QA corpus with generated pairs.
#[derive(Debug, Clone, Args)]
pub struct CorpusArgs {
    /// Sentences of the relation corpus (JSON lines)
    #[arg(long, value_name = "PATH")]
    pub sentences: PathBuf,
    /// Relation mentions with candidate types (JSON lines)
    #[arg(long, value_name = "PATH")]
    pub mentions: PathBuf,
    /// Sentences of the QA corpus; omit for relation-only training
    #[arg(long, value_name = "PATH", requires = "qa")]
    pub qa_sentences: Option<PathBuf>,
    /// QA records including generated pairs
    #[arg(long, value_name = "PATH", requires = "qa_sentences")]
    pub qa: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub features: FeatureFlags,
}

#[derive(Debug, Clone, Args)]
pub struct GraphArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub features: FeatureFlags,
}

#[derive(Debug, Clone, Args)]
pub struct StatsArgs {
    /// Graph directory written by build-graph
    #[arg(long, value_name = "DIR")]
    pub graph: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    /// Graph directory written by build-graph
    #[arg(long, value_name = "DIR")]
    pub graph: PathBuf,
    /// Embedding dimension d [default: 50]
    #[arg(long)]
    pub dim: Option<usize>,
    /// Regularization weight lambda [default: 1e-4]
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Negative samples per edge V [default: 3]
    #[arg(long)]
    pub negatives: Option<usize>,
    /// Initial learning rate, decayed linearly to alpha/100 [default: 0.025]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Probability of stepping the relation objective per iteration [default: 0.5]
    #[arg(long)]
    pub re_qa_mix: Option<f64>,
    /// Iterations per training phase [default: 20000000]
    #[arg(long)]
    pub max_iterations: Option<u64>,
    /// Stop when the objective's relative change falls below this [default: 1e-4]
    #[arg(long)]
    pub convergence_tol: Option<f64>,
    /// Iterations between objective evaluations [default: 200000]
    #[arg(long)]
    pub objective_check_every: Option<u64>,
    /// Samples per component per iteration [default: 1]
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// joint, qa_then_re or re_then_qa [default: joint]
    #[arg(long)]
    pub mode: Option<TrainMode>,
}

impl TrainArgs {
    pub fn apply(&self, cfg: &mut TrainConfig) {
        overlay!(
            self,
            cfg,
            [
                dim,
                lambda,
                negatives,
                alpha,
                re_qa_mix,
                max_iterations,
                convergence_tol,
                objective_check_every,
                batch_size,
                mode,
            ]
        );
    }
}

/// A test corpus and the model to score it with.
#[derive(Debug, Clone, Args)]
pub struct ModelInput {
    /// Model file written by train
    #[arg(long, value_name = "PATH")]
    pub model: PathBuf,
    /// Sentences of the test corpus
    #[arg(long, value_name = "PATH")]
    pub sentences: PathBuf,
    /// Test relation mentions
    #[arg(long, value_name = "PATH")]
    pub mentions: PathBuf,
    /// cosine or dot [default: cosine]
    #[arg(long)]
    pub similarity: Option<Similarity>,
    #[command(flatten)]
    pub features: FeatureFlags,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub input: ModelInput,
    /// Best similarity below this predicts None [default: 0.35]
    #[arg(long)]
    pub eta: Option<f64>,
}

impl PredictArgs {
    pub fn apply(&self, cfg: &mut InferenceConfig) {
        overlay!(self, cfg, [eta]);
        overlay!(self.input, cfg, [similarity]);
    }
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    /// Predictions file written by predict
    #[arg(long, value_name = "PATH")]
    pub predictions: PathBuf,
    /// Gold labels, `mention_id<TAB>type` per line
    #[arg(long, value_name = "PATH")]
    pub gold: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: ModelInput,
    /// Gold labels, `mention_id<TAB>type` per line
    #[arg(long, value_name = "PATH")]
    pub gold: PathBuf,
    /// Thresholds to evaluate, comma separated [default: 0,0.05,...,0.9]
    #[arg(long, value_delimiter = ',')]
    pub etas: Option<Vec<f64>>,
}
