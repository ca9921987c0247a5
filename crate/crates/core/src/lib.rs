//! Relation extraction with indirect supervision from question answering.
//!
//! Relation mentions, QA entity-mention pairs, lexical features and relation
//! types are embedded into one space. Relation mentions are fit to their
//! noisy candidate types with a partial-label hinge loss, QA pairs of the same
//! question are pulled together with a pairwise margin loss, and both corpora
//! share feature embeddings. Unseen mentions are typed by the nearest type
//! embedding.
//!
//! The numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the scalar for common use.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod graph;
pub mod inference;
pub mod qa_pairs;
pub mod rng;
pub mod scalar;
pub mod train;

pub use corpus::{
    EntityMention, LabeledCorpus, Polarity, QACorpus, QAPair, RelationMention, Sentence, Span,
    NONE_TYPE, NONE_TYPE_ID,
};
pub use error::{Error, Result};
pub use eval::{evaluate, generate_synthetic, MetricsReport, SynthConfig, SyntheticData};
pub use features::{extract_features, BrownClusterMap, FeatureConfig, FeatureVector};
pub use graph::{
    build_graph, shared_feature_stats, FeatureVocabulary, HeterogeneousGraph, SharedFeatureStats,
};
pub use inference::{predict_corpus, InferenceConfig, PredictionRecord, Similarity};
pub use qa_pairs::{generate_pairs, GenerationReport, PairGenConfig};
pub use scalar::Scalar;
pub use train::{train, Model, Objective, TrainConfig, TrainLog, TrainMode};

/// Embedding store in double precision.
pub type EmbeddingStore = train::Store<f64>;
pub type EmbeddingStoreF32 = train::Store<f32>;
pub type Model64 = train::Model<f64>;
pub type Model32 = train::Model<f32>;
pub type Matrix64 = train::Matrix<f64>;
pub type Matrix32 = train::Matrix<f32>;
