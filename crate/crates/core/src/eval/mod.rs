//! Evaluation metrics and synthetic corpora.

pub mod metrics;
pub mod synth;

pub use metrics::{evaluate, sweep_eta, MetricsReport, TypeMetrics};
pub use synth::{generate_synthetic, type_name, SynthConfig, SyntheticData};
