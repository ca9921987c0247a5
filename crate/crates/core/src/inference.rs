//! Relation type inference for unseen relation mentions.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{LabeledCorpus, NONE_TYPE, NONE_TYPE_ID};
use crate::error::{Error, Result};
use crate::features::{extract_features, BrownClusterMap, FeatureConfig, FeatureVector};
use crate::graph::FeatureVocabulary;
use crate::scalar::{dot, norm_sq, Scalar};
use crate::train::{Matrix, Model};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Similarity {
    #[default]
    Cosine,
    Dot,
}

impl std::str::FromStr for Similarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cosine" => Ok(Similarity::Cosine),
            "dot" => Ok(Similarity::Dot),
            other => Err(Error::Config(format!("unknown similarity {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InferenceConfig {
    /// Best similarity below this predicts `None`.
    pub eta: f64,
    pub similarity: Similarity,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        InferenceConfig {
            eta: 0.35,
            similarity: Similarity::Cosine,
        }
    }
}

/// Sum of the feature rows of every known feature, weighted by
/// multiplicity, and the number of distinct known features.
pub fn embed_test_mention<T: Scalar>(
    features: &FeatureVector,
    feature_rows: &Matrix<T>,
    vocab: &FeatureVocabulary,
) -> (Vec<T>, usize) {
    let mut z = vec![T::zero(); feature_rows.cols()];
    let mut known = 0;
    for (f, n) in features.iter() {
        if let Some(id) = vocab.id(f) {
            known += 1;
            let w = T::of(f64::from(n));
            for (x, &c) in z.iter_mut().zip(feature_rows.row(id as usize)) {
                *x += w * c;
            }
        }
    }
    (z, known)
}

/// Best target type and its similarity, ignoring the threshold. `None` only
/// for a zero vector.
pub fn best_type<T: Scalar>(
    z: &[T],
    types: &Matrix<T>,
    similarity: Similarity,
) -> Option<(usize, f64)> {
    let zn = norm_sq(z).as_f64().sqrt();
    if zn == 0.0 {
        return None;
    }
    let mut best: Option<(usize, f64)> = None;
    for t in (0..types.rows()).filter(|&t| t != NONE_TYPE_ID) {
        let r = types.row(t);
        let d = dot(z, r).as_f64();
        let s = match similarity {
            Similarity::Dot => d,
            Similarity::Cosine => {
                let rn = norm_sq(r).as_f64().sqrt();
                if rn == 0.0 {
                    0.0
                } else {
                    d / (zn * rn)
                }
            }
        };
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((t, s));
        }
    }
    best
}

/// Nearest target type, or `None` (returned as `(None, score)`) when the
/// vector is zero or the best similarity is below `eta`.
pub fn predict_type<T: Scalar>(
    z: &[T],
    types: &Matrix<T>,
    cfg: &InferenceConfig,
) -> (Option<usize>, f64) {
    match best_type(z, types, cfg.similarity) {
        None => (None, 0.0),
        Some((t, s)) if s >= cfg.eta => (Some(t), s),
        Some((_, s)) => (None, s),
    }
}

/// Per-mention result before thresholding.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredMention {
    pub mention_id: String,
    pub best: Option<(usize, f64)>,
    pub known_features: usize,
}

impl ScoredMention {
    pub fn decide(&self, eta: f64) -> Option<usize> {
        self.best.filter(|&(_, s)| s >= eta).map(|(t, _)| t)
    }

    pub fn score(&self) -> f64 {
        self.best.map_or(0.0, |(_, s)| s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRecord {
    pub mention_id: String,
    /// Type name, `None` for the non-target type.
    pub predicted: String,
    pub score: f64,
    pub known_features: usize,
}

/// Checks that the model's feature rows line up with the vocabulary.
pub fn check_vocabulary<T: Scalar>(model: &Model<T>, vocab: &FeatureVocabulary) -> Result<()> {
    if model.features.len() != vocab.len() {
        return Err(Error::Mismatch(format!(
            "model has {} feature rows, vocabulary has {} features",
            model.features.len(),
            vocab.len()
        )));
    }
    if let Some(i) = (0..vocab.len()).find(|&i| model.features[i] != vocab.name(i as u32)) {
        return Err(Error::Mismatch(format!(
            "feature {i} is {:?} in the model",
            model.features[i]
        )));
    }
    Ok(())
}

/// Embeds and scores every mention of a test corpus.
pub fn score_corpus<T: Scalar>(
    test: &LabeledCorpus,
    model: &Model<T>,
    vocab: &FeatureVocabulary,
    feature_cfg: &FeatureConfig,
    brown: &BrownClusterMap,
    similarity: Similarity,
) -> Result<Vec<ScoredMention>> {
    check_vocabulary(model, vocab)?;
    test.mentions
        .par_iter()
        .map(|m| {
            let s = test
                .sentence(&m.m1.sentence_id)
                .ok_or_else(|| Error::Integrity(format!("mention {:?}: unknown sentence", m.id)))?;
            let fv = extract_features(&m.m1, &m.m2, s, brown, feature_cfg)?;
            let (z, known) = embed_test_mention(&fv, &model.store.c, vocab);
            Ok(ScoredMention {
                mention_id: m.id.clone(),
                best: best_type(&z, &model.store.r, similarity),
                known_features: known,
            })
        })
        .collect()
}

/// Applies threshold `eta` and names the predicted types.
pub fn decide_all(scored: &[ScoredMention], types: &[String], eta: f64) -> Vec<PredictionRecord> {
    scored
        .iter()
        .map(|s| PredictionRecord {
            mention_id: s.mention_id.clone(),
            predicted: s
                .decide(eta)
                .map_or_else(|| NONE_TYPE.to_string(), |t| types[t].clone()),
            score: s.score(),
            known_features: s.known_features,
        })
        .collect()
}

pub fn predict_corpus<T: Scalar>(
    test: &LabeledCorpus,
    model: &Model<T>,
    vocab: &FeatureVocabulary,
    feature_cfg: &FeatureConfig,
    brown: &BrownClusterMap,
    cfg: &InferenceConfig,
) -> Result<Vec<PredictionRecord>> {
    let scored = score_corpus(test, model, vocab, feature_cfg, brown, cfg.similarity)?;
    Ok(decide_all(&scored, &model.types, cfg.eta))
}

/// Tab-separated `mention_id predicted_type score known_features` lines.
pub fn predictions_to_tsv(records: &[PredictionRecord]) -> String {
    let mut out = String::new();
    for r in records {
        writeln!(
            out,
            "{}\t{}\t{}\t{}",
            r.mention_id, r.predicted, r.score, r.known_features
        )
        .expect("String write");
    }
    out
}

pub fn write_predictions(path: &Path, records: &[PredictionRecord]) -> Result<()> {
    fs::write(path, predictions_to_tsv(records)).map_err(|e| Error::io(path, e))
}

/// Reads a predictions or gold file: the first two tab-separated columns
/// are the mention id and the type name.
pub fn read_labels(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let mut cols = l.split('\t');
            match (cols.next(), cols.next()) {
                (Some(id), Some(t)) if !id.is_empty() && !t.is_empty() => {
                    Ok((id.to_string(), t.to_string()))
                }
                _ => Err(Error::parse(path, i + 1, "expected `mention_id<TAB>type`")),
            }
        })
        .collect()
}
