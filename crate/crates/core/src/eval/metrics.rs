use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::corpus::NONE_TYPE;
use crate::error::{Error, Result};
use crate::inference::{decide_all, ScoredMention};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TypeMetrics {
    pub predicted: usize,
    pub gold: usize,
    pub correct: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl TypeMetrics {
    fn finish(&mut self) {
        self.precision = ratio(self.correct, self.predicted);
        self.recall = ratio(self.correct, self.gold);
        self.f1 = f1(self.precision, self.recall);
    }
}

/// Mention-level precision, recall and F1 over non-`None` labels.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Mentions predicted with a target type.
    pub predicted: usize,
    /// Mentions whose gold label is a target type.
    pub gold: usize,
    /// Target-type predictions equal to the gold type.
    pub correct: usize,
    pub per_type: BTreeMap<String, TypeMetrics>,
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

fn f1(p: f64, r: f64) -> f64 {
    if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    }
}

/// Scores `(mention id, type)` predictions against gold labels. Both lists
/// must cover the same mention ids exactly once.
pub fn evaluate(
    predictions: &[(String, String)],
    gold: &[(String, String)],
) -> Result<MetricsReport> {
    let mut gold_of: HashMap<&str, &str> = HashMap::with_capacity(gold.len());
    for (id, t) in gold {
        if gold_of.insert(id, t).is_some() {
            return Err(Error::Validation(format!("duplicate gold mention {id:?}")));
        }
    }
    if predictions.len() != gold.len() {
        return Err(Error::Validation(format!(
            "{} predictions for {} gold mentions",
            predictions.len(),
            gold.len()
        )));
    }
    let mut seen = HashMap::with_capacity(predictions.len());
    let mut report = MetricsReport::default();
    for (id, pred) in predictions {
        let g = *gold_of
            .get(id.as_str())
            .ok_or_else(|| Error::Validation(format!("no gold label for {id:?}")))?;
        if seen.insert(id.as_str(), ()).is_some() {
            return Err(Error::Validation(format!(
                "duplicate prediction for {id:?}"
            )));
        }
        if g != NONE_TYPE {
            report.gold += 1;
            report.per_type.entry(g.to_string()).or_default().gold += 1;
        }
        if pred != NONE_TYPE {
            report.predicted += 1;
            let e = report.per_type.entry(pred.clone()).or_default();
            e.predicted += 1;
            if pred == g {
                report.correct += 1;
                e.correct += 1;
            }
        }
    }
    report.precision = ratio(report.correct, report.predicted);
    report.recall = ratio(report.correct, report.gold);
    report.f1 = f1(report.precision, report.recall);
    report.per_type.values_mut().for_each(TypeMetrics::finish);
    Ok(report)
}

impl MetricsReport {
    /// Aligned plain-text table: overall row first, then one row per type.
    pub fn to_table(&self) -> String {
        let width = self
            .per_type
            .keys()
            .map(String::len)
            .max()
            .unwrap_or(0)
            .max("overall".len());
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<width$}  {:>9}  {:>9}  {:>9}  {:>9}  {:>9}  {:>9}",
            "type", "precision", "recall", "f1", "predicted", "gold", "correct"
        );
        let mut row = |name: &str, p: f64, r: f64, f: f64, np: usize, ng: usize, nc: usize| {
            let _ = writeln!(
                s,
                "{name:<width$}  {p:>9.4}  {r:>9.4}  {f:>9.4}  {np:>9}  {ng:>9}  {nc:>9}"
            );
        };
        row(
            "overall",
            self.precision,
            self.recall,
            self.f1,
            self.predicted,
            self.gold,
            self.correct,
        );
        for (t, m) in &self.per_type {
            row(
                t,
                m.precision,
                m.recall,
                m.f1,
                m.predicted,
                m.gold,
                m.correct,
            );
        }
        s
    }
}

/// Metrics at each threshold in `etas`.
pub fn sweep_eta(
    scored: &[ScoredMention],
    types: &[String],
    gold: &[(String, String)],
    etas: &[f64],
) -> Result<Vec<(f64, MetricsReport)>> {
    etas.iter()
        .map(|&eta| {
            let preds: Vec<(String, String)> = decide_all(scored, types, eta)
                .into_iter()
                .map(|r| (r.mention_id, r.predicted))
                .collect();
            Ok((eta, evaluate(&preds, gold)?))
        })
        .collect()
}
