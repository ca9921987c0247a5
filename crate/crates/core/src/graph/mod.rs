//! Heterogeneous network of relation mentions, QA pairs, text features and
//! relation types, with the samplers the trainer draws from.

mod alias;
mod persist;

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use alias::AliasTable;

use crate::corpus::{LabeledCorpus, Polarity, QACorpus};
use crate::error::{Error, Result};
use crate::features::{extract_features, BrownClusterMap, FeatureConfig, FeatureVector};

/// Exponent of the negative-sampling noise distribution over `D_f`.
pub const NOISE_EXPONENT: f64 = 0.75;

/// Union feature vocabulary with per-corpus membership and counts.
///
/// Ids are assigned in lexicographic order of the feature strings.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeatureVocabulary {
    strings: Vec<String>,
    index: HashMap<String, u32>,
    /// Number of relation mentions co-occurring with each feature.
    pub d_f_re: Vec<u32>,
    /// Number of QA pairs co-occurring with each feature.
    pub d_f_qa: Vec<u32>,
}

impl FeatureVocabulary {
    fn from_parts(strings: Vec<String>, d_f_re: Vec<u32>, d_f_qa: Vec<u32>) -> Self {
        let index = strings
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u32))
            .collect();
        FeatureVocabulary {
            strings,
            index,
            d_f_re,
            d_f_qa,
        }
    }

    /// Vocabulary over `names` (in the given id order) with no counts, e.g.
    /// rebuilt from a model file.
    pub fn from_names(names: Vec<String>) -> Self {
        let n = names.len();
        Self::from_parts(names, vec![0; n], vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }

    pub fn id(&self, feature: &str) -> Option<u32> {
        self.index.get(feature).copied()
    }

    pub fn name(&self, id: u32) -> &str {
        &self.strings[id as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.strings
    }

    pub fn in_re(&self, id: u32) -> bool {
        self.d_f_re[id as usize] > 0
    }

    pub fn in_qa(&self, id: u32) -> bool {
        self.d_f_qa[id as usize] > 0
    }

    pub fn is_shared(&self, id: u32) -> bool {
        self.in_re(id) && self.in_qa(id)
    }

    /// `M_z`, the number of features seen in relation mentions.
    pub fn re_size(&self) -> usize {
        self.d_f_re.iter().filter(|&&d| d > 0).count()
    }

    /// `M_QA`, the number of features seen in QA pairs.
    pub fn qa_size(&self) -> usize {
        self.d_f_qa.iter().filter(|&&d| d > 0).count()
    }

    pub fn shared_size(&self) -> usize {
        (0..self.len() as u32)
            .filter(|&f| self.is_shared(f))
            .count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub object: u32,
    pub feature: u32,
    pub weight: u32,
}

/// Weighted object–feature edges, sorted by (object, feature).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeList {
    pub edges: Vec<Edge>,
}

impl EdgeList {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.iter().map(|e| u64::from(e.weight)).sum()
    }
}

/// Edges and samplers of one objective (relation mentions or QA pairs).
#[derive(Debug, Clone)]
pub struct Side {
    pub edges: EdgeList,
    pub num_objects: usize,
    /// `offsets[o]..offsets[o + 1]` indexes the edges of object `o`.
    offsets: Vec<usize>,
    /// Draws an edge with probability proportional to its weight.
    pub edge_table: Option<AliasTable>,
    /// Feature ids the noise distribution ranges over.
    pub noise_features: Vec<u32>,
    /// Draws a position in `noise_features` proportional to `D_f^{3/4}`.
    pub noise_table: Option<AliasTable>,
}

impl Side {
    fn new(num_objects: usize, edges: EdgeList, d_f: &[u32]) -> Result<Self> {
        let mut offsets = vec![0usize; num_objects + 1];
        for e in &edges.edges {
            if e.object as usize >= num_objects || e.feature as usize >= d_f.len() || e.weight == 0
            {
                return Err(Error::Integrity(format!("edge {e:?} does not resolve")));
            }
            offsets[e.object as usize + 1] += 1;
        }
        for i in 0..num_objects {
            offsets[i + 1] += offsets[i];
        }
        if edges
            .edges
            .windows(2)
            .any(|w| (w[0].object, w[0].feature) >= (w[1].object, w[1].feature))
        {
            return Err(Error::Integrity(
                "edges not sorted by (object, feature) or duplicated".into(),
            ));
        }
        let edge_table = if edges.is_empty() {
            None
        } else {
            Some(AliasTable::new(
                &edges
                    .edges
                    .iter()
                    .map(|e| f64::from(e.weight))
                    .collect::<Vec<_>>(),
            )?)
        };
        let noise_features: Vec<u32> = (0..d_f.len() as u32)
            .filter(|&f| d_f[f as usize] > 0)
            .collect();
        let noise_table = if noise_features.is_empty() {
            None
        } else {
            let w: Vec<f64> = noise_features
                .iter()
                .map(|&f| f64::from(d_f[f as usize]).powf(NOISE_EXPONENT))
                .collect();
            Some(AliasTable::new(&w)?)
        };
        Ok(Side {
            edges,
            num_objects,
            offsets,
            edge_table,
            noise_features,
            noise_table,
        })
    }

    pub fn object_edges(&self, object: usize) -> &[Edge] {
        &self.edges.edges[self.offsets[object]..self.offsets[object + 1]]
    }

    /// Exact noise distribution as `(feature id, probability)`.
    pub fn noise_distribution(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        let probs = self
            .noise_table
            .as_ref()
            .map(|t| t.probabilities())
            .unwrap_or(&[]);
        self.noise_features
            .iter()
            .copied()
            .zip(probs.iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuestionGroup {
    pub question_id: String,
    /// Dense pair ids of `P_i^+`.
    pub positives: Vec<u32>,
    /// Dense pair ids of `P_i^-`.
    pub negatives: Vec<u32>,
}

impl QuestionGroup {
    /// Number of `(k, k1, k2)` triples with `k != k1`.
    pub fn triple_count(&self) -> usize {
        let p = self.positives.len();
        p * p.saturating_sub(1) * self.negatives.len()
    }
}

/// A relation mention reduced to what the graph needs.
#[derive(Debug, Clone)]
pub struct ReObject {
    pub id: String,
    pub candidates: Vec<u32>,
    pub features: FeatureVector,
}

/// A QA pair reduced to what the graph needs.
#[derive(Debug, Clone)]
pub struct QaObject {
    pub id: String,
    pub question_id: String,
    pub polarity: Polarity,
    pub features: FeatureVector,
}

#[derive(Debug, Clone)]
pub struct HeterogeneousGraph {
    pub vocab: FeatureVocabulary,
    pub re: Side,
    pub qa: Side,
    /// Type names by id; id 0 is `None`.
    pub types: Vec<String>,
    pub mention_ids: Vec<String>,
    /// Sorted candidate type ids per mention.
    pub mention_candidates: Vec<Vec<u32>>,
    pub pair_ids: Vec<String>,
    pub pair_questions: Vec<String>,
    pub pair_polarity: Vec<Polarity>,
    pub question_groups: Vec<QuestionGroup>,
}

fn fold_edges(objects: &[&FeatureVector], vocab: &FeatureVocabulary) -> EdgeList {
    let mut edges = Vec::new();
    for (o, fv) in objects.iter().enumerate() {
        let mut row: Vec<Edge> = fv
            .iter()
            .map(|(f, w)| Edge {
                object: o as u32,
                feature: vocab.id(f).expect("vocabulary covers features"),
                weight: w,
            })
            .collect();
        row.sort_by_key(|e| e.feature);
        edges.extend(row);
    }
    EdgeList { edges }
}

impl HeterogeneousGraph {
    /// Builds the graph from feature vectors already extracted per object.
    pub fn from_objects(types: Vec<String>, re: Vec<ReObject>, qa: Vec<QaObject>) -> Result<Self> {
        if re.is_empty() {
            return Err(Error::Validation("relation-mention corpus is empty".into()));
        }
        let mut counts: BTreeMap<&str, (u32, u32)> = BTreeMap::new();
        for o in &re {
            for (f, _) in o.features.iter() {
                counts.entry(f).or_default().0 += 1;
            }
        }
        for o in &qa {
            for (f, _) in o.features.iter() {
                counts.entry(f).or_default().1 += 1;
            }
        }
        let strings = counts.keys().map(|s| s.to_string()).collect();
        let d_f_re = counts.values().map(|c| c.0).collect();
        let d_f_qa = counts.values().map(|c| c.1).collect();
        let vocab = FeatureVocabulary::from_parts(strings, d_f_re, d_f_qa);

        let re_edges = fold_edges(&re.iter().map(|o| &o.features).collect::<Vec<_>>(), &vocab);
        let qa_edges = fold_edges(&qa.iter().map(|o| &o.features).collect::<Vec<_>>(), &vocab);

        let mut groups: Vec<QuestionGroup> = Vec::new();
        let mut group_of: HashMap<&str, usize> = HashMap::new();
        for (i, o) in qa.iter().enumerate() {
            let g = *group_of.entry(o.question_id.as_str()).or_insert_with(|| {
                groups.push(QuestionGroup {
                    question_id: o.question_id.clone(),
                    positives: vec![],
                    negatives: vec![],
                });
                groups.len() - 1
            });
            match o.polarity {
                Polarity::Positive => groups[g].positives.push(i as u32),
                Polarity::Negative => groups[g].negatives.push(i as u32),
            }
        }

        Self::assemble(
            vocab,
            types,
            re.iter().map(|o| o.id.clone()).collect(),
            re.into_iter()
                .map(|o| {
                    let mut c = o.candidates;
                    c.sort_unstable();
                    c.dedup();
                    c
                })
                .collect(),
            re_edges,
            qa.iter().map(|o| o.id.clone()).collect(),
            qa.iter().map(|o| o.question_id.clone()).collect(),
            qa.iter().map(|o| o.polarity).collect(),
            qa_edges,
            groups,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        vocab: FeatureVocabulary,
        types: Vec<String>,
        mention_ids: Vec<String>,
        mention_candidates: Vec<Vec<u32>>,
        re_edges: EdgeList,
        pair_ids: Vec<String>,
        pair_questions: Vec<String>,
        pair_polarity: Vec<Polarity>,
        qa_edges: EdgeList,
        question_groups: Vec<QuestionGroup>,
    ) -> Result<Self> {
        if types.len() < 2 || types[0] != crate::corpus::NONE_TYPE {
            return Err(Error::Validation(
                "type list must start with None and hold a target type".into(),
            ));
        }
        if let Some(t) = types
            .iter()
            .find(|t| t.is_empty() || t.chars().any(char::is_whitespace))
        {
            return Err(Error::Validation(format!(
                "type name {t:?} is empty or has whitespace"
            )));
        }
        for (i, c) in mention_candidates.iter().enumerate() {
            if c.is_empty()
                || c.len() >= types.len()
                || c.iter().any(|&t| t as usize >= types.len())
            {
                return Err(Error::Validation(format!(
                    "mention {:?}: candidate set must be a non-empty proper subset of the types",
                    mention_ids[i]
                )));
            }
        }
        for g in &question_groups {
            if g.positives
                .iter()
                .chain(&g.negatives)
                .any(|&p| p as usize >= pair_ids.len())
            {
                return Err(Error::Integrity(format!(
                    "question {:?} references unknown pair",
                    g.question_id
                )));
            }
        }
        let re = Side::new(mention_ids.len(), re_edges, &vocab.d_f_re)?;
        let qa = Side::new(pair_ids.len(), qa_edges, &vocab.d_f_qa)?;
        Ok(HeterogeneousGraph {
            vocab,
            re,
            qa,
            types,
            mention_ids,
            mention_candidates,
            pair_ids,
            pair_questions,
            pair_polarity,
            question_groups,
        })
    }

    pub fn num_types(&self) -> usize {
        self.types.len()
    }

    pub fn has_qa(&self) -> bool {
        !self.qa.edges.is_empty()
    }

    /// Questions with at least one `(k, k1 != k, k2)` triple.
    pub fn eligible_questions(&self) -> Vec<usize> {
        (0..self.question_groups.len())
            .filter(|&g| self.question_groups[g].triple_count() > 0)
            .collect()
    }
}

/// Extracts features for every relation mention and generated QA pair and
/// builds the network.
pub fn build_graph(
    re: &LabeledCorpus,
    qa: &QACorpus,
    cfg: &FeatureConfig,
    brown: &BrownClusterMap,
) -> Result<HeterogeneousGraph> {
    cfg.validate()?;
    let re_objects = re
        .mentions
        .par_iter()
        .map(|m| {
            let s = re
                .sentence(&m.m1.sentence_id)
                .ok_or_else(|| Error::Integrity(format!("mention {:?}: unknown sentence", m.id)))?;
            Ok(ReObject {
                id: m.id.clone(),
                candidates: m.candidate_types.iter().map(|&t| t as u32).collect(),
                features: extract_features(&m.m1, &m.m2, s, brown, cfg)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let qa_objects = qa
        .pairs
        .par_iter()
        .map(|p| {
            let s = qa
                .sentence(&p.m1.sentence_id)
                .ok_or_else(|| Error::Integrity(format!("pair {:?}: unknown sentence", p.id)))?;
            Ok(QaObject {
                id: p.id.clone(),
                question_id: p.question_id.clone(),
                polarity: p.polarity,
                features: extract_features(&p.m1, &p.m2, s, brown, cfg)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    HeterogeneousGraph::from_objects(
        re.types.iter().map(|t| t.name.clone()).collect(),
        re_objects,
        qa_objects,
    )
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SideStats {
    pub vocabulary: usize,
    pub shared: usize,
    pub total_occurrences: u64,
    pub shared_occurrences: u64,
    /// Percentage of this corpus's distinct features that are shared.
    pub distinct_pct: f64,
    /// Percentage of this corpus's feature occurrences on shared features.
    pub occurrence_pct: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SharedFeatureStats {
    pub re: SideStats,
    pub qa: SideStats,
}

fn pct(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        100.0 * num / den
    } else {
        0.0
    }
}

fn side_stats(vocab: &FeatureVocabulary, side: &Side, d_f: &[u32]) -> SideStats {
    let vocabulary = d_f.iter().filter(|&&d| d > 0).count();
    let shared = (0..d_f.len() as u32)
        .filter(|&f| d_f[f as usize] > 0 && vocab.is_shared(f))
        .count();
    let total = side.edges.total_weight();
    let on_shared: u64 = side
        .edges
        .edges
        .iter()
        .filter(|e| vocab.is_shared(e.feature))
        .map(|e| u64::from(e.weight))
        .sum();
    SideStats {
        vocabulary,
        shared,
        total_occurrences: total,
        shared_occurrences: on_shared,
        distinct_pct: pct(shared as f64, vocabulary as f64),
        occurrence_pct: pct(on_shared as f64, total as f64),
    }
}

/// Overlap of the two corpora's feature sets.
pub fn shared_feature_stats(g: &HeterogeneousGraph) -> SharedFeatureStats {
    SharedFeatureStats {
        re: side_stats(&g.vocab, &g.re, &g.vocab.d_f_re),
        qa: side_stats(&g.vocab, &g.qa, &g.vocab.d_f_qa),
    }
}
