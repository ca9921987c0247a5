//! Lexical features of an ordered entity-mention pair in its sentence.
//!
//! Used unchanged for relation mentions and for QA entity-mention pairs so the
//! two corpora share a feature vocabulary.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{EntityMention, Sentence};
use crate::error::{Error, Result};

/// Multiset of feature strings.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeatureVector {
    counts: BTreeMap<String, u32>,
}

impl FeatureVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, feature: impl Into<String>) {
        self.add_n(feature, 1);
    }

    pub fn add_n(&mut self, feature: impl Into<String>, n: u32) {
        let f = feature.into();
        debug_assert!(!f.is_empty());
        if n > 0 {
            *self.counts.entry(f).or_insert(0) += n;
        }
    }

    pub fn count(&self, feature: &str) -> u32 {
        self.counts.get(feature).copied().unwrap_or(0)
    }

    pub fn contains(&self, feature: &str) -> bool {
        self.counts.contains_key(feature)
    }

    /// Features in lexicographic order with their multiplicities.
    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.counts.iter().map(|(k, &v)| (k.as_str(), v))
    }

    /// Number of distinct features.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.values().map(|&c| u64::from(c)).sum()
    }
}

impl<S: Into<String>> FromIterator<S> for FeatureVector {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut fv = FeatureVector::new();
        for f in iter {
            fv.add(f);
        }
        fv
    }
}

/// Token → Brown cluster bit-string path.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BrownClusterMap {
    mapping: HashMap<String, String>,
}

impl BrownClusterMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, token: impl Into<String>, path: impl Into<String>) -> Result<()> {
        let path = path.into();
        if path.is_empty() || !path.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::Validation(format!(
                "cluster path {path:?} is not a bit string"
            )));
        }
        self.mapping.insert(token.into(), path);
        Ok(())
    }

    pub fn get(&self, token: &str) -> Option<&str> {
        self.mapping.get(token).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    /// Reads the common `bitstring<ws>token<ws>frequency` format.
    pub fn load(path: &Path) -> Result<Self> {
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut map = BrownClusterMap::new();
        for (i, line) in BufReader::new(f).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut cols = line.split_whitespace();
            let (Some(bits), Some(tok)) = (cols.next(), cols.next()) else {
                return Err(Error::parse(
                    path,
                    i + 1,
                    "expected `bitstring token [frequency]`",
                ));
            };
            map.insert(tok, bits)
                .map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
        }
        Ok(map)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureConfig {
    /// Tokens on each side of a mention used for collocation bigrams.
    pub window: usize,
    pub prefix_lengths: Vec<usize>,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            window: 3,
            prefix_lengths: vec![4, 8, 12],
        }
    }
}

impl FeatureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window == 0 {
            return Err(Error::Config("feature window must be at least 1".into()));
        }
        if self.prefix_lengths.contains(&0) {
            return Err(Error::Config(
                "Brown prefix lengths must be positive".into(),
            ));
        }
        Ok(())
    }
}

fn clean(s: &str) -> String {
    if s.chars().any(char::is_whitespace) {
        s.split_whitespace().collect::<Vec<_>>().join("_")
    } else {
        s.to_string()
    }
}

/// Extracts the lexical feature multiset of the ordered pair `(m1, m2)`.
pub fn extract_features(
    m1: &EntityMention,
    m2: &EntityMention,
    sentence: &Sentence,
    brown: &BrownClusterMap,
    cfg: &FeatureConfig,
) -> Result<FeatureVector> {
    let n = sentence.tokens.len();
    for m in [m1, m2] {
        if m.span.start >= m.span.end
            || m.span.end > n
            || m.head < m.span.start
            || m.head >= m.span.end
        {
            return Err(Error::Contract(format!(
                "mention [{}, {}) does not lie in sentence {:?}",
                m.span.start, m.span.end, sentence.id
            )));
        }
    }
    if m1.span == m2.span {
        return Err(Error::Contract(
            "entity mentions have identical spans".into(),
        ));
    }
    let tok = |i: usize| clean(&sentence.tokens[i].surface);
    let mut fv = FeatureVector::new();

    fv.add(format!("HEAD_EM1_{}", tok(m1.head)));
    fv.add(format!("HEAD_EM2_{}", tok(m2.head)));
    for (tag, m) in [("EM1", m1), ("EM2", m2)] {
        for i in m.span.start..m.span.end {
            fv.add(format!("TKN_{tag}_{}", tok(i)));
        }
    }

    let (first, second) = if (m1.span.start, m1.span.end) <= (m2.span.start, m2.span.end) {
        (m1, m2)
    } else {
        (m2, m1)
    };
    let gap = first.span.end..second.span.start.max(first.span.end);
    for i in gap.clone() {
        fv.add(format!("BETWEEN_{}", tok(i)));
        let pos = &sentence.tokens[i].pos;
        if !pos.is_empty() {
            fv.add(format!("BPOS_{}", clean(pos)));
        }
    }

    for m in [m1, m2] {
        let left: Vec<usize> = (m.span.start.saturating_sub(cfg.window)..=m.span.start).collect();
        let right: Vec<usize> = (m.span.end - 1..(m.span.end + cfg.window).min(n)).collect();
        for w in left.windows(2).chain(right.windows(2)) {
            fv.add(format!("COLLOC_{}_{}", tok(w[0]), tok(w[1])));
        }
    }

    fv.add(if std::ptr::eq(first, m1) {
        "EM1_BEFORE_EM2"
    } else {
        "EM2_BEFORE_EM1"
    });
    fv.add(format!("EM_DISTANCE_{}", gap.len()));

    for m in [m1, m2] {
        if m.span.start > 0 {
            fv.add(format!("CTX_{}", tok(m.span.start - 1)));
        }
        if m.span.end < n {
            fv.add(format!("CTX_{}", tok(m.span.end)));
        }
    }

    fv.add(if m2.span.contains_span(&m1.span) {
        "PATTERN_EM1_IN_EM2"
    } else {
        "PATTERN_NULL"
    });

    if !brown.is_empty() {
        for m in [m1, m2] {
            for i in m.span.start..m.span.end {
                if let Some(path) = brown.get(&sentence.tokens[i].surface) {
                    for &len in &cfg.prefix_lengths {
                        fv.add(format!("{len}_{}", &path[..len.min(path.len())]));
                    }
                }
            }
        }
    }
    Ok(fv)
}
