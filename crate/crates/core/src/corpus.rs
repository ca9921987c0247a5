//! Corpus data model and the JSON-lines readers/writers.
//!
//! A relation-extraction corpus is a sentences file plus a mentions file; a
//! QA corpus is a sentences file plus a QA file holding question, answer and
//! (after pair generation) pair records. Sentence records carry the entity
//! mention annotations produced upstream.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use indexmap::IndexMap;
use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Reserved name of the non-target relation type. It always has id 0.
pub const NONE_TYPE: &str = "None";
pub const NONE_TYPE_ID: usize = 0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    /// Penn-Treebank tag, may be empty.
    pub pos: String,
}

impl Token {
    pub fn new(surface: impl Into<String>, pos: impl Into<String>) -> Self {
        Token {
            surface: surface.into(),
            pos: pos.into(),
        }
    }
}

/// Half-open token interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains_span(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EntityMention {
    pub sentence_id: String,
    pub span: Span,
    pub head: usize,
}

impl EntityMention {
    /// Builds a mention whose head is the last token of the span.
    pub fn new(sentence_id: impl Into<String>, start: usize, end: usize) -> Self {
        EntityMention {
            sentence_id: sentence_id.into(),
            span: Span::new(start, end),
            head: end.saturating_sub(1),
        }
    }

    pub fn with_head(mut self, head: usize) -> Self {
        self.head = head;
        self
    }

    /// Space-joined surface string of the mention.
    pub fn surface(&self, sentence: &Sentence) -> String {
        sentence.tokens[self.span.start..self.span.end]
            .iter()
            .map(|t| t.surface.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn head_surface<'s>(&self, sentence: &'s Sentence) -> &'s str {
        &sentence.tokens[self.head].surface
    }

    fn check(&self, sentence: &Sentence) -> std::result::Result<(), String> {
        let n = sentence.tokens.len();
        if self.sentence_id != sentence.id {
            return Err(format!(
                "mention refers to sentence {:?}, not {:?}",
                self.sentence_id, sentence.id
            ));
        }
        if self.span.start >= self.span.end || self.span.end > n {
            return Err(format!(
                "span [{}, {}) out of bounds for sentence {:?} of length {n}",
                self.span.start, self.span.end, sentence.id
            ));
        }
        if self.head < self.span.start || self.head >= self.span.end {
            return Err(format!(
                "head {} outside span [{}, {})",
                self.head, self.span.start, self.span.end
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub id: String,
    pub tokens: Vec<Token>,
    /// Entity mentions annotated on this sentence, in file order.
    pub entities: Vec<EntityMention>,
}

impl Sentence {
    pub fn new(id: impl Into<String>, tokens: Vec<Token>) -> Self {
        Sentence {
            id: id.into(),
            tokens,
            entities: Vec::new(),
        }
    }

    /// Builds a sentence from whitespace-separated `surface/POS` items.
    pub fn from_tagged(id: impl Into<String>, tagged: &str) -> Self {
        let tokens = tagged
            .split_whitespace()
            .map(|item| match item.rsplit_once('/') {
                Some((s, p)) if !s.is_empty() => Token::new(s, p),
                _ => Token::new(item, ""),
            })
            .collect();
        Sentence::new(id, tokens)
    }

    pub fn text(&self) -> String {
        self.tokens
            .iter()
            .map(|t| t.surface.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if self.tokens.is_empty() {
            return Err(format!("sentence {:?} has no tokens", self.id));
        }
        if let Some(i) = self.tokens.iter().position(|t| t.surface.is_empty()) {
            return Err(format!(
                "sentence {:?} token {i} has empty surface",
                self.id
            ));
        }
        for e in &self.entities {
            e.check(self)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationType {
    pub id: usize,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationMention {
    pub id: String,
    pub m1: EntityMention,
    pub m2: EntityMention,
    pub candidate_types: BTreeSet<usize>,
}

impl RelationMention {
    pub fn is_negative(&self) -> bool {
        self.candidate_types.len() == 1 && self.candidate_types.contains(&NONE_TYPE_ID)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LabeledCorpus {
    pub sentences: IndexMap<String, Sentence>,
    pub mentions: Vec<RelationMention>,
    pub types: Vec<RelationType>,
}

impl LabeledCorpus {
    /// Empty corpus holding only the reserved `None` type.
    pub fn new() -> Self {
        LabeledCorpus {
            sentences: IndexMap::new(),
            mentions: Vec::new(),
            types: vec![RelationType {
                id: NONE_TYPE_ID,
                name: NONE_TYPE.to_string(),
            }],
        }
    }

    /// Returns the id of `name`, registering it if new.
    pub fn intern_type(&mut self, name: &str) -> usize {
        if let Some(t) = self.types.iter().find(|t| t.name == name) {
            return t.id;
        }
        let id = self.types.len();
        self.types.push(RelationType {
            id,
            name: name.to_string(),
        });
        id
    }

    pub fn type_id(&self, name: &str) -> Option<usize> {
        self.types.iter().find(|t| t.name == name).map(|t| t.id)
    }

    pub fn type_name(&self, id: usize) -> &str {
        &self.types[id].name
    }

    pub fn sentence(&self, id: &str) -> Option<&Sentence> {
        self.sentences.get(id)
    }

    pub fn add_sentence(&mut self, s: Sentence) {
        self.sentences.insert(s.id.clone(), s);
    }

    /// Checks every invariant of the data model.
    pub fn validate(&self) -> Result<()> {
        if self.types.first().map(|t| t.name.as_str()) != Some(NONE_TYPE) {
            return Err(Error::Validation("type 0 must be None".into()));
        }
        for (i, t) in self.types.iter().enumerate() {
            if t.id != i {
                return Err(Error::Validation(format!(
                    "type ids not contiguous at {}",
                    t.name
                )));
            }
            if t.name.is_empty() || t.name.chars().any(char::is_whitespace) {
                return Err(Error::Validation(format!(
                    "type name {:?} is empty or has whitespace",
                    t.name
                )));
            }
        }
        for s in self.sentences.values() {
            s.validate().map_err(Error::Integrity)?;
        }
        let mut seen = HashSet::new();
        for m in &self.mentions {
            if !seen.insert(m.id.as_str()) {
                return Err(Error::Validation(format!(
                    "duplicate mention id {:?}",
                    m.id
                )));
            }
            self.check_mention(m).map_err(Error::Integrity)?;
            check_candidates(&m.candidate_types, self.types.len()).map_err(Error::Validation)?;
        }
        Ok(())
    }

    fn check_mention(&self, m: &RelationMention) -> std::result::Result<(), String> {
        let s = self.sentences.get(&m.m1.sentence_id).ok_or_else(|| {
            format!(
                "mention {:?}: unknown sentence {:?}",
                m.id, m.m1.sentence_id
            )
        })?;
        if m.m2.sentence_id != m.m1.sentence_id {
            return Err(format!(
                "mention {:?}: entity mentions lie in different sentences",
                m.id
            ));
        }
        m.m1.check(s)
            .map_err(|e| format!("mention {:?} em1: {e}", m.id))?;
        m.m2.check(s)
            .map_err(|e| format!("mention {:?} em2: {e}", m.id))?;
        if m.m1.span == m.m2.span {
            return Err(format!("mention {:?}: identical entity spans", m.id));
        }
        Ok(())
    }
}

fn check_candidates(c: &BTreeSet<usize>, num_types: usize) -> std::result::Result<(), String> {
    if c.is_empty() {
        return Err("empty candidate type set".into());
    }
    if c.contains(&NONE_TYPE_ID) && c.len() > 1 {
        return Err("None mixed with target types in a candidate set".into());
    }
    if let Some(&bad) = c.iter().find(|&&t| t >= num_types) {
        return Err(format!("unknown type id {bad}"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Question {
    pub id: String,
    pub sentence_id: String,
    pub question_entity: Option<EntityMention>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnswerSentence {
    pub question_id: String,
    pub polarity: Polarity,
    pub sentence_id: String,
    /// Present iff the sentence is positive.
    pub answer_span: Option<Span>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QAPair {
    pub id: String,
    pub question_id: String,
    pub m1: EntityMention,
    pub m2: EntityMention,
    pub polarity: Polarity,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct QACorpus {
    pub sentences: IndexMap<String, Sentence>,
    pub questions: Vec<Question>,
    pub answers: Vec<AnswerSentence>,
    pub pairs: Vec<QAPair>,
}

impl QACorpus {
    pub fn add_sentence(&mut self, s: Sentence) {
        self.sentences.insert(s.id.clone(), s);
    }

    pub fn sentence(&self, id: &str) -> Option<&Sentence> {
        self.sentences.get(id)
    }

    /// Answer sentences grouped by question id, in file order.
    pub fn answers_by_question(&self) -> HashMap<&str, Vec<&AnswerSentence>> {
        let mut out: HashMap<&str, Vec<&AnswerSentence>> = HashMap::new();
        for a in &self.answers {
            out.entry(a.question_id.as_str()).or_default().push(a);
        }
        out
    }

    /// Ids of questions that have no answer sentence at all.
    pub fn empty_questions(&self) -> Vec<&str> {
        let by_q = self.answers_by_question();
        self.questions
            .iter()
            .filter(|q| !by_q.contains_key(q.id.as_str()))
            .map(|q| q.id.as_str())
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        for s in self.sentences.values() {
            s.validate().map_err(Error::Integrity)?;
        }
        let mut qids = HashSet::new();
        for q in &self.questions {
            if !qids.insert(q.id.as_str()) {
                return Err(Error::Validation(format!(
                    "duplicate question id {:?}",
                    q.id
                )));
            }
            let s = self.sentences.get(&q.sentence_id).ok_or_else(|| {
                Error::Integrity(format!(
                    "question {:?}: unknown sentence {:?}",
                    q.id, q.sentence_id
                ))
            })?;
            if let Some(e) = &q.question_entity {
                e.check(s)
                    .map_err(|e| Error::Integrity(format!("question {:?}: {e}", q.id)))?;
            }
        }
        for a in &self.answers {
            if !qids.contains(a.question_id.as_str()) {
                return Err(Error::Integrity(format!(
                    "answer for unknown question {:?}",
                    a.question_id
                )));
            }
            let s = self.sentences.get(&a.sentence_id).ok_or_else(|| {
                Error::Integrity(format!("answer: unknown sentence {:?}", a.sentence_id))
            })?;
            match (a.polarity, a.answer_span) {
                (Polarity::Positive, None) => {
                    return Err(Error::Validation(format!(
                        "positive answer sentence {:?} has no answer span",
                        a.sentence_id
                    )))
                }
                (Polarity::Negative, Some(_)) => {
                    return Err(Error::Validation(format!(
                        "negative answer sentence {:?} has an answer span",
                        a.sentence_id
                    )))
                }
                (Polarity::Positive, Some(sp)) if sp.is_empty() || sp.end > s.tokens.len() => {
                    return Err(Error::Integrity(format!(
                        "answer span out of bounds in {:?}",
                        a.sentence_id
                    )))
                }
                _ => {}
            }
        }
        let mut pids = HashSet::new();
        for p in &self.pairs {
            if !pids.insert(p.id.as_str()) {
                return Err(Error::Validation(format!("duplicate pair id {:?}", p.id)));
            }
            if !qids.contains(p.question_id.as_str()) {
                return Err(Error::Integrity(format!(
                    "pair {:?}: unknown question {:?}",
                    p.id, p.question_id
                )));
            }
            let s = self
                .sentences
                .get(&p.m1.sentence_id)
                .ok_or_else(|| Error::Integrity(format!("pair {:?}: unknown sentence", p.id)))?;
            if p.m2.sentence_id != p.m1.sentence_id {
                return Err(Error::Integrity(format!(
                    "pair {:?}: mentions in different sentences",
                    p.id
                )));
            }
            p.m1.check(s)
                .map_err(|e| Error::Integrity(format!("pair {:?}: {e}", p.id)))?;
            p.m2.check(s)
                .map_err(|e| Error::Integrity(format!("pair {:?}: {e}", p.id)))?;
            if p.m1.span == p.m2.span {
                return Err(Error::Integrity(format!(
                    "pair {:?}: identical spans",
                    p.id
                )));
            }
        }
        Ok(())
    }
}

/// Randomly keeps `round(ratio × n)` unlinkable entity-mention pairs as
/// negative relation mentions labeled `{None}`. Input order is preserved.
pub fn sample_negative_mentions(
    unlinkable: &[(EntityMention, EntityMention)],
    ratio: f64,
    seed: u64,
) -> Result<Vec<RelationMention>> {
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(Error::Config(format!(
            "negative sampling ratio {ratio} not in (0, 1]"
        )));
    }
    if unlinkable.is_empty() {
        return Ok(Vec::new());
    }
    let n = unlinkable.len();
    let k = ((ratio * n as f64).round() as usize).min(n);
    let mut rng = rng_from_seed(seed);
    let mut picked = index::sample(&mut rng, n, k).into_vec();
    picked.sort_unstable();
    Ok(picked
        .into_iter()
        .map(|i| {
            let (m1, m2) = &unlinkable[i];
            RelationMention {
                id: format!(
                    "neg-{}-{}-{}-{}",
                    m1.sentence_id, i, m1.span.start, m2.span.start
                ),
                m1: m1.clone(),
                m2: m2.clone(),
                candidate_types: BTreeSet::from([NONE_TYPE_ID]),
            }
        })
        .collect())
}

// ---------------------------------------------------------------------------
// JSON-lines records

#[derive(Debug, Serialize, Deserialize)]
struct TokenRecord {
    t: String,
    #[serde(default)]
    pos: String,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct MentionRecord {
    start: usize,
    end: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    head: Option<usize>,
}

impl MentionRecord {
    fn to_mention(self, sid: &str) -> EntityMention {
        EntityMention {
            sentence_id: sid.to_string(),
            span: Span::new(self.start, self.end),
            head: self.head.unwrap_or(self.end.saturating_sub(1)),
        }
    }

    fn from_mention(m: &EntityMention) -> Self {
        MentionRecord {
            start: m.span.start,
            end: m.span.end,
            head: Some(m.head),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct SentenceRecord {
    id: String,
    tokens: Vec<TokenRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    ents: Vec<MentionRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ReMentionRecord {
    id: String,
    sid: String,
    em1: MentionRecord,
    em2: MentionRecord,
    #[serde(default)]
    types: Vec<String>,
    #[serde(default)]
    neg: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairRecord {
    pid: String,
    qid: String,
    sid: String,
    em1: MentionRecord,
    em2: MentionRecord,
    polarity: Polarity,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnswerRecord {
    qid: String,
    sid: String,
    polarity: Polarity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    answer_span: Option<Span>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuestionRecord {
    qid: String,
    sid: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    qent: Option<MentionRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum QaRecord {
    Pair(PairRecord),
    Answer(AnswerRecord),
    Question(QuestionRecord),
}

fn read_lines(path: &Path) -> Result<impl Iterator<Item = (usize, Result<String>)> + '_> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(BufReader::new(f)
        .lines()
        .enumerate()
        .map(move |(i, l)| (i + 1, l.map_err(|e| Error::io(path, e))))
        .filter(|(_, l)| !matches!(l, Ok(s) if s.trim().is_empty())))
}

fn parse_record<T: for<'de> Deserialize<'de>>(
    path: &Path,
    line_no: usize,
    line: &str,
) -> Result<T> {
    serde_json::from_str(line).map_err(|e| Error::parse(path, line_no, e.to_string()))
}

/// Reads a sentences file into an id-ordered map.
pub fn load_sentences(path: &Path) -> Result<IndexMap<String, Sentence>> {
    let mut out = IndexMap::new();
    for (line_no, line) in read_lines(path)? {
        let rec: SentenceRecord = parse_record(path, line_no, &line?)?;
        let sentence = Sentence {
            entities: rec.ents.iter().map(|m| m.to_mention(&rec.id)).collect(),
            tokens: rec
                .tokens
                .into_iter()
                .map(|t| Token {
                    surface: t.t,
                    pos: t.pos,
                })
                .collect(),
            id: rec.id,
        };
        sentence
            .validate()
            .map_err(|msg| Error::parse(path, line_no, msg))?;
        if out.contains_key(&sentence.id) {
            return Err(Error::parse(
                path,
                line_no,
                format!("duplicate sentence id {:?}", sentence.id),
            ));
        }
        out.insert(sentence.id.clone(), sentence);
    }
    Ok(out)
}

pub fn save_sentences<'a>(
    path: &Path,
    sentences: impl IntoIterator<Item = &'a Sentence>,
) -> Result<()> {
    write_records(
        path,
        sentences.into_iter().map(|s| SentenceRecord {
            id: s.id.clone(),
            tokens: s
                .tokens
                .iter()
                .map(|t| TokenRecord {
                    t: t.surface.clone(),
                    pos: t.pos.clone(),
                })
                .collect(),
            ents: s.entities.iter().map(MentionRecord::from_mention).collect(),
        }),
    )
}

fn write_records<T: Serialize>(path: &Path, records: impl IntoIterator<Item = T>) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    for r in records {
        serde_json::to_writer(&mut w, &r).map_err(|e| Error::io(path, e.into()))?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Loads a relation-extraction corpus. Type ids are assigned in order of
/// first appearance, after the reserved `None` (id 0).
pub fn load_re_corpus(sentences_path: &Path, mentions_path: &Path) -> Result<LabeledCorpus> {
    let mut corpus = LabeledCorpus::new();
    corpus.sentences = load_sentences(sentences_path)?;
    let mut ids = HashSet::new();
    for (line_no, line) in read_lines(mentions_path)? {
        let rec: ReMentionRecord = parse_record(mentions_path, line_no, &line?)?;
        let err = |msg: String| Error::parse(mentions_path, line_no, msg);
        if !ids.insert(rec.id.clone()) {
            return Err(err(format!("duplicate mention id {:?}", rec.id)));
        }
        let only_none = rec.types.iter().all(|t| t == NONE_TYPE);
        let candidate_types = if rec.neg || only_none {
            if !only_none {
                return Err(err(format!(
                    "negative mention {:?} lists target types",
                    rec.id
                )));
            }
            BTreeSet::from([NONE_TYPE_ID])
        } else {
            if rec.types.iter().any(|t| t == NONE_TYPE) {
                return Err(err(format!(
                    "mention {:?} mixes None with target types",
                    rec.id
                )));
            }
            rec.types.iter().map(|t| corpus.intern_type(t)).collect()
        };
        let m = RelationMention {
            m1: rec.em1.to_mention(&rec.sid),
            m2: rec.em2.to_mention(&rec.sid),
            id: rec.id,
            candidate_types,
        };
        corpus.check_mention(&m).map_err(|msg| {
            Error::Integrity(format!("{}:{line_no}: {msg}", mentions_path.display()))
        })?;
        corpus.mentions.push(m);
    }
    corpus.validate()?;
    Ok(corpus)
}

pub fn save_re_corpus(
    corpus: &LabeledCorpus,
    sentences_path: &Path,
    mentions_path: &Path,
) -> Result<()> {
    save_sentences(sentences_path, corpus.sentences.values())?;
    save_re_mentions(corpus, mentions_path)
}

pub fn save_re_mentions(corpus: &LabeledCorpus, mentions_path: &Path) -> Result<()> {
    write_records(
        mentions_path,
        corpus.mentions.iter().map(|m| {
            let neg = m.is_negative();
            ReMentionRecord {
                id: m.id.clone(),
                sid: m.m1.sentence_id.clone(),
                em1: MentionRecord::from_mention(&m.m1),
                em2: MentionRecord::from_mention(&m.m2),
                types: if neg {
                    Vec::new()
                } else {
                    m.candidate_types
                        .iter()
                        .map(|&t| corpus.type_name(t).to_string())
                        .collect()
                },
                neg,
            }
        }),
    )
}

/// Loads a QA corpus: question, answer and (optionally) pair records.
pub fn load_qa_corpus(sentences_path: &Path, qa_path: &Path) -> Result<QACorpus> {
    let mut corpus = QACorpus {
        sentences: load_sentences(sentences_path)?,
        ..Default::default()
    };
    for (line_no, line) in read_lines(qa_path)? {
        let rec: QaRecord = parse_record(qa_path, line_no, &line?)?;
        match rec {
            QaRecord::Question(QuestionRecord { qid, sid, qent }) => {
                corpus.questions.push(Question {
                    question_entity: qent.map(|m| m.to_mention(&sid)),
                    id: qid,
                    sentence_id: sid,
                })
            }
            QaRecord::Answer(AnswerRecord {
                qid,
                sid,
                polarity,
                answer_span,
            }) => corpus.answers.push(AnswerSentence {
                question_id: qid,
                polarity,
                sentence_id: sid,
                answer_span,
            }),
            QaRecord::Pair(PairRecord {
                pid,
                qid,
                sid,
                em1,
                em2,
                polarity,
            }) => corpus.pairs.push(QAPair {
                id: pid,
                question_id: qid,
                m1: em1.to_mention(&sid),
                m2: em2.to_mention(&sid),
                polarity,
            }),
        }
    }
    corpus.validate()?;
    Ok(corpus)
}

pub fn save_qa_corpus(corpus: &QACorpus, sentences_path: &Path, qa_path: &Path) -> Result<()> {
    save_sentences(sentences_path, corpus.sentences.values())?;
    save_qa_records(corpus, qa_path)
}

/// Writes question, answer and pair records (questions first).
pub fn save_qa_records(corpus: &QACorpus, qa_path: &Path) -> Result<()> {
    let questions = corpus.questions.iter().map(|q| {
        QaRecord::Question(QuestionRecord {
            qid: q.id.clone(),
            sid: q.sentence_id.clone(),
            qent: q.question_entity.as_ref().map(MentionRecord::from_mention),
        })
    });
    let answers = corpus.answers.iter().map(|a| {
        QaRecord::Answer(AnswerRecord {
            qid: a.question_id.clone(),
            sid: a.sentence_id.clone(),
            polarity: a.polarity,
            answer_span: a.answer_span,
        })
    });
    let pairs = corpus.pairs.iter().map(|p| {
        QaRecord::Pair(PairRecord {
            pid: p.id.clone(),
            qid: p.question_id.clone(),
            sid: p.m1.sentence_id.clone(),
            em1: MentionRecord::from_mention(&p.m1),
            em2: MentionRecord::from_mention(&p.m2),
            polarity: p.polarity,
        })
    });
    write_records(qa_path, questions.chain(answers).chain(pairs))
}
