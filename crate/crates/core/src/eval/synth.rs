//! Seeded synthetic corpora with controlled distant-supervision noise.
//!
//! Every relation type owns a disjoint block of indicative words. A relation
//! mention sentence has the shape
//!
//! ```text
//! <ctx> <ctx> E1 <pad> <pad> <pad> <middle words> <pad> <pad> <pad> E2 <ctx> .
//! ```
//!
//! where the middle holds indicative words of the true type (Zipf-distributed
//! over the type's block) shuffled with background words. The padding keeps
//! middle words out of the collocation windows, so each middle word yields
//! exactly one `BETWEEN_` feature.
//!
//! QA questions each target one type. Answer sentences share the relation
//! mention layout and hold the question entity and one other entity in
//! random order. Positive answers draw their middle words uniformly from the
//! type's QA-visible words; negative answers use background words only.

use std::collections::BTreeSet;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_distr::{Distribution, Zipf};
use serde::{Deserialize, Serialize};

use crate::corpus::{
    AnswerSentence, EntityMention, LabeledCorpus, Polarity, QACorpus, Question, RelationMention,
    Sentence, Span, Token, NONE_TYPE, NONE_TYPE_ID,
};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed, Rng as ChaRng};

/// Function words and their tags used as padding by one corpus.
struct Style {
    words: [&'static str; 4],
    pos: [&'static str; 4],
}

const RE_STYLE: Style = Style {
    words: ["of", "the", "in", "a"],
    pos: ["IN", "DT", "IN", "DT"],
};
/// QA text comes from another source and uses other function words.
const QA_STYLE: Style = Style {
    words: ["to", "for", "by", "at"],
    pos: ["TO", "IN", "IN", "IN"],
};
const PAD_LEN: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    /// Target relation types, excluding `None`.
    pub num_types: usize,
    /// Training relation mentions.
    pub num_mentions: usize,
    pub num_test_mentions: usize,
    pub num_questions: usize,
    /// Indicative words over all types; each type owns `vocab_size / num_types`.
    pub vocab_size: usize,
    pub background_size: usize,
    /// Indicative words in the middle of a true-relation mention.
    pub features_per_mention: usize,
    pub background_per_mention: usize,
    /// Zipf exponent of indicative word choice in relation mentions.
    pub zipf_exponent: f64,
    /// Fraction of mentions whose true label is `None`.
    pub none_fraction: f64,
    /// Fraction of linkable training mentions given one extra wrong type.
    pub fp_rate: f64,
    /// Fraction of true-relation training mentions relabeled `{None}`.
    pub fn_rate: f64,
    /// Fraction of each type's indicative words visible to the QA side.
    pub qa_share: f64,
    /// QA-only indicative words per type.
    pub qa_only_words: usize,
    pub positives_per_question: usize,
    pub negatives_per_question: usize,
    pub entity_pool: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            num_types: 24,
            num_mentions: 20_000,
            num_test_mentions: 2_000,
            num_questions: 500,
            vocab_size: 2_400,
            background_size: 200,
            features_per_mention: 10,
            background_per_mention: 1,
            zipf_exponent: 1.0,
            none_fraction: 0.2,
            fp_rate: 0.0,
            fn_rate: 0.0,
            qa_share: 0.5,
            qa_only_words: 10,
            positives_per_question: 4,
            negatives_per_question: 2,
            entity_pool: 20,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        for (name, r) in [
            ("fp_rate", self.fp_rate),
            ("fn_rate", self.fn_rate),
            ("qa_share", self.qa_share),
            ("none_fraction", self.none_fraction),
        ] {
            if !(0.0..=1.0).contains(&r) {
                return bad(format!("{name} must lie in [0, 1], got {r}"));
            }
        }
        if self.num_types < 2 {
            return bad("num_types must be at least 2".into());
        }
        if self.num_mentions == 0 {
            return bad("num_mentions must be positive".into());
        }
        let per_type = self.vocab_size / self.num_types;
        if self.features_per_mention == 0 || per_type < self.features_per_mention {
            return bad(format!(
                "vocab_size {} gives {per_type} words per type, fewer than features_per_mention {}",
                self.vocab_size, self.features_per_mention
            ));
        }
        if self.num_questions > 0 && self.qa_words_per_type() == 0 {
            return bad(
                "qa_share and qa_only_words leave questions without indicative words".into(),
            );
        }
        if self.background_size < self.background_per_mention.max(1) {
            return bad("background_size is smaller than background_per_mention".into());
        }
        if self.entity_pool < 3 {
            return bad("entity_pool must hold at least 3 entities".into());
        }
        if self.zipf_exponent.is_nan() || self.zipf_exponent < 0.0 {
            return bad("zipf_exponent must be non-negative".into());
        }
        if self.num_questions > 0 && self.positives_per_question == 0 {
            return bad("positives_per_question must be positive".into());
        }
        Ok(())
    }

    fn words_per_type(&self) -> usize {
        self.vocab_size / self.num_types
    }

    fn shared_per_type(&self) -> usize {
        (self.qa_share * self.words_per_type() as f64).round() as usize
    }

    fn qa_words_per_type(&self) -> usize {
        self.shared_per_type() + self.qa_only_words
    }
}

/// A generated training corpus, a test corpus with clean labels, the gold
/// `(mention id, type name)` list for the test corpus and a QA corpus
/// without pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticData {
    pub train: LabeledCorpus,
    pub test: LabeledCorpus,
    pub gold: Vec<(String, String)>,
    pub qa: QACorpus,
}

pub fn type_name(k: usize) -> String {
    format!("rel{k:02}")
}

fn word(k: usize, j: usize) -> String {
    format!("w{k:02}x{j:03}")
}

fn qa_word(k: usize, j: usize) -> String {
    format!("q{k:02}x{j:03}")
}

fn background(j: usize) -> String {
    format!("bg{j:03}")
}

fn entity(j: usize) -> String {
    format!("Ent{j:03}")
}

/// QA entities come from their own pool, as a QA collection is drawn from a
/// different source than the relation corpus.
fn qa_entity(j: usize) -> String {
    format!("Qent{j:03}")
}

const WORD_TAGS: [&str; 6] = ["NN", "NNS", "VBD", "VBZ", "JJ", "RB"];

/// Fixed part-of-speech tag of a generated word.
fn word_pos(w: &str) -> &'static str {
    let h = w.bytes().fold(0usize, |h, b| h.wrapping_mul(31).wrapping_add(usize::from(b)));
    WORD_TAGS[h % WORD_TAGS.len()]
}

struct Builder<'a> {
    cfg: &'a SynthConfig,
    zipf: Zipf<f64>,
    /// QA-visible word indices of each type, sorted.
    shared: Vec<Vec<usize>>,
}

impl Builder<'_> {
    fn pad(&self, rng: &mut ChaRng, style: &Style, n: usize, out: &mut Vec<Token>) {
        for _ in 0..n {
            let i = rng.random_range(0..style.words.len());
            out.push(Token::new(style.words[i], style.pos[i]));
        }
    }

    /// Between 0 and `2 * background_per_mention` background words, so the
    /// middle length varies around its mean.
    fn background_noise(&self, rng: &mut ChaRng) -> Vec<String> {
        let n = rng.random_range(0..=2 * self.cfg.background_per_mention);
        self.backgrounds(rng, n.min(self.cfg.background_size))
    }

    fn backgrounds(&self, rng: &mut ChaRng, n: usize) -> Vec<String> {
        rand::seq::index::sample(rng, self.cfg.background_size, n)
            .into_iter()
            .map(background)
            .collect()
    }

    /// Distinct Zipf-ranked indicative words of type `k`.
    fn indicative(&self, rng: &mut ChaRng, k: usize) -> Vec<String> {
        let mut picked = BTreeSet::new();
        while picked.len() < self.cfg.features_per_mention {
            picked.insert(self.zipf.sample(rng) as usize - 1);
        }
        let mut v: Vec<String> = picked.into_iter().map(|j| word(k, j)).collect();
        v.shuffle(rng);
        v
    }

    /// Tokens of `left <pad> middle <pad> right`, with the spans of the two
    /// single-token entities.
    fn relation_sentence(
        &self,
        rng: &mut ChaRng,
        style: &Style,
        id: &str,
        e1: &str,
        e2: &str,
        mut middle: Vec<String>,
    ) -> Sentence {
        middle.shuffle(rng);
        let mut toks = Vec::new();
        self.pad(rng, style, 2, &mut toks);
        let a = toks.len();
        toks.push(Token::new(e1, "NNP"));
        self.pad(rng, style, PAD_LEN, &mut toks);
        toks.extend(middle.into_iter().map(|w| {
            let pos = word_pos(&w);
            Token::new(w, pos)
        }));
        self.pad(rng, style, PAD_LEN, &mut toks);
        let b = toks.len();
        toks.push(Token::new(e2, "NNP"));
        self.pad(rng, style, 1, &mut toks);
        toks.push(Token::new(".", "."));
        let mut s = Sentence::new(id, toks);
        s.entities = vec![
            EntityMention::new(id, a, a + 1),
            EntityMention::new(id, b, b + 1),
        ];
        s
    }

    fn entity_pair(&self, rng: &mut ChaRng) -> (String, String) {
        let pair = rand::seq::index::sample(rng, self.cfg.entity_pool, 2);
        (entity(pair.index(0)), entity(pair.index(1)))
    }

    /// One relation mention with true label `truth` (`None` for a true
    /// non-relation).
    fn mention(
        &self,
        rng: &mut ChaRng,
        id: &str,
        truth: Option<usize>,
    ) -> (Sentence, RelationMention) {
        let (e1, e2) = self.entity_pair(rng);
        let mut middle = self.background_noise(rng);
        match truth {
            Some(k) => middle.extend(self.indicative(rng, k)),
            None => middle.extend(self.backgrounds(rng, self.cfg.features_per_mention)),
        }
        let sid = format!("s-{id}");
        let s = self.relation_sentence(rng, &RE_STYLE, &sid, &e1, &e2, middle);
        // Relation arguments appear in either order in text.
        let (a, b) = if rng.random::<bool>() { (0, 1) } else { (1, 0) };
        let m = RelationMention {
            id: id.to_string(),
            m1: s.entities[a].clone(),
            m2: s.entities[b].clone(),
            candidate_types: BTreeSet::new(),
        };
        (s, m)
    }

    fn truth(&self, rng: &mut ChaRng) -> Option<usize> {
        if rng.random::<f64>() < self.cfg.none_fraction {
            None
        } else {
            Some(rng.random_range(0..self.cfg.num_types))
        }
    }

    /// Type id of target type `k`; ids are assigned in order after `None`.
    fn tid(k: usize) -> usize {
        k + 1
    }

    fn labeled_corpus(&self) -> LabeledCorpus {
        let mut c = LabeledCorpus::new();
        for k in 0..self.cfg.num_types {
            c.intern_type(&type_name(k));
        }
        c
    }

    fn train(&self, rng: &mut ChaRng) -> LabeledCorpus {
        let mut c = self.labeled_corpus();
        for i in 0..self.cfg.num_mentions {
            let truth = self.truth(rng);
            let (s, mut m) = self.mention(rng, &format!("tr{i:06}"), truth);
            // A fixed number of draws per mention keeps the sentence stream
            // independent of the noise rates.
            let noise: (f64, f64) = (rng.random(), rng.random());
            let offset = rng.random_range(1..self.cfg.num_types);
            m.candidate_types = match truth {
                None => BTreeSet::from([NONE_TYPE_ID]),
                Some(_) if noise.0 < self.cfg.fn_rate => BTreeSet::from([NONE_TYPE_ID]),
                Some(k) => {
                    let mut cands = BTreeSet::from([Self::tid(k)]);
                    if noise.1 < self.cfg.fp_rate {
                        cands.insert(Self::tid((k + offset) % self.cfg.num_types));
                    }
                    cands
                }
            };
            c.add_sentence(s);
            c.mentions.push(m);
        }
        c
    }

    fn test(&self, rng: &mut ChaRng) -> (LabeledCorpus, Vec<(String, String)>) {
        let mut c = self.labeled_corpus();
        let mut gold = Vec::with_capacity(self.cfg.num_test_mentions);
        for i in 0..self.cfg.num_test_mentions {
            let truth = self.truth(rng);
            let id = format!("te{i:06}");
            let (s, mut m) = self.mention(rng, &id, truth);
            let t = truth.map_or(NONE_TYPE_ID, Self::tid);
            m.candidate_types = BTreeSet::from([t]);
            gold.push((id, truth.map_or_else(|| NONE_TYPE.to_string(), type_name)));
            c.add_sentence(s);
            c.mentions.push(m);
        }
        (c, gold)
    }

    fn qa_words(&self, rng: &mut ChaRng, k: usize) -> Vec<String> {
        let shared = &self.shared[k];
        let total = shared.len() + self.cfg.qa_only_words;
        rand::seq::index::sample(rng, total, self.cfg.features_per_mention.min(total))
            .into_iter()
            .map(|i| {
                if i < shared.len() {
                    word(k, shared[i])
                } else {
                    qa_word(k, i - shared.len())
                }
            })
            .collect()
    }

    fn qa(&self, rng: &mut ChaRng) -> QACorpus {
        let mut qa = QACorpus::default();
        for qi in 0..self.cfg.num_questions {
            let k = qi % self.cfg.num_types;
            let qid = format!("q{qi:05}");
            let qe = qa_entity(rng.random_range(0..self.cfg.entity_pool));
            let qsid = format!("s-{qid}");
            let mut qs = Sentence::new(
                qsid.as_str(),
                vec![
                    Token::new("who", "WP"),
                    Token::new(type_name(k), "VBZ"),
                    Token::new(qe.as_str(), "NNP"),
                    Token::new("?", "."),
                ],
            );
            let qent = EntityMention::new(qsid.as_str(), 2, 3);
            qs.entities = vec![qent.clone()];
            qa.add_sentence(qs);
            qa.questions.push(Question {
                id: qid.clone(),
                sentence_id: qsid,
                question_entity: Some(qent),
            });

            for a in 0..self.cfg.positives_per_question {
                let sid = format!("s-{qid}-p{a}");
                let mut middle = self.background_noise(rng);
                middle.extend(self.qa_words(rng, k));
                let (s, answer) = self.answer_sentence(rng, &sid, &qe, middle);
                qa.add_sentence(s);
                qa.answers.push(AnswerSentence {
                    question_id: qid.clone(),
                    polarity: Polarity::Positive,
                    sentence_id: sid,
                    answer_span: Some(answer),
                });
            }
            for a in 0..self.cfg.negatives_per_question {
                let sid = format!("s-{qid}-n{a}");
                let mut middle = self.background_noise(rng);
                middle.extend(self.backgrounds(rng, self.cfg.features_per_mention));
                let (s, _) = self.answer_sentence(rng, &sid, &qe, middle);
                qa.add_sentence(s);
                qa.answers.push(AnswerSentence {
                    question_id: qid.clone(),
                    polarity: Polarity::Negative,
                    sentence_id: sid,
                    answer_span: None,
                });
            }
        }
        qa
    }

    /// Sentence holding the question entity and one other entity in random
    /// order around `middle`. Returns the span of the other entity.
    fn answer_sentence(
        &self,
        rng: &mut ChaRng,
        id: &str,
        qe: &str,
        middle: Vec<String>,
    ) -> (Sentence, Span) {
        let other = loop {
            let e = qa_entity(rng.random_range(0..self.cfg.entity_pool));
            if e != qe {
                break e;
            }
        };
        let answer_first = rng.random::<bool>();
        let (e1, e2) = if answer_first {
            (other.as_str(), qe)
        } else {
            (qe, other.as_str())
        };
        let s = self.relation_sentence(rng, &QA_STYLE, id, e1, e2, middle);
        let span = s.entities[usize::from(!answer_first)].span;
        (s, span)
    }
}

/// Generates the training corpus, test corpus with gold labels and QA
/// corpus. Each part draws from its own stream derived from `cfg.seed`, so
/// changing QA settings leaves the relation corpora untouched.
pub fn generate_synthetic(cfg: &SynthConfig) -> Result<SyntheticData> {
    cfg.validate()?;
    let per_type = cfg.words_per_type();
    let zipf = Zipf::new(per_type as f64, cfg.zipf_exponent)
        .map_err(|e| Error::Config(format!("zipf distribution: {e}")))?;
    let mut layout_rng = rng_from_seed(derive_seed(cfg.seed, "synth/layout"));
    let all: Vec<usize> = (0..per_type).collect();
    let shared = (0..cfg.num_types)
        .map(|_| {
            let mut s: Vec<usize> = all
                .choose_multiple(&mut layout_rng, cfg.shared_per_type())
                .copied()
                .collect();
            s.sort_unstable();
            s
        })
        .collect();
    let b = Builder { cfg, zipf, shared };
    let train = b.train(&mut rng_from_seed(derive_seed(cfg.seed, "synth/train")));
    let (test, gold) = b.test(&mut rng_from_seed(derive_seed(cfg.seed, "synth/test")));
    let qa = b.qa(&mut rng_from_seed(derive_seed(cfg.seed, "synth/qa")));
    Ok(SyntheticData {
        train,
        test,
        gold,
        qa,
    })
}
