//! Turns question/answer sentences into positive and negative QA
//! entity-mention pairs.

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::corpus::{
    AnswerSentence, EntityMention, Polarity, QACorpus, QAPair, Question, Sentence,
};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PairGenConfig {
    /// Upper bound on negative pairs sampled from one sentence.
    pub neg_pairs_per_sentence: usize,
    /// Also sample negative pairs from positive answer sentences.
    pub sample_negatives_from_positives: bool,
    pub seed: u64,
}

impl Default for PairGenConfig {
    fn default() -> Self {
        PairGenConfig {
            neg_pairs_per_sentence: 6,
            sample_negatives_from_positives: false,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationReport {
    pub questions_processed: usize,
    pub questions_without_entity: usize,
    pub positive_sentences_dropped: usize,
    pub positive_pairs: usize,
    pub negative_pairs: usize,
}

/// The question entity is the annotated mention that starts last.
pub fn detect_question_entity(question: &Question, sentence: &Sentence) -> Option<EntityMention> {
    debug_assert_eq!(question.sentence_id, sentence.id);
    sentence
        .entities
        .iter()
        .max_by_key(|e| (e.span.start, e.span.end))
        .cloned()
}

/// Finds the answer-sentence mention that refers to the question entity:
/// same head token (case-insensitive) and smallest Levenshtein distance of the
/// full surface, earliest start on ties.
pub fn match_question_entity(
    question_entity: &EntityMention,
    question_sentence: &Sentence,
    answer_sentence: &Sentence,
) -> Option<EntityMention> {
    let head = question_entity
        .head_surface(question_sentence)
        .to_lowercase();
    let surface = question_entity.surface(question_sentence);
    answer_sentence
        .entities
        .iter()
        .filter(|e| e.head_surface(answer_sentence).to_lowercase() == head)
        .min_by_key(|e| {
            (
                strsim::levenshtein(&surface, &e.surface(answer_sentence)),
                e.span.start,
            )
        })
        .cloned()
}

/// The answer entity is the mention whose surface equals the answer span's.
pub fn match_answer_entity(
    answer: &AnswerSentence,
    sentence: &Sentence,
) -> Result<Option<EntityMention>> {
    let span = match (answer.polarity, answer.answer_span) {
        (Polarity::Positive, Some(span)) => span,
        _ => {
            return Err(Error::Contract(format!(
                "answer entity requested for non-positive sentence {:?}",
                answer.sentence_id
            )))
        }
    };
    let want = sentence.tokens[span.start..span.end]
        .iter()
        .map(|t| t.surface.as_str())
        .collect::<Vec<_>>()
        .join(" ");
    Ok(sentence
        .entities
        .iter()
        .find(|e| e.surface(sentence) == want)
        .cloned())
}

/// Samples up to `cap` distinct ordered mention pairs of `sentence`, skipping
/// `exclude`. Output is in enumeration order.
fn sample_ordered_pairs(
    sentence: &Sentence,
    cap: usize,
    exclude: Option<(&EntityMention, &EntityMention)>,
    rng: &mut crate::rng::Rng,
) -> Vec<(EntityMention, EntityMention)> {
    let ents = &sentence.entities;
    let n = ents.len();
    if n < 2 {
        return Vec::new();
    }
    let candidates: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .filter(|&(i, j)| ents[i].span != ents[j].span)
        .filter(|&(i, j)| {
            exclude.is_none_or(|(a, b)| !(ents[i].span == a.span && ents[j].span == b.span))
        })
        .collect();
    let k = cap.min(candidates.len());
    let mut picked = index::sample(rng, candidates.len(), k).into_vec();
    picked.sort_unstable();
    picked
        .into_iter()
        .map(|p| (ents[candidates[p].0].clone(), ents[candidates[p].1].clone()))
        .collect()
}

/// Generates QA pairs for every question, replacing any existing pairs.
pub fn generate_pairs(
    corpus: &QACorpus,
    cfg: &PairGenConfig,
) -> Result<(QACorpus, GenerationReport)> {
    if cfg.neg_pairs_per_sentence == 0 {
        return Err(Error::Config(
            "neg_pairs_per_sentence must be at least 1".into(),
        ));
    }
    let mut out = corpus.clone();
    out.pairs.clear();
    let mut report = GenerationReport::default();
    let mut rng = rng_from_seed(cfg.seed);
    let by_q = corpus.answers_by_question();

    for q in &corpus.questions {
        report.questions_processed += 1;
        let qs = corpus
            .sentence(&q.sentence_id)
            .ok_or_else(|| Error::Integrity(format!("question {:?}: unknown sentence", q.id)))?;
        let Some(qent) = q
            .question_entity
            .clone()
            .or_else(|| detect_question_entity(q, qs))
        else {
            report.questions_without_entity += 1;
            continue;
        };
        let (mut n_pos, mut n_neg) = (0usize, 0usize);
        let mut push =
            |out: &mut QACorpus, m1: EntityMention, m2: EntityMention, polarity: Polarity| {
                let id = match polarity {
                    Polarity::Positive => {
                        n_pos += 1;
                        format!("{}:p{}", q.id, n_pos)
                    }
                    Polarity::Negative => {
                        n_neg += 1;
                        format!("{}:n{}", q.id, n_neg)
                    }
                };
                out.pairs.push(QAPair {
                    id,
                    question_id: q.id.clone(),
                    m1,
                    m2,
                    polarity,
                });
            };
        for a in by_q.get(q.id.as_str()).into_iter().flatten() {
            let s = corpus.sentence(&a.sentence_id).ok_or_else(|| {
                Error::Integrity(format!("answer: unknown sentence {:?}", a.sentence_id))
            })?;
            match a.polarity {
                Polarity::Positive => {
                    let m1 = match_question_entity(&qent, qs, s);
                    let m2 = match_answer_entity(a, s)?;
                    let positive = match (m1, m2) {
                        (Some(m1), Some(m2)) if m1.span != m2.span => Some((m1, m2)),
                        _ => None,
                    };
                    match &positive {
                        Some((m1, m2)) => {
                            push(&mut out, m1.clone(), m2.clone(), Polarity::Positive)
                        }
                        None => report.positive_sentences_dropped += 1,
                    }
                    if cfg.sample_negatives_from_positives {
                        let exclude = positive.as_ref().map(|(a, b)| (a, b));
                        for (m1, m2) in
                            sample_ordered_pairs(s, cfg.neg_pairs_per_sentence, exclude, &mut rng)
                        {
                            push(&mut out, m1, m2, Polarity::Negative);
                        }
                    }
                }
                Polarity::Negative => {
                    for (m1, m2) in
                        sample_ordered_pairs(s, cfg.neg_pairs_per_sentence, None, &mut rng)
                    {
                        push(&mut out, m1, m2, Polarity::Negative);
                    }
                }
            }
        }
        report.positive_pairs += n_pos;
        report.negative_pairs += n_neg;
    }
    Ok((out, report))
}
