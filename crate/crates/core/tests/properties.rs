use std::collections::BTreeSet;

use proptest::prelude::*;
use request_core::corpus::{load_qa_corpus, load_re_corpus, save_qa_corpus, save_re_corpus};
use request_core::corpus::{AnswerSentence, Question, RelationMention, Token};
use request_core::inference::best_type;
use request_core::train::Matrix;
use request_core::{
    evaluate, EntityMention, LabeledCorpus, Polarity, QACorpus, QAPair, Sentence, Similarity,
};

fn word() -> impl Strategy<Value = String> {
    "[A-Za-z][a-z0-9'.-]{0,6}"
}

fn sentence(id: String) -> impl Strategy<Value = Sentence> {
    prop::collection::vec((word(), "[A-Z]{2,3}"), 3..10).prop_flat_map(move |toks| {
        let n = toks.len();
        let id = id.clone();
        prop::collection::vec((0..n, 1..3usize), 2..4).prop_map(move |raw| {
            let mut s = Sentence::new(
                id.clone(),
                toks.iter().map(|(t, p)| Token::new(t.clone(), p.clone())).collect(),
            );
            let mut seen = BTreeSet::new();
            for (start, len) in &raw {
                let end = (start + len).min(n);
                if seen.insert((*start, end)) {
                    s.entities.push(EntityMention::new(id.clone(), *start, end).with_head(*start));
                }
            }
            s
        })
    })
}

fn re_corpus() -> impl Strategy<Value = LabeledCorpus> {
    (1..5usize)
        .prop_flat_map(|n| {
            (0..n)
                .map(|i| sentence(format!("s{i}")))
                .collect::<Vec<_>>()
        })
        .prop_flat_map(|sentences| {
            let k = sentences.len();
            (
                Just(sentences),
                prop::collection::vec((0..k, prop::collection::btree_set(0..4usize, 0..3)), 1..8),
            )
        })
        .prop_map(|(sentences, raw)| {
            let mut c = LabeledCorpus::new();
            for (i, (si, types)) in raw.into_iter().enumerate() {
                let s = &sentences[si];
                if s.entities.len() < 2 {
                    continue;
                }
                let candidate_types = if types.is_empty() {
                    BTreeSet::from([0])
                } else {
                    types
                        .iter()
                        .map(|t| c.intern_type(&format!("rel{t}")))
                        .collect()
                };
                c.mentions.push(RelationMention {
                    id: format!("m{i}"),
                    m1: s.entities[0].clone(),
                    m2: s.entities[1].clone(),
                    candidate_types,
                });
            }
            for s in sentences {
                c.add_sentence(s);
            }
            c
        })
}

fn qa_corpus() -> impl Strategy<Value = QACorpus> {
    (sentence("q".into()), sentence("a".into()), any::<bool>(), any::<bool>()).prop_map(
        |(q, a, positive, with_qent)| {
            let mut c = QACorpus::default();
            c.questions.push(Question {
                id: "q1".into(),
                sentence_id: "q".into(),
                question_entity: with_qent.then(|| q.entities[0].clone()),
            });
            let first = a.entities[0].clone();
            c.answers.push(AnswerSentence {
                question_id: "q1".into(),
                polarity: if positive {
                    Polarity::Positive
                } else {
                    Polarity::Negative
                },
                sentence_id: "a".into(),
                answer_span: positive.then_some(first.span),
            });
            if a.entities.len() >= 2 {
                c.pairs.push(QAPair {
                    id: "q1:n1".into(),
                    question_id: "q1".into(),
                    m1: a.entities[1].clone(),
                    m2: first,
                    polarity: Polarity::Negative,
                });
            }
            c.add_sentence(q);
            c.add_sentence(a);
            c
        },
    )
}

proptest! {
    #[test]
    fn relation_corpus_round_trips(c in re_corpus()) {
        let dir = tempfile::tempdir().unwrap();
        let (s, m) = (dir.path().join("s.jsonl"), dir.path().join("m.jsonl"));
        save_re_corpus(&c, &s, &m).unwrap();
        prop_assert_eq!(load_re_corpus(&s, &m).unwrap(), c);
    }

    #[test]
    fn qa_corpus_round_trips(c in qa_corpus()) {
        let dir = tempfile::tempdir().unwrap();
        let (s, q) = (dir.path().join("s.jsonl"), dir.path().join("qa.jsonl"));
        save_qa_corpus(&c, &s, &q).unwrap();
        prop_assert_eq!(load_qa_corpus(&s, &q).unwrap(), c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn cosine_argmax_ignores_positive_scale(
        z in prop::collection::vec(-10.0f64..10.0, 4),
        r in prop::collection::vec(-1.0f64..1.0, 20),
        scale in 1e-3f64..1e3,
    ) {
        prop_assume!(z.iter().any(|x| x.abs() > 1e-6));
        let types = Matrix::from_vec(5, 4, r);
        let scaled: Vec<f64> = z.iter().map(|x| x * scale).collect();
        let (t1, s1) = best_type(&z, &types, Similarity::Cosine).unwrap();
        let (t2, s2) = best_type(&scaled, &types, Similarity::Cosine).unwrap();
        prop_assert_eq!(t1, t2);
        prop_assert!((s1 - s2).abs() < 1e-9);
    }
}

proptest! {
    #[test]
    fn metrics_ignore_order(
        labels in prop::collection::vec((0..4usize, 0..4usize), 1..40),
        seed in any::<u64>(),
    ) {
        let name = |t: usize| if t == 0 { "None".to_string() } else { format!("t{t}") };
        let gold: Vec<(String, String)> =
            labels.iter().enumerate().map(|(i, (g, _))| (format!("m{i}"), name(*g))).collect();
        let pred: Vec<(String, String)> =
            labels.iter().enumerate().map(|(i, (_, p))| (format!("m{i}"), name(*p))).collect();
        let base = evaluate(&pred, &gold).unwrap();

        let mut shuffled = pred.clone();
        let mut state = seed | 1;
        for i in (1..shuffled.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (state >> 33) as usize % (i + 1));
        }
        let mut gold_rev = gold.clone();
        gold_rev.reverse();
        prop_assert_eq!(evaluate(&shuffled, &gold_rev).unwrap(), base);
    }
}
