//! Closed-form values of the exact objectives and of single steps.

use std::f64::consts::LN_2;

use rand::Rng;
use request_core::graph::{HeterogeneousGraph, QaObject, QuestionGroup, ReObject};
use request_core::rng::rng_from_seed;
use request_core::train::{
    apply_partial_label_update, apply_qa_pairwise_update, objective_pf_ns, objective_total,
    objective_zf, objective_zf_ns, partial_label_loss, qa_pairwise_loss, sgd_step_partial_label,
    sgd_step_zf, Matrix, Store,
};
use request_core::{FeatureVector, Polarity};

fn fv(features: &[(&str, u32)]) -> FeatureVector {
    let mut v = FeatureVector::new();
    for (f, n) in features {
        v.add_n(*f, *n);
    }
    v
}

fn mention(id: &str, cand: u32, features: &[(&str, u32)]) -> ReObject {
    ReObject {
        id: id.into(),
        candidates: vec![cand],
        features: fv(features),
    }
}

fn pair(id: &str, q: &str, polarity: Polarity, features: &[(&str, u32)]) -> QaObject {
    QaObject {
        id: id.into(),
        question_id: q.into(),
        polarity,
        features: fv(features),
    }
}

/// `None` followed by `n - 1` target types.
fn types(n: usize) -> Vec<String> {
    std::iter::once("None".to_string())
        .chain((1..n).map(|t| format!("t{t}")))
        .collect()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
}

#[test]
fn softmax_over_one_feature_costs_nothing() {
    let g = HeterogeneousGraph::from_objects(types(2), vec![mention("m", 1, &[("f", 1)])], vec![])
        .unwrap();
    assert_eq!(objective_zf(&Store::<f64>::zeros(&g, 4), &g), 0.0);
}

#[test]
fn uniform_softmax_over_two_features() {
    let g = HeterogeneousGraph::from_objects(
        types(2),
        vec![mention("a", 1, &[("f1", 1)]), mention("b", 1, &[("f2", 1)])],
        vec![],
    )
    .unwrap();
    // one ln 2 per edge
    assert!(close(objective_zf(&Store::<f64>::zeros(&g, 4), &g), 2.0 * LN_2));
}

/// Full-softmax loss summed naively over the relation-side features.
fn naive_softmax_loss(store: &Store<f64>, g: &HeterogeneousGraph) -> f64 {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let support: Vec<usize> = (0..g.vocab.len()).filter(|&f| g.vocab.in_re(f as u32)).collect();
    let mut total = 0.0;
    for e in &g.re.edges.edges {
        let z = store.z.row(e.object as usize);
        let norm: f64 = support.iter().map(|&f| dot(z, store.c.row(f)).exp()).sum();
        let p = dot(z, store.c.row(e.feature as usize)).exp() / norm;
        total -= f64::from(e.weight) * p.ln();
    }
    total
}

#[test]
fn softmax_loss_matches_naive_summation() {
    let mut rng = rng_from_seed(31);
    let words = ["a", "b", "c", "d", "e", "f"];
    let re = (0..8)
        .map(|i| {
            let feats: Vec<(&str, u32)> = (0..3)
                .map(|_| (words[rng.random_range(0..words.len())], rng.random_range(1..3)))
                .collect();
            mention(&format!("m{i}"), 1 + i % 2, &feats)
        })
        .collect();
    let g = HeterogeneousGraph::from_objects(types(3), re, vec![]).unwrap();
    let mut store = Store::<f64>::random(&g, 5, &mut rng);
    for x in store.c.as_mut_slice().iter_mut().chain(store.z.as_mut_slice()) {
        *x *= 20.0;
    }
    let exact = objective_zf(&store, &g);
    let naive = naive_softmax_loss(&store, &g);
    assert!((exact - naive).abs() <= 1e-10 * naive.abs(), "{exact} vs {naive}");
}

#[test]
fn negative_sampling_loss_at_zero_is_one_plus_v_ln2_per_unit_weight() {
    let one = HeterogeneousGraph::from_objects(types(2), vec![mention("m", 1, &[("f", 1)])], vec![])
        .unwrap();
    let two = HeterogeneousGraph::from_objects(types(2), vec![mention("m", 1, &[("f", 2)])], vec![])
        .unwrap();
    let z1 = objective_zf_ns(&Store::<f64>::zeros(&one, 3), &one, 3);
    assert!(close(z1, 4.0 * LN_2));
    let z2 = objective_zf_ns(&Store::<f64>::zeros(&two, 3), &two, 3);
    assert!(close(z2, 2.0 * z1));
}

fn type_rows(scores: &[f64]) -> Matrix<f64> {
    // z = e_0, so type t scores scores[t]
    Matrix::from_vec(
        scores.len(),
        2,
        scores.iter().flat_map(|&s| [s, 0.0]).collect(),
    )
}

#[test]
fn partial_label_hinge_values() {
    let z = [1.0, 0.0];
    let cases = [
        (vec![0.3, 2.5, 1.0], 0.0),
        (vec![0.1, 0.2, 0.5], 1.3),
        (vec![0.0, 1.5, 0.5], 0.0),
    ];
    for (scores, expected) in cases {
        let got = partial_label_loss(&z, &[1], &type_rows(&scores)).unwrap();
        assert!((got - expected).abs() < 1e-12, "{scores:?}: {got}");
    }
    let r = type_rows(&[0.0, 1.0, 2.0]);
    assert!(partial_label_loss(&z, &[], &r).is_err());
    assert!(partial_label_loss(&z, &[0, 1, 2], &r).is_err());
}

#[test]
fn pairwise_hinge_values() {
    let group = QuestionGroup {
        question_id: "q".into(),
        positives: vec![0, 1],
        negatives: vec![2, 3],
    };
    // p_0·p_1 = 2.0, p_0·p_2 = 0.3, p_0·p_3 = 0.3
    let p = Matrix::from_vec(4, 2, vec![1.0, 0.0, 2.0, 0.0, 0.3, 1.0, 0.3, -1.0]);
    assert_eq!(qa_pairwise_loss(0, &group, &p).unwrap(), 0.0);

    let same = Matrix::from_vec(4, 2, vec![0.5; 8]);
    assert_eq!(qa_pairwise_loss(0, &group, &same).unwrap(), 2.0);

    let single = QuestionGroup {
        positives: vec![0],
        ..group.clone()
    };
    assert_eq!(qa_pairwise_loss(0, &single, &same).unwrap(), 0.0);
    assert!(qa_pairwise_loss(2, &group, &same).is_err());
}

fn mixed_graph(qa_weight: u32) -> HeterogeneousGraph {
    let re = vec![
        mention("m0", 1, &[("a", 1), ("b", 2)]),
        mention("m1", 2, &[("b", 1), ("c", 1)]),
        mention("m2", 0, &[("d", 3)]),
    ];
    let w = qa_weight;
    let qa = vec![
        pair("p0", "q", Polarity::Positive, &[("a", w), ("x", w)]),
        pair("p1", "q", Polarity::Positive, &[("b", w)]),
        pair("p2", "q", Polarity::Positive, &[("x", 2 * w)]),
        pair("p3", "q", Polarity::Negative, &[("y", w)]),
        pair("p4", "r", Polarity::Positive, &[("a", w)]),
    ];
    HeterogeneousGraph::from_objects(types(3), re, qa).unwrap()
}

#[test]
fn total_objective_at_zero_has_closed_form() {
    let g = mixed_graph(1);
    let v = 3;
    let o = objective_total(&Store::<f64>::zeros(&g, 4), &g, 0.0, v);
    let weight = (g.re.edges.total_weight() + g.qa.edges.total_weight()) as f64;
    // every mention's hinge is 1; question q has 3 positives and 1 negative,
    // so 3 anchors x 2 other positives x 1 negative; question r has none
    let hinges = 3.0 + 6.0;
    let expected = weight * (1.0 + v as f64) * LN_2 + hinges;
    assert!(close(o.total, expected), "{} vs {expected}", o.total);
    assert!(close(o.partial_label, 3.0));
    assert!(close(o.pairwise, 6.0));
    assert_eq!(o.re_regularizer + o.qa_regularizer, 0.0);
}

#[test]
fn regularizer_adds_half_lambda_squared_norms() {
    let g = mixed_graph(1);
    let store = Store::<f64>::random(&g, 4, &mut rng_from_seed(5));
    let lambda = 0.3;
    let with = objective_total(&store, &g, lambda, 3);
    let without = objective_total(&store, &g, 0.0, 3);
    let norms = store.z.norm_sq() + store.r.norm_sq() + store.p.norm_sq();
    assert!(close(with.total - without.total, 0.5 * lambda * norms));
}

#[test]
fn doubling_qa_weights_doubles_only_the_pair_loss() {
    let (g1, g2) = (mixed_graph(1), mixed_graph(2));
    let mut rng = rng_from_seed(6);
    let store = Store::<f64>::random(&g1, 4, &mut rng);
    assert_eq!(g1.vocab.names(), g2.vocab.names());
    let (o1, o2) = (
        objective_total(&store, &g1, 1e-4, 3),
        objective_total(&store, &g2, 1e-4, 3),
    );
    assert!(close(o2.pf, 2.0 * o1.pf));
    assert!(close(objective_pf_ns(&store, &g2, 3), o2.pf));
    assert_eq!(o2.zf, o1.zf);
}

#[test]
fn zero_learning_rate_changes_nothing() {
    let g = mixed_graph(1);
    let mut rng = rng_from_seed(7);
    let mut store = Store::<f64>::random(&g, 4, &mut rng);
    let before = store.clone();
    for _ in 0..100 {
        sgd_step_zf(&mut store, &g, &mut rng, 3, 0.0);
        sgd_step_partial_label(&mut store, &g, &mut rng, 0.0, 0.5);
    }
    assert_eq!(store, before);
}

#[test]
fn inactive_hinges_without_penalty_are_identity() {
    let g = mixed_graph(1);
    let mut store = Store::<f64>::zeros(&g, 2);
    // mention 0 (candidate type 1) scores 3 on its candidate, 0 elsewhere
    store.z.row_mut(0).copy_from_slice(&[1.0, 0.0]);
    store.r.row_mut(1).copy_from_slice(&[3.0, 0.0]);
    let before = store.clone();
    assert!(!apply_partial_label_update(&mut store, &g, 0, 0.1, 0.0));
    assert_eq!(store, before);

    // anchor p0 is far closer to p1 than to p3
    store.p.row_mut(0).copy_from_slice(&[1.0, 0.0]);
    store.p.row_mut(1).copy_from_slice(&[5.0, 0.0]);
    store.p.row_mut(3).copy_from_slice(&[-5.0, 0.0]);
    let before = store.clone();
    assert!(!apply_qa_pairwise_update(&mut store, (0, 1, 3), 0.1, 0.0));
    assert_eq!(store, before);
}

#[test]
fn active_steps_widen_the_margin() {
    // with a single rival type the margin is exactly z·r_1 − z·r_0
    let g = HeterogeneousGraph::from_objects(types(2), vec![mention("m", 1, &[("f", 1)])], vec![])
        .unwrap();
    let mut rng = rng_from_seed(9);
    let margin = |s: &Store<f64>| {
        let z = s.z.row(0);
        let score = |t: usize| z.iter().zip(s.r.row(t)).map(|(a, b)| a * b).sum::<f64>();
        score(1) - score(0)
    };
    for _ in 0..50 {
        let mut store = Store::<f64>::random(&g, 4, &mut rng);
        let m0 = margin(&store);
        assert!(m0 < 1.0);
        assert!(apply_partial_label_update(&mut store, &g, 0, 1e-3, 0.0));
        assert!(margin(&store) > m0);
    }
}
