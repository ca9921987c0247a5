use rand::Rng;
use request_core::eval::{generate_synthetic, sweep_eta, SynthConfig, SyntheticData};
use request_core::graph::{build_graph, HeterogeneousGraph};
use request_core::inference::score_corpus;
use request_core::rng::rng_from_seed;
use request_core::train::{
    apply_feature_update, apply_partial_label_update, sgd_step_partial_label, sgd_step_zf, train,
    FeatureSample, Phase, SideKind, Store, TrainConfig, TrainLog, TrainMode,
};
use request_core::{
    generate_pairs, BrownClusterMap, Error, FeatureConfig, Model, PairGenConfig, QACorpus,
    Similarity,
};

fn small_data(fp: f64, fn_: f64) -> SyntheticData {
    generate_synthetic(&SynthConfig {
        num_types: 4,
        num_mentions: 1000,
        num_test_mentions: 200,
        num_questions: 12,
        vocab_size: 120,
        background_size: 30,
        fp_rate: fp,
        fn_rate: fn_,
        seed: 5,
        ..Default::default()
    })
    .unwrap()
}

fn graphs(data: &SyntheticData) -> (HeterogeneousGraph, HeterogeneousGraph) {
    let (qa, _) = generate_pairs(&data.qa, &PairGenConfig::default()).unwrap();
    let fc = FeatureConfig::default();
    let brown = BrownClusterMap::new();
    (
        build_graph(&data.train, &qa, &fc, &brown).unwrap(),
        build_graph(&data.train, &QACorpus::default(), &fc, &brown).unwrap(),
    )
}

fn quick(mode: TrainMode) -> TrainConfig {
    TrainConfig {
        dim: 16,
        max_iterations: 100_000,
        objective_check_every: 20_000,
        convergence_tol: 0.0,
        mode,
        seed: 3,
        ..Default::default()
    }
}

fn objectives(log: &TrainLog) -> Vec<(u64, Phase, f64)> {
    log.rows
        .iter()
        .map(|r| (r.iteration, r.phase, r.objective.total))
        .collect()
}

#[test]
fn same_seed_gives_identical_embeddings() {
    let (joint, _) = graphs(&small_data(0.3, 0.3));
    let cfg = quick(TrainMode::Joint);
    let (a, la) = train::<f64>(&joint, &cfg).unwrap();
    let (b, lb) = train::<f64>(&joint, &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(objectives(&la), objectives(&lb));
    let (c, _) = train::<f64>(&joint, &TrainConfig { seed: 4, ..cfg }).unwrap();
    assert_ne!(a, c);
}

#[test]
fn joint_without_qa_is_relation_only_training() {
    let (_, re_only) = graphs(&small_data(0.3, 0.3));
    assert!(!re_only.has_qa());
    let (a, la) = train::<f64>(
        &re_only,
        &TrainConfig {
            re_qa_mix: 0.3,
            ..quick(TrainMode::Joint)
        },
    )
    .unwrap();
    let (b, lb) = train::<f64>(&re_only, &quick(TrainMode::ReThenQa)).unwrap();
    assert_eq!(a, b);
    let totals = |l: &TrainLog| l.rows.iter().map(|r| r.objective).collect::<Vec<_>>();
    assert_eq!(totals(&la), totals(&lb));
    assert!(lb.rows.iter().all(|r| r.phase == Phase::Re));
}

#[test]
fn staged_modes_run_their_phases_in_order() {
    let (joint, _) = graphs(&small_data(0.0, 0.0));
    for (mode, first, second) in [
        (TrainMode::QaThenRe, Phase::Qa, Phase::Re),
        (TrainMode::ReThenQa, Phase::Re, Phase::Qa),
    ] {
        let (_, log) = train::<f64>(&joint, &quick(mode)).unwrap();
        let phases: Vec<Phase> = log.rows.iter().map(|r| r.phase).collect();
        let split = phases.iter().position(|&p| p == second).unwrap();
        assert!(split > 0);
        assert!(phases[..split].iter().all(|&p| p == first));
        assert!(phases[split..].iter().all(|&p| p == second));
        assert_eq!(log.iterations, 2 * 100_000);
        assert!(log.to_csv().contains(&format!(",{},", first.name())));
    }
}

#[test]
fn clean_labels_reach_high_f1_without_qa() {
    let data = small_data(0.0, 0.0);
    let (_, re_only) = graphs(&data);
    let cfg = TrainConfig {
        max_iterations: 2_000_000,
        objective_check_every: 200_000,
        seed: 1,
        ..Default::default()
    };
    let (store, _) = train::<f64>(&re_only, &cfg).unwrap();
    let model = Model::from_graph(store, &re_only);
    let scored = score_corpus(
        &data.test,
        &model,
        &re_only.vocab,
        &FeatureConfig::default(),
        &BrownClusterMap::new(),
        Similarity::Cosine,
    )
    .unwrap();
    let report = &sweep_eta(&scored, &model.types, &data.gold, &[0.35]).unwrap()[0].1;
    println!("{}", report.to_table());
    assert!(report.f1 >= 0.9, "F1 {}", report.f1);
}

#[test]
fn single_precision_training() {
    let (joint, _) = graphs(&small_data(0.3, 0.3));
    let (store, log) = train::<f32>(&joint, &quick(TrainMode::Joint)).unwrap();
    assert!(store.all_finite());
    let first = log.rows.first().unwrap().objective.total;
    let last = log.final_objective().unwrap().total;
    assert!(last < first);
}

#[test]
fn runaway_learning_rate_is_reported() {
    let (joint, _) = graphs(&small_data(0.3, 0.3));
    let cfg = TrainConfig {
        alpha: 1e6,
        ..quick(TrainMode::Joint)
    };
    assert!(matches!(train::<f64>(&joint, &cfg), Err(Error::Diverged(_))));
}

fn changed_rows(a: &Store<f64>, b: &Store<f64>) -> usize {
    [(&a.z, &b.z), (&a.p, &b.p), (&a.c, &b.c), (&a.r, &b.r)]
        .iter()
        .map(|(x, y)| (0..x.rows()).filter(|&i| x.row(i) != y.row(i)).count())
        .sum()
}

#[test]
fn steps_touch_only_sampled_rows() {
    let (joint, _) = graphs(&small_data(0.3, 0.3));
    let mut rng = rng_from_seed(9);
    let mut store: Store<f64> = Store::random(&joint, 8, &mut rng);
    let v = 3;
    for _ in 0..1000 {
        let before = store.clone();
        sgd_step_zf(&mut store, &joint, &mut rng, v, 0.025).unwrap();
        assert!(changed_rows(&before, &store) <= v + 2);
        let before = store.clone();
        sgd_step_partial_label(&mut store, &joint, &mut rng, 0.025, 1e-4);
        assert!(changed_rows(&before, &store) <= 3);
    }
}

#[test]
fn shared_feature_has_one_row() {
    let (joint, _) = graphs(&small_data(0.3, 0.3));
    let shared = (0..joint.vocab.len() as u32)
        .find(|&f| joint.vocab.is_shared(f))
        .unwrap();
    let re_edge = joint.re.edges.edges.iter().find(|e| e.feature == shared).unwrap();
    let qa_edge = joint.qa.edges.edges.iter().find(|e| e.feature == shared).unwrap();
    let mut rng = rng_from_seed(2);
    let mut store: Store<f64> = Store::random(&joint, 8, &mut rng);
    let before = store.c.row(re_edge.feature as usize).to_vec();
    apply_feature_update(
        &mut store,
        SideKind::Qa,
        &FeatureSample {
            object: qa_edge.object as usize,
            feature: qa_edge.feature as usize,
            negatives: vec![],
        },
        0.5,
    );
    assert_ne!(store.c.row(re_edge.feature as usize), before.as_slice());
}

#[test]
fn penalty_alone_shrinks_geometrically() {
    let (joint, _) = graphs(&small_data(0.0, 0.0));
    let mut rng = rng_from_seed(4);
    let mut store: Store<f64> = Store::random(&joint, 8, &mut rng);
    let (alpha, lambda) = (0.1, 0.5);
    // Put mention 0 far past the margin: its candidate type aligned, all
    // other types opposed.
    let cand = joint.mention_candidates[0][0] as usize;
    let dir: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
    for t in 0..store.r.rows() {
        let sign = if t == cand { 3.0 } else { -3.0 };
        store.r.row_mut(t).iter_mut().zip(&dir).for_each(|(x, d)| *x = sign * d);
    }
    store.z.row_mut(0).copy_from_slice(&dir);
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let start = norm(store.z.row(0));
    let factor = 1.0 - alpha * lambda;
    for touch in 1..=5 {
        assert!(!apply_partial_label_update(&mut store, &joint, 0, alpha, lambda));
        let expected = start * factor.powi(touch);
        assert!((norm(store.z.row(0)) - expected).abs() < 1e-12 * start);
    }
}
