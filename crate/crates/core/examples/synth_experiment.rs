//! Trains every mode on a synthetic corpus and prints test F1.
//!
//! Settings come from `KEY=value` arguments, e.g.
//! `cargo run --release --example synth_experiment -- seeds=3 fp=0.3 fn=0.3`.

use std::collections::HashMap;
use std::time::Instant;

use request_core::eval::sweep_eta;
use request_core::eval::{generate_synthetic, SynthConfig};
use request_core::graph::build_graph;
use request_core::inference::{score_corpus, Similarity};
use request_core::qa_pairs::{generate_pairs, PairGenConfig};
use request_core::train::{train, Model, TrainConfig, TrainMode};
use request_core::{BrownClusterMap, FeatureConfig, QACorpus};

fn main() {
    let args: HashMap<String, String> = std::env::args()
        .skip(1)
        .filter_map(|a| {
            a.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
        })
        .collect();
    let get = |k: &str, d: f64| args.get(k).map_or(d, |v| v.parse().unwrap());
    let seeds = get("seeds", 1.0) as u64;
    let modes: Vec<String> = args
        .get("modes")
        .map_or("re,joint,qa_then_re,re_then_qa", String::as_str)
        .split(',')
        .map(String::from)
        .collect();
    let base = SynthConfig {
        fp_rate: get("fp", 0.3),
        fn_rate: get("fn", 0.3),
        num_mentions: get("n", 20000.0) as usize,
        vocab_size: get("vocab", 2400.0) as usize,
        zipf_exponent: get("zipf", 1.0),
        qa_share: get("share", 0.5),
        qa_only_words: get("qaonly", 10.0) as usize,
        features_per_mention: get("fpm", 10.0) as usize,
        background_per_mention: get("bpm", 1.0) as usize,
        none_fraction: get("none", 0.2),
        positives_per_question: get("pos", 4.0) as usize,
        negatives_per_question: get("neg", 2.0) as usize,
        num_questions: get("q", 500.0) as usize,
        entity_pool: get("ents", 20.0) as usize,
        background_size: get("bgsize", 200.0) as usize,
        ..Default::default()
    };
    let tc = TrainConfig {
        max_iterations: get("iters", 20e6) as u64,
        objective_check_every: get("check", 200000.0) as u64,
        alpha: get("alpha", 0.025),
        dim: get("dim", 50.0) as usize,
        re_qa_mix: get("mix", 0.5),
        ..Default::default()
    };
    let eta = get("eta", 0.35);
    let mut sums: HashMap<String, f64> = HashMap::new();
    for seed in 0..seeds {
        let t0 = Instant::now();
        let data = generate_synthetic(&SynthConfig {
            seed,
            ..base.clone()
        })
        .unwrap();
        let (qa, rep) = generate_pairs(
            &data.qa,
            &PairGenConfig {
                seed,
                ..Default::default()
            },
        )
        .unwrap();
        let fc = FeatureConfig::default();
        let brown = BrownClusterMap::default();
        let gj = build_graph(&data.train, &qa, &fc, &brown).unwrap();
        let gr = build_graph(&data.train, &QACorpus::default(), &fc, &brown).unwrap();
        eprintln!(
            "seed {seed}: M={} M_re={} M_qa={} shared={} pairs +{} -{} ({:?})",
            gj.vocab.len(),
            gj.vocab.re_size(),
            gj.vocab.qa_size(),
            gj.vocab.shared_size(),
            rep.positive_pairs,
            rep.negative_pairs,
            t0.elapsed()
        );
        for mode in &modes {
            let t = Instant::now();
            let (g, m) = match mode.as_str() {
                "re" => (&gr, TrainMode::Joint),
                other => (&gj, other.parse().unwrap()),
            };
            let cfg = TrainConfig {
                mode: m,
                seed: seed + 100,
                ..tc.clone()
            };
            let (store, log) = train::<f64>(g, &cfg).unwrap();
            let model = Model::from_graph(store, g);
            let scored = score_corpus(
                &data.test,
                &model,
                &g.vocab,
                &fc,
                &brown,
                Similarity::Cosine,
            )
            .unwrap();
            let etas = [0.0, 0.1, 0.2, 0.3, 0.35, 0.4, 0.5, 0.6, 0.7];
            let sw = sweep_eta(&scored, &model.types, &data.gold, &etas).unwrap();
            let r = sw
                .iter()
                .find(|(e, _)| *e == eta)
                .map(|(_, r)| r.clone())
                .unwrap_or_else(|| {
                    sweep_eta(&scored, &model.types, &data.gold, &[eta]).unwrap()[0]
                        .1
                        .clone()
                });
            let swtxt: Vec<String> = sw.iter().map(|(e, r)| format!("{e}:{:.3}", r.f1)).collect();
            eprintln!("    sweep {}", swtxt.join(" "));
            if args.contains_key("diag") {
                diagnose(&data.test, &data.gold, &model, &g.vocab, &fc, &brown);
            }
            if let Some(o) = log.final_objective() {
                eprintln!("    final {:?}", o);
            }
            let obj: Vec<String> = log
                .rows
                .iter()
                .map(|r| format!("{:.0}", r.objective.total))
                .collect();
            eprintln!(
                "  {mode:<11} P={:.3} R={:.3} F1={:.3} iters={} conv={} checks={} {:?}",
                r.precision,
                r.recall,
                r.f1,
                log.iterations,
                log.converged,
                log.rows.len(),
                t.elapsed()
            );
            if args.contains_key("curve") {
                eprintln!("    {}", obj.join(" "));
            }
            *sums.entry(mode.clone()).or_default() += r.f1;
        }
    }
    for mode in &modes {
        println!("{mode}: mean F1 {:.4}", sums[mode] / seeds as f64);
    }
}

fn diagnose(
    test: &request_core::LabeledCorpus,
    gold: &[(String, String)],
    model: &Model<f64>,
    vocab: &request_core::FeatureVocabulary,
    fc: &FeatureConfig,
    brown: &BrownClusterMap,
) {
    use request_core::inference::best_type;
    use request_core::scalar::norm_sq;
    let mut norms: std::collections::BTreeMap<String, (f64, usize)> = Default::default();
    for (i, name) in model.features.iter().enumerate() {
        let class = if name.starts_with("BETWEEN_w") {
            "indicative".to_string()
        } else {
            name.split('_').next().unwrap().to_string()
        };
        let e = norms.entry(class).or_default();
        e.0 += norm_sq(model.store.c.row(i)).sqrt();
        e.1 += 1;
    }
    for (k, (s, n)) in &norms {
        eprintln!("    |c| {k}: {:.3} over {n}", s / *n as f64);
    }
    let rn: Vec<f64> = (0..model.store.r.rows())
        .map(|t| norm_sq(model.store.r.row(t)).sqrt())
        .collect();
    let avg = |m: &request_core::Matrix64| {
        (0..m.rows()).map(|i| norm_sq(m.row(i)).sqrt()).sum::<f64>() / m.rows().max(1) as f64
    };
    eprintln!(
        "    |z| {:.3} |p| {:.3}",
        avg(&model.store.z),
        avg(&model.store.p)
    );
    eprintln!(
        "    |r| {:?}",
        rn.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>()
    );
    let (mut ok_all, mut ok_ind, mut n) = (0, 0, 0);
    let (mut hit_all, mut hit_ind) = (0, 0);
    for (m, (_, g)) in test.mentions.iter().zip(gold) {
        if g == "None" {
            continue;
        }
        let s = test.sentence(&m.m1.sentence_id).unwrap();
        let fv = request_core::extract_features(&m.m1, &m.m2, s, brown, fc).unwrap();
        let (z, _) = request_core::inference::embed_test_mention(&fv, &model.store.c, vocab);
        let ind: request_core::FeatureVector = fv
            .iter()
            .filter(|(f, _)| f.starts_with("BETWEEN_w"))
            .map(|(f, _)| f.to_string())
            .collect();
        let (zi, _) = request_core::inference::embed_test_mention(&ind, &model.store.c, vocab);
        let gt = model.types.iter().position(|t| t == g).unwrap();
        n += 1;
        let ba = best_type(&z, &model.store.r, Similarity::Cosine).unwrap_or((0, 0.0));
        let bi = best_type(&zi, &model.store.r, Similarity::Cosine).unwrap_or((0, 0.0));
        if ba.0 == gt {
            ok_all += 1;
            if ba.1 >= 0.35 {
                hit_all += 1;
            }
        }
        if bi.0 == gt {
            ok_ind += 1;
            if bi.1 >= 0.35 {
                hit_ind += 1;
            }
        }
    }
    eprintln!(
        "    argmax acc all={:.3} indicative-only={:.3}",
        ok_all as f64 / n as f64,
        ok_ind as f64 / n as f64
    );
    eprintln!(
        "    recall@0.35 all={:.3} indicative-only={:.3}",
        hit_all as f64 / n as f64,
        hit_ind as f64 / n as f64
    );
}
