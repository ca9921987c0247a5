#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const SMALL_SYNTH: &[&str] = &[
    "--num-types",
    "4",
    "--num-mentions",
    "1000",
    "--num-test-mentions",
    "200",
    "--num-questions",
    "12",
    "--vocab-size",
    "120",
    "--background-size",
    "30",
    "--fp-rate",
    "0.3",
    "--fn-rate",
    "0.3",
];

pub const QUICK_TRAIN: &[&str] = &[
    "--dim",
    "16",
    "--max-iterations",
    "200000",
    "--objective-check-every",
    "50000",
];

pub fn request(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_request"))
        .args(args)
        .output()
        .expect("binary runs")
}

/// Runs the binary and fails the test with its stderr on a nonzero exit.
pub fn ok(args: &[&str]) -> Output {
    let out = request(args);
    assert!(
        out.status.success(),
        "request {} failed:\n{}",
        args.join(" "),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// File name to contents for every file in a directory.
pub fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

/// A training log with the wall-clock column removed.
pub fn log_without_time(path: &Path) -> String {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.rsplit_once(',').unwrap().0.to_string() + "\n")
        .collect()
}

/// Output directories of one pipeline run.
pub struct Run {
    pub data: PathBuf,
    pub pairs: PathBuf,
    pub features: PathBuf,
    pub graph: PathBuf,
    pub stats: PathBuf,
    pub model: PathBuf,
    pub pred: PathBuf,
    pub eval: PathBuf,
    pub sweep: PathBuf,
}

/// synth, gen-qa-pairs, extract-features, build-graph, stats, train,
/// predict, evaluate and sweep-eta on the small synthetic corpus.
pub fn pipeline(root: &Path, seed: &str, mode: &str) -> Run {
    let d = |n: &str| root.join(n);
    let r = Run {
        data: d("data"),
        pairs: d("pairs"),
        features: d("features"),
        graph: d("graph"),
        stats: d("stats"),
        model: d("model"),
        pred: d("pred"),
        eval: d("eval"),
        sweep: d("sweep"),
    };
    let global = |out: &Path| {
        ["--seed", seed, "--threads", "1", "--out", s(out)]
            .map(String::from)
            .into_iter()
    };
    let data = |f: &str| r.data.join(f).to_str().unwrap().to_string();
    let qa_pairs = r.pairs.join("qa_pairs.jsonl");
    let corpus = [
        "--sentences".to_string(),
        data("train_sentences.jsonl"),
        "--mentions".into(),
        data("train_mentions.jsonl"),
        "--qa-sentences".into(),
        data("qa_sentences.jsonl"),
        "--qa".into(),
        s(&qa_pairs).into(),
    ];
    let test = [
        "--model".to_string(),
        s(&r.model.join("model.txt")).into(),
        "--sentences".into(),
        data("test_sentences.jsonl"),
        "--mentions".into(),
        data("test_mentions.jsonl"),
    ];
    let run = |cmd: &str, out: &Path, extra: &[String]| {
        let args: Vec<String> = global(out).chain(extra.iter().cloned()).collect();
        let mut argv = vec![cmd];
        argv.extend(args.iter().map(String::as_str));
        ok(&argv);
    };
    let strs = |xs: &[&str]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>();

    run("synth", &r.data, &strs(SMALL_SYNTH));
    run(
        "gen-qa-pairs",
        &r.pairs,
        &[
            "--qa-sentences".into(),
            data("qa_sentences.jsonl"),
            "--qa".into(),
            data("qa.jsonl"),
        ],
    );
    run("extract-features", &r.features, &corpus);
    run("build-graph", &r.graph, &corpus);
    run("stats", &r.stats, &["--graph".into(), s(&r.graph).into()]);
    let mut train = vec![
        "--graph".to_string(),
        s(&r.graph).into(),
        "--mode".into(),
        mode.into(),
    ];
    train.extend(strs(QUICK_TRAIN));
    run("train", &r.model, &train);
    run("predict", &r.pred, &test);
    run(
        "evaluate",
        &r.eval,
        &[
            "--predictions".into(),
            s(&r.pred.join("predictions.tsv")).into(),
            "--gold".into(),
            data("gold.tsv"),
        ],
    );
    let mut sweep = test.to_vec();
    sweep.extend(["--gold".into(), data("gold.tsv")]);
    run("sweep-eta", &r.sweep, &sweep);
    r
}
