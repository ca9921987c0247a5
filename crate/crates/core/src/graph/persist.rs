//! Plain-text, tab-separated on-disk form of a [`HeterogeneousGraph`].
//!
//! Each file starts with a `#<kind>` header line carrying its counts.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{Edge, EdgeList, FeatureVocabulary, HeterogeneousGraph, QuestionGroup};
use crate::corpus::Polarity;
use crate::error::{Error, Result};

pub const VOCAB_FILE: &str = "vocab.tsv";
pub const RE_EDGES_FILE: &str = "re_edges.tsv";
pub const QA_EDGES_FILE: &str = "qa_edges.tsv";
pub const GROUPS_FILE: &str = "groups.tsv";
pub const MENTIONS_FILE: &str = "mentions.tsv";
pub const PAIRS_FILE: &str = "pairs.tsv";
pub const TYPES_FILE: &str = "types.tsv";

struct Writer {
    path: PathBuf,
    inner: BufWriter<File>,
}

impl Writer {
    fn create(path: PathBuf) -> Result<Self> {
        let f = File::create(&path).map_err(|e| Error::io(&path, e))?;
        Ok(Writer {
            inner: BufWriter::new(f),
            path,
        })
    }

    fn line(&mut self, s: std::fmt::Arguments<'_>) -> Result<()> {
        self.inner
            .write_fmt(s)
            .and_then(|_| self.inner.write_all(b"\n"))
            .map_err(|e| Error::io(&self.path, e))
    }

    fn finish(mut self) -> Result<()> {
        self.inner.flush().map_err(|e| Error::io(&self.path, e))
    }
}

fn join_ids(ids: &[u32]) -> String {
    if ids.is_empty() {
        "-".to_string()
    } else {
        ids.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
    }
}

fn write_edges(path: PathBuf, num_objects: usize, edges: &EdgeList) -> Result<()> {
    let mut w = Writer::create(path)?;
    w.line(format_args!(
        "#edges\t{}\t{}\t{}",
        num_objects,
        edges.len(),
        edges.total_weight()
    ))?;
    for e in &edges.edges {
        w.line(format_args!("{}\t{}\t{}", e.object, e.feature, e.weight))?;
    }
    w.finish()
}

impl HeterogeneousGraph {
    /// Writes the graph into `dir`, creating it if needed.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let v = &self.vocab;
        let mut w = Writer::create(dir.join(VOCAB_FILE))?;
        w.line(format_args!(
            "#vocab\t{}\t{}\t{}\t{}",
            v.len(),
            v.re_size(),
            v.qa_size(),
            v.shared_size()
        ))?;
        for (id, name) in v.names().iter().enumerate() {
            let f = id as u32;
            w.line(format_args!(
                "{id}\t{}\t{}\t{}\t{}\t{name}",
                u8::from(v.in_re(f)),
                u8::from(v.in_qa(f)),
                v.d_f_re[id],
                v.d_f_qa[id]
            ))?;
        }
        w.finish()?;

        write_edges(dir.join(RE_EDGES_FILE), self.re.num_objects, &self.re.edges)?;
        write_edges(dir.join(QA_EDGES_FILE), self.qa.num_objects, &self.qa.edges)?;

        let mut w = Writer::create(dir.join(GROUPS_FILE))?;
        w.line(format_args!("#groups\t{}", self.question_groups.len()))?;
        for g in &self.question_groups {
            w.line(format_args!(
                "{}\t{}\t{}",
                g.question_id,
                join_ids(&g.positives),
                join_ids(&g.negatives)
            ))?;
        }
        w.finish()?;

        let mut w = Writer::create(dir.join(MENTIONS_FILE))?;
        w.line(format_args!("#mentions\t{}", self.mention_ids.len()))?;
        for (i, (id, c)) in self
            .mention_ids
            .iter()
            .zip(&self.mention_candidates)
            .enumerate()
        {
            w.line(format_args!("{i}\t{id}\t{}", join_ids(c)))?;
        }
        w.finish()?;

        let mut w = Writer::create(dir.join(PAIRS_FILE))?;
        w.line(format_args!("#pairs\t{}", self.pair_ids.len()))?;
        for i in 0..self.pair_ids.len() {
            let pol = match self.pair_polarity[i] {
                Polarity::Positive => "positive",
                Polarity::Negative => "negative",
            };
            w.line(format_args!(
                "{i}\t{}\t{}\t{pol}",
                self.pair_ids[i], self.pair_questions[i]
            ))?;
        }
        w.finish()?;

        let mut w = Writer::create(dir.join(TYPES_FILE))?;
        w.line(format_args!("#types\t{}", self.types.len()))?;
        for (i, t) in self.types.iter().enumerate() {
            w.line(format_args!("{i}\t{t}"))?;
        }
        w.finish()
    }

    /// Reads a graph written by [`HeterogeneousGraph::save`] and rebuilds
    /// its samplers.
    pub fn load(dir: &Path) -> Result<Self> {
        let vocab_rows = read_table(&dir.join(VOCAB_FILE), "#vocab", 6)?;
        let mut strings = Vec::with_capacity(vocab_rows.rows.len());
        let mut d_f_re = Vec::with_capacity(vocab_rows.rows.len());
        let mut d_f_qa = Vec::with_capacity(vocab_rows.rows.len());
        for (line, r) in &vocab_rows.rows {
            let id: usize = vocab_rows.num(*line, &r[0])?;
            if id != strings.len() {
                return Err(Error::parse(
                    &vocab_rows.path,
                    *line,
                    "feature ids must be contiguous",
                ));
            }
            d_f_re.push(vocab_rows.num(*line, &r[3])?);
            d_f_qa.push(vocab_rows.num(*line, &r[4])?);
            strings.push(r[5].clone());
        }
        vocab_rows.expect_count(0, strings.len())?;
        let vocab = FeatureVocabulary::from_parts(strings, d_f_re, d_f_qa);

        let re_edges = read_edges(&dir.join(RE_EDGES_FILE))?;
        let qa_edges = read_edges(&dir.join(QA_EDGES_FILE))?;

        let t = read_table(&dir.join(TYPES_FILE), "#types", 2)?;
        t.expect_count(0, t.rows.len())?;
        let types: Vec<String> = t.rows.iter().map(|(_, r)| r[1].clone()).collect();

        let m = read_table(&dir.join(MENTIONS_FILE), "#mentions", 3)?;
        m.expect_count(0, m.rows.len())?;
        let mention_ids = m.rows.iter().map(|(_, r)| r[1].clone()).collect();
        let mention_candidates = m
            .rows
            .iter()
            .map(|(l, r)| m.ids(*l, &r[2]))
            .collect::<Result<Vec<_>>>()?;

        let p = read_table(&dir.join(PAIRS_FILE), "#pairs", 4)?;
        p.expect_count(0, p.rows.len())?;
        let pair_ids = p.rows.iter().map(|(_, r)| r[1].clone()).collect();
        let pair_questions = p.rows.iter().map(|(_, r)| r[2].clone()).collect();
        let pair_polarity = p
            .rows
            .iter()
            .map(|(l, r)| match r[3].as_str() {
                "positive" => Ok(Polarity::Positive),
                "negative" => Ok(Polarity::Negative),
                other => Err(Error::parse(&p.path, *l, format!("bad polarity {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;

        let g = read_table(&dir.join(GROUPS_FILE), "#groups", 3)?;
        g.expect_count(0, g.rows.len())?;
        let groups = g
            .rows
            .iter()
            .map(|(l, r)| {
                Ok(QuestionGroup {
                    question_id: r[0].clone(),
                    positives: g.ids(*l, &r[1])?,
                    negatives: g.ids(*l, &r[2])?,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        if re_edges.0 != m.rows.len() || qa_edges.0 != p.rows.len() {
            return Err(Error::Integrity(
                "edge file object counts disagree with mentions/pairs files".into(),
            ));
        }
        Self::assemble(
            vocab,
            types,
            mention_ids,
            mention_candidates,
            re_edges.1,
            pair_ids,
            pair_questions,
            pair_polarity,
            qa_edges.1,
            groups,
        )
    }
}

struct Table {
    path: PathBuf,
    header: Vec<String>,
    rows: Vec<(usize, Vec<String>)>,
}

impl Table {
    fn num<T: std::str::FromStr>(&self, line: usize, s: &str) -> Result<T> {
        s.parse()
            .map_err(|_| Error::parse(&self.path, line, format!("expected a number, got {s:?}")))
    }

    fn ids(&self, line: usize, s: &str) -> Result<Vec<u32>> {
        if s == "-" {
            return Ok(Vec::new());
        }
        s.split(',').map(|x| self.num(line, x)).collect()
    }

    /// Checks that header count number `i` equals `n`.
    fn expect_count(&self, i: usize, n: usize) -> Result<()> {
        let want: usize = self.num(1, self.header.get(i).map(String::as_str).unwrap_or(""))?;
        if want != n {
            return Err(Error::parse(
                &self.path,
                1,
                format!("header announces {want} rows, found {n}"),
            ));
        }
        Ok(())
    }
}

fn read_table(path: &Path, tag: &str, cols: usize) -> Result<Table> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(f).lines();
    let header = match lines.next() {
        Some(l) => l.map_err(|e| Error::io(path, e))?,
        None => return Err(Error::parse(path, 1, "missing header")),
    };
    let mut fields = header.split('\t');
    if fields.next() != Some(tag) {
        return Err(Error::parse(path, 1, format!("expected header {tag}")));
    }
    let header = fields.map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, l) in lines.enumerate() {
        let l = l.map_err(|e| Error::io(path, e))?;
        if l.is_empty() {
            continue;
        }
        let r: Vec<String> = l.splitn(cols, '\t').map(str::to_string).collect();
        if r.len() != cols {
            return Err(Error::parse(
                path,
                i + 2,
                format!("expected {cols} tab-separated columns"),
            ));
        }
        rows.push((i + 2, r));
    }
    Ok(Table {
        path: path.to_path_buf(),
        header,
        rows,
    })
}

fn read_edges(path: &Path) -> Result<(usize, EdgeList)> {
    let t = read_table(path, "#edges", 3)?;
    t.expect_count(1, t.rows.len())?;
    let num_objects: usize = t.num(1, t.header.first().map(String::as_str).unwrap_or(""))?;
    let edges = t
        .rows
        .iter()
        .map(|(l, r)| {
            Ok(Edge {
                object: t.num(*l, &r[0])?,
                feature: t.num(*l, &r[1])?,
                weight: t.num(*l, &r[2])?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((num_objects, EdgeList { edges }))
}
