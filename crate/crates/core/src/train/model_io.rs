//! Text model file:
//!
//! ```text
//! REQUEST-EMB 1 <d> <N_Z> <N_P> <M> <K_r>
//! #Z
//! <mention id> v1 ... vd
//! #P
//! ...
//! #C
//! #R
//! ```
//!
//! Values are written with the shortest decimal representation that parses
//! back to the identical float.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::HeterogeneousGraph;
use crate::scalar::Scalar;

use super::{Matrix, Store};

pub const MODEL_MAGIC: &str = "REQUEST-EMB";
const VERSION: u32 = 1;

/// A trained store together with the names of its rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Model<T> {
    pub store: Store<T>,
    pub mention_ids: Vec<String>,
    pub pair_ids: Vec<String>,
    pub features: Vec<String>,
    pub types: Vec<String>,
}

impl<T: Scalar> Model<T> {
    pub fn from_graph(store: Store<T>, graph: &HeterogeneousGraph) -> Self {
        Model {
            store,
            mention_ids: graph.mention_ids.clone(),
            pair_ids: graph.pair_ids.clone(),
            features: graph.vocab.names().to_vec(),
            types: graph.types.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.store.dim()
    }

    pub fn to_text(&self) -> String {
        let s = &self.store;
        let mut out = format!(
            "{MODEL_MAGIC} {VERSION} {} {} {} {} {}\n",
            s.dim(),
            s.z.rows(),
            s.p.rows(),
            s.c.rows(),
            s.r.rows()
        );
        for (tag, m, names) in [
            ("#Z", &s.z, &self.mention_ids),
            ("#P", &s.p, &self.pair_ids),
            ("#C", &s.c, &self.features),
            ("#R", &s.r, &self.types),
        ] {
            out.push_str(tag);
            out.push('\n');
            for (i, name) in names.iter().enumerate() {
                out.push_str(name);
                for v in m.row(i) {
                    write!(out, " {v}").expect("writing to a String");
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(path, 1, "empty model file"))?;
        let h: Vec<&str> = header.split(' ').collect();
        if h.len() != 7 || h[0] != MODEL_MAGIC || h[1] != VERSION.to_string() {
            return Err(Error::parse(
                path,
                1,
                format!("expected `{MODEL_MAGIC} {VERSION} d N_Z N_P M K_r`"),
            ));
        }
        let nums = h[2..]
            .iter()
            .map(|x| {
                x.parse::<usize>()
                    .map_err(|_| Error::parse(path, 1, format!("bad count {x:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let dim = nums[0];
        let mut section = |tag: &str, rows: usize| -> Result<(Vec<String>, Matrix<T>)> {
            match lines.next() {
                Some((_, l)) if l == tag => {}
                Some((n, _)) => {
                    return Err(Error::parse(path, n, format!("expected section {tag}")))
                }
                None => return Err(Error::parse(path, 0, format!("missing section {tag}"))),
            }
            let mut names = Vec::with_capacity(rows);
            let mut data = Vec::with_capacity(rows * dim);
            for _ in 0..rows {
                let (n, l) = lines
                    .next()
                    .ok_or_else(|| Error::parse(path, 0, format!("truncated section {tag}")))?;
                let mut it = l.split(' ');
                names.push(it.next().unwrap_or_default().to_string());
                let before = data.len();
                for v in it {
                    data.push(
                        v.parse::<T>()
                            .map_err(|_| Error::parse(path, n, format!("bad value {v:?}")))?,
                    );
                }
                if data.len() - before != dim {
                    return Err(Error::parse(path, n, format!("expected {dim} values")));
                }
            }
            Ok((names, Matrix::from_vec(rows, dim, data)))
        };
        let (mention_ids, z) = section("#Z", nums[1])?;
        let (pair_ids, p) = section("#P", nums[2])?;
        let (features, c) = section("#C", nums[3])?;
        let (types, r) = section("#R", nums[4])?;
        Ok(Model {
            store: Store { z, p, c, r },
            mention_ids,
            pair_ids,
            features,
            types,
        })
    }
}

pub fn write_model<T: Scalar>(model: &Model<T>, path: &Path) -> Result<()> {
    fs::write(path, model.to_text()).map_err(|e| Error::io(path, e))
}

pub fn read_model<T: Scalar>(path: &Path) -> Result<Model<T>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Model::parse(&text, path)
}
