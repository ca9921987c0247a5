//! Exact objective values. These enumerate full sums and expectations and
//! are used for convergence checks and as oracles for the stochastic steps;
//! training never calls them per step.
//!
//! Per-object values are computed in parallel and summed sequentially in
//! object order, so results do not depend on the thread count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{HeterogeneousGraph, QuestionGroup, Side};
use crate::scalar::{dot, log_sigmoid, Scalar};

use super::{Matrix, Store};

/// Sampled negative-sampling log-likelihood of one edge:
/// `ln σ(o·c⁺) + Σ_v ln σ(−o·c_v)`.
pub fn ns_term<T: Scalar>(object: &[T], positive: &[T], negatives: &[&[T]]) -> T {
    let mut v = log_sigmoid(dot(object, positive));
    for c in negatives {
        v += log_sigmoid(-dot(object, c));
    }
    v
}

/// `E_{f ~ P_n}[ln σ(−o·c_f)]` by enumeration of the side's noise
/// distribution.
pub fn expected_noise_term<T: Scalar>(object: &[T], features: &Matrix<T>, side: &Side) -> f64 {
    side.noise_distribution()
        .map(|(f, p)| p * log_sigmoid(-dot(object, features.row(f as usize))).as_f64())
        .sum()
}

fn ordered_sum(values: Vec<f64>) -> f64 {
    values.into_iter().sum()
}

fn softmax_loss<T: Scalar>(objects: &Matrix<T>, features: &Matrix<T>, side: &Side) -> f64 {
    let support: Vec<u32> = side.noise_features.clone();
    ordered_sum(
        (0..side.num_objects)
            .into_par_iter()
            .map(|o| {
                let edges = side.object_edges(o);
                if edges.is_empty() {
                    return 0.0;
                }
                let z = objects.row(o);
                let scores: Vec<f64> = support
                    .iter()
                    .map(|&f| dot(z, features.row(f as usize)).as_f64())
                    .collect();
                let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let lse = max + scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln();
                edges
                    .iter()
                    .map(|e| {
                        let s = dot(z, features.row(e.feature as usize)).as_f64();
                        -f64::from(e.weight) * (s - lse)
                    })
                    .sum()
            })
            .collect(),
    )
}

fn ns_loss<T: Scalar>(
    objects: &Matrix<T>,
    features: &Matrix<T>,
    side: &Side,
    negatives: usize,
) -> f64 {
    let v = negatives as f64;
    ordered_sum(
        (0..side.num_objects)
            .into_par_iter()
            .map(|o| {
                let edges = side.object_edges(o);
                if edges.is_empty() {
                    return 0.0;
                }
                let z = objects.row(o);
                let noise = expected_noise_term(z, features, side);
                edges
                    .iter()
                    .map(|e| {
                        let pos = log_sigmoid(dot(z, features.row(e.feature as usize))).as_f64();
                        -f64::from(e.weight) * (pos + v * noise)
                    })
                    .sum()
            })
            .collect(),
    )
}

/// Mention–feature loss with the full softmax over the relation-side
/// features.
pub fn objective_zf<T: Scalar>(store: &Store<T>, graph: &HeterogeneousGraph) -> f64 {
    softmax_loss(&store.z, &store.c, &graph.re)
}

/// Pair–feature loss with the full softmax over the QA-side features.
pub fn objective_pf<T: Scalar>(store: &Store<T>, graph: &HeterogeneousGraph) -> f64 {
    softmax_loss(&store.p, &store.c, &graph.qa)
}

/// Mention–feature loss in its negative-sampling form, with the noise
/// expectation computed exactly.
pub fn objective_zf_ns<T: Scalar>(
    store: &Store<T>,
    graph: &HeterogeneousGraph,
    negatives: usize,
) -> f64 {
    ns_loss(&store.z, &store.c, &graph.re, negatives)
}

pub fn objective_pf_ns<T: Scalar>(
    store: &Store<T>,
    graph: &HeterogeneousGraph,
    negatives: usize,
) -> f64 {
    ns_loss(&store.p, &store.c, &graph.qa, negatives)
}

/// `max{0, 1 − [max_{r∈R_i} z·r − max_{r'∉R_i} z·r']}`. `candidates` must be
/// a non-empty proper subset of the type ids.
pub fn partial_label_loss<T: Scalar>(z: &[T], candidates: &[u32], types: &Matrix<T>) -> Result<T> {
    let k = types.rows();
    let mut is_cand = vec![false; k];
    for &c in candidates {
        match is_cand.get_mut(c as usize) {
            Some(slot) => *slot = true,
            None => return Err(Error::Contract(format!("unknown type id {c}"))),
        }
    }
    let n_cand = is_cand.iter().filter(|&&b| b).count();
    if n_cand == 0 || n_cand == k {
        return Err(Error::Contract(
            "candidate set must be a non-empty proper subset of the types".into(),
        ));
    }
    let mut best = T::neg_infinity();
    let mut rival = T::neg_infinity();
    for (t, &cand) in is_cand.iter().enumerate() {
        let s = dot(z, types.row(t));
        if cand {
            best = best.max(s);
        } else {
            rival = rival.max(s);
        }
    }
    Ok((T::one() - (best - rival)).max(T::zero()))
}

/// Full pairwise margin loss of positive pair `k` within its question:
/// the sum over co-positives `k1 != k` and negatives `k2`.
pub fn qa_pairwise_loss<T: Scalar>(k: u32, group: &QuestionGroup, pairs: &Matrix<T>) -> Result<T> {
    if !group.positives.contains(&k) {
        return Err(Error::Contract(format!(
            "pair {k} is not a positive pair of question {:?}",
            group.question_id
        )));
    }
    let pk = pairs.row(k as usize);
    let mut total = T::zero();
    for &k1 in group.positives.iter().filter(|&&k1| k1 != k) {
        let s1 = dot(pk, pairs.row(k1 as usize));
        for &k2 in &group.negatives {
            let s2 = dot(pk, pairs.row(k2 as usize));
            total += (T::one() - (s1 - s2)).max(T::zero());
        }
    }
    Ok(total)
}

/// Joint objective and its parts.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Objective {
    /// `O = O_Z + O_QA`.
    pub total: f64,
    /// `O_Z`.
    pub re: f64,
    /// `O_QA`.
    pub qa: f64,
    pub zf: f64,
    pub partial_label: f64,
    pub re_regularizer: f64,
    pub pf: f64,
    pub pairwise: f64,
    pub qa_regularizer: f64,
}

impl Objective {
    pub fn is_finite(&self) -> bool {
        self.total.is_finite() && self.re.is_finite() && self.qa.is_finite()
    }
}

/// Exact joint objective using the negative-sampling forms of the two
/// co-occurrence losses.
pub fn objective_total<T: Scalar>(
    store: &Store<T>,
    graph: &HeterogeneousGraph,
    lambda: f64,
    negatives: usize,
) -> Objective {
    let zf = objective_zf_ns(store, graph, negatives);
    let partial_label = ordered_sum(
        (0..graph.re.num_objects)
            .into_par_iter()
            .map(|i| {
                partial_label_loss(store.z.row(i), &graph.mention_candidates[i], &store.r)
                    .expect("graph validates candidate sets")
                    .as_f64()
            })
            .collect(),
    );
    let re_regularizer = 0.5 * lambda * (store.z.norm_sq().as_f64() + store.r.norm_sq().as_f64());
    let pf = objective_pf_ns(store, graph, negatives);
    let pairwise = ordered_sum(
        graph
            .question_groups
            .par_iter()
            .map(|g| {
                g.positives
                    .iter()
                    .map(|&k| {
                        qa_pairwise_loss(k, g, &store.p)
                            .expect("k is positive")
                            .as_f64()
                    })
                    .sum::<f64>()
            })
            .collect(),
    );
    let qa_regularizer = 0.5 * lambda * store.p.norm_sq().as_f64();
    let re = zf + partial_label + re_regularizer;
    let qa = pf + pairwise + qa_regularizer;
    Objective {
        total: re + qa,
        re,
        qa,
        zf,
        partial_label,
        re_regularizer,
        pf,
        pairwise,
        qa_regularizer,
    }
}
