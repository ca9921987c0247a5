//! Single stochastic (sub)gradient steps. Each touches only the rows it
//! samples; regularization is applied as shrinkage of those rows.

use rand::Rng;

use crate::graph::HeterogeneousGraph;
use crate::scalar::{dot, sigmoid, Scalar};

use super::Store;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SideKind {
    /// Relation mentions.
    Re,
    /// QA pairs.
    Qa,
}

/// An edge drawn for a co-occurrence step plus its noise features.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSample {
    pub object: usize,
    pub feature: usize,
    pub negatives: Vec<usize>,
}

/// Gradient ascent on `ln σ(o·c⁺) + Σ_v ln σ(−o·c_v)` with every partial
/// derivative taken at the pre-step point.
pub fn apply_feature_update<T: Scalar>(
    store: &mut Store<T>,
    side: SideKind,
    sample: &FeatureSample,
    alpha: T,
) {
    let dim = store.dim();
    let objects = match side {
        SideKind::Re => &mut store.z,
        SideKind::Qa => &mut store.p,
    };
    let o: Vec<T> = objects.row(sample.object).to_vec();
    let c = &mut store.c;

    let mut coeffs = Vec::with_capacity(1 + sample.negatives.len());
    coeffs.push((
        sample.feature,
        T::one() - sigmoid(dot(&o, c.row(sample.feature))),
    ));
    for &f in &sample.negatives {
        coeffs.push((f, -sigmoid(dot(&o, c.row(f)))));
    }
    let mut d_o = vec![T::zero(); dim];
    for &(f, g) in &coeffs {
        for (d, &x) in d_o.iter_mut().zip(c.row(f)) {
            *d += g * x;
        }
    }
    for &(f, g) in &coeffs {
        for (x, &oi) in c.row_mut(f).iter_mut().zip(&o) {
            *x += alpha * g * oi;
        }
    }
    for (x, d) in objects.row_mut(sample.object).iter_mut().zip(d_o) {
        *x += alpha * d;
    }
}

fn sgd_step_feature<T: Scalar, R: Rng>(
    store: &mut Store<T>,
    graph: &HeterogeneousGraph,
    side: SideKind,
    rng: &mut R,
    negatives: usize,
    alpha: T,
) -> Option<FeatureSample> {
    let s = match side {
        SideKind::Re => &graph.re,
        SideKind::Qa => &graph.qa,
    };
    let edge = &s.edges.edges[s.edge_table.as_ref()?.sample(rng)];
    let noise = s.noise_table.as_ref()?;
    let sample = FeatureSample {
        object: edge.object as usize,
        feature: edge.feature as usize,
        negatives: (0..negatives)
            .map(|_| s.noise_features[noise.sample(rng)] as usize)
            .collect(),
    };
    apply_feature_update(store, side, &sample, alpha);
    Some(sample)
}

/// Draws one mention–feature edge proportional to its weight and `V` noise
/// features proportional to `D_f^{3/4}`, then updates the mention and the
/// feature rows. Returns `None` when the relation side has no edges.
pub fn sgd_step_zf<T: Scalar, R: Rng>(
    store: &mut Store<T>,
    graph: &HeterogeneousGraph,
    rng: &mut R,
    negatives: usize,
    alpha: T,
) -> Option<FeatureSample> {
    sgd_step_feature(store, graph, SideKind::Re, rng, negatives, alpha)
}

/// QA counterpart of [`sgd_step_zf`].
pub fn sgd_step_pf<T: Scalar, R: Rng>(
    store: &mut Store<T>,
    graph: &HeterogeneousGraph,
    rng: &mut R,
    negatives: usize,
    alpha: T,
) -> Option<FeatureSample> {
    sgd_step_feature(store, graph, SideKind::Qa, rng, negatives, alpha)
}

fn shrink<T: Scalar>(row: &mut [T], factor: T) {
    for x in row {
        *x *= factor;
    }
}

/// Partial-label subgradient step for `mention`. Returns whether the hinge
/// was active. Ties pick the lowest type id; a margin of exactly 1 counts as
/// inactive.
pub fn apply_partial_label_update<T: Scalar>(
    store: &mut Store<T>,
    graph: &HeterogeneousGraph,
    mention: usize,
    alpha: T,
    lambda: T,
) -> bool {
    let cands = &graph.mention_candidates[mention];
    let z: Vec<T> = store.z.row(mention).to_vec();
    let mut best: Option<(usize, T)> = None;
    let mut rival: Option<(usize, T)> = None;
    for t in 0..store.r.rows() {
        let s = dot(&z, store.r.row(t));
        let slot = if cands.binary_search(&(t as u32)).is_ok() {
            &mut best
        } else {
            &mut rival
        };
        if slot.is_none_or(|(_, b)| s > b) {
            *slot = Some((t, s));
        }
    }
    let (Some((b, sb)), Some((r, sr))) = (best, rival) else {
        return false;
    };
    let active = sb - sr < T::one();
    if active {
        let (rb, rr): (Vec<T>, Vec<T>) = (store.r.row(b).to_vec(), store.r.row(r).to_vec());
        for ((x, &pb), &pr) in store.z.row_mut(mention).iter_mut().zip(&rb).zip(&rr) {
            *x += alpha * (pb - pr);
        }
        for (x, &zi) in store.r.row_mut(b).iter_mut().zip(&z) {
            *x += alpha * zi;
        }
        for (x, &zi) in store.r.row_mut(r).iter_mut().zip(&z) {
            *x -= alpha * zi;
        }
    }
    let factor = T::one() - alpha * lambda;
    shrink(store.z.row_mut(mention), factor);
    shrink(store.r.row_mut(b), factor);
    shrink(store.r.row_mut(r), factor);
    active
}

/// Samples a mention uniformly and applies [`apply_partial_label_update`].
pub fn sgd_step_partial_label<T: Scalar, R: Rng>(
    store: &mut Store<T>,
    graph: &HeterogeneousGraph,
    rng: &mut R,
    alpha: T,
    lambda: T,
) -> usize {
    let i = rng.random_range(0..graph.re.num_objects);
    apply_partial_label_update(store, graph, i, alpha, lambda);
    i
}

/// Hinge step on `max{0, 1 − (p_k·p_k1 − p_k·p_k2)}`; returns whether it
/// was active. The three rows are shrunk afterwards.
pub fn apply_qa_pairwise_update<T: Scalar>(
    store: &mut Store<T>,
    (k, k1, k2): (usize, usize, usize),
    alpha: T,
    lambda: T,
) -> bool {
    let p = &mut store.p;
    let pk: Vec<T> = p.row(k).to_vec();
    let p1: Vec<T> = p.row(k1).to_vec();
    let p2: Vec<T> = p.row(k2).to_vec();
    let active = dot(&pk, &p1) - dot(&pk, &p2) < T::one();
    if active {
        for ((x, &a), &b) in p.row_mut(k).iter_mut().zip(&p1).zip(&p2) {
            *x += alpha * (a - b);
        }
        for (x, &a) in p.row_mut(k1).iter_mut().zip(&pk) {
            *x += alpha * a;
        }
        for (x, &a) in p.row_mut(k2).iter_mut().zip(&pk) {
            *x -= alpha * a;
        }
    }
    let factor = T::one() - alpha * lambda;
    for row in [k, k1, k2] {
        shrink(p.row_mut(row), factor);
    }
    active
}

/// Draws a question uniformly from `eligible`, then a positive pair `k`, a
/// different positive `k1` and a negative `k2`, each uniformly. Within a
/// question this is uniform over its valid triples.
pub fn draw_qa_triple<R: Rng>(
    graph: &HeterogeneousGraph,
    eligible: &[usize],
    rng: &mut R,
) -> Option<(usize, usize, usize)> {
    if eligible.is_empty() {
        return None;
    }
    let g = &graph.question_groups[eligible[rng.random_range(0..eligible.len())]];
    let n = g.positives.len();
    let a = rng.random_range(0..n);
    let mut b = rng.random_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    let c = rng.random_range(0..g.negatives.len());
    Some((
        g.positives[a] as usize,
        g.positives[b] as usize,
        g.negatives[c] as usize,
    ))
}

/// Samples a triple and applies [`apply_qa_pairwise_update`]; `None` when
/// no question has a valid triple.
pub fn sgd_step_qa_pairwise<T: Scalar, R: Rng>(
    store: &mut Store<T>,
    graph: &HeterogeneousGraph,
    eligible: &[usize],
    rng: &mut R,
    alpha: T,
    lambda: T,
) -> Option<(usize, usize, usize)> {
    let t = draw_qa_triple(graph, eligible, rng)?;
    apply_qa_pairwise_update(store, t, alpha, lambda);
    Some(t)
}
