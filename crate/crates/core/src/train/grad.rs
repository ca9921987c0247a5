//! Values and (sub)gradients of the individual loss terms at a point.

use crate::error::{Error, Result};
use crate::scalar::{dot, log_sigmoid, sigmoid, Scalar};

use super::Matrix;

/// Gradient of the sampled negative-sampling log-likelihood
/// `ln σ(o·c⁺) + Σ_v ln σ(−o·c_v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NsGrad<T> {
    pub value: T,
    pub d_object: Vec<T>,
    pub d_positive: Vec<T>,
    pub d_negatives: Vec<Vec<T>>,
}

pub fn ns_term_grad<T: Scalar>(object: &[T], positive: &[T], negatives: &[&[T]]) -> NsGrad<T> {
    let s = dot(object, positive);
    let g = T::one() - sigmoid(s);
    let mut value = log_sigmoid(s);
    let mut d_object: Vec<T> = positive.iter().map(|&c| g * c).collect();
    let d_positive = object.iter().map(|&o| g * o).collect();
    let mut d_negatives = Vec::with_capacity(negatives.len());
    for c in negatives {
        let s = dot(object, c);
        value += log_sigmoid(-s);
        let g = -sigmoid(s);
        for (d, &ci) in d_object.iter_mut().zip(c.iter()) {
            *d += g * ci;
        }
        d_negatives.push(object.iter().map(|&o| g * o).collect());
    }
    NsGrad {
        value,
        d_object,
        d_positive,
        d_negatives,
    }
}

/// Subgradient of the partial-label hinge for one mention.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialLabelGrad<T> {
    pub value: T,
    /// Highest-scoring candidate type (lowest id on ties).
    pub best: usize,
    /// Highest-scoring non-candidate type (lowest id on ties).
    pub rival: usize,
    pub active: bool,
    pub d_z: Vec<T>,
    pub d_best: Vec<T>,
    pub d_rival: Vec<T>,
}

fn argmax_by<T: Scalar>(
    ids: impl Iterator<Item = usize>,
    score: impl Fn(usize) -> T,
) -> Option<(usize, T)> {
    let mut best: Option<(usize, T)> = None;
    for k in ids {
        let s = score(k);
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((k, s));
        }
    }
    best
}

/// `candidates` must be sorted.
pub fn partial_label_grad<T: Scalar>(
    z: &[T],
    candidates: &[u32],
    types: &Matrix<T>,
) -> Result<PartialLabelGrad<T>> {
    let k = types.rows();
    if candidates.is_empty() || candidates.len() >= k || candidates.iter().any(|&c| c as usize >= k)
    {
        return Err(Error::Contract(
            "candidate set must be a non-empty proper subset of the types".into(),
        ));
    }
    let is_cand = |t: usize| candidates.binary_search(&(t as u32)).is_ok();
    let score = |t: usize| dot(z, types.row(t));
    let (best, sb) = argmax_by(candidates.iter().map(|&c| c as usize), score).expect("non-empty");
    let (rival, sr) = argmax_by((0..k).filter(|&t| !is_cand(t)), score).expect("proper subset");
    let margin = sb - sr;
    let active = margin < T::one();
    let zero = || vec![T::zero(); z.len()];
    if !active {
        return Ok(PartialLabelGrad {
            value: T::zero(),
            best,
            rival,
            active,
            d_z: zero(),
            d_best: zero(),
            d_rival: zero(),
        });
    }
    let (rb, rr) = (types.row(best), types.row(rival));
    Ok(PartialLabelGrad {
        value: T::one() - margin,
        best,
        rival,
        active,
        d_z: rr.iter().zip(rb).map(|(&a, &b)| a - b).collect(),
        d_best: z.iter().map(|&x| -x).collect(),
        d_rival: z.to_vec(),
    })
}

/// Subgradient of `max{0, 1 − (p_k·p_k1 − p_k·p_k2)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct QaHingeGrad<T> {
    pub value: T,
    pub active: bool,
    pub d_anchor: Vec<T>,
    pub d_positive: Vec<T>,
    pub d_negative: Vec<T>,
}

pub fn qa_hinge_grad<T: Scalar>(anchor: &[T], positive: &[T], negative: &[T]) -> QaHingeGrad<T> {
    let diff = dot(anchor, positive) - dot(anchor, negative);
    let active = diff < T::one();
    if !active {
        let zero = vec![T::zero(); anchor.len()];
        return QaHingeGrad {
            value: T::zero(),
            active,
            d_anchor: zero.clone(),
            d_positive: zero.clone(),
            d_negative: zero,
        };
    }
    QaHingeGrad {
        value: T::one() - diff,
        active,
        d_anchor: negative
            .iter()
            .zip(positive)
            .map(|(&n, &p)| n - p)
            .collect(),
        d_positive: anchor.iter().map(|&x| -x).collect(),
        d_negative: anchor.to_vec(),
    }
}
