//! Joint embedding of relation mentions, QA pairs, features and types.

mod config;
mod grad;
mod model_io;
mod objective;
mod step;
mod trainer;

pub use config::{TrainConfig, TrainMode};
pub use grad::{
    ns_term_grad, partial_label_grad, qa_hinge_grad, NsGrad, PartialLabelGrad, QaHingeGrad,
};
pub use model_io::{read_model, write_model, Model, MODEL_MAGIC};
pub use objective::{
    expected_noise_term, ns_term, objective_pf, objective_pf_ns, objective_total, objective_zf,
    objective_zf_ns, partial_label_loss, qa_pairwise_loss, Objective,
};
pub use step::{
    apply_feature_update, apply_partial_label_update, apply_qa_pairwise_update, draw_qa_triple,
    sgd_step_partial_label, sgd_step_pf, sgd_step_qa_pairwise, sgd_step_zf, FeatureSample,
    SideKind,
};
pub use trainer::{train, train_with_rng, LogRow, Phase, TrainLog};

use rand::Rng;

use crate::graph::HeterogeneousGraph;
use crate::scalar::Scalar;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    /// Sum of squared entries.
    pub fn norm_sq(&self) -> T {
        self.data.iter().map(|&x| x * x).sum()
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    fn fill_uniform<R: Rng>(&mut self, half_width: f64, rng: &mut R) {
        for x in &mut self.data {
            *x = T::of(rng.random_range(-half_width..half_width));
        }
    }
}

/// All learned vectors. Feature rows are a single array over the union
/// vocabulary, so a feature seen in both corpora has exactly one row.
#[derive(Debug, Clone, PartialEq)]
pub struct Store<T> {
    /// Relation mentions.
    pub z: Matrix<T>,
    /// QA pairs, both polarities.
    pub p: Matrix<T>,
    /// Text features.
    pub c: Matrix<T>,
    /// Relation types, `None` included.
    pub r: Matrix<T>,
}

impl<T: Scalar> Store<T> {
    pub fn zeros(graph: &HeterogeneousGraph, dim: usize) -> Self {
        Store {
            z: Matrix::zeros(graph.re.num_objects, dim),
            p: Matrix::zeros(graph.qa.num_objects, dim),
            c: Matrix::zeros(graph.vocab.len(), dim),
            r: Matrix::zeros(graph.num_types(), dim),
        }
    }

    /// Every entry uniform in `[-0.5/d, 0.5/d)`.
    pub fn random<R: Rng>(graph: &HeterogeneousGraph, dim: usize, rng: &mut R) -> Self {
        let mut s = Self::zeros(graph, dim);
        let h = 0.5 / dim as f64;
        s.z.fill_uniform(h, rng);
        s.p.fill_uniform(h, rng);
        s.c.fill_uniform(h, rng);
        s.r.fill_uniform(h, rng);
        s
    }

    pub fn dim(&self) -> usize {
        self.c.cols()
    }

    pub fn all_finite(&self) -> bool {
        self.z.all_finite() && self.p.all_finite() && self.c.all_finite() && self.r.all_finite()
    }

    /// Object matrix of one side.
    pub fn objects(&self, side: SideKind) -> &Matrix<T> {
        match side {
            SideKind::Re => &self.z,
            SideKind::Qa => &self.p,
        }
    }

    pub fn matches(&self, graph: &HeterogeneousGraph) -> bool {
        self.z.rows() == graph.re.num_objects
            && self.p.rows() == graph.qa.num_objects
            && self.c.rows() == graph.vocab.len()
            && self.r.rows() == graph.num_types()
    }
}
