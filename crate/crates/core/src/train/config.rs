use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainMode {
    /// Alternate between the two objectives every iteration.
    #[default]
    Joint,
    /// Train the QA objective to convergence, then the relation objective.
    QaThenRe,
    /// Train the relation objective to convergence, then the QA objective.
    ReThenQa,
}

impl std::str::FromStr for TrainMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "joint" => Ok(TrainMode::Joint),
            "qa_then_re" | "qa-then-re" => Ok(TrainMode::QaThenRe),
            "re_then_qa" | "re-then-qa" => Ok(TrainMode::ReThenQa),
            other => Err(Error::Config(format!("unknown training mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for TrainMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TrainMode::Joint => "joint",
            TrainMode::QaThenRe => "qa_then_re",
            TrainMode::ReThenQa => "re_then_qa",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    /// Embedding dimension `d`.
    pub dim: usize,
    /// Regularization weight `λ`.
    pub lambda: f64,
    /// Negative samples per edge `V`.
    pub negatives: usize,
    /// Initial learning rate; decays linearly to `alpha / 100`.
    pub alpha: f64,
    /// Probability of stepping the relation objective in an iteration.
    pub re_qa_mix: f64,
    pub max_iterations: u64,
    /// Stop once the relative change of the objective between two checks
    /// falls below this.
    pub convergence_tol: f64,
    /// Iterations between objective evaluations.
    pub objective_check_every: u64,
    /// Edge/loss samples per component per iteration.
    pub batch_size: usize,
    pub mode: TrainMode,
    pub seed: u64,
    pub threads: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 50,
            lambda: 1e-4,
            negatives: 3,
            alpha: 0.025,
            re_qa_mix: 0.5,
            max_iterations: 20_000_000,
            convergence_tol: 1e-4,
            objective_check_every: 200_000,
            batch_size: 1,
            mode: TrainMode::Joint,
            seed: 0,
            threads: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.dim == 0 {
            return bad("dim must be positive");
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return bad("lambda must be a finite value >= 0");
        }
        if self.negatives == 0 {
            return bad("negatives (V) must be at least 1");
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad("alpha must be positive");
        }
        if !(0.0..=1.0).contains(&self.re_qa_mix) {
            return bad("re_qa_mix must lie in [0, 1]");
        }
        if self.max_iterations == 0 || self.objective_check_every == 0 || self.batch_size == 0 {
            return bad("max_iterations, objective_check_every and batch_size must be positive");
        }
        if self.convergence_tol.is_nan() || self.convergence_tol < 0.0 {
            return bad("convergence_tol must be >= 0");
        }
        Ok(())
    }
}
