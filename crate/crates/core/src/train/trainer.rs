use std::time::Instant;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::HeterogeneousGraph;
use crate::rng::{rng_from_seed, Rng as ChaRng};
use crate::scalar::Scalar;

use super::{
    objective_total, sgd_step_partial_label, sgd_step_pf, sgd_step_qa_pairwise, sgd_step_zf,
    Objective, Store, TrainConfig, TrainMode,
};

/// Which objectives a training phase steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Joint,
    Qa,
    Re,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Joint => "joint",
            Phase::Qa => "qa",
            Phase::Re => "re",
        }
    }

    fn watched(self, o: &Objective) -> f64 {
        match self {
            Phase::Joint => o.total,
            Phase::Qa => o.qa,
            Phase::Re => o.re,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogRow {
    /// Iterations completed, counted across phases.
    pub iteration: u64,
    pub phase: Phase,
    pub objective: Objective,
    pub elapsed_ms: u128,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainLog {
    pub rows: Vec<LogRow>,
    /// Whether every phase stopped on the relative-change rule.
    pub converged: bool,
    pub iterations: u64,
    /// QA pairwise steps skipped because no question had a valid triple.
    pub skipped_pairwise: u64,
}

impl TrainLog {
    /// CSV with header `iteration,phase,objective,objective_re,objective_qa,elapsed_ms`.
    pub fn to_csv(&self) -> String {
        let mut s =
            String::from("iteration,phase,objective,objective_re,objective_qa,elapsed_ms\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.iteration,
                r.phase.name(),
                r.objective.total,
                r.objective.re,
                r.objective.qa,
                r.elapsed_ms
            ));
        }
        s
    }

    pub fn final_objective(&self) -> Option<Objective> {
        self.rows.last().map(|r| r.objective)
    }
}

struct Trainer<'g, T> {
    graph: &'g HeterogeneousGraph,
    cfg: &'g TrainConfig,
    store: Store<T>,
    eligible: Vec<usize>,
    log: TrainLog,
    started: Instant,
    iteration: u64,
}

impl<T: Scalar> Trainer<'_, T> {
    fn evaluate(&mut self, phase: Phase) -> Result<Objective> {
        let o = objective_total(&self.store, self.graph, self.cfg.lambda, self.cfg.negatives);
        if !o.is_finite() || !self.store.all_finite() {
            return Err(Error::Diverged(format!(
                "non-finite value at iteration {}",
                self.iteration
            )));
        }
        self.log.rows.push(LogRow {
            iteration: self.iteration,
            phase,
            objective: o,
            elapsed_ms: self.started.elapsed().as_millis(),
        });
        Ok(o)
    }

    fn step_re<R: Rng>(&mut self, rng: &mut R, alpha: T, lambda: T) {
        sgd_step_zf(&mut self.store, self.graph, rng, self.cfg.negatives, alpha);
        sgd_step_partial_label(&mut self.store, self.graph, rng, alpha, lambda);
    }

    fn step_qa<R: Rng>(&mut self, rng: &mut R, alpha: T, lambda: T) {
        sgd_step_pf(&mut self.store, self.graph, rng, self.cfg.negatives, alpha);
        if sgd_step_qa_pairwise(
            &mut self.store,
            self.graph,
            &self.eligible,
            rng,
            alpha,
            lambda,
        )
        .is_none()
        {
            self.log.skipped_pairwise += 1;
        }
    }

    /// Runs one phase until the watched objective's relative change between
    /// checks drops below the tolerance. Returns whether that happened.
    fn run_phase<R: Rng>(&mut self, phase: Phase, rng: &mut R) -> Result<bool> {
        let cfg = self.cfg;
        let lambda = T::of(cfg.lambda);
        let start = self.evaluate(phase)?;
        let initial = phase.watched(&start);
        let mut prev = initial;
        let has_qa = self.graph.has_qa();
        for t in 0..cfg.max_iterations {
            let frac = t as f64 / cfg.max_iterations as f64;
            let alpha = T::of(cfg.alpha * (1.0 - 0.99 * frac));
            let re_side = match phase {
                // No coin is drawn without a QA side, so the stream matches
                // an RE-only phase.
                Phase::Joint => !has_qa || rng.random::<f64>() < cfg.re_qa_mix,
                Phase::Re => true,
                Phase::Qa => false,
            };
            for _ in 0..cfg.batch_size {
                if re_side {
                    self.step_re(rng, alpha, lambda);
                } else {
                    self.step_qa(rng, alpha, lambda);
                }
            }
            self.iteration += 1;
            let done = t + 1 == cfg.max_iterations;
            if (t + 1) % cfg.objective_check_every == 0 || done {
                let cur = phase.watched(&self.evaluate(phase)?);
                if initial > 0.0 && cur > 10.0 * initial {
                    return Err(Error::Diverged(format!(
                        "{} objective grew from {initial} to {cur} by iteration {}",
                        phase.name(),
                        self.iteration
                    )));
                }
                let rel = (prev - cur).abs() / prev.abs().max(f64::MIN_POSITIVE);
                if rel < cfg.convergence_tol {
                    return Ok(true);
                }
                prev = cur;
            }
        }
        Ok(false)
    }
}

/// Runs the alternating edge-sampling procedure from a random start seeded
/// by `cfg.seed`.
pub fn train<T: Scalar>(
    graph: &HeterogeneousGraph,
    cfg: &TrainConfig,
) -> Result<(Store<T>, TrainLog)> {
    let mut rng = rng_from_seed(cfg.seed);
    train_with_rng(graph, cfg, &mut rng)
}

pub fn train_with_rng<T: Scalar>(
    graph: &HeterogeneousGraph,
    cfg: &TrainConfig,
    rng: &mut ChaRng,
) -> Result<(Store<T>, TrainLog)> {
    cfg.validate()?;
    let store = Store::random(graph, cfg.dim, rng);
    let mut tr = Trainer {
        graph,
        cfg,
        store,
        eligible: graph.eligible_questions(),
        log: TrainLog::default(),
        started: Instant::now(),
        iteration: 0,
    };
    let phases: &[Phase] = match (cfg.mode, graph.has_qa()) {
        (TrainMode::Joint, _) => &[Phase::Joint],
        (_, false) => &[Phase::Re],
        (TrainMode::QaThenRe, true) => &[Phase::Qa, Phase::Re],
        (TrainMode::ReThenQa, true) => &[Phase::Re, Phase::Qa],
    };
    let mut converged = true;
    for &phase in phases {
        converged &= tr.run_phase(phase, rng)?;
    }
    tr.log.converged = converged;
    tr.log.iterations = tr.iteration;
    Ok((tr.store, tr.log))
}
