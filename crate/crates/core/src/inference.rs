//! Bayesian goal inference over the eighteen goals.
//!
//! Both learner kinds share a uniform prior and restrict the posterior to the
//! goals consistent with what they were shown or told. A literal learner stops
//! there. A pragmatic learner reweights the consistent goals with a model of
//! behaviour: for demonstrations, the likelihood of the demonstrated actions
//! under a Boltzmann policy over its own Q-values; for instructions, how often
//! its own episodes pursuing each goal satisfied the first received subgoal
//! before anything else.

use std::fmt;

use thiserror::Error;

use crate::blockworld::{Plan, StateSpace};
use crate::goalspace::{consistent_goals, prefix_consistent, Goal, GoalId, GoalSet, NUM_GOALS};
use crate::learner::{boltzmann_traj_log_likelihood, plan_steps, LearnerError, QTable, SelfModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InferenceError {
    #[error("no goal is consistent with the received signals")]
    EmptySupport,
    #[error("no signals received")]
    NoSignals,
    #[error(transparent)]
    Learner(#[from] LearnerError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LearnerKind {
    Literal,
    Pragmatic,
}

impl LearnerKind {
    pub fn name(self) -> &'static str {
        match self {
            LearnerKind::Literal => "literal",
            LearnerKind::Pragmatic => "pragmatic",
        }
    }
}

/// Probability vector over goal ids.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Posterior {
    probs: [f64; NUM_GOALS],
}

impl Posterior {
    pub fn uniform(support: GoalSet) -> Result<Posterior, InferenceError> {
        Posterior::from_log_weights(support, |_| 0.0)
    }

    /// Normalizes `exp(log_weight(g))` over `support` with max subtraction.
    pub fn from_log_weights<F>(support: GoalSet, log_weight: F) -> Result<Posterior, InferenceError>
    where
        F: Fn(GoalId) -> f64,
    {
        if support.is_empty() {
            return Err(InferenceError::EmptySupport);
        }
        let mut logs = [f64::NEG_INFINITY; NUM_GOALS];
        for g in support.ids() {
            logs[g] = log_weight(g);
        }
        let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut probs = [0.0; NUM_GOALS];
        if !m.is_finite() {
            // every weight underflowed or overflowed: fall back to uniform
            let n = support.len() as f64;
            for g in support.ids() {
                probs[g] = 1.0 / n;
            }
            return Ok(Posterior { probs });
        }
        let mut z = 0.0;
        for g in support.ids() {
            let w = (logs[g] - m).exp();
            probs[g] = w;
            z += w;
        }
        for p in probs.iter_mut() {
            *p /= z;
        }
        Ok(Posterior { probs })
    }

    pub fn prob(&self, g: GoalId) -> f64 {
        self.probs[g]
    }

    pub fn probs(&self) -> &[f64; NUM_GOALS] {
        &self.probs
    }

    pub fn support(&self) -> GoalSet {
        GoalSet::from_ids((0..NUM_GOALS).filter(|&g| self.probs[g] > 0.0))
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

impl fmt::Display for Posterior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (0..NUM_GOALS)
            .filter(|&g| self.probs[g] > 0.0)
            .map(|g| format!("{}={:.6}", crate::goalspace::all_goals()[g], self.probs[g]))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Argmax, ties to the lowest goal id.
pub fn predict_goal(p: &Posterior) -> GoalId {
    let mut best = 0;
    for g in 1..NUM_GOALS {
        if p.probs[g] > p.probs[best] {
            best = g;
        }
    }
    best
}

/// Goals consistent with the final states of every demonstration.
pub fn demo_support(demos: &[Plan]) -> GoalSet {
    demos.iter().fold(GoalSet::all(), |acc, d| {
        acc.intersect(consistent_goals(d.final_state()))
    })
}

pub fn demo_posterior(
    kind: LearnerKind,
    demos: &[Plan],
    q: &QTable,
    beta: f64,
) -> Result<Posterior, InferenceError> {
    if demos.is_empty() {
        return Err(InferenceError::NoSignals);
    }
    let support = demo_support(demos);
    match kind {
        LearnerKind::Literal => Posterior::uniform(support),
        LearnerKind::Pragmatic => {
            let space = StateSpace::get();
            let steps = demos
                .iter()
                .map(|d| plan_steps(space, d))
                .collect::<Result<Vec<_>, _>>()?;
            Posterior::from_log_weights(support, |g| {
                steps
                    .iter()
                    .map(|s| boltzmann_traj_log_likelihood(space, q, s, g, beta))
                    .sum()
            })
        }
    }
}

pub fn instruction_posterior(
    kind: LearnerKind,
    received: &[Goal],
    complete: bool,
    model: &SelfModel,
    laplace: f64,
) -> Result<Posterior, InferenceError> {
    let first = received.first().ok_or(InferenceError::NoSignals)?.id();
    let support = prefix_consistent(received, complete);
    match kind {
        LearnerKind::Literal => Posterior::uniform(support),
        LearnerKind::Pragmatic => Posterior::from_log_weights(support, |g| {
            model.first_subgoal_prob(g, first, laplace).ln()
        }),
    }
}
