//! Expert teacher: demonstrations from the shortest-plan planner and
//! instruction messages from goal decompositions.
//!
//! A pedagogical teacher predicts what a literal observer would infer from
//! each candidate signal and prefers the least ambiguous one. A naive teacher
//! picks demonstrations at random and sends subgoals in execution order.

use std::collections::BTreeSet;

use rand::Rng;
use thiserror::Error;

use crate::blockworld::{initial_state, shortest_plans, BlockState, Plan, WorldError};
use crate::goalspace::{consistent_goals, decompose, prefix_consistent, Curriculum, Goal, GoalId};
use crate::protocol::{Modality, TeachingSignal};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TeacherError {
    #[error("every candidate demonstration has already been sent")]
    Exhausted,
    #[error("unknown goal id {0}")]
    UnknownGoal(GoalId),
    #[error(transparent)]
    World(#[from] WorldError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TeacherKind {
    Naive,
    Pedagogical,
}

impl TeacherKind {
    pub fn name(self) -> &'static str {
        match self {
            TeacherKind::Naive => "naive",
            TeacherKind::Pedagogical => "pedagogical",
        }
    }
}

pub fn candidate_demos(start: &BlockState, g: Goal) -> Result<Vec<Plan>, TeacherError> {
    Ok(shortest_plans(start, g)?)
}

/// Index of the next demonstration to send.
///
/// Naive: uniform over unsent candidates. Pedagogical: the unsent candidate
/// whose final state is consistent with the fewest goals, earliest on ties.
pub fn select_demo<R: Rng>(
    kind: TeacherKind,
    candidates: &[Plan],
    already_sent: &BTreeSet<usize>,
    rng: &mut R,
) -> Result<usize, TeacherError> {
    let unsent: Vec<usize> = (0..candidates.len())
        .filter(|i| !already_sent.contains(i))
        .collect();
    if unsent.is_empty() {
        return Err(TeacherError::Exhausted);
    }
    Ok(match kind {
        TeacherKind::Naive => unsent[rng.gen_range(0..unsent.len())],
        TeacherKind::Pedagogical => *unsent
            .iter()
            .min_by_key(|&&i| (consistent_goals(candidates[i].final_state()).len(), i))
            .expect("non-empty"),
    })
}

/// The order in which the subgoals of `g` are communicated.
pub fn instruction_order(kind: TeacherKind, g: Goal) -> Curriculum {
    let parts = decompose(g);
    match kind {
        TeacherKind::Naive => parts,
        TeacherKind::Pedagogical => {
            let subgoals = parts.subgoals();
            let lead = (0..subgoals.len())
                .min_by_key(|&i| (prefix_consistent(&subgoals[i..=i], false).len(), i))
                .expect("non-empty curriculum");
            let mut order = vec![subgoals[lead]];
            order.extend(
                subgoals
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != lead)
                    .map(|(_, s)| *s),
            );
            Curriculum::new(order).expect("non-empty")
        }
    }
}

/// One teaching interaction for a single goal: the teacher's candidate
/// signals and everything sent so far.
#[derive(Clone, Debug)]
pub struct TeacherSession {
    kind: TeacherKind,
    true_goal: GoalId,
    modality: Modality,
    sent: Vec<TeachingSignal>,
    demo_candidates: Vec<Plan>,
    sent_demos: BTreeSet<usize>,
    instruction_order: Curriculum,
    retry_cap: usize,
}

impl TeacherSession {
    pub fn new(
        kind: TeacherKind,
        true_goal: GoalId,
        modality: Modality,
        retry_cap: usize,
    ) -> Result<TeacherSession, TeacherError> {
        let goal = Goal::from_id(true_goal).ok_or(TeacherError::UnknownGoal(true_goal))?;
        let demo_candidates = match modality {
            Modality::Demo => candidate_demos(&initial_state(), goal)?,
            Modality::Instruction => Vec::new(),
        };
        Ok(TeacherSession {
            kind,
            true_goal,
            modality,
            sent: Vec::new(),
            demo_candidates,
            sent_demos: BTreeSet::new(),
            instruction_order: instruction_order(kind, goal),
            retry_cap,
        })
    }

    pub fn sent(&self) -> &[TeachingSignal] {
        &self.sent
    }

    pub fn demo_candidates(&self) -> &[Plan] {
        &self.demo_candidates
    }

    pub fn instruction_order(&self) -> &Curriculum {
        &self.instruction_order
    }

    pub fn is_finished(&self) -> bool {
        matches!(self.sent.last(), Some(TeachingSignal::Reveal(_)))
    }

    /// Next signal after a wrong (or no) prediction. Falls back to revealing
    /// the goal once the candidates run out or `retry_cap` signals were sent.
    pub fn next_signal<R: Rng>(&mut self, rng: &mut R) -> TeachingSignal {
        assert!(!self.is_finished(), "session already revealed its goal");
        let signal = if self.sent.len() >= self.retry_cap {
            TeachingSignal::Reveal(self.true_goal)
        } else {
            match self.modality {
                Modality::Demo => {
                    match select_demo(self.kind, &self.demo_candidates, &self.sent_demos, rng) {
                        Ok(i) => {
                            self.sent_demos.insert(i);
                            TeachingSignal::Demonstration(self.demo_candidates[i].clone())
                        }
                        Err(_) => TeachingSignal::Reveal(self.true_goal),
                    }
                }
                Modality::Instruction => {
                    let order = self.instruction_order.subgoals();
                    let k = self.sent.len();
                    if k < order.len() {
                        TeachingSignal::InstructionMessage {
                            subgoal: order[k],
                            complete: k + 1 == order.len(),
                        }
                    } else {
                        TeachingSignal::Reveal(self.true_goal)
                    }
                }
            }
        };
        self.sent.push(signal.clone());
        signal
    }
}
