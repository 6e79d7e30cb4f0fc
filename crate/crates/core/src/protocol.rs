//! One teaching round, end to end, and the mapping of rounds to modalities.
//!
//! A round runs: teacher signal, learner inference, retry on a wrong guess
//! (falling back to a reveal), signal incorporation, the learner's own
//! attempt at the goal, self-model update for pragmatic learners, and
//! hindsight replay.

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::blockworld::Plan;
use crate::goalspace::{consistent_goals, decompose, prefix_consistent, Goal, GoalId};
use crate::inference::{
    demo_posterior, instruction_posterior, predict_goal, InferenceError, LearnerKind, Posterior,
};
use crate::learner::{EpisodeLog, Learner, LearnerError};
use crate::teacher::{TeacherError, TeacherKind, TeacherSession};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error(transparent)]
    Teacher(#[from] TeacherError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error(transparent)]
    Learner(#[from] LearnerError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Modality {
    Demo,
    Instruction,
}

impl Modality {
    pub fn name(self) -> &'static str {
        match self {
            Modality::Demo => "demo",
            Modality::Instruction => "instruction",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TeachingSignal {
    Demonstration(Plan),
    InstructionMessage { subgoal: Goal, complete: bool },
    Reveal(GoalId),
}

impl fmt::Display for TeachingSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TeachingSignal::Demonstration(p) => write!(
                f,
                "demonstration {} consistent={}",
                p,
                consistent_goals(p.final_state()).len()
            ),
            TeachingSignal::InstructionMessage { subgoal, complete } => write!(
                f,
                "instruction {} complete={} consistent={}",
                subgoal,
                complete,
                prefix_consistent(std::slice::from_ref(subgoal), *complete).len()
            ),
            TeachingSignal::Reveal(g) => write!(f, "reveal {}", crate::goalspace::all_goals()[*g]),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScheduleKind {
    DemoOnly,
    InstructionOnly,
    DemoThenInstruction,
    InstructionThenDemo,
}

impl ScheduleKind {
    /// Report order.
    pub const ALL: [ScheduleKind; 4] = [
        ScheduleKind::DemoOnly,
        ScheduleKind::InstructionOnly,
        ScheduleKind::DemoThenInstruction,
        ScheduleKind::InstructionThenDemo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScheduleKind::DemoOnly => "demo-only",
            ScheduleKind::InstructionOnly => "instruction-only",
            ScheduleKind::DemoThenInstruction => "demo-then-instruction",
            ScheduleKind::InstructionThenDemo => "instruction-then-demo",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ScheduleKind::DemoOnly => "Demonstrations only",
            ScheduleKind::InstructionOnly => "Instructions only",
            ScheduleKind::DemoThenInstruction => "Demonstrations then Instructions",
            ScheduleKind::InstructionThenDemo => "Instructions then Demonstrations",
        }
    }

    pub fn from_name(s: &str) -> Option<ScheduleKind> {
        ScheduleKind::ALL.into_iter().find(|k| k.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModalitySchedule {
    pub kind: ScheduleKind,
    /// Fraction of the rounds taught with the first modality of a mixed schedule.
    pub switch_fraction: f64,
}

impl ModalitySchedule {
    pub fn new(kind: ScheduleKind) -> ModalitySchedule {
        ModalitySchedule {
            kind,
            switch_fraction: 0.5,
        }
    }
}

pub fn modality_for_round(schedule: &ModalitySchedule, round: usize, total: usize) -> Modality {
    debug_assert!(round < total);
    let early = (round as f64) < schedule.switch_fraction * total as f64;
    match schedule.kind {
        ScheduleKind::DemoOnly => Modality::Demo,
        ScheduleKind::InstructionOnly => Modality::Instruction,
        ScheduleKind::DemoThenInstruction if early => Modality::Demo,
        ScheduleKind::DemoThenInstruction => Modality::Instruction,
        ScheduleKind::InstructionThenDemo if early => Modality::Instruction,
        ScheduleKind::InstructionThenDemo => Modality::Demo,
    }
}

/// Knobs of the teaching loop shared by every round of a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoundSettings {
    pub retry_cap: usize,
    /// Whether signals of a revealed round are still incorporated.
    pub incorporate_on_reveal: bool,
}

impl Default for RoundSettings {
    fn default() -> Self {
        RoundSettings {
            retry_cap: 4,
            incorporate_on_reveal: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundOutcome {
    pub true_goal: GoalId,
    pub modality: Modality,
    pub predicted: GoalId,
    pub retries: usize,
    pub revealed: bool,
    pub signals: Vec<TeachingSignal>,
    /// One posterior per non-reveal signal, in order.
    pub posteriors: Vec<Posterior>,
    pub curriculum_episode: Option<EpisodeLog>,
    pub episode: EpisodeLog,
}

/// Runs one full teaching round for `g_true` and updates `learner` in place.
pub fn teaching_round<R: Rng>(
    teacher_kind: TeacherKind,
    learner_kind: LearnerKind,
    g_true: GoalId,
    modality: Modality,
    learner: &mut Learner,
    settings: &RoundSettings,
    rng: &mut R,
) -> Result<RoundOutcome, ProtocolError> {
    let goal = Goal::from_id(g_true).ok_or(TeacherError::UnknownGoal(g_true))?;
    let mut session = TeacherSession::new(teacher_kind, g_true, modality, settings.retry_cap)?;
    let mut demos: Vec<Plan> = Vec::new();
    let mut received: Vec<Goal> = Vec::new();
    let mut complete = false;
    let mut posteriors = Vec::new();
    let mut retries = 0;
    let mut revealed = false;

    let predicted = loop {
        match session.next_signal(rng) {
            TeachingSignal::Reveal(g) => {
                revealed = true;
                retries = settings.retry_cap;
                break g;
            }
            TeachingSignal::Demonstration(p) => demos.push(p),
            TeachingSignal::InstructionMessage {
                subgoal,
                complete: done,
            } => {
                received.push(subgoal);
                complete = done;
            }
        }
        let posterior = match modality {
            Modality::Demo => {
                demo_posterior(learner_kind, &demos, &learner.q, learner.params.beta)?
            }
            Modality::Instruction => instruction_posterior(
                learner_kind,
                &received,
                complete,
                &learner.self_model,
                learner.params.laplace,
            )?,
        };
        let guess = predict_goal(&posterior);
        posteriors.push(posterior);
        if guess == g_true {
            break guess;
        }
        retries += 1;
    };

    let incorporate = !revealed || settings.incorporate_on_reveal;
    let mut curriculum_episode = None;
    if incorporate {
        match modality {
            Modality::Demo => {
                for d in &demos {
                    learner.incorporate_demo(d, g_true, rng)?;
                }
            }
            Modality::Instruction => {
                curriculum_episode =
                    Some(learner.execute_curriculum(g_true, &decompose(goal), rng));
            }
        }
    }

    let episode = learner.run_episode(g_true, rng);

    if learner_kind == LearnerKind::Pragmatic {
        if let Some(e) = &curriculum_episode {
            learner.self_model.update(e);
        }
        learner.self_model.update(&episode);
    }
    if let Some(e) = &curriculum_episode {
        learner.learn_from_episode(e, rng);
    }
    learner.learn_from_episode(&episode, rng);

    Ok(RoundOutcome {
        true_goal: g_true,
        modality,
        predicted,
        retries,
        revealed,
        signals: session.sent().to_vec(),
        posteriors,
        curriculum_episode,
        episode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockworld::{Block, StateSpace};
    use crate::learner::LearnerParams;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use Block::*;

    fn fresh() -> Learner {
        Learner::new(LearnerParams::default()).unwrap()
    }

    #[test]
    fn schedule_mapping() {
        let s = ModalitySchedule::new(ScheduleKind::DemoThenInstruction);
        assert_eq!(modality_for_round(&s, 10, 100), Modality::Demo);
        assert_eq!(modality_for_round(&s, 49, 100), Modality::Demo);
        assert_eq!(modality_for_round(&s, 50, 100), Modality::Instruction);
        let s = ModalitySchedule::new(ScheduleKind::InstructionThenDemo);
        assert_eq!(modality_for_round(&s, 10, 100), Modality::Instruction);
        assert_eq!(modality_for_round(&s, 50, 100), Modality::Demo);
        let s = ModalitySchedule::new(ScheduleKind::InstructionOnly);
        for r in [0, 37, 99] {
            assert_eq!(modality_for_round(&s, r, 100), Modality::Instruction);
        }
        let s = ModalitySchedule::new(ScheduleKind::DemoOnly);
        assert_eq!(modality_for_round(&s, 99, 100), Modality::Demo);
    }

    #[test]
    fn pedagogical_pyramid_instruction_needs_no_retry() {
        let mut l = fresh();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let g = Goal::pyramid(C, A, B).id();
        let out = teaching_round(
            TeacherKind::Pedagogical,
            LearnerKind::Literal,
            g,
            Modality::Instruction,
            &mut l,
            &RoundSettings::default(),
            &mut rng,
        )
        .unwrap();
        assert_eq!(out.retries, 0);
        assert!(!out.revealed);
        assert_eq!(out.predicted, g);
        assert!(out.curriculum_episode.is_some());
    }

    #[test]
    fn naive_pyramid_instruction_needs_one_retry() {
        let mut l = fresh();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let g = Goal::pyramid(C, A, B).id();
        let out = teaching_round(
            TeacherKind::Naive,
            LearnerKind::Literal,
            g,
            Modality::Instruction,
            &mut l,
            &RoundSettings::default(),
            &mut rng,
        )
        .unwrap();
        assert_eq!(out.retries, 1);
        assert_eq!(out.signals.len(), 2);
        assert_eq!(predict_goal(&out.posteriors[0]), Goal::close(A, B).id());
        assert_eq!(out.predicted, g);
    }

    #[test]
    fn naive_close_demo_is_inferred_immediately() {
        // either a stacking or a side-by-side demo leads a literal learner to close:A-B
        for seed in 0..8 {
            let mut l = fresh();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let out = teaching_round(
                TeacherKind::Naive,
                LearnerKind::Literal,
                Goal::close(A, B).id(),
                Modality::Demo,
                &mut l,
                &RoundSettings::default(),
                &mut rng,
            )
            .unwrap();
            assert_eq!(out.retries, 0);
            assert_eq!(out.predicted, 0);
        }
    }

    #[test]
    fn literal_learner_cannot_tell_stack_from_contact() {
        let mut l = fresh();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let settings = RoundSettings::default();
        let out = teaching_round(
            TeacherKind::Pedagogical,
            LearnerKind::Literal,
            Goal::stack2(A, B).id(),
            Modality::Demo,
            &mut l,
            &settings,
            &mut rng,
        )
        .unwrap();
        assert!(out.revealed);
        assert_eq!(out.retries, settings.retry_cap);
        assert_eq!(out.predicted, Goal::stack2(A, B).id());
        assert!(matches!(
            out.signals.last(),
            Some(TeachingSignal::Reveal(_))
        ));
    }

    #[test]
    fn demo_round_fills_buffer() {
        let mut l = fresh();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = Goal::close(B, C).id();
        let out = teaching_round(
            TeacherKind::Naive,
            LearnerKind::Literal,
            g,
            Modality::Demo,
            &mut l,
            &RoundSettings::default(),
            &mut rng,
        )
        .unwrap();
        let space = StateSpace::get();
        for s in &out.signals {
            if let TeachingSignal::Demonstration(p) = s {
                let steps = crate::learner::plan_steps(space, p).unwrap();
                for (st, a) in steps {
                    assert!(l
                        .buffer
                        .iter()
                        .any(|t| t.state == st && t.action == a && t.goal == g));
                }
            }
        }
        assert_eq!(l.buffer.audit(space), None);
    }

    #[test]
    fn round_is_deterministic() {
        let run = || {
            let mut l = fresh();
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            let mut outs = Vec::new();
            for g in 0..18 {
                for m in [Modality::Demo, Modality::Instruction] {
                    outs.push(
                        teaching_round(
                            TeacherKind::Naive,
                            LearnerKind::Pragmatic,
                            g,
                            m,
                            &mut l,
                            &RoundSettings::default(),
                            &mut rng,
                        )
                        .unwrap(),
                    );
                }
            }
            (outs, l.q)
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn signal_records() {
        let s = TeachingSignal::InstructionMessage {
            subgoal: Goal::close(A, B),
            complete: false,
        };
        assert_eq!(
            s.to_string(),
            "instruction close:A-B complete=false consistent=2"
        );
        assert_eq!(
            TeachingSignal::Reveal(17).to_string(),
            "reveal pyramid:C-on-A-B"
        );
    }
}
