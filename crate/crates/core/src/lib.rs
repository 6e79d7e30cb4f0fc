//! Teacher-learner communication for goal-conditioned agents.
//!
//! A teacher conveys a goal in a three-block stacking world either by showing
//! (a demonstration) or by telling (a sequence of subgoal instructions). The
//! learner infers the intended goal with Bayesian goal inference, retries on
//! a wrong guess, incorporates the signal, and improves a goal-conditioned
//! tabular Q-function. The [`harness`] module runs the comparison grid of
//! teacher/learner pairings against modality schedules.

pub mod blockworld;
pub mod goalspace;
pub mod harness;
pub mod inference;
pub mod learner;
pub mod oracle;
pub mod protocol;
pub mod teacher;

pub use blockworld::{Action, Block, BlockPair, BlockState, Plan, StateSpace};
pub use goalspace::{Goal, GoalId, GoalSet};
pub use inference::{LearnerKind, Posterior};
pub use learner::{Learner, LearnerParams};
pub use protocol::{Modality, ModalitySchedule, ScheduleKind, TeachingSignal};
pub use teacher::TeacherKind;
