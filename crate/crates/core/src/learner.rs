//! Goal-conditioned tabular Q-learner.
//!
//! The learner keeps one Q-value per (state, goal, action), a FIFO replay
//! buffer fed by demonstrations and hindsight relabels of its own episodes,
//! and a self-model counting which goal predicate its own behaviour satisfies
//! first when pursuing each goal.

use std::collections::VecDeque;

use rand::Rng;
use thiserror::Error;

use crate::blockworld::{ActionId, Plan, StateId, StateSpace, NUM_ACTIONS};
use crate::goalspace::{Curriculum, Goal, GoalId, GoalSet, NUM_GOALS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LearnerError {
    #[error("demonstration does not achieve {goal}")]
    DemoGoalMismatch { goal: String },
    #[error("demonstration visits a state outside the enumerated space")]
    UnknownState,
    #[error("invalid learner parameter: {0}")]
    InvalidParams(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LearnerParams {
    pub alpha: f64,
    pub gamma: f64,
    /// Exploration rate at the start of a run; decays linearly to `epsilon_end`.
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    /// Inverse temperature of the Boltzmann observer model.
    pub beta: f64,
    pub max_steps: usize,
    pub capacity: usize,
    pub replay_updates_per_demo: usize,
    /// Replay updates after pushing hindsight relabels of own episodes.
    pub replay_updates_per_episode: usize,
    pub laplace: f64,
}

impl Default for LearnerParams {
    fn default() -> Self {
        LearnerParams {
            alpha: 0.1,
            gamma: 0.9,
            epsilon_start: 0.4,
            epsilon_end: 0.02,
            beta: 6.0,
            max_steps: 6,
            capacity: 50_000,
            replay_updates_per_demo: 200,
            replay_updates_per_episode: 50,
            laplace: 1.0,
        }
    }
}

impl LearnerParams {
    pub fn validate(&self) -> Result<(), LearnerError> {
        let bad = |what: &str| Err(LearnerError::InvalidParams(what.to_string()));
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad("alpha must lie in (0, 1]");
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return bad("gamma must lie in [0, 1)");
        }
        if !(0.0..=1.0).contains(&self.epsilon_start) || !(0.0..=1.0).contains(&self.epsilon_end) {
            return bad("epsilon must lie in [0, 1]");
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad("beta must be positive");
        }
        if self.max_steps == 0 {
            return bad("max_steps must be at least 1");
        }
        if self.capacity == 0 {
            return bad("capacity must be at least 1");
        }
        if !(self.laplace > 0.0 && self.laplace.is_finite()) {
            return bad("laplace must be positive");
        }
        Ok(())
    }

    /// Exploration rate after `progress` (0..=1) of the run.
    pub fn epsilon_at(&self, progress: f64) -> f64 {
        let p = progress.clamp(0.0, 1.0);
        self.epsilon_start + (self.epsilon_end - self.epsilon_start) * p
    }
}

/// Dense Q-values indexed by (state, goal, action).
#[derive(Clone, Debug, PartialEq)]
pub struct QTable {
    values: Vec<f64>,
    n_states: usize,
}

impl QTable {
    pub fn zeros(n_states: usize) -> QTable {
        QTable {
            values: vec![0.0; n_states * NUM_GOALS * NUM_ACTIONS],
            n_states,
        }
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    fn offset(&self, s: StateId, g: GoalId, a: ActionId) -> usize {
        debug_assert!(s < self.n_states && g < NUM_GOALS && a < NUM_ACTIONS);
        (s * NUM_GOALS + g) * NUM_ACTIONS + a
    }

    pub fn get(&self, s: StateId, g: GoalId, a: ActionId) -> f64 {
        self.values[self.offset(s, g, a)]
    }

    pub fn set(&mut self, s: StateId, g: GoalId, a: ActionId, v: f64) {
        let i = self.offset(s, g, a);
        self.values[i] = v;
    }

    /// Largest value over the actions legal in `s`.
    pub fn max_legal(&self, space: &StateSpace, s: StateId, g: GoalId) -> f64 {
        space
            .legal(s)
            .iter()
            .map(|&a| self.get(s, g, a))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Greedy legal action; ties go to the lowest action id.
    pub fn greedy(&self, space: &StateSpace, s: StateId, g: GoalId) -> ActionId {
        let mut best = None;
        for &a in space.legal(s) {
            let v = self.get(s, g, a);
            match best {
                Some((_, bv)) if v <= bv => {}
                _ => best = Some((a, v)),
            }
        }
        best.expect("every state has a legal action").0
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transition {
    pub state: StateId,
    pub action: ActionId,
    pub next_state: StateId,
    pub goal: GoalId,
    pub reward: f64,
    pub terminal: bool,
}

impl Transition {
    /// Builds a transition with reward and termination derived from `goal`.
    pub fn labeled(
        space: &StateSpace,
        state: StateId,
        action: ActionId,
        next_state: StateId,
        goal: GoalId,
    ) -> Transition {
        let hit = space.satisfies(next_state, goal);
        Transition {
            state,
            action,
            next_state,
            goal,
            reward: if hit { 1.0 } else { 0.0 },
            terminal: hit,
        }
    }

    pub fn relabel(&self, space: &StateSpace, goal: GoalId) -> Transition {
        Transition::labeled(space, self.state, self.action, self.next_state, goal)
    }

    /// Reward equals goal satisfaction of the next state, and only goal hits terminate.
    pub fn is_consistent(&self, space: &StateSpace) -> bool {
        let hit = space.satisfies(self.next_state, self.goal);
        (self.reward == 1.0) == hit
            && (self.reward == 0.0 || self.reward == 1.0)
            && (!self.terminal || self.reward == 1.0)
            && space.step(self.state, self.action) == Some(self.next_state)
    }
}

/// Bounded FIFO of transitions.
#[derive(Clone, Debug, PartialEq)]
pub struct ReplayBuffer {
    items: VecDeque<Transition>,
    capacity: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> ReplayBuffer {
        assert!(capacity > 0, "replay buffer capacity must be positive");
        ReplayBuffer {
            items: VecDeque::with_capacity(capacity.min(4096)),
            capacity,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn push(&mut self, t: Transition) {
        if self.items.len() == self.capacity {
            self.items.pop_front();
        }
        self.items.push_back(t);
    }

    pub fn extend<I: IntoIterator<Item = Transition>>(&mut self, ts: I) {
        for t in ts {
            self.push(t);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        self.items.iter()
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Option<&Transition> {
        if self.items.is_empty() {
            None
        } else {
            self.items.get(rng.gen_range(0..self.items.len()))
        }
    }

    /// Index of the first stored transition violating its reward invariant.
    pub fn audit(&self, space: &StateSpace) -> Option<usize> {
        self.items.iter().position(|t| !t.is_consistent(space))
    }
}

/// Counts of the first goal predicate the learner's own episodes satisfied,
/// per pursued goal.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SelfModel {
    first_subgoal_counts: [[u32; NUM_GOALS]; NUM_GOALS],
    episode_counts: [u32; NUM_GOALS],
}

impl SelfModel {
    pub fn new() -> SelfModel {
        SelfModel::default()
    }

    pub fn first_subgoal_count(&self, pursued: GoalId, first: GoalId) -> u32 {
        self.first_subgoal_counts[pursued][first]
    }

    pub fn episode_count(&self, pursued: GoalId) -> u32 {
        self.episode_counts[pursued]
    }

    pub fn is_empty(&self) -> bool {
        self.episode_counts.iter().all(|&c| c == 0)
    }

    pub fn update(&mut self, e: &EpisodeLog) {
        self.episode_counts[e.pursued] += 1;
        if let Some(p) = e.first_satisfied {
            self.first_subgoal_counts[e.pursued][p] += 1;
        }
    }

    /// Smoothed estimate of P(first satisfied = `first` | pursuing `pursued`).
    pub fn first_subgoal_prob(&self, pursued: GoalId, first: GoalId, laplace: f64) -> f64 {
        (self.first_subgoal_count(pursued, first) as f64 + laplace)
            / (self.episode_count(pursued) as f64 + laplace * NUM_GOALS as f64)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeLog {
    pub transitions: Vec<Transition>,
    pub pursued: GoalId,
    pub achieved: StateId,
    pub first_satisfied: Option<GoalId>,
}

impl EpisodeLog {
    pub fn success(&self, space: &StateSpace) -> bool {
        space.satisfies(self.achieved, self.pursued)
    }

    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }
}

/// Epsilon-greedy action choice over the legal actions of `s`.
pub fn act<R: Rng>(
    space: &StateSpace,
    q: &QTable,
    s: StateId,
    g: GoalId,
    epsilon: f64,
    rng: &mut R,
) -> ActionId {
    if epsilon > 0.0 && rng.gen::<f64>() < epsilon {
        let legal = space.legal(s);
        legal[rng.gen_range(0..legal.len())]
    } else {
        q.greedy(space, s, g)
    }
}

pub fn q_update(space: &StateSpace, q: &mut QTable, t: &Transition, alpha: f64, gamma: f64) {
    let bootstrap = if t.terminal {
        0.0
    } else {
        q.max_legal(space, t.next_state, t.goal)
    };
    let old = q.get(t.state, t.goal, t.action);
    let target = t.reward + gamma * bootstrap;
    q.set(t.state, t.goal, t.action, old + alpha * (target - old));
}

/// Goals newly satisfied on entering `next` from `prev`, lowest id first.
fn newly_satisfied(space: &StateSpace, prev: StateId, next: StateId) -> Option<GoalId> {
    let before = space.satisfied(prev);
    let after = space.satisfied(next);
    GoalSet::from_ids(after.ids().filter(|&g| !before.contains_id(g))).first()
}

/// Copies of the episode relabelled with every goal its final state satisfies.
///
/// Each copy stops at the first transition reaching the relabelled goal,
/// where a real episode pursuing that goal would have terminated.
pub fn hindsight_relabel(space: &StateSpace, e: &EpisodeLog) -> Vec<Transition> {
    let mut out = Vec::new();
    for g in space.satisfied(e.achieved).ids() {
        for t in &e.transitions {
            let r = t.relabel(space, g);
            out.push(r);
            if r.terminal {
                break;
            }
        }
    }
    out
}

/// Log-probability of the demonstrated actions under a Boltzmann policy over
/// `q(., g, .)` with inverse temperature `beta`.
pub fn boltzmann_traj_log_likelihood(
    space: &StateSpace,
    q: &QTable,
    demo: &[(StateId, ActionId)],
    g: GoalId,
    beta: f64,
) -> f64 {
    demo.iter()
        .map(|&(s, a)| {
            let legal = space.legal(s);
            let m = legal
                .iter()
                .map(|&b| beta * q.get(s, g, b))
                .fold(f64::NEG_INFINITY, f64::max);
            let lse = m + legal
                .iter()
                .map(|&b| (beta * q.get(s, g, b) - m).exp())
                .sum::<f64>()
                .ln();
            beta * q.get(s, g, a) - lse
        })
        .sum()
}

pub fn boltzmann_traj_likelihood(
    space: &StateSpace,
    q: &QTable,
    demo: &Plan,
    g: GoalId,
    beta: f64,
) -> Result<f64, LearnerError> {
    let steps = plan_steps(space, demo)?;
    Ok(boltzmann_traj_log_likelihood(space, q, &steps, g, beta).exp())
}

/// (state id, action id) pairs along a plan.
pub fn plan_steps(
    space: &StateSpace,
    demo: &Plan,
) -> Result<Vec<(StateId, ActionId)>, LearnerError> {
    demo.actions
        .iter()
        .zip(&demo.states)
        .map(|(a, s)| {
            let sid = space.id_of(s).ok_or(LearnerError::UnknownState)?;
            let aid = a.id().ok_or(LearnerError::UnknownState)?;
            Ok((sid, aid))
        })
        .collect()
}

/// Mutable learning state of one agent for one run.
#[derive(Clone, Debug)]
pub struct Learner {
    pub q: QTable,
    pub buffer: ReplayBuffer,
    pub self_model: SelfModel,
    pub params: LearnerParams,
    epsilon: f64,
    space: &'static StateSpace,
}

impl Learner {
    pub fn new(params: LearnerParams) -> Result<Learner, LearnerError> {
        params.validate()?;
        let space = StateSpace::get();
        Ok(Learner {
            q: QTable::zeros(space.len()),
            buffer: ReplayBuffer::new(params.capacity),
            self_model: SelfModel::new(),
            epsilon: params.epsilon_start,
            params,
            space,
        })
    }

    pub fn space(&self) -> &'static StateSpace {
        self.space
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn set_epsilon(&mut self, epsilon: f64) {
        assert!((0.0..=1.0).contains(&epsilon), "epsilon out of range");
        self.epsilon = epsilon;
    }

    fn learn(&mut self, t: &Transition) {
        q_update(
            self.space,
            &mut self.q,
            t,
            self.params.alpha,
            self.params.gamma,
        );
    }

    /// One episode from the initial state pursuing `g`, with online updates.
    pub fn run_episode<R: Rng>(&mut self, g: GoalId, rng: &mut R) -> EpisodeLog {
        let space = self.space;
        let mut s = space.initial();
        let mut transitions = Vec::new();
        let mut first_satisfied = None;
        for _ in 0..self.params.max_steps {
            if space.satisfies(s, g) {
                break;
            }
            let a = act(space, &self.q, s, g, self.epsilon, rng);
            let next = space.step(s, a).expect("legal action");
            let t = Transition::labeled(space, s, a, next, g);
            self.learn(&t);
            if first_satisfied.is_none() {
                first_satisfied = newly_satisfied(space, s, next);
            }
            transitions.push(t);
            s = next;
        }
        EpisodeLog {
            transitions,
            pursued: g,
            achieved: s,
            first_satisfied,
        }
    }

    /// Follows the subgoals in order within one episode budget. The log is
    /// attributed to `target`, the goal the curriculum was built for.
    pub fn execute_curriculum<R: Rng>(
        &mut self,
        target: GoalId,
        c: &Curriculum,
        rng: &mut R,
    ) -> EpisodeLog {
        let space = self.space;
        let subgoals: Vec<GoalId> = c.subgoals().iter().map(Goal::id).collect();
        let mut s = space.initial();
        let mut idx = 0;
        let mut steps = 0;
        let mut transitions = Vec::new();
        let mut first_satisfied = None;
        while idx < subgoals.len() && steps < self.params.max_steps {
            let sub = subgoals[idx];
            if space.satisfies(s, sub) {
                idx += 1;
                continue;
            }
            let a = act(space, &self.q, s, sub, self.epsilon, rng);
            let next = space.step(s, a).expect("legal action");
            let t = Transition::labeled(space, s, a, next, sub);
            self.learn(&t);
            if first_satisfied.is_none() {
                first_satisfied = newly_satisfied(space, s, next);
            }
            transitions.push(t);
            s = next;
            steps += 1;
            if t.terminal {
                idx += 1;
            }
        }
        EpisodeLog {
            transitions,
            pursued: target,
            achieved: s,
            first_satisfied,
        }
    }

    /// `n` Q-updates on uniformly sampled buffer transitions.
    pub fn replay<R: Rng>(&mut self, n: usize, rng: &mut R) {
        for _ in 0..n {
            let t = match self.buffer.sample(rng) {
                Some(t) => *t,
                None => return,
            };
            self.learn(&t);
        }
    }

    /// Stores a demonstration for `g_true` (plus its hindsight relabels) and
    /// replays from the buffer.
    pub fn incorporate_demo<R: Rng>(
        &mut self,
        demo: &Plan,
        g_true: GoalId,
        rng: &mut R,
    ) -> Result<(), LearnerError> {
        let space = self.space;
        let steps = plan_steps(space, demo)?;
        let final_id = space
            .id_of(demo.final_state())
            .ok_or(LearnerError::UnknownState)?;
        if !space.satisfies(final_id, g_true) {
            return Err(LearnerError::DemoGoalMismatch {
                goal: Goal::from_id(g_true)
                    .map(|g| g.to_string())
                    .unwrap_or_default(),
            });
        }
        let transitions: Vec<Transition> = steps
            .iter()
            .zip(demo.states.iter().skip(1))
            .map(|(&(s, a), n)| {
                let next = space.id_of(n).ok_or(LearnerError::UnknownState)?;
                Ok(Transition::labeled(space, s, a, next, g_true))
            })
            .collect::<Result<_, LearnerError>>()?;
        let log = EpisodeLog {
            transitions,
            pursued: g_true,
            achieved: final_id,
            first_satisfied: None,
        };
        self.buffer.extend(log.transitions.iter().copied());
        let others: Vec<Transition> = hindsight_relabel(space, &log)
            .into_iter()
            .filter(|t| t.goal != g_true)
            .collect();
        self.buffer.extend(others);
        self.replay(self.params.replay_updates_per_demo, rng);
        Ok(())
    }

    /// Pushes hindsight relabels of an own episode and replays.
    pub fn learn_from_episode<R: Rng>(&mut self, e: &EpisodeLog, rng: &mut R) {
        let relabels = hindsight_relabel(self.space, e);
        self.buffer.extend(relabels);
        self.replay(self.params.replay_updates_per_episode, rng);
    }

    /// Upper bound of any Q-value under rewards in {0, 1}.
    pub fn value_bound(&self) -> f64 {
        1.0 / (1.0 - self.params.gamma)
    }

    pub fn q_within_bounds(&self) -> bool {
        let hi = self.value_bound() + 1e-12;
        self.q
            .values()
            .iter()
            .all(|v| v.is_finite() && *v >= 0.0 && *v <= hi)
    }
}
