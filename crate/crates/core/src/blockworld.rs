//! Discrete three-block stacking world.
//!
//! A state records, for each block, what it rests on (the table, another
//! block, or a pair of table-level blocks) plus which table-level pairs are
//! pushed together. Actions are pick-and-place moves of a single clear block.
//! The reachable state space is small enough to enumerate, which gives every
//! state a stable integer id used by the tabular learner.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::goalspace::{all_goals, Goal, GoalSet, NUM_GOALS};

pub type StateId = usize;
pub type ActionId = usize;

/// Number of distinct actions in the global vocabulary (6 per block).
pub const NUM_ACTIONS: usize = 18;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WorldError {
    #[error("illegal action {action} in state {state}")]
    IllegalAction { state: String, action: String },
    #[error("goal {goal} unreachable from {state}")]
    Unreachable { state: String, goal: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Block {
    A,
    B,
    C,
}

impl Block {
    pub const ALL: [Block; 3] = [Block::A, Block::B, Block::C];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Block> {
        Block::ALL.get(i).copied()
    }

    pub fn letter(self) -> char {
        match self {
            Block::A => 'A',
            Block::B => 'B',
            Block::C => 'C',
        }
    }

    pub fn from_letter(c: char) -> Option<Block> {
        match c {
            'A' => Some(Block::A),
            'B' => Some(Block::B),
            'C' => Some(Block::C),
            _ => None,
        }
    }

    /// The two other blocks, in canonical order.
    pub fn others(self) -> [Block; 2] {
        match self {
            Block::A => [Block::B, Block::C],
            Block::B => [Block::A, Block::C],
            Block::C => [Block::A, Block::B],
        }
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Unordered pair of distinct blocks, stored with the lower block first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockPair(Block, Block);

impl BlockPair {
    pub const ALL: [BlockPair; 3] = [
        BlockPair(Block::A, Block::B),
        BlockPair(Block::A, Block::C),
        BlockPair(Block::B, Block::C),
    ];

    pub fn new(x: Block, y: Block) -> Option<BlockPair> {
        match x.cmp(&y) {
            std::cmp::Ordering::Less => Some(BlockPair(x, y)),
            std::cmp::Ordering::Greater => Some(BlockPair(y, x)),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn first(self) -> Block {
        self.0
    }

    pub fn second(self) -> Block {
        self.1
    }

    pub fn contains(self, b: Block) -> bool {
        self.0 == b || self.1 == b
    }

    pub fn index(self) -> usize {
        match (self.0, self.1) {
            (Block::A, Block::B) => 0,
            (Block::A, Block::C) => 1,
            _ => 2,
        }
    }

    /// The pair made of the two blocks other than `b`.
    pub fn complement(b: Block) -> BlockPair {
        let [x, y] = b.others();
        BlockPair(x, y)
    }

    /// The block not in this pair.
    pub fn outsider(self) -> Block {
        Block::ALL
            .into_iter()
            .find(|&b| !self.contains(b))
            .expect("three blocks")
    }
}

impl fmt::Display for BlockPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

/// What a block rests on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Support {
    Table,
    OnBlock(Block),
    OnPair(BlockPair),
}

/// Arrangement of the three blocks.
///
/// The derived ordering (support of A, B, C, then the closeness bitmask) is
/// the canonical serialization order used to assign state ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockState {
    support: [Support; 3],
    close: u8,
}

impl BlockState {
    /// Builds a state without validation. Use [`BlockState::is_valid`] to check.
    pub fn from_parts(support: [Support; 3], close: &[BlockPair]) -> BlockState {
        let mask = close.iter().fold(0u8, |m, p| m | (1 << p.index()));
        BlockState {
            support,
            close: mask,
        }
    }

    pub fn support(&self, b: Block) -> Support {
        self.support[b.index()]
    }

    pub fn is_close(&self, p: BlockPair) -> bool {
        self.close & (1 << p.index()) != 0
    }

    pub fn close_pairs(&self) -> impl Iterator<Item = BlockPair> + '_ {
        BlockPair::ALL.into_iter().filter(|&p| self.is_close(p))
    }

    pub fn on_table(&self, b: Block) -> bool {
        self.support(b) == Support::Table
    }

    /// Block resting directly on `b`, if any.
    pub fn occupant(&self, b: Block) -> Option<Block> {
        Block::ALL
            .into_iter()
            .find(|&x| self.support(x) == Support::OnBlock(b))
    }

    /// True when nothing rests on `b` and `b` is not a base of an occupied pair.
    pub fn is_clear(&self, b: Block) -> bool {
        Block::ALL.into_iter().all(|x| match self.support(x) {
            Support::Table => true,
            Support::OnBlock(y) => y != b,
            Support::OnPair(p) => !p.contains(b),
        })
    }

    pub fn is_valid(&self) -> bool {
        // no self-support
        for b in Block::ALL {
            match self.support(b) {
                Support::Table => {}
                Support::OnBlock(y) if y == b => return false,
                Support::OnPair(p) if p.contains(b) => return false,
                _ => {}
            }
        }
        // acyclic
        for b in Block::ALL {
            let mut cur = b;
            let mut steps = 0;
            while let Support::OnBlock(y) = self.support(cur) {
                cur = y;
                steps += 1;
                if cur == b || steps > 3 {
                    return false;
                }
            }
        }
        // at most one occupant per block
        for b in Block::ALL {
            let n = Block::ALL
                .into_iter()
                .filter(|&x| self.support(x) == Support::OnBlock(b))
                .count();
            if n > 1 {
                return false;
            }
        }
        for b in Block::ALL {
            if let Support::OnPair(p) = self.support(b) {
                if !self.is_close(p)
                    || !self.on_table(p.first())
                    || !self.on_table(p.second())
                    || self.occupant(p.first()).is_some()
                    || self.occupant(p.second()).is_some()
                {
                    return false;
                }
            }
        }
        self.close_pairs()
            .all(|p| self.on_table(p.first()) && self.on_table(p.second()))
    }

    /// Debug rendering, one line per block in canonical order.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        for b in Block::ALL {
            let rest = match self.support(b) {
                Support::Table => {
                    let near: Vec<String> = self
                        .close_pairs()
                        .filter(|p| p.contains(b))
                        .map(|p| {
                            if p.first() == b {
                                p.second().to_string()
                            } else {
                                p.first().to_string()
                            }
                        })
                        .collect();
                    if near.is_empty() {
                        "table".to_string()
                    } else {
                        format!("table near {}", near.join(","))
                    }
                }
                Support::OnBlock(y) => format!("on {y}"),
                Support::OnPair(p) => format!("on pair {p}"),
            };
            out.push_str(&format!("{b}: {rest}\n"));
        }
        out
    }
}

impl fmt::Display for BlockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = Block::ALL
            .into_iter()
            .map(|b| match self.support(b) {
                Support::Table => format!("{b}:T"),
                Support::OnBlock(y) => format!("{b}:on{y}"),
                Support::OnPair(p) => format!("{b}:on{p}"),
            })
            .collect();
        let close: Vec<String> = self.close_pairs().map(|p| p.to_string()).collect();
        write!(f, "[{}|{}]", parts.join(" "), close.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Destination {
    TableApart,
    TableCloseTo(Block),
    OnTop(Block),
    OnPair(BlockPair),
}

/// Pick up `block` and place it at `destination`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Action {
    pub block: Block,
    pub destination: Destination,
}

impl Action {
    pub fn new(block: Block, destination: Destination) -> Action {
        Action { block, destination }
    }

    /// The global action vocabulary in id order (block, then destination).
    pub fn vocabulary() -> [Action; NUM_ACTIONS] {
        let mut out = [Action::new(Block::A, Destination::TableApart); NUM_ACTIONS];
        let mut i = 0;
        for b in Block::ALL {
            let [y, z] = b.others();
            for d in [
                Destination::TableApart,
                Destination::TableCloseTo(y),
                Destination::TableCloseTo(z),
                Destination::OnTop(y),
                Destination::OnTop(z),
                Destination::OnPair(BlockPair::complement(b)),
            ] {
                out[i] = Action::new(b, d);
                i += 1;
            }
        }
        out
    }

    /// Position in [`Action::vocabulary`]; `None` for malformed actions.
    pub fn id(&self) -> Option<ActionId> {
        let b = self.block;
        let [y, z] = b.others();
        let slot = match self.destination {
            Destination::TableApart => 0,
            Destination::TableCloseTo(t) if t == y => 1,
            Destination::TableCloseTo(t) if t == z => 2,
            Destination::OnTop(t) if t == y => 3,
            Destination::OnTop(t) if t == z => 4,
            Destination::OnPair(p) if p == BlockPair::complement(b) => 5,
            _ => return None,
        };
        Some(b.index() * 6 + slot)
    }

    pub fn from_id(id: ActionId) -> Option<Action> {
        Action::vocabulary().get(id).copied()
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = match self.destination {
            Destination::TableApart => "TableApart".to_string(),
            Destination::TableCloseTo(y) => format!("TableCloseTo({y})"),
            Destination::OnTop(y) => format!("OnTop({y})"),
            Destination::OnPair(p) => format!("OnPair({},{})", p.first(), p.second()),
        };
        write!(f, "PP({},{})", self.block, d)
    }
}

/// A demonstration: actions and the states they visit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Plan {
    pub actions: Vec<Action>,
    pub states: Vec<BlockState>,
}

impl Plan {
    pub fn empty(start: BlockState) -> Plan {
        Plan {
            actions: Vec::new(),
            states: vec![start],
        }
    }

    /// Replays `actions` from `start`.
    pub fn from_actions(start: BlockState, actions: &[Action]) -> Result<Plan, WorldError> {
        let mut states = vec![start];
        let mut cur = start;
        for a in actions {
            cur = apply(&cur, a)?;
            states.push(cur);
        }
        Ok(Plan {
            actions: actions.to_vec(),
            states,
        })
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn start(&self) -> &BlockState {
        &self.states[0]
    }

    pub fn final_state(&self) -> &BlockState {
        self.states.last().expect("plan has at least one state")
    }

    /// Checks that consecutive states are linked by `apply` and all are valid.
    pub fn is_consistent(&self) -> bool {
        self.states.len() == self.actions.len() + 1
            && self.states.iter().all(BlockState::is_valid)
            && self
                .actions
                .iter()
                .enumerate()
                .all(|(i, a)| apply(&self.states[i], a).ok() == Some(self.states[i + 1]))
    }
}

impl fmt::Display for Plan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let acts: Vec<String> = self.actions.iter().map(|a| a.to_string()).collect();
        write!(f, "[{}]", acts.join(", "))
    }
}

pub fn initial_state() -> BlockState {
    BlockState {
        support: [Support::Table; 3],
        close: 0,
    }
}

pub fn is_legal(s: &BlockState, a: &Action) -> bool {
    let x = a.block;
    if !s.is_clear(x) {
        return false;
    }
    match a.destination {
        Destination::TableApart => true,
        Destination::TableCloseTo(y) => y != x && s.on_table(y),
        Destination::OnTop(y) => y != x && s.is_clear(y),
        Destination::OnPair(p) => {
            !p.contains(x) && s.is_close(p) && s.is_clear(p.first()) && s.is_clear(p.second())
        }
    }
}

/// Legal actions in canonical (id) order.
pub fn legal_actions(s: &BlockState) -> Vec<Action> {
    Action::vocabulary()
        .into_iter()
        .filter(|a| is_legal(s, a))
        .collect()
}

pub fn apply(s: &BlockState, a: &Action) -> Result<BlockState, WorldError> {
    if !is_legal(s, a) {
        return Err(WorldError::IllegalAction {
            state: s.to_string(),
            action: a.to_string(),
        });
    }
    let x = a.block;
    let mut next = *s;
    for p in BlockPair::ALL {
        if p.contains(x) {
            next.close &= !(1 << p.index());
        }
    }
    next.support[x.index()] = match a.destination {
        Destination::TableApart => Support::Table,
        Destination::TableCloseTo(y) => {
            let p = BlockPair::new(x, y).expect("distinct blocks");
            next.close |= 1 << p.index();
            Support::Table
        }
        Destination::OnTop(y) => Support::OnBlock(y),
        Destination::OnPair(p) => Support::OnPair(p),
    };
    debug_assert!(next.is_valid(), "apply produced invalid state {next}");
    Ok(next)
}

/// All states reachable from the initial state, sorted canonically.
pub fn enumerate_states() -> Vec<BlockState> {
    let start = initial_state();
    let mut seen = vec![start];
    let mut index: HashSet<BlockState> = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        for a in legal_actions(&s) {
            let n = apply(&s, &a).expect("legal action");
            if index.insert(n) {
                seen.push(n);
                queue.push_back(n);
            }
        }
    }
    seen.sort();
    seen
}

/// Every minimum-length plan from `start` to a state satisfying `goal`.
pub fn shortest_plans(start: &BlockState, goal: Goal) -> Result<Vec<Plan>, WorldError> {
    shortest_plans_where(start, |s| goal.is_satisfied(s)).ok_or_else(|| WorldError::Unreachable {
        state: start.to_string(),
        goal: goal.to_string(),
    })
}

/// Breadth-first search for all shortest action sequences reaching `accept`.
///
/// Distances are computed layer by layer until the first layer containing an
/// accepting state; plans are then expanded depth-first along edges that
/// advance exactly one layer, which yields them in legal-action order.
pub fn shortest_plans_where<F>(start: &BlockState, accept: F) -> Option<Vec<Plan>>
where
    F: Fn(&BlockState) -> bool,
{
    if accept(start) {
        return Some(vec![Plan::empty(*start)]);
    }
    let mut depth: HashMap<BlockState, usize> = HashMap::from([(*start, 0)]);
    let mut frontier = vec![*start];
    let mut target_depth = None;
    let mut d = 0;
    while target_depth.is_none() && !frontier.is_empty() {
        d += 1;
        let mut next_frontier = Vec::new();
        for s in &frontier {
            for a in legal_actions(s) {
                let n = apply(s, &a).expect("legal action");
                if let Entry::Vacant(e) = depth.entry(n) {
                    e.insert(d);
                    next_frontier.push(n);
                    if accept(&n) {
                        target_depth = Some(d);
                    }
                }
            }
        }
        frontier = next_frontier;
    }
    let target = target_depth?;

    let mut plans = Vec::new();
    let mut actions = Vec::new();
    let mut states = vec![*start];
    expand(
        &depth,
        &accept,
        target,
        &mut actions,
        &mut states,
        &mut plans,
    );
    Some(plans)
}

fn expand<F>(
    depth: &HashMap<BlockState, usize>,
    accept: &F,
    target: usize,
    actions: &mut Vec<Action>,
    states: &mut Vec<BlockState>,
    plans: &mut Vec<Plan>,
) where
    F: Fn(&BlockState) -> bool,
{
    let cur = *states.last().expect("non-empty");
    let level = actions.len();
    if level == target {
        if accept(&cur) {
            plans.push(Plan {
                actions: actions.clone(),
                states: states.clone(),
            });
        }
        return;
    }
    for a in legal_actions(&cur) {
        let n = apply(&cur, &a).expect("legal action");
        if depth.get(&n) == Some(&(level + 1)) {
            actions.push(a);
            states.push(n);
            expand(depth, accept, target, actions, states, plans);
            actions.pop();
            states.pop();
        }
    }
}

/// Precomputed tabular view of the world: state ids, transitions and goal
/// satisfaction for every enumerated state.
#[derive(Debug)]
pub struct StateSpace {
    states: Vec<BlockState>,
    ids: HashMap<BlockState, StateId>,
    legal: Vec<Vec<ActionId>>,
    next: Vec<[Option<StateId>; NUM_ACTIONS]>,
    satisfied: Vec<GoalSet>,
    initial: StateId,
}

impl StateSpace {
    pub fn build() -> StateSpace {
        let states = enumerate_states();
        let ids: HashMap<BlockState, StateId> =
            states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let vocab = Action::vocabulary();
        let mut legal = Vec::with_capacity(states.len());
        let mut next = Vec::with_capacity(states.len());
        let mut satisfied = Vec::with_capacity(states.len());
        for s in &states {
            let mut row = [None; NUM_ACTIONS];
            let mut ok = Vec::new();
            for (aid, a) in vocab.iter().enumerate() {
                if let Ok(n) = apply(s, a) {
                    row[aid] = Some(ids[&n]);
                    ok.push(aid);
                }
            }
            legal.push(ok);
            next.push(row);
            satisfied.push(GoalSet::from_goals(
                all_goals().iter().filter(|g| g.is_satisfied(s)).copied(),
            ));
        }
        let initial = ids[&initial_state()];
        StateSpace {
            states,
            ids,
            legal,
            next,
            satisfied,
            initial,
        }
    }

    /// Shared instance, built on first use.
    pub fn get() -> &'static StateSpace {
        static SPACE: OnceLock<StateSpace> = OnceLock::new();
        SPACE.get_or_init(StateSpace::build)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[BlockState] {
        &self.states
    }

    pub fn state(&self, id: StateId) -> &BlockState {
        &self.states[id]
    }

    pub fn id_of(&self, s: &BlockState) -> Option<StateId> {
        self.ids.get(s).copied()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn legal(&self, s: StateId) -> &[ActionId] {
        &self.legal[s]
    }

    pub fn step(&self, s: StateId, a: ActionId) -> Option<StateId> {
        self.next[s][a]
    }

    pub fn satisfied(&self, s: StateId) -> GoalSet {
        self.satisfied[s]
    }

    pub fn satisfies(&self, s: StateId, g: usize) -> bool {
        debug_assert!(g < NUM_GOALS);
        self.satisfied[s].contains_id(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::goalspace::Goal;

    fn pp(b: Block, d: Destination) -> Action {
        Action::new(b, d)
    }

    #[test]
    fn initial_state_is_all_table() {
        let s = initial_state();
        for b in Block::ALL {
            assert_eq!(s.support(b), Support::Table);
        }
        assert_eq!(s.close_pairs().count(), 0);
        assert!(s.is_valid());
    }

    #[test]
    fn initial_state_has_fifteen_actions() {
        let acts = legal_actions(&initial_state());
        assert_eq!(acts.len(), 15);
        for b in Block::ALL {
            assert_eq!(acts.iter().filter(|a| a.block == b).count(), 5);
        }
        assert!(acts
            .iter()
            .all(|a| !matches!(a.destination, Destination::OnPair(_))));
    }

    #[test]
    fn covered_block_cannot_move() {
        let s = apply(
            &initial_state(),
            &pp(Block::A, Destination::OnTop(Block::B)),
        )
        .unwrap();
        assert!(legal_actions(&s).iter().all(|a| a.block != Block::B));
    }

    #[test]
    fn pair_placement_requires_closeness() {
        let s0 = initial_state();
        let onto = pp(
            Block::C,
            Destination::OnPair(BlockPair::new(Block::A, Block::B).unwrap()),
        );
        assert!(matches!(
            apply(
                &s0,
                &pp(
                    Block::A,
                    Destination::OnPair(BlockPair::complement(Block::A))
                )
            ),
            Err(WorldError::IllegalAction { .. })
        ));
        let s1 = apply(&s0, &pp(Block::A, Destination::TableCloseTo(Block::B))).unwrap();
        assert!(legal_actions(&s1).contains(&onto));
    }

    #[test]
    fn stacking_leaves_others_unchanged() {
        let s = apply(
            &initial_state(),
            &pp(Block::A, Destination::OnTop(Block::B)),
        )
        .unwrap();
        assert_eq!(s.support(Block::A), Support::OnBlock(Block::B));
        assert_eq!(s.support(Block::B), Support::Table);
        assert_eq!(s.support(Block::C), Support::Table);
    }

    #[test]
    fn moving_apart_clears_closeness() {
        let s1 = apply(
            &initial_state(),
            &pp(Block::A, Destination::TableCloseTo(Block::B)),
        )
        .unwrap();
        assert_eq!(s1.close_pairs().count(), 1);
        let s2 = apply(&s1, &pp(Block::A, Destination::TableApart)).unwrap();
        assert_eq!(s2.close_pairs().count(), 0);
    }

    #[test]
    fn vocabulary_ids_round_trip() {
        for (i, a) in Action::vocabulary().iter().enumerate() {
            assert_eq!(a.id(), Some(i));
            assert_eq!(Action::from_id(i), Some(*a));
        }
        let bad = pp(Block::A, Destination::OnTop(Block::A));
        assert_eq!(bad.id(), None);
    }

    #[test]
    fn state_ids_are_stable() {
        let a = enumerate_states();
        let b = enumerate_states();
        assert_eq!(a, b);
        assert_eq!(a[0], initial_state());
        assert_eq!(a.len(), 28);
        assert_eq!(StateSpace::get().initial(), 0);
    }

    #[test]
    fn enumerated_states_are_valid_and_closed() {
        let space = StateSpace::get();
        for (i, s) in space.states().iter().enumerate() {
            assert!(s.is_valid(), "{s}");
            for a in legal_actions(s) {
                let n = apply(s, &a).unwrap();
                assert!(n.is_valid());
                assert!(space.id_of(&n).is_some());
                assert_eq!(space.step(i, a.id().unwrap()), space.id_of(&n));
            }
        }
    }

    #[test]
    fn planner_finds_two_step_stack() {
        let g = Goal::Stack3 {
            top: Block::A,
            mid: Block::B,
            base: Block::C,
        };
        let plans = shortest_plans(&initial_state(), g).unwrap();
        assert!(plans.iter().all(|p| p.len() == 2));
        let expected = vec![
            pp(Block::B, Destination::OnTop(Block::C)),
            pp(Block::A, Destination::OnTop(Block::B)),
        ];
        assert!(plans.iter().any(|p| p.actions == expected));
    }

    #[test]
    fn planner_close_has_four_one_step_plans() {
        let g = Goal::Close(BlockPair::new(Block::A, Block::B).unwrap());
        let plans = shortest_plans(&initial_state(), g).unwrap();
        let got: Vec<Action> = plans.iter().map(|p| p.actions[0]).collect();
        assert_eq!(
            got,
            vec![
                pp(Block::A, Destination::TableCloseTo(Block::B)),
                pp(Block::A, Destination::OnTop(Block::B)),
                pp(Block::B, Destination::TableCloseTo(Block::A)),
                pp(Block::B, Destination::OnTop(Block::A)),
            ]
        );
        assert!(plans.iter().all(|p| p.is_consistent()));
    }

    #[test]
    fn planner_returns_empty_plan_when_satisfied() {
        let g = Goal::Stack2 {
            top: Block::A,
            base: Block::B,
        };
        let s = apply(
            &initial_state(),
            &pp(Block::A, Destination::OnTop(Block::B)),
        )
        .unwrap();
        let plans = shortest_plans(&s, g).unwrap();
        assert_eq!(plans.len(), 1);
        assert!(plans[0].is_empty());
    }

    #[test]
    fn pretty_printer_lists_blocks() {
        let s = apply(
            &initial_state(),
            &pp(Block::A, Destination::TableCloseTo(Block::C)),
        )
        .unwrap();
        assert_eq!(s.pretty(), "A: table near C\nB: table\nC: table near A\n");
    }
}
