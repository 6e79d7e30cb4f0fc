//! The eighteen target configurations, their satisfaction semantics, and the
//! subgoal decompositions used for instructions.
//!
//! Goal ids follow a fixed order: `Close` (0-2), `Stack2` (3-8), `Stack3`
//! (9-14), `Pyramid` (15-17), each class ordered lexicographically by its
//! blocks. Every downstream tie-break relies on this order.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use thiserror::Error;

use crate::blockworld::{Block, BlockPair, BlockState, Support};

pub type GoalId = usize;

pub const NUM_GOALS: usize = 18;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Goal {
    Close(BlockPair),
    Stack2 { top: Block, base: Block },
    Stack3 { top: Block, mid: Block, base: Block },
    Pyramid { top: Block, base: BlockPair },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unrecognised goal name `{0}`")]
pub struct GoalParseError(pub String);

/// The goals in id order.
pub fn all_goals() -> &'static [Goal; NUM_GOALS] {
    static GOALS: OnceLock<[Goal; NUM_GOALS]> = OnceLock::new();
    GOALS.get_or_init(|| {
        let mut v = Vec::with_capacity(NUM_GOALS);
        v.extend(BlockPair::ALL.map(Goal::Close));
        for top in Block::ALL {
            for base in top.others() {
                v.push(Goal::Stack2 { top, base });
            }
        }
        for top in Block::ALL {
            for mid in top.others() {
                let base = BlockPair::new(top, mid).expect("distinct").outsider();
                v.push(Goal::Stack3 { top, mid, base });
            }
        }
        for top in Block::ALL {
            v.push(Goal::Pyramid {
                top,
                base: BlockPair::complement(top),
            });
        }
        v.try_into().expect("eighteen goals")
    })
}

impl Goal {
    pub fn from_id(id: GoalId) -> Option<Goal> {
        all_goals().get(id).copied()
    }

    /// Panics if the goal references the same block twice.
    pub fn id(&self) -> GoalId {
        let slot = |of: Block, other: Block| {
            of.others()
                .iter()
                .position(|&b| b == other)
                .expect("goal with distinct blocks")
        };
        match *self {
            Goal::Close(p) => p.index(),
            Goal::Stack2 { top, base } => 3 + 2 * top.index() + slot(top, base),
            Goal::Stack3 { top, mid, base } => {
                assert!(base != top && base != mid, "goal with distinct blocks");
                9 + 2 * top.index() + slot(top, mid)
            }
            Goal::Pyramid { top, base } => {
                assert!(!base.contains(top), "goal with distinct blocks");
                15 + top.index()
            }
        }
    }

    pub fn close(x: Block, y: Block) -> Goal {
        Goal::Close(BlockPair::new(x, y).expect("distinct blocks"))
    }

    pub fn stack2(top: Block, base: Block) -> Goal {
        Goal::Stack2 { top, base }
    }

    pub fn stack3(top: Block, mid: Block, base: Block) -> Goal {
        Goal::Stack3 { top, mid, base }
    }

    pub fn pyramid(top: Block, b1: Block, b2: Block) -> Goal {
        Goal::Pyramid {
            top,
            base: BlockPair::new(b1, b2).expect("distinct blocks"),
        }
    }

    pub fn is_satisfied(&self, s: &BlockState) -> bool {
        satisfies(s, *self)
    }

    /// Applies a block relabelling to every block referenced by the goal.
    pub fn permuted(&self, perm: &[Block; 3]) -> Goal {
        let m = |b: Block| perm[b.index()];
        match *self {
            Goal::Close(p) => Goal::close(m(p.first()), m(p.second())),
            Goal::Stack2 { top, base } => Goal::stack2(m(top), m(base)),
            Goal::Stack3 { top, mid, base } => Goal::stack3(m(top), m(mid), m(base)),
            Goal::Pyramid { top, base } => Goal::pyramid(m(top), m(base.first()), m(base.second())),
        }
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Goal::Close(p) => write!(f, "close:{}-{}", p.first(), p.second()),
            Goal::Stack2 { top, base } => write!(f, "stack2:{top}-on-{base}"),
            Goal::Stack3 { top, mid, base } => write!(f, "stack3:{top}-{mid}-{base}"),
            Goal::Pyramid { top, base } => {
                write!(f, "pyramid:{top}-on-{}-{}", base.first(), base.second())
            }
        }
    }
}

impl FromStr for Goal {
    type Err = GoalParseError;

    fn from_str(s: &str) -> Result<Goal, GoalParseError> {
        all_goals()
            .iter()
            .find(|g| g.to_string() == s)
            .copied()
            .ok_or_else(|| GoalParseError(s.to_string()))
    }
}

/// Whether `x` and `y` are in contact: pushed together, stacked, or one
/// resting on a pair containing the other.
fn touching(s: &BlockState, x: Block, y: Block) -> bool {
    let pair = match BlockPair::new(x, y) {
        Some(p) => p,
        None => return false,
    };
    if s.is_close(pair) {
        return true;
    }
    let rests_on = |a: Block, b: Block| match s.support(a) {
        Support::OnBlock(t) => t == b,
        Support::OnPair(p) => p.contains(b),
        Support::Table => false,
    };
    rests_on(x, y) || rests_on(y, x)
}

pub fn satisfies(s: &BlockState, g: Goal) -> bool {
    match g {
        Goal::Close(p) => touching(s, p.first(), p.second()),
        Goal::Stack2 { top, base } => s.support(top) == Support::OnBlock(base),
        Goal::Stack3 { top, mid, base } => {
            s.support(top) == Support::OnBlock(mid) && s.support(mid) == Support::OnBlock(base)
        }
        Goal::Pyramid { top, base } => s.support(top) == Support::OnPair(base),
    }
}

/// A set of goals as a bitmask over goal ids.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GoalSet(u32);

impl GoalSet {
    pub const EMPTY: GoalSet = GoalSet(0);

    pub fn all() -> GoalSet {
        GoalSet((1 << NUM_GOALS) - 1)
    }

    pub fn from_goals<I: IntoIterator<Item = Goal>>(goals: I) -> GoalSet {
        goals
            .into_iter()
            .fold(GoalSet::EMPTY, |s, g| s.with(g.id()))
    }

    pub fn from_ids<I: IntoIterator<Item = GoalId>>(ids: I) -> GoalSet {
        ids.into_iter().fold(GoalSet::EMPTY, |s, g| s.with(g))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn with(self, id: GoalId) -> GoalSet {
        GoalSet(self.0 | (1 << id))
    }

    pub fn contains_id(self, id: GoalId) -> bool {
        id < NUM_GOALS && self.0 & (1 << id) != 0
    }

    pub fn contains(self, g: Goal) -> bool {
        self.contains_id(g.id())
    }

    pub fn intersect(self, other: GoalSet) -> GoalSet {
        GoalSet(self.0 & other.0)
    }

    pub fn is_subset(self, other: GoalSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Member ids in increasing order.
    pub fn ids(self) -> impl Iterator<Item = GoalId> {
        (0..NUM_GOALS).filter(move |&i| self.0 & (1 << i) != 0)
    }

    pub fn goals(self) -> impl Iterator<Item = Goal> {
        self.ids().map(|i| all_goals()[i])
    }

    pub fn first(self) -> Option<GoalId> {
        self.ids().next()
    }
}

impl fmt::Display for GoalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.goals().map(|g| g.to_string()).collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

/// Goals satisfied by `s`.
pub fn consistent_goals(s: &BlockState) -> GoalSet {
    GoalSet::from_goals(all_goals().iter().copied().filter(|g| satisfies(s, *g)))
}

/// Subgoals in physical dependency order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Curriculum(Vec<Goal>);

impl Curriculum {
    pub fn new(subgoals: Vec<Goal>) -> Option<Curriculum> {
        (!subgoals.is_empty()).then_some(Curriculum(subgoals))
    }

    pub fn subgoals(&self) -> &[Goal] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_set(&self) -> GoalSet {
        GoalSet::from_goals(self.0.iter().copied())
    }
}

impl fmt::Display for Curriculum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.0.iter().map(|g| g.to_string()).collect();
        write!(f, "[{}]", names.join(", "))
    }
}

pub fn decompose(g: Goal) -> Curriculum {
    let subgoals = match g {
        Goal::Close(_) | Goal::Stack2 { .. } => vec![g],
        Goal::Stack3 { top, mid, base } => vec![Goal::stack2(mid, base), Goal::stack2(top, mid)],
        Goal::Pyramid { base, .. } => vec![Goal::Close(base), g],
    };
    Curriculum(subgoals)
}

/// Goals a literal observer considers possible after receiving `received`.
///
/// While the message sequence is incomplete, any goal whose decomposition
/// contains every received subgoal qualifies; once complete, the received
/// set must equal the decomposition.
pub fn prefix_consistent(received: &[Goal], complete: bool) -> GoalSet {
    let got = GoalSet::from_goals(received.iter().copied());
    GoalSet::from_goals(all_goals().iter().copied().filter(|g| {
        let parts = decompose(*g).as_set();
        if complete {
            parts == got
        } else {
            got.is_subset(parts)
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockworld::{apply, initial_state, Action, Destination};
    use Block::*;

    fn after(actions: &[(Block, Destination)]) -> BlockState {
        actions.iter().fold(initial_state(), |s, (b, d)| {
            apply(&s, &Action::new(*b, *d)).unwrap()
        })
    }

    #[test]
    fn eighteen_goals_in_canonical_order() {
        let goals = all_goals();
        assert_eq!(goals.len(), 18);
        assert_eq!(goals[0], Goal::close(A, B));
        assert_eq!(goals[3], Goal::stack2(A, B));
        assert_eq!(goals[9], Goal::stack3(A, B, C));
        assert_eq!(goals[17], Goal::pyramid(C, A, B));
        for (i, g) in goals.iter().enumerate() {
            assert_eq!(g.id(), i);
            assert_eq!(Goal::from_id(i), Some(*g));
        }
        let mut sorted = goals.to_vec();
        sorted.dedup();
        assert_eq!(sorted.len(), 18);
    }

    #[test]
    fn names_round_trip() {
        assert_eq!(Goal::close(B, A).to_string(), "close:A-B");
        assert_eq!(Goal::stack2(A, B).to_string(), "stack2:A-on-B");
        assert_eq!(Goal::stack3(A, B, C).to_string(), "stack3:A-B-C");
        assert_eq!(Goal::pyramid(C, B, A).to_string(), "pyramid:C-on-A-B");
        for g in all_goals() {
            assert_eq!(g.to_string().parse::<Goal>().unwrap(), *g);
        }
        assert!("stack2:A-on-A".parse::<Goal>().is_err());
    }

    #[test]
    fn stacked_contact_counts_as_close() {
        let s = after(&[(A, Destination::OnTop(B))]);
        assert!(satisfies(&s, Goal::stack2(A, B)));
        assert!(satisfies(&s, Goal::close(A, B)));
        assert!(satisfies(&s, Goal::close(B, A)));
        assert_eq!(
            consistent_goals(&s),
            GoalSet::from_goals([Goal::close(A, B), Goal::stack2(A, B)])
        );
    }

    #[test]
    fn initial_state_satisfies_nothing() {
        assert!(consistent_goals(&initial_state()).is_empty());
    }

    #[test]
    fn full_stack_consistent_set() {
        let s = after(&[(B, Destination::OnTop(C)), (A, Destination::OnTop(B))]);
        let expected = GoalSet::from_goals([
            Goal::stack3(A, B, C),
            Goal::stack2(A, B),
            Goal::stack2(B, C),
            Goal::close(A, B),
            Goal::close(B, C),
        ]);
        assert_eq!(consistent_goals(&s), expected);
    }

    #[test]
    fn pyramid_consistent_set() {
        let s = after(&[
            (A, Destination::TableCloseTo(B)),
            (C, Destination::OnPair(BlockPair::new(A, B).unwrap())),
        ]);
        let expected = GoalSet::from_goals([
            Goal::pyramid(C, A, B),
            Goal::close(A, B),
            Goal::close(A, C),
            Goal::close(B, C),
        ]);
        assert_eq!(consistent_goals(&s), expected);
    }

    #[test]
    fn decompositions() {
        assert_eq!(
            decompose(Goal::stack3(A, B, C)).subgoals(),
            &[Goal::stack2(B, C), Goal::stack2(A, B)]
        );
        assert_eq!(
            decompose(Goal::pyramid(C, A, B)).subgoals(),
            &[Goal::close(A, B), Goal::pyramid(C, A, B)]
        );
        assert_eq!(
            decompose(Goal::close(A, B)).subgoals(),
            &[Goal::close(A, B)]
        );
    }

    #[test]
    fn decompose_is_set_injective() {
        let sets: Vec<GoalSet> = all_goals().iter().map(|g| decompose(*g).as_set()).collect();
        for i in 0..NUM_GOALS {
            for j in i + 1..NUM_GOALS {
                assert_ne!(sets[i], sets[j], "{} vs {}", all_goals()[i], all_goals()[j]);
            }
        }
    }

    #[test]
    fn prefix_semantics() {
        assert_eq!(
            prefix_consistent(&[Goal::close(A, B)], false),
            GoalSet::from_goals([Goal::close(A, B), Goal::pyramid(C, A, B)])
        );
        assert_eq!(
            prefix_consistent(&[Goal::pyramid(C, A, B)], false),
            GoalSet::from_goals([Goal::pyramid(C, A, B)])
        );
        assert_eq!(
            prefix_consistent(&[Goal::stack2(B, C)], true),
            GoalSet::from_goals([Goal::stack2(B, C)])
        );
        assert_eq!(
            prefix_consistent(&[Goal::stack2(B, C)], false),
            GoalSet::from_goals([
                Goal::stack2(B, C),
                Goal::stack3(A, B, C),
                Goal::stack3(B, C, A)
            ])
        );
    }

    #[test]
    fn goal_set_ops() {
        let s = GoalSet::from_ids([0, 5, 17]);
        assert_eq!(s.len(), 3);
        assert_eq!(s.ids().collect::<Vec<_>>(), vec![0, 5, 17]);
        assert!(GoalSet::from_ids([5]).is_subset(s));
        assert_eq!(
            s.intersect(GoalSet::from_ids([5, 6])),
            GoalSet::from_ids([5])
        );
        assert_eq!(GoalSet::all().len(), 18);
    }
}
