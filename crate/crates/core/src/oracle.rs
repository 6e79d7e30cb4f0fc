//! Brute-force verification suite.
//!
//! Each check recomputes a quantity by an independent, exhaustive route and
//! compares it against the production code path. Failures are report
//! entries, not errors.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blockworld::{
    apply, enumerate_states, initial_state, is_legal, shortest_plans, Action, Block, BlockPair,
    BlockState, Plan, StateSpace, Support, WorldError,
};
use crate::goalspace::{
    all_goals, consistent_goals, decompose, prefix_consistent, Goal, GoalId, GoalSet, NUM_GOALS,
};
use crate::inference::{
    demo_posterior, demo_support, instruction_posterior, LearnerKind, Posterior,
};
use crate::learner::{EpisodeLog, QTable, SelfModel};
use crate::teacher::{candidate_demos, instruction_order, select_demo, TeacherKind};

/// Planner under test: all shortest plans from a state to a goal.
pub type Planner<'a> = &'a dyn Fn(&BlockState, Goal) -> Result<Vec<Plan>, WorldError>;

/// Deepest plan the iterative-deepening search will look for.
const MAX_DEPTH: usize = 8;
const RANDOM_CASES: usize = 200;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub n_states: usize,
    pub n_goals: usize,
    pub checks: Vec<CheckResult>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "states: {}", self.n_states)?;
        writeln!(f, "goals: {}", self.n_goals)?;
        for c in &self.checks {
            writeln!(
                f,
                "{} {}: {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            )?;
        }
        Ok(())
    }
}

fn result(name: &'static str, failures: Vec<String>, ok_detail: String) -> CheckResult {
    match failures.first() {
        None => CheckResult {
            name,
            passed: true,
            detail: ok_detail,
        },
        Some(first) => CheckResult {
            name,
            passed: false,
            detail: format!("{} failure(s); first: {}", failures.len(), first),
        },
    }
}

/// Whether `s` satisfies `g`, read off a contact graph built from scratch.
fn reference_satisfies(s: &BlockState, g: Goal) -> bool {
    let below = |b: Block| -> Vec<Block> {
        match s.support(b) {
            Support::Table => vec![],
            Support::OnBlock(x) => vec![x],
            Support::OnPair(p) => vec![p.first(), p.second()],
        }
    };
    let mut contacts: Vec<(Block, Block)> = Vec::new();
    for x in Block::ALL {
        for y in below(x) {
            contacts.push((x, y));
        }
    }
    for p in BlockPair::ALL {
        if s.is_close(p) {
            contacts.push((p.first(), p.second()));
        }
    }
    match g {
        Goal::Close(p) => contacts
            .iter()
            .any(|&(x, y)| (x, y) == (p.first(), p.second()) || (y, x) == (p.first(), p.second())),
        Goal::Stack2 { top, base } => below(top) == vec![base],
        Goal::Stack3 { top, mid, base } => below(top) == vec![mid] && below(mid) == vec![base],
        Goal::Pyramid { top, base } => {
            let mut b = below(top);
            b.sort();
            b == vec![base.first(), base.second()]
        }
    }
}

/// Every action sequence of exactly `depth` steps from `s` that ends in a
/// state satisfying `g`.
fn dfs(
    s: &BlockState,
    g: Goal,
    depth: usize,
    prefix: &mut Vec<Action>,
    out: &mut Vec<Vec<Action>>,
) {
    if depth == 0 {
        if reference_satisfies(s, g) {
            out.push(prefix.clone());
        }
        return;
    }
    for a in Action::vocabulary() {
        if is_legal(s, &a) {
            let next = apply(s, &a).expect("legal action applies");
            prefix.push(a);
            dfs(&next, g, depth - 1, prefix, out);
            prefix.pop();
        }
    }
}

/// Iterative deepening: the minimal plan length and every plan of that length.
pub fn iddfs_plans(s: &BlockState, g: Goal) -> Option<(usize, BTreeSet<Vec<Action>>)> {
    for depth in 0..=MAX_DEPTH {
        let mut out = Vec::new();
        dfs(s, g, depth, &mut Vec::new(), &mut out);
        if !out.is_empty() {
            return Some((depth, out.into_iter().collect()));
        }
    }
    None
}

fn check_planner(space: &StateSpace, planner: Planner<'_>) -> CheckResult {
    let mut failures = Vec::new();
    let mut pairs = 0;
    for s in space.states() {
        for &g in all_goals() {
            pairs += 1;
            let expected = iddfs_plans(s, g);
            match (planner(s, g), expected) {
                (Ok(plans), Some((depth, set))) => {
                    if plans.iter().any(|p| p.len() != depth) {
                        failures.push(format!("{s} -> {g}: planner length differs from {depth}"));
                    } else if plans
                        .iter()
                        .any(|p| !p.is_consistent() || !reference_satisfies(p.final_state(), g))
                    {
                        failures.push(format!("{s} -> {g}: planner returned an invalid plan"));
                    } else {
                        let got: BTreeSet<Vec<Action>> =
                            plans.iter().map(|p| p.actions.clone()).collect();
                        if got != set || got.len() != plans.len() {
                            failures.push(format!(
                                "{s} -> {g}: {} plans, oracle has {}",
                                plans.len(),
                                set.len()
                            ));
                        }
                    }
                }
                (Err(_), None) => {}
                (Ok(_), None) => failures.push(format!("{s} -> {g}: oracle finds no plan")),
                (Err(e), Some(_)) => failures.push(format!("{s} -> {g}: {e}")),
            }
        }
    }
    result(
        "planner-optimality",
        failures,
        format!("{pairs} (state, goal) pairs match the iterative-deepening oracle"),
    )
}

fn check_closure(space: &StateSpace) -> CheckResult {
    let mut failures = Vec::new();
    let fresh: BTreeSet<BlockState> = enumerate_states().into_iter().collect();
    if fresh.len() != space.len() {
        failures.push(format!(
            "enumeration found {} states, space holds {}",
            fresh.len(),
            space.len()
        ));
    }
    let mut edges = 0;
    for (id, s) in space.states().iter().enumerate() {
        if !s.is_valid() {
            failures.push(format!("{s}: invalid state"));
        }
        if space.id_of(s) != Some(id) {
            failures.push(format!("{s}: id lookup mismatch"));
        }
        for (aid, a) in Action::vocabulary().iter().enumerate() {
            let legal = is_legal(s, a);
            if legal != space.legal(id).contains(&aid) {
                failures.push(format!("{s}: legality of {a} disagrees"));
                continue;
            }
            if !legal {
                continue;
            }
            edges += 1;
            let next = apply(s, a).expect("legal action applies");
            match space.step(id, aid) {
                Some(n) if space.state(n) == &next && fresh.contains(&next) => {}
                _ => failures.push(format!("{s}: {a} leaves the state space")),
            }
        }
    }
    result(
        "transition-closure",
        failures,
        format!("{} states, {edges} transitions, all closed", space.len()),
    )
}

fn check_consistency_sets(space: &StateSpace) -> CheckResult {
    let mut failures = Vec::new();
    for (id, s) in space.states().iter().enumerate() {
        let reference = GoalSet::from_goals(
            all_goals()
                .iter()
                .copied()
                .filter(|&g| reference_satisfies(s, g)),
        );
        if consistent_goals(s) != reference || space.satisfied(id) != reference {
            failures.push(format!(
                "{s}: {} vs reference {}",
                consistent_goals(s),
                reference
            ));
        }
    }
    result(
        "consistency-sets",
        failures,
        format!(
            "{} states agree with the contact-graph evaluator",
            space.len()
        ),
    )
}

fn check_decompose() -> CheckResult {
    let mut failures = Vec::new();
    let sets: Vec<GoalSet> = all_goals().iter().map(|&g| decompose(g).as_set()).collect();
    for i in 0..NUM_GOALS {
        for j in (i + 1)..NUM_GOALS {
            if sets[i] == sets[j] {
                failures.push(format!(
                    "{} and {} share decomposition {}",
                    all_goals()[i],
                    all_goals()[j],
                    sets[i]
                ));
            }
        }
    }
    result(
        "decompose-injective",
        failures,
        format!("{NUM_GOALS} distinct subgoal sets"),
    )
}

/// From the initial state, executing each goal's subgoals in order with
/// shortest plans ends in a state that satisfies the goal.
fn check_curriculum() -> CheckResult {
    let mut failures = Vec::new();
    let start = initial_state();
    for &g in all_goals() {
        let mut cur = start;
        for &sub in decompose(g).subgoals() {
            match shortest_plans(&cur, sub) {
                Ok(plans) => cur = *plans[0].final_state(),
                Err(e) => {
                    failures.push(format!("{g}: {e}"));
                    break;
                }
            }
        }
        if !reference_satisfies(&cur, g) {
            failures.push(format!("{g}: curriculum ends in {cur}"));
        }
    }
    result(
        "curriculum-soundness",
        failures,
        "every decomposition executed in order reaches its goal".to_string(),
    )
}

fn random_q<R: Rng>(rng: &mut R, n_states: usize) -> QTable {
    let mut q = QTable::zeros(n_states);
    for s in 0..n_states {
        for g in 0..NUM_GOALS {
            for a in 0..crate::blockworld::NUM_ACTIONS {
                q.set(s, g, a, rng.gen_range(-2.0..2.0));
            }
        }
    }
    q
}

fn random_self_model<R: Rng>(rng: &mut R, episodes: usize) -> SelfModel {
    let mut m = SelfModel::new();
    for _ in 0..episodes {
        let first = rng.gen_range(0..=NUM_GOALS);
        m.update(&EpisodeLog {
            transitions: Vec::new(),
            pursued: rng.gen_range(0..NUM_GOALS),
            achieved: 0,
            first_satisfied: (first < NUM_GOALS).then_some(first),
        });
    }
    m
}

/// A random non-empty subset of the shortest demonstrations of a random goal.
fn random_demos<R: Rng>(rng: &mut R, space: &StateSpace) -> (GoalId, Vec<Plan>) {
    let g = rng.gen_range(0..NUM_GOALS);
    let start = space.state(rng.gen_range(0..space.len()));
    let mut cands = candidate_demos(start, all_goals()[g]).expect("every goal is reachable");
    let keep = rng.gen_range(1..=cands.len());
    while cands.len() > keep {
        cands.remove(rng.gen_range(0..cands.len()));
    }
    (g, cands)
}

/// A random prefix of a random goal's subgoal sequence, in either order.
fn random_instructions<R: Rng>(rng: &mut R) -> (Vec<Goal>, bool) {
    let g = all_goals()[rng.gen_range(0..NUM_GOALS)];
    let kind = if rng.gen_bool(0.5) {
        TeacherKind::Naive
    } else {
        TeacherKind::Pedagogical
    };
    let order = instruction_order(kind, g);
    let k = rng.gen_range(1..=order.len());
    (order.subgoals()[..k].to_vec(), k == order.len())
}

fn posterior_ok(p: &Posterior, support: GoalSet) -> Result<(), String> {
    if (p.total() - 1.0).abs() > 1e-9 {
        return Err(format!("sums to {}", p.total()));
    }
    if p.support() != support {
        return Err(format!("support {} vs declared {}", p.support(), support));
    }
    if p.probs().iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err("non-finite or negative mass".to_string());
    }
    Ok(())
}

fn check_posteriors(space: &StateSpace, seed: u64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut n = 0;
    for _ in 0..RANDOM_CASES {
        let q = random_q(&mut rng, space.len());
        let beta = rng.gen_range(0.1..5.0);
        let (_, demos) = random_demos(&mut rng, space);
        let support = demo_support(&demos);
        for kind in [LearnerKind::Literal, LearnerKind::Pragmatic] {
            n += 1;
            match demo_posterior(kind, &demos, &q, beta) {
                Ok(p) => {
                    if let Err(e) = posterior_ok(&p, support) {
                        failures.push(format!("{} demo posterior: {e}", kind.name()));
                    }
                }
                Err(e) => failures.push(format!("{} demo posterior: {e}", kind.name())),
            }
        }

        let episodes = rng.gen_range(0..200);
        let model = random_self_model(&mut rng, episodes);
        let (received, complete) = random_instructions(&mut rng);
        let support = prefix_consistent(&received, complete);
        for kind in [LearnerKind::Literal, LearnerKind::Pragmatic] {
            n += 1;
            match instruction_posterior(kind, &received, complete, &model, 1.0) {
                Ok(p) => {
                    if let Err(e) = posterior_ok(&p, support) {
                        failures.push(format!("{} instruction posterior: {e}", kind.name()));
                    }
                }
                Err(e) => failures.push(format!("{} instruction posterior: {e}", kind.name())),
            }
        }
    }
    result(
        "posterior-normalization",
        failures,
        format!("{n} randomized posteriors sum to 1 on their declared support"),
    )
}

fn check_pedagogical_argmin(space: &StateSpace) -> CheckResult {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut cases = 0;
    for s in space.states() {
        for &g in all_goals() {
            let cands = candidate_demos(s, g).expect("every goal is reachable");
            let n = cands.len().min(10);
            for mask in 0u32..(1 << n) - 1 {
                let sent: BTreeSet<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
                let brute = (0..cands.len())
                    .filter(|i| !sent.contains(i))
                    .map(|i| (consistent_goals(cands[i].final_state()).len(), i))
                    .min()
                    .map(|(_, i)| i);
                let got = select_demo(TeacherKind::Pedagogical, &cands, &sent, &mut rng).ok();
                cases += 1;
                if got != brute {
                    failures.push(format!("{s} -> {g}: picked {got:?}, argmin {brute:?}"));
                }
            }
        }
    }
    result(
        "pedagogical-argmin",
        failures,
        format!("{cases} selections equal the brute-force argmin"),
    )
}

/// Literal support after the first instruction of each teacher.
pub fn first_instruction_support(kind: TeacherKind, g: Goal) -> usize {
    let order = instruction_order(kind, g);
    prefix_consistent(&order.subgoals()[..1], order.len() == 1).len()
}

fn check_instruction_support() -> CheckResult {
    let mut failures = Vec::new();
    for &g in all_goals() {
        let ped = first_instruction_support(TeacherKind::Pedagogical, g);
        let naive = first_instruction_support(TeacherKind::Naive, g);
        if ped > naive {
            failures.push(format!("{g}: pedagogical {ped} > naive {naive}"));
        }
    }
    result(
        "instruction-support",
        failures,
        format!("pedagogical first-instruction support <= naive for all {NUM_GOALS} goals"),
    )
}

fn check_degeneracy(space: &StateSpace, seed: u64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = QTable::zeros(space.len());
    let model = SelfModel::new();
    let mut failures = Vec::new();
    let mut n = 0;
    for _ in 0..RANDOM_CASES {
        let (_, demos) = random_demos(&mut rng, space);
        let beta = rng.gen_range(0.1..5.0);
        n += 1;
        let lit = demo_posterior(LearnerKind::Literal, &demos, &q, beta);
        let prag = demo_posterior(LearnerKind::Pragmatic, &demos, &q, beta);
        if lit != prag {
            failures.push(format!(
                "demos {:?}",
                demos.iter().map(|d| d.to_string()).collect::<Vec<_>>()
            ));
        }

        let (received, complete) = random_instructions(&mut rng);
        let laplace = rng.gen_range(0.1..3.0);
        n += 1;
        let lit = instruction_posterior(LearnerKind::Literal, &received, complete, &model, laplace);
        let prag =
            instruction_posterior(LearnerKind::Pragmatic, &received, complete, &model, laplace);
        if lit != prag {
            failures.push(format!("instructions {received:?} complete={complete}"));
        }
    }
    result(
        "inference-degeneracy",
        failures,
        format!("{n} signal histories: pragmatic equals literal with zero knowledge"),
    )
}

/// Runs every check against `planner`.
pub fn oracle_check_with(planner: Planner<'_>) -> OracleReport {
    let space = StateSpace::get();
    OracleReport {
        n_states: space.len(),
        n_goals: all_goals().len(),
        checks: vec![
            check_planner(space, planner),
            check_closure(space),
            check_consistency_sets(space),
            check_decompose(),
            check_curriculum(),
            check_posteriors(space, 7),
            check_pedagogical_argmin(space),
            check_instruction_support(),
            check_degeneracy(space, 11),
        ],
    }
}

pub fn oracle_check() -> OracleReport {
    oracle_check_with(&shortest_plans)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Block::*;

    #[test]
    fn reference_agrees_on_initial_state() {
        let s = initial_state();
        assert!(all_goals().iter().all(|&g| !reference_satisfies(&s, g)));
    }

    #[test]
    fn iddfs_stack3() {
        let (d, plans) = iddfs_plans(&initial_state(), Goal::stack3(A, B, C)).unwrap();
        assert_eq!(d, 2);
        assert_eq!(plans.len(), 1);
    }

    #[test]
    fn instruction_support_values() {
        let p = Goal::pyramid(C, A, B);
        assert_eq!(first_instruction_support(TeacherKind::Naive, p), 2);
        assert_eq!(first_instruction_support(TeacherKind::Pedagogical, p), 1);
        let s = Goal::stack3(A, B, C);
        assert_eq!(first_instruction_support(TeacherKind::Naive, s), 3);
    }

    #[test]
    fn corrupted_planners_are_caught() {
        // pads every nonempty plan with a detour through a no-op move
        let padded = |s: &BlockState, g: Goal| -> Result<Vec<Plan>, WorldError> {
            let plans = shortest_plans(s, g)?;
            Ok(plans
                .into_iter()
                .map(|p| {
                    if p.is_empty() {
                        return p;
                    }
                    let mut acts = p.actions.clone();
                    let first = acts[0];
                    let detour = Action::vocabulary()
                        .into_iter()
                        .find(|a| is_legal(p.start(), a) && apply(p.start(), a) == Ok(*p.start()));
                    match detour {
                        Some(d) => acts.insert(0, d),
                        None => acts.push(first),
                    }
                    Plan::from_actions(*p.start(), &acts).unwrap_or(p)
                })
                .collect())
        };
        let r = oracle_check_with(&padded);
        assert!(!r.check("planner-optimality").unwrap().passed);
        assert!(!r.passed());

        let dropping = |s: &BlockState, g: Goal| -> Result<Vec<Plan>, WorldError> {
            let mut plans = shortest_plans(s, g)?;
            if plans.len() > 1 {
                plans.pop();
            }
            Ok(plans)
        };
        assert!(
            !oracle_check_with(&dropping)
                .check("planner-optimality")
                .unwrap()
                .passed
        );
    }

    #[test]
    fn fresh_build_passes_with_fingerprints() {
        let r = oracle_check();
        assert!(r.passed(), "{r}");
        assert_eq!(r.n_states, 28);
        assert_eq!(r.n_goals, 18);
        assert!(r.to_string().starts_with("states: 28\ngoals: 18\n"));
    }
}
