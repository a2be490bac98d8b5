//! The learning loop: settle the observation structure, build candidate
//! automata from reset strategies, ask for equivalence, and feed back
//! counterexamples.

pub mod merge;
pub mod strategy;

use std::collections::BTreeSet;

use crate::obs::{LangId, ObservationStructure, Phase, StructureStats};
use crate::refine::Resolution;
use crate::rera::Rera;
use crate::teacher::{EquivalenceAnswer, Teacher, TeacherStats};
use crate::timed::TimedWord;

pub use merge::{merge, merge_consistent, select_u, FoldingSet, Merged, Preorder};
pub use strategy::{admissible_strategies, apply_strategy, Edge, ResetStrategy, ResultingGraph, StrategyError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_queries: u64,
    pub max_iterations: usize,
    pub max_strategies: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_queries: 100_000,
            max_iterations: 50,
            max_strategies: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub strategies: usize,
    pub locations: usize,
    /// Whether the hypothesis reproduced every observation.
    pub consistent: bool,
    pub membership_count: u64,
    pub counterexample: Option<TimedWord>,
}

#[derive(Debug, Clone)]
pub struct LearnOutcome {
    pub hypothesis: Rera,
    pub success: bool,
    pub iterations: Vec<IterationRecord>,
    pub teacher: TeacherStats,
    pub structure: StructureStats,
    /// Iterations that found no admissible strategy after draining rebuilds.
    pub empty_strategy_sets: usize,
    /// Counterexamples that were already observed.
    pub stale_counterexamples: usize,
}

/// Bound on inconsistency-resolution rounds per iteration.
const MAX_SETTLE_ROUNDS: usize = 256;

/// Drains rebuilds and resolves inconsistent language states until no
/// further progress is possible.
pub fn settle(obs: &mut ObservationStructure<'_>) {
    let mut stuck: BTreeSet<LangId> = BTreeSet::new();
    for _ in 0..MAX_SETTLE_ROUNDS {
        obs.drain_rebuilds();
        let next = obs
            .inconsistent_states()
            .into_iter()
            .find(|s| !stuck.contains(s));
        let Some(s) = next else {
            return;
        };
        match obs.resolve_inconsistency(s) {
            Resolution::Scheduled(_) => {}
            Resolution::Invalid | Resolution::Unresolved => {
                stuck.insert(s);
            }
        }
    }
    log::warn!("inconsistency resolution rounds exhausted");
    obs.drain_rebuilds();
}

/// Builds the hypothesis for the current structure. Candidates come from
/// the enumerated strategies, then from flipping single decisions of the
/// best candidate in breadth-first order, within `max_strategies`
/// evaluations. Candidates reproducing every observation win, then fewer
/// locations, then evaluation order.
pub fn hypothesis(obs: &ObservationStructure<'_>, max_strategies: usize) -> Option<(Merged, bool, usize)> {
    let budget = max_strategies.max(1);
    let strategies = admissible_strategies(obs, budget.div_ceil(2)).ok()?;
    let eval = |pi: &ResetStrategy| {
        let graph = apply_strategy(&obs.tdg, pi).expect("admissible");
        merge_consistent(obs, &graph)
    };
    let score = |m: &Merged, ok: bool| (!ok, m.rera.locations.len());
    let mut evaluated = 0;
    let mut best: Option<(ResetStrategy, Merged, bool)> = None;
    for pi in &strategies {
        let (m, ok) = eval(pi);
        evaluated += 1;
        if best.as_ref().is_none_or(|(_, b, bok)| score(&m, ok) < score(b, *bok)) {
            best = Some((pi.clone(), m, ok));
        }
    }
    let (mut pi, mut merged, mut ok) = best?;
    let mut i = 0;
    while evaluated < budget {
        let order = strategy::reachable_decisions(&obs.tdg, &pi);
        let Some(&d) = order.get(i) else {
            break;
        };
        i += 1;
        let flipped = !pi.choice[&d];
        if obs.tdg.dec[d].child[flipped as usize].is_none() {
            continue;
        }
        let mut next = pi.clone();
        next.choice.insert(d, flipped);
        let next = strategy::complete(&obs.tdg, &next);
        let (m, nok) = eval(&next);
        evaluated += 1;
        if score(&m, nok) < score(&merged, ok) {
            pi = next;
            merged = m;
            ok = nok;
        }
    }
    Some((merged, ok, evaluated))
}

/// The empty automaton: one rejecting location without transitions.
fn empty_hypothesis(obs: &ObservationStructure<'_>) -> Rera {
    Rera {
        alphabet: obs.alphabet().clone(),
        locations: vec!["q0".to_string()],
        initial: 0,
        accepting: Default::default(),
        transitions: Vec::new(),
        max_constant: obs.k(),
    }
}

pub fn learn(teacher: &dyn Teacher, k: u32, limits: &Limits) -> LearnOutcome {
    learn_with(teacher, k, limits, |_, _, _| {})
}

/// Runs the learner; `observe` sees the structure and the hypothesis of
/// every iteration before the equivalence query.
pub fn learn_with(
    teacher: &dyn Teacher,
    k: u32,
    limits: &Limits,
    observe: impl FnMut(usize, &ObservationStructure<'_>, &Rera),
) -> LearnOutcome {
    let mut obs = ObservationStructure::new(teacher, k);
    learn_on(&mut obs, limits, observe)
}

/// Runs the learner on a caller-owned structure, so that hooks installed
/// on it see every step.
pub fn learn_on(
    obs: &mut ObservationStructure<'_>,
    limits: &Limits,
    mut observe: impl FnMut(usize, &ObservationStructure<'_>, &Rera),
) -> LearnOutcome {
    let teacher = obs.teacher();
    obs.request(&TimedWord::empty());
    obs.flush();
    let mut records = Vec::new();
    let mut best = empty_hypothesis(obs);
    let mut success = false;
    let mut empty_strategy_sets = 0;
    let mut stale_counterexamples = 0;
    for iteration in 1..=limits.max_iterations {
        settle(obs);
        if teacher.stats().membership_count > limits.max_queries {
            log::warn!("membership query limit reached");
            break;
        }
        let Some((merged, consistent, strategies)) = hypothesis(obs, limits.max_strategies) else {
            empty_strategy_sets += 1;
            log::error!("no admissible reset strategy at iteration {iteration}");
            break;
        };
        if !consistent {
            log::warn!("hypothesis of iteration {iteration} contradicts an observation");
        }
        debug_assert!(merged.rera.validate().is_empty(), "merged automaton is nondeterministic");
        observe(iteration, obs, &merged.rera);
        best = merged.rera;
        let answer = teacher.equivalence(&best).expect("hypothesis over the teacher's alphabet");
        let mut record = IterationRecord {
            iteration,
            strategies,
            locations: best.locations.len(),
            consistent,
            membership_count: teacher.stats().membership_count,
            counterexample: None,
        };
        match answer {
            EquivalenceAnswer::Yes => {
                records.push(record);
                success = true;
                break;
            }
            EquivalenceAnswer::Counterexample { word, .. } => {
                log::debug!("counterexample {}", word.display(obs.alphabet()));
                if obs.obs().contains_key(&word) {
                    stale_counterexamples += 1;
                }
                obs.set_phase(Phase::Observe);
                obs.request(&word);
                obs.flush();
                record.counterexample = Some(word);
                records.push(record);
            }
        }
    }
    LearnOutcome {
        hypothesis: best,
        success,
        iterations: records,
        teacher: teacher.stats(),
        structure: obs.stats(),
        empty_strategy_sets,
        stale_counterexamples,
    }
}
