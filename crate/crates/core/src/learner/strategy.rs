//! Reset strategies over the TDG and the resulting graphs they select.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::obs::{DecId, LangId, Labels, ObservationStructure, Tdg};

/// A reset choice for every decision state reachable under the choice.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ResetStrategy {
    pub choice: BTreeMap<DecId, bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("{0} rebuilds are pending")]
    PendingRebuilds(usize),
    #[error("decision state {0} has no child for the chosen reset")]
    MissingChild(DecId),
    #[error("decision state {0} has no reset choice")]
    Unmapped(DecId),
}

/// An edge of a resulting graph: the decision it comes from, the chosen
/// reset and the child language state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub decision: DecId,
    pub reset: bool,
    pub child: LangId,
}

/// The TDG restricted to one child per decision state.
#[derive(Debug, Clone)]
pub struct ResultingGraph {
    /// Reachable language states, breadth first.
    pub states: Vec<LangId>,
    pub edges: BTreeMap<LangId, Vec<Edge>>,
    pub height: BTreeMap<LangId, usize>,
}

impl ResultingGraph {
    pub fn edges(&self, s: LangId) -> &[Edge] {
        self.edges.get(&s).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn height(&self, s: LangId) -> usize {
        self.height[&s]
    }

    pub fn contains(&self, s: LangId) -> bool {
        self.height.contains_key(&s)
    }
}

/// Live decisions of `s` in creation order.
fn decisions(tdg: &Tdg, s: LangId) -> impl Iterator<Item = DecId> + '_ {
    tdg.lang[s].children.iter().copied().filter(|&d| tdg.dec[d].alive)
}

pub fn apply_strategy(tdg: &Tdg, pi: &ResetStrategy) -> Result<ResultingGraph, StrategyError> {
    let mut states = vec![Tdg::ROOT];
    let mut edges: BTreeMap<LangId, Vec<Edge>> = BTreeMap::new();
    let mut i = 0;
    while i < states.len() {
        let s = states[i];
        i += 1;
        for d in decisions(tdg, s) {
            let reset = *pi.choice.get(&d).ok_or(StrategyError::Unmapped(d))?;
            let child = tdg.dec[d].child[reset as usize].ok_or(StrategyError::MissingChild(d))?;
            edges.entry(s).or_default().push(Edge {
                decision: d,
                reset,
                child,
            });
            states.push(child);
        }
    }
    let mut height = BTreeMap::new();
    for &s in states.iter().rev() {
        let h = edges
            .get(&s)
            .map(|es| es.iter().map(|e| height[&e.child] + 1).max().unwrap_or(0))
            .unwrap_or(0);
        height.insert(s, h);
    }
    Ok(ResultingGraph { states, edges, height })
}

fn enumerate(
    tdg: &Tdg,
    frontier: &[DecId],
    choice: &mut Vec<(DecId, bool)>,
    out: &mut Vec<ResetStrategy>,
    max: usize,
) {
    if out.len() >= max {
        return;
    }
    let Some((&d, rest)) = frontier.split_first() else {
        out.push(ResetStrategy {
            choice: choice.iter().copied().collect(),
        });
        return;
    };
    for r in crate::obs::RESETS {
        let Some(c) = tdg.dec[d].child[r as usize] else {
            continue;
        };
        let mut next: Vec<DecId> = rest.to_vec();
        next.extend(decisions(tdg, c));
        choice.push((d, r));
        enumerate(tdg, &next, choice, out, max);
        choice.pop();
    }
}

/// Number of unordered pairs of states sharing a label set: a cheap
/// estimate of how much merging a strategy allows.
fn mergeable_pairs(tdg: &Tdg, g: &ResultingGraph) -> usize {
    let mut counts: BTreeMap<(bool, bool), usize> = BTreeMap::new();
    for &s in &g.states {
        let l: Labels = tdg.lang[s].labels;
        *counts.entry((l.contains(true), l.contains(false))).or_default() += 1;
    }
    counts.values().map(|n| n * n.saturating_sub(1) / 2).sum()
}

/// Up to `max` admissible strategies, enumerated with `true` before `false`
/// and then ordered by decreasing estimated mergeability.
pub fn admissible_strategies(obs: &ObservationStructure<'_>, max: usize) -> Result<Vec<ResetStrategy>, StrategyError> {
    if !obs.rebuild_queue().is_empty() {
        return Err(StrategyError::PendingRebuilds(obs.rebuild_queue().len()));
    }
    let tdg = &obs.tdg;
    let mut out = Vec::new();
    let frontier: Vec<DecId> = decisions(tdg, Tdg::ROOT).collect();
    enumerate(tdg, &frontier, &mut Vec::new(), &mut out, max);
    let mut scored: Vec<(usize, ResetStrategy)> = out
        .into_iter()
        .map(|pi| {
            let g = apply_strategy(tdg, &pi).expect("enumerated strategies are admissible");
            (mergeable_pairs(tdg, &g), pi)
        })
        .collect();
    scored.sort_by(|a, b| b.0.cmp(&a.0));
    Ok(scored.into_iter().map(|(_, pi)| pi).collect())
}

/// Completes `pi` into an admissible strategy: reachable decisions keep
/// their choice when that child exists and otherwise take the first
/// existing child in reset order. Unreachable entries are dropped.
pub fn complete(tdg: &Tdg, pi: &ResetStrategy) -> ResetStrategy {
    let mut choice = BTreeMap::new();
    let mut stack = vec![Tdg::ROOT];
    while let Some(s) = stack.pop() {
        for d in decisions(tdg, s) {
            let preferred = pi.choice.get(&d).copied();
            let pick = preferred
                .into_iter()
                .chain(crate::obs::RESETS)
                .find(|&r| tdg.dec[d].child[r as usize].is_some());
            if let Some(r) = pick {
                choice.insert(d, r);
                stack.push(tdg.dec[d].child[r as usize].unwrap());
            }
        }
    }
    ResetStrategy { choice }
}

/// Reachable decisions of `pi` in breadth-first order.
pub fn reachable_decisions(tdg: &Tdg, pi: &ResetStrategy) -> Vec<DecId> {
    match apply_strategy(tdg, pi) {
        Ok(g) => g.states.iter().flat_map(|&s| g.edges(s).iter().map(|e| e.decision)).collect(),
        Err(_) => Vec::new(),
    }
}
