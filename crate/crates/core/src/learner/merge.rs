//! Folding a resulting graph into a RERA: the preorder on language states,
//! the folding set and the merged automaton.

use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::cmp::Reverse;

use super::strategy::ResultingGraph;
use crate::obs::{LangId, ObservationStructure, Tdg};
use crate::rera::{Rera, Transition};
use crate::timed::{ClockValuation, TimedWord};

/// The preorder `s ≼ s'` over one resulting graph.
pub struct Preorder<'a, 'o> {
    obs: &'a ObservationStructure<'o>,
    graph: &'a ResultingGraph,
    /// Observations reaching each state, with the valuation there.
    passing: BTreeMap<LangId, Vec<(usize, ClockValuation)>>,
}

impl<'a, 'o> Preorder<'a, 'o> {
    pub fn new(obs: &'a ObservationStructure<'o>, graph: &'a ResultingGraph) -> Self {
        let mut passing: BTreeMap<LangId, Vec<(usize, ClockValuation)>> = BTreeMap::new();
        for (id, w) in obs.obs().keys().enumerate() {
            let mut s = Tdg::ROOT;
            let mut v = ClockValuation::zero(obs.clocks());
            passing.entry(s).or_default().push((id, v.clone()));
            for (t, a) in w.letters() {
                let at = v.elapsed(t);
                let Some(e) = graph
                    .edges(s)
                    .iter()
                    .find(|e| obs.tdg.dec[e.decision].action == *a && obs.tdg.dec[e.decision].guard.contains(&at))
                else {
                    break;
                };
                v = if e.reset { at.reset_one(a.clock()) } else { at };
                s = e.child;
                passing.entry(s).or_default().push((id, v.clone()));
            }
        }
        Preorder { obs, graph, passing }
    }

    fn accepting(&self, s: LangId) -> bool {
        self.obs.tdg.lang[s].labels.single() == Some(true)
    }

    /// Labels agree on every guarded suffix present under both states.
    fn shared_suffixes_agree(&self, s: LangId, t: LangId) -> bool {
        let tdg = &self.obs.tdg;
        if tdg.lang[s].labels != tdg.lang[t].labels {
            return false;
        }
        self.graph.edges(s).iter().all(|e| {
            let d = &tdg.dec[e.decision];
            match self.graph.edges(t).iter().find(|f| {
                let d2 = &tdg.dec[f.decision];
                d2.action == d.action && d2.guard == d.guard && f.reset == e.reset
            }) {
                Some(f) => self.shared_suffixes_agree(e.child, f.child),
                None => true,
            }
        })
    }

    /// Observations through `s`, replayed from `t` with the valuation they
    /// had at `s`, are not contradicted where the replay stays in the graph.
    fn replay_agrees(&self, s: LangId, t: LangId) -> bool {
        let depth = self.obs.tdg.lang[s].depth;
        let Some(words) = self.passing.get(&s) else {
            return true;
        };
        words.iter().all(|(id, v)| {
            let (w, o) = self.obs.word(*id);
            self.replay(t, w, depth, v.clone()).is_none_or(|end| self.accepting(end) == o)
        })
    }

    fn replay(&self, mut q: LangId, w: &TimedWord, from: usize, mut v: ClockValuation) -> Option<LangId> {
        let tdg = &self.obs.tdg;
        for (t, a) in &w.letters()[from..] {
            let at = v.elapsed(t);
            let e = self
                .graph
                .edges(q)
                .iter()
                .find(|e| tdg.dec[e.decision].action == *a && tdg.dec[e.decision].guard.contains(&at))?;
            v = if e.reset { at.reset_one(a.clock()) } else { at };
            q = e.child;
        }
        Some(q)
    }

    pub fn leq(&self, s: LangId, t: LangId) -> bool {
        self.graph.height(s) <= self.graph.height(t) && self.shared_suffixes_agree(s, t) && self.replay_agrees(s, t)
    }
}

/// A folding set with the fold target of every other reachable state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldingSet {
    pub members: Vec<LangId>,
    pub fold: BTreeMap<LangId, LangId>,
}

impl FoldingSet {
    pub fn target(&self, s: LangId) -> LangId {
        self.fold.get(&s).copied().unwrap_or(s)
    }
}

/// Greedy top-down folding: successors are taken by decreasing height
/// (creation order on ties) and folded into the lowest, oldest member
/// above them, or added to the set. States in `keep` are never folded.
pub fn select_u(order: &Preorder<'_, '_>, keep: &BTreeSet<LangId>) -> FoldingSet {
    let graph = order.graph;
    let mut members = vec![Tdg::ROOT];
    let mut fold = BTreeMap::new();
    let mut frontier: BinaryHeap<(usize, Reverse<LangId>)> = BinaryHeap::new();
    let push = |frontier: &mut BinaryHeap<(usize, Reverse<LangId>)>, s: LangId| {
        for e in graph.edges(s) {
            frontier.push((graph.height(e.child), Reverse(e.child)));
        }
    };
    push(&mut frontier, Tdg::ROOT);
    while let Some((_, Reverse(c))) = frontier.pop() {
        let target = if keep.contains(&c) {
            None
        } else {
            let mut ranked = members.clone();
            ranked.sort_by_key(|&u| (graph.height(u), u));
            ranked.into_iter().find(|&u| order.leq(c, u))
        };
        match target {
            Some(u) => {
                fold.insert(c, u);
            }
            None => {
                members.push(c);
                push(&mut frontier, c);
            }
        }
    }
    FoldingSet { members, fold }
}

/// The merged automaton and, per transition, the graph state it stands for.
#[derive(Debug, Clone)]
pub struct Merged {
    pub rera: Rera,
    pub children: Vec<LangId>,
}

pub fn merge(obs: &ObservationStructure<'_>, graph: &ResultingGraph, u: &FoldingSet) -> Merged {
    let index: BTreeMap<LangId, usize> = u.members.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut transitions = Vec::new();
    let mut children = Vec::new();
    for &s in &u.members {
        for e in graph.edges(s) {
            let d = &obs.tdg.dec[e.decision];
            let target = index
                .get(&u.target(e.child))
                .copied()
                .expect("fold targets are members");
            transitions.push(Transition::new(index[&s], d.action, d.guard.clone(), e.reset, target));
            children.push(e.child);
        }
    }
    let accepting = u
        .members
        .iter()
        .enumerate()
        .filter(|(_, &s)| obs.tdg.lang[s].labels.single() == Some(true))
        .map(|(i, _)| i)
        .collect();
    Merged {
        rera: Rera {
            alphabet: obs.alphabet().clone(),
            locations: (0..u.members.len()).map(|i| format!("q{i}")).collect(),
            initial: 0,
            accepting,
            transitions,
            max_constant: obs.k(),
        },
        children,
    }
}

/// The first observation the automaton gets wrong, if any.
pub fn first_mismatch(obs: &ObservationStructure<'_>, rera: &Rera) -> Option<usize> {
    obs.obs().iter().position(|(w, &o)| rera.accepts(w) != o)
}

/// Merges with the plain preorder, then keeps unfolding the first fold a
/// mispredicted observation goes through until every observation is
/// reproduced or no fold is left to blame.
pub fn merge_consistent(obs: &ObservationStructure<'_>, graph: &ResultingGraph) -> (Merged, bool) {
    let order = Preorder::new(obs, graph);
    let mut keep = BTreeSet::new();
    loop {
        let u = select_u(&order, &keep);
        let merged = merge(obs, graph, &u);
        let Some(id) = first_mismatch(obs, &merged.rera) else {
            return (merged, true);
        };
        let sim = merged.rera.simulate(obs.word(id).0);
        let blame = sim
            .transitions
            .iter()
            .map(|&t| merged.children[t])
            .find(|c| u.fold.contains_key(c));
        match blame {
            Some(c) => {
                keep.insert(c);
            }
            None => return (merged, false),
        }
    }
}
