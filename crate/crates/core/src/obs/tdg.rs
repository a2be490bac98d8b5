//! Timed decision graph: language states (guarded words with zones) and
//! decision states (an action, a guard and one child per reset choice).

use super::{Labels, ObservationStructure, PruneEvent, RESETS};
use crate::timed::{Action, ClockValuation, Guard, GuardedWordWithResets, TimedWord, Zone};

pub type LangId = usize;
pub type DecId = usize;

#[derive(Debug, Clone)]
pub struct LangState {
    pub word: GuardedWordWithResets,
    pub zone: Zone,
    pub labels: Labels,
    pub parent: Option<DecId>,
    pub children: Vec<DecId>,
    pub alive: bool,
    pub depth: usize,
}

#[derive(Debug, Clone)]
pub struct DecState {
    pub parent: LangId,
    pub action: Action,
    pub guard: Guard,
    /// Indexed by the reset flag (`false` = 0, `true` = 1).
    pub child: [Option<LangId>; 2],
    pub alive: bool,
}

impl DecState {
    pub fn children(&self) -> impl Iterator<Item = (bool, LangId)> + '_ {
        RESETS.into_iter().filter_map(|r| self.child[r as usize].map(|c| (r, c)))
    }
}

/// Arena of TDG states. Deleted states stay in the arena with `alive` unset
/// so that identifiers remain stable.
#[derive(Debug, Clone)]
pub struct Tdg {
    pub lang: Vec<LangState>,
    pub dec: Vec<DecState>,
}

impl Tdg {
    pub const ROOT: LangId = 0;

    pub fn new(clocks: usize) -> Self {
        Tdg {
            lang: vec![LangState {
                word: GuardedWordWithResets::empty(),
                zone: Zone::zero(clocks).future(),
                labels: Labels::default(),
                parent: None,
                children: Vec::new(),
                alive: true,
                depth: 0,
            }],
            dec: Vec::new(),
        }
    }

    pub fn add_decision(&mut self, s: LangId, action: Action, guard: Guard) -> DecId {
        let id = self.dec.len();
        self.dec.push(DecState {
            parent: s,
            action,
            guard,
            child: [None, None],
            alive: true,
        });
        self.lang[s].children.push(id);
        id
    }

    pub fn add_child(&mut self, d: DecId, reset: bool, labels: Labels) -> LangId {
        let DecState {
            parent, action, guard, ..
        } = self.dec[d].clone();
        let p = &self.lang[parent];
        let zg = p.zone.and_guard(&guard);
        let zone = if reset { zg.reset(action.clock()) } else { zg }.future();
        let state = LangState {
            word: p.word.extended(guard, action, reset),
            zone,
            labels,
            parent: Some(d),
            children: Vec::new(),
            alive: true,
            depth: p.depth + 1,
        };
        let id = self.lang.len();
        self.lang.push(state);
        self.dec[d].child[reset as usize] = Some(id);
        id
    }

    /// Live decisions of `s` on action `a`.
    pub fn decisions(&self, s: LangId, a: Action) -> impl Iterator<Item = DecId> + '_ {
        self.lang[s]
            .children
            .iter()
            .copied()
            .filter(move |&d| self.dec[d].alive && self.dec[d].action == a)
    }

    /// The decision of `s` on `a` whose guard holds at `at`.
    pub fn matching(&self, s: LangId, a: Action, at: &ClockValuation) -> Option<DecId> {
        self.decisions(s, a).find(|&d| self.dec[d].guard.contains(at))
    }

    /// `s` and its language-state ancestors, nearest first.
    pub fn ancestors(&self, s: LangId) -> impl Iterator<Item = LangId> + '_ {
        std::iter::successors(Some(s), move |&x| self.lang[x].parent.map(|d| self.dec[d].parent))
    }

    /// The ancestor of `s` at `depth`.
    pub fn ancestor_at(&self, s: LangId, depth: usize) -> LangId {
        self.ancestors(s)
            .find(|&a| self.lang[a].depth == depth)
            .expect("depth within the path")
    }

    /// Deletes every decision below `s`, leaving `s` itself in place.
    pub fn clear_children(&mut self, s: LangId) {
        for d in std::mem::take(&mut self.lang[s].children) {
            self.delete_decision(d);
        }
    }

    fn delete_decision(&mut self, d: DecId) {
        self.dec[d].alive = false;
        for r in RESETS {
            if let Some(c) = self.dec[d].child[r as usize].take() {
                self.delete_subtree(c);
            }
        }
    }

    pub fn delete_subtree(&mut self, s: LangId) {
        self.lang[s].alive = false;
        for d in std::mem::take(&mut self.lang[s].children) {
            self.delete_decision(d);
        }
    }

    /// Live language states in depth-first creation order.
    pub fn live_states(&self) -> Vec<LangId> {
        let mut out = Vec::new();
        let mut stack = vec![Self::ROOT];
        while let Some(s) = stack.pop() {
            out.push(s);
            for &d in self.lang[s].children.iter().rev() {
                for r in [false, true] {
                    if let Some(c) = self.dec[d].child[r as usize] {
                        stack.push(c);
                    }
                }
            }
        }
        out
    }
}

impl ObservationStructure<'_> {
    pub(crate) fn findpath_tdg(&mut self, id: usize) {
        let (w, o) = self.word(id);
        let w = w.clone();
        let v = ClockValuation::zero(self.clocks());
        self.findpath_tdg_from(&w, o, 0, Tdg::ROOT, v);
    }

    fn findpath_tdg_from(&mut self, w: &TimedWord, o: bool, pos: usize, s: LangId, v: ClockValuation) {
        if !self.tdg.lang[s].alive {
            return;
        }
        if pos == w.len() {
            self.tdg.lang[s].labels.insert(o);
            return;
        }
        let (t, a) = w.letters()[pos].clone();
        let at = v.elapsed(&t);
        if self.tdg.decisions(s, a).next().is_none() {
            self.addword_tdg(w, o, pos, s, at);
            return;
        }
        let Some(d) = self.tdg.matching(s, a, &at) else {
            log::warn!("no guard of depth-{} state covers letter {pos}", self.tdg.lang[s].depth);
            return;
        };
        for (r, c) in self.tdg.dec[d].children().collect::<Vec<_>>() {
            let next = if r { at.reset_one(a.clock()) } else { at.clone() };
            self.findpath_tdg_from(w, o, pos + 1, c, next);
        }
    }

    /// Extends `s` with a `true`-guarded decision for letter `pos`; `at` is
    /// the valuation when the letter is played. Intermediate states are
    /// labelled by the observation of the prefix ending at them.
    fn addword_tdg(&mut self, w: &TimedWord, o: bool, pos: usize, s: LangId, at: ClockValuation) {
        let a = w.letters()[pos].1;
        let label = if pos + 1 == w.len() {
            o
        } else {
            let phase = self.set_phase(super::Phase::Extend);
            let l = self.request(&w.prefix(pos + 1));
            self.set_phase(phase);
            l
        };
        let top = Guard::top(self.clocks());
        let d = self.tdg.add_decision(s, a, top.clone());
        let mut created = Vec::new();
        for r in RESETS {
            let child = self.tdg.lang[s].word.extended(top.clone(), a, r);
            if self.is_invalid(&child) {
                continue;
            }
            created.push((r, self.tdg.add_child(d, r, Labels::of(label))));
        }
        if created.is_empty() {
            self.schedule_rebuild(s);
            return;
        }
        if pos + 1 < w.len() {
            for (r, c) in created {
                let next = if r { at.reset_one(a.clock()) } else { at.clone() };
                let (t, _) = &w.letters()[pos + 1];
                self.addword_tdg(w, o, pos + 1, c, next.elapsed(t));
            }
        }
    }

    /// Deletes the TDG subtree modelling the invalid word of `event`, and
    /// schedules a rebuild when a decision loses its last child.
    pub(crate) fn searchprune(&mut self, event: &PruneEvent) {
        let n = event.word.len();
        if n == 0 {
            log::warn!("observations contradict every automaton: the empty word is invalid");
            return;
        }
        let mut s = Tdg::ROOT;
        let mut v = ClockValuation::zero(self.clocks());
        for (i, (t, a)) in event.word.letters().iter().enumerate() {
            if !self.tdg.lang[s].alive {
                return;
            }
            let at = v.elapsed(t);
            let Some(d) = self.tdg.matching(s, *a, &at) else {
                return;
            };
            let r = event.resets[i];
            let Some(c) = self.tdg.dec[d].child[r as usize] else {
                return;
            };
            if i + 1 == n {
                self.tdg.dec[d].child[r as usize] = None;
                self.tdg.delete_subtree(c);
                if self.tdg.dec[d].children().next().is_none() {
                    self.schedule_rebuild(s);
                }
                return;
            }
            v = if r { at.reset_one(a.clock()) } else { at };
            s = c;
        }
    }
}
