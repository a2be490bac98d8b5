//! Full re-scans of the structural invariants. Each check returns a list of
//! human-readable violations; an empty list means the invariant holds.

use super::{LangId, ObservationStructure, Tdg, Tog, RESETS};
use crate::timed::{ClockValuation, Guard, KClass, TimedWord, TimedWordWithResets};

/// Every reset vector of length `n`, in a fixed order.
pub fn reset_vectors(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..1 << n).map(move |bits| (0..n).map(|i| bits >> i & 1 == 1).collect())
}

impl ObservationStructure<'_> {
    /// True when `s` or an ancestor waits for a rebuild.
    pub fn awaiting_rebuild(&self, s: LangId) -> bool {
        self.tdg.ancestors(s).any(|a| self.rebuild_queue().contains(&a))
    }

    pub fn check_tdg_tree(&self) -> Vec<String> {
        let mut out = Vec::new();
        let tdg = &self.tdg;
        let live = tdg.live_states();
        if live.len() != tdg.lang.iter().filter(|s| s.alive).count() {
            out.push("live language state unreachable from the root".to_string());
        }
        for &s in &live {
            let state = &tdg.lang[s];
            if let Some(d) = state.parent {
                let dec = &tdg.dec[d];
                let Some(r) = RESETS.into_iter().find(|&r| dec.child[r as usize] == Some(s)) else {
                    out.push(format!("language state {s} not a child of its parent"));
                    continue;
                };
                if !dec.alive || !tdg.lang[dec.parent].children.contains(&d) {
                    out.push(format!("decision {d} detached"));
                }
                let expected = tdg.lang[dec.parent].word.extended(dec.guard.clone(), dec.action, r);
                if state.word != expected {
                    out.push(format!("language state {s} word differs from its path"));
                }
            } else if s != Tdg::ROOT {
                out.push(format!("language state {s} has no parent"));
            }
            match state.word.zone_word(self.clocks()) {
                Ok(zw) if zw.last == state.zone => {}
                _ => out.push(format!("language state {s} zone differs from its zone word")),
            }
            for &d in &state.children {
                if tdg.dec[d].parent != s || !tdg.dec[d].alive {
                    out.push(format!("decision {d} listed under the wrong state"));
                }
                if tdg.dec[d].children().next().is_none() && !self.awaiting_rebuild(s) {
                    out.push(format!("decision {d} has no child and no rebuild is scheduled"));
                }
            }
        }
        out
    }

    /// Guards of each (state, action) are pairwise disjoint and cover every
    /// valuation. States awaiting a rebuild are skipped.
    pub fn check_partitions(&self) -> Vec<String> {
        let mut out = Vec::new();
        for s in self.tdg.live_states() {
            if self.awaiting_rebuild(s) {
                continue;
            }
            for a in self.alphabet().actions() {
                let guards: Vec<&Guard> = self.tdg.decisions(s, a).map(|d| &self.tdg.dec[d].guard).collect();
                if guards.is_empty() {
                    continue;
                }
                for (i, g) in guards.iter().enumerate() {
                    if guards[i + 1..].iter().any(|h| g.intersects(h)) {
                        out.push(format!("state {s}: overlapping guards"));
                    }
                }
                let mut rest = vec![Guard::top(self.clocks())];
                for g in &guards {
                    rest = rest.iter().flat_map(|p| p.subtract(g)).collect();
                }
                if !rest.is_empty() {
                    out.push(format!("state {s}: guards do not cover every valuation"));
                }
            }
        }
        out
    }

    /// The TOG is a tree implementing the valid part of the observations.
    pub fn check_tog(&self) -> Vec<String> {
        let mut out = Vec::new();
        let tog = &self.tog;
        for (s, state) in tog.states.iter().enumerate() {
            if let Some(d) = state.parent {
                if !tog.decs[d].child.contains(&Some(s)) || !tog.states[tog.decs[d].parent].children.contains(&d) {
                    out.push(format!("observation state {s} detached"));
                }
            }
            for &d in &state.children {
                if tog.decs[d].parent != s {
                    out.push(format!("observation decision {d} listed under the wrong state"));
                }
            }
            let shielded = state.parent.is_some_and(|d| tog.under_invalid(tog.decs[d].parent));
            if shielded {
                continue;
            }
            if state.words.is_empty() && s != Tog::ROOT {
                out.push(format!("observation state {s} covers no word"));
            }
            let kw = tog.k_closed(s);
            let resets: Vec<bool> = kw.steps.iter().map(|st| st.2).collect();
            for &id in &state.words {
                let (w, o) = self.word(id);
                let run = TimedWordWithResets::new(w.clone(), resets.clone(), self.clocks());
                if run.k_closed(self.k()) != kw {
                    out.push(format!("observation state {s}: word {id} outside its K-closed word"));
                }
                if !state.labels.contains(o) {
                    out.push(format!("observation state {s}: label of word {id} missing"));
                }
            }
        }
        for id in 0..self.obs().len() {
            let (w, o) = self.word(id);
            for resets in reset_vectors(w.len()) {
                match self.tog_endpoint(w, &resets) {
                    Endpoint::Invalid => {}
                    Endpoint::Missing => out.push(format!("word {id}: K-closed path missing")),
                    Endpoint::State(s) => {
                        let st = &tog.states[s];
                        if !st.words.contains(&id) || !st.labels.contains(o) {
                            out.push(format!("word {id}: not recorded at its observation state"));
                        }
                    }
                }
            }
        }
        out
    }

    fn tog_endpoint(&self, w: &TimedWord, resets: &[bool]) -> Endpoint {
        let mut s = Tog::ROOT;
        let mut v = ClockValuation::zero(self.clocks());
        for (i, (t, a)) in w.letters().iter().enumerate() {
            if self.tog.states[s].invalid {
                return Endpoint::Invalid;
            }
            let at = v.elapsed(t);
            let Some(d) = self.tog.find(s, *a, &KClass::of(&at, self.k())) else {
                return Endpoint::Missing;
            };
            let Some(c) = self.tog.decs[d].child[resets[i] as usize] else {
                return Endpoint::Missing;
            };
            v = if resets[i] { at.reset_one(a.clock()) } else { at };
            s = c;
        }
        if self.tog.states[s].invalid {
            return Endpoint::Invalid;
        }
        Endpoint::State(s)
    }

    /// Language states reached by `w` from the root over every surviving
    /// reset choice; `None` when the walk leaves the graph.
    pub fn tdg_endpoints(&self, w: &TimedWord) -> Option<Vec<LangId>> {
        let mut out = Vec::new();
        let mut stack = vec![(Tdg::ROOT, 0usize, ClockValuation::zero(self.clocks()))];
        let mut complete = true;
        while let Some((s, pos, v)) = stack.pop() {
            if pos == w.len() {
                out.push(s);
                continue;
            }
            let (t, a) = &w.letters()[pos];
            let at = v.elapsed(t);
            let Some(d) = self.tdg.matching(s, *a, &at) else {
                complete = false;
                continue;
            };
            for (r, c) in self.tdg.dec[d].children() {
                let next = if r { at.reset_one(a.clock()) } else { at.clone() };
                stack.push((c, pos + 1, next));
            }
        }
        (complete && !out.is_empty()).then_some(out)
    }

    /// Every observation reaches some language state, and carries its
    /// label there. Meaningful once queues and rebuilds are drained.
    pub fn check_completeness(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.rebuild_queue().is_empty() || !self.is_settled() {
            return out;
        }
        for id in 0..self.obs().len() {
            let (w, o) = self.word(id);
            let valid = reset_vectors(w.len()).any(|r| !self.concrete_invalid(w, &r));
            if !valid {
                continue;
            }
            match self.tdg_endpoints(w) {
                None => out.push(format!("word {id} leaves the TDG")),
                Some(ends) => {
                    for s in ends {
                        if !self.tdg.lang[s].labels.contains(o) {
                            out.push(format!("word {id}: label missing at language state {s}"));
                        }
                    }
                }
            }
        }
        out
    }

    /// No live language state models an invalid K-closed word, and every
    /// valid observation still reaches the TDG (or a state awaiting a
    /// rebuild).
    pub fn check_pruning(&self) -> Vec<String> {
        let mut out = Vec::new();
        for s in self.tdg.live_states() {
            if self.is_invalid(&self.tdg.lang[s].word) {
                out.push(format!("language state {s} models an invalid word"));
            }
        }
        let pending: Vec<usize> = self.pending_words().collect();
        for id in 0..self.obs().len() {
            if pending.contains(&id) {
                continue;
            }
            let (w, _) = self.word(id);
            let valid = reset_vectors(w.len()).any(|r| !self.concrete_invalid(w, &r));
            if valid && !self.reaches(Tdg::ROOT, w, 0, ClockValuation::zero(self.clocks())) {
                out.push(format!("valid word {id} unreachable in the TDG"));
            }
        }
        out
    }

    fn reaches(&self, s: LangId, w: &TimedWord, pos: usize, v: ClockValuation) -> bool {
        if pos == w.len() || self.rebuild_queue().contains(&s) {
            return true;
        }
        let (t, a) = &w.letters()[pos];
        let at = v.elapsed(t);
        let Some(d) = self.tdg.matching(s, *a, &at) else {
            return false;
        };
        self.tdg.dec[d].children().any(|(r, c)| {
            let next = if r { at.reset_one(a.clock()) } else { at.clone() };
            self.reaches(c, w, pos + 1, next)
        })
    }

    /// All structural checks at once.
    pub fn audit(&self) -> Vec<String> {
        let mut out = self.check_tdg_tree();
        out.extend(self.check_partitions());
        out.extend(self.check_tog());
        out.extend(self.check_completeness());
        out
    }
}

enum Endpoint {
    Invalid,
    Missing,
    State(usize),
}
