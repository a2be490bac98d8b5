//! Timed observation graph: a decision tree over K-classes that stores every
//! observation under every reset combination and flags invalid ones.

use super::{Labels, ObservationStructure, PruneEvent, RESETS};
use crate::timed::{
    Action, ClockValuation, Guard, GuardedWordWithResets, KClass, KClosedWord, TimedWord,
};

pub type ObsId = usize;
pub type ObsDecId = usize;

#[derive(Debug, Clone)]
pub struct ObsState {
    /// Class of the valuation after the incoming step (reset applied).
    pub class: KClass,
    pub labels: Labels,
    /// Observations ending here.
    pub words: Vec<usize>,
    /// Observations whose path visits this state, ending here or deeper.
    pub passing: Vec<usize>,
    pub invalid: bool,
    pub parent: Option<ObsDecId>,
    pub children: Vec<ObsDecId>,
    pub depth: usize,
}

#[derive(Debug, Clone)]
pub struct ObsDec {
    pub parent: ObsId,
    pub action: Action,
    /// Class of `v + t` when the action is played.
    pub class: KClass,
    pub child: [Option<ObsId>; 2],
}

#[derive(Debug, Clone)]
pub struct Tog {
    pub states: Vec<ObsState>,
    pub decs: Vec<ObsDec>,
}

impl Tog {
    pub const ROOT: ObsId = 0;

    pub fn new(clocks: usize) -> Self {
        Tog {
            states: vec![ObsState {
                class: KClass::zero(clocks),
                labels: Labels::default(),
                words: Vec::new(),
                passing: Vec::new(),
                invalid: false,
                parent: None,
                children: Vec::new(),
                depth: 0,
            }],
            decs: Vec::new(),
        }
    }

    pub fn find(&self, s: ObsId, a: Action, class: &KClass) -> Option<ObsDecId> {
        self.states[s]
            .children
            .iter()
            .copied()
            .find(|&d| self.decs[d].action == a && &self.decs[d].class == class)
    }

    /// Creates the decision for `(a, class)` under `s` with both children
    /// labelled `label`.
    fn add_decision(&mut self, s: ObsId, a: Action, class: KClass, label: bool) -> ObsDecId {
        let d = self.decs.len();
        let depth = self.states[s].depth + 1;
        let mut child = [None, None];
        for r in RESETS {
            let id = self.states.len();
            self.states.push(ObsState {
                class: if r { class.reset(a.clock()) } else { class.clone() },
                labels: Labels::of(label),
                words: Vec::new(),
                passing: Vec::new(),
                invalid: false,
                parent: Some(d),
                children: Vec::new(),
                depth,
            });
            child[r as usize] = Some(id);
        }
        self.decs.push(ObsDec {
            parent: s,
            action: a,
            class,
            child,
        });
        self.states[s].children.push(d);
        d
    }

    /// `(decision, reset)` steps from the root down to `s`.
    pub fn path(&self, s: ObsId) -> Vec<(ObsDecId, bool)> {
        let mut out = Vec::new();
        let mut cur = s;
        while let Some(d) = self.states[cur].parent {
            let r = self.decs[d].child[1] == Some(cur);
            out.push((d, r));
            cur = self.decs[d].parent;
        }
        out.reverse();
        out
    }

    pub fn k_closed(&self, s: ObsId) -> KClosedWord {
        let steps = self
            .path(s)
            .into_iter()
            .map(|(d, r)| (self.decs[d].class.clone(), self.decs[d].action, r))
            .collect();
        KClosedWord {
            steps,
            last: self.states[s].class.clone(),
        }
    }

    /// True when `s` or one of its ancestors is marked invalid.
    pub fn under_invalid(&self, s: ObsId) -> bool {
        let mut cur = s;
        loop {
            if self.states[cur].invalid {
                return true;
            }
            match self.states[cur].parent {
                Some(d) => cur = self.decs[d].parent,
                None => return false,
            }
        }
    }
}

impl ObservationStructure<'_> {
    pub(crate) fn findpath_tog(&mut self, id: usize) {
        let (w, o) = self.word(id);
        let w = w.clone();
        let v = ClockValuation::zero(self.clocks());
        let mut resets = Vec::with_capacity(w.len());
        self.findpath_tog_from(id, &w, o, Tog::ROOT, v, &mut resets);
    }

    fn findpath_tog_from(
        &mut self,
        id: usize,
        w: &TimedWord,
        o: bool,
        s: ObsId,
        v: ClockValuation,
        resets: &mut Vec<bool>,
    ) {
        let pos = resets.len();
        self.tog.states[s].passing.push(id);
        if pos == w.len() {
            let state = &mut self.tog.states[s];
            state.words.push(id);
            state.labels.insert(o);
            if state.labels.len() > 1 && !state.invalid {
                self.mark_invalid(s, w, resets);
            }
            return;
        }
        let (t, a) = w.letters()[pos].clone();
        let at = v.elapsed(&t);
        let class = KClass::of(&at, self.k());
        let d = match self.tog.find(s, a, &class) {
            Some(d) => d,
            None => {
                let label = if pos + 1 == w.len() {
                    o
                } else {
                    self.request(&w.prefix(pos + 1))
                };
                self.tog.add_decision(s, a, class, label)
            }
        };
        for r in RESETS {
            let Some(c) = self.tog.decs[d].child[r as usize] else {
                continue;
            };
            if self.tog.states[c].invalid {
                continue;
            }
            resets.push(r);
            let next = if r { at.reset_one(a.clock()) } else { at.clone() };
            self.findpath_tog_from(id, w, o, c, next, resets);
            resets.pop();
        }
    }

    /// Marks `s` invalid and walks upwards while every child of the parent
    /// decision is invalid, then queues the TDG pruning of the topmost state.
    fn mark_invalid(&mut self, s: ObsId, w: &TimedWord, resets: &[bool]) {
        self.tog.states[s].invalid = true;
        let mut top = s;
        while let Some(d) = self.tog.states[top].parent {
            let all_invalid = self.tog.decs[d]
                .child
                .iter()
                .all(|c| c.is_some_and(|c| self.tog.states[c].invalid));
            if !all_invalid {
                break;
            }
            top = self.tog.decs[d].parent;
            self.tog.states[top].invalid = true;
        }
        let depth = self.tog.states[top].depth;
        log::debug!("invalid K-closed word at depth {depth}");
        self.pending_prunes.push_back(PruneEvent {
            word: w.prefix(depth),
            resets: resets[..depth].to_vec(),
        });
    }

    /// TOG states at depth `|w_gr|` whose K-closed word is modelled by
    /// `w_gr`. States under an invalid ancestor are reported through the
    /// second component.
    fn tog_dive(&self, w_gr: &GuardedWordWithResets) -> (Vec<ObsId>, bool) {
        let k = self.k();
        let mut found = Vec::new();
        let mut invalid = false;
        let mut stack = vec![(Tog::ROOT, 0usize)];
        while let Some((s, pos)) = stack.pop() {
            if self.tog.states[s].invalid {
                invalid = true;
                continue;
            }
            if pos == w_gr.len() {
                found.push(s);
                continue;
            }
            let (g, a, r) = &w_gr.letters[pos];
            for &d in &self.tog.states[s].children {
                let dec = &self.tog.decs[d];
                if dec.action == *a && dec.class.within(g, k) {
                    if let Some(c) = dec.child[*r as usize] {
                        stack.push((c, pos + 1));
                    }
                }
            }
        }
        found.sort_unstable();
        (found, invalid)
    }

    /// Whether `w_gr` models a K-closed word that is invalid in the TOG.
    pub fn is_invalid(&self, w_gr: &GuardedWordWithResets) -> bool {
        self.tog_dive(w_gr).1
    }

    /// An observation satisfying `w_gr`, found without querying.
    pub(crate) fn tog_witness(&self, w_gr: &GuardedWordWithResets) -> Option<usize> {
        let (states, _) = self.tog_dive(w_gr);
        states
            .into_iter()
            .filter_map(|s| self.tog.states[s].words.iter().min().copied())
            .min()
    }

    /// Whether the K-closed path of a concrete word under `resets` crosses
    /// an invalid state.
    pub fn concrete_invalid(&self, w: &TimedWord, resets: &[bool]) -> bool {
        let mut s = Tog::ROOT;
        let mut v = ClockValuation::zero(self.clocks());
        for (i, (t, a)) in w.letters().iter().enumerate() {
            if self.tog.states[s].invalid {
                return true;
            }
            let at = v.elapsed(t);
            let Some(d) = self.tog.find(s, *a, &KClass::of(&at, self.k())) else {
                return false;
            };
            let Some(c) = self.tog.decs[d].child[resets[i] as usize] else {
                return false;
            };
            v = if resets[i] { at.reset_one(a.clock()) } else { at };
            s = c;
        }
        self.tog.states[s].invalid
    }

    /// Invalid successors of the valid states modelled by `w_gr` on `a`
    /// under `g` with reset `r`: the TOG state they hang from, the class at
    /// which `a` is played and the observations through the invalid state.
    pub fn invalid_branches(
        &self,
        w_gr: &GuardedWordWithResets,
        a: Action,
        g: &Guard,
        r: bool,
    ) -> Vec<(ObsId, KClass, Vec<usize>)> {
        let k = self.k();
        let (states, _) = self.tog_dive(w_gr);
        let mut out = Vec::new();
        for s in states {
            for &d in &self.tog.states[s].children {
                let dec = &self.tog.decs[d];
                if dec.action != a || !dec.class.within(g, k) {
                    continue;
                }
                let Some(c) = dec.child[r as usize] else {
                    continue;
                };
                if self.tog.states[c].invalid {
                    out.push((s, dec.class.clone(), self.tog.states[c].passing.clone()));
                }
            }
        }
        out
    }

    /// [`invalid_branches`] grouped by class.
    ///
    /// [`invalid_branches`]: ObservationStructure::invalid_branches
    pub fn invalid_successors(
        &self,
        w_gr: &GuardedWordWithResets,
        a: Action,
        g: &Guard,
        r: bool,
    ) -> Vec<(KClass, Vec<usize>)> {
        let mut out: Vec<(KClass, Vec<usize>)> = Vec::new();
        for (_, class, words) in self.invalid_branches(w_gr, a, g, r) {
            match out.iter_mut().find(|(z, _)| z == &class) {
                Some((_, ws)) => ws.extend(words),
                None => out.push((class, words)),
            }
        }
        for (_, ws) in &mut out {
            ws.sort_unstable();
            ws.dedup();
        }
        out
    }
}
