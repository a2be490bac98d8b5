//! Guard partitions and subtree reconstruction of the TDG.

use super::borders::{fallback_border, invalguard, InvalguardOutcome};
use super::{adjpair, common_borders, AdjacentPair, ValidityGuard};
use crate::obs::{Labels, LangId, ObservationStructure, Phase, RESETS};
use crate::timed::word::satisfies;
use crate::timed::{Action, ClockValuation, Guard};

/// Result of handling an inconsistent language state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolution {
    /// A rebuild of this ancestor was scheduled.
    Scheduled(LangId),
    /// The pair shows no difference below `K`; the TOG invalidates the state.
    Invalid,
    /// Nothing further can be done with the current observations.
    Unresolved,
}

/// Observation id with the valuation reached at a language state.
type Passing = Vec<(usize, ClockValuation)>;

const MAX_REBUILD_ROUNDS: usize = 256;

impl ObservationStructure<'_> {
    /// Observations whose prefix satisfies the word of `s`, with their
    /// valuation at `s`.
    fn passing(&self, s: LangId) -> Passing {
        let w_gr = &self.tdg.lang[s].word;
        let n = w_gr.len();
        self.obs()
            .keys()
            .enumerate()
            .filter(|(_, w)| w.len() >= n)
            .filter_map(|(id, w)| {
                satisfies(&w.prefix(n), w_gr, self.clocks()).map(|run| (id, run.run()[n].clone()))
            })
            .collect()
    }

    /// Whether both words of `pair` pass `s` with the pair's resets and play
    /// `a` under `g` right after it.
    fn pair_passes(&self, pair: &AdjacentPair, s: LangId, a: Action, g: &Guard) -> bool {
        let w_gr = &self.tdg.lang[s].word;
        let n = w_gr.len();
        [&pair.w, &pair.w2].into_iter().all(|p| {
            p.len() > n
                && p.resets[..n] == w_gr.resets()[..]
                && p.word.letters()[n].1 == a
                && satisfies(&p.word.prefix(n), w_gr, self.clocks()).is_some()
                && g.contains(&p.at_action(n))
        })
    }

    /// Partition of `g` for action `a` at `s`: split by the consistency
    /// guards of ledger pairs through `s`, then by validity guards until one
    /// reset choice of every cell is valid.
    pub fn findguard(&mut self, s: LangId, a: Action, g: &Guard) -> Vec<Guard> {
        let clocks = self.clocks();
        let k = self.k();
        let depth = self.tdg.lang[s].depth;
        let zone = self.tdg.lang[s].zone.clone();
        let nonempty = |h: &Guard| !zone.and_guard(h).is_empty();
        let pairs: Vec<AdjacentPair> = self.ledger.pairs.clone();
        for pair in &pairs {
            if !self.pair_passes(pair, s, a, g) {
                continue;
            }
            for cg in pair.consistency_guards(k) {
                if cg.depth != depth {
                    continue;
                }
                let (yes, no) = cg.split(clocks);
                let (g1, g2) = (g.and(&yes), g.and(&no));
                if nonempty(&g1) && nonempty(&g2) {
                    let mut out = self.findguard(s, a, &g1);
                    out.extend(self.findguard(s, a, &g2));
                    return out;
                }
            }
        }

        let state = self.tdg.lang[s].word.clone();
        let stored: Vec<ValidityGuard> = self.ledger.validity.clone();
        for vg in &stored {
            if vg.state != state || vg.action != a || !g.is_subset_of(&vg.guard) {
                continue;
            }
            let (yes, no) = vg.border.split(clocks);
            let (g1, g2) = (g.and(&yes), g.and(&no));
            if nonempty(&g1) && nonempty(&g2) {
                let mut out = self.findguard(s, a, &g1);
                out.extend(self.findguard(s, a, &g2));
                return out;
            }
        }
        let t_inv = self.is_invalid(&state.extended(g.clone(), a, true));
        let f_inv = self.is_invalid(&state.extended(g.clone(), a, false));
        if !(t_inv && f_inv) {
            return vec![g.clone()];
        }
        let w1 = self.invalid_successors(&state, a, g, true);
        let w2 = self.invalid_successors(&state, a, g, false);
        let best = w1
            .iter()
            .flat_map(|p| w2.iter().map(move |q| (p, q)))
            .filter(|(p, q)| p.0 != q.0)
            .min_by_key(|(p, q)| {
                (0..clocks)
                    .map(|c| p.0.get(c).index(k).abs_diff(q.0.get(c).index(k)))
                    .sum::<u32>()
            });
        let Some(((z1, ws1), (z2, ws2))) = best.map(|(p, q)| (p.clone(), q.clone())) else {
            return vec![g.clone()];
        };
        match invalguard(self, &state, a, g, &ws1, &z1, &ws2, &z2) {
            InvalguardOutcome::Border(vg) => {
                let (yes, no) = vg.border.split(clocks);
                let (g1, g2) = (g.and(&yes), g.and(&no));
                if nonempty(&g1) && nonempty(&g2) && !self.ledger.validity.contains(&vg) {
                    self.ledger.validity.push(vg);
                    let mut out = self.findguard(s, a, &g1);
                    out.extend(self.findguard(s, a, &g2));
                    out
                } else {
                    vec![g.clone()]
                }
            }
            InvalguardOutcome::ParentInvalidated => vec![g.clone()],
        }
    }

    /// Replaces the subtree below `s` by one built from the ledger and the
    /// observations passing `s`.
    pub fn rebuild(&mut self, s: LangId) {
        if !self.tdg.lang[s].alive || self.is_invalid(&self.tdg.lang[s].word.clone()) {
            return;
        }
        self.rebuilds += 1;
        let phase = self.set_phase(Phase::Rebuild);
        let passing = self.passing(s);
        self.rebuild_at(s, passing);
        self.set_phase(phase);
    }

    fn rebuild_at(&mut self, s: LangId, passing: Passing) {
        self.tdg.clear_children(s);
        let depth = self.tdg.lang[s].depth;
        let clocks = self.clocks();
        let actions: Vec<Action> = self.alphabet().actions().collect();
        for a in actions {
            let through: Vec<(usize, ClockValuation)> = passing
                .iter()
                .filter(|(id, _)| {
                    let w = self.word(*id).0;
                    w.len() > depth && w.letters()[depth].1 == a
                })
                .map(|(id, v)| (*id, v.elapsed(&self.word(*id).0.letters()[depth].0)))
                .collect();
            if through.is_empty() {
                continue;
            }
            for g in self.findguard(s, a, &Guard::top(clocks)) {
                if !self.tdg.lang[s].alive {
                    return;
                }
                let d = self.tdg.add_decision(s, a, g.clone());
                for r in RESETS {
                    let child_word = self.tdg.lang[s].word.extended(g.clone(), a, r);
                    if self.is_invalid(&child_word) {
                        continue;
                    }
                    let sub: Passing = through
                        .iter()
                        .filter(|(_, at)| g.contains(at))
                        .map(|(id, at)| (*id, if r { at.reset_one(a.clock()) } else { at.clone() }))
                        .collect();
                    let mut labels = Labels::default();
                    for (id, _) in &sub {
                        let (w, o) = self.word(*id);
                        if w.len() == depth + 1 {
                            labels.insert(o);
                        }
                    }
                    if labels.is_empty() {
                        match self.request_guarded(&child_word) {
                            Ok(o) => {
                                labels.insert(o);
                            }
                            Err(_) => continue,
                        }
                    }
                    let c = self.tdg.add_child(d, r, labels);
                    self.rebuild_at(c, sub);
                }
                if self.tdg.dec[d].children().next().is_none() && !self.separate_upwards(s, a, &g) {
                    log::warn!("decision at depth {depth} lost both children during a rebuild");
                }
            }
        }
    }

    /// Both reset choices of `s` on `a` under `g` are invalid because `s`
    /// models two K-closed paths, one invalid under each reset. Records a
    /// validity guard where the paths first part and schedules a rebuild
    /// there. Returns false when no such pair exists.
    fn separate_upwards(&mut self, s: LangId, a: Action, g: &Guard) -> bool {
        let k = self.k();
        let state = self.tdg.lang[s].word.clone();
        let yes = self.invalid_branches(&state, a, g, true);
        let no = self.invalid_branches(&state, a, g, false);
        let Some((p, q)) = yes
            .iter()
            .flat_map(|x| no.iter().map(move |y| (x.0, y.0)))
            .find(|(p, q)| p != q)
        else {
            return false;
        };
        let (kp, kq) = (self.tog.k_closed(p), self.tog.k_closed(q));
        let Some(i) = (0..kp.steps.len()).find(|&i| kp.steps[i].0 != kq.steps[i].0) else {
            return false;
        };
        let (z1, z2) = (&kp.steps[i].0, &kq.steps[i].0);
        let Some(border) = common_borders(z1, z2, k)
            .into_iter()
            .next()
            .or_else(|| fallback_border(z1, z2, k))
        else {
            return false;
        };
        let anc = self.tdg.ancestor_at(s, i);
        let (guard, action, _) = state.letters[i].clone();
        let vg = ValidityGuard {
            state: self.tdg.lang[anc].word.clone(),
            action,
            guard,
            border,
        };
        if self.ledger.validity.contains(&vg) {
            return false;
        }
        log::debug!("validity guard pushed up to depth {i}");
        self.ledger.validity.push(vg);
        self.schedule_rebuild(anc);
        true
    }

    /// Applies scheduled rebuilds and pending updates until none remain.
    /// Returns false when the round limit was hit.
    pub fn drain_rebuilds(&mut self) -> bool {
        for _ in 0..MAX_REBUILD_ROUNDS {
            self.flush();
            let queue = self.take_rebuilds();
            if queue.is_empty() {
                return true;
            }
            for s in queue {
                self.rebuild(s);
            }
        }
        log::warn!("rebuild rounds exhausted");
        false
    }

    /// Handles a language state holding both verdicts: builds an adjacent
    /// pair from two of its observations and schedules a rebuild at the
    /// depth of the earliest consistency guard.
    pub fn resolve_inconsistency(&mut self, s: LangId) -> Resolution {
        let state = self.tdg.lang[s].word.clone();
        let n = state.len();
        let ending = |o: bool| {
            self.obs()
                .iter()
                .filter(|(w, v)| **v == o && w.len() == n && satisfies(w, &state, self.clocks()).is_some())
                .map(|(w, _)| w)
                .min_by(|a, b| a.cmp(b))
                .cloned()
        };
        let (Some(plus), Some(minus)) = (ending(true), ending(false)) else {
            return Resolution::Unresolved;
        };
        let resets = state.resets();
        let pair = match adjpair(self, &plus, &minus, &resets) {
            Ok(p) => p,
            Err(e) => {
                log::warn!("adjacent pair failed: {e}");
                return Resolution::Unresolved;
            }
        };
        let guards = pair.consistency_guards(self.k());
        if guards.is_empty() {
            self.flush();
            return Resolution::Invalid;
        }
        if self.ledger.pairs.contains(&pair) {
            return Resolution::Unresolved;
        }
        self.ledger.pairs.push(pair);
        let depth = guards.iter().map(|g| g.depth).min().unwrap();
        if !self.tdg.lang[s].alive {
            return Resolution::Unresolved;
        }
        let anc = self.tdg.ancestor_at(s, depth);
        self.schedule_rebuild(anc);
        Resolution::Scheduled(anc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::obs::Tdg;
    use crate::rera::samples;
    use crate::teacher::SimulatedTeacher;
    use crate::timed::{Rel, TimedWord};

    fn word(obs: &ObservationStructure<'_>, s: &str) -> TimedWord {
        TimedWord::parse(s, obs.alphabet()).unwrap()
    }

    fn x(atoms: &[(Rel, u32)]) -> Guard {
        Guard::from_atoms(1, atoms.iter().map(|&(r, k)| (0, r, k))).unwrap()
    }

    fn guards_at(obs: &ObservationStructure<'_>, s: LangId) -> Vec<Guard> {
        obs.tdg.lang[s].children.iter().map(|&d| obs.tdg.dec[d].guard.clone()).collect()
    }

    #[test]
    fn separated_invalidities_split_the_first_guard() {
        let teacher = SimulatedTeacher::new(samples::reset_split());
        let mut obs = ObservationStructure::new(&teacher, 4);
        for w in ["1.7:a 1:a", "1.7:a 1.1:a", "2.9:a 1.1:a", "2.7:a 1.1:a"] {
            obs.request(&word(&obs, w));
        }
        obs.flush();
        let cells = obs.findguard(Tdg::ROOT, Action(0), &Guard::top(1));
        assert_eq!(cells, vec![x(&[(Rel::Le, 2)]), x(&[(Rel::Gt, 2)])]);
        assert_eq!(obs.ledger.validity.len(), 1);
    }

    #[test]
    fn rebuild_after_separated_invalidities() {
        let teacher = SimulatedTeacher::new(samples::reset_split());
        let mut obs = ObservationStructure::new(&teacher, 4);
        for w in ["1.7:a 1:a", "1.7:a 1.1:a", "2.9:a 1.1:a", "2.7:a 1.1:a"] {
            obs.request(&word(&obs, w));
        }
        assert!(obs.drain_rebuilds());
        assert_eq!(guards_at(&obs, Tdg::ROOT), vec![x(&[(Rel::Le, 2)]), x(&[(Rel::Gt, 2)])]);
        let d = obs.tdg.lang[Tdg::ROOT].children[0];
        assert!(obs.tdg.dec[d].child[1].is_some() && obs.tdg.dec[d].child[0].is_none());
        let d = obs.tdg.lang[Tdg::ROOT].children[1];
        assert!(obs.tdg.dec[d].child[0].is_some() && obs.tdg.dec[d].child[1].is_none());
        assert!(obs.audit().is_empty(), "{:?}", obs.audit());
        assert!(obs.check_pruning().is_empty());
    }

    #[test]
    fn inconsistency_splits_the_window_guard() {
        let teacher = SimulatedTeacher::new(samples::reset_then_window());
        let mut obs = ObservationStructure::new(&teacher, 1);
        obs.request(&word(&obs, "0.7:a 0.9:a"));
        obs.request(&word(&obs, "0.7:a 1.2:a"));
        obs.flush();
        let bad = obs.inconsistent_states();
        assert_eq!(bad.len(), 2);
        let s = bad[0];
        let after_reset = obs.tdg.ancestor_at(s, 1);
        assert_eq!(obs.resolve_inconsistency(s), Resolution::Scheduled(after_reset));
        assert!(obs.drain_rebuilds());
        assert!(obs.tdg.lang[after_reset].alive);
        assert_eq!(obs.tdg.lang[after_reset].word.resets(), vec![true]);
        assert_eq!(guards_at(&obs, after_reset), vec![x(&[(Rel::Le, 1)]), x(&[(Rel::Gt, 1)])]);
        assert!(obs.inconsistent_states().is_empty());
        assert!(obs.audit().is_empty(), "{:?}", obs.audit());
    }
}
