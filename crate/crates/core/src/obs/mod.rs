//! The observation structure: the observation map, the timed decision graph
//! (TDG) holding the hypothesis skeleton and the timed observation graph
//! (TOG) abstracting observations by K-class.

pub mod audit;
pub mod dot;
pub mod tdg;
pub mod tog;

use std::collections::VecDeque;
use std::fmt;

use indexmap::IndexMap;

use crate::refine::Ledger;
use crate::teacher::Teacher;
use crate::timed::{Alphabet, GuardedWordWithResets, TimedWord, WordError};

pub use tdg::{DecId, DecState, LangId, LangState, Tdg};
pub use tog::{ObsDec, ObsDecId, ObsId, ObsState, Tog};

/// Reset choices in the order children are created and visited.
pub const RESETS: [bool; 2] = [true, false];

/// A subset of `{accept, reject}`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Labels {
    accept: bool,
    reject: bool,
}

impl Labels {
    pub fn of(o: bool) -> Self {
        let mut l = Labels::default();
        l.insert(o);
        l
    }

    /// Adds `o`; returns whether the set grew.
    pub fn insert(&mut self, o: bool) -> bool {
        let slot = if o { &mut self.accept } else { &mut self.reject };
        let grew = !*slot;
        *slot = true;
        grew
    }

    pub fn contains(&self, o: bool) -> bool {
        if o {
            self.accept
        } else {
            self.reject
        }
    }

    pub fn len(&self) -> usize {
        self.accept as usize + self.reject as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The label when exactly one is present.
    pub fn single(&self) -> Option<bool> {
        match (self.accept, self.reject) {
            (true, false) => Some(true),
            (false, true) => Some(false),
            _ => None,
        }
    }
}

impl fmt::Display for Labels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match (self.accept, self.reject) {
            (true, true) => "±",
            (true, false) => "+",
            (false, true) => "-",
            (false, false) => "{}",
        })
    }
}

/// What the learner was doing when a query was issued.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Observe,
    Extend,
    Adjpair,
    Invalguard,
    Rebuild,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Observe => "observe",
            Phase::Extend => "extend",
            Phase::Adjpair => "adjpair",
            Phase::Invalguard => "invalguard",
            Phase::Rebuild => "rebuild",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub phase: Phase,
    pub word: TimedWord,
    pub label: bool,
    /// False when the answer came from the observation map.
    pub fresh: bool,
    /// Bumped on every phase change, so one routine call shares a number.
    pub episode: usize,
}

/// A pruning request raised by the TOG: the concrete word and resets of the
/// topmost state that became invalid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PruneEvent {
    pub word: TimedWord,
    pub resets: Vec<bool>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StructureStats {
    pub language_states: usize,
    pub decision_states: usize,
    pub observation_states: usize,
    pub invalid_states: usize,
    pub observations: usize,
    pub prunes: usize,
    pub rebuilds: usize,
}

impl fmt::Display for StructureStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "observations={} tdg_language={} tdg_decision={} tog_states={} tog_invalid={} prunes={} rebuilds={}",
            self.observations,
            self.language_states,
            self.decision_states,
            self.observation_states,
            self.invalid_states,
            self.prunes,
            self.rebuilds
        )
    }
}

/// Hook run after every pruning, used by soundness checks.
pub type PruneHook = Box<dyn FnMut(&ObservationStructure<'_>, &PruneEvent)>;

pub struct ObservationStructure<'t> {
    teacher: &'t dyn Teacher,
    alphabet: Alphabet,
    k: u32,
    obs: IndexMap<TimedWord, bool>,
    pub tdg: Tdg,
    pub tog: Tog,
    pub ledger: Ledger,
    pending_tog: VecDeque<usize>,
    pending_tdg: VecDeque<usize>,
    pending_prunes: VecDeque<PruneEvent>,
    rebuild_queue: Vec<LangId>,
    in_tog: bool,
    phase: Phase,
    trace: Option<Vec<TraceEntry>>,
    prune_hook: Option<PruneHook>,
    prunes: usize,
    pub(crate) rebuilds: usize,
    episode: usize,
}

impl<'t> ObservationStructure<'t> {
    pub fn new(teacher: &'t dyn Teacher, k: u32) -> Self {
        let alphabet = teacher.alphabet().clone();
        let clocks = alphabet.len();
        ObservationStructure {
            teacher,
            alphabet,
            k,
            obs: IndexMap::new(),
            tdg: Tdg::new(clocks),
            tog: Tog::new(clocks),
            ledger: Ledger::default(),
            pending_tog: VecDeque::new(),
            pending_tdg: VecDeque::new(),
            pending_prunes: VecDeque::new(),
            rebuild_queue: Vec::new(),
            in_tog: false,
            phase: Phase::Observe,
            trace: None,
            prune_hook: None,
            prunes: 0,
            rebuilds: 0,
            episode: 0,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn clocks(&self) -> usize {
        self.alphabet.len()
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn teacher(&self) -> &'t dyn Teacher {
        self.teacher
    }

    pub fn obs(&self) -> &IndexMap<TimedWord, bool> {
        &self.obs
    }

    pub fn word(&self, id: usize) -> (&TimedWord, bool) {
        let (w, o) = self.obs.get_index(id).expect("observation id");
        (w, *o)
    }

    pub fn set_phase(&mut self, phase: Phase) -> Phase {
        if phase != self.phase {
            self.episode += 1;
        }
        std::mem::replace(&mut self.phase, phase)
    }

    pub fn enable_trace(&mut self) {
        self.trace.get_or_insert_with(Vec::new);
    }

    pub fn trace(&self) -> &[TraceEntry] {
        self.trace.as_deref().unwrap_or(&[])
    }

    pub fn set_prune_hook(&mut self, hook: PruneHook) {
        self.prune_hook = Some(hook);
    }

    pub fn rebuild_queue(&self) -> &[LangId] {
        &self.rebuild_queue
    }

    pub fn is_settled(&self) -> bool {
        self.pending_tdg.is_empty() && self.pending_prunes.is_empty() && self.pending_tog.is_empty()
    }

    pub fn pending_words(&self) -> impl Iterator<Item = usize> + '_ {
        self.pending_tdg.iter().copied()
    }

    pub fn stats(&self) -> StructureStats {
        StructureStats {
            language_states: self.tdg.lang.iter().filter(|s| s.alive).count(),
            decision_states: self.tdg.dec.iter().filter(|d| d.alive).count(),
            observation_states: self.tog.states.len(),
            invalid_states: self.tog.states.iter().filter(|s| s.invalid).count(),
            observations: self.obs.len(),
            prunes: self.prunes,
            rebuilds: self.rebuilds,
        }
    }

    /// The observation of `w`, querying the teacher on a miss. Fresh words
    /// enter the TOG immediately and the TDG at the next [`flush`].
    ///
    /// [`flush`]: ObservationStructure::flush
    pub fn request(&mut self, w: &TimedWord) -> bool {
        if let Some(&o) = self.obs.get(w) {
            if let Some(t) = &mut self.trace {
                t.push(TraceEntry {
                    phase: self.phase,
                    word: w.clone(),
                    label: o,
                    fresh: false,
                    episode: self.episode,
                });
            }
            return o;
        }
        let o = self
            .teacher
            .membership(w)
            .expect("learner words are built over the teacher's alphabet");
        log::trace!("{} {} {}", self.phase, w.display(&self.alphabet), if o { "+" } else { "-" });
        if let Some(t) = &mut self.trace {
            t.push(TraceEntry {
                phase: self.phase,
                word: w.clone(),
                label: o,
                fresh: true,
                episode: self.episode,
            });
        }
        let (id, _) = self.obs.insert_full(w.clone(), o);
        self.pending_tog.push_back(id);
        self.pending_tdg.push_back(id);
        if !self.in_tog {
            self.in_tog = true;
            while let Some(id) = self.pending_tog.pop_front() {
                self.findpath_tog(id);
            }
            self.in_tog = false;
        }
        o
    }

    /// Label of a guarded word: an observation found by a TOG dive, or a
    /// membership query on a synthesized witness.
    pub fn request_guarded(&mut self, w_gr: &GuardedWordWithResets) -> Result<bool, WordError> {
        w_gr.zone_word(self.clocks())?;
        if let Some(id) = self.tog_witness(w_gr) {
            return Ok(self.word(id).1);
        }
        let w = w_gr.witness(self.clocks()).ok_or(WordError::Unsatisfiable(w_gr.len()))?;
        Ok(self.request(&w))
    }

    /// Propagates pending observations into the TDG without pruning.
    #[cfg(test)]
    pub(crate) fn flush_words(&mut self) {
        while let Some(id) = self.pending_tdg.pop_front() {
            self.findpath_tdg(id);
        }
    }

    /// Propagates pending observations into the TDG and applies pending
    /// prunes until both queues are empty.
    pub fn flush(&mut self) {
        loop {
            if let Some(id) = self.pending_tdg.pop_front() {
                self.findpath_tdg(id);
            } else if let Some(event) = self.pending_prunes.pop_front() {
                self.searchprune(&event);
                self.prunes += 1;
                if let Some(mut hook) = self.prune_hook.take() {
                    hook(self, &event);
                    self.prune_hook = Some(hook);
                }
            } else {
                break;
            }
        }
    }

    pub(crate) fn schedule_rebuild(&mut self, s: LangId) {
        if !self.rebuild_queue.contains(&s) {
            log::debug!("rebuild scheduled at depth {}", self.tdg.lang[s].depth);
            self.rebuild_queue.push(s);
        }
    }

    /// Removes and returns the rebuild queue, keeping only live states that
    /// have no scheduled ancestor.
    pub(crate) fn take_rebuilds(&mut self) -> Vec<LangId> {
        let queue = std::mem::take(&mut self.rebuild_queue);
        let live: Vec<LangId> = queue.iter().copied().filter(|&s| self.tdg.lang[s].alive).collect();
        let mut out: Vec<LangId> = live
            .iter()
            .copied()
            .filter(|&s| !self.tdg.ancestors(s).any(|a| a != s && live.contains(&a)))
            .collect();
        out.sort_by_key(|&s| (self.tdg.lang[s].depth, s));
        out.dedup();
        out
    }

    /// Language states whose label set holds both verdicts.
    pub fn inconsistent_states(&self) -> Vec<LangId> {
        (0..self.tdg.lang.len())
            .filter(|&s| self.tdg.lang[s].alive && self.tdg.lang[s].labels.len() == 2)
            .collect()
    }
}

#[cfg(test)]
mod tests;
