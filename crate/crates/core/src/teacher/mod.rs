//! The oracle side of active learning: membership and equivalence queries
//! answered by a hidden automaton.

pub mod protocol;

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use thiserror::Error;

use crate::rera::{equivalent, EquivError, Equivalence, Rera};
use crate::timed::{Alphabet, TimedWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TeacherError {
    #[error("word uses an action outside the teacher's alphabet")]
    ForeignAction,
    #[error("hypothesis alphabet differs from the teacher's")]
    AlphabetMismatch,
    #[error("equivalence check failed: {0}")]
    Equivalence(EquivError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TeacherStats {
    pub membership_count: u64,
    pub equivalence_count: u64,
    pub distinct_membership_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivalenceAnswer {
    Yes,
    /// A separating word and the teacher's verdict on it.
    Counterexample { word: TimedWord, accepted: bool },
}

pub trait Teacher {
    fn alphabet(&self) -> &Alphabet;
    fn membership(&self, w: &TimedWord) -> Result<bool, TeacherError>;
    fn equivalence(&self, hypothesis: &Rera) -> Result<EquivalenceAnswer, TeacherError>;
    fn stats(&self) -> TeacherStats;
}

/// A teacher backed by a known automaton.
///
/// Membership answers are memoized, so concurrent callers only pay for the
/// simulation once per distinct word. Equivalence checks are serialized.
#[derive(Debug)]
pub struct SimulatedTeacher {
    target: Rera,
    memo: Mutex<HashMap<TimedWord, bool>>,
    equivalence_lock: Mutex<()>,
    membership_count: AtomicU64,
    equivalence_count: AtomicU64,
}

impl SimulatedTeacher {
    pub fn new(target: Rera) -> Self {
        SimulatedTeacher {
            target,
            memo: Mutex::new(HashMap::new()),
            equivalence_lock: Mutex::new(()),
            membership_count: AtomicU64::new(0),
            equivalence_count: AtomicU64::new(0),
        }
    }

    pub fn target(&self) -> &Rera {
        &self.target
    }
}

impl Teacher for SimulatedTeacher {
    fn alphabet(&self) -> &Alphabet {
        &self.target.alphabet
    }

    fn membership(&self, w: &TimedWord) -> Result<bool, TeacherError> {
        if w.letters().iter().any(|(_, a)| !self.target.alphabet.contains(*a)) {
            return Err(TeacherError::ForeignAction);
        }
        self.membership_count.fetch_add(1, Ordering::Relaxed);
        let mut memo = self.memo.lock().unwrap();
        if let Some(&o) = memo.get(w) {
            return Ok(o);
        }
        let o = self.target.accepts(w);
        memo.insert(w.clone(), o);
        Ok(o)
    }

    fn equivalence(&self, hypothesis: &Rera) -> Result<EquivalenceAnswer, TeacherError> {
        let _guard = self.equivalence_lock.lock().unwrap();
        if hypothesis.alphabet != self.target.alphabet {
            return Err(TeacherError::AlphabetMismatch);
        }
        self.equivalence_count.fetch_add(1, Ordering::Relaxed);
        match equivalent(&self.target, hypothesis).map_err(TeacherError::Equivalence)? {
            Equivalence::Equivalent => Ok(EquivalenceAnswer::Yes),
            Equivalence::Counterexample { word, in_a, .. } => Ok(EquivalenceAnswer::Counterexample {
                word,
                accepted: in_a,
            }),
        }
    }

    fn stats(&self) -> TeacherStats {
        TeacherStats {
            membership_count: self.membership_count.load(Ordering::Relaxed),
            equivalence_count: self.equivalence_count.load(Ordering::Relaxed),
            distinct_membership_count: self.memo.lock().unwrap().len() as u64,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rera::samples;
    use crate::timed::{Action, Guard, Rel};

    fn window() -> SimulatedTeacher {
        SimulatedTeacher::new(samples::reset_then_window())
    }

    fn word(t: &SimulatedTeacher, s: &str) -> TimedWord {
        TimedWord::parse(s, t.alphabet()).unwrap()
    }

    #[test]
    fn membership_examples() {
        let t = window();
        assert_eq!(t.membership(&word(&t, "0.7:a 0.9:a")), Ok(true));
        assert_eq!(t.membership(&word(&t, "0.7:a 1.2:a")), Ok(false));
        assert_eq!(t.membership(&TimedWord::empty()), Ok(false));
        let foreign = TimedWord::new(vec![(crate::timed::rational::int(0), Action(3))]).unwrap();
        assert_eq!(t.membership(&foreign), Err(TeacherError::ForeignAction));
    }

    #[test]
    fn memoized_counts() {
        let t = window();
        let w = word(&t, "0.5:a 0.5:a");
        for _ in 0..3 {
            assert_eq!(t.membership(&w), Ok(true));
        }
        t.membership(&word(&t, "0.5:a")).unwrap();
        let s = t.stats();
        assert_eq!(s.membership_count, 4);
        assert_eq!(s.distinct_membership_count, 2);
        assert_eq!(s.equivalence_count, 0);
    }

    #[test]
    fn equivalence_examples() {
        let t = window();
        assert_eq!(t.equivalence(t.target()), Ok(EquivalenceAnswer::Yes));

        let mut empty = t.target().clone();
        empty.accepting.clear();
        match t.equivalence(&empty).unwrap() {
            EquivalenceAnswer::Counterexample { word, accepted } => {
                assert!(accepted);
                assert!(t.target().accepts(&word) && !empty.accepts(&word));
            }
            EquivalenceAnswer::Yes => panic!("languages differ"),
        }

        let mut wide = t.target().clone();
        wide.transitions[1].guard = Guard::atom(1, 0, Rel::Le, 2).unwrap();
        wide.max_constant = 2;
        match t.equivalence(&wide).unwrap() {
            EquivalenceAnswer::Counterexample { word, accepted } => {
                assert!(!accepted);
                assert!(wide.accepts(&word));
            }
            EquivalenceAnswer::Yes => panic!("languages differ"),
        }
        assert_eq!(t.stats().equivalence_count, 3);

        let other = samples::reset_on_b();
        assert_eq!(t.equivalence(&other), Err(TeacherError::AlphabetMismatch));
    }

    #[test]
    fn concurrent_membership_is_functional() {
        let t = window();
        let words: Vec<TimedWord> = (0..20).map(|i| word(&t, &format!("0.5:a {}/10:a", i))).collect();
        let answers: Vec<Vec<bool>> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..4)
                .map(|_| s.spawn(|| words.iter().map(|w| t.membership(w).unwrap()).collect()))
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        assert!(answers.windows(2).all(|p| p[0] == p[1]));
        assert_eq!(t.stats().distinct_membership_count, 20);
        assert_eq!(t.stats().membership_count, 80);
    }
}
