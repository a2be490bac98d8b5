use std::collections::BTreeSet;
use std::fmt;

use crate::timed::{Action, Alphabet, ClockValuation, Guard, TimedWord};

/// An edge `source --action, guard, resets--> target`.
///
/// `resets` is a set of clocks so that files resetting a foreign clock can
/// be represented and rejected by [`Rera::validate`]; valid automata reset
/// either nothing or the clock of their own action.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transition {
    pub source: usize,
    pub action: Action,
    pub guard: Guard,
    pub resets: Vec<usize>,
    pub target: usize,
}

impl Transition {
    pub fn new(source: usize, action: Action, guard: Guard, reset: bool, target: usize) -> Self {
        Transition {
            source,
            action,
            guard,
            resets: if reset { vec![action.clock()] } else { Vec::new() },
            target,
        }
    }

    pub fn resets_own_clock(&self) -> bool {
        self.resets.contains(&self.action.clock())
    }
}

/// A reset-free event-recording automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rera {
    pub alphabet: Alphabet,
    pub locations: Vec<String>,
    pub initial: usize,
    pub accepting: BTreeSet<usize>,
    pub transitions: Vec<Transition>,
    pub max_constant: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UnknownLocation { transition: usize },
    UnknownAction { transition: usize },
    GuardArity { transition: usize },
    ForeignReset { transition: usize },
    ConstantAboveK { transition: usize, constant: u32 },
    Nondeterministic { first: usize, second: usize },
    BadInitial,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownLocation { transition } => {
                write!(f, "transition {transition}: unknown location")
            }
            Violation::UnknownAction { transition } => write!(f, "transition {transition}: unknown action"),
            Violation::GuardArity { transition } => {
                write!(f, "transition {transition}: guard over the wrong clock set")
            }
            Violation::ForeignReset { transition } => {
                write!(f, "transition {transition}: resets a clock other than its own")
            }
            Violation::ConstantAboveK { transition, constant } => {
                write!(f, "transition {transition}: constant {constant} exceeds max_constant")
            }
            Violation::Nondeterministic { first, second } => {
                write!(f, "transitions {first} and {second} overlap")
            }
            Violation::BadInitial => f.write_str("initial location out of range"),
        }
    }
}

/// Outcome of running a timed word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Simulation {
    pub accepted: bool,
    /// Locations visited, starting with the initial one.
    pub path: Vec<usize>,
    /// Indices of the transitions taken.
    pub transitions: Vec<usize>,
    /// Letter index at which no transition was enabled.
    pub blocked_at: Option<usize>,
}

impl Rera {
    pub fn clocks(&self) -> usize {
        self.alphabet.len()
    }

    pub fn location(&self, name: &str) -> Option<usize> {
        self.locations.iter().position(|l| l == name)
    }

    pub fn is_accepting(&self, loc: usize) -> bool {
        self.accepting.contains(&loc)
    }

    pub fn outgoing(&self, loc: usize, a: Action) -> impl Iterator<Item = (usize, &Transition)> {
        self.transitions
            .iter()
            .enumerate()
            .filter(move |(_, t)| t.source == loc && t.action == a)
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.locations.len();
        if self.initial >= n {
            out.push(Violation::BadInitial);
        }
        for (i, t) in self.transitions.iter().enumerate() {
            if t.source >= n || t.target >= n {
                out.push(Violation::UnknownLocation { transition: i });
            }
            if !self.alphabet.contains(t.action) {
                out.push(Violation::UnknownAction { transition: i });
                continue;
            }
            if t.guard.clocks() != self.clocks() {
                out.push(Violation::GuardArity { transition: i });
                continue;
            }
            if t.resets.iter().any(|&c| c != t.action.clock()) {
                out.push(Violation::ForeignReset { transition: i });
            }
            let k = t.guard.max_constant();
            if k > self.max_constant {
                out.push(Violation::ConstantAboveK {
                    transition: i,
                    constant: k,
                });
            }
        }
        for (i, t) in self.transitions.iter().enumerate() {
            for (j, u) in self.transitions.iter().enumerate().skip(i + 1) {
                if t.source == u.source
                    && t.action == u.action
                    && t.guard.clocks() == u.guard.clocks()
                    && t.guard.intersects(&u.guard)
                {
                    out.push(Violation::Nondeterministic { first: i, second: j });
                }
            }
        }
        out
    }

    /// Runs `w` from the initial configuration. A letter without an enabled
    /// transition blocks the run, which then rejects.
    pub fn simulate(&self, w: &TimedWord) -> Simulation {
        let mut loc = self.initial;
        let mut v = ClockValuation::zero(self.clocks());
        let mut path = vec![loc];
        let mut taken = Vec::with_capacity(w.len());
        for (i, (t, a)) in w.letters().iter().enumerate() {
            let at = v.elapsed(t);
            let mut enabled = self.outgoing(loc, *a).filter(|(_, tr)| tr.guard.contains(&at));
            let Some((idx, tr)) = enabled.next() else {
                return Simulation {
                    accepted: false,
                    path,
                    transitions: taken,
                    blocked_at: Some(i),
                };
            };
            debug_assert!(enabled.next().is_none(), "nondeterministic step at letter {i}");
            v = at;
            for &c in &tr.resets {
                v = v.reset_one(c);
            }
            loc = tr.target;
            path.push(loc);
            taken.push(idx);
        }
        Simulation {
            accepted: self.is_accepting(loc),
            path,
            transitions: taken,
            blocked_at: None,
        }
    }

    pub fn accepts(&self, w: &TimedWord) -> bool {
        self.simulate(w).accepted
    }

    /// Adds a rejecting sink reached from every uncovered part of every
    /// `(location, action)` guard partition. Returns `self` unchanged when
    /// nothing is uncovered.
    pub fn complete(&self) -> Rera {
        let n = self.clocks();
        let mut extra = Vec::new();
        for loc in 0..self.locations.len() {
            for a in self.alphabet.actions() {
                let mut rest = vec![Guard::top(n)];
                for (_, t) in self.outgoing(loc, a) {
                    rest = rest.iter().flat_map(|p| p.subtract(&t.guard)).collect();
                }
                for g in rest {
                    extra.push((loc, a, g));
                }
            }
        }
        if extra.is_empty() {
            return self.clone();
        }
        let mut out = self.clone();
        let sink = out.locations.len();
        let mut name = "sink".to_string();
        while out.locations.contains(&name) {
            name.push('_');
        }
        out.locations.push(name);
        for (loc, a, g) in extra {
            out.transitions.push(Transition::new(loc, a, g, false, sink));
        }
        for a in self.alphabet.actions() {
            out.transitions.push(Transition::new(sink, a, Guard::top(n), false, sink));
        }
        out
    }
}
