//! Guard inference: adjacent pairs and their differences, validity guards
//! from separated invalidities, and subtree reconstruction.

pub mod adjacent;
pub mod borders;
pub mod rebuild;

use std::fmt;

use crate::timed::{Action, Alphabet, Guard, GuardedWordWithResets, Rel, TimedWordWithResets};

pub use adjacent::{adjpair, diff, is_adjacent, AdjacencyError};
pub use borders::{common_borders, invalguard, InvalguardOutcome};
pub use rebuild::Resolution;

/// Side of an integer boundary on which the second word of a pair lies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    /// The second value is below the integer.
    Ge,
    /// The second value is above the integer.
    Le,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Difference {
    pub index: usize,
    pub clock: usize,
    pub constant: u32,
    pub direction: Direction,
}

/// A guard atom `x <= k` or `x >= k` taken from the earliest difference of
/// an adjacent pair on one clock.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ConsistencyGuard {
    pub depth: usize,
    pub clock: usize,
    pub constant: u32,
    pub direction: Direction,
}

impl ConsistencyGuard {
    /// The atom and its complement.
    pub fn split(&self, clocks: usize) -> (Guard, Guard) {
        let (yes, no) = match self.direction {
            Direction::Le => (Rel::Le, Rel::Gt),
            Direction::Ge => (Rel::Ge, Rel::Lt),
        };
        (
            Guard::atom(clocks, self.clock, yes, self.constant).expect("clock in range"),
            Guard::atom(clocks, self.clock, no, self.constant).expect("clock in range"),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AdjacentPair {
    pub w: TimedWordWithResets,
    pub w2: TimedWordWithResets,
    pub labels: (bool, bool),
}

impl AdjacentPair {
    pub fn diff(&self, k: u32) -> Vec<Difference> {
        diff(&self.w, &self.w2, k).expect("pairs are adjacent by construction")
    }

    /// For each clock, the difference minimal by depth then constant.
    pub fn consistency_guards(&self, k: u32) -> Vec<ConsistencyGuard> {
        consistency_guards(&self.diff(k))
    }
}

pub fn consistency_guards(diff: &[Difference]) -> Vec<ConsistencyGuard> {
    let mut best: Vec<Difference> = Vec::new();
    for d in diff {
        match best.iter_mut().find(|b| b.clock == d.clock) {
            Some(b) => {
                if (d.index, d.constant) < (b.index, b.constant) {
                    *b = *d;
                }
            }
            None => best.push(*d),
        }
    }
    best.sort_by_key(|d| (d.index, d.clock));
    best.into_iter()
        .map(|d| ConsistencyGuard {
            depth: d.index,
            clock: d.clock,
            constant: d.constant,
            direction: d.direction,
        })
        .collect()
}

/// Relation of a common border; `Top` admits both strict and non-strict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BorderRel {
    Lt,
    Le,
    Top,
}

impl fmt::Display for BorderRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BorderRel::Lt => "<",
            BorderRel::Le => "<=",
            BorderRel::Top => "T",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CommonBorder {
    pub clock: usize,
    pub rel: BorderRel,
    pub constant: u32,
}

impl CommonBorder {
    /// The atom added to a guard: `x < k` for a strict border, `x <= k`
    /// otherwise, together with its complement.
    pub fn split(&self, clocks: usize) -> (Guard, Guard) {
        let (yes, no) = match self.rel {
            BorderRel::Lt => (Rel::Lt, Rel::Ge),
            BorderRel::Le | BorderRel::Top => (Rel::Le, Rel::Gt),
        };
        (
            Guard::atom(clocks, self.clock, yes, self.constant).expect("clock in range"),
            Guard::atom(clocks, self.clock, no, self.constant).expect("clock in range"),
        )
    }
}

/// A border separating two invalidities after playing `action` under
/// `guard` from the language state with word `state`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ValidityGuard {
    pub state: GuardedWordWithResets,
    pub action: Action,
    pub guard: Guard,
    pub border: CommonBorder,
}

impl ValidityGuard {
    pub fn display(&self, alphabet: &Alphabet) -> String {
        format!(
            "({}, {}, {}, {}, {}, {})",
            self.state.display(alphabet),
            alphabet.name(self.action),
            self.guard.display(alphabet),
            alphabet.clock_name(self.border.clock),
            self.border.rel,
            self.border.constant
        )
    }
}

/// Every adjacent pair and validity guard the refinement produced. Guards in
/// the TDG are justified by entries of this ledger.
#[derive(Debug, Clone, Default)]
pub struct Ledger {
    pub pairs: Vec<AdjacentPair>,
    pub validity: Vec<ValidityGuard>,
}
