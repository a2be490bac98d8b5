//! Non-diagonal clock constraints kept in a per-clock interval normal form.

use std::cmp::Ordering;
use std::fmt;

use num::BigInt;
use thiserror::Error;

use super::clock::{Alphabet, ClockValuation};
use super::rational::Rational;

/// Comparison operator of an atomic constraint `x ~ k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Rel {
    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Eq => "=",
            Rel::Ge => ">=",
            Rel::Gt => ">",
        }
    }

    pub fn parse(s: &str) -> Option<Rel> {
        Some(match s {
            "<" => Rel::Lt,
            "<=" | "≤" => Rel::Le,
            "=" | "==" => Rel::Eq,
            ">=" | "≥" => Rel::Ge,
            ">" => Rel::Gt,
            _ => return None,
        })
    }
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GuardError {
    #[error("clock index {clock} out of range for {clocks} clocks")]
    ClockOutOfRange { clock: usize, clocks: usize },
}

/// Integer bound of an interval end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bound {
    pub value: u32,
    pub strict: bool,
}

impl Bound {
    pub fn new(value: u32, strict: bool) -> Self {
        Bound { value, strict }
    }
}

/// Values allowed for one clock: at most one lower and one upper bound.
///
/// A missing lower bound means `x >= 0`, a missing upper bound means no
/// upper limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ClockInterval {
    pub lower: Option<Bound>,
    pub upper: Option<Bound>,
}

impl ClockInterval {
    pub const TOP: ClockInterval = ClockInterval {
        lower: None,
        upper: None,
    };

    fn normalized(mut self) -> Self {
        if self.lower == Some(Bound::new(0, false)) {
            self.lower = None;
        }
        self
    }

    fn lower_or_zero(&self) -> Bound {
        self.lower.unwrap_or(Bound::new(0, false))
    }

    pub fn is_empty(&self) -> bool {
        let lo = self.lower_or_zero();
        match self.upper {
            None => false,
            Some(up) => lo.value > up.value || (lo.value == up.value && (lo.strict || up.strict)),
        }
    }

    pub fn is_top(&self) -> bool {
        self.normalized() == ClockInterval::TOP
    }

    pub fn contains(&self, v: &Rational) -> bool {
        let lo = self.lower_or_zero();
        let l = Rational::from_integer(BigInt::from(lo.value));
        let above = if lo.strict { v > &l } else { v >= &l };
        let below = match self.upper {
            None => true,
            Some(up) => {
                let u = Rational::from_integer(BigInt::from(up.value));
                if up.strict {
                    v < &u
                } else {
                    v <= &u
                }
            }
        };
        above && below
    }

    pub fn intersect(&self, other: &ClockInterval) -> ClockInterval {
        let lower = match (self.lower, other.lower) {
            (None, b) | (b, None) => b,
            (Some(a), Some(b)) => Some(match a.value.cmp(&b.value) {
                Ordering::Greater => a,
                Ordering::Less => b,
                Ordering::Equal => Bound::new(a.value, a.strict || b.strict),
            }),
        };
        let upper = match (self.upper, other.upper) {
            (None, b) | (b, None) => b,
            (Some(a), Some(b)) => Some(match a.value.cmp(&b.value) {
                Ordering::Less => a,
                Ordering::Greater => b,
                Ordering::Equal => Bound::new(a.value, a.strict || b.strict),
            }),
        };
        ClockInterval { lower, upper }.normalized()
    }

    /// Pieces of `self` outside `other` (below it, then above it).
    fn subtract(&self, other: &ClockInterval) -> Vec<ClockInterval> {
        let mut out = Vec::new();
        if let Some(lo) = other.lower {
            let below = ClockInterval {
                lower: None,
                upper: Some(Bound::new(lo.value, !lo.strict)),
            };
            let piece = self.intersect(&below);
            if !piece.is_empty() {
                out.push(piece);
            }
        }
        if let Some(up) = other.upper {
            let above = ClockInterval {
                lower: Some(Bound::new(up.value, !up.strict)),
                upper: None,
            };
            let piece = self.intersect(&above);
            if !piece.is_empty() {
                out.push(piece);
            }
        }
        out
    }

    fn atoms(&self) -> Vec<(Rel, u32)> {
        let iv = self.normalized();
        match (iv.lower, iv.upper) {
            (Some(l), Some(u)) if l == u && !l.strict => vec![(Rel::Eq, l.value)],
            (lower, upper) => {
                let mut v = Vec::new();
                if let Some(l) = lower {
                    v.push((if l.strict { Rel::Gt } else { Rel::Ge }, l.value));
                }
                if let Some(u) = upper {
                    v.push((if u.strict { Rel::Lt } else { Rel::Le }, u.value));
                }
                v
            }
        }
    }

    fn atom(rel: Rel, k: u32) -> ClockInterval {
        let b = |strict| Some(Bound::new(k, strict));
        match rel {
            Rel::Lt => ClockInterval { lower: None, upper: b(true) },
            Rel::Le => ClockInterval { lower: None, upper: b(false) },
            Rel::Eq => ClockInterval { lower: b(false), upper: b(false) },
            Rel::Ge => ClockInterval { lower: b(false), upper: None },
            Rel::Gt => ClockInterval { lower: b(true), upper: None },
        }
        .normalized()
    }
}

/// Conjunction of atomic constraints `x ~ k` over the clocks `x_a`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Guard {
    intervals: Vec<ClockInterval>,
    empty: bool,
}

impl Guard {
    pub fn top(clocks: usize) -> Self {
        Guard {
            intervals: vec![ClockInterval::TOP; clocks],
            empty: false,
        }
    }

    pub fn bottom(clocks: usize) -> Self {
        Guard {
            intervals: vec![ClockInterval::TOP; clocks],
            empty: true,
        }
    }

    pub fn atom(clocks: usize, clock: usize, rel: Rel, k: u32) -> Result<Self, GuardError> {
        Self::from_atoms(clocks, [(clock, rel, k)])
    }

    pub fn from_atoms(
        clocks: usize,
        atoms: impl IntoIterator<Item = (usize, Rel, u32)>,
    ) -> Result<Self, GuardError> {
        let mut g = Guard::top(clocks);
        for (clock, rel, k) in atoms {
            if clock >= clocks {
                return Err(GuardError::ClockOutOfRange { clock, clocks });
            }
            g.intervals[clock] = g.intervals[clock].intersect(&ClockInterval::atom(rel, k));
        }
        Ok(g.canonical())
    }

    pub fn from_intervals(intervals: Vec<ClockInterval>) -> Self {
        Guard {
            intervals: intervals.into_iter().map(ClockInterval::normalized).collect(),
            empty: false,
        }
        .canonical()
    }

    fn canonical(self) -> Self {
        if self.empty || self.intervals.iter().any(ClockInterval::is_empty) {
            Guard::bottom(self.intervals.len())
        } else {
            self
        }
    }

    pub fn clocks(&self) -> usize {
        self.intervals.len()
    }

    pub fn interval(&self, clock: usize) -> &ClockInterval {
        &self.intervals[clock]
    }

    pub fn intervals(&self) -> &[ClockInterval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    pub fn is_top(&self) -> bool {
        !self.empty && self.intervals.iter().all(ClockInterval::is_top)
    }

    pub fn and(&self, other: &Guard) -> Guard {
        if self.empty || other.empty {
            return Guard::bottom(self.clocks());
        }
        Guard {
            intervals: self
                .intervals
                .iter()
                .zip(&other.intervals)
                .map(|(a, b)| a.intersect(b))
                .collect(),
            empty: false,
        }
        .canonical()
    }

    pub fn intersects(&self, other: &Guard) -> bool {
        !self.and(other).is_empty()
    }

    pub fn contains(&self, v: &ClockValuation) -> bool {
        !self.empty
            && self
                .intervals
                .iter()
                .enumerate()
                .all(|(c, iv)| iv.contains(v.get(c)))
    }

    /// `self` minus `other` as a list of pairwise disjoint guards.
    pub fn subtract(&self, other: &Guard) -> Vec<Guard> {
        if self.empty {
            return Vec::new();
        }
        if !self.intersects(other) {
            return vec![self.clone()];
        }
        let mut out = Vec::new();
        let mut cur = self.intervals.clone();
        for c in 0..cur.len() {
            for piece in cur[c].subtract(&other.intervals[c]) {
                let mut g = cur.clone();
                g[c] = piece;
                out.push(Guard::from_intervals(g));
            }
            cur[c] = cur[c].intersect(&other.intervals[c]);
        }
        out
    }

    /// Complement of `self` within `true`, as disjoint guards.
    pub fn complement(&self) -> Vec<Guard> {
        Guard::top(self.clocks()).subtract(self)
    }

    pub fn is_subset_of(&self, other: &Guard) -> bool {
        self.empty || self.subtract(other).is_empty()
    }

    pub fn atoms(&self) -> Vec<(usize, Rel, u32)> {
        self.intervals
            .iter()
            .enumerate()
            .flat_map(|(c, iv)| iv.atoms().into_iter().map(move |(r, k)| (c, r, k)))
            .collect()
    }

    pub fn max_constant(&self) -> u32 {
        self.atoms().iter().map(|&(_, _, k)| k).max().unwrap_or(0)
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> GuardDisplay<'a> {
        GuardDisplay {
            guard: self,
            alphabet,
        }
    }
}

pub struct GuardDisplay<'a> {
    guard: &'a Guard,
    alphabet: &'a Alphabet,
}

impl fmt::Display for GuardDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.guard.is_empty() {
            return f.write_str("false");
        }
        let atoms = self.guard.atoms();
        if atoms.is_empty() {
            return f.write_str("true");
        }
        for (i, (c, rel, k)) in atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{}{}{}", self.alphabet.clock_name(*c), rel, k)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timed::rational::{int, ratio};

    fn v(xs: &[(i64, i64)]) -> ClockValuation {
        ClockValuation::from_values(xs.iter().map(|&(p, q)| ratio(p, q)).collect())
    }

    #[test]
    fn normal_form_merges_atoms() {
        let g = Guard::from_atoms(2, [(0, Rel::Le, 3), (0, Rel::Le, 2), (0, Rel::Gt, 1)]).unwrap();
        assert_eq!(g.atoms(), vec![(0, Rel::Gt, 1), (0, Rel::Le, 2)]);
        let e = Guard::from_atoms(1, [(0, Rel::Ge, 2), (0, Rel::Le, 2)]).unwrap();
        assert_eq!(e.atoms(), vec![(0, Rel::Eq, 2)]);
        let empty = Guard::from_atoms(1, [(0, Rel::Gt, 2), (0, Rel::Le, 2)]).unwrap();
        assert!(empty.is_empty());
        assert_eq!(empty, Guard::bottom(1));
    }

    #[test]
    fn membership() {
        let g = Guard::from_atoms(2, [(1, Rel::Gt, 1), (0, Rel::Lt, 1)]).unwrap();
        assert!(g.contains(&v(&[(1, 2), (3, 2)])));
        assert!(!g.contains(&v(&[(1, 1), (3, 2)])));
        assert!(!g.contains(&v(&[(1, 2), (1, 1)])));
        assert!(Guard::top(2).contains(&v(&[(0, 1), (0, 1)])));
    }

    #[test]
    fn subtract_partitions() {
        let top = Guard::top(2);
        let g = Guard::from_atoms(2, [(0, Rel::Le, 2), (1, Rel::Gt, 3)]).unwrap();
        let rest = top.subtract(&g);
        for (i, a) in rest.iter().enumerate() {
            assert!(!a.intersects(&g));
            for b in &rest[i + 1..] {
                assert!(!a.intersects(b));
            }
        }
        // sample points on a grid: each lies in exactly one piece
        for x in 0..12 {
            for y in 0..12 {
                let val = ClockValuation::from_values(vec![ratio(x, 2), ratio(y, 2)]);
                let hits = rest.iter().filter(|p| p.contains(&val)).count()
                    + usize::from(g.contains(&val));
                assert_eq!(hits, 1, "point ({x}/2,{y}/2)");
            }
        }
    }

    #[test]
    fn subset_and_display() {
        let sigma = Alphabet::new(["a", "b"]).unwrap();
        let g = Guard::from_atoms(2, [(0, Rel::Gt, 1), (1, Rel::Le, 2)]).unwrap();
        assert_eq!(g.display(&sigma).to_string(), "x_a>1 & x_b<=2");
        assert_eq!(Guard::top(2).display(&sigma).to_string(), "true");
        assert!(g.is_subset_of(&Guard::top(2)));
        assert!(!Guard::top(2).is_subset_of(&g));
        assert_eq!(g.max_constant(), 2);
        let _ = int(0);
    }
}
