//! Difference-bound matrices over the clocks `x_a`.
//!
//! Index 0 is the constant-zero reference; clock `c` lives at index `c + 1`.
//! Entry `(i, j)` bounds `x_i - x_j`.

use std::cmp::Ordering;
use std::fmt;

use num::{BigInt, Zero};

use super::clock::{Alphabet, ClockValuation};
use super::guard::Guard;
use super::rational::Rational;

/// `x_i - x_j < c` or `<= c`, or no bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DbmBound {
    Finite { c: i64, strict: bool },
    Inf,
}

impl DbmBound {
    pub const LE_ZERO: DbmBound = DbmBound::Finite { c: 0, strict: false };

    pub fn le(c: i64) -> Self {
        DbmBound::Finite { c, strict: false }
    }

    pub fn lt(c: i64) -> Self {
        DbmBound::Finite { c, strict: true }
    }

    fn add(self, other: DbmBound) -> DbmBound {
        match (self, other) {
            (DbmBound::Finite { c: a, strict: s }, DbmBound::Finite { c: b, strict: t }) => {
                DbmBound::Finite {
                    c: a + b,
                    strict: s || t,
                }
            }
            _ => DbmBound::Inf,
        }
    }

    /// Does `value ≺ c` hold?
    fn admits(self, value: &Rational) -> bool {
        match self {
            DbmBound::Inf => true,
            DbmBound::Finite { c, strict } => {
                let c = Rational::from_integer(BigInt::from(c));
                if strict {
                    value < &c
                } else {
                    value <= &c
                }
            }
        }
    }
}

impl PartialOrd for DbmBound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DbmBound {
    /// Tighter bounds are smaller; `< c` is tighter than `<= c`.
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (DbmBound::Inf, DbmBound::Inf) => Ordering::Equal,
            (DbmBound::Inf, _) => Ordering::Greater,
            (_, DbmBound::Inf) => Ordering::Less,
            (DbmBound::Finite { c: a, strict: s }, DbmBound::Finite { c: b, strict: t }) => {
                a.cmp(b).then_with(|| t.cmp(s))
            }
        }
    }
}

/// A convex set of valuations given by difference constraints, kept
/// canonical (all-pairs shortest paths).
#[derive(Debug, Clone)]
pub struct Zone {
    dim: usize,
    m: Vec<DbmBound>,
    empty: bool,
}

impl PartialEq for Zone {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && (self.empty && other.empty || !self.empty && !other.empty && self.m == other.m)
    }
}

impl Eq for Zone {}

impl Zone {
    /// All clocks equal to zero.
    pub fn zero(clocks: usize) -> Self {
        let dim = clocks + 1;
        Zone {
            dim,
            m: vec![DbmBound::LE_ZERO; dim * dim],
            empty: false,
        }
    }

    /// Every valuation (all clocks nonnegative).
    pub fn top(clocks: usize) -> Self {
        let dim = clocks + 1;
        let mut m = vec![DbmBound::Inf; dim * dim];
        for i in 0..dim {
            m[i * dim + i] = DbmBound::LE_ZERO;
            m[i] = DbmBound::LE_ZERO;
        }
        Zone {
            dim,
            m,
            empty: false,
        }
    }

    pub fn empty(clocks: usize) -> Self {
        let mut z = Zone::zero(clocks);
        z.empty = true;
        z
    }

    pub fn clocks(&self) -> usize {
        self.dim - 1
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    pub fn bound(&self, i: usize, j: usize) -> DbmBound {
        self.m[i * self.dim + j]
    }

    fn set(&mut self, i: usize, j: usize, b: DbmBound) {
        self.m[i * self.dim + j] = b;
    }

    /// Builds a zone from raw bounds and canonicalizes it.
    pub fn from_bounds(clocks: usize, bounds: impl IntoIterator<Item = (usize, usize, DbmBound)>) -> Self {
        let mut z = Zone::top(clocks);
        for (i, j, b) in bounds {
            if b < z.bound(i, j) {
                z.set(i, j, b);
            }
        }
        z.canonicalize();
        z
    }

    fn canonicalize(&mut self) {
        if self.empty {
            return;
        }
        let n = self.dim;
        for k in 0..n {
            for i in 0..n {
                let ik = self.bound(i, k);
                if ik == DbmBound::Inf {
                    continue;
                }
                for j in 0..n {
                    let via = ik.add(self.bound(k, j));
                    if via < self.bound(i, j) {
                        self.set(i, j, via);
                    }
                }
            }
        }
        if (0..n).any(|i| self.bound(i, i) < DbmBound::LE_ZERO) {
            self.empty = true;
            self.m = vec![DbmBound::LE_ZERO; n * n];
        }
    }

    /// Time elapse: drop upper bounds on absolute values.
    pub fn future(&self) -> Self {
        if self.empty {
            return self.clone();
        }
        let mut z = self.clone();
        for i in 1..z.dim {
            z.set(i, 0, DbmBound::Inf);
        }
        z
    }

    /// Time regression: the valuations from which some delay leads into
    /// the zone.
    pub fn past(&self) -> Self {
        if self.empty {
            return self.clone();
        }
        let mut z = self.clone();
        for i in 1..z.dim {
            let mut b = DbmBound::LE_ZERO;
            for j in 1..z.dim {
                b = b.min(z.bound(j, i));
            }
            z.set(0, i, b);
        }
        z.canonicalize();
        z
    }

    pub fn reset(&self, clock: usize) -> Self {
        if self.empty {
            return self.clone();
        }
        let x = clock + 1;
        let mut z = self.clone();
        for j in 0..z.dim {
            if j != x {
                z.set(x, j, self.bound(0, j));
                z.set(j, x, self.bound(j, 0));
            }
        }
        z.set(x, x, DbmBound::LE_ZERO);
        z
    }

    /// Removes every constraint on `clock` except nonnegativity.
    pub fn free(&self, clock: usize) -> Self {
        if self.empty {
            return self.clone();
        }
        let x = clock + 1;
        let mut z = self.clone();
        for j in 0..z.dim {
            if j != x {
                z.set(x, j, DbmBound::Inf);
                z.set(j, x, self.bound(j, 0));
            }
        }
        z.set(0, x, DbmBound::LE_ZERO);
        z
    }

    /// Valuations whose image under `x := 0` lies in the zone.
    pub fn inverse_reset(&self, clock: usize) -> Self {
        let x = clock + 1;
        let mut z = self.clone();
        z.constrain(x, 0, DbmBound::LE_ZERO);
        z.constrain(0, x, DbmBound::LE_ZERO);
        z.canonicalize();
        z.free(clock)
    }

    fn constrain(&mut self, i: usize, j: usize, b: DbmBound) {
        if b < self.bound(i, j) {
            self.set(i, j, b);
        }
    }

    pub fn and_guard(&self, g: &Guard) -> Self {
        if self.empty || g.is_empty() {
            return Zone::empty(self.clocks());
        }
        let mut z = self.clone();
        for (c, iv) in g.intervals().iter().enumerate() {
            let x = c + 1;
            if let Some(lo) = iv.lower {
                let b = DbmBound::Finite {
                    c: -(lo.value as i64),
                    strict: lo.strict,
                };
                z.constrain(0, x, b);
            }
            if let Some(up) = iv.upper {
                let b = DbmBound::Finite {
                    c: up.value as i64,
                    strict: up.strict,
                };
                z.constrain(x, 0, b);
            }
        }
        z.canonicalize();
        z
    }

    pub fn intersect(&self, other: &Zone) -> Self {
        if self.empty || other.empty {
            return Zone::empty(self.clocks());
        }
        let mut z = self.clone();
        for i in 0..z.dim {
            for j in 0..z.dim {
                z.constrain(i, j, other.bound(i, j));
            }
        }
        z.canonicalize();
        z
    }

    fn value<'a>(v: &'a ClockValuation, i: usize, zero: &'a Rational) -> &'a Rational {
        if i == 0 {
            zero
        } else {
            v.get(i - 1)
        }
    }

    pub fn contains(&self, v: &ClockValuation) -> bool {
        if self.empty {
            return false;
        }
        let zero = Rational::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let d = Self::value(v, i, &zero) - Self::value(v, j, &zero);
                if !self.bound(i, j).admits(&d) {
                    return false;
                }
            }
        }
        true
    }

    /// The delays `d >= 0` with `v + d` in the zone, as an interval
    /// `(lower, upper)` of `(value, strict)` pairs; `None` when empty.
    pub fn delay_interval(&self, v: &ClockValuation) -> Option<DelayInterval> {
        if self.empty {
            return None;
        }
        let zero = Rational::zero();
        for i in 1..self.dim {
            for j in 1..self.dim {
                let d = v.get(i - 1) - v.get(j - 1);
                if !self.bound(i, j).admits(&d) {
                    return None;
                }
            }
        }
        let mut lo = (zero.clone(), false);
        let mut hi: Option<(Rational, bool)> = None;
        for i in 1..self.dim {
            let vi = v.get(i - 1);
            if let DbmBound::Finite { c, strict } = self.bound(i, 0) {
                let u = Rational::from_integer(BigInt::from(c)) - vi;
                hi = Some(match hi {
                    None => (u, strict),
                    Some((h, s)) => match u.cmp(&h) {
                        Ordering::Less => (u, strict),
                        Ordering::Greater => (h, s),
                        Ordering::Equal => (h, s || strict),
                    },
                });
            }
            if let DbmBound::Finite { c, strict } = self.bound(0, i) {
                let l = -Rational::from_integer(BigInt::from(c)) - vi;
                lo = match l.cmp(&lo.0) {
                    Ordering::Greater => (l, strict),
                    Ordering::Less => lo,
                    Ordering::Equal => (l, lo.1 || strict),
                };
            }
        }
        if let Some((h, hs)) = &hi {
            match lo.0.cmp(h) {
                Ordering::Greater => return None,
                Ordering::Equal if lo.1 || *hs => return None,
                _ => {}
            }
        }
        Some(DelayInterval { lower: lo, upper: hi })
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> ZoneDisplay<'a> {
        ZoneDisplay { zone: self, alphabet }
    }
}

/// Admissible delays found by [`Zone::delay_interval`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelayInterval {
    pub lower: (Rational, bool),
    pub upper: Option<(Rational, bool)>,
}

impl DelayInterval {
    /// A delay inside the interval: the single point, the midpoint, or
    /// `lower + 1/2` when unbounded.
    pub fn pick(&self) -> Rational {
        let half = Rational::new(BigInt::from(1), BigInt::from(2));
        match &self.upper {
            Some((h, _)) if *h == self.lower.0 => h.clone(),
            Some((h, _)) => (&self.lower.0 + h) * half,
            None => &self.lower.0 + half,
        }
    }
}

pub struct ZoneDisplay<'a> {
    zone: &'a Zone,
    alphabet: &'a Alphabet,
}

impl fmt::Display for ZoneDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = self.zone;
        if z.empty {
            return f.write_str("false");
        }
        let name = |i: usize| {
            if i == 0 {
                "0".to_string()
            } else {
                self.alphabet.clock_name(i - 1)
            }
        };
        let mut parts = Vec::new();
        for i in 0..z.dim {
            for j in 0..z.dim {
                if i == j {
                    continue;
                }
                if let DbmBound::Finite { c, strict } = z.bound(i, j) {
                    let op = if strict { "<" } else { "<=" };
                    let part = match (i, j) {
                        (_, 0) => format!("{}{}{}", name(i), op, c),
                        (0, _) if c == 0 && !strict => continue,
                        (0, _) => format!("{}{}{}", name(j), if strict { ">" } else { ">=" }, -c),
                        _ => format!("{}-{}{}{}", name(i), name(j), op, c),
                    };
                    parts.push(part);
                }
            }
        }
        if parts.is_empty() {
            return f.write_str("true");
        }
        f.write_str(&parts.join(" & "))
    }
}
