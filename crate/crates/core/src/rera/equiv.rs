//! Language equivalence of deterministic RERAs by breadth-first search of
//! the region graph of their synchronous product.

use std::collections::{HashMap, VecDeque};

use num::{BigInt, Zero};
use thiserror::Error;

use super::model::Rera;
use crate::timed::{Action, ClockClass, ClockValuation, Rational, TimedWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivError {
    #[error("alphabets differ")]
    AlphabetMismatch,
    #[error("could not realize a separating word")]
    Witness,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equivalence {
    Equivalent,
    Counterexample {
        word: TimedWord,
        in_a: bool,
        in_b: bool,
    },
}

/// A classical region over `2n` clocks: integral parts (`k + 1` meaning
/// above `k`) and the rank of each fractional part (0 for integers).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Region {
    ints: Vec<u32>,
    ranks: Vec<u32>,
}

impl Region {
    fn zero(clocks: usize) -> Self {
        Region {
            ints: vec![0; clocks],
            ranks: vec![0; clocks],
        }
    }

    fn class(&self, c: usize, k: u32) -> ClockClass {
        if self.ints[c] > k {
            ClockClass::AboveK
        } else if self.ranks[c] == 0 {
            ClockClass::Point(self.ints[c])
        } else {
            ClockClass::Open(self.ints[c])
        }
    }

    fn densify(&mut self, k: u32) {
        let mut used: Vec<u32> = self
            .ranks
            .iter()
            .zip(&self.ints)
            .filter(|(r, i)| **r > 0 && **i <= k)
            .map(|(r, _)| *r)
            .collect();
        used.sort_unstable();
        used.dedup();
        for c in 0..self.ranks.len() {
            if self.ints[c] > k {
                self.ranks[c] = 0;
            } else if self.ranks[c] > 0 {
                self.ranks[c] = used.binary_search(&self.ranks[c]).unwrap() as u32 + 1;
            }
        }
    }

    fn successor(&self, k: u32) -> Option<Region> {
        let bounded: Vec<usize> = (0..self.ints.len()).filter(|&c| self.ints[c] <= k).collect();
        if bounded.is_empty() {
            return None;
        }
        let mut next = self.clone();
        let zeros: Vec<usize> = bounded.iter().copied().filter(|&c| self.ranks[c] == 0).collect();
        if !zeros.is_empty() {
            for &c in &bounded {
                if self.ranks[c] > 0 {
                    next.ranks[c] += 1;
                }
            }
            for &c in &zeros {
                if self.ints[c] == k {
                    next.ints[c] = k + 1;
                    next.ranks[c] = 0;
                } else {
                    next.ranks[c] = 1;
                }
            }
        } else {
            let top = bounded.iter().map(|&c| self.ranks[c]).max().unwrap();
            for &c in &bounded {
                if self.ranks[c] == top {
                    next.ints[c] += 1;
                    next.ranks[c] = 0;
                }
            }
        }
        next.densify(k);
        Some(next)
    }

    fn reset(&mut self, c: usize, k: u32) {
        self.ints[c] = 0;
        self.ranks[c] = 0;
        self.densify(k);
    }

    /// Delays landing `v` in this region, assuming the ray crosses it.
    fn delay_into(&self, v: &[Rational], k: u32) -> Option<Rational> {
        let mut lo = (Rational::zero(), false);
        let mut hi: Option<(Rational, bool)> = None;
        let int = |n: u32| Rational::from_integer(BigInt::from(n));
        let raise = |l: Rational, strict: bool, lo: &mut (Rational, bool)| {
            if l > lo.0 || (l == lo.0 && strict) {
                *lo = (l, strict);
            }
        };
        let lower = |u: Rational, strict: bool, hi: &mut Option<(Rational, bool)>| {
            let tighter = match hi {
                None => true,
                Some((h, s)) => u < *h || (u == *h && strict && !*s),
            };
            if tighter {
                *hi = Some((u, strict));
            }
        };
        for (c, x) in v.iter().enumerate() {
            match self.class(c, k) {
                ClockClass::Point(n) => {
                    raise(int(n) - x, false, &mut lo);
                    lower(int(n) - x, false, &mut hi);
                }
                ClockClass::Open(n) => {
                    raise(int(n) - x, true, &mut lo);
                    lower(int(n + 1) - x, true, &mut hi);
                }
                ClockClass::AboveK => raise(int(k) - x, true, &mut lo),
            }
        }
        let half = Rational::new(BigInt::from(1), BigInt::from(2));
        match hi {
            None => Some(&lo.0 + half),
            Some((h, hs)) => {
                if lo.0 > h || (lo.0 == h && (lo.1 || hs)) {
                    None
                } else if lo.0 == h {
                    Some(h)
                } else {
                    Some((&lo.0 + &h) * half)
                }
            }
        }
    }
}

struct Side<'a> {
    rera: &'a Rera,
    offset: usize,
}

impl Side<'_> {
    /// The unique transition enabled from `loc` on `a` in region `r`.
    fn step(&self, loc: usize, a: Action, r: &Region, k: u32) -> Option<(usize, Vec<usize>)> {
        let n = self.rera.clocks();
        self.rera
            .outgoing(loc, a)
            .find(|(_, t)| (0..n).all(|c| r.class(self.offset + c, k).within(t.guard.interval(c), k)))
            .map(|(_, t)| (t.target, t.resets.clone()))
    }
}

/// Decides `L(a) = L(b)`; on difference returns a breadth-first minimal
/// separating word, checked by simulating both automata.
pub fn equivalent(a: &Rera, b: &Rera) -> Result<Equivalence, EquivError> {
    if a.alphabet != b.alphabet {
        return Err(EquivError::AlphabetMismatch);
    }
    let ca = a.complete();
    let cb = b.complete();
    let n = a.clocks();
    let k = a
        .max_constant
        .max(b.max_constant)
        .max(ca.transitions.iter().map(|t| t.guard.max_constant()).max().unwrap_or(0))
        .max(cb.transitions.iter().map(|t| t.guard.max_constant()).max().unwrap_or(0));
    let sa = Side { rera: &ca, offset: 0 };
    let sb = Side { rera: &cb, offset: n };

    type State = (usize, usize, Region);
    let start: State = (ca.initial, cb.initial, Region::zero(2 * n));
    let mut index: HashMap<State, usize> = HashMap::new();
    let mut states: Vec<State> = vec![start.clone()];
    let mut parent: Vec<Option<(usize, usize, Action)>> = vec![None];
    index.insert(start, 0);
    let mut queue = VecDeque::from([0usize]);
    let mut found = None;
    while let Some(i) = queue.pop_front() {
        let (la, lb, region) = states[i].clone();
        if ca.is_accepting(la) != cb.is_accepting(lb) {
            found = Some(i);
            break;
        }
        let mut chain = vec![region];
        while let Some(next) = chain.last().unwrap().successor(k) {
            chain.push(next);
        }
        for (steps, r) in chain.iter().enumerate() {
            for act in a.alphabet.actions() {
                let (Some((ta, ra)), Some((tb, rb))) = (sa.step(la, act, r, k), sb.step(lb, act, r, k)) else {
                    continue;
                };
                let mut nr = r.clone();
                for c in ra {
                    nr.reset(c, k);
                }
                for c in rb {
                    nr.reset(n + c, k);
                }
                let st = (ta, tb, nr);
                if !index.contains_key(&st) {
                    index.insert(st.clone(), states.len());
                    states.push(st);
                    parent.push(Some((i, steps, act)));
                    queue.push_back(states.len() - 1);
                }
            }
        }
    }
    let Some(mut i) = found else {
        return Ok(Equivalence::Equivalent);
    };
    let mut moves = Vec::new();
    while let Some((p, steps, act)) = parent[i] {
        moves.push((steps, act));
        i = p;
    }
    moves.reverse();
    let word = realize(&sa, &sb, &moves, n, k).ok_or(EquivError::Witness)?;
    let in_a = a.accepts(&word);
    let in_b = b.accepts(&word);
    if in_a == in_b {
        return Err(EquivError::Witness);
    }
    Ok(Equivalence::Counterexample { word, in_a, in_b })
}

fn realize(sa: &Side, sb: &Side, moves: &[(usize, Action)], n: usize, k: u32) -> Option<TimedWord> {
    let mut v = ClockValuation::zero(2 * n);
    let mut region = Region::zero(2 * n);
    let (mut la, mut lb) = (sa.rera.initial, sb.rera.initial);
    let mut word = TimedWord::empty();
    for &(steps, act) in moves {
        let mut target = region.clone();
        for _ in 0..steps {
            target = target.successor(k)?;
        }
        let d = target.delay_into(v.values(), k)?;
        v = v.elapsed(&d);
        let (ta, ra) = sa.step(la, act, &target, k)?;
        let (tb, rb) = sb.step(lb, act, &target, k)?;
        region = target;
        for c in ra {
            v = v.reset_one(c);
            region.reset(c, k);
        }
        for c in rb {
            v = v.reset_one(n + c);
            region.reset(n + c, k);
        }
        la = ta;
        lb = tb;
        word.push(d, act);
    }
    Some(word)
}
