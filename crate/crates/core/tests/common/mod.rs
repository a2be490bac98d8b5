//! Reference implementations used to check the library from the outside.
//! They work on global timestamps and plain vectors, sharing no code with
//! the clock and class machinery under test.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num::{BigInt, One, ToPrimitive, Zero};
use rand::Rng;
use rera::timed::{Action, ClockClass, KClass, Rational, TimedWord};

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Per-clock class of a value: exact integer, open unit interval, or
/// beyond the largest constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cls {
    Pt(u32),
    Op(u32),
    Above,
}

pub fn cls(x: &Rational, k: u32) -> Cls {
    if *x > Rational::from_integer(BigInt::from(k)) {
        Cls::Above
    } else if x.is_integer() {
        Cls::Pt(x.to_integer().to_u32().unwrap())
    } else {
        Cls::Op(x.floor().to_integer().to_u32().unwrap())
    }
}

pub fn from_kclass(z: &KClass) -> Vec<Cls> {
    z.classes()
        .iter()
        .map(|c| match c {
            ClockClass::Point(n) => Cls::Pt(*n),
            ClockClass::Open(n) => Cls::Op(*n),
            ClockClass::AboveK => Cls::Above,
        })
        .collect()
}

/// Clock values at each letter, before that letter's reset: time since the
/// last reset of the clock, read off absolute timestamps.
pub fn valuations_at_actions(w: &TimedWord, resets: &[bool], clocks: usize) -> Vec<Vec<Rational>> {
    let mut now = Rational::zero();
    let mut last = vec![Rational::zero(); clocks];
    let mut out = Vec::new();
    for (i, (d, a)) in w.letters().iter().enumerate() {
        now += d;
        out.push(last.iter().map(|l| &now - l).collect());
        if resets[i] {
            last[a.0] = now.clone();
        }
    }
    out
}

/// Clock values right after each letter, resets applied.
pub fn valuations_after(w: &TimedWord, resets: &[bool], clocks: usize) -> Vec<Vec<Rational>> {
    let mut out = valuations_at_actions(w, resets, clocks);
    for (i, v) in out.iter_mut().enumerate() {
        if resets[i] {
            v[w.letters()[i].1 .0] = Rational::zero();
        }
    }
    out
}

/// One step of a K-closed word: classes when the letter is played, the
/// letter and the reset.
pub type Step = (Vec<Cls>, usize, bool);

pub fn k_closed(w: &TimedWord, resets: &[bool], clocks: usize, k: u32) -> Vec<Step> {
    valuations_at_actions(w, resets, clocks)
        .iter()
        .zip(w.letters())
        .zip(resets)
        .map(|((v, (_, a)), &r)| (v.iter().map(|x| cls(x, k)).collect(), a.0, r))
        .collect()
}

pub fn all_resets(n: usize) -> Vec<Vec<bool>> {
    (0u32..1 << n).map(|b| (0..n).map(|i| b >> i & 1 == 1).collect()).collect()
}

/// Invalid K-closed words of a set of observations, evaluated from the
/// definition: a word is invalid when observations sharing it disagree,
/// when both reset choices of some extension are invalid, or when a prefix
/// is invalid.
pub struct InvalidityOracle {
    invalid: BTreeSet<Vec<Step>>,
}

impl InvalidityOracle {
    pub fn new<'a>(obs: impl IntoIterator<Item = (&'a TimedWord, bool)>, clocks: usize, k: u32) -> Self {
        let mut labels: BTreeMap<Vec<Step>, BTreeSet<bool>> = BTreeMap::new();
        let mut nodes: BTreeSet<Vec<Step>> = BTreeSet::new();
        for (w, o) in obs {
            for r in all_resets(w.len()) {
                let kw = k_closed(w, &r, clocks, k);
                for n in 0..=kw.len() {
                    nodes.insert(kw[..n].to_vec());
                }
                labels.entry(kw).or_default().insert(o);
            }
        }
        let mut by_len: Vec<&Vec<Step>> = nodes.iter().collect();
        by_len.sort_by_key(|n| std::cmp::Reverse(n.len()));
        let mut own: BTreeSet<Vec<Step>> = BTreeSet::new();
        for node in by_len {
            let conflict = labels.get(node).is_some_and(|l| l.len() > 1);
            let blocked = nodes.iter().filter(|c| c.len() == node.len() + 1 && c.starts_with(node)).any(|c| {
                let (z, a, r) = c.last().unwrap();
                let mut sibling = node.clone();
                sibling.push((z.clone(), *a, !r));
                own.contains(c) && own.contains(&sibling)
            });
            if conflict || blocked {
                own.insert(node.clone());
            }
        }
        let invalid = nodes
            .iter()
            .filter(|n| (0..=n.len()).any(|i| own.contains(&n[..i].to_vec())))
            .cloned()
            .collect();
        InvalidityOracle { invalid }
    }

    pub fn is_invalid(&self, kw: &[Step]) -> bool {
        (0..=kw.len()).any(|i| self.invalid.contains(&kw[..i].to_vec()))
    }

    pub fn len(&self) -> usize {
        self.invalid.len()
    }
}

/// A random delay with denominator 8 in `[0, max]`.
pub fn delay<R: Rng>(rng: &mut R, max: u32) -> Rational {
    q(rng.gen_range(0..=8 * max as i64), 8)
}

pub fn random_word<R: Rng>(rng: &mut R, actions: usize, len: usize, max_delay: u32) -> TimedWord {
    let mut w = TimedWord::empty();
    for _ in 0..len {
        w.push(delay(rng, max_delay), Action(rng.gen_range(0..actions)));
    }
    w
}

pub fn half() -> Rational {
    q(1, 2)
}

pub fn one() -> Rational {
    Rational::one()
}
