//! Timed words, words with resets, guarded words and their symbolic
//! counterparts.

use std::fmt;

use num::{One, Zero};
use thiserror::Error;

use super::clock::{Action, Alphabet, ClockError, ClockValuation};
use super::guard::Guard;
use super::kclass::KClass;
use super::rational::{self, Decimal, Rational};
use super::zone::Zone;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("untimed projections differ")]
    ProjectionMismatch,
    #[error("first word is longer than the second")]
    LengthMismatch,
    #[error("lambda {0} outside [0,1]")]
    LambdaRange(String),
    #[error("guard sequence unsatisfiable at index {0}")]
    Unsatisfiable(usize),
    #[error("malformed letter `{0}` (expected delay:action)")]
    MalformedLetter(String),
    #[error(transparent)]
    Rational(#[from] rational::ParseRationalError),
    #[error(transparent)]
    Clock(#[from] ClockError),
}

/// A finite sequence of `(delay, action)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TimedWord {
    letters: Vec<(Rational, Action)>,
}

impl TimedWord {
    pub fn empty() -> Self {
        TimedWord::default()
    }

    pub fn new(letters: Vec<(Rational, Action)>) -> Result<Self, WordError> {
        for (t, _) in &letters {
            if t < &Rational::zero() {
                return Err(ClockError::NegativeDelay(rational::format(t)).into());
            }
        }
        Ok(TimedWord { letters })
    }

    pub fn letters(&self) -> &[(Rational, Action)] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn actions(&self) -> Vec<Action> {
        self.letters.iter().map(|(_, a)| *a).collect()
    }

    pub fn prefix(&self, n: usize) -> TimedWord {
        TimedWord {
            letters: self.letters[..n.min(self.len())].to_vec(),
        }
    }

    pub fn push(&mut self, delay: Rational, action: Action) {
        self.letters.push((delay, action));
    }

    pub fn concat(&self, other: &TimedWord) -> TimedWord {
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().cloned());
        TimedWord { letters }
    }

    /// The run under the given reset flags, as valuations `v_0 .. v_n`.
    pub fn run(&self, clocks: usize, resets: &[bool]) -> Vec<ClockValuation> {
        let mut v = ClockValuation::zero(clocks);
        let mut out = Vec::with_capacity(self.len() + 1);
        out.push(v.clone());
        for (i, (t, a)) in self.letters.iter().enumerate() {
            v = v.step(t, *a, resets[i]);
            out.push(v.clone());
        }
        out
    }

    /// Valuations `v_i + t_i` at which each action is played.
    pub fn action_valuations(&self, clocks: usize, resets: &[bool]) -> Vec<ClockValuation> {
        let mut v = ClockValuation::zero(clocks);
        let mut out = Vec::with_capacity(self.len());
        for (i, (t, a)) in self.letters.iter().enumerate() {
            let at = v.elapsed(t);
            v = if resets[i] { at.reset_one(a.clock()) } else { at.clone() };
            out.push(at);
        }
        out
    }

    /// Parses `1.5:a 0:b`; `""` and `eps` denote the empty word.
    pub fn parse(s: &str, alphabet: &Alphabet) -> Result<Self, WordError> {
        let s = s.trim();
        if s.is_empty() || s == "eps" || s == "ε" {
            return Ok(TimedWord::empty());
        }
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let (d, a) = tok
                .split_once(':')
                .ok_or_else(|| WordError::MalformedLetter(tok.to_string()))?;
            letters.push((rational::parse(d)?, alphabet.action(a)?));
        }
        TimedWord::new(letters)
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> WordDisplay<'a> {
        WordDisplay { word: self, alphabet }
    }
}

pub struct WordDisplay<'a> {
    word: &'a TimedWord,
    alphabet: &'a Alphabet,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return f.write_str("eps");
        }
        for (i, (t, a)) in self.word.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}:{}", Decimal(t), self.alphabet.name(*a))?;
        }
        Ok(())
    }
}

/// A timed word together with one reset flag per letter.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TimedWordWithResets {
    pub word: TimedWord,
    pub resets: Vec<bool>,
    run: Vec<ClockValuation>,
}

impl TimedWordWithResets {
    pub fn new(word: TimedWord, resets: Vec<bool>, clocks: usize) -> Self {
        assert_eq!(word.len(), resets.len(), "one reset flag per letter");
        let run = word.run(clocks, &resets);
        TimedWordWithResets { word, resets, run }
    }

    pub fn run(&self) -> &[ClockValuation] {
        &self.run
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn clocks(&self) -> usize {
        self.run[0].clocks()
    }

    /// `v_i + t_i`, the valuation at which letter `i` is played.
    pub fn at_action(&self, i: usize) -> ClockValuation {
        self.run[i].elapsed(&self.word.letters[i].0)
    }

    pub fn k_closed(&self, k: u32) -> KClosedWord {
        let steps = (0..self.len())
            .map(|i| {
                (
                    KClass::of(&self.at_action(i), k),
                    self.word.letters[i].1,
                    self.resets[i],
                )
            })
            .collect();
        KClosedWord {
            steps,
            last: KClass::of(self.run.last().unwrap(), k),
        }
    }
}

/// A symbolic path: `(guard, action, reset)` triples.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GuardedWordWithResets {
    pub letters: Vec<(Guard, Action, bool)>,
}

impl GuardedWordWithResets {
    pub fn empty() -> Self {
        GuardedWordWithResets::default()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn resets(&self) -> Vec<bool> {
        self.letters.iter().map(|l| l.2).collect()
    }

    pub fn extended(&self, g: Guard, a: Action, r: bool) -> Self {
        let mut letters = self.letters.clone();
        letters.push((g, a, r));
        GuardedWordWithResets { letters }
    }

    /// The zone word: `z_0` is the future of the zero valuation and
    /// `z_{i+1}` the future of `z_i ∧ g_i` after the optional reset.
    pub fn zone_word(&self, clocks: usize) -> Result<ZoneWordWithResets, WordError> {
        let mut z = Zone::zero(clocks).future();
        let mut steps = Vec::with_capacity(self.len());
        for (i, (g, a, r)) in self.letters.iter().enumerate() {
            let zg = z.and_guard(g);
            if zg.is_empty() {
                return Err(WordError::Unsatisfiable(i));
            }
            steps.push((z, *a, *r));
            z = if *r { zg.reset(a.clock()) } else { zg }.future();
        }
        Ok(ZoneWordWithResets { steps, last: z })
    }

    /// A concrete timed word satisfying the guarded word, if one exists.
    ///
    /// Computes backwards the valuations from which the remaining suffix is
    /// feasible, then picks each delay inside the admissible interval.
    pub fn witness(&self, clocks: usize) -> Option<TimedWord> {
        let n = self.len();
        let mut targets: Vec<Zone> = vec![Zone::top(clocks); n];
        let mut feasible = Zone::top(clocks);
        for i in (0..n).rev() {
            let (g, a, r) = &self.letters[i];
            let after = if *r { feasible.inverse_reset(a.clock()) } else { feasible };
            let target = Zone::top(clocks).and_guard(g).intersect(&after);
            if target.is_empty() {
                return None;
            }
            feasible = target.past();
            targets[i] = target;
        }
        let mut v = ClockValuation::zero(clocks);
        if !feasible.contains(&v) {
            return None;
        }
        let mut word = TimedWord::empty();
        for (i, (_, a, r)) in self.letters.iter().enumerate() {
            let d = targets[i].delay_interval(&v)?.pick();
            v = v.step(&d, *a, *r);
            word.push(d, *a);
        }
        Some(word)
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> GuardedDisplay<'a> {
        GuardedDisplay { word: self, alphabet }
    }
}

pub struct GuardedDisplay<'a> {
    word: &'a GuardedWordWithResets,
    alphabet: &'a Alphabet,
}

impl fmt::Display for GuardedDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return f.write_str("eps");
        }
        for (i, (g, a, r)) in self.word.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(
                f,
                "({},{},{})",
                g.display(self.alphabet),
                self.alphabet.name(*a),
                if *r { "R" } else { "-" }
            )?;
        }
        Ok(())
    }
}

/// Zones `z_0 .. z_{n-1}` paired with actions and resets, plus the final zone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZoneWordWithResets {
    pub steps: Vec<(Zone, Action, bool)>,
    pub last: Zone,
}

/// The K-class tube around a run: the class of `v_i + t_i` at each letter
/// and the class of the final valuation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KClosedWord {
    pub steps: Vec<(KClass, Action, bool)>,
    pub last: KClass,
}

impl KClosedWord {
    pub fn start(&self) -> KClass {
        KClass::zero(self.last.clocks())
    }
}

/// The run of `w_t` under the resets of `w_gr` when it satisfies every
/// guard, `None` otherwise.
pub fn satisfies(w_t: &TimedWord, w_gr: &GuardedWordWithResets, clocks: usize) -> Option<TimedWordWithResets> {
    if w_t.len() != w_gr.len() {
        return None;
    }
    let mut v = ClockValuation::zero(clocks);
    for ((t, a), (g, b, r)) in w_t.letters.iter().zip(&w_gr.letters) {
        if a != b {
            return None;
        }
        let at = v.elapsed(t);
        if !g.contains(&at) {
            return None;
        }
        v = if *r { at.reset_one(a.clock()) } else { at };
    }
    Some(TimedWordWithResets::new(w_t.clone(), w_gr.resets(), clocks))
}

/// Delays `λ t¹ + (1-λ) t²`, letter by letter.
pub fn lambda_sum(w1: &TimedWord, w2: &TimedWord, lambda: &Rational) -> Result<TimedWord, WordError> {
    if lambda < &Rational::zero() || lambda > &Rational::one() {
        return Err(WordError::LambdaRange(rational::format(lambda)));
    }
    if w1.actions() != w2.actions() {
        return Err(WordError::ProjectionMismatch);
    }
    let mu = Rational::one() - lambda;
    let letters = w1
        .letters
        .iter()
        .zip(&w2.letters)
        .map(|((t1, a), (t2, _))| (lambda * t1 + &mu * t2, *a))
        .collect();
    Ok(TimedWord { letters })
}

/// `w¹ ⊕ w²`: integral parts of `w¹`, fractional parts of `w²` on the
/// common prefix, then the tail of `w²`.
pub fn op_combine(w1: &TimedWord, w2: &TimedWord) -> Result<TimedWord, WordError> {
    if w1.len() > w2.len() {
        return Err(WordError::LengthMismatch);
    }
    let mut letters = Vec::with_capacity(w2.len());
    for (j, (t2, a2)) in w2.letters.iter().enumerate() {
        match w1.letters.get(j) {
            Some((t1, a1)) => {
                if a1 != a2 {
                    return Err(WordError::ProjectionMismatch);
                }
                letters.push((rational::floor(t1) + rational::frac(t2), *a2));
            }
            None => letters.push((t2.clone(), *a2)),
        }
    }
    Ok(TimedWord { letters })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timed::guard::Rel;
    use crate::timed::kclass::ClockClass;
    use crate::timed::rational::{int, ratio};

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    fn w(s: &str, sigma: &Alphabet) -> TimedWord {
        TimedWord::parse(s, sigma).unwrap()
    }

    #[test]
    fn parse_and_display() {
        let sigma = ab();
        let word = w("1.5:a 0:b 1/3:a", &sigma);
        assert_eq!(word.len(), 3);
        assert_eq!(word.display(&sigma).to_string(), "1.5:a 0:b 1/3:a");
        assert_eq!(w("", &sigma), TimedWord::empty());
        assert!(TimedWord::parse("1.5:c", &sigma).is_err());
        assert!(TimedWord::parse("1.5a", &sigma).is_err());
    }

    #[test]
    fn satisfies_examples() {
        let sigma = ab();
        let (xa, xb) = (0, 1);
        let gr = GuardedWordWithResets {
            letters: vec![
                (Guard::atom(2, xb, Rel::Gt, 1).unwrap(), Action(0), true),
                (Guard::atom(2, xa, Rel::Lt, 1).unwrap(), Action(1), false),
            ],
        };
        let wt = w("1.3:a 0.4:b", &sigma);
        let run = satisfies(&wt, &gr, 2).expect("satisfied");
        let expected: Vec<ClockValuation> = [
            (int(0), int(0)),
            (int(0), ratio(13, 10)),
            (ratio(4, 10), ratio(17, 10)),
        ]
        .into_iter()
        .map(|(a, b)| ClockValuation::from_values(vec![a, b]))
        .collect();
        assert_eq!(run.run(), &expected[..]);

        let mut no_reset = gr.clone();
        no_reset.letters[0].2 = false;
        assert!(satisfies(&wt, &no_reset, 2).is_none());

        let eps = satisfies(&TimedWord::empty(), &GuardedWordWithResets::empty(), 2).unwrap();
        assert_eq!(eps.run(), &[ClockValuation::zero(2)]);
    }

    #[test]
    fn zone_word_examples() {
        let zw = GuardedWordWithResets::empty().zone_word(2).unwrap();
        assert!(zw.steps.is_empty());
        assert_eq!(zw.last, Zone::zero(2).future());

        let g = Guard::atom(2, 1, Rel::Gt, 1).unwrap();
        let reset = GuardedWordWithResets { letters: vec![(g.clone(), Action(0), true)] };
        let z1 = reset.zone_word(2).unwrap().last;
        let keep = GuardedWordWithResets { letters: vec![(g, Action(0), false)] };
        let z1b = keep.zone_word(2).unwrap().last;
        for a in 0..12 {
            for b in 0..12 {
                let v = ClockValuation::from_values(vec![ratio(a, 3), ratio(b, 3)]);
                assert_eq!(z1.contains(&v), v.get(1) - v.get(0) > int(1));
                assert_eq!(z1b.contains(&v), v.get(0) == v.get(1) && v.get(0) > &int(1));
            }
        }

        let bad = GuardedWordWithResets {
            letters: vec![
                (Guard::top(2), Action(0), false),
                (Guard::from_atoms(2, [(0, Rel::Lt, 1), (1, Rel::Gt, 2)]).unwrap(), Action(1), false),
            ],
        };
        assert_eq!(bad.zone_word(2), Err(WordError::Unsatisfiable(1)));
    }

    #[test]
    fn k_closed_examples() {
        let sigma = Alphabet::new(["a"]).unwrap();
        let one = TimedWordWithResets::new(w("1.7:a", &sigma), vec![false], 1);
        let kc = one.k_closed(4);
        assert_eq!(kc.start(), KClass::new(vec![ClockClass::Point(0)]));
        assert_eq!(kc.steps[0].0, KClass::new(vec![ClockClass::Open(1)]));

        let two = TimedWordWithResets::new(w("2.9:a 1.1:a", &sigma), vec![false, false], 1);
        let kc = two.k_closed(4);
        assert_eq!(kc.steps[0].0.get(0), ClockClass::Open(2));
        assert_eq!(kc.steps[1].0.get(0), ClockClass::Point(4));

        let eps = TimedWordWithResets::new(TimedWord::empty(), vec![], 1).k_closed(4);
        assert!(eps.steps.is_empty());
        assert_eq!(eps.last, KClass::zero(1));
    }

    #[test]
    fn lambda_sum_examples() {
        let sigma = Alphabet::new(["a"]).unwrap();
        let mean = lambda_sum(&w("1.7:a 1.0:a", &sigma), &w("1.7:a 1.2:a", &sigma), &ratio(1, 2)).unwrap();
        assert_eq!(mean, w("1.7:a 1.1:a", &sigma));
        let w1 = w("0.3:a 2:a", &sigma);
        assert_eq!(lambda_sum(&w1, &w("1:a 1:a", &sigma), &int(1)).unwrap(), w1);
        let q = lambda_sum(&w("2:a", &sigma), &w("3:a", &sigma), &ratio(1, 4)).unwrap();
        assert_eq!(q, w("2.75:a", &sigma));
        let run = q.run(1, &[false]);
        assert_eq!(run[1].get(0), &ratio(11, 4));
        assert!(lambda_sum(&w("1:a", &sigma), &w("1:a 1:a", &sigma), &int(0)).is_err());
        assert!(lambda_sum(&w("1:a", &sigma), &w("1:a", &sigma), &int(2)).is_err());
    }

    #[test]
    fn op_combine_examples() {
        let sigma = Alphabet::new(["a"]).unwrap();
        assert_eq!(
            op_combine(&w("1.7:a", &sigma), &w("2.9:a 1.1:a", &sigma)).unwrap(),
            w("1.9:a 1.1:a", &sigma)
        );
        let x = w("2.25:a 0.5:a", &sigma);
        assert_eq!(op_combine(&x, &x).unwrap(), x);
        assert_eq!(
            op_combine(&w("1.7:a 1.0:a", &sigma), &w("2.7:a 1.1:a", &sigma)).unwrap(),
            w("1.7:a 1.1:a", &sigma)
        );
        assert_eq!(
            op_combine(&w("2.7:a 1.1:a", &sigma), &w("1.7:a", &sigma)),
            Err(WordError::LengthMismatch)
        );
    }

    #[test]
    fn witness_lands_in_guards() {
        let gr = GuardedWordWithResets {
            letters: vec![(Guard::atom(1, 0, Rel::Gt, 1).unwrap(), Action(0), true)],
        };
        let wt = gr.witness(1).unwrap();
        assert_eq!(wt.letters()[0].0, ratio(3, 2));
        assert!(satisfies(&wt, &gr, 1).is_some());
        assert_eq!(GuardedWordWithResets::empty().witness(1), Some(TimedWord::empty()));

        // x_b >= 2 after x_a was reset by a at time <= 1, then x_a < 2
        let two = GuardedWordWithResets {
            letters: vec![
                (Guard::atom(2, 0, Rel::Le, 1).unwrap(), Action(0), true),
                (Guard::from_atoms(2, [(0, Rel::Lt, 2), (1, Rel::Ge, 2)]).unwrap(), Action(1), false),
            ],
        };
        let wt = two.witness(2).unwrap();
        assert!(satisfies(&wt, &two, 2).is_some(), "{:?}", wt);
        let impossible = GuardedWordWithResets {
            letters: vec![
                (Guard::atom(2, 0, Rel::Le, 1).unwrap(), Action(0), false),
                (Guard::from_atoms(2, [(0, Rel::Lt, 1), (1, Rel::Ge, 2)]).unwrap(), Action(1), false),
            ],
        };
        assert!(impossible.witness(2).is_none());
    }
}
