//! Adjacent pairs: two words with opposite verdicts that differ only at
//! integer boundaries, and the differences they expose.

use thiserror::Error;

use super::{AdjacentPair, Difference, Direction};
use crate::obs::{ObservationStructure, Phase};
use num::Signed;

use crate::timed::rational::{floor, half, int, is_integer};
use crate::timed::{lambda_sum, ClockClass, Rational, TimedWord, TimedWordWithResets, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdjacencyError {
    #[error("untimed projections differ")]
    ProjectionMismatch,
    #[error("reset vectors differ")]
    ResetMismatch,
}

fn check_shape(w: &TimedWordWithResets, w2: &TimedWordWithResets) -> Result<(), AdjacencyError> {
    if w.word.actions() != w2.word.actions() {
        return Err(AdjacencyError::ProjectionMismatch);
    }
    if w.resets != w2.resets {
        return Err(AdjacencyError::ResetMismatch);
    }
    Ok(())
}

/// `w` is adjacent to `w2` when, at every letter and clock, an integer value
/// of `w` lies within distance one of the value in `w2`, and a non-integer
/// value is K-equivalent to it.
pub fn is_adjacent(w: &TimedWordWithResets, w2: &TimedWordWithResets, k: u32) -> Result<bool, AdjacencyError> {
    check_shape(w, w2)?;
    let one = int(1);
    for i in 0..w.len() {
        let (v, v2) = (w.at_action(i), w2.at_action(i));
        for c in 0..v.clocks() {
            let (x, y) = (v.get(c), v2.get(c));
            let ok = if is_integer(x) {
                (x - y).abs() < one
            } else {
                ClockClass::of(x, k) == ClockClass::of(y, k)
            };
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Integer values of `w` that `w2` leaves, with the side `w2` lies on.
/// Constants above `k` carry no guard information and are skipped.
pub fn diff(w: &TimedWordWithResets, w2: &TimedWordWithResets, k: u32) -> Result<Vec<Difference>, AdjacencyError> {
    check_shape(w, w2)?;
    let mut out = Vec::new();
    for i in 0..w.len() {
        let (v, v2) = (w.at_action(i), w2.at_action(i));
        for c in 0..v.clocks() {
            let (x, y) = (v.get(c), v2.get(c));
            if !is_integer(x) || x == y {
                continue;
            }
            let constant = crate::timed::rational::floor_u32(x);
            if constant > k {
                continue;
            }
            let direction = if y < x { Direction::Ge } else { Direction::Le };
            out.push(Difference {
                index: i,
                clock: c,
                constant,
                direction,
            });
        }
    }
    Ok(out)
}

fn above(x: &Rational, k: u32) -> bool {
    x > &int(k as i64)
}

/// Builds an adjacent pair from an accepted `plus` and a rejected `minus`
/// with the same untimed projection, both read under `resets`.
///
/// Bisects until every clock gap is below one, then moves the pair onto the
/// integer boundaries that separate differing integral parts, and finally
/// pairs one endpoint with the midpoint.
pub fn adjpair(
    obs: &mut ObservationStructure<'_>,
    plus: &TimedWord,
    minus: &TimedWord,
    resets: &[bool],
) -> Result<AdjacentPair, WordError> {
    if plus.actions() != minus.actions() {
        return Err(WordError::ProjectionMismatch);
    }
    let k = obs.k();
    let clocks = obs.clocks();
    let phase = obs.set_phase(Phase::Adjpair);
    let with = |w: &TimedWord| TimedWordWithResets::new(w.clone(), resets.to_vec(), clocks);
    let (mut w, mut w2) = (plus.clone(), minus.clone());
    let one = int(1);

    let far = |a: &TimedWordWithResets, b: &TimedWordWithResets| {
        (0..a.len()).any(|i| {
            let (v, v2) = (a.at_action(i), b.at_action(i));
            (0..clocks).any(|c| {
                let (x, y) = (v.get(c), v2.get(c));
                !(above(x, k) && above(y, k)) && (x - y).abs() >= one
            })
        })
    };
    while far(&with(&w), &with(&w2)) {
        let mid = lambda_sum(&w, &w2, &half())?;
        if obs.request(&mid) {
            w = mid;
        } else {
            w2 = mid;
        }
    }

    for i in 0..w.len() {
        for c in 0..clocks {
            let (r, r2) = (with(&w), with(&w2));
            let (x, y) = (r.at_action(i).get(c).clone(), r2.at_action(i).get(c).clone());
            if floor(&x) == floor(&y) || is_integer(&x) || is_integer(&y) || (above(&x, k) && above(&y, k)) {
                continue;
            }
            let mid = if x < y {
                let lambda = (floor(&y) - &x) / (&y - &x);
                lambda_sum(&w2, &w, &lambda)?
            } else {
                let lambda = (floor(&x) - &y) / (&x - &y);
                lambda_sum(&w, &w2, &lambda)?
            };
            if obs.request(&mid) {
                w = mid;
            } else {
                w2 = mid;
            }
        }
    }

    let mid = lambda_sum(&w, &w2, &half())?;
    let o = obs.request(&mid);
    obs.set_phase(phase);
    let (first, first_label) = if o { (w2, false) } else { (w, true) };
    let pair = AdjacentPair {
        w: with(&first),
        w2: with(&mid),
        labels: (first_label, o),
    };
    assert!(
        is_adjacent(&pair.w, &pair.w2, k) == Ok(true) && pair.labels.0 != pair.labels.1,
        "adjpair produced a non-adjacent pair"
    );
    Ok(pair)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rera::samples;
    use crate::teacher::SimulatedTeacher;
    use crate::timed::{Action, Alphabet};

    fn word(alphabet: &Alphabet, s: &str) -> TimedWord {
        TimedWord::parse(s, alphabet).unwrap()
    }

    #[test]
    fn adjacency_and_difference() {
        let ab = Alphabet::new(["a"]).unwrap();
        let w = TimedWordWithResets::new(word(&ab, "1.7:a 1.0:a"), vec![true, true], 1);
        let w2 = TimedWordWithResets::new(word(&ab, "1.7:a 1.1:a"), vec![true, true], 1);
        assert_eq!(is_adjacent(&w, &w2, 2), Ok(true));
        assert_eq!(
            diff(&w, &w2, 2).unwrap(),
            vec![Difference {
                index: 1,
                clock: 0,
                constant: 1,
                direction: Direction::Le
            }]
        );
        let far = TimedWordWithResets::new(word(&ab, "1.0:a"), vec![true], 1);
        let far2 = TimedWordWithResets::new(word(&ab, "2.5:a"), vec![true], 1);
        assert_eq!(is_adjacent(&far, &far2, 2), Ok(false));
    }

    #[test]
    fn shape_errors() {
        let ab = Alphabet::new(["a", "b"]).unwrap();
        let w = TimedWordWithResets::new(word(&ab, "1:a"), vec![true], 2);
        let w2 = TimedWordWithResets::new(word(&ab, "1:b"), vec![true], 2);
        assert_eq!(is_adjacent(&w, &w2, 2), Err(AdjacencyError::ProjectionMismatch));
        let w3 = TimedWordWithResets::new(word(&ab, "1:a"), vec![false], 2);
        assert_eq!(diff(&w, &w3, 2), Err(AdjacencyError::ResetMismatch));
    }

    #[test]
    fn differences_above_k_are_dropped() {
        let ab = Alphabet::new(["a"]).unwrap();
        let w = TimedWordWithResets::new(word(&ab, "3:a"), vec![false], 1);
        let w2 = TimedWordWithResets::new(word(&ab, "3.5:a"), vec![false], 1);
        assert_eq!(is_adjacent(&w, &w2, 2), Ok(true));
        assert!(diff(&w, &w2, 2).unwrap().is_empty());
    }

    #[test]
    fn adjpair_finds_the_window_border() {
        let target = samples::reset_then_window();
        let teacher = SimulatedTeacher::new(target.clone());
        let mut obs = ObservationStructure::new(&teacher, 2);
        obs.enable_trace();
        let ab = target.alphabet.clone();
        let plus = word(&ab, "1:a 0.5:a");
        let minus = word(&ab, "1:a 2.75:a");
        let pair = adjpair(&mut obs, &plus, &minus, &[true, false]).unwrap();
        assert_eq!(target.accepts(&pair.w.word), pair.labels.0);
        assert_eq!(target.accepts(&pair.w2.word), pair.labels.1);
        let guards = pair.consistency_guards(2);
        assert_eq!(guards.len(), 1);
        assert_eq!((guards[0].depth, guards[0].clock, guards[0].constant), (1, 0, 1));
        for e in obs.trace() {
            assert_eq!(e.word.actions(), vec![Action(0); e.word.len()]);
        }
    }
}
