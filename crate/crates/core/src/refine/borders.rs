//! Common borders between K-classes and the search for a validity guard
//! separating the invalid `true`-reset and `false`-reset successors.

use super::{BorderRel, CommonBorder, ValidityGuard};
use crate::obs::{ObservationStructure, Phase};
use crate::timed::rational::half;
use crate::timed::{
    lambda_sum, op_combine, Action, ClockClass, Guard, GuardedWordWithResets, KClass, TimedWord,
    TimedWordWithResets,
};

/// Borders between two adjacent classes of one clock, in either order.
fn clock_border(c1: ClockClass, c2: ClockClass, k: u32) -> Option<(BorderRel, u32)> {
    use ClockClass::*;
    let one_way = |a: ClockClass, b: ClockClass| match (a, b) {
        (Point(n), Open(m)) if n >= 1 && m == n - 1 => Some((BorderRel::Lt, n)),
        (Point(n), Open(m)) if m == n => Some((BorderRel::Le, n)),
        (Open(m), Open(n)) if n >= 1 && m == n - 1 => Some((BorderRel::Top, n)),
        (Point(n), AboveK) if n == k => Some((BorderRel::Le, k)),
        (Open(m), AboveK) if k >= 1 && m == k - 1 => Some((BorderRel::Top, k)),
        _ => None,
    };
    one_way(c1, c2).or_else(|| one_way(c2, c1))
}

/// Every `(x, ~, k)` with the classes of `x` in `z1` and `z2` meeting at `k`.
pub fn common_borders(z1: &KClass, z2: &KClass, k: u32) -> Vec<CommonBorder> {
    (0..z1.clocks())
        .filter_map(|c| {
            clock_border(z1.get(c), z2.get(c), k).map(|(rel, constant)| CommonBorder {
                clock: c,
                rel,
                constant,
            })
        })
        .collect()
}

/// A border between the classes when no common border exists: on the clock
/// with the smallest index distance, just above the lower class.
pub(crate) fn fallback_border(z1: &KClass, z2: &KClass, k: u32) -> Option<CommonBorder> {
    (0..z1.clocks())
        .filter(|&c| z1.get(c) != z2.get(c))
        .min_by_key(|&c| (z1.get(c).index(k).abs_diff(z2.get(c).index(k)), c))
        .map(|c| {
            let lo = [z1.get(c), z2.get(c)].into_iter().min_by_key(|x| x.index(k)).unwrap();
            let (rel, constant) = match lo {
                ClockClass::Point(n) => (BorderRel::Le, n),
                ClockClass::Open(n) => (BorderRel::Top, n + 1),
                ClockClass::AboveK => unreachable!("the lower class is bounded"),
            };
            CommonBorder { clock: c, rel, constant }
        })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvalguardOutcome {
    Border(ValidityGuard),
    /// The state itself turned out to be invalid.
    ParentInvalidated,
}

const MAX_ROUNDS: usize = 64;

/// Shortest, then least, observation of a set.
fn representative(obs: &ObservationStructure<'_>, ids: &[usize]) -> TimedWord {
    ids.iter()
        .map(|&id| obs.word(id).0)
        .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
        .expect("nonempty word set")
        .clone()
}

/// Narrows two sets of observations, invalid under reset `true` (`w1`, at
/// class `z1`) and `false` (`w2`, at `z2`) after `a` under `g` from `state`,
/// until their classes share a border.
#[allow(clippy::too_many_arguments)]
pub fn invalguard(
    obs: &mut ObservationStructure<'_>,
    state: &GuardedWordWithResets,
    a: Action,
    g: &Guard,
    w1: &[usize],
    z1: &KClass,
    w2: &[usize],
    z2: &KClass,
) -> InvalguardOutcome {
    let k = obs.k();
    let clocks = obs.clocks();
    let n = state.len();
    let resets = state.resets();
    let mut rep1 = representative(obs, w1);
    let mut rep2 = representative(obs, w2);
    let (mut z1, mut z2) = (z1.clone(), z2.clone());
    let phase = obs.set_phase(Phase::Invalguard);
    let done = |border: CommonBorder| {
        InvalguardOutcome::Border(ValidityGuard {
            state: state.clone(),
            action: a,
            guard: g.clone(),
            border,
        })
    };
    let class_at = |w: &TimedWord, r: bool| {
        let mut rs = resets.clone();
        rs.push(r);
        KClass::of(&TimedWordWithResets::new(w.prefix(n + 1), rs, clocks).at_action(n), k)
    };
    let mut outcome = None;
    for _ in 0..MAX_ROUNDS {
        if let Some(b) = common_borders(&z1, &z2, k).into_iter().next() {
            outcome = Some(done(b));
            break;
        }
        if z1 == z2 {
            outcome = Some(InvalguardOutcome::ParentInvalidated);
            break;
        }
        let mid = lambda_sum(&rep1.prefix(n + 1), &rep2.prefix(n + 1), &half()).expect("common projection");
        let n1 = op_combine(&mid, &rep1).expect("prefix of rep1");
        let n2 = op_combine(&mid, &rep2).expect("prefix of rep2");
        obs.request(&n1);
        obs.request(&n2);
        if obs.is_invalid(state) {
            outcome = Some(InvalguardOutcome::ParentInvalidated);
            break;
        }
        let with = |r: bool| {
            let mut rs = resets.clone();
            rs.push(r);
            rs
        };
        let (c1, c2) = (class_at(&n1, true), class_at(&n2, false));
        let inv1 = obs.concrete_invalid(&n1.prefix(n + 1), &with(true));
        let inv2 = obs.concrete_invalid(&n2.prefix(n + 1), &with(false));
        let before = (z1.clone(), z2.clone());
        if inv1 || !inv2 {
            rep1 = n1;
            z1 = c1;
        } else {
            rep2 = n2;
            z2 = c2;
        }
        if before == (z1.clone(), z2.clone()) {
            break;
        }
    }
    obs.set_phase(phase);
    outcome.unwrap_or_else(|| match fallback_border(&z1, &z2, k) {
        Some(b) => {
            log::debug!("validity guard from the fallback border");
            done(b)
        }
        None => InvalguardOutcome::ParentInvalidated,
    })
}
