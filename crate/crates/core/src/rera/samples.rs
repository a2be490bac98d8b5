//! Small reference automata used by tests, the CLI and the benchmarks.

use std::collections::BTreeSet;

use super::model::{Rera, Transition};
use crate::timed::{Action, Alphabet, Guard, Rel};

fn build(
    symbols: &[&str],
    locations: usize,
    accepting: &[usize],
    max_constant: u32,
    edges: Vec<(usize, usize, Vec<(usize, Rel, u32)>, bool, usize)>,
) -> Rera {
    let alphabet = Alphabet::new(symbols.iter().copied()).unwrap();
    let n = alphabet.len();
    Rera {
        locations: (0..locations).map(|i| format!("l{i}")).collect(),
        initial: 0,
        accepting: accepting.iter().copied().collect::<BTreeSet<_>>(),
        transitions: edges
            .into_iter()
            .map(|(s, a, atoms, r, t)| Transition::new(s, Action(a), Guard::from_atoms(n, atoms).unwrap(), r, t))
            .collect(),
        max_constant,
        alphabet,
    }
}

/// Two clocks; `b` resets `x_b` and loops back, `a` with `x_b<=2 & x_a>3`
/// reaches the accepting location.
pub fn reset_on_b() -> Rera {
    build(
        &["a", "b"],
        3,
        &[2],
        3,
        vec![
            (0, 0, vec![], false, 1),
            (1, 1, vec![(1, Rel::Le, 2)], true, 0),
            (1, 0, vec![(1, Rel::Le, 2), (0, Rel::Gt, 3)], false, 2),
        ],
    )
}

/// `a` resets `x_a`, then a second `a` within one time unit accepts.
pub fn reset_then_window() -> Rera {
    build(
        &["a"],
        3,
        &[2],
        1,
        vec![(0, 0, vec![], true, 1), (1, 0, vec![(0, Rel::Le, 1)], false, 2)],
    )
}

/// The first `a` resets `x_a` only when it happens before time 2.
pub fn reset_split() -> Rera {
    build(
        &["a"],
        4,
        &[3],
        4,
        vec![
            (0, 0, vec![(0, Rel::Le, 2)], true, 1),
            (0, 0, vec![(0, Rel::Gt, 2)], false, 2),
            (1, 0, vec![(0, Rel::Le, 1)], false, 3),
            (2, 0, vec![(0, Rel::Lt, 4)], false, 3),
        ],
    )
}
