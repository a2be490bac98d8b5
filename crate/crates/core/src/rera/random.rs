//! Seeded generation of random deterministic RERAs.

use std::collections::BTreeSet;

use rand::Rng;

use super::model::{Rera, Transition};
use crate::timed::{Alphabet, Guard, Rel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSpec {
    pub locations: usize,
    pub actions: usize,
    pub max_constant: u32,
}

/// Each `(location, action)` gets no edge, one `true` edge, or a two-way
/// split on one clock; pieces of a split may be left out.
pub fn random_rera<R: Rng>(spec: RandomSpec, rng: &mut R) -> Rera {
    let names: Vec<String> = (0..spec.actions).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    let alphabet = Alphabet::new(names).unwrap();
    let n = alphabet.len();
    let k = spec.max_constant.max(1);
    let mut transitions = Vec::new();
    for loc in 0..spec.locations {
        for a in alphabet.actions() {
            let roll: f64 = rng.gen();
            let pieces = if roll < 0.15 {
                Vec::new()
            } else if roll < 0.55 {
                vec![Guard::top(n)]
            } else {
                let c = rng.gen_range(0..n);
                let bound = rng.gen_range(1..=k);
                let (lo, hi) = if rng.gen_bool(0.5) { (Rel::Le, Rel::Gt) } else { (Rel::Lt, Rel::Ge) };
                let mut ps = vec![
                    Guard::atom(n, c, lo, bound).unwrap(),
                    Guard::atom(n, c, hi, bound).unwrap(),
                ];
                if rng.gen_bool(0.2) {
                    ps.remove(rng.gen_range(0..2));
                }
                ps
            };
            for g in pieces {
                let target = rng.gen_range(0..spec.locations);
                let reset = rng.gen_bool(0.5);
                transitions.push(Transition::new(loc, a, g, reset, target));
            }
        }
    }
    let mut accepting: BTreeSet<usize> = (0..spec.locations).filter(|_| rng.gen_bool(0.4)).collect();
    if accepting.is_empty() {
        accepting.insert(rng.gen_range(0..spec.locations));
    }
    Rera {
        alphabet,
        locations: (0..spec.locations).map(|i| format!("l{i}")).collect(),
        initial: 0,
        accepting,
        transitions,
        max_constant: k,
    }
}
