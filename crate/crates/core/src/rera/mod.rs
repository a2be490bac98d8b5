//! The automaton model: validation, simulation, completion, equivalence and
//! file formats.

pub mod equiv;
pub mod format;
pub mod model;
pub mod random;
pub mod samples;

pub use equiv::{equivalent, EquivError, Equivalence};
pub use model::{Rera, Simulation, Transition, Violation};

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::timed::rational::ratio;
    use crate::timed::{Action, Guard, Rel, TimedWord};

    fn word(a: &Rera, s: &str) -> TimedWord {
        TimedWord::parse(s, &a.alphabet).unwrap()
    }

    fn random_word(rng: &mut ChaCha8Rng, actions: usize, max_len: usize) -> TimedWord {
        let len = rng.gen_range(0..=max_len);
        let mut w = TimedWord::empty();
        for _ in 0..len {
            w.push(ratio(rng.gen_range(0..12), 4), Action(rng.gen_range(0..actions)));
        }
        w
    }

    #[test]
    fn validate_examples() {
        let a = samples::reset_on_b();
        assert!(a.validate().is_empty());

        let mut overlap = a.clone();
        overlap.transitions.push(Transition::new(1, Action(0), Guard::top(2), false, 0));
        assert!(overlap
            .validate()
            .iter()
            .any(|v| matches!(v, Violation::Nondeterministic { first: 2, second: 3 })));

        let mut foreign = a.clone();
        foreign.transitions[1].resets = vec![0];
        assert_eq!(foreign.validate(), vec![Violation::ForeignReset { transition: 1 }]);

        let mut big = a;
        big.max_constant = 2;
        assert!(matches!(big.validate()[0], Violation::ConstantAboveK { constant: 3, .. }));
    }

    #[test]
    fn simulate_examples() {
        let a = samples::reset_on_b();
        let run = a.simulate(&word(&a, "1.5:a 0:b 0:a 2:a"));
        assert!(run.accepted);
        assert_eq!(run.path, vec![0, 1, 0, 1, 2]);
        let blocked = a.simulate(&word(&a, "0:a 0:a"));
        assert!(!blocked.accepted);
        assert_eq!(blocked.blocked_at, Some(1));
        let b = samples::reset_then_window();
        assert!(b.accepts(&word(&b, "0.5:a 0.9:a")));
        assert!(b.accepts(&word(&b, "0.7:a 0.9:a")));
        assert!(!b.accepts(&word(&b, "0.7:a 1.2:a")));
        assert!(!b.accepts(&TimedWord::empty()));
    }

    #[test]
    fn complete_examples() {
        let b = samples::reset_then_window();
        let c = b.complete();
        assert_eq!(c.locations.len(), 4);
        let sink = 3;
        let g = Guard::atom(1, 0, Rel::Gt, 1).unwrap();
        assert!(c
            .transitions
            .iter()
            .any(|t| t.source == 1 && t.target == sink && t.guard == g && t.resets.is_empty()));
        assert!(c.validate().is_empty());
        assert_eq!(c.complete(), c);

        let mut bare = b.clone();
        bare.transitions.clear();
        let cb = bare.complete();
        for loc in 0..3 {
            let out: Vec<_> = cb.outgoing(loc, Action(0)).collect();
            assert_eq!(out.len(), 1);
            assert!(out[0].1.guard.is_top());
        }

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = samples::reset_on_b();
        let ca = a.complete();
        for _ in 0..1000 {
            let w = random_word(&mut rng, 2, 5);
            assert_eq!(a.accepts(&w), ca.accepts(&w));
            assert_eq!(b.accepts(&TimedWord::empty()), c.accepts(&TimedWord::empty()));
        }
    }

    #[test]
    fn equivalence_examples() {
        let b = samples::reset_then_window();
        assert_eq!(equivalent(&b, &b).unwrap(), Equivalence::Equivalent);

        let mut wide = b.clone();
        wide.transitions[1].guard = Guard::atom(1, 0, Rel::Le, 2).unwrap();
        wide.max_constant = 2;
        match equivalent(&b, &wide).unwrap() {
            Equivalence::Counterexample { word, in_a, in_b } => {
                assert!(!in_a && in_b);
                assert_eq!(word.len(), 2);
                let second = &word.letters()[1].0;
                assert!(second > &ratio(1, 1) && second <= &ratio(2, 1));
            }
            other => panic!("expected a counterexample, got {other:?}"),
        }

        let a = samples::reset_on_b();
        let mut dead = a.clone();
        dead.accepting.clear();
        match equivalent(&a, &dead).unwrap() {
            Equivalence::Counterexample { word, in_a, in_b } => {
                assert!(in_a && !in_b);
                assert!(a.accepts(&word));
            }
            other => panic!("expected a counterexample, got {other:?}"),
        }
        assert_eq!(equivalent(&a, &a).unwrap(), Equivalence::Equivalent);
        assert_eq!(equivalent(&a, &b), Err(EquivError::AlphabetMismatch));
    }

    #[test]
    fn random_automata_are_valid_and_self_equivalent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let spec = random::RandomSpec {
                locations: 3,
                actions: 2,
                max_constant: 2,
            };
            let a = random::random_rera(spec, &mut rng);
            assert!(a.validate().is_empty());
            assert_eq!(equivalent(&a, &a).unwrap(), Equivalence::Equivalent);
        }
    }

    #[test]
    fn equivalence_counterexamples_separate() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let spec = random::RandomSpec {
            locations: 3,
            actions: 2,
            max_constant: 2,
        };
        let mut differing = 0;
        for _ in 0..40 {
            let a = random::random_rera(spec, &mut rng);
            let b = random::random_rera(spec, &mut rng);
            if let Equivalence::Counterexample { word, in_a, in_b } = equivalent(&a, &b).unwrap() {
                assert_eq!(a.accepts(&word), in_a);
                assert_eq!(b.accepts(&word), in_b);
                differing += 1;
            }
        }
        assert!(differing > 0);
    }

    #[test]
    fn file_round_trip() {
        let a = samples::reset_on_b();
        let text = format::serialize(&a).unwrap();
        assert!(text.contains("accepting = [\"l2\"]"));
        assert_eq!(text.matches("[[transitions]]").count(), 3);
        assert_eq!(format::parse(&text).unwrap(), a);

        let missing = text.replace("initial = \"l0\"\n", "");
        let err = format::parse(&missing).unwrap_err().to_string();
        assert!(err.contains("initial"), "{err}");

        let dot = format::to_dot(&samples::reset_then_window());
        assert!(dot.starts_with("digraph"));
        assert!(dot.contains("a, x_a<=1, {}"));
        assert!(dot.contains("a, true, {x_a}"));
    }
}
