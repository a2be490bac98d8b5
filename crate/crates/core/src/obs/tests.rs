use super::*;
use crate::rera::samples;
use crate::teacher::SimulatedTeacher;
use crate::timed::{Action, Guard, Rel, TimedWord};

fn word(obs: &ObservationStructure<'_>, s: &str) -> TimedWord {
    TimedWord::parse(s, obs.alphabet()).unwrap()
}

fn guard(atoms: &[(Rel, u32)]) -> Guard {
    Guard::from_atoms(1, atoms.iter().map(|&(r, k)| (0, r, k))).unwrap()
}

fn gw(letters: &[(Guard, bool)]) -> GuardedWordWithResets {
    GuardedWordWithResets {
        letters: letters.iter().map(|(g, r)| (g.clone(), Action(0), *r)).collect(),
    }
}

fn live_leaves(obs: &ObservationStructure<'_>) -> Vec<LangId> {
    obs.tdg
        .live_states()
        .into_iter()
        .filter(|&s| obs.tdg.lang[s].children.is_empty())
        .collect()
}

/// The four observations whose invalidities can only be told apart by a
/// guard on the first letter.
const SPLIT_WORDS: [&str; 4] = ["1.7:a 1:a", "1.7:a 1.1:a", "2.9:a 1.1:a", "2.7:a 1.1:a"];

#[test]
fn request_caches_answers() {
    let teacher = SimulatedTeacher::new(samples::reset_then_window());
    let mut obs = ObservationStructure::new(&teacher, 1);
    let w = word(&obs, "0.5:a 0.9:a");
    assert!(obs.request(&w));
    assert_eq!(obs.obs().len(), 2, "the prefix is requested by the TOG");
    let before = teacher.stats().membership_count;
    assert!(obs.request(&w));
    assert_eq!(teacher.stats().membership_count, before);
    assert!(!obs.request(&TimedWord::empty()));
}

#[test]
fn request_guarded_uses_the_tog_first() {
    let teacher = SimulatedTeacher::new(samples::reset_then_window());
    let mut obs = ObservationStructure::new(&teacher, 1);
    obs.request(&word(&obs, "0.7:a"));
    let before = teacher.stats().membership_count;
    let below = gw(&[(guard(&[(Rel::Lt, 1)]), true)]);
    assert_eq!(obs.request_guarded(&below), Ok(false));
    assert_eq!(teacher.stats().membership_count, before);

    let above = gw(&[(guard(&[(Rel::Gt, 1)]), true)]);
    assert_eq!(obs.request_guarded(&above), Ok(false));
    assert_eq!(teacher.stats().membership_count, before + 1);
    let fresh = obs.obs().keys().last().unwrap().clone();
    assert!(crate::timed::word::satisfies(&fresh, &above, 1).is_some());

    assert_eq!(obs.request_guarded(&GuardedWordWithResets::empty()), Ok(false));
    let impossible = gw(&[(guard(&[(Rel::Lt, 1)]), true), (guard(&[(Rel::Gt, 1)]), false)]);
    assert!(obs.request_guarded(&impossible.extended(guard(&[(Rel::Lt, 1)]), Action(0), false)).is_err());
    let empty = gw(&[(guard(&[(Rel::Lt, 1), (Rel::Gt, 1)]), true)]);
    assert!(obs.request_guarded(&empty).is_err());
}

#[test]
fn single_letter_creates_two_leaves() {
    let teacher = SimulatedTeacher::new(samples::reset_then_window());
    let mut obs = ObservationStructure::new(&teacher, 1);
    obs.request(&word(&obs, "0.5:a"));
    obs.flush();
    let root = &obs.tdg.lang[Tdg::ROOT];
    assert_eq!(root.children.len(), 1);
    let d = &obs.tdg.dec[root.children[0]];
    assert!(d.guard.is_top());
    let leaves: Vec<LangId> = d.children().map(|(_, c)| c).collect();
    assert_eq!(leaves.len(), 2);
    for c in leaves {
        assert_eq!(obs.tdg.lang[c].labels, Labels::of(false));
    }
    assert!(obs.audit().is_empty(), "{:?}", obs.audit());
}

#[test]
fn two_letters_then_labels_only() {
    let teacher = SimulatedTeacher::new(samples::reset_then_window());
    let mut obs = ObservationStructure::new(&teacher, 1);
    obs.request(&word(&obs, "0.5:a 0.2:a"));
    obs.flush();
    assert_eq!(live_leaves(&obs).len(), 4);
    let states = obs.tdg.lang.len();
    obs.request(&word(&obs, "0.6:a 0.1:a"));
    obs.flush();
    assert_eq!(obs.tdg.lang.len(), states);
}

#[test]
fn conflicting_leaves_hold_both_labels() {
    let teacher = SimulatedTeacher::new(samples::reset_then_window());
    let mut obs = ObservationStructure::new(&teacher, 1);
    obs.request(&word(&obs, "0.7:a 0.9:a"));
    obs.flush();
    obs.request(&word(&obs, "0.7:a 1.2:a"));
    obs.flush_words();
    let leaves = live_leaves(&obs);
    assert_eq!(leaves.len(), 4);
    for s in &leaves {
        assert_eq!(obs.tdg.lang[*s].labels.len(), 2);
        assert_eq!(obs.tdg.lang[*s].labels.to_string(), "±");
    }
    assert_eq!(obs.inconsistent_states(), leaves);
    // Without the reset, both words meet in (1,2): that branch is invalid.
    obs.flush();
    assert_eq!(live_leaves(&obs).len(), 2);
    let d = &obs.tdg.dec[obs.tdg.lang[Tdg::ROOT].children[0]];
    assert!(d.child[1].is_some() && d.child[0].is_none());
    assert!(obs.check_pruning().is_empty());
}

#[test]
fn invalidities_on_both_resets_schedule_a_rebuild() {
    let teacher = SimulatedTeacher::new(samples::reset_split());
    let mut obs = ObservationStructure::new(&teacher, 4);
    for w in SPLIT_WORDS {
        obs.request(&word(&obs, w));
    }
    let invalid: Vec<String> = (0..obs.tog.states.len())
        .filter(|&s| obs.tog.states[s].invalid && obs.tog.states[s].depth == 1)
        .map(|s| {
            let kw = obs.tog.k_closed(s);
            format!("{}/{}", kw.steps[0].0, kw.steps[0].2)
        })
        .collect();
    assert_eq!(invalid, vec!["<(1,2)>/false", "<(2,3)>/true"]);
    obs.flush();
    assert_eq!(obs.rebuild_queue(), &[Tdg::ROOT]);
    let d = obs.tdg.lang[Tdg::ROOT].children[0];
    assert!(obs.tdg.dec[d].children().next().is_none());
    assert!(obs.check_tdg_tree().is_empty());
}

#[test]
fn invalidity_of_guarded_words() {
    let teacher = SimulatedTeacher::new(samples::reset_split());
    let mut obs = ObservationStructure::new(&teacher, 4);
    for w in SPLIT_WORDS {
        obs.request(&word(&obs, w));
    }
    let one_two = guard(&[(Rel::Gt, 1), (Rel::Lt, 2)]);
    assert!(obs.is_invalid(&gw(&[(one_two.clone(), false)])));
    assert!(!obs.is_invalid(&gw(&[(one_two.clone(), true)])));
    assert!(!obs.is_invalid(&GuardedWordWithResets::empty()));
    let leaf = gw(&[(one_two, true), (guard(&[(Rel::Ge, 1), (Rel::Le, 1)]), true)]);
    assert!(!obs.is_invalid(&leaf));
    assert!(obs.concrete_invalid(&word(&obs, "1.7:a"), &[false]));
    assert!(!obs.concrete_invalid(&word(&obs, "1.7:a"), &[true]));
}

#[test]
fn pruning_an_already_pruned_word_is_a_no_op() {
    let teacher = SimulatedTeacher::new(samples::reset_then_window());
    let mut obs = ObservationStructure::new(&teacher, 1);
    obs.request(&word(&obs, "0.7:a 0.9:a"));
    obs.request(&word(&obs, "0.7:a 1.2:a"));
    obs.flush();
    let states = obs.stats().language_states;
    let event = PruneEvent {
        word: word(&obs, "0.7:a"),
        resets: vec![false],
    };
    obs.searchprune(&event);
    assert_eq!(obs.stats().language_states, states);
    assert!(obs.rebuild_queue().is_empty());
}

#[test]
fn prune_hook_sees_every_event() {
    use std::cell::RefCell;
    use std::rc::Rc;
    let teacher = SimulatedTeacher::new(samples::reset_split());
    let mut obs = ObservationStructure::new(&teacher, 4);
    let seen = Rc::new(RefCell::new(Vec::new()));
    let sink = seen.clone();
    obs.set_prune_hook(Box::new(move |o, e| {
        sink.borrow_mut().push((e.resets.clone(), o.check_pruning().len()));
    }));
    for w in SPLIT_WORDS {
        obs.request(&word(&obs, w));
    }
    obs.flush();
    let seen = seen.borrow();
    assert_eq!(seen.len(), obs.stats().prunes);
    assert!(seen.iter().any(|(r, _)| r == &vec![false]));
    assert!(seen.iter().any(|(r, _)| r == &vec![true]));
}

#[test]
fn tog_keeps_coverage_and_correspondence() {
    let teacher = SimulatedTeacher::new(samples::reset_on_b());
    let mut obs = ObservationStructure::new(&teacher, 3);
    for w in ["1:a 0.5:b 3.5:a", "0.5:b 1:a", "1:a 2.5:b 0.25:a", "4:a 1:b"] {
        obs.request(&word(&obs, w));
        obs.flush();
        assert!(obs.check_tog().is_empty(), "{:?}", obs.check_tog());
        assert!(obs.check_tdg_tree().is_empty());
    }
    let dot = obs.tog_dot();
    assert!(dot.starts_with("digraph"));
    assert!(obs.tdg_dot().contains("shape=diamond"));
}

#[test]
fn words_ending_in_an_invalid_state_are_not_expected_there() {
    let teacher = SimulatedTeacher::new(samples::reset_then_window());
    let mut obs = ObservationStructure::new(&teacher, 1);
    obs.request(&word(&obs, "0.7:a 0.9:a"));
    obs.request(&word(&obs, "0.7:a 1.2:a"));
    obs.flush();
    obs.request(&word(&obs, "0.5:a"));
    obs.flush();
    assert!(obs.concrete_invalid(&word(&obs, "0.5:a"), &[false]));
    assert!(obs.check_tog().is_empty(), "{:?}", obs.check_tog());
}
