use std::time::Instant;

use rera::learner::{learn, Limits};
use rera::rera::{equivalent, samples, Equivalence, Rera};
use rera::teacher::SimulatedTeacher;

fn run(target: Rera, k: u32) -> (bool, bool, u64, u64, f64) {
    let teacher = SimulatedTeacher::new(target.clone());
    let start = Instant::now();
    let out = learn(&teacher, k, &Limits::default());
    let secs = start.elapsed().as_secs_f64();
    let eq = equivalent(&out.hypothesis, &target).unwrap() == Equivalence::Equivalent;
    (out.success, eq, out.teacher.membership_count, out.teacher.equivalence_count, secs)
}

#[test]
fn learns_the_reset_window() {
    let r = run(samples::reset_then_window(), 2);
    println!("{r:?}");
    assert!(r.0 && r.1);
}

#[test]
fn learns_the_reset_on_b_target() {
    let r = run(samples::reset_on_b(), 4);
    println!("{r:?}");
    assert!(r.0 && r.1);
}
