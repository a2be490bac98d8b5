//! Active learning of deterministic reset-free event-recording automata.

pub mod cli;
pub mod learner;
pub mod obs;
pub mod refine;
pub mod rera;
pub mod teacher;
pub mod timed;
