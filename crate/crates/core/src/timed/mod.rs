//! The timed-language algebra: valuations, guards, zones, K-classes and words.

pub mod clock;
pub mod guard;
pub mod kclass;
pub mod rational;
pub mod word;
pub mod zone;

pub use clock::{Action, Alphabet, ClockError, ClockValuation};
pub use guard::{Guard, Rel};
pub use kclass::{ClockClass, KClass};
pub use rational::Rational;
pub use word::{
    lambda_sum, op_combine, satisfies, GuardedWordWithResets, KClosedWord, TimedWord, TimedWordWithResets, WordError,
    ZoneWordWithResets,
};
pub use zone::Zone;
