use std::fmt;

use num::Zero;
use thiserror::Error;

use super::rational::{Decimal, Rational};

/// Index of an action symbol in an [`Alphabet`].
///
/// Every action `a` owns the clock `x_a`, so the same index doubles as a
/// clock identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Action(pub usize);

impl Action {
    pub fn clock(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClockError {
    #[error("negative delay {0}")]
    NegativeDelay(String),
    #[error("unknown clock index {0}")]
    UnknownClock(usize),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("unknown clock `{0}`")]
    UnknownClockName(String),
    #[error("duplicate action `{0}` in alphabet")]
    DuplicateAction(String),
}

/// A finite, ordered set of action names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self, ClockError> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i].contains(s) {
                return Err(ClockError::DuplicateAction(s.clone()));
            }
        }
        Ok(Alphabet { symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn actions(&self) -> impl Iterator<Item = Action> + '_ {
        (0..self.symbols.len()).map(Action)
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn name(&self, a: Action) -> &str {
        &self.symbols[a.0]
    }

    pub fn clock_name(&self, clock: usize) -> String {
        format!("x_{}", self.symbols[clock])
    }

    pub fn action(&self, name: &str) -> Result<Action, ClockError> {
        self.symbols
            .iter()
            .position(|s| s == name)
            .map(Action)
            .ok_or_else(|| ClockError::UnknownAction(name.to_string()))
    }

    /// Resolves `x_a` (or a bare `a`) to the clock of action `a`.
    pub fn clock(&self, name: &str) -> Result<usize, ClockError> {
        let bare = name.strip_prefix("x_").unwrap_or(name);
        self.action(bare)
            .map(Action::clock)
            .map_err(|_| ClockError::UnknownClockName(name.to_string()))
    }

    pub fn contains(&self, a: Action) -> bool {
        a.0 < self.symbols.len()
    }
}

/// Assignment of a nonnegative value to every clock `x_a`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClockValuation {
    values: Vec<Rational>,
}

impl ClockValuation {
    pub fn zero(clocks: usize) -> Self {
        ClockValuation {
            values: vec![Rational::zero(); clocks],
        }
    }

    pub fn from_values(values: Vec<Rational>) -> Self {
        ClockValuation { values }
    }

    pub fn clocks(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, clock: usize) -> &Rational {
        &self.values[clock]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn elapse(&self, delay: &Rational) -> Result<Self, ClockError> {
        if delay < &Rational::zero() {
            return Err(ClockError::NegativeDelay(delay.to_string()));
        }
        Ok(self.elapsed(delay))
    }

    /// Elapse without the sign check; callers guarantee `delay >= 0`.
    pub(crate) fn elapsed(&self, delay: &Rational) -> Self {
        ClockValuation {
            values: self.values.iter().map(|v| v + delay).collect(),
        }
    }

    pub fn reset(&self, clocks: &[usize]) -> Result<Self, ClockError> {
        let mut values = self.values.clone();
        for &c in clocks {
            let slot = values.get_mut(c).ok_or(ClockError::UnknownClock(c))?;
            *slot = Rational::zero();
        }
        Ok(ClockValuation { values })
    }

    pub(crate) fn reset_one(&self, clock: usize) -> Self {
        let mut values = self.values.clone();
        values[clock] = Rational::zero();
        ClockValuation { values }
    }

    /// The valuation reached after one step: elapse `delay`, then reset the
    /// clock of `action` if `reset` is set.
    pub(crate) fn step(&self, delay: &Rational, action: Action, reset: bool) -> Self {
        let v = self.elapsed(delay);
        if reset {
            v.reset_one(action.clock())
        } else {
            v
        }
    }
}

impl fmt::Display for ClockValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", Decimal(v))?;
        }
        f.write_str(")")
    }
}
