//! K-equivalence classes of clock values and valuations.

use std::fmt;

use num::{BigInt, Zero};

use super::clock::ClockValuation;
use super::guard::{Bound, ClockInterval, Guard};
use super::rational::{floor_u32, is_integer, Rational};

/// Class of a single clock value for a fixed maximal constant `K`.
///
/// `Open(n)` stands for the open interval `(n, n+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClockClass {
    Point(u32),
    Open(u32),
    AboveK,
}

impl ClockClass {
    pub fn of(value: &Rational, k: u32) -> Self {
        let kk = Rational::from_integer(BigInt::from(k));
        if value > &kk {
            ClockClass::AboveK
        } else if is_integer(value) {
            ClockClass::Point(floor_u32(value))
        } else {
            ClockClass::Open(floor_u32(value))
        }
    }

    /// Position in the linear order `[0] < (0,1) < [1] < ... < [K] < >K`.
    pub fn index(self, k: u32) -> u32 {
        match self {
            ClockClass::Point(n) => 2 * n,
            ClockClass::Open(n) => 2 * n + 1,
            ClockClass::AboveK => 2 * k + 1,
        }
    }

    pub fn interval(self, k: u32) -> ClockInterval {
        match self {
            ClockClass::Point(n) => ClockInterval {
                lower: Some(Bound::new(n, false)),
                upper: Some(Bound::new(n, false)),
            },
            ClockClass::Open(n) => ClockInterval {
                lower: Some(Bound::new(n, true)),
                upper: Some(Bound::new(n + 1, true)),
            },
            ClockClass::AboveK => ClockInterval {
                lower: Some(Bound::new(k, true)),
                upper: None,
            },
        }
    }

    /// True when every value of the class lies in `iv`.
    pub fn within(self, iv: &ClockInterval, k: u32) -> bool {
        let own = self.interval(k);
        iv.intersect(&own) == own.intersect(&ClockInterval::TOP)
    }

    /// A representative value of the class.
    pub fn sample(self) -> Rational {
        match self {
            ClockClass::Point(n) => Rational::from_integer(BigInt::from(n)),
            ClockClass::Open(n) => Rational::new(BigInt::from(2 * n + 1), BigInt::from(2)),
            ClockClass::AboveK => Rational::zero(),
        }
    }
}

impl fmt::Display for ClockClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClockClass::Point(n) => write!(f, "[{n}]"),
            ClockClass::Open(n) => write!(f, "({},{})", n, n + 1),
            ClockClass::AboveK => f.write_str(">K"),
        }
    }
}

/// One [`ClockClass`] per clock.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KClass {
    classes: Vec<ClockClass>,
}

impl KClass {
    pub fn new(classes: Vec<ClockClass>) -> Self {
        KClass { classes }
    }

    pub fn of(v: &ClockValuation, k: u32) -> Self {
        KClass {
            classes: v.values().iter().map(|x| ClockClass::of(x, k)).collect(),
        }
    }

    pub fn zero(clocks: usize) -> Self {
        KClass {
            classes: vec![ClockClass::Point(0); clocks],
        }
    }

    pub fn clocks(&self) -> usize {
        self.classes.len()
    }

    pub fn get(&self, clock: usize) -> ClockClass {
        self.classes[clock]
    }

    pub fn classes(&self) -> &[ClockClass] {
        &self.classes
    }

    pub fn reset(&self, clock: usize) -> Self {
        let mut classes = self.classes.clone();
        classes[clock] = ClockClass::Point(0);
        KClass { classes }
    }

    pub fn contains(&self, v: &ClockValuation, k: u32) -> bool {
        *self == KClass::of(v, k)
    }

    /// The class as a guard (exact for `Point`/`Open`, `x > K` otherwise).
    pub fn to_guard(&self, k: u32) -> Guard {
        Guard::from_intervals(self.classes.iter().map(|c| c.interval(k)).collect())
    }

    /// True when the class lies inside `g`.
    pub fn within(&self, g: &Guard, k: u32) -> bool {
        !g.is_empty()
            && self
                .classes
                .iter()
                .enumerate()
                .all(|(c, cl)| cl.within(g.interval(c), k))
    }
}

impl fmt::Display for KClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (i, c) in self.classes.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(">")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timed::guard::Rel;
    use crate::timed::rational::ratio;

    fn val(xs: &[(i64, i64)]) -> ClockValuation {
        ClockValuation::from_values(xs.iter().map(|&(p, q)| ratio(p, q)).collect())
    }

    #[test]
    fn class_examples() {
        use ClockClass::*;
        assert_eq!(KClass::of(&val(&[(3, 2), (3, 2)]), 3).classes(), &[Open(1), Open(1)]);
        assert_eq!(KClass::of(&val(&[(1, 1)]), 3).classes(), &[Point(1)]);
        assert_eq!(KClass::of(&val(&[(21, 5), (2, 1)]), 3).classes(), &[AboveK, Point(2)]);
        assert_eq!(ClockClass::of(&ratio(3, 1), 3), Point(3));
    }

    // Independent statement of K-equivalence on single values.
    fn k_equivalent(x: &Rational, y: &Rational, k: u32) -> bool {
        let kk = Rational::from_integer(BigInt::from(k));
        if x > &kk && y > &kk {
            return true;
        }
        if x > &kk || y > &kk {
            return false;
        }
        x.floor() == y.floor() && (x.is_integer() == y.is_integer())
    }

    #[test]
    fn class_equality_matches_relation() {
        let vals: Vec<Rational> = (0..40).map(|n| ratio(n, 7)).collect();
        for x in &vals {
            for y in &vals {
                assert_eq!(
                    ClockClass::of(x, 3) == ClockClass::of(y, 3),
                    k_equivalent(x, y, 3),
                    "{x} {y}"
                );
            }
        }
    }

    #[test]
    fn within_guards() {
        use ClockClass::*;
        let g = Guard::from_atoms(1, [(0, Rel::Le, 2)]).unwrap();
        assert!(KClass::new(vec![Open(1)]).within(&g, 4));
        assert!(KClass::new(vec![Point(2)]).within(&g, 4));
        assert!(!KClass::new(vec![Open(2)]).within(&g, 4));
        let h = Guard::from_atoms(1, [(0, Rel::Gt, 4)]).unwrap();
        assert!(KClass::new(vec![AboveK]).within(&h, 4));
        assert!(KClass::new(vec![AboveK]).within(&Guard::top(1), 4));
    }
}
