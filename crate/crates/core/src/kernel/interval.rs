use std::fmt;

use num_traits::Zero;

use super::rational::{format_rational, Rational};

/// An open interval `(lo, hi)` of the real line.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RealInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl RealInterval {
    pub fn new(lo: Rational, hi: Rational) -> RealInterval {
        RealInterval { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }

    pub fn measure(&self) -> Rational {
        if self.is_empty() {
            Rational::zero()
        } else {
            &self.hi - &self.lo
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo < x && x < &self.hi
    }
}

impl fmt::Display for RealInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", format_rational(&self.lo), format_rational(&self.hi))
    }
}
