use std::fmt;

use num_traits::Zero;

use crate::kernel::{dyadic, format_rational, Rational, Word};

/// A non-negative rational function on Cantor space, constant on each cell
/// `[w]` with `|w| = depth`. Cell `i` is the depth-length word spelling `i`.
#[derive(Clone, PartialEq, Eq)]
pub struct StepFunction {
    depth: usize,
    cells: Vec<Rational>,
}

impl StepFunction {
    pub const MAX_DEPTH: usize = 16;

    pub fn zero(depth: usize) -> StepFunction {
        assert!(depth <= Self::MAX_DEPTH, "step function depth {depth} too large");
        StepFunction {
            depth,
            cells: vec![Rational::zero(); 1 << depth],
        }
    }

    pub fn from_cells(depth: usize, cells: Vec<Rational>) -> StepFunction {
        assert_eq!(cells.len(), 1 << depth);
        assert!(cells.iter().all(|v| *v >= Rational::zero()), "negative step value");
        StepFunction { depth, cells }
    }

    /// `value · χ_[word]`.
    pub fn indicator(word: Word, value: Rational, depth: usize) -> StepFunction {
        let mut f = StepFunction::zero(depth);
        f.raise(word, &value);
        f
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn cells(&self) -> &[Rational] {
        &self.cells
    }

    pub fn value(&self, cell: u64) -> &Rational {
        &self.cells[cell as usize]
    }

    /// Pointwise `self := max(self, value · χ_[word])`.
    pub fn raise(&mut self, word: Word, value: &Rational) {
        for c in word.cell_range(self.depth) {
            let cell = &mut self.cells[c as usize];
            if *cell < *value {
                *cell = value.clone();
            }
        }
    }

    /// Exact `Σ value · 2^-depth`.
    pub fn integral(&self) -> Rational {
        let total: Rational = self.cells.iter().sum();
        total * dyadic(self.depth as u32)
    }

    pub fn max(&self, other: &StepFunction) -> StepFunction {
        self.zip(other, |a, b| if a >= b { a.clone() } else { b.clone() })
    }

    pub fn min(&self, other: &StepFunction) -> StepFunction {
        self.zip(other, |a, b| if a <= b { a.clone() } else { b.clone() })
    }

    fn zip(&self, other: &StepFunction, op: impl Fn(&Rational, &Rational) -> Rational) -> StepFunction {
        assert_eq!(self.depth, other.depth, "step functions of different depth");
        StepFunction {
            depth: self.depth,
            cells: self.cells.iter().zip(&other.cells).map(|(a, b)| op(a, b)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.cells.iter().all(Zero::is_zero)
    }
}

impl fmt::Debug for StepFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StepFunction(depth={}", self.depth)?;
        for (i, v) in self.cells.iter().enumerate() {
            if !v.is_zero() {
                write!(f, ", {}={}", Word::cell(i as u64, self.depth), format_rational(v))?;
            }
        }
        f.write_str(")")
    }
}
