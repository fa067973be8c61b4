use std::fmt;

use num_bigint::BigInt;

use super::rational::Rational;
use super::word::Word;

/// A finite union of cylinders of Cantor space, kept in canonical form.
///
/// Canonical means: sorted lexicographically, no word is a prefix of another,
/// and no two siblings `x0`, `x1` are both present (they are merged into `x`).
/// Two sets denote the same point set iff their canonical word lists are equal.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct CylinderSet {
    words: Vec<Word>,
}

impl CylinderSet {
    pub fn empty() -> CylinderSet {
        CylinderSet { words: Vec::new() }
    }

    pub fn whole() -> CylinderSet {
        CylinderSet {
            words: vec![Word::ROOT],
        }
    }

    pub fn cylinder(word: Word) -> CylinderSet {
        CylinderSet { words: vec![word] }
    }

    pub fn from_words<I: IntoIterator<Item = Word>>(words: I) -> CylinderSet {
        let mut words: Vec<Word> = words.into_iter().collect();
        words.sort_unstable();
        CylinderSet {
            words: canonicalize_sorted(words),
        }
    }

    /// The union of the cells `index` (words of length `depth`).
    pub fn from_cells<I: IntoIterator<Item = u64>>(cells: I, depth: usize) -> CylinderSet {
        CylinderSet::from_words(cells.into_iter().map(|c| Word::cell(c, depth)))
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Length of the longest word; 0 for the empty set and the whole space.
    pub fn depth(&self) -> usize {
        self.words.iter().map(|w| w.len()).max().unwrap_or(0)
    }

    /// Uniform Bernoulli measure: the sum of `2^-|x|` over the words.
    pub fn measure(&self) -> Rational {
        let top = Word::MAX_LEN;
        let numer: u128 = self.words.iter().map(|w| 1u128 << (top - w.len())).sum();
        Rational::new(BigInt::from(numer), BigInt::from(1u128 << top))
    }

    pub fn union(&self, other: &CylinderSet) -> CylinderSet {
        let mut merged = Vec::with_capacity(self.words.len() + other.words.len());
        let (mut i, mut j) = (0, 0);
        while i < self.words.len() && j < other.words.len() {
            if self.words[i] <= other.words[j] {
                merged.push(self.words[i]);
                i += 1;
            } else {
                merged.push(other.words[j]);
                j += 1;
            }
        }
        merged.extend_from_slice(&self.words[i..]);
        merged.extend_from_slice(&other.words[j..]);
        CylinderSet {
            words: canonicalize_sorted(merged),
        }
    }

    /// `[x] ∩ [y]` is the cylinder of the longer word when one extends the
    /// other, and empty otherwise; distributed over both antichains.
    pub fn intersect(&self, other: &CylinderSet) -> CylinderSet {
        let (a, b) = (&self.words, &other.words);
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let (x, y) = (a[i], b[j]);
            if x.is_prefix_of(y) {
                out.push(y);
                j += 1;
            } else if y.is_prefix_of(x) {
                out.push(x);
                i += 1;
            } else if x < y {
                i += 1;
            } else {
                j += 1;
            }
        }
        CylinderSet {
            words: canonicalize_sorted(out),
        }
    }

    /// Point-set inclusion `self ⊆ other`.
    pub fn is_subset(&self, other: &CylinderSet) -> bool {
        self.intersect(other) == *self
    }

    /// Does the set contain the whole cylinder `[word]`?
    pub fn contains_cylinder(&self, word: Word) -> bool {
        CylinderSet::cylinder(word).is_subset(self)
    }

    /// Indices of the depth-`depth` cells covered by the set; requires `depth ≥ self.depth()`.
    pub fn cells(&self, depth: usize) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().flat_map(move |w| w.cell_range(depth))
    }
}

/// Input sorted lexicographically (duplicates allowed); output canonical.
fn canonicalize_sorted(sorted: Vec<Word>) -> Vec<Word> {
    let mut stack: Vec<Word> = Vec::with_capacity(sorted.len());
    for word in sorted {
        if let Some(&top) = stack.last() {
            if top.is_prefix_of(word) {
                continue;
            }
        }
        stack.push(word);
        // Siblings are adjacent in a sorted antichain; merging may cascade.
        while stack.len() >= 2 {
            let top = stack[stack.len() - 1];
            let below = stack[stack.len() - 2];
            if top.len() > 0 && top.sibling() == Some(below) {
                stack.truncate(stack.len() - 2);
                stack.push(top.parent().expect("non-root word has a parent"));
            } else {
                break;
            }
        }
    }
    stack
}

impl fmt::Display for CylinderSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.words.is_empty() {
            return f.write_str("-");
        }
        for (i, w) in self.words.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{w}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CylinderSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::rational::{int, ratio};
    use num_traits::Zero;
    use proptest::prelude::*;

    fn set(words: &[&str]) -> CylinderSet {
        CylinderSet::from_words(words.iter().map(|s| s.parse::<Word>().unwrap()))
    }

    #[test]
    fn measure_examples() {
        assert_eq!(set(&["01"]).measure(), ratio(1, 4));
        assert_eq!(set(&[]).measure(), Rational::zero());
        assert_eq!(set(&["0", "1"]).measure(), int(1));
        assert_eq!(set(&["0", "1"]), CylinderSet::whole());
    }

    #[test]
    fn union_examples() {
        assert_eq!(set(&["0"]).union(&set(&["1"])), CylinderSet::whole());
        assert_eq!(set(&["0"]).union(&set(&["01"])), set(&["0"]));
        let u = set(&["00"]).union(&set(&["11"]));
        assert_eq!(u.to_string(), "00 11");
        assert_eq!(u.measure(), ratio(1, 2));
    }

    #[test]
    fn intersect_examples() {
        assert_eq!(set(&["0"]).intersect(&set(&["01"])), set(&["01"]));
        assert_eq!(set(&["00"]).intersect(&set(&["11"])), set(&[]));
        assert_eq!(set(&["0"]).intersect(&set(&["0", "10"])), set(&["0"]));
    }

    #[test]
    fn subset_examples() {
        assert!(set(&["01"]).is_subset(&set(&["0"])));
        assert!(!set(&["0"]).is_subset(&set(&["01"])));
        assert!(set(&[]).is_subset(&set(&["110"])));
        assert!(set(&[]).is_subset(&set(&[])));
    }

    #[test]
    fn canonical_merging_cascades() {
        assert_eq!(set(&["00", "01", "1"]), CylinderSet::whole());
        assert_eq!(set(&["010", "011", "00"]).to_string(), "0");
        assert_eq!(set(&["0", "00", "000"]).to_string(), "0");
        assert_eq!(set(&["10", "0", "11"]).to_string(), "e");
    }

    /// Every canonical set of depth ≤ 3 is a subset of the 8 cells; there are 256.
    fn all_depth3_sets() -> Vec<CylinderSet> {
        (0u32..256)
            .map(|mask| CylinderSet::from_cells((0..8).filter(|c| mask >> c & 1 == 1), 3))
            .collect()
    }

    #[test]
    fn inclusion_exclusion_exhaustive_depth3() {
        let sets = all_depth3_sets();
        for a in &sets {
            for b in &sets {
                let lhs = a.union(b).measure() + a.intersect(b).measure();
                assert_eq!(lhs, a.measure() + b.measure(), "{a:?} {b:?}");
            }
        }
    }

    #[test]
    fn depth3_cell_masks_are_distinct_canonical_forms() {
        let sets = all_depth3_sets();
        let distinct: std::collections::HashSet<_> = sets.iter().cloned().collect();
        assert_eq!(distinct.len(), 256);
    }

    fn arb_set(max_depth: usize) -> impl Strategy<Value = CylinderSet> {
        prop::collection::vec((0usize..=max_depth, any::<u64>()), 0..12).prop_map(|raw| {
            CylinderSet::from_words(raw.into_iter().map(|(len, bits)| {
                let bits = if len == 0 { 0 } else { bits & ((1u64 << len) - 1) };
                Word::new(bits, len).unwrap()
            }))
        })
    }

    proptest! {
        #[test]
        fn canonicalization_is_idempotent(s in arb_set(8)) {
            let again = CylinderSet::from_words(s.words().iter().copied());
            prop_assert_eq!(again, s);
        }

        #[test]
        fn inclusion_exclusion_depth8(a in arb_set(8), b in arb_set(8)) {
            prop_assert_eq!(
                a.union(&b).measure() + a.intersect(&b).measure(),
                a.measure() + b.measure()
            );
        }

        #[test]
        fn measure_monotone_under_subset(a in arb_set(8), b in arb_set(8)) {
            let i = a.intersect(&b);
            prop_assert!(i.is_subset(&a) && i.is_subset(&b));
            prop_assert!(i.measure() <= a.measure());
            let u = a.union(&b);
            prop_assert!(a.is_subset(&u));
            prop_assert!(a.measure() <= u.measure());
        }

        #[test]
        fn union_agrees_with_cells(a in arb_set(6), b in arb_set(6)) {
            let cells: std::collections::BTreeSet<u64> = a.cells(6).chain(b.cells(6)).collect();
            prop_assert_eq!(a.union(&b), CylinderSet::from_cells(cells, 6));
        }
    }
}
