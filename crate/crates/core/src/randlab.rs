//! Deficiency sets of a finite description method and the coding of a
//! stabilized test.
//!
//! Plain complexity is replaced by `C_dec(u)`, the length of the shortest
//! program the decoder table maps to `u`. The counting arguments only use
//! that there are fewer than `2^m` programs of length `< m`, which holds for
//! any table.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;

use crate::error::{Error, Result};
use crate::kernel::{dyadic, format_rational, Rational, Word};
use crate::traces::{Event, FamilyKind, OpenFamily, Target, Trace};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DecoderTable {
    entries: BTreeMap<Word, Word>,
}

fn parse_word(text: &str) -> Result<Word, String> {
    text.parse().map_err(|e| format!("bad word `{text}`: {e}"))
}

impl DecoderTable {
    pub fn new() -> DecoderTable {
        DecoderTable::default()
    }

    /// Adds `program ↦ output`; a program may only be listed once.
    pub fn insert(&mut self, program: Word, output: Word) -> Result<()> {
        if self.entries.contains_key(&program) {
            return Err(Error::input(format!("program {program} listed twice")));
        }
        self.entries.insert(program, output);
        Ok(())
    }

    /// Lines `<program> <output>`; the empty word is written `e`.
    pub fn parse(text: &str) -> Result<DecoderTable> {
        let mut table = DecoderTable::new();
        for (i, line) in text.split('\n').enumerate() {
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(' ').collect();
            let [program, output] = parts[..] else {
                return Err(Error::parse(i + 1, "expected `<program> <output>`"));
            };
            let program = parse_word(program).map_err(|m| Error::parse(i + 1, m))?;
            let output = parse_word(output).map_err(|m| Error::parse(i + 1, m))?;
            if table.entries.contains_key(&program) {
                return Err(Error::parse(i + 1, format!("program {program} listed twice")));
            }
            table.entries.insert(program, output);
        }
        Ok(table)
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|(p, o)| format!("{p} {o}\n")).collect()
    }

    pub fn entries(&self) -> &BTreeMap<Word, Word> {
        &self.entries
    }

    /// `C_dec` for every described string.
    pub fn complexities(&self) -> BTreeMap<Word, usize> {
        let mut out: BTreeMap<Word, usize> = BTreeMap::new();
        for (p, o) in &self.entries {
            out.entry(*o)
                .and_modify(|c| *c = (*c).min(p.len()))
                .or_insert(p.len());
        }
        out
    }

    /// `C_dec(u)`, `None` when no program outputs `u`.
    pub fn complexity(&self, u: Word) -> Option<usize> {
        self.entries.iter().filter(|(_, o)| **o == u).map(|(p, _)| p.len()).min()
    }

    /// `d(u) = |u| - C_dec(u)`, `None` when `u` has no description.
    pub fn deficiency(&self, u: Word) -> Option<i64> {
        self.complexity(u).map(|c| u.len() as i64 - c as i64)
    }
}

/// `D_n^c`: strings of length `n` with `C_dec(u) < n - c`.
pub fn deficiency_sets(dec: &DecoderTable, n: usize, c: usize) -> BTreeSet<Word> {
    dec.complexities()
        .into_iter()
        .filter(|(u, k)| u.len() == n && (*k as i64) < n as i64 - c as i64)
        .map(|(u, _)| u)
        .collect()
}

/// The open family `U_n = ⋃_{u ∈ D_n^c} [u]` for `n < nmax`, as a trace.
pub fn deficiency_cover_trace(dec: &DecoderTable, c: usize, nmax: usize, depth: usize) -> Result<Trace> {
    if depth < nmax {
        return Err(Error::input(format!("depth {depth} is smaller than nmax {nmax}")));
    }
    let mut trace = Trace::new(FamilyKind::Open, nmax, Some(depth))?;
    for n in 0..nmax {
        for u in deficiency_sets(dec, n, c) {
            trace.push(Event {
                n,
                target: Target::Word(u),
                value: None,
            })?;
        }
    }
    Ok(trace)
}

pub fn deficiency_cover_family(dec: &DecoderTable, c: usize, nmax: usize, depth: usize) -> Result<OpenFamily> {
    deficiency_cover_trace(dec, c, nmax, depth)?.open()
}

/// `(2^-c, 2^-(c-1))`, the cover parameters for the family at level `c`.
pub fn cover_parameters(c: usize) -> Result<(Rational, Rational)> {
    if c < 1 {
        return Err(Error::input("c must be at least 1 to set eps' = 2^-(c-1)"));
    }
    Ok((dyadic(c as u32), dyadic(c as u32 - 1)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BarDeficiency {
    /// Minimum of `d(y)` over described extensions; `None` if there are none.
    pub value: Option<i64>,
    pub witness: Option<Word>,
    /// Extensions are searched up to this length.
    pub bound: usize,
}

/// `min d(y)` over extensions `y` of `x` with `|y| ≤ bound`.
///
/// Strings without a description are skipped: their deficiency is `-∞`
/// only in the sense that nothing is known about them yet.
pub fn bar_deficiency(dec: &DecoderTable, x: Word, bound: usize) -> Result<BarDeficiency> {
    if x.len() > bound {
        return Err(Error::input(format!("|{x}| = {} exceeds L = {bound}", x.len())));
    }
    let best = dec
        .complexities()
        .into_iter()
        .filter(|(y, _)| x.is_prefix_of(*y) && y.len() <= bound)
        .map(|(y, k)| (y.len() as i64 - k as i64, y))
        .min();
    Ok(BarDeficiency {
        value: best.map(|(d, _)| d),
        witness: best.map(|(_, y)| y),
        bound,
    })
}

/// Intervals `I_{i,n}`; absent pairs are `⊥`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TestApproximation {
    entries: BTreeMap<(usize, usize), Word>,
}

impl TestApproximation {
    pub fn new() -> TestApproximation {
        TestApproximation::default()
    }

    fn check(i: usize, n: usize, word: Word) -> Result<(), String> {
        if n < i {
            return Err(format!("I_{{{i},{n}}} must be undefined for n < i"));
        }
        if word.len() > n {
            return Err(format!("I_{{{i},{n}}} = {word} is longer than {n}"));
        }
        Ok(())
    }

    pub fn insert(&mut self, i: usize, n: usize, word: Word) -> Result<()> {
        Self::check(i, n, word).map_err(Error::input)?;
        if self.entries.insert((i, n), word).is_some() {
            return Err(Error::input(format!("I_{{{i},{n}}} listed twice")));
        }
        Ok(())
    }

    /// Lines `<i> <n> <word>`.
    pub fn parse(text: &str) -> Result<TestApproximation> {
        let mut t = TestApproximation::new();
        for (lineno, line) in text.split('\n').enumerate().map(|(k, l)| (k + 1, l)) {
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(' ').collect();
            let [i, n, word] = parts[..] else {
                return Err(Error::parse(lineno, "expected `<i> <n> <word>`"));
            };
            let index = |s: &str| {
                s.parse::<usize>()
                    .ok()
                    .filter(|_| s.bytes().all(|b| b.is_ascii_digit()))
                    .ok_or_else(|| Error::parse(lineno, format!("bad index `{s}`")))
            };
            let (i, n) = (index(i)?, index(n)?);
            let word = parse_word(word).map_err(|m| Error::parse(lineno, m))?;
            Self::check(i, n, word).map_err(|m| Error::parse(lineno, m))?;
            if t.entries.insert((i, n), word).is_some() {
                return Err(Error::parse(lineno, format!("I_{{{i},{n}}} listed twice")));
            }
        }
        Ok(t)
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|((i, n), w)| format!("{i} {n} {w}\n")).collect()
    }

    pub fn entries(&self) -> &BTreeMap<(usize, usize), Word> {
        &self.entries
    }

    /// Every `n` with at least one defined interval, ascending.
    pub fn levels(&self) -> BTreeSet<usize> {
        self.entries.keys().map(|&(_, n)| n).collect()
    }

    /// `(i, I_{i,n})` for fixed `n`, `i` ascending.
    pub fn column(&self, n: usize) -> Vec<(usize, Word)> {
        let mut col: Vec<(usize, Word)> = self
            .entries
            .iter()
            .filter(|((_, m), _)| *m == n)
            .map(|(&(i, _), &w)| (i, w))
            .collect();
        col.sort_unstable_by_key(|&(i, _)| i);
        col
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizedLevel {
    pub n: usize,
    pub kept: Vec<(usize, Word)>,
    pub deleted: Vec<(usize, Word)>,
    /// `S_n` in lexicographic order.
    pub strings: Vec<Word>,
    /// `u ↦` its ordinal in `S_n`, written with `n - c` bits.
    pub codes: Vec<(Word, Word)>,
}

impl StabilizedLevel {
    pub fn kept_measure(&self) -> Rational {
        self.kept.iter().map(|(_, w)| dyadic(w.len() as u32)).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizedTest {
    pub c: usize,
    pub levels: Vec<StabilizedLevel>,
}

/// Largest `n - c` for which `S_n` is enumerated.
pub const MAX_CODE_BITS: usize = 24;

pub fn stabilize_test(t: &TestApproximation, c: usize) -> Result<StabilizedTest> {
    let budget = dyadic(c as u32);
    let mut levels = Vec::new();
    for n in t.levels() {
        let mut total = Rational::from_integer(0.into());
        let (mut kept, mut deleted) = (Vec::new(), Vec::new());
        for (i, w) in t.column(n) {
            let m = dyadic(w.len() as u32);
            if &total + &m > budget {
                deleted.push((i, w));
            } else {
                total += m;
                kept.push((i, w));
            }
        }
        let strings: Vec<Word> = if kept.is_empty() {
            Vec::new()
        } else {
            if n < c || n - c > MAX_CODE_BITS {
                return Err(Error::input(format!(
                    "level n = {n} cannot be coded with n - c bits for c = {c}"
                )));
            }
            kept.iter()
                .flat_map(|(_, w)| w.cell_range(n))
                .collect::<BTreeSet<u64>>()
                .into_iter()
                .map(|idx| Word::cell(idx, n))
                .collect()
        };
        if strings.len() as u128 > 1u128 << (n.saturating_sub(c)) {
            return Err(Error::input(format!("S_{n} has more than 2^(n-c) strings")));
        }
        let codes = strings
            .iter()
            .enumerate()
            .map(|(k, &u)| (u, Word::cell(k as u64, n - c)))
            .collect();
        levels.push(StabilizedLevel {
            n,
            kept,
            deleted,
            strings,
            codes,
        });
    }
    Ok(StabilizedTest { c, levels })
}

/// Checks the `2^-c` budget of a level, for diagnostics.
pub fn level_within_budget(level: &StabilizedLevel, c: usize) -> Result<(), String> {
    let m = level.kept_measure();
    if m > dyadic(c as u32) || m > Rational::one() {
        return Err(format!(
            "level {} keeps measure {} > 2^-{c}",
            level.n,
            format_rational(&m)
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::rational::ratio;
    use crate::opencover::run_trim_cover;
    use crate::traces::liminf_open;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn one_entry() -> DecoderTable {
        DecoderTable::parse("0 00").unwrap()
    }

    #[test]
    fn decoder_parse() {
        let d = DecoderTable::parse("0 00\ne 1\n\n11 e\n").unwrap();
        assert_eq!(d.complexity(w("1")), Some(0));
        assert_eq!(d.complexity(Word::ROOT), Some(2));
        assert_eq!(d.deficiency(w("00")), Some(1));
        assert_eq!(d.deficiency(w("01")), None);
        assert_eq!(DecoderTable::parse(&d.render()).unwrap(), d);
        assert!(matches!(DecoderTable::parse("0 1\n0 0"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(DecoderTable::parse("0 1 1"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(DecoderTable::parse("0 2"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn deficiency_set_examples() {
        assert_eq!(deficiency_sets(&one_entry(), 2, 0), [w("00")].into_iter().collect());
        assert!(deficiency_sets(&one_entry(), 2, 1).is_empty());
        assert!(deficiency_sets(&one_entry(), 2, 2).is_empty());
        for n in 0..5 {
            for c in 0..=n {
                assert!(deficiency_sets(&DecoderTable::new(), n, c).is_empty());
            }
        }
    }

    #[test]
    fn cover_family_examples() {
        let f = deficiency_cover_family(&one_entry(), 0, 3, 3).unwrap();
        assert_eq!(f.member(2).words(), &[w("00")]);
        assert_eq!(f.member(2).measure(), ratio(1, 4));
        assert!(f.member(0).is_empty() && f.member(1).is_empty());

        let empty = deficiency_cover_family(&DecoderTable::new(), 1, 3, 4).unwrap();
        assert!(empty.members().iter().all(|u| u.is_empty()));

        let dense = DecoderTable::parse("e 0\n0 00\n1 01").unwrap();
        let f = deficiency_cover_family(&dense, 3, 3, 3).unwrap();
        assert!(f.members().iter().all(|u| u.is_empty()));

        assert!(deficiency_cover_family(&one_entry(), 0, 3, 2).is_err());
        assert!(cover_parameters(0).is_err());
        assert_eq!(cover_parameters(2).unwrap(), (ratio(1, 4), ratio(1, 2)));
    }

    #[test]
    fn trim_cover_of_deficiency_family() {
        let dec = DecoderTable::parse("e 00\n0 000\n1 001\n00 0000\n01 0001\n10 1111").unwrap();
        let c = 1;
        let f = deficiency_cover_family(&dec, c, 5, 5).unwrap();
        let (eps, eps_prime) = cover_parameters(c).unwrap();
        let res = run_trim_cover(&f, &eps, &eps_prime).unwrap();
        assert!(res.cover.measure() <= eps_prime);
        assert!(liminf_open(&f).is_subset(&res.cover));
    }

    #[test]
    fn bar_deficiency_examples() {
        let b = bar_deficiency(&one_entry(), w("0"), 2).unwrap();
        assert_eq!((b.value, b.witness, b.bound), (Some(1), Some(w("00")), 2));

        let d = DecoderTable::parse("e 01").unwrap();
        let b = bar_deficiency(&d, w("01"), 2).unwrap();
        assert_eq!(b.value, d.deficiency(w("01")));

        let b = bar_deficiency(&DecoderTable::new(), w("1"), 4).unwrap();
        assert_eq!((b.value, b.witness), (None, None));

        assert!(bar_deficiency(&one_entry(), w("000"), 2).is_err());
    }

    #[test]
    fn bar_deficiency_takes_the_minimum() {
        let d = DecoderTable::parse("e 000\n0 0\n10 01").unwrap();
        // d(000) = 3, d(0) = 0, d(01) = 0; "1" has no described extension.
        assert_eq!(bar_deficiency(&d, Word::ROOT, 3).unwrap().value, Some(0));
        assert_eq!(bar_deficiency(&d, w("00"), 3).unwrap().value, Some(3));
        assert_eq!(bar_deficiency(&d, w("00"), 2).unwrap().value, None);
    }

    #[test]
    fn stabilize_single_interval() {
        let t = TestApproximation::parse("0 2 01").unwrap();
        let s = stabilize_test(&t, 0).unwrap();
        assert_eq!(s.levels.len(), 1);
        assert_eq!(s.levels[0].strings, vec![w("01")]);
        assert_eq!(s.levels[0].codes, vec![(w("01"), w("00"))]);
    }

    #[test]
    fn stabilize_deletes_later_excess() {
        let t = TestApproximation::parse("0 2 0\n1 2 1").unwrap();
        let s = stabilize_test(&t, 1).unwrap();
        let level = &s.levels[0];
        assert_eq!(level.kept, vec![(0, w("0"))]);
        assert_eq!(level.deleted, vec![(1, w("1"))]);
        assert_eq!(level.strings, vec![w("00"), w("01")]);
        assert_eq!(level.codes, vec![(w("00"), w("0")), (w("01"), w("1"))]);
        assert!(level_within_budget(level, 1).is_ok());
    }

    #[test]
    fn stabilize_empty_and_invalid() {
        assert!(stabilize_test(&TestApproximation::new(), 3).unwrap().levels.is_empty());
        assert!(matches!(TestApproximation::parse("3 2 0"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(TestApproximation::parse("0 1 01"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(TestApproximation::parse("0 2 0\n0 2 1"), Err(Error::Parse { line: 2, .. })));
        let mut t = TestApproximation::new();
        t.insert(0, 2, w("1")).unwrap();
        assert!(t.insert(0, 2, w("0")).is_err());
        assert_eq!(TestApproximation::parse(&t.render()).unwrap(), t);
    }

    #[test]
    fn levels_below_c_keep_nothing() {
        let t = TestApproximation::parse("0 1 0\n0 2 e").unwrap();
        let s = stabilize_test(&t, 3).unwrap();
        assert!(s.levels.iter().all(|l| l.kept.is_empty() && l.strings.is_empty()));
    }
}
