//! Increase operations for semimeasures: flat tables, tree semimeasures, and
//! the frequency semimeasures of a partial function.
//!
//! An `(u, N, r)` increase raises `m_n(u)` to at least `r` for every `n ≥ N`.
//! It is acceptable when every raised member is still a semimeasure (for the
//! tree variant: when `a(Λ) ≤ 1` after repairing prefixes). The output at `u`
//! is the largest `r` of any accepted increase at `u`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::kernel::{dyadic, format_rational, rational, Rational, Word};
use crate::traces::{is_token, Event, FamilyKind, MeasureFamily, Target, Trace, TreeFamily};

/// The dyadic grid `{ j / 2^g : 1 ≤ j ≤ 2^g }`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RationalGrid {
    resolution: u32,
}

impl RationalGrid {
    pub const MAX_RESOLUTION: u32 = 24;

    pub fn new(resolution: u32) -> Result<RationalGrid> {
        if resolution == 0 || resolution > Self::MAX_RESOLUTION {
            return Err(Error::input(format!(
                "grid resolution must be in 1..={}",
                Self::MAX_RESOLUTION
            )));
        }
        Ok(RationalGrid { resolution })
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn len(&self) -> u64 {
        1 << self.resolution
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The `j`-th member, `1 ≤ j ≤ 2^g`.
    pub fn member(&self, j: u64) -> Rational {
        rational::dyadic_multiple(j, self.resolution)
    }

    pub fn members(&self) -> impl Iterator<Item = Rational> + '_ {
        (1..=self.len()).map(move |j| self.member(j))
    }

    /// Largest grid member not exceeding `value`, or 0 when there is none.
    pub fn floor(&self, value: &Rational) -> Rational {
        let scaled = rational::floor(&(value * Rational::from_integer(BigInt::from(self.len()))));
        let j = if scaled <= BigInt::zero() {
            0
        } else {
            scaled.to_u64().unwrap_or(u64::MAX).min(self.len())
        };
        rational::dyadic_multiple(j, self.resolution)
    }
}

/// A finite semimeasure on tokens; absent keys are 0.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SemimeasureTable {
    values: BTreeMap<String, Rational>,
}

impl SemimeasureTable {
    pub fn from_map(values: BTreeMap<String, Rational>) -> SemimeasureTable {
        SemimeasureTable {
            values: values.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        }
    }

    pub fn get(&self, key: &str) -> Rational {
        self.values.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn values(&self) -> &BTreeMap<String, Rational> {
        &self.values
    }

    pub fn total(&self) -> Rational {
        self.values.values().sum()
    }
}

/// A function on binary words with `a(Λ) ≤ 1` and `a(y) ≥ a(y0) + a(y1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeSemimeasure {
    depth: usize,
    values: BTreeMap<Word, Rational>,
}

impl TreeSemimeasure {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn get(&self, word: Word) -> Rational {
        self.values.get(&word).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn values(&self) -> &BTreeMap<Word, Rational> {
        &self.values
    }

    pub fn root(&self) -> Rational {
        self.get(Word::ROOT)
    }
}

fn tree_violation(values: &BTreeMap<Word, Rational>) -> Option<(Word, String)> {
    let get = |w: Word| values.get(&w).cloned().unwrap_or_else(Rational::zero);
    if get(Word::ROOT) > Rational::one() {
        return Some((Word::ROOT, format!("a(e) = {} > 1", format_rational(&get(Word::ROOT)))));
    }
    let mut internal: Vec<Word> = values
        .keys()
        .flat_map(|w| (0..w.len()).map(move |l| w.prefix(l)))
        .collect();
    internal.sort_unstable();
    internal.dedup();
    for y in internal {
        let children = get(y.child(false)) + get(y.child(true));
        if get(y) < children {
            return Some((
                y,
                format!(
                    "a({y}) = {} < a({y}0) + a({y}1) = {}",
                    format_rational(&get(y)),
                    format_rational(&children)
                ),
            ));
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Increase<K> {
    pub key: K,
    pub start: usize,
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureCoverResult {
    pub table: SemimeasureTable,
    /// Accepted increases that raised the output, in order.
    pub log: Vec<Increase<String>>,
}

pub fn run_measure_cover(f: &MeasureFamily, grid: RationalGrid) -> Result<MeasureCoverResult> {
    for (n, member) in f.members().iter().enumerate() {
        let sum: Rational = member.values().sum();
        if sum > Rational::one() {
            return Err(Error::input(format!(
                "m_{n} is not a semimeasure: sum = {}",
                format_rational(&sum)
            )));
        }
    }

    let universe = f.universe();
    let nmax = f.nmax();
    let mut values: Vec<Vec<Rational>> = (0..=nmax)
        .map(|n| {
            universe
                .iter()
                .map(|u| f.member(n).get(u).cloned().unwrap_or_else(Rational::zero))
                .collect()
        })
        .collect();
    let mut sums: Vec<Rational> = values.iter().map(|row| row.iter().sum()).collect();
    let one = Rational::one();

    let mut out = BTreeMap::new();
    let mut log = Vec::new();
    for (u, key) in universe.iter().enumerate() {
        let mut best = Rational::zero();
        for start in 0..=nmax {
            for r in grid.members() {
                // Anything at or below `best` was already raised for all n ≥ start.
                if r <= best {
                    continue;
                }
                let acceptable = (start..=nmax).all(|n| {
                    let cur = &values[n][u];
                    cur >= &r || &sums[n] - cur + &r <= one
                });
                // A larger r at the same start needs strictly more room.
                if !acceptable {
                    break;
                }
                for n in start..=nmax {
                    if values[n][u] < r {
                        sums[n] = &sums[n] - &values[n][u] + &r;
                        values[n][u] = r.clone();
                    }
                    assert!(sums[n] <= one, "working m_{n} stopped being a semimeasure");
                }
                best = r.clone();
                log.push(Increase {
                    key: key.clone(),
                    start,
                    value: r,
                });
            }
        }
        out.insert(key.clone(), best);
    }
    Ok(MeasureCoverResult {
        table: SemimeasureTable::from_map(out),
        log,
    })
}

/// A partial function `i ↦ token` on an initial segment of the naturals.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PartialFunction {
    values: BTreeMap<usize, String>,
}

impl PartialFunction {
    pub fn from_map(values: BTreeMap<usize, String>) -> PartialFunction {
        PartialFunction { values }
    }

    pub fn values(&self) -> &BTreeMap<usize, String> {
        &self.values
    }

    pub fn get(&self, i: usize) -> Option<&str> {
        self.values.get(&i).map(String::as_str)
    }

    /// Lines `i <token>`; a missing `i` means undefined.
    pub fn parse(text: &str) -> Result<PartialFunction> {
        let mut values = BTreeMap::new();
        for (idx, line) in text.split('\n').enumerate() {
            if line.is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let (i, token) = line
                .split_once(' ')
                .ok_or_else(|| Error::parse(lineno, "expected `<i> <token>`"))?;
            if i.is_empty() || !i.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::parse(lineno, format!("bad index `{i}`")));
            }
            let i: usize = i
                .parse()
                .map_err(|_| Error::parse(lineno, format!("index out of range `{i}`")))?;
            if !is_token(token) {
                return Err(Error::parse(lineno, format!("invalid token `{token}`")));
            }
            if values.insert(i, token.to_string()).is_some() {
                return Err(Error::parse(lineno, format!("index {i} defined twice")));
            }
        }
        Ok(PartialFunction { values })
    }

    pub fn render(&self) -> String {
        self.values.iter().map(|(i, t)| format!("{i} {t}\n")).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyFamily {
    /// `μ_1, …, μ_T`.
    pub tables: Vec<SemimeasureTable>,
    /// A `measure` trace with `nmax = T` whose member `n` is `μ_{n+1}`.
    pub trace: Trace,
}

/// `μ_n(x) = #{ i < n : f(i) = x } / n` for `n = 1..=horizon`.
pub fn frequency_semimeasures(f: &PartialFunction, horizon: usize) -> Result<FrequencyFamily> {
    if horizon == 0 {
        return Err(Error::input("horizon must be at least 1"));
    }
    if let Some((&i, _)) = f.values.range(horizon..).next() {
        return Err(Error::input(format!("f({i}) is defined beyond the horizon {horizon}")));
    }
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut tables = Vec::with_capacity(horizon);
    let mut trace = Trace::new(FamilyKind::Measure, horizon, None)?;
    for n in 1..=horizon {
        if let Some(x) = f.get(n - 1) {
            *counts.entry(x.to_string()).or_insert(0) += 1;
        }
        let denom = BigInt::from(n);
        let table: BTreeMap<String, Rational> = counts
            .iter()
            .map(|(x, &c)| (x.clone(), Rational::new(BigInt::from(c), denom.clone())))
            .collect();
        for (x, v) in &table {
            trace.push(Event {
                n: n - 1,
                target: Target::Token(x.clone()),
                value: Some(v.clone()),
            })?;
        }
        tables.push(SemimeasureTable::from_map(table));
    }
    Ok(FrequencyFamily { tables, trace })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeCoverResult {
    pub table: TreeSemimeasure,
    /// Accepted increases that raised the output at their word, in order.
    pub log: Vec<Increase<Word>>,
}

/// Raise `a(word)` to `value`, then repair prefixes upward with
/// `a(y) := max(a(y), a(y0) + a(y1))`. Returns the changed entries.
fn raise_with_repair(
    slot: &BTreeMap<Word, Rational>,
    word: Word,
    value: &Rational,
) -> Vec<(Word, Rational)> {
    let get = |w: Word, changes: &[(Word, Rational)]| {
        changes
            .iter()
            .rev()
            .find(|(c, _)| *c == w)
            .map(|(_, v)| v.clone())
            .or_else(|| slot.get(&w).cloned())
            .unwrap_or_else(Rational::zero)
    };
    let mut changes = Vec::new();
    if get(word, &changes) >= *value {
        return changes;
    }
    changes.push((word, value.clone()));
    let mut cur = word;
    while let Some(parent) = cur.parent() {
        let need = get(parent.child(false), &changes) + get(parent.child(true), &changes);
        if get(parent, &changes) >= need {
            break;
        }
        changes.push((parent, need));
        cur = parent;
    }
    changes
}

pub fn run_tree_cover(f: &TreeFamily, grid: RationalGrid) -> Result<TreeCoverResult> {
    for (n, member) in f.members().iter().enumerate() {
        if let Some((word, why)) = tree_violation(member) {
            return Err(Error::input(format!(
                "a_{n} is not a tree semimeasure at word {word}: {why}"
            )));
        }
    }
    let depth = f.depth().unwrap_or(0);
    let nmax = f.nmax();
    let mut slots: Vec<BTreeMap<Word, Rational>> = (0..=nmax).map(|n| f.member(n).clone()).collect();
    let one = Rational::one();

    let mut best: BTreeMap<Word, Rational> = BTreeMap::new();
    let mut log = Vec::new();
    for &word in f.universe() {
        let mut top = Rational::zero();
        for start in 0..=nmax {
            for r in grid.members() {
                if r <= top {
                    continue;
                }
                let plans: Vec<Vec<(Word, Rational)>> = (start..=nmax)
                    .map(|n| raise_with_repair(&slots[n], word, &r))
                    .collect();
                let acceptable = plans.iter().zip(start..=nmax).all(|(plan, n)| {
                    let root = plan
                        .iter()
                        .rev()
                        .find(|(w, _)| w.is_root())
                        .map(|(_, v)| v.clone())
                        .or_else(|| slots[n].get(&Word::ROOT).cloned())
                        .unwrap_or_else(Rational::zero);
                    root <= one
                });
                if !acceptable {
                    break;
                }
                for (plan, n) in plans.into_iter().zip(start..=nmax) {
                    for (w, v) in plan {
                        slots[n].insert(w, v);
                    }
                    assert_path_constraint(&slots[n], word, n);
                }
                top = r.clone();
                log.push(Increase {
                    key: word,
                    start,
                    value: r,
                });
            }
        }
        if !top.is_zero() {
            best.insert(word, top);
        }
    }

    Ok(TreeCoverResult {
        table: TreeSemimeasure {
            depth,
            values: minimal_tree_closure(&best),
        },
        log,
    })
}

fn assert_path_constraint(slot: &BTreeMap<Word, Rational>, word: Word, n: usize) {
    let get = |w: Word| slot.get(&w).cloned().unwrap_or_else(Rational::zero);
    let mut cur = Some(word);
    while let Some(y) = cur {
        if y.len() < Word::MAX_LEN {
            assert!(
                get(y) >= get(y.child(false)) + get(y.child(true)),
                "tree constraint broken at {y} in working a_{n}"
            );
        }
        cur = y.parent();
    }
    assert!(get(Word::ROOT) <= Rational::one(), "working a_{n}(e) exceeds 1");
}

/// The least tree semimeasure dominating `base`, built bottom-up.
fn minimal_tree_closure(base: &BTreeMap<Word, Rational>) -> BTreeMap<Word, Rational> {
    let mut out = base.clone();
    let mut words: Vec<Word> = base
        .keys()
        .flat_map(|w| (0..w.len()).map(move |l| w.prefix(l)))
        .collect();
    words.sort_unstable_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    words.dedup();
    for y in words {
        let get = |w: Word| out.get(&w).cloned().unwrap_or_else(Rational::zero);
        let need = get(y.child(false)) + get(y.child(true));
        if get(y) < need {
            out.insert(y, need);
        }
    }
    out
}

/// `2^-g`, the precision of a grid.
pub fn grid_gap(grid: RationalGrid) -> Rational {
    dyadic(grid.resolution())
}
