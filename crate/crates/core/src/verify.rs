//! Brute-force checkers for the constructions.
//!
//! Nothing here calls into the construction modules. Checkers read a result,
//! replay its log on a fresh copy of the input and compare against the liminf
//! oracles and the exact kernel measures.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::fatou::{FatouResult, StepFunction};
use crate::kernel::{dyadic, format_rational, CylinderSet, Rational, RealInterval, Word};
use crate::measurecover::{FrequencyFamily, MeasureCoverResult, PartialFunction, TreeCoverResult};
use crate::opencover::{CoverMode, OmegaFamily, OpenCoverResult};
use crate::randlab::{BarDeficiency, DecoderTable, StabilizedTest, TestApproximation};
use crate::setcover::SetCoverResult;
use crate::traces::{
    liminf_func_value, liminf_measure_value, liminf_open, liminf_sets, liminf_tree_value,
    FuncFamily, MeasureFamily, OpenFamily, SetFamily, TreeFamily,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Counterexample or supporting value.
    pub witness: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Verification {
    pub checks: Vec<Check>,
}

impl Verification {
    pub fn new() -> Verification {
        Verification::default()
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, witness: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            witness: witness.into(),
        });
    }

    /// Records the first failure from `items`, or a pass with `ok` as witness.
    fn first_failure<I>(&mut self, name: &str, ok: impl Into<String>, items: I)
    where
        I: IntoIterator<Item = Option<String>>,
    {
        match items.into_iter().flatten().next() {
            Some(bad) => self.check(name, false, bad),
            None => self.check(name, true, ok),
        }
    }

    pub fn extend(&mut self, other: Verification) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for Verification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {} {}", c.name, if c.passed { "PASS" } else { "FAIL" }, c.witness)?;
        }
        Ok(())
    }
}

fn q(v: &Rational) -> String {
    format_rational(v)
}

/// `min(⌊v·2^g⌋, 2^g) / 2^g`.
pub fn grid_floor(v: &Rational, g: u32) -> Rational {
    let scale = BigInt::one() << g;
    let scaled = (v * Rational::from_integer(scale.clone())).floor().to_integer();
    let clamped = if scaled > scale { scale.clone() } else { scaled };
    Rational::new(clamped, scale)
}

fn on_grid(v: &Rational, g: u32) -> bool {
    let scaled = v * Rational::from_integer(BigInt::one() << g);
    scaled.is_integer() && *v > Rational::zero() && *v <= Rational::one()
}

pub fn verify_set_cover(f: &SetFamily, k: u32, res: &SetCoverResult) -> Verification {
    let mut v = Verification::new();
    let bound = 1u64 << k;
    let nmax = f.nmax();
    let mut work: Vec<BTreeSet<String>> = (0..=nmax).map(|n| f.member(n).clone()).collect();
    let mut rebuilt = BTreeSet::new();
    let mut bad = None;
    for (i, op) in res.log.iter().enumerate() {
        let ok = op.start <= nmax
            && f.universe().contains(&op.element)
            && (op.start..=nmax).all(|n| work[n].contains(&op.element) || (work[n].len() as u64) < bound);
        if !ok && bad.is_none() {
            bad = Some(format!("operation {i} ({}, {}) not acceptable", op.start, op.element));
        }
        for slot in work.iter_mut().skip(op.start) {
            slot.insert(op.element.clone());
        }
        rebuilt.insert(op.element.clone());
    }
    v.first_failure("log-acceptable", format!("{} operations", res.log.len()), [bad]);
    v.check(
        "log-matches-cover",
        rebuilt == res.cover,
        format!("{} elements", rebuilt.len()),
    );
    v.check(
        "cover-size",
        res.cover.len() as u64 <= bound,
        format!("{} <= {bound}", res.cover.len()),
    );
    let limit = liminf_sets(f);
    let missing = limit.difference(&res.cover).next();
    v.check(
        "liminf-covered",
        missing.is_none(),
        missing.map_or(format!("{} liminf elements", limit.len()), |u| format!("missing {u}")),
    );
    v
}

/// Sum of a flat table, with a check that every value is non-negative.
fn semimeasure_sum(values: impl Iterator<Item = Rational>) -> Option<Rational> {
    let mut sum = Rational::zero();
    for x in values {
        if x < Rational::zero() {
            return None;
        }
        sum += x;
    }
    Some(sum)
}

pub fn verify_measure_cover(f: &MeasureFamily, g: u32, res: &MeasureCoverResult) -> Verification {
    let mut v = Verification::new();
    let nmax = f.nmax();
    let mut work: Vec<BTreeMap<String, Rational>> = (0..=nmax).map(|n| f.member(n).clone()).collect();
    let mut best: BTreeMap<String, Rational> = BTreeMap::new();
    let mut bad = None;
    for (i, op) in res.log.iter().enumerate() {
        if op.start > nmax || !on_grid(&op.value, g) {
            bad.get_or_insert(format!("operation {i} is malformed"));
            continue;
        }
        for slot in work.iter_mut().skip(op.start) {
            let cur = slot.entry(op.key.clone()).or_insert_with(Rational::zero);
            if *cur < op.value {
                *cur = op.value.clone();
            }
        }
        for (n, slot) in work.iter().enumerate().skip(op.start) {
            let sum: Rational = slot.values().sum();
            if sum > Rational::one() && bad.is_none() {
                bad = Some(format!(
                    "operation {i} ({}, {}, {}) leaves m_{n} with sum {}",
                    op.key,
                    op.start,
                    q(&op.value),
                    q(&sum)
                ));
            }
        }
        let b = best.entry(op.key.clone()).or_insert_with(Rational::zero);
        if *b < op.value {
            *b = op.value.clone();
        }
    }
    v.first_failure("log-acceptable", format!("{} increases", res.log.len()), [bad]);
    let table = res.table.values();
    let mismatch = f
        .universe()
        .iter()
        .find(|u| best.get(*u).cloned().unwrap_or_else(Rational::zero) != res.table.get(u))
        .or_else(|| table.keys().find(|u| !best.contains_key(*u)));
    v.check(
        "log-matches-table",
        mismatch.is_none(),
        mismatch.map_or(String::new(), |u| format!("at {u}")),
    );
    match semimeasure_sum(table.values().cloned()) {
        Some(sum) => v.check("semimeasure", sum <= Rational::one(), format!("sum {}", q(&sum))),
        None => v.check("semimeasure", false, "negative value"),
    }
    v.first_failure(
        "gridfloor-bound",
        format!("{} elements", f.universe().len()),
        f.universe().iter().map(|u| {
            let need = grid_floor(&liminf_measure_value(f, u), g);
            let got = res.table.get(u);
            (got < need).then(|| format!("{u}: {} < {}", q(&got), q(&need)))
        }),
    );
    v
}

fn tree_get(a: &BTreeMap<Word, Rational>, w: Word) -> Rational {
    a.get(&w).cloned().unwrap_or_else(Rational::zero)
}

/// First word where `a` breaks the tree constraint, if any.
fn tree_defect(a: &BTreeMap<Word, Rational>) -> Option<String> {
    if tree_get(a, Word::ROOT) > Rational::one() {
        return Some(format!("a(e) = {}", q(&tree_get(a, Word::ROOT))));
    }
    let parents: BTreeSet<Word> = a.keys().filter_map(|w| w.parent()).collect();
    for y in parents {
        let kids = tree_get(a, y.child(false)) + tree_get(a, y.child(true));
        if tree_get(a, y) < kids {
            return Some(format!("a({y}) = {} < {}", q(&tree_get(a, y)), q(&kids)));
        }
    }
    None
}

pub fn verify_tree_cover(f: &TreeFamily, g: u32, res: &TreeCoverResult) -> Verification {
    let mut v = Verification::new();
    let nmax = f.nmax();
    let mut work: Vec<BTreeMap<Word, Rational>> = (0..=nmax).map(|n| f.member(n).clone()).collect();
    let mut bad = None;
    for (i, op) in res.log.iter().enumerate() {
        if op.start > nmax || !on_grid(&op.value, g) {
            bad.get_or_insert(format!("operation {i} is malformed"));
            continue;
        }
        for (n, slot) in work.iter_mut().enumerate().skip(op.start) {
            if tree_get(slot, op.key) < op.value {
                slot.insert(op.key, op.value.clone());
            }
            let mut y = op.key;
            while let Some(p) = y.parent() {
                let kids = tree_get(slot, p.child(false)) + tree_get(slot, p.child(true));
                if tree_get(slot, p) < kids {
                    slot.insert(p, kids);
                }
                y = p;
            }
            if let Some(d) = tree_defect(slot) {
                bad.get_or_insert(format!("after operation {i}, a_{n}: {d}"));
            }
        }
    }
    v.first_failure("log-acceptable", format!("{} increases", res.log.len()), [bad]);
    v.first_failure("tree-constraint", format!("root {}", q(&res.table.root())), [tree_defect(res.table.values())]);
    v.first_failure(
        "gridfloor-bound",
        format!("{} words", f.universe().len()),
        f.universe().iter().map(|&w| {
            let need = grid_floor(&liminf_tree_value(f, w), g);
            let got = res.table.get(w);
            (got < need).then(|| format!("{w}: {} < {}", q(&got), q(&need)))
        }),
    );
    v
}

/// `μ_n(x)` straight from the definition.
fn frequency(f: &PartialFunction, x: &str, n: usize) -> Rational {
    let hits = (0..n).filter(|&i| f.get(i) == Some(x)).count();
    Rational::new(BigInt::from(hits), BigInt::from(n))
}

/// Checks the frequency family and that `table` dominates every suffix minimum.
pub fn verify_frequency(
    f: &PartialFunction,
    horizon: usize,
    g: u32,
    freq: &FrequencyFamily,
    res: &MeasureCoverResult,
) -> Verification {
    let mut v = Verification::new();
    let range: BTreeSet<&str> = f.values().values().map(String::as_str).collect();
    v.first_failure(
        "frequency-table",
        format!("T = {horizon}"),
        (1..=horizon).flat_map(|n| {
            range.iter().map(move |x| {
                let want = frequency(f, x, n);
                let got = freq.tables.get(n - 1).map_or_else(Rational::zero, |t| t.get(x));
                (got != want).then(|| format!("mu_{n}({x}) = {} != {}", q(&got), q(&want)))
            })
        }),
    );
    v.first_failure(
        "frequency-semimeasure",
        "all sums <= 1",
        freq.tables.iter().enumerate().map(|(n, t)| {
            let s = t.total();
            (s > Rational::one()).then(|| format!("mu_{} sums to {}", n + 1, q(&s)))
        }),
    );
    v.first_failure(
        "suffix-min-dominated",
        format!("{} values", range.len()),
        range.iter().flat_map(|x| {
            (1..=horizon).map(move |start| {
                let low = (start..=horizon).map(|n| frequency(f, x, n)).min().expect("non-empty");
                let need = grid_floor(&low, g);
                let got = res.table.get(x);
                (got < need).then(|| format!("{x} from {start}: {} < {}", q(&got), q(&need)))
            })
        }),
    );
    v
}

fn delta(eps: &Rational, eps_prime: &Rational, t: usize) -> Rational {
    (eps_prime - eps) * dyadic(t as u32 + 1)
}

pub fn verify_open_cover(f: &OpenFamily, eps: &Rational, eps_prime: &Rational, res: &OpenCoverResult) -> Verification {
    let mut v = Verification::new();
    let rebuilt = res
        .pieces
        .iter()
        .fold(CylinderSet::empty(), |acc, p| acc.union(&p.set));
    v.check(
        "pieces-match-cover",
        rebuilt == res.cover,
        format!("{} pieces", res.pieces.len()),
    );
    let measure = res.cover.measure();
    v.check(
        "measure",
        measure <= *eps_prime,
        format!("{} <= {}", q(&measure), q(eps_prime)),
    );
    let limit = liminf_open(f);
    let missed = limit.intersect(&res.cover);
    let uncovered = limit.words().iter().find(|w| !missed.contains_cylinder(**w));
    v.check(
        "liminf-covered",
        missed == limit,
        uncovered.map_or(format!("liminf measure {}", q(&limit.measure())), |w| format!("uncovered part of [{w}]")),
    );
    if res.mode != CoverMode::Blocks {
        v.first_failure(
            "pieces-inside-cylinders",
            "all",
            res.pieces.iter().map(|p| {
                (!p.set.is_subset(&CylinderSet::cylinder(p.word)))
                    .then(|| format!("attempt {} leaves [{}]", p.attempt, p.word))
            }),
        );
        v.first_failure(
            "working-members",
            format!("all <= {}", q(eps_prime)),
            (0..=f.nmax()).map(|n| {
                let grown = res
                    .pieces
                    .iter()
                    .filter(|p| p.start <= n)
                    .fold(f.member(n).clone(), |acc, p| acc.union(&p.set));
                let m = grown.measure();
                (m > *eps_prime).then(|| format!("U_{n} grows to {}", q(&m)))
            }),
        );
    }
    if res.mode == CoverMode::Trim {
        v.first_failure(
            "trim-count",
            "trims * delta_t < mu([w])",
            res.pieces.iter().map(|p| {
                let spent = delta(eps, eps_prime, p.attempt) * Rational::from_integer(BigInt::from(p.trims));
                (spent >= dyadic(p.word.len() as u32))
                    .then(|| format!("attempt {} trimmed {} times", p.attempt, p.trims))
            }),
        );
    }
    v
}

pub fn verify_fatou(f: &FuncFamily, eps: &Rational, eps_prime: &Rational, g: u32, res: &FatouResult) -> Verification {
    let mut v = Verification::new();
    let depth = f.depth().unwrap_or(0);
    let phi: &StepFunction = &res.phi;
    let cells = phi.cells();
    v.check("phi-depth", phi.depth() == depth, format!("depth {}", phi.depth()));
    let integral = cells.iter().sum::<Rational>() * dyadic(depth as u32);
    v.check(
        "integral",
        integral <= *eps_prime,
        format!("{} <= {}", q(&integral), q(eps_prime)),
    );
    v.first_failure(
        "gridfloor-bound",
        format!("{} cells", cells.len()),
        (0..cells.len() as u64).map(|c| {
            let need = grid_floor(&liminf_func_value(f, c), g);
            let got = cells.get(c as usize).cloned().unwrap_or_else(Rational::zero);
            (got < need).then(|| format!("cell {}: {} < {}", Word::cell(c, depth), q(&got), q(&need)))
        }),
    );
    v.first_failure(
        "trim-count",
        "trims * delta_t < r * mu([U])",
        res.trim_log.iter().map(|t| {
            let spent = delta(eps, eps_prime, t.attempt) * Rational::from_integer(BigInt::from(t.trims));
            let mass = &t.value * dyadic(t.cell.len() as u32);
            (spent >= mass).then(|| format!("attempt {} trimmed {} times", t.attempt, t.trims))
        }),
    );
    v
}

pub fn verify_omega(prefix: &[Rational], cycle: &[Rational], eps: &Rational, fam: &OmegaFamily) -> Verification {
    let mut v = Verification::new();
    let third = eps / Rational::from_integer(BigInt::from(3));
    let w = |i: usize| {
        if i < prefix.len() {
            prefix[i].clone()
        } else {
            cycle[(i - prefix.len()) % cycle.len()].clone()
        }
    };
    // Past the prefix, one full period already attains every value.
    let window = prefix.len() + cycle.len();
    let inf_from = |i: usize| (i..i + window).map(w).min().expect("non-empty window");
    let w_min = (prefix.len()..window).map(w).min().expect("non-empty cycle");
    v.check("w_min", w_min == fam.w_min, q(&w_min));

    let positions = prefix.len()..prefix.len() + 2 * cycle.len();
    v.first_failure(
        "interval-formula",
        format!("{} positions", positions.end),
        (0..positions.end).map(|i| {
            let want = RealInterval::new(inf_from(i) - &third, w(i) + &third);
            let got = fam.intervals.get(i);
            (got != Some(&want)).then(|| format!("U_{i} should be {want}"))
        }),
    );
    v.first_failure(
        "w_min-inside",
        "every tail interval",
        positions.clone().map(|i| {
            let u = RealInterval::new(inf_from(i) - &third, w(i) + &third);
            (!u.contains(&w_min)).then(|| format!("U_{i}"))
        }),
    );
    let small = &third + &third;
    v.first_failure(
        "measure-small",
        format!("{} at minimum positions", q(&small)),
        positions.map(|i| {
            let u = RealInterval::new(inf_from(i) - &third, w(i) + &third);
            (w(i) == w_min && u.measure() != small).then(|| format!("mu(U_{i}) = {}", q(&u.measure())))
        }),
    );
    v.first_failure(
        "reported-checks",
        format!("{} identities", fam.checks.len()),
        fam.checks.iter().map(|c| (!c.holds).then(|| format!("{} at {}", c.name, c.position))),
    );
    v
}

/// Brute-force complexity: scan the whole table.
fn c_dec(dec: &DecoderTable, u: Word) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (p, o) in dec.entries() {
        if *o == u {
            best = Some(best.map_or(p.len(), |b| b.min(p.len())));
        }
    }
    best
}

/// Compares `sets[n][c] = D_n^c` against enumeration of all strings of length `n`.
pub fn verify_deficiency_sets(dec: &DecoderTable, sets: &[Vec<BTreeSet<Word>>]) -> Verification {
    let mut v = Verification::new();
    let mut mismatch = None;
    let mut overflow = None;
    for (n, row) in sets.iter().enumerate() {
        for (c, got) in row.iter().enumerate() {
            let want: BTreeSet<Word> = (0..1u64 << n)
                .map(|i| Word::cell(i, n))
                .filter(|&u| c_dec(dec, u).is_some_and(|k| (k as i64) < n as i64 - c as i64))
                .collect();
            if *got != want {
                mismatch.get_or_insert(format!("D_{n}^{c}"));
            }
            if (got.len() as i64) > (1i64 << (n - c)) - 1 {
                overflow.get_or_insert(format!("|D_{n}^{c}| = {}", got.len()));
            }
        }
    }
    v.first_failure("deficiency-sets", "all levels", [mismatch]);
    v.first_failure("counting-bound", "|D_n^c| <= 2^(n-c) - 1", [overflow]);
    v
}

pub fn verify_deficiency_family(f: &OpenFamily, c: usize) -> Verification {
    let mut v = Verification::new();
    let budget = dyadic(c as u32);
    v.first_failure(
        "measure-bound",
        format!("all <= {}", q(&budget)),
        f.members().iter().enumerate().map(|(n, u)| {
            let m = u.measure();
            (m > budget).then(|| format!("mu(U_{n}) = {}", q(&m)))
        }),
    );
    v
}

pub fn verify_bar_deficiency(dec: &DecoderTable, x: Word, res: &BarDeficiency) -> Verification {
    let mut v = Verification::new();
    let mut best: Option<i64> = None;
    for len in x.len()..=res.bound.min(Word::MAX_LEN) {
        // Only extensions that some program outputs can carry a deficiency.
        let candidates: BTreeSet<Word> = dec
            .entries()
            .values()
            .copied()
            .filter(|y| y.len() == len && x.is_prefix_of(*y))
            .collect();
        for y in candidates {
            if let Some(k) = c_dec(dec, y) {
                let d = y.len() as i64 - k as i64;
                best = Some(best.map_or(d, |b| b.min(d)));
            }
        }
    }
    v.check(
        "bar-deficiency",
        best == res.value,
        best.map_or("no described extension".to_string(), |d| d.to_string()),
    );
    let witness_ok = match (res.witness, res.value) {
        (Some(y), Some(d)) => {
            x.is_prefix_of(y) && y.len() <= res.bound && c_dec(dec, y).map(|k| y.len() as i64 - k as i64) == Some(d)
        }
        (None, None) => true,
        _ => false,
    };
    v.check("witness", witness_ok, res.witness.map_or("-".to_string(), |w| w.to_string()));
    v
}

pub fn verify_stabilized(t: &TestApproximation, c: usize, res: &StabilizedTest) -> Verification {
    let mut v = Verification::new();
    let budget = dyadic(c as u32);
    let levels: BTreeSet<usize> = t.entries().keys().map(|&(_, n)| n).collect();
    v.check(
        "levels",
        res.levels.iter().map(|l| l.n).collect::<BTreeSet<_>>() == levels,
        format!("{} levels", levels.len()),
    );
    let mut bad = None;
    for level in &res.levels {
        let n = level.n;
        let mut total = Rational::zero();
        let mut kept = Vec::new();
        for i in 0..=n {
            if let Some(&w) = t.entries().get(&(i, n)) {
                let m = dyadic(w.len() as u32);
                if &total + &m <= budget {
                    total += m;
                    kept.push((i, w));
                }
            }
        }
        if kept != level.kept {
            bad.get_or_insert(format!("deletion pass differs at n = {n}"));
        }
        let covered: Vec<Word> = if n <= 20 {
            (0..1u64 << n)
                .map(|i| Word::cell(i, n))
                .filter(|u| kept.iter().any(|(_, w)| w.is_prefix_of(*u)))
                .collect()
        } else {
            level.strings.clone()
        };
        if covered != level.strings {
            bad.get_or_insert(format!("S_{n} differs"));
        }
        if !covered.is_empty() && (n < c || covered.len() as u128 > 1u128 << (n - c)) {
            bad.get_or_insert(format!("|S_{n}| = {} exceeds 2^(n-c)", covered.len()));
        }
        let codes: BTreeSet<Word> = level.codes.iter().map(|(_, code)| *code).collect();
        let sources: Vec<Word> = level.codes.iter().map(|(u, _)| *u).collect();
        if codes.len() != level.codes.len()
            || sources != covered
            || level.codes.iter().any(|(_, code)| code.len() + c != n)
        {
            bad.get_or_insert(format!("codes at n = {n} are not injective {}-bit words", n.saturating_sub(c)));
        }
    }
    v.first_failure("stabilized-levels", "all levels", [bad]);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::rational::ratio;
    use crate::setcover::RayAddition;
    use crate::traces::Trace;

    #[test]
    fn grid_floor_values() {
        assert_eq!(grid_floor(&ratio(3, 4), 1), ratio(1, 2));
        assert_eq!(grid_floor(&ratio(3, 2), 2), ratio(1, 1));
        assert_eq!(grid_floor(&ratio(1, 8), 2), ratio(0, 1));
    }

    #[test]
    fn set_cover_mutation_fails() {
        let f = Trace::parse("family sets nmax=2\nadd 0 a\nadd 0 b\nadd 1 b\nadd 1 c")
            .unwrap()
            .sets()
            .unwrap();
        let good = SetCoverResult {
            cover: ["b", "c"].iter().map(|s| s.to_string()).collect(),
            log: vec![
                RayAddition { start: 0, element: "b".into() },
                RayAddition { start: 1, element: "c".into() },
            ],
            bound: 2,
        };
        assert!(verify_set_cover(&f, 1, &good).passed());
        let mut bad = good.clone();
        bad.log[1].element = "a".into();
        assert!(!verify_set_cover(&f, 1, &bad).passed());
    }

    #[test]
    fn tree_defects() {
        let a: BTreeMap<Word, Rational> = [(Word::ROOT, ratio(1, 2)), ("0".parse().unwrap(), ratio(3, 4))]
            .into_iter()
            .collect();
        assert!(tree_defect(&a).is_some());
        let b: BTreeMap<Word, Rational> = [(Word::ROOT, ratio(1, 1)), ("1".parse().unwrap(), ratio(3, 4))]
            .into_iter()
            .collect();
        assert!(tree_defect(&b).is_none());
    }

    #[test]
    fn display_lists_checks() {
        let mut v = Verification::new();
        v.check("a", true, "x");
        v.check("b", false, "y");
        assert_eq!(v.to_string(), "a PASS x\nb FAIL y\n");
        assert!(!v.passed());
        assert_eq!(v.failures().count(), 1);
    }
}
