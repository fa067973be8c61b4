//! Seeded random inputs. Every generator is a pure function of its
//! configuration and seed, and its output satisfies the preconditions of the
//! matching construction.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kernel::{CylinderSet, Rational, Word};
use crate::measurecover::PartialFunction;
use crate::randlab::{DecoderTable, TestApproximation};
use crate::traces::{Event, FamilyKind, Target, Trace};

pub const MAX_NMAX: usize = 64;
pub const MAX_DEPTH: usize = 12;
pub const MAX_SIZE: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConfig {
    pub kind: FamilyKind,
    pub nmax: usize,
    /// Required for `open`, `tree` and `func`.
    pub depth: Option<usize>,
    /// Universe size for token families, attempts per member otherwise.
    pub size: usize,
    /// Member size bound `2^k` for `sets`.
    pub k: u32,
    /// Per-member measure (`open`) or integral (`func`) bound.
    pub eps: Rational,
}

impl GenConfig {
    pub fn new(kind: FamilyKind, nmax: usize, depth: Option<usize>) -> GenConfig {
        GenConfig {
            kind,
            nmax,
            depth,
            size: 8,
            k: 2,
            eps: Rational::new(BigInt::one(), BigInt::from(4)),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.nmax == 0 || self.nmax > MAX_NMAX {
            return Err(Error::input(format!("nmax must be in 1..={MAX_NMAX}")));
        }
        if self.size == 0 || self.size > MAX_SIZE {
            return Err(Error::input(format!("size must be in 1..={MAX_SIZE}")));
        }
        match (self.kind.has_depth(), self.depth) {
            (true, Some(d)) if (1..=MAX_DEPTH).contains(&d) => {}
            (true, _) => return Err(Error::input(format!("depth must be in 1..={MAX_DEPTH}"))),
            (false, Some(_)) => return Err(Error::input(format!("{} family takes no depth", self.kind))),
            (false, None) => {}
        }
        if self.k > 16 {
            return Err(Error::input("k must be at most 16"));
        }
        if self.eps <= Rational::zero() || self.eps > Rational::one() {
            return Err(Error::input("eps must be in (0, 1]"));
        }
        Ok(())
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn frac(num: u64, den: u64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

fn random_word(rng: &mut ChaCha8Rng, len: usize) -> Word {
    Word::cell(rng.gen_range(0..1u64 << len), len)
}

fn random_word_up_to(rng: &mut ChaCha8Rng, min_len: usize, max_len: usize) -> Word {
    let len = rng.gen_range(min_len..=max_len);
    random_word(rng, len)
}

fn token(i: usize) -> String {
    format!("x{i}")
}

/// Pushes events in a shuffled order, with a few harmless repeats.
fn emit(rng: &mut ChaCha8Rng, trace: &mut Trace, mut events: Vec<Event>) -> Result<()> {
    let repeats: Vec<Event> = events.iter().filter(|_| rng.gen_ratio(1, 10)).cloned().collect();
    events.extend(repeats);
    events.shuffle(rng);
    for e in events {
        trace.push(e)?;
    }
    Ok(())
}

pub fn generate(cfg: &GenConfig, seed: u64) -> Result<Trace> {
    cfg.validate()?;
    let mut rng = rng(seed);
    let mut trace = Trace::new(cfg.kind, cfg.nmax, cfg.depth)?;
    let events = match cfg.kind {
        FamilyKind::Sets => gen_sets(&mut rng, cfg),
        FamilyKind::Open => gen_open(&mut rng, cfg),
        FamilyKind::Measure => gen_measure(&mut rng, cfg),
        FamilyKind::Tree => gen_tree(&mut rng, cfg),
        FamilyKind::Func => gen_func(&mut rng, cfg),
    };
    emit(&mut rng, &mut trace, events)?;
    Ok(trace)
}

fn gen_sets(rng: &mut ChaCha8Rng, cfg: &GenConfig) -> Vec<Event> {
    let bound = (1usize << cfg.k).min(cfg.size);
    let universe: Vec<usize> = (0..cfg.size).collect();
    let count = rng.gen_range(0..=bound);
    let persistent: Vec<usize> = universe.choose_multiple(rng, count).copied().collect();
    let mut events = Vec::new();
    for n in 0..cfg.nmax {
        let tail = n + 1 == cfg.nmax;
        let mut member: Vec<usize> = persistent
            .iter()
            .copied()
            .filter(|_| tail || rng.gen_ratio(4, 5))
            .collect();
        let target = rng.gen_range(0..=bound);
        while member.len() < target {
            let u = *universe.choose(rng).expect("non-empty universe");
            if !member.contains(&u) {
                member.push(u);
            }
        }
        events.extend(member.into_iter().map(|u| Event {
            n,
            target: Target::Token(token(u)),
            value: None,
        }));
    }
    events
}

fn gen_open(rng: &mut ChaCha8Rng, cfg: &GenConfig) -> Vec<Event> {
    let depth = cfg.depth.expect("validated");
    let mut persistent = CylinderSet::empty();
    let mut persistent_words = Vec::new();
    for _ in 0..rng.gen_range(0..=3) {
        let w = random_word_up_to(rng, 1, depth);
        let next = persistent.union(&CylinderSet::cylinder(w));
        if next.measure() * Rational::from_integer(2.into()) <= cfg.eps {
            persistent = next;
            persistent_words.push(w);
        }
    }
    let mut events = Vec::new();
    for n in 0..cfg.nmax {
        let tail = n + 1 == cfg.nmax;
        let mut member = CylinderSet::empty();
        let mut words = Vec::new();
        for &w in &persistent_words {
            if tail || rng.gen_ratio(3, 4) {
                member = member.union(&CylinderSet::cylinder(w));
                words.push(w);
            }
        }
        for _ in 0..rng.gen_range(0..=cfg.size) {
            let w = random_word_up_to(rng, 1, depth);
            let next = member.union(&CylinderSet::cylinder(w));
            if next.measure() <= cfg.eps {
                member = next;
                words.push(w);
            }
        }
        events.extend(words.into_iter().map(|w| Event {
            n,
            target: Target::Word(w),
            value: None,
        }));
    }
    events
}

const DENOMINATORS: [u64; 8] = [2, 3, 4, 6, 8, 12, 16, 32];

fn raise(n: usize, target: Target, value: Rational) -> Event {
    Event {
        n,
        target,
        value: Some(value),
    }
}

/// A raise to `value`, sometimes preceded by a raise to a smaller value.
fn raise_twice(rng: &mut ChaCha8Rng, n: usize, target: Target, units: u64, den: u64) -> Vec<Event> {
    let mut out = Vec::new();
    if units > 1 && rng.gen_ratio(1, 4) {
        out.push(raise(n, target.clone(), frac(rng.gen_range(1..units), den)));
    }
    out.push(raise(n, target, frac(units, den)));
    out
}

fn gen_measure(rng: &mut ChaCha8Rng, cfg: &GenConfig) -> Vec<Event> {
    let mut events = Vec::new();
    let stable: Vec<usize> = (0..cfg.size).filter(|_| rng.gen_ratio(1, 2)).collect();
    for n in 0..cfg.nmax {
        let den = *DENOMINATORS.choose(rng).expect("non-empty");
        let mut left = rng.gen_range(0..=den);
        let mut chosen: Vec<usize> = (0..cfg.size).filter(|_| rng.gen_ratio(1, 3)).collect();
        chosen.extend(stable.iter().copied().filter(|_| rng.gen_ratio(3, 4)));
        chosen.sort_unstable();
        chosen.dedup();
        chosen.shuffle(rng);
        for u in chosen {
            if left == 0 {
                break;
            }
            let units = rng.gen_range(1..=left);
            left -= units;
            events.extend(raise_twice(rng, n, Target::Token(token(u)), units, den));
        }
    }
    events
}

fn gen_tree(rng: &mut ChaCha8Rng, cfg: &GenConfig) -> Vec<Event> {
    let depth = cfg.depth.expect("validated");
    let mut events = Vec::new();
    for n in 0..cfg.nmax {
        let den = *DENOMINATORS.choose(rng).expect("non-empty");
        let root = rng.gen_range(0..=den);
        let mut stack = vec![(Word::ROOT, root)];
        while let Some((y, units)) = stack.pop() {
            if units == 0 {
                continue;
            }
            events.extend(raise_twice(rng, n, Target::Word(y), units, den));
            if y.len() < depth && rng.gen_ratio(3, 4) {
                let left = rng.gen_range(0..=units);
                let right = rng.gen_range(0..=units - left);
                stack.push((y.child(false), left));
                stack.push((y.child(true), right));
            }
        }
    }
    events
}

fn gen_func(rng: &mut ChaCha8Rng, cfg: &GenConfig) -> Vec<Event> {
    let depth = cfg.depth.expect("validated");
    let cells = 1u64 << depth;
    let mut events = Vec::new();
    for n in 0..cfg.nmax {
        let den = *DENOMINATORS.choose(rng).expect("non-empty");
        // Units of 1/(den·2^depth) available for the integral.
        let budget = &cfg.eps * Rational::from_integer(BigInt::from(den * cells));
        let mut left: u64 = budget.floor().to_integer().try_into().unwrap_or(0);
        let mut values = vec![0u64; cells as usize];
        for _ in 0..rng.gen_range(0..=cfg.size) {
            if left == 0 {
                break;
            }
            let c = rng.gen_range(0..cells) as usize;
            let add = rng.gen_range(1..=left.min(2 * den));
            values[c] += add;
            left -= add;
        }
        for (c, &v) in values.iter().enumerate() {
            if v > 0 {
                events.push(raise(n, Target::Word(Word::cell(c as u64, depth)), frac(v, den)));
            }
        }
        // A coarser raise below the cell minimum changes nothing.
        let w = random_word_up_to(rng, 0, depth);
        let floor = w.cell_range(depth).map(|c| values[c as usize]).min().unwrap_or(0);
        if floor > 0 {
            events.push(raise(n, Target::Word(w), frac(floor, den)));
        }
    }
    events
}

/// `f(i)` for `i < horizon`, defined with probability about 3/4, with
/// `range` possible values skewed toward the first few.
pub fn gen_partial_function(seed: u64, horizon: usize, range: usize) -> PartialFunction {
    let mut rng = rng(seed);
    let mut values = BTreeMap::new();
    for i in 0..horizon {
        if rng.gen_ratio(3, 4) {
            let j = rng.gen_range(0..range.max(1));
            let j = rng.gen_range(0..=j);
            values.insert(i, format!("v{j}"));
        }
    }
    PartialFunction::from_map(values)
}

/// Up to `entries` programs of length `≤ max_program`, outputs of length `≤ max_output`.
pub fn gen_decoder(seed: u64, entries: usize, max_program: usize, max_output: usize) -> DecoderTable {
    let mut rng = rng(seed);
    let mut dec = DecoderTable::new();
    for _ in 0..entries {
        let p = random_word_up_to(&mut rng, 0, max_program);
        let o = random_word_up_to(&mut rng, 0, max_output);
        let _ = dec.insert(p, o);
    }
    dec
}

/// Random `I_{i,n}` for `i ≤ n ≤ max_n`, word lengths around `c`.
pub fn gen_test_approximation(seed: u64, max_n: usize, c: usize) -> TestApproximation {
    let mut rng = rng(seed);
    let mut t = TestApproximation::new();
    for n in 0..=max_n {
        for i in 0..=n {
            if rng.gen_ratio(1, 2) {
                let lo = c.min(n);
                let len = rng.gen_range(lo.saturating_sub(1)..=n);
                t.insert(i, n, random_word(&mut rng, len)).expect("fresh valid entry");
            }
        }
    }
    t
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaInput {
    pub prefix: Vec<Rational>,
    pub cycle: Vec<Rational>,
    pub eps: Rational,
}

pub fn gen_omega(seed: u64) -> OmegaInput {
    let mut rng = rng(seed);
    let value = |rng: &mut ChaCha8Rng| {
        let den = *DENOMINATORS.choose(rng).expect("non-empty");
        frac(rng.gen_range(0..=den), den)
    };
    let prefix = (0..rng.gen_range(0..=4)).map(|_| value(&mut rng)).collect();
    let cycle = (0..rng.gen_range(1..=4)).map(|_| value(&mut rng)).collect();
    let den = *DENOMINATORS.choose(&mut rng).expect("non-empty");
    let eps = frac(rng.gen_range(1..=den), den);
    OmegaInput { prefix, cycle, eps }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::rational::ratio;

    fn cfg(kind: FamilyKind, nmax: usize, depth: Option<usize>) -> GenConfig {
        GenConfig::new(kind, nmax, depth)
    }

    #[test]
    fn deterministic() {
        for kind in [FamilyKind::Sets, FamilyKind::Open, FamilyKind::Measure, FamilyKind::Tree, FamilyKind::Func] {
            let depth = kind.has_depth().then_some(4);
            let a = generate(&cfg(kind, 5, depth), 0).unwrap().render();
            let b = generate(&cfg(kind, 5, depth), 0).unwrap().render();
            assert_eq!(a, b);
            assert_eq!(Trace::parse(&a).unwrap().render(), a);
        }
        assert_eq!(gen_decoder(3, 10, 8, 10), gen_decoder(3, 10, 8, 10));
        assert_eq!(gen_omega(3), gen_omega(3));
    }

    #[test]
    fn caps() {
        assert!(generate(&cfg(FamilyKind::Sets, 65, None), 0).is_err());
        assert!(generate(&cfg(FamilyKind::Open, 4, Some(13)), 0).is_err());
        assert!(generate(&cfg(FamilyKind::Open, 4, None), 0).is_err());
        assert!(generate(&cfg(FamilyKind::Sets, 4, Some(2)), 0).is_err());
    }

    #[test]
    fn preconditions_hold() {
        for seed in 0..50 {
            let mut c = cfg(FamilyKind::Open, 6, Some(6));
            c.eps = ratio(1, 4);
            let f = generate(&c, seed).unwrap().open().unwrap();
            assert!(f.members().iter().all(|u| u.measure() <= ratio(1, 4)));

            let mut c = cfg(FamilyKind::Sets, 6, None);
            c.k = 1;
            let f = generate(&c, seed).unwrap().sets().unwrap();
            assert!(f.members().iter().all(|u| u.len() <= 2));

            let f = generate(&cfg(FamilyKind::Measure, 6, None), seed).unwrap().measure().unwrap();
            assert!(f.members().iter().all(|m| m.values().sum::<Rational>() <= Rational::one()));

            let f = generate(&cfg(FamilyKind::Func, 6, Some(3)), seed).unwrap().func().unwrap();
            assert!(f.members().iter().all(|g| g.integral() <= ratio(1, 4)));

            let t = generate(&cfg(FamilyKind::Tree, 6, Some(4)), seed).unwrap();
            crate::measurecover::run_tree_cover(&t.tree().unwrap(), crate::measurecover::RationalGrid::new(2).unwrap())
                .unwrap();
        }
    }

    #[test]
    fn single_member_family() {
        let f = generate(&cfg(FamilyKind::Sets, 1, None), 7).unwrap().sets().unwrap();
        assert_eq!(f.nmax(), 1);
        assert_eq!(f.member(5), f.member(0));
    }
}
