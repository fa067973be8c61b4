//! Covering the liminf of small open sets by a set of slightly larger measure.
//!
//! Three strategies over a stabilized open family `U_0, U_1, …`, all with
//! `μ(U_n) ≤ ε`:
//!
//! * `trim`: for every start `i` and cylinder `[x]`, raise the running
//!   threshold by `δ_t`, then add `A = [x]` to all `U_n` with `n ≥ i`. While
//!   some first `U_m` (`m ≥ i`) would exceed the threshold, trim
//!   `A := A ∩ U_m`. Each trim removes more than `δ_t` of measure, so the
//!   loop stops, and a point lying in every `U_n` from some index on is
//!   never trimmed away.
//! * `naive`: the same loop without trimming at the fixed threshold `ε`;
//!   an overflowing attempt is skipped.
//! * `blocks`: start every attempt from the whole space, which collapses to
//!   unions of block intersections `U_{k_{j-1}+1..k_j}`.
//!
//! Internally each member is a bitset over the depth-`D` cells; results are
//! reported as canonical [`CylinderSet`]s.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::kernel::{dyadic, format_rational, rational, CylinderSet, RealInterval, Word};
use crate::kernel::Rational;
use crate::traces::OpenFamily;

/// Per-attempt threshold increments `δ_t = (ε' - ε) · 2^-(t+1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaSchedule {
    eps: Rational,
    budget: Rational,
}

impl DeltaSchedule {
    pub fn new(eps: &Rational, eps_prime: &Rational) -> Result<DeltaSchedule> {
        if *eps <= Rational::zero() || eps_prime <= eps {
            return Err(Error::input(format!(
                "need 0 < eps < eps', got eps = {}, eps' = {}",
                format_rational(eps),
                format_rational(eps_prime)
            )));
        }
        Ok(DeltaSchedule {
            eps: eps.clone(),
            budget: eps_prime - eps,
        })
    }

    pub fn eps(&self) -> &Rational {
        &self.eps
    }

    pub fn eps_prime(&self) -> Rational {
        &self.eps + &self.budget
    }

    pub fn budget(&self) -> &Rational {
        &self.budget
    }

    pub fn delta(&self, t: usize) -> Rational {
        &self.budget * dyadic(t as u32 + 1)
    }

    /// The threshold in force during attempt `t`: `ε + δ_0 + … + δ_t`.
    pub fn threshold(&self, t: usize) -> Rational {
        &self.eps + &self.budget * (Rational::one() - dyadic(t as u32 + 1))
    }

    /// `⌊threshold(t) · scale⌋`, exact.
    ///
    /// Once `δ`-tail `budget·scale·2^-(t+1)` drops below `1/b` (where `b` is the
    /// denominator of `ε'·scale`) the floor no longer depends on `t`, and it is
    /// `⌈ε'·scale⌉ - 1`.
    pub fn threshold_floor(&self, t: usize, scale: &BigInt) -> BigInt {
        let scale = Rational::from_integer(scale.clone());
        let top = self.eps_prime() * &scale;
        let tail = &self.budget * &scale;
        let settled = tail.numer().bits() + top.denom().bits() + 1;
        if (t as u64) + 1 > settled {
            top.ceil().to_integer() - BigInt::one()
        } else {
            rational::floor(&(self.threshold(t) * scale))
        }
    }

    /// `trims · δ_t < mass`: each trim removed more than `δ_t` out of at most `mass`.
    pub fn trims_within(&self, trims: usize, t: usize, mass: &Rational) -> bool {
        let lhs = &self.budget * Rational::from_integer(BigInt::from(trims));
        let rhs = mass * Rational::from_integer(BigInt::one() << (t + 1));
        lhs < rhs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverMode {
    Trim,
    Naive,
    Blocks,
}

impl fmt::Display for CoverMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoverMode::Trim => "trim",
            CoverMode::Naive => "naive",
            CoverMode::Blocks => "blocks",
        })
    }
}

impl FromStr for CoverMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "trim" => Ok(CoverMode::Trim),
            "naive" => Ok(CoverMode::Naive),
            "blocks" => Ok(CoverMode::Blocks),
            other => Err(format!("unknown mode `{other}` (expected trim, naive or blocks)")),
        }
    }
}

/// One addition to the cover. In block mode `word` is the root and `start`
/// is the first index of the block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub attempt: usize,
    pub word: Word,
    pub start: usize,
    pub set: CylinderSet,
    pub trims: usize,
}

impl Piece {
    /// Measure of the attempted cylinder before trimming.
    pub fn word_measure(&self) -> Rational {
        dyadic(self.word.len() as u32)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenCoverResult {
    pub mode: CoverMode,
    pub cover: CylinderSet,
    pub pieces: Vec<Piece>,
    pub threshold: Rational,
    pub attempts: usize,
}

pub const MAX_DEPTH: usize = 16;

#[derive(Clone, PartialEq, Eq)]
struct CellSet {
    blocks: Vec<u64>,
}

impl CellSet {
    fn empty(depth: usize) -> CellSet {
        CellSet {
            blocks: vec![0; ((1usize << depth) + 63) / 64],
        }
    }

    fn from_cells(cells: impl Iterator<Item = u64>, depth: usize) -> CellSet {
        let mut set = CellSet::empty(depth);
        for c in cells {
            set.blocks[(c / 64) as usize] |= 1 << (c % 64);
        }
        set
    }

    fn count(&self) -> u64 {
        self.blocks.iter().map(|b| b.count_ones() as u64).sum()
    }

    fn union_count(&self, other: &CellSet) -> u64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| (a | b).count_ones() as u64)
            .sum()
    }

    fn and_assign(&mut self, other: &CellSet) {
        self.blocks.iter_mut().zip(&other.blocks).for_each(|(a, b)| *a &= b);
    }

    fn or_assign(&mut self, other: &CellSet) {
        self.blocks.iter_mut().zip(&other.blocks).for_each(|(a, b)| *a |= b);
    }

    fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    fn cells(&self) -> impl Iterator<Item = u64> + '_ {
        self.blocks.iter().enumerate().flat_map(|(i, &b)| {
            (0..64).filter(move |bit| b >> bit & 1 == 1).map(move |bit| i as u64 * 64 + bit)
        })
    }

    fn to_cylinder(&self, depth: usize) -> CylinderSet {
        CylinderSet::from_cells(self.cells(), depth)
    }
}

struct Working {
    depth: usize,
    /// Slots `0..nmax` plus slot `nmax` for every `n ≥ nmax`.
    slots: Vec<CellSet>,
}

impl Working {
    fn new(f: &OpenFamily) -> Result<Working> {
        let depth = f.depth().unwrap_or(0);
        if depth > MAX_DEPTH {
            return Err(Error::input(format!("depth {depth} exceeds the cover limit {MAX_DEPTH}")));
        }
        let slots = (0..=f.nmax())
            .map(|n| CellSet::from_cells(f.member(n).cells(depth), depth))
            .collect();
        Ok(Working { depth, slots })
    }

    fn last(&self) -> usize {
        self.slots.len() - 1
    }

    fn scale(&self) -> BigInt {
        BigInt::one() << self.depth
    }
}

fn check_preconditions(f: &OpenFamily, schedule: &DeltaSchedule) -> Result<()> {
    if schedule.eps_prime() > Rational::one() {
        return Err(Error::input(format!(
            "eps' = {} exceeds 1",
            format_rational(&schedule.eps_prime())
        )));
    }
    for (n, member) in f.members().iter().enumerate() {
        let m = member.measure();
        if m > *schedule.eps() {
            return Err(Error::input(format!(
                "mu(U_{n}) = {} exceeds eps = {}",
                format_rational(&m),
                format_rational(schedule.eps())
            )));
        }
    }
    Ok(())
}

fn to_count(value: BigInt) -> u64 {
    value.to_u64().unwrap_or(0)
}

pub fn run_cover(f: &OpenFamily, eps: &Rational, eps_prime: &Rational, mode: CoverMode) -> Result<OpenCoverResult> {
    match mode {
        CoverMode::Trim => run_trim_cover(f, eps, eps_prime),
        CoverMode::Naive => run_naive_cover(f, eps, eps_prime),
        CoverMode::Blocks => run_block_cover(f, eps, eps_prime),
    }
}

pub fn run_trim_cover(f: &OpenFamily, eps: &Rational, eps_prime: &Rational) -> Result<OpenCoverResult> {
    let schedule = DeltaSchedule::new(eps, eps_prime)?;
    check_preconditions(f, &schedule)?;
    let mut work = Working::new(f)?;
    let depth = work.depth;
    let last = work.last();
    let scale = work.scale();

    let mut cover = CellSet::empty(depth);
    let mut pieces = Vec::new();
    let mut attempt = 0;
    for start in 0..=last {
        for word in Word::all_up_to(depth) {
            let limit = to_count(schedule.threshold_floor(attempt, &scale));
            let mut candidate = CellSet::from_cells(word.cell_range(depth), depth);
            let mut trims = 0;
            let mut m = start;
            while m <= last {
                if work.slots[m].union_count(&candidate) > limit {
                    candidate.and_assign(&work.slots[m]);
                    trims += 1;
                }
                m += 1;
            }
            if !candidate.is_empty() {
                for n in start..=last {
                    work.slots[n].or_assign(&candidate);
                    assert!(work.slots[n].count() <= limit, "working U_{n} crossed the threshold");
                }
                cover.or_assign(&candidate);
            }
            if !candidate.is_empty() || trims > 0 {
                pieces.push(Piece {
                    attempt,
                    word,
                    start,
                    set: candidate.to_cylinder(depth),
                    trims,
                });
            }
            attempt += 1;
        }
    }

    Ok(OpenCoverResult {
        mode: CoverMode::Trim,
        cover: cover.to_cylinder(depth),
        pieces,
        threshold: schedule.threshold(attempt.saturating_sub(1)),
        attempts: attempt,
    })
}

pub fn run_naive_cover(f: &OpenFamily, eps: &Rational, eps_prime: &Rational) -> Result<OpenCoverResult> {
    let schedule = DeltaSchedule::new(eps, eps_prime)?;
    check_preconditions(f, &schedule)?;
    let mut work = Working::new(f)?;
    let depth = work.depth;
    let last = work.last();
    let limit = to_count(rational::floor(&(eps * Rational::from_integer(work.scale()))));

    let mut cover = CellSet::empty(depth);
    let mut pieces = Vec::new();
    let mut attempt = 0;
    for start in 0..=last {
        for word in Word::all_up_to(depth) {
            let candidate = CellSet::from_cells(word.cell_range(depth), depth);
            let fits = (start..=last).all(|n| work.slots[n].union_count(&candidate) <= limit);
            if fits {
                for n in start..=last {
                    work.slots[n].or_assign(&candidate);
                }
                cover.or_assign(&candidate);
                pieces.push(Piece {
                    attempt,
                    word,
                    start,
                    set: CylinderSet::cylinder(word),
                    trims: 0,
                });
            }
            attempt += 1;
        }
    }

    Ok(OpenCoverResult {
        mode: CoverMode::Naive,
        cover: cover.to_cylinder(depth),
        pieces,
        threshold: eps.clone(),
        attempts: attempt,
    })
}

/// `ε_j = ε + (ε' - ε)(1 - 2^-j)`.
pub fn block_threshold(eps: &Rational, eps_prime: &Rational, j: usize) -> Rational {
    eps + (eps_prime - eps) * (Rational::one() - dyadic(j as u32))
}

pub fn run_block_cover(f: &OpenFamily, eps: &Rational, eps_prime: &Rational) -> Result<OpenCoverResult> {
    let schedule = DeltaSchedule::new(eps, eps_prime)?;
    check_preconditions(f, &schedule)?;
    let work = Working::new(f)?;
    let depth = work.depth;
    let scale = Rational::from_integer(work.scale());
    // Only explicit members matter: every index past nmax - 1 repeats it.
    let members = &work.slots[..work.last()];
    let tail = members.len() - 1;

    let mut cover = CellSet::empty(depth);
    let mut pieces = Vec::new();
    let mut start = 0;
    let mut j = 1;
    let mut attempts = 0;
    loop {
        let level = block_threshold(eps, eps_prime, j);
        let limit = to_count(rational::floor(&(&level * &scale)));
        let mut block = CellSet::from_cells(Word::ROOT.cell_range(depth), depth);
        let mut rejected = 0;
        let mut end = start;
        loop {
            block.and_assign(&members[end]);
            attempts += 1;
            let mut candidate = cover.clone();
            candidate.or_assign(&block);
            // i ranges over (end, nmax - 1] and the tail, which repeats member nmax - 1.
            let ok = (end + 1..=tail)
                .chain(std::iter::once(tail))
                .all(|i| candidate.union_count(&members[i]) <= limit);
            if ok {
                break;
            }
            rejected += 1;
            end += 1;
            assert!(end <= tail, "block boundary nmax - 1 always qualifies");
        }
        cover.or_assign(&block);
        pieces.push(Piece {
            attempt: j - 1,
            word: Word::ROOT,
            start,
            set: block.to_cylinder(depth),
            trims: rejected,
        });
        if end == tail {
            break;
        }
        start = end + 1;
        j += 1;
    }
    // Every later block intersects only copies of the last member.
    cover.or_assign(&members[tail]);
    pieces.push(Piece {
        attempt: j,
        word: Word::ROOT,
        start: tail + 1,
        set: members[tail].to_cylinder(depth),
        trims: 0,
    });
    assert!(
        Rational::from_integer(BigInt::from(cover.count())) <= block_threshold(eps, eps_prime, j) * &scale,
        "block union crossed its level"
    );

    Ok(OpenCoverResult {
        mode: CoverMode::Blocks,
        cover: cover.to_cylinder(depth),
        pieces,
        threshold: block_threshold(eps, eps_prime, j),
        attempts,
    })
}

/// The interval family `U_i = (inf_{j≥i} w_j - ε/3, w_i + ε/3)` for an
/// eventually periodic sequence `w = prefix · cycle^ω`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaFamily {
    pub eps: Rational,
    pub prefix_len: usize,
    /// `U_i` for `i < prefix_len + 2·|cycle|`.
    pub intervals: Vec<RealInterval>,
    /// Closed form for tail positions: `U_i = tail[(i - prefix_len) mod |cycle|]`.
    pub tail: Vec<RealInterval>,
    /// `min(cycle)`, the liminf of `w`.
    pub w_min: Rational,
    pub checks: Vec<OmegaCheck>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaCheck {
    pub position: usize,
    pub name: &'static str,
    pub holds: bool,
}

pub fn omega_family(prefix: &[Rational], cycle: &[Rational], eps: &Rational) -> Result<OmegaFamily> {
    if cycle.is_empty() {
        return Err(Error::input("cycle must be non-empty"));
    }
    if *eps <= Rational::zero() {
        return Err(Error::input("eps must be positive"));
    }
    let third = eps / Rational::from_integer(BigInt::from(3));
    let w_min = cycle.iter().min().expect("non-empty cycle").clone();
    let w = |i: usize| -> &Rational {
        if i < prefix.len() {
            &prefix[i]
        } else {
            &cycle[(i - prefix.len()) % cycle.len()]
        }
    };
    // inf over j ≥ i: the rest of the prefix and one full period.
    let inf_from = |i: usize| -> Rational {
        prefix
            .iter()
            .skip(i)
            .chain(std::iter::once(&w_min))
            .min()
            .expect("non-empty")
            .clone()
    };
    let interval = |i: usize| RealInterval::new(inf_from(i) - &third, w(i) + &third);

    let count = prefix.len() + 2 * cycle.len();
    let intervals: Vec<RealInterval> = (0..count).map(interval).collect();
    let tail: Vec<RealInterval> = (0..cycle.len()).map(|k| interval(prefix.len() + k)).collect();

    let small = &third + &third;
    let mut checks = Vec::new();
    for (k, u) in tail.iter().enumerate() {
        let position = prefix.len() + k;
        checks.push(OmegaCheck {
            position,
            name: "w_min-inside",
            holds: u.contains(&w_min),
        });
        let expected = if cycle[k] == w_min {
            small.clone()
        } else {
            &cycle[k] - &w_min + &small
        };
        checks.push(OmegaCheck {
            position,
            name: if cycle[k] == w_min { "measure-small" } else { "measure-gap" },
            holds: u.measure() == expected,
        });
    }

    Ok(OmegaFamily {
        eps: eps.clone(),
        prefix_len: prefix.len(),
        intervals,
        tail,
        w_min,
        checks,
    })
}

/// `⌈1/δ_t⌉` for reporting.
pub fn trim_ceiling(schedule: &DeltaSchedule, t: usize) -> BigInt {
    let inv = schedule.delta(t).recip();
    inv.numer().div_ceil(inv.denom())
}
