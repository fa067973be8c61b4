//! Covering the pointwise liminf of step functions with small integrals.
//!
//! For every start `m`, cell `U` and grid value `r` the process tries to raise
//! `f_s := max(f_s, u)` for all `s ≥ m` with `u = r·χ_U`. Whenever some first
//! `f_s` would cross the running threshold, `u := min(u, f_s)` is trimmed and
//! the scan continues. The surviving `u` is committed and folded into the
//! output `φ = max(φ, u)`.

mod step;

pub use step::StepFunction;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::kernel::{dyadic, format_rational, Rational, Word};
use crate::measurecover::{run_measure_cover, RationalGrid};
use crate::opencover::DeltaSchedule;
use crate::setcover::run_set_cover;
use crate::traces::{liminf_measure_value, liminf_sets, FuncFamily, MeasureFamily, SetFamily, StabilizedFamily};

/// An attempt that needed at least one trim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FatouTrim {
    pub attempt: usize,
    pub start: usize,
    pub cell: Word,
    pub value: Rational,
    pub trims: usize,
}

impl FatouTrim {
    /// `∫ r·χ_U` before trimming.
    pub fn initial_integral(&self) -> Rational {
        &self.value * dyadic(self.cell.len() as u32)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FatouResult {
    pub phi: StepFunction,
    pub attempts: usize,
    pub threshold: Rational,
    pub trim_log: Vec<FatouTrim>,
}

/// Integer fixed-point copy of the family: every value times a common `scale`.
struct Scaled {
    scale: BigInt,
    slots: Vec<Vec<u128>>,
}

const HEADROOM: u128 = 1 << 100;

fn to_fixed(value: &Rational, scale: &BigInt) -> Result<u128> {
    let exact = value * Rational::from_integer(scale.clone());
    debug_assert!(exact.is_integer());
    exact
        .to_integer()
        .to_u128()
        .filter(|&v| v < HEADROOM)
        .ok_or_else(|| Error::input("values too large for exact fixed-point evaluation"))
}

fn scaled_family(f: &FuncFamily, grid: RationalGrid) -> Result<Scaled> {
    let mut scale = BigInt::one() << grid.resolution();
    for member in f.members() {
        for v in member.cells() {
            scale = scale.lcm(v.denom());
        }
    }
    let slots = (0..=f.nmax())
        .map(|n| f.member(n).cells().iter().map(|v| to_fixed(v, &scale)).collect())
        .collect::<Result<Vec<Vec<u128>>>>()?;
    Ok(Scaled { scale, slots })
}

pub fn run_fatou(f: &FuncFamily, eps: &Rational, eps_prime: &Rational, grid: RationalGrid) -> Result<FatouResult> {
    let schedule = DeltaSchedule::new(eps, eps_prime)?;
    for (n, member) in f.members().iter().enumerate() {
        let integral = member.integral();
        if integral > *eps {
            return Err(Error::input(format!(
                "integral of f_{n} = {} exceeds eps = {}",
                format_rational(&integral),
                format_rational(eps)
            )));
        }
    }
    let depth = f.depth().unwrap_or(0);
    let Scaled { scale, mut slots } = scaled_family(f, grid)?;
    let last = slots.len() - 1;
    let integral_scale = &scale << depth;
    let mut sums: Vec<u128> = slots.iter().map(|s| s.iter().sum()).collect();
    let grid_step = to_fixed(&grid.member(1), &scale)?;

    let mut phi = vec![0u128; 1 << depth];
    let mut trim_log = Vec::new();
    let mut attempt = 0;
    for start in 0..=last {
        for cell in Word::all_up_to(depth) {
            let range = cell.cell_range(depth);
            let (lo, hi) = (range.start as usize, range.end as usize);
            for j in 1..=grid.len() {
                let limit = schedule
                    .threshold_floor(attempt, &integral_scale)
                    .to_u128()
                    .unwrap_or(0);
                let r = grid_step * j as u128;
                let mut u = vec![r; hi - lo];
                let mut trims = 0;
                for s in start..=last {
                    let row = &slots[s][lo..hi];
                    let excess: u128 = u.iter().zip(row).map(|(&a, &b)| a.saturating_sub(b)).sum();
                    if sums[s] + excess > limit {
                        u.iter_mut().zip(row).for_each(|(a, &b)| *a = (*a).min(b));
                        trims += 1;
                    }
                }
                for s in start..=last {
                    for (k, &v) in u.iter().enumerate() {
                        let cur = &mut slots[s][lo + k];
                        if *cur < v {
                            sums[s] += v - *cur;
                            *cur = v;
                        }
                    }
                    assert!(sums[s] <= limit, "working f_{s} crossed the threshold");
                }
                for (k, &v) in u.iter().enumerate() {
                    phi[lo + k] = phi[lo + k].max(v);
                }
                if trims > 0 {
                    trim_log.push(FatouTrim {
                        attempt,
                        start,
                        cell,
                        value: grid.member(j),
                        trims,
                    });
                }
                attempt += 1;
            }
        }
    }

    let phi = StepFunction::from_cells(
        depth,
        phi.into_iter()
            .map(|v| Rational::new(BigInt::from(v), scale.clone()))
            .collect(),
    );
    Ok(FatouResult {
        phi,
        attempts: attempt,
        threshold: schedule.threshold(attempt.saturating_sub(1)),
        trim_log,
    })
}

/// Per-element comparison between the Fatou output and a discrete cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecializationRow {
    pub element: String,
    pub cell: Word,
    /// Grid floor of the liminf at this element.
    pub bound: Rational,
    pub phi: Rational,
    /// The discrete construction's value (indicator of the set cover, or `m'`).
    pub other: Rational,
}

impl SpecializationRow {
    pub fn passes(&self) -> bool {
        self.phi >= self.bound && self.other >= self.bound
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Specialization {
    pub depth: usize,
    pub eps: Rational,
    pub eps_prime: Rational,
    pub phi_integral: Rational,
    pub rows: Vec<SpecializationRow>,
}

impl Specialization {
    pub fn passes(&self) -> bool {
        self.phi_integral <= self.eps_prime && self.rows.iter().all(SpecializationRow::passes)
    }
}

fn embed_cells(universe: &[String], depth: usize) -> Result<Vec<Word>> {
    if depth > StepFunction::MAX_DEPTH || universe.len() as u64 > 1u64 << depth {
        return Err(Error::input(format!(
            "{} elements do not fit into 2^{depth} cells",
            universe.len()
        )));
    }
    Ok((0..universe.len() as u64).map(|j| Word::cell(j, depth)).collect())
}

/// Runs the Fatou process on a set family embedded as indicators of cells.
pub fn fatou_specializes_sets(f: &SetFamily, k: u32, depth: usize, grid: RationalGrid) -> Result<Specialization> {
    let cells = embed_cells(f.universe(), depth)?;
    let cover = run_set_cover(f, k)?;
    let members = f
        .members()
        .iter()
        .map(|member| {
            let mut g = StepFunction::zero(depth);
            for (u, cell) in f.universe().iter().zip(&cells) {
                if member.contains(u) {
                    g.raise(*cell, &Rational::one());
                }
            }
            g
        })
        .collect();
    let func = StabilizedFamily::new(Some(depth), cells.clone(), members);
    let eps = Rational::from_integer(BigInt::one() << k) * dyadic(depth as u32);
    let eps_prime = &eps + &eps;
    let res = run_fatou(&func, &eps, &eps_prime, grid)?;
    let limit: BTreeSet<String> = liminf_sets(f);
    let rows = f
        .universe()
        .iter()
        .zip(&cells)
        .map(|(u, &cell)| SpecializationRow {
            element: u.clone(),
            cell,
            bound: grid.floor(&if limit.contains(u) { Rational::one() } else { Rational::zero() }),
            phi: res.phi.value(cell.bits()).clone(),
            other: if cover.cover.contains(u) { Rational::one() } else { Rational::zero() },
        })
        .collect();
    Ok(Specialization {
        depth,
        phi_integral: res.phi.integral(),
        eps,
        eps_prime,
        rows,
    })
}

/// Runs the Fatou process on a measure family embedded as weighted cells.
pub fn fatou_specializes_measure(f: &MeasureFamily, depth: usize, grid: RationalGrid) -> Result<Specialization> {
    let cells = embed_cells(f.universe(), depth)?;
    let cover = run_measure_cover(f, grid)?;
    let members = f
        .members()
        .iter()
        .map(|member| {
            let mut g = StepFunction::zero(depth);
            for (u, cell) in f.universe().iter().zip(&cells) {
                if let Some(v) = member.get(u) {
                    g.raise(*cell, v);
                }
            }
            g
        })
        .collect();
    let func = StabilizedFamily::new(Some(depth), cells.clone(), members);
    let eps = dyadic(depth as u32);
    let eps_prime = &eps + &eps;
    let res = run_fatou(&func, &eps, &eps_prime, grid)?;
    let rows = f
        .universe()
        .iter()
        .zip(&cells)
        .map(|(u, &cell)| SpecializationRow {
            element: u.clone(),
            cell,
            bound: grid.floor(&liminf_measure_value(f, u)),
            phi: res.phi.value(cell.bits()).clone(),
            other: cover.table.get(u),
        })
        .collect();
    Ok(Specialization {
        depth,
        phi_integral: res.phi.integral(),
        eps,
        eps_prime,
        rows,
    })
}
