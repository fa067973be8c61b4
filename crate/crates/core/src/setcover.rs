//! Covering the liminf of small finite sets by a set built from acceptable
//! ray additions.
//!
//! An `(N, u)` operation adds `u` to every `U_n` with `n ≥ N`; it is
//! acceptable when every such `U_n` either already contains `u` or has fewer
//! than `2^k` elements. Operations are tried once each, in a fixed order, on a
//! working copy that keeps the effect of everything accepted so far.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::traces::SetFamily;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RayAddition {
    pub start: usize,
    pub element: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetCoverResult {
    pub cover: BTreeSet<String>,
    /// One entry per element of `cover`, in acceptance order.
    pub log: Vec<RayAddition>,
    pub bound: u64,
}

pub const MAX_K: u32 = 62;

pub fn run_set_cover(f: &SetFamily, k: u32) -> Result<SetCoverResult> {
    if k > MAX_K {
        return Err(Error::input(format!("k = {k} exceeds {MAX_K}")));
    }
    let bound = 1u64 << k;
    for (n, member) in f.members().iter().enumerate() {
        if member.len() as u64 > bound {
            return Err(Error::input(format!(
                "U_{n} has {} elements, more than 2^{k} = {bound}",
                member.len()
            )));
        }
    }

    let universe = f.universe();
    let nmax = f.nmax();
    // Slots 0..nmax are the explicit members; slot nmax stands for every n ≥ nmax.
    let mut present: Vec<Vec<bool>> = (0..=nmax)
        .map(|n| universe.iter().map(|u| f.member(n).contains(u)).collect())
        .collect();
    let mut sizes: Vec<u64> = (0..=nmax).map(|n| f.member(n).len() as u64).collect();

    let mut accepted = vec![false; universe.len()];
    let mut log = Vec::new();
    for start in 0..=nmax {
        for (u, element) in universe.iter().enumerate() {
            // Once (N₀, u) is accepted, every later (N, u) with N ≥ N₀ is a no-op.
            if accepted[u] {
                continue;
            }
            let acceptable = (start..=nmax).all(|n| present[n][u] || sizes[n] < bound);
            if !acceptable {
                continue;
            }
            for n in start..=nmax {
                if !present[n][u] {
                    present[n][u] = true;
                    sizes[n] += 1;
                }
                assert!(sizes[n] <= bound, "working U_{n} exceeded 2^k");
            }
            accepted[u] = true;
            log.push(RayAddition {
                start,
                element: element.clone(),
            });
        }
    }

    Ok(SetCoverResult {
        cover: log.iter().map(|op| op.element.clone()).collect(),
        log,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::traces::Trace;

    fn family(text: &str) -> SetFamily {
        Trace::parse(text).unwrap().sets().unwrap()
    }

    fn tokens(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn constant_singleton_family() {
        let f = family("family sets nmax=3\nadd 0 a\nadd 1 a\nadd 2 a");
        let res = run_set_cover(&f, 0).unwrap();
        assert_eq!(res.cover, tokens(&["a"]));
        assert_eq!(res.bound, 1);
    }

    #[test]
    fn empty_family() {
        let f = family("family sets nmax=2");
        let res = run_set_cover(&f, 0).unwrap();
        assert!(res.cover.len() <= 1);
    }

    #[test]
    fn two_member_example() {
        // (0,a) is rejected because U_1 = {b,c} is already full at 2^1.
        let f = family("family sets nmax=2\nadd 0 a\nadd 0 b\nadd 1 b\nadd 1 c");
        let res = run_set_cover(&f, 1).unwrap();
        assert_eq!(res.cover, tokens(&["b", "c"]));
        assert_eq!(
            res.log,
            vec![
                RayAddition { start: 0, element: "b".into() },
                RayAddition { start: 1, element: "c".into() },
            ]
        );
    }

    #[test]
    fn precondition_names_offending_member() {
        let f = family("family sets nmax=2\nadd 0 a\nadd 1 a\nadd 1 b");
        let err = run_set_cover(&f, 0).unwrap_err();
        assert!(err.to_string().contains("U_1"), "{err}");
    }

    #[test]
    fn duplicate_events_do_not_change_the_cover() {
        let base = "family sets nmax=3\nadd 0 a\nadd 0 b\nadd 1 b\nadd 1 c\nadd 2 c\nadd 2 d";
        let dup = format!("{base}\nadd 0 a\nadd 2 c\nadd 1 b");
        let a = run_set_cover(&family(base), 1).unwrap();
        let b = run_set_cover(&family(&dup), 1).unwrap();
        assert_eq!(a, b);
    }
}
