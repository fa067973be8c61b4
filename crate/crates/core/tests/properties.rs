use std::collections::BTreeSet;

use num_traits::One;
use proptest::prelude::*;

use limcov::fatou::run_fatou;
use limcov::generate::{gen_decoder, gen_omega, gen_partial_function, gen_test_approximation, generate, GenConfig};
use limcov::kernel::rational::ratio;
use limcov::kernel::{dyadic, CylinderSet, Rational, Word};
use limcov::measurecover::{frequency_semimeasures, run_measure_cover, run_tree_cover, RationalGrid};
use limcov::opencover::{omega_family, run_cover, run_trim_cover, CoverMode};
use limcov::randlab::{
    bar_deficiency, cover_parameters, deficiency_cover_family, deficiency_sets, stabilize_test,
};
use limcov::setcover::run_set_cover;
use limcov::traces::{liminf_open, liminf_sets, liminf_sets_with_witness, FamilyKind, Trace};
use limcov::verify;

fn config(kind: FamilyKind, nmax: usize, depth: usize, size: usize) -> GenConfig {
    let mut c = GenConfig::new(kind, nmax, kind.has_depth().then_some(depth));
    c.size = size;
    c
}

fn any_kind() -> impl Strategy<Value = FamilyKind> {
    prop_oneof![
        Just(FamilyKind::Sets),
        Just(FamilyKind::Open),
        Just(FamilyKind::Measure),
        Just(FamilyKind::Tree),
        Just(FamilyKind::Func),
    ]
}

fn eps_pair() -> impl Strategy<Value = (Rational, Rational)> {
    (1u32..=3).prop_map(|k| (dyadic(k), dyadic(k) + ratio(1, 8)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tail_rule(kind in any_kind(), seed in any::<u64>(), nmax in 1usize..8) {
        let t = generate(&config(kind, nmax, 3, 6), seed).unwrap();
        match kind {
            FamilyKind::Sets => {
                let f = t.sets().unwrap();
                for n in nmax..nmax + 4 { prop_assert_eq!(f.member(n), f.member(nmax - 1)); }
            }
            FamilyKind::Open => {
                let f = t.open().unwrap();
                for n in nmax..nmax + 4 { prop_assert_eq!(f.member(n), f.member(nmax - 1)); }
            }
            FamilyKind::Measure => {
                let f = t.measure().unwrap();
                for n in nmax..nmax + 4 { prop_assert_eq!(f.member(n), f.member(nmax - 1)); }
            }
            FamilyKind::Tree => {
                let f = t.tree().unwrap();
                for n in nmax..nmax + 4 { prop_assert_eq!(f.member(n), f.member(nmax - 1)); }
            }
            FamilyKind::Func => {
                let f = t.func().unwrap();
                for n in nmax..nmax + 4 { prop_assert_eq!(f.member(n), f.member(nmax - 1)); }
            }
        }
    }

    #[test]
    fn stages_grow(seed in any::<u64>(), nmax in 1usize..6) {
        let sets = generate(&config(FamilyKind::Sets, nmax, 0, 6), seed).unwrap();
        let open = generate(&config(FamilyKind::Open, nmax, 4, 4), seed).unwrap();
        let measure = generate(&config(FamilyKind::Measure, nmax, 0, 5), seed).unwrap();
        for t in 0..sets.events().len() {
            let (a, b) = (sets.stage(t).sets().unwrap(), sets.stage(t + 1).sets().unwrap());
            for n in 0..nmax { prop_assert!(a.member(n).is_subset(b.member(n))); }
        }
        for t in 0..open.events().len() {
            let (a, b) = (open.stage(t).open().unwrap(), open.stage(t + 1).open().unwrap());
            for n in 0..nmax { prop_assert!(a.member(n).is_subset(b.member(n))); }
        }
        for t in 0..measure.events().len() {
            let (a, b) = (measure.stage(t).measure().unwrap(), measure.stage(t + 1).measure().unwrap());
            for n in 0..nmax {
                for (u, v) in a.member(n) {
                    prop_assert!(b.member(n).get(u).is_some_and(|w| w >= v));
                }
            }
        }
    }

    #[test]
    fn liminf_witness(seed in any::<u64>(), nmax in 1usize..10) {
        let f = generate(&config(FamilyKind::Sets, nmax, 0, 10), seed).unwrap().sets().unwrap();
        let (limit, witness) = liminf_sets_with_witness(&f);
        prop_assert!(witness < nmax);
        for n in witness..nmax + 2 { prop_assert!(limit.is_subset(f.member(n))); }
    }

    #[test]
    fn liminf_open_matches_cells(seed in any::<u64>(), nmax in 1usize..6, depth in 1usize..6) {
        let f = generate(&config(FamilyKind::Open, nmax, depth, 5), seed).unwrap().open().unwrap();
        let cells = |u: &CylinderSet| u.cells(depth).collect::<BTreeSet<u64>>();
        let by_cells = (0..nmax)
            .map(|start| {
                (start..nmax).map(|n| cells(f.member(n))).reduce(|a, b| &a & &b).unwrap()
            })
            .fold(BTreeSet::new(), |acc, s| &acc | &s);
        prop_assert_eq!(cells(&liminf_open(&f)), by_cells);
    }

    #[test]
    fn set_cover_verified(seed in any::<u64>(), nmax in 1usize..10, k in 0u32..4, size in 1usize..20) {
        let mut c = config(FamilyKind::Sets, nmax, 0, size);
        c.k = k;
        let t = generate(&c, seed).unwrap();
        let f = t.sets().unwrap();
        let res = run_set_cover(&f, k).unwrap();
        let v = verify::verify_set_cover(&f, k, &res);
        prop_assert!(v.passed(), "{}", v);
        // Replay and duplicate robustness.
        let again = Trace::parse(&t.render()).unwrap().sets().unwrap();
        prop_assert_eq!(&run_set_cover(&again, k).unwrap(), &res);
        let doubled = format!("{}{}", t.render(), t.render().split_once('\n').unwrap().1);
        let f2 = Trace::parse(&doubled).unwrap().sets().unwrap();
        prop_assert_eq!(run_set_cover(&f2, k).unwrap().cover, res.cover);
    }

    #[test]
    fn measure_cover_verified(seed in any::<u64>(), nmax in 1usize..8, g in 1u32..6) {
        let f = generate(&config(FamilyKind::Measure, nmax, 0, 8), seed).unwrap().measure().unwrap();
        let res = run_measure_cover(&f, RationalGrid::new(g).unwrap()).unwrap();
        let v = verify::verify_measure_cover(&f, g, &res);
        prop_assert!(v.passed(), "{}", v);
    }

    #[test]
    fn tree_cover_verified(seed in any::<u64>(), nmax in 1usize..6, depth in 1usize..5, g in 1u32..5) {
        let f = generate(&config(FamilyKind::Tree, nmax, depth, 4), seed).unwrap().tree().unwrap();
        let res = run_tree_cover(&f, RationalGrid::new(g).unwrap()).unwrap();
        let v = verify::verify_tree_cover(&f, g, &res);
        prop_assert!(v.passed(), "{}", v);
    }

    #[test]
    fn frequency_law(seed in any::<u64>(), horizon in 1usize..24, range in 1usize..6, g in 1u32..5) {
        let pf = gen_partial_function(seed, horizon, range);
        let fam = frequency_semimeasures(&pf, horizon).unwrap();
        let res = run_measure_cover(&fam.trace.measure().unwrap(), RationalGrid::new(g).unwrap()).unwrap();
        let v = verify::verify_frequency(&pf, horizon, g, &fam, &res);
        prop_assert!(v.passed(), "{}", v);
    }

    #[test]
    fn grid_floor_laws(p in 0i64..200, qq in 1i64..100, g in 1u32..8) {
        let value = ratio(p, qq);
        let grid = RationalGrid::new(g).unwrap();
        let finer = RationalGrid::new(g + 1).unwrap();
        prop_assert_eq!(grid.floor(&value), verify::grid_floor(&value, g));
        prop_assert!(finer.floor(&value) >= grid.floor(&value));
        if value <= Rational::one() {
            prop_assert!(&value - grid.floor(&value) < dyadic(g));
        }
    }

    #[test]
    fn open_cover_all_modes(seed in any::<u64>(), nmax in 1usize..6, depth in 1usize..6, (eps, eps_prime) in eps_pair()) {
        let mut c = config(FamilyKind::Open, nmax, depth, 4);
        c.eps = eps.clone();
        let f = generate(&c, seed).unwrap().open().unwrap();
        for mode in [CoverMode::Trim, CoverMode::Naive, CoverMode::Blocks] {
            let res = run_cover(&f, &eps, &eps_prime, mode).unwrap();
            let v = verify::verify_open_cover(&f, &eps, &eps_prime, &res);
            prop_assert!(v.passed(), "{} {}", mode, v);
        }
    }

    #[test]
    fn omega_identities(seed in any::<u64>()) {
        let o = gen_omega(seed);
        let fam = omega_family(&o.prefix, &o.cycle, &o.eps).unwrap();
        let v = verify::verify_omega(&o.prefix, &o.cycle, &o.eps, &fam);
        prop_assert!(v.passed(), "{}", v);
    }

    #[test]
    fn fatou_verified(seed in any::<u64>(), nmax in 1usize..5, depth in 1usize..4, g in 1u32..4) {
        let f = generate(&config(FamilyKind::Func, nmax, depth, 4), seed).unwrap().func().unwrap();
        let (eps, eps_prime) = (ratio(1, 4), ratio(3, 8));
        let res = run_fatou(&f, &eps, &eps_prime, RationalGrid::new(g).unwrap()).unwrap();
        let v = verify::verify_fatou(&f, &eps, &eps_prime, g, &res);
        prop_assert!(v.passed(), "{}", v);
    }

    #[test]
    fn deficiency_laws(seed in any::<u64>(), c in 1usize..4) {
        let dec = gen_decoder(seed, 24, 8, 8);
        let sets: Vec<Vec<BTreeSet<Word>>> = (0..=8)
            .map(|n| (0..=n).map(|c| deficiency_sets(&dec, n, c)).collect())
            .collect();
        let v = verify::verify_deficiency_sets(&dec, &sets);
        prop_assert!(v.passed(), "{}", v);

        let f = deficiency_cover_family(&dec, c, 8, 8).unwrap();
        let v = verify::verify_deficiency_family(&f, c);
        prop_assert!(v.passed(), "{}", v);
        let (eps, eps_prime) = cover_parameters(c).unwrap();
        let res = run_trim_cover(&f, &eps, &eps_prime).unwrap();
        let v = verify::verify_open_cover(&f, &eps, &eps_prime, &res);
        prop_assert!(v.passed(), "{}", v);
    }

    #[test]
    fn bar_deficiency_relation(seed in any::<u64>(), c in 0i64..4) {
        let dec = gen_decoder(seed, 16, 6, 6);
        for y in dec.entries().values() {
            let d = dec.deficiency(*y).unwrap();
            for l in 0..=y.len() {
                let x = y.prefix(l);
                let b = bar_deficiency(&dec, x, 6).unwrap();
                let v = verify::verify_bar_deficiency(&dec, x, &b);
                prop_assert!(v.passed(), "{}", v);
                prop_assert!(b.value.unwrap() <= d);
                if d <= c {
                    prop_assert!(b.value.unwrap() <= c);
                }
            }
        }
    }

    #[test]
    fn stabilized_codes(seed in any::<u64>(), max_n in 0usize..8, c in 0usize..4) {
        let t = gen_test_approximation(seed, max_n, c);
        let s = stabilize_test(&t, c).unwrap();
        let v = verify::verify_stabilized(&t, c, &s);
        prop_assert!(v.passed(), "{}", v);
        for level in &s.levels {
            prop_assert!(level.kept_measure() <= dyadic(c as u32));
            let codes: BTreeSet<Word> = level.codes.iter().map(|(_, w)| *w).collect();
            prop_assert_eq!(codes.len(), level.codes.len());
            prop_assert!(level.codes.iter().all(|(_, w)| w.len() + c == level.n));
        }
    }
}

#[test]
fn naive_mode_covers_the_liminf_exactly() {
    for seed in 0..40 {
        let mut c = config(FamilyKind::Open, 5, 5, 4);
        c.eps = ratio(1, 4);
        let f = generate(&c, seed).unwrap().open().unwrap();
        let res = run_cover(&f, &ratio(1, 4), &ratio(3, 8), CoverMode::Naive).unwrap();
        assert!(liminf_open(&f).is_subset(&res.cover));
    }
}

#[test]
fn empty_sets_family_has_empty_liminf() {
    let f = Trace::parse("family sets nmax=3").unwrap().sets().unwrap();
    assert!(liminf_sets(&f).is_empty());
    assert!(run_set_cover(&f, 0).unwrap().cover.len() <= 1);
}
