mod common;

use common::*;
use easyqg::categories::{self, CategorySpec, Param};
use easyqg::partitions::{self, ColorWord, Partition};

/// Every one-row partition on `n` points, over all colorings when `colored`.
fn one_row(n: usize, colored: bool) -> Vec<Partition> {
    let words: Vec<ColorWord> = if colored {
        (0..1u32 << n).map(|b| word_from_bits(n, b)).collect()
    } else {
        vec![ColorWord::white(n)]
    };
    let mut out = Vec::new();
    for w in words {
        out.extend(partitions::enumerate(&ColorWord::empty(), &w, |_| true).unwrap());
    }
    out
}

fn pairings(n: usize, colored: bool) -> Vec<Partition> {
    one_row(n, colored).into_iter().filter(|p| p.is_pairing()).collect()
}

#[test]
fn matching_pairing_inclusions() {
    let f = Param::Finite;
    for n in (0..=6).step_by(2) {
        for p in pairings(n, true) {
            let nc2 = CategorySpec::MatchNC2.contains(&p);
            let p2 = CategorySpec::MatchP2.contains(&p);
            for r in [f(2), f(3), f(4), f(6), Param::Infinite] {
                let pr = CategorySpec::MatchP2String(r).contains(&p);
                assert!(!nc2 || pr, "{p} in mnc2 but not in mp2str:{r}");
                assert!(!pr || p2, "{p} in mp2str:{r} but not in mp2");
            }
            // r | s gives the reverse inclusion of categories
            for (r, s) in [(2, 4), (2, 6), (3, 6)] {
                if CategorySpec::MatchP2String(f(s)).contains(&p) {
                    assert!(CategorySpec::MatchP2String(f(r)).contains(&p), "{p} r={r} s={s}");
                }
            }
        }
    }
}

#[test]
fn even_part_hierarchy() {
    for n in 0..=6 {
        for p in one_row(n, false) {
            let inf = CategorySpec::PevenInfty.contains(&p);
            let star = CategorySpec::PevenStar.contains(&p);
            let even = CategorySpec::Peven.contains(&p);
            assert!(!inf || star, "{p}");
            assert!(!star || even, "{p}");
            if p.is_pairing() {
                assert_eq!(inf, partitions::is_noncrossing(&p), "{p}");
            }
        }
    }
}

#[test]
fn balanced_at_two_is_even() {
    for n in 0..=8 {
        for p in one_row(n, n <= 5) {
            assert_eq!(CategorySpec::PevenBalanced(Param::Finite(2)).contains(&p), CategorySpec::Peven.contains(&p), "{p}");
        }
    }
}

#[test]
fn free_wreath_is_noncrossing_part() {
    for n in 0..=6 {
        for p in one_row(n, n <= 5) {
            let nc = partitions::is_noncrossing(&p);
            for s in [Param::Finite(1), Param::Finite(2), Param::Finite(3), Param::Finite(4), Param::Infinite] {
                assert_eq!(CategorySpec::Ps(s).contains(&p) && nc, CategorySpec::NCs(s).contains(&p), "{p} s={s}");
            }
        }
    }
}

#[test]
fn shipped_specs_are_categories() {
    for spec in categories::shipped() {
        let r = categories::audit_axioms(&spec, 6).unwrap();
        assert!(r.passed, "{spec}: {:?}", r.failures);
        assert!(r.members > 0);
    }
}

#[test]
fn spec_names_round_trip() {
    for spec in categories::shipped() {
        let back: CategorySpec = spec.to_string().parse().unwrap();
        assert_eq!(back, spec);
    }
}
