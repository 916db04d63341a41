mod common;

use common::catalan;
use easyqg::categories::{CategorySpec, Param};
use easyqg::fusion::{self, FusionElement, Label, Ring};
use easyqg::partitions::{self, Color, ColorWord, Partition};
use num_bigint::BigInt;
use proptest::prelude::*;

fn label(ring: Ring) -> BoxedStrategy<Label> {
    match ring {
        Ring::OnPlus => (0u64..=6).prop_map(Label::Int).boxed(),
        Ring::UnPlus => proptest::collection::vec(prop_oneof![Just(1i64), Just(-1i64)], 0..=4).prop_map(Label::Word).boxed(),
        Ring::HsPlus(Param::Finite(s)) => {
            proptest::collection::vec(0..s as i64, 0..=4).prop_map(Label::Word).boxed()
        }
        Ring::HsPlus(_) => proptest::collection::vec(-3i64..=3, 0..=4).prop_map(Label::Word).boxed(),
    }
}

fn ring() -> impl Strategy<Value = Ring> {
    prop_oneof![
        Just(Ring::OnPlus),
        Just(Ring::UnPlus),
        Just(Ring::HsPlus(Param::Finite(2))),
        Just(Ring::HsPlus(Param::Finite(3))),
        Just(Ring::HsPlus(Param::Infinite)),
    ]
}

fn conj_elem(e: &FusionElement) -> FusionElement {
    let mut out = FusionElement::zero(e.ring);
    for (l, m) in &e.terms {
        out.add(e.ring.conjugate(l), *m);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn associative_and_conjugation_compatible((r, a, b, c) in ring().prop_flat_map(|r| (Just(r), label(r), label(r), label(r)))) {
        let ab = r.fuse(&a, &b).unwrap();
        let left = r.fuse_elements(&ab, &FusionElement::single(r, c.clone())).unwrap();
        let bc = r.fuse(&b, &c).unwrap();
        let right = r.fuse_elements(&FusionElement::single(r, a.clone()), &bc).unwrap();
        prop_assert_eq!(left, right);
        // conj(a ⊗ b) = conj(b) ⊗ conj(a)
        prop_assert_eq!(conj_elem(&ab), r.fuse(&r.conjugate(&b), &r.conjugate(&a)).unwrap());
        prop_assert_eq!(r.conjugate(&r.conjugate(&a)), a.clone());
        // the unit occurs in a ⊗ b exactly when b = ā
        let unit = ab.trivial_multiplicity();
        prop_assert_eq!(unit, u64::from(b == r.conjugate(&a)));
    }
}

#[test]
fn catalan_and_dimensions() {
    for k in 1..=8usize {
        let e = fusion::decompose_power(Ring::OnPlus, 2 * k).unwrap();
        assert_eq!(e.trivial_multiplicity(), catalan(k as u64));
    }
    for n in 2..=4u64 {
        for k in 0..=8usize {
            let e = fusion::decompose_power(Ring::OnPlus, k).unwrap();
            assert_eq!(e.dimension(n).unwrap(), BigInt::from(n).pow(k as u32));
        }
    }
}

#[test]
fn un_plus_matches_matching_pairings() {
    for n in 0..=6usize {
        for bits in 0..1u32 << n {
            let w = ColorWord((0..n).map(|i| if bits >> i & 1 == 1 { Color::Black } else { Color::White }).collect());
            let letters = fusion::color_letters(&w);
            let e = fusion::decompose_word(Ring::UnPlus, &letters).unwrap();
            let count = CategorySpec::MatchNC2.basis(&w).unwrap().len() as u64;
            assert_eq!(e.trivial_multiplicity(), count, "{w}");
            if n <= 4 {
                assert_eq!(e.dimension(3).unwrap(), BigInt::from(3).pow(n as u32));
            }
        }
    }
}

/// Noncrossing partitions of the letters whose blocks have letter sum ≡ 0 mod s.
fn ncs_count(letters: &[i64], s: Param) -> u64 {
    let n = letters.len();
    let all = partitions::enumerate(&ColorWord::empty(), &ColorWord::white(n), partitions::is_noncrossing).unwrap();
    all.iter()
        .filter(|p: &&Partition| p.blocks().iter().all(|b| s.divides(b.iter().map(|&i| letters[i]).sum())))
        .count() as u64
}

#[test]
fn hs_plus_trivial_multiplicities() {
    for s in [1u64, 2, 3, 4] {
        let r = Ring::HsPlus(Param::Finite(s));
        for n in 0..=5usize {
            let total = (s as usize).pow(n as u32);
            for code in 0..total {
                let letters: Vec<i64> = (0..n).map(|i| ((code / (s as usize).pow(i as u32)) % s as usize) as i64).collect();
                assert_eq!(
                    fusion::trivial_multiplicity(r, &letters).unwrap(),
                    ncs_count(&letters, Param::Finite(s)),
                    "s={s} {letters:?}"
                );
            }
        }
    }
}

#[test]
fn hs_plus_self_conjugate_pairs() {
    for s in [2u64, 3, 4] {
        let r = Ring::HsPlus(Param::Finite(s));
        for n in 0..=3usize {
            for code in 0..(s as usize).pow(n as u32) {
                let x: Vec<i64> = (0..n).map(|i| ((code / (s as usize).pow(i as u32)) % s as usize) as i64).collect();
                let l = Label::Word(x.clone());
                let bar = r.conjugate(&l);
                let want: Vec<i64> = x.iter().rev().map(|v| (-v).rem_euclid(s as i64)).collect();
                assert_eq!(bar, Label::Word(want));
                assert_eq!(r.fuse(&l, &bar).unwrap().trivial_multiplicity(), 1);
            }
        }
    }
}
