mod common;

use common::*;
use easyqg::categories::{self, CategorySpec};
use easyqg::linmap::{self, op_adjoint, op_compose, op_tensor, tpi, tpi_twisted};
use easyqg::partitions::{self, ColorWord, Partition};
use proptest::prelude::*;

fn compose_law(top: &Partition, bottom: &Partition, n: u32, twisted: bool) -> bool {
    let t = |p: &Partition| if twisted { tpi_twisted(p, n) } else { tpi(p, n) };
    let (c, loops) = partitions::compose(top, bottom).unwrap();
    let lhs = op_compose(&t(bottom).unwrap(), &t(top).unwrap()).unwrap();
    lhs == t(&c).unwrap().scale(linmap::npow(n, loops))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tensor_and_adjoint_laws(a in partition_upto(3, true), b in partition_upto(3, true), n in 1u32..=3) {
        let ta = tpi(&a, n).unwrap();
        prop_assert_eq!(op_tensor(&ta, &tpi(&b, n).unwrap()).unwrap(), tpi(&partitions::tensor(&a, &b), n).unwrap());
        prop_assert_eq!(op_adjoint(&ta), tpi(&partitions::involute(&a), n).unwrap());
        prop_assert_eq!(op_adjoint(&op_adjoint(&ta)), ta);
    }

    #[test]
    fn composition_law(
        (top, bottom) in (0usize..=3, 0usize..=3, 0usize..=3)
            .prop_flat_map(|(k, m, l)| (partition_kl(k, m, false), partition_kl(m, l, false))),
        n in 1u32..=3,
    ) {
        prop_assert!(compose_law(&top, &bottom, n, false));
    }

    #[test]
    fn compose_associative(
        a in partition_kl(2, 1, false),
        b in partition_kl(1, 2, false),
        c in partition_kl(2, 2, false),
        n in 1u32..=3,
    ) {
        let (ta, tb, tc) = (tpi(&a, n).unwrap(), tpi(&b, n).unwrap(), tpi(&c, n).unwrap());
        let l = op_compose(&op_compose(&tc, &tb).unwrap(), &ta).unwrap();
        let r = op_compose(&tc, &op_compose(&tb, &ta).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }
}

#[test]
fn inner_products_are_gram_entries() {
    let ps = CategorySpec::P.basis(&ColorWord::white(4)).unwrap();
    for n in 1..=4u32 {
        for a in &ps {
            let ta = tpi(a, n).unwrap();
            for b in &ps {
                let want = linmap::npow(n, partitions::join(a, b).unwrap().num_blocks());
                assert_eq!(ta.inner(&tpi(b, n).unwrap()).unwrap(), want);
            }
        }
    }
}

#[test]
fn twist_is_trivial_on_noncrossing() {
    for m in categories::members_upto(&CategorySpec::NCeven, 6).unwrap() {
        for n in 1..=3u32 {
            if m.points() == 6 && n == 3 && m.k() != 0 {
                continue;
            }
            assert_eq!(tpi_twisted(&m, n).unwrap(), tpi(&m, n).unwrap(), "{m}");
        }
    }
}

#[test]
fn twisted_laws_on_even_partitions() {
    let ev = categories::members_upto(&CategorySpec::Peven, 4).unwrap();
    for a in &ev {
        assert_eq!(op_adjoint(&tpi_twisted(a, 2).unwrap()), tpi_twisted(&partitions::involute(a), 2).unwrap());
        for b in &ev {
            if a.lower() == b.upper() {
                assert!(compose_law(a, b, 2, true), "{a} {b}");
            }
            if a.points() + b.points() <= 6 {
                let t = op_tensor(&tpi_twisted(a, 2).unwrap(), &tpi_twisted(b, 2).unwrap()).unwrap();
                assert_eq!(t, tpi_twisted(&partitions::tensor(a, b), 2).unwrap());
            }
        }
    }
}

#[test]
fn mobius_expansion_of_twists() {
    for p in CategorySpec::Peven.basis(&ColorWord::white(6)).unwrap() {
        assert!(linmap::mobius_expansion_check(&p, 2).unwrap(), "{p}");
    }
}
