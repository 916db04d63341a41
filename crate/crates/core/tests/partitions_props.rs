mod common;

use common::*;
use easyqg::categories::CategorySpec;
use easyqg::partitions::{self, ColorWord, Partition};
use proptest::prelude::*;

fn all(n: usize) -> Vec<Partition> {
    partitions::enumerate(&ColorWord::empty(), &ColorWord::white(n), |_| true).unwrap()
}

/// Shuffles the even partition's points inside the flat form by a random
/// rotation and a random block order.
fn permuted_signature(p: &Partition, rot: usize, order_seed: u64) -> i64 {
    let nb = p.num_blocks();
    let mut order: Vec<usize> = (0..nb).collect();
    let mut s = order_seed;
    for i in (1..nb).rev() {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        order.swap(i, (s >> 33) as usize % (i + 1));
    }
    partitions::signature_with(p, rot % p.points().max(1), Some(&order)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn canonical_round_trip(p in partition_upto(10, true)) {
        let text = serde_json::to_string(&p).unwrap();
        let q: Partition = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&q, &p);
        prop_assert_eq!(serde_json::to_string(&q).unwrap(), text);
        let shown: Partition = p.to_string().parse().unwrap();
        prop_assert_eq!(shown, p);
    }

    #[test]
    fn involute_is_involution(p in partition_upto(8, true)) {
        prop_assert_eq!(partitions::involute(&partitions::involute(&p)), p);
    }

    #[test]
    fn tensor_associative(a in partition_upto(3, true), b in partition_upto(3, true), c in partition_upto(2, true)) {
        let l = partitions::tensor(&partitions::tensor(&a, &b), &c);
        let r = partitions::tensor(&a, &partitions::tensor(&b, &c));
        prop_assert_eq!(l, r);
    }

    #[test]
    fn compose_associative(
        a in partition_kl(2, 2, false),
        b in partition_kl(2, 3, false),
        c in partition_kl(3, 1, false),
    ) {
        let (ab, l1) = partitions::compose(&a, &b).unwrap();
        let (abc, l2) = partitions::compose(&ab, &c).unwrap();
        let (bc, r1) = partitions::compose(&b, &c).unwrap();
        let (abc2, r2) = partitions::compose(&a, &bc).unwrap();
        prop_assert_eq!(abc, abc2);
        prop_assert_eq!(l1 + l2, r1 + r2);
    }

    #[test]
    fn signature_independent_of_normalization(p in (1usize..=4).prop_flat_map(|h| even_partition(2 * h)), seeds in proptest::collection::vec((0usize..16, any::<u64>()), 10)) {
        let s0 = partitions::signature(&p).unwrap();
        for (rot, seed) in seeds {
            prop_assert_eq!(permuted_signature(&p, rot, seed), s0);
        }
    }
}

#[test]
fn lattice_laws_exhaustive() {
    for n in 0..=5 {
        let ps = all(n);
        for a in &ps {
            assert!(partitions::leq(a, a).unwrap());
            assert_eq!(&partitions::join(a, a).unwrap(), a);
            for b in &ps {
                let j = partitions::join(a, b).unwrap();
                assert_eq!(j, partitions::join(b, a).unwrap());
                assert!(partitions::leq(a, &j).unwrap() && partitions::leq(b, &j).unwrap());
                if partitions::leq(a, b).unwrap() && partitions::leq(b, a).unwrap() {
                    assert_eq!(a, b);
                }
                for c in &ps {
                    if partitions::leq(a, c).unwrap() && partitions::leq(b, c).unwrap() {
                        assert!(partitions::leq(&j, c).unwrap(), "join is not least");
                    }
                    if n <= 4 {
                        assert_eq!(
                            partitions::join(&j, c).unwrap(),
                            partitions::join(a, &partitions::join(b, c).unwrap()).unwrap()
                        );
                        if partitions::leq(a, b).unwrap() && partitions::leq(b, c).unwrap() {
                            assert!(partitions::leq(a, c).unwrap());
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn mobius_inversion() {
    for n in 1..=4 {
        let ps = all(n);
        for a in &ps {
            for b in &ps {
                if !partitions::leq(a, b).unwrap() {
                    continue;
                }
                let s: i64 = partitions::interval(a, b).unwrap().iter().map(|t| partitions::mobius(a, t).unwrap()).sum();
                assert_eq!(s, i64::from(a == b), "{a} {b}");
            }
        }
    }
}

#[test]
fn distance_triangle_inequality() {
    let ps = all(4);
    for a in &ps {
        for b in &ps {
            let ab = partitions::twice_distance(a, b).unwrap();
            assert_eq!(ab, partitions::twice_distance(b, a).unwrap());
            assert_eq!(ab == 0, a == b);
            for c in &ps {
                let ac = partitions::twice_distance(a, c).unwrap();
                let cb = partitions::twice_distance(c, b).unwrap();
                assert!(ab <= ac + cb);
            }
        }
    }
}

fn for_each_pairing(n: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(lab: &mut Vec<Option<usize>>, next: usize, f: &mut dyn FnMut(&[usize])) {
        match lab.iter().position(|x| x.is_none()) {
            None => f(&lab.iter().map(|x| x.unwrap()).collect::<Vec<_>>()),
            Some(i) => {
                lab[i] = Some(next);
                for j in i + 1..lab.len() {
                    if lab[j].is_none() {
                        lab[j] = Some(next);
                        rec(lab, next + 1, f);
                        lab[j] = None;
                    }
                }
                lab[i] = None;
            }
        }
    }
    rec(&mut vec![None; n], 0, f);
}

#[test]
fn catalan_and_bell_counts() {
    for k in 0..=8usize {
        assert_eq!(all(k).len() as u64, bell(k));
        let mut nc2 = 0u64;
        for_each_pairing(2 * k, &mut |lab| {
            let p = Partition::from_labels(ColorWord::empty(), ColorWord::white(2 * k), lab).unwrap();
            if partitions::is_noncrossing(&p) {
                nc2 += 1;
            }
        });
        assert_eq!(nc2, catalan(k as u64));
        if k <= 6 {
            assert_eq!(CategorySpec::NC2.basis(&ColorWord::white(2 * k)).unwrap().len() as u64, catalan(k as u64));
        }
    }
}
