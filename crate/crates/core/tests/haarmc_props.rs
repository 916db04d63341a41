use easyqg::categories::Param;
use easyqg::haarmc::{self, Group, GroupElement, GroupSampler};
use easyqg::Q;
use num_bigint::BigInt;

fn q(a: i64, b: i64) -> Q {
    Q::new(BigInt::from(a), BigInt::from(b))
}

#[test]
fn identical_seeds_identical_streams() {
    for g in [Group::Sn, Group::Hsn(Param::Finite(3)), Group::Hsn(Param::Infinite), Group::Bn, Group::On, Group::Un] {
        let s = GroupSampler::new(g, 5, 99).unwrap();
        assert_eq!(s.samples(1500), s.samples(1500), "{g}");
        let other = GroupSampler::new(g, 5, 100).unwrap();
        assert_ne!(s.samples(4), other.samples(4), "{g}");
    }
    let s = GroupSampler::new(Group::On, 6, 1).unwrap();
    let a = haarmc::empirical_moments(&s, &q(1, 2), 3, 3000).unwrap();
    let b = haarmc::empirical_moments(&s, &q(1, 2), 3, 3000).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn group_membership() {
    for g in GroupSampler::new(Group::Sn, 7, 3).unwrap().samples(1000) {
        let m = g.signed_entries().unwrap();
        for i in 0..7 {
            assert_eq!(m[i].iter().filter(|&&x| x == 1).count(), 1);
            assert_eq!(m[i].iter().filter(|&&x| x != 0).count(), 1);
            assert_eq!((0..7).filter(|&j| m[j][i] != 0).count(), 1);
        }
    }
    for g in GroupSampler::new(Group::Hsn(Param::Finite(2)), 8, 3).unwrap().samples(10_000) {
        let m = g.signed_entries().unwrap();
        for i in 0..8 {
            assert!(m[i].iter().all(|x| [-1, 0, 1].contains(x)));
            assert_eq!(m[i].iter().filter(|&&x| x != 0).count(), 1);
            assert_eq!((0..8).filter(|&j| m[j][i] != 0).count(), 1);
        }
    }
    for grp in [Group::On, Group::Un, Group::Bn] {
        for g in GroupSampler::new(grp, 9, 5).unwrap().samples(200) {
            assert!(g.unitarity_residual() <= 1e-10, "{grp}");
            if let GroupElement::Real(m) = &g {
                assert!(m.iter().all(|x| x.is_finite()));
            }
        }
    }
    for g in GroupSampler::new(Group::Bn, 9, 6).unwrap().samples(200) {
        let u = g.to_complex();
        for i in 0..9 {
            assert!((u.row(i).sum().re - 1.0).abs() <= 1e-12 && u.row(i).sum().im.abs() <= 1e-12);
            assert!((u.column(i).sum().re - 1.0).abs() <= 1e-12);
        }
    }
}

#[test]
fn exact_comparisons_at_small_n() {
    // exact at finite N: sn with s = 3 of 6, on and un at N = 8
    let cases: [(Group, usize, Q, usize); 4] = [
        (Group::Sn, 6, q(1, 2), 3),
        (Group::On, 8, q(1, 1), 2),
        (Group::Un, 8, q(1, 1), 2),
        (Group::Bn, 5, q(3, 5), 3),
    ];
    for (g, n, t, k) in cases {
        let s = GroupSampler::new(g, n, 2024).unwrap();
        let rep = haarmc::compare_exact(&s, &t, k, 40_000).unwrap();
        for r in &rep.rows {
            assert!(r.z.unwrap().abs() <= 4.0, "{g}: {r:?}");
        }
    }
}

#[test]
fn derangement_limits() {
    let d = haarmc::derangement_rate(2, 2000, 1).unwrap();
    assert_eq!(d.exact, "1/2");
    assert!((d.exact_f64 - 0.5).abs() < 1e-15);
    assert!(d.z.abs() <= 4.0);
}
