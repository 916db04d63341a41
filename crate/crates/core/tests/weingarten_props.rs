use easyqg::categories::{self, CategorySpec};
use easyqg::linalg;
use easyqg::partitions::ColorWord;
use easyqg::weingarten::{self, DetFormula};
use easyqg::Q;
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

fn qi(x: i64) -> Q {
    Q::from_integer(BigInt::from(x))
}

/// Oracle: the determinant by Gaussian elimination over the rationals.
fn det_gauss(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m.iter().map(|r| r.iter().map(|x| Q::from_integer(x.clone())).collect()).collect();
    let mut det = qi(1);
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else { return BigInt::from(0) };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        for r in c + 1..n {
            let f = &a[r][c] / &a[c][c];
            for j in c..n {
                let v = &f * &a[c][j];
                a[r][j] -= v;
            }
        }
    }
    assert!(det.is_integer());
    det.to_integer()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn weingarten_inverts_gram(idx in 0usize..47, k in 0usize..=4, extra in 0u64..=3) {
        let specs = categories::shipped();
        let spec = &specs[idx % specs.len()];
        let w = spec.default_word(k);
        let n = (k as u64).max(1) + extra;
        let g = weingarten::gram(spec, &w, n).unwrap();
        let wm = weingarten::weingarten(spec, &w, n).unwrap();
        prop_assert!(wm.is_symmetric());
        let prod = linalg::matmul_q(&wm.entries, &linalg::to_q(&g.integer_entries()));
        prop_assert!(linalg::is_identity(&prod));
    }
}

#[test]
fn gram_det_matches_elimination_oracle() {
    for spec in [CategorySpec::P, CategorySpec::NC2, CategorySpec::P12] {
        for k in 1..=4 {
            for n in 1..=4 {
                let w = ColorWord::white(k);
                let g = weingarten::gram(&spec, &w, n).unwrap().integer_entries();
                assert_eq!(weingarten::gram_det(&spec, &w, n).unwrap(), det_gauss(&g), "{spec} k={k} N={n}");
            }
        }
    }
}

#[test]
fn determinant_formulas() {
    let cases: [(DetFormula, usize, std::ops::RangeInclusive<u64>); 6] = [
        (DetFormula::Lindstrom, 5, 1..=6),
        (DetFormula::On, 8, 3..=6),
        (DetFormula::OnPlus, 10, 2..=6),
        (DetFormula::SnPlus, 5, 1..=6),
        (DetFormula::Bn, 4, 1..=6),
        (DetFormula::BnPlus, 4, 1..=6),
    ];
    for (id, kmax, ns) in cases {
        let spec = id.category();
        for k in 1..=kmax {
            if matches!(id, DetFormula::On | DetFormula::OnPlus) && k % 2 == 1 {
                continue;
            }
            for n in ns.clone() {
                let g = weingarten::gram_det(&spec, &ColorWord::white(k), n).unwrap();
                assert_eq!(weingarten::det_formula(id, k, n).unwrap(), Q::from_integer(g), "{id} k={k} N={n}");
            }
        }
    }
}

#[test]
fn fattened_gram_matches() {
    for k in 1..=4 {
        for n in 1..=4 {
            assert!(weingarten::gram_fatten_check(k, n).unwrap());
        }
    }
}

#[test]
fn small_determinant_anchors() {
    for n in 2..=6i64 {
        let nc2 = weingarten::gram_det(&CategorySpec::NC2, &ColorWord::white(4), n as u64).unwrap();
        assert_eq!(nc2, BigInt::from(n * n * (n * n - 1)));
        let nc3 = weingarten::gram_det(&CategorySpec::NC, &ColorWord::white(3), n as u64).unwrap();
        assert_eq!(nc3, BigInt::from(n.pow(5) * (n - 1).pow(4) * (n - 2)));
    }
}

#[test]
fn asymptotic_moments_count_partitions() {
    let t = qi(1);
    for spec in [CategorySpec::P, CategorySpec::NC2, CategorySpec::Peven] {
        for k in 1..=6 {
            let w = ColorWord::white(k);
            let m = weingarten::asymptotic_moment(&spec, &w, &t).unwrap();
            assert_eq!(m, qi(spec.basis(&w).unwrap().len() as i64));
        }
    }
}
