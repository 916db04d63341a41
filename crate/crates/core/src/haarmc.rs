//! Seeded Monte Carlo sampling of the classical easy groups and empirical
//! character moments.
//!
//! Streams: sample `i` of a run is drawn from `ChaCha20(seed)` with stream id
//! `i / CHUNK`, consuming draws in order within its chunk. Chunks are reduced
//! in index order, so results do not depend on the thread count.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Complex, DMatrix};
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::categories::{CategorySpec, Param};
use crate::freeprob::derangement_exact;
use crate::linalg::fmt_q;
use crate::partitions::{Color, ColorWord};
use crate::weingarten::{asymptotic_moment, truncated_moment};
use crate::{Error, Result, Q};

pub type C64 = Complex<f64>;

/// Samples per independent sub-stream.
pub const CHUNK: u64 = 1024;
pub const RNG_NAME: &str = "ChaCha20 (rand_chacha), stream id = sample index / 1024";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Group {
    Sn,
    /// `Z_s ≀ S_N`; `Param::Infinite` is the full circle, i.e. `K_N`
    Hsn(Param),
    Bn,
    On,
    Un,
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Group::Sn => f.write_str("sn"),
            Group::Hsn(Param::Finite(2)) => f.write_str("hn"),
            Group::Hsn(Param::Infinite) => f.write_str("kn"),
            Group::Hsn(s) => write!(f, "hsn:{s}"),
            Group::Bn => f.write_str("bn"),
            Group::On => f.write_str("on"),
            Group::Un => f.write_str("un"),
        }
    }
}

impl FromStr for Group {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        Ok(match t.as_str() {
            "sn" => Group::Sn,
            "hn" => Group::Hsn(Param::Finite(2)),
            "kn" => Group::Hsn(Param::Infinite),
            "bn" => Group::Bn,
            "on" => Group::On,
            "un" => Group::Un,
            _ => match t.strip_prefix("hsn:") {
                Some(p) => match p.parse()? {
                    Param::Finite(1) => Group::Sn,
                    s => Group::Hsn(s),
                },
                None => return Err(Error::Parse(format!("unknown group '{s}'"))),
            },
        })
    }
}

impl Group {
    /// Entries are complex and moments are indexed by color words.
    pub fn is_unitary_type(self) -> bool {
        match self {
            Group::Un => true,
            Group::Hsn(Param::Finite(s)) => s > 2,
            Group::Hsn(_) => true,
            _ => false,
        }
    }

    /// The category of partitions whose Weingarten calculus integrates over the group.
    pub fn category(self) -> CategorySpec {
        match self {
            Group::Sn => CategorySpec::P,
            Group::Hsn(Param::Finite(2)) => CategorySpec::Peven,
            Group::Hsn(s) => CategorySpec::Ps(s),
            Group::Bn => CategorySpec::P12,
            Group::On => CategorySpec::P2,
            Group::Un => CategorySpec::MatchP2,
        }
    }
}

/// A sampled group element.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupElement {
    /// `u[perm[j]][j] = ω^{exps[j]}` with `ω = e^{2πi/s}`
    Monomial { perm: Vec<usize>, exps: Vec<u64>, s: u64 },
    /// `u[perm[j]][j] = e^{i angles[j]}`
    Circle { perm: Vec<usize>, angles: Vec<f64> },
    Real(DMatrix<f64>),
    Complex(DMatrix<C64>),
}

impl GroupElement {
    pub fn dim(&self) -> usize {
        match self {
            GroupElement::Monomial { perm, .. } | GroupElement::Circle { perm, .. } => perm.len(),
            GroupElement::Real(m) => m.nrows(),
            GroupElement::Complex(m) => m.nrows(),
        }
    }

    pub fn to_complex(&self) -> DMatrix<C64> {
        let n = self.dim();
        match self {
            GroupElement::Monomial { perm, exps, s } => DMatrix::from_fn(n, n, |i, j| {
                if perm[j] == i {
                    Complex::from_polar(1.0, std::f64::consts::TAU * exps[j] as f64 / *s as f64)
                } else {
                    Complex::new(0.0, 0.0)
                }
            }),
            GroupElement::Circle { perm, angles } => DMatrix::from_fn(n, n, |i, j| {
                if perm[j] == i {
                    Complex::from_polar(1.0, angles[j])
                } else {
                    Complex::new(0.0, 0.0)
                }
            }),
            GroupElement::Real(m) => m.map(|x| Complex::new(x, 0.0)),
            GroupElement::Complex(m) => m.clone(),
        }
    }

    /// Exact integer entries of a monomial element whose phases are ±1.
    pub fn signed_entries(&self) -> Option<Vec<Vec<i64>>> {
        match self {
            GroupElement::Monomial { perm, exps, s } if *s <= 2 => {
                let n = perm.len();
                let mut m = vec![vec![0i64; n]; n];
                for j in 0..n {
                    m[perm[j]][j] = if exps[j] == 0 { 1 } else { -1 };
                }
                Some(m)
            }
            _ => None,
        }
    }

    /// `Σ_{i<s} u_ii`.
    pub fn partial_trace(&self, s: usize) -> C64 {
        let mut t = Complex::new(0.0, 0.0);
        match self {
            GroupElement::Monomial { perm, exps, s: m } => {
                for i in 0..s {
                    if perm[i] == i {
                        t += if *m <= 2 {
                            Complex::new(if exps[i] == 0 { 1.0 } else { -1.0 }, 0.0)
                        } else {
                            Complex::from_polar(1.0, std::f64::consts::TAU * exps[i] as f64 / *m as f64)
                        };
                    }
                }
            }
            GroupElement::Circle { perm, angles } => {
                for i in 0..s {
                    if perm[i] == i {
                        t += Complex::from_polar(1.0, angles[i]);
                    }
                }
            }
            GroupElement::Real(m) => t.re = (0..s).map(|i| m[(i, i)]).sum(),
            GroupElement::Complex(m) => (0..s).for_each(|i| t += m[(i, i)]),
        }
        t
    }

    /// `max |u u* - 1|` entrywise.
    pub fn unitarity_residual(&self) -> f64 {
        let u = self.to_complex();
        let p = &u * u.adjoint();
        let n = u.nrows();
        let mut r: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                r = r.max((p[(i, j)] - Complex::new(want, 0.0)).norm());
            }
        }
        r
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroupSampler {
    pub group: Group,
    pub n: usize,
    pub seed: u64,
}

fn gaussian(rng: &mut ChaCha20Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn householder_to_xi(n: usize) -> DMatrix<f64> {
    // reflection exchanging e_0 and ξ/√N
    let xi = 1.0 / (n as f64).sqrt();
    let mut v = nalgebra::DVector::from_element(n, -xi);
    v[0] += 1.0;
    let nn = v.norm_squared();
    let mut h = DMatrix::identity(n, n);
    if nn > 0.0 {
        h -= (&v * v.transpose()) * (2.0 / nn);
    }
    h
}

impl GroupSampler {
    pub fn new(group: Group, n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("N must be at least 1".into()));
        }
        if let Group::Hsn(Param::Finite(0)) = group {
            return Err(Error::InvalidArgument("s must be positive".into()));
        }
        Ok(GroupSampler { group, n, seed })
    }

    pub fn stream(&self, id: u64) -> ChaCha20Rng {
        let mut r = ChaCha20Rng::seed_from_u64(self.seed);
        r.set_stream(id);
        r
    }

    fn permutation(&self, rng: &mut ChaCha20Rng) -> Vec<usize> {
        let mut p: Vec<usize> = (0..self.n).collect();
        p.shuffle(rng);
        p
    }

    fn orthogonal(n: usize, rng: &mut ChaCha20Rng) -> DMatrix<f64> {
        let g = DMatrix::from_fn(n, n, |_, _| gaussian(rng));
        let qr = g.qr();
        let (mut q, r) = (qr.q(), qr.r());
        for j in 0..n {
            if r[(j, j)] < 0.0 {
                q.column_mut(j).neg_mut();
            }
        }
        q
    }

    pub fn sample_with(&self, rng: &mut ChaCha20Rng) -> GroupElement {
        let n = self.n;
        match self.group {
            Group::Sn => GroupElement::Monomial { perm: self.permutation(rng), exps: vec![0; n], s: 1 },
            Group::Hsn(Param::Finite(s)) => {
                let perm = self.permutation(rng);
                let exps = (0..n).map(|_| rng.random_range(0..s)).collect();
                GroupElement::Monomial { perm, exps, s }
            }
            Group::Hsn(Param::Infinite) => {
                let perm = self.permutation(rng);
                let angles = (0..n).map(|_| rng.random::<f64>() * std::f64::consts::TAU).collect();
                GroupElement::Circle { perm, angles }
            }
            Group::On => GroupElement::Real(Self::orthogonal(n, rng)),
            Group::Bn => {
                let mut d = DMatrix::identity(n, n);
                if n > 1 {
                    d.view_mut((1, 1), (n - 1, n - 1)).copy_from(&Self::orthogonal(n - 1, rng));
                }
                let f = householder_to_xi(n);
                GroupElement::Real(&f * d * f.transpose())
            }
            Group::Un => {
                let g = DMatrix::from_fn(n, n, |_, _| Complex::new(gaussian(rng), gaussian(rng)));
                let qr = g.qr();
                let (mut q, r) = (qr.q(), qr.r());
                for j in 0..n {
                    let d = r[(j, j)];
                    let nd = d.norm();
                    if nd > 0.0 {
                        let ph = d / nd;
                        for i in 0..n {
                            q[(i, j)] *= ph;
                        }
                    }
                }
                GroupElement::Complex(q)
            }
        }
    }

    /// The first `count` samples of the run, in index order.
    pub fn samples(&self, count: u64) -> Vec<GroupElement> {
        let mut out = Vec::with_capacity(count as usize);
        let mut id = 0;
        while (out.len() as u64) < count {
            let mut rng = self.stream(id);
            let take = CHUNK.min(count - out.len() as u64);
            for _ in 0..take {
                out.push(self.sample_with(&mut rng));
            }
            id += 1;
        }
        out
    }

    /// Sums `f` over `count` samples in fixed reduction order.
    fn reduce<const K: usize>(&self, count: u64, f: impl Fn(&GroupElement) -> [C64; K] + Sync) -> Vec<[(C64, f64, f64); K]> {
        let chunks = count.div_ceil(CHUNK);
        (0..chunks)
            .into_par_iter()
            .map(|id| {
                let mut rng = self.stream(id);
                let take = CHUNK.min(count - id * CHUNK);
                let mut acc = [(Complex::new(0.0, 0.0), 0.0, 0.0); K];
                for _ in 0..take {
                    let v = f(&self.sample_with(&mut rng));
                    for (a, x) in acc.iter_mut().zip(v) {
                        a.0 += x;
                        a.1 += x.re * x.re;
                        a.2 += x.im * x.im;
                    }
                }
                acc
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MomentRow {
    /// Color word: `o` is `χ_t`, `b` is its conjugate
    pub word: String,
    pub k: usize,
    pub estimate: f64,
    pub estimate_im: f64,
    pub std_error: f64,
    pub std_error_im: f64,
    pub exact: Option<String>,
    pub exact_f64: Option<f64>,
    pub asymptotic: Option<String>,
    pub z: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EmpiricalMoments {
    pub group: String,
    pub n: usize,
    pub seed: u64,
    pub rng: String,
    pub t: String,
    /// `⌊tN⌋`
    pub s: usize,
    pub k_max: usize,
    pub n_samples: u64,
    pub rows: Vec<MomentRow>,
}

fn rows_words(group: Group, k_max: usize) -> Vec<ColorWord> {
    let mut out: Vec<ColorWord> = (1..=k_max).map(ColorWord::white).collect();
    if group.is_unitary_type() {
        for m in 1..=k_max / 2 {
            out.push(ColorWord::alternating(2 * m));
        }
    }
    out
}

fn word_value(chi: C64, w: &ColorWord) -> C64 {
    let mut v = Complex::new(1.0, 0.0);
    for c in w.letters() {
        v *= if *c == Color::White { chi } else { chi.conj() };
    }
    v
}

fn truncation(t: &Q, n: usize) -> Result<usize> {
    if *t <= Q::from_integer(0.into()) || *t > Q::from_integer(1.into()) {
        return Err(Error::InvalidArgument("t must lie in (0, 1]".into()));
    }
    Ok((t * Q::from_integer(n.into())).floor().to_integer().to_usize().unwrap())
}

const MAX_ROWS: usize = 16;

/// Monte Carlo means of the `*`-moments of `χ_t` with standard errors.
pub fn empirical_moments(sampler: &GroupSampler, t: &Q, k_max: usize, n_samples: u64) -> Result<EmpiricalMoments> {
    if n_samples < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    let s = truncation(t, sampler.n)?;
    let words = rows_words(sampler.group, k_max);
    if words.len() > MAX_ROWS {
        return Err(Error::SizeGuard { points: k_max, bound: MAX_ROWS / 2 });
    }
    let ws = words.clone();
    let chunks = sampler.reduce::<MAX_ROWS>(n_samples, move |g| {
        let chi = g.partial_trace(s);
        let mut out = [Complex::new(0.0, 0.0); MAX_ROWS];
        for (o, w) in out.iter_mut().zip(&ws) {
            *o = word_value(chi, w);
        }
        out
    });
    let nf = n_samples as f64;
    let rows = words
        .iter()
        .enumerate()
        .map(|(r, w)| {
            let (mut sum, mut sq_re, mut sq_im) = (Complex::new(0.0, 0.0), 0.0, 0.0);
            for c in &chunks {
                sum += c[r].0;
                sq_re += c[r].1;
                sq_im += c[r].2;
            }
            let mean = sum / nf;
            let var = |sq: f64, m: f64| ((sq / nf - m * m) * nf / (nf - 1.0)).max(0.0);
            MomentRow {
                word: w.to_string(),
                k: w.len(),
                estimate: mean.re,
                estimate_im: mean.im,
                std_error: (var(sq_re, mean.re) / nf).sqrt(),
                std_error_im: (var(sq_im, mean.im) / nf).sqrt(),
                exact: None,
                exact_f64: None,
                asymptotic: None,
                z: None,
            }
        })
        .collect();
    Ok(EmpiricalMoments {
        group: sampler.group.to_string(),
        n: sampler.n,
        seed: sampler.seed,
        rng: RNG_NAME.into(),
        t: fmt_q(t),
        s,
        k_max,
        n_samples,
        rows,
    })
}

pub fn z_score(estimate: f64, exact: f64, se: f64) -> f64 {
    if se > 0.0 {
        (estimate - exact) / se
    } else if (estimate - exact).abs() < 1e-9 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Empirical moments together with the exact finite-N values
/// `Tr(W_{kN} G_{ks})` and their large-N limits.
pub fn compare_exact(sampler: &GroupSampler, t: &Q, k_max: usize, n_samples: u64) -> Result<EmpiricalMoments> {
    let mut rep = empirical_moments(sampler, t, k_max, n_samples)?;
    let spec = sampler.group.category();
    for row in &mut rep.rows {
        let w: ColorWord = row.word.parse()?;
        let exact = truncated_moment(&spec, &w, sampler.n as u64, rep.s as u64, false)?;
        let ef = exact.to_f64().unwrap_or(f64::NAN);
        row.z = Some(z_score(row.estimate, ef, row.std_error));
        row.exact = Some(fmt_q(&exact));
        row.exact_f64 = Some(ef);
        row.asymptotic = Some(fmt_q(&asymptotic_moment(&spec, &w, t)?));
    }
    Ok(rep)
}

#[derive(Clone, Debug, Serialize)]
pub struct DerangementEstimate {
    pub n: usize,
    pub seed: u64,
    pub n_samples: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub exact: String,
    pub exact_f64: f64,
    pub z: f64,
}

/// Fraction of fixed-point-free uniform permutations of N points.
pub fn derangement_rate(n: usize, n_samples: u64, seed: u64) -> Result<DerangementEstimate> {
    if n_samples < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    let sampler = GroupSampler::new(Group::Sn, n, seed)?;
    let chunks = sampler.reduce::<1>(n_samples, |g| match g {
        GroupElement::Monomial { perm, .. } => {
            let free = perm.iter().enumerate().all(|(i, &p)| p != i);
            [Complex::new(if free { 1.0 } else { 0.0 }, 0.0)]
        }
        _ => unreachable!(),
    });
    let hits: f64 = chunks.iter().map(|c| c[0].0.re).sum();
    let nf = n_samples as f64;
    let p = hits / nf;
    let se = (p * (1.0 - p) / (nf - 1.0)).sqrt();
    let exact = derangement_exact(n as u64);
    let ef = exact.to_f64().unwrap();
    Ok(DerangementEstimate {
        n,
        seed,
        n_samples,
        estimate: p,
        std_error: se,
        exact: fmt_q(&exact),
        exact_f64: ef,
        z: z_score(p, ef, se),
    })
}

/// CSV with columns `k,estimate,std_error,exact,z,word`.
pub fn to_csv(rep: &EmpiricalMoments) -> String {
    let mut s = String::from("k,estimate,std_error,exact,z,word\n");
    for r in &rep.rows {
        let ex = r.exact_f64.map(|x| format!("{x:.10}")).unwrap_or_default();
        let z = r.z.map(|x| format!("{x:.4}")).unwrap_or_default();
        s += &format!("{},{:.10},{:.10},{},{},{}\n", r.k, r.estimate, r.std_error, ex, z, r.word);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structure() {
        let one = GroupSampler::new(Group::Sn, 1, 3).unwrap().samples(1);
        assert_eq!(one[0].signed_entries().unwrap(), vec![vec![1]]);
        for g in GroupSampler::new("hn".parse().unwrap(), 6, 1).unwrap().samples(200) {
            let m = g.signed_entries().unwrap();
            for i in 0..6 {
                assert_eq!(m[i].iter().filter(|&&x| x != 0).count(), 1);
                assert_eq!((0..6).filter(|&j| m[j][i] != 0).count(), 1);
            }
        }
        for grp in [Group::On, Group::Un, Group::Bn, Group::Hsn(Param::Infinite), Group::Hsn(Param::Finite(3))] {
            for g in GroupSampler::new(grp, 5, 9).unwrap().samples(20) {
                assert!(g.unitarity_residual() < 1e-10, "{grp}");
            }
        }
        for g in GroupSampler::new(Group::Bn, 5, 2).unwrap().samples(20) {
            let u = g.to_complex();
            for i in 0..5 {
                assert!((u.row(i).sum() - Complex::new(1.0, 0.0)).norm() < 1e-12);
                assert!((u.column(i).sum() - Complex::new(1.0, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn determinism() {
        let s = GroupSampler::new(Group::On, 4, 11).unwrap();
        assert_eq!(s.samples(3000), s.samples(3000));
        let a = derangement_rate(10, 5000, 1).unwrap();
        let b = derangement_rate(10, 5000, 1).unwrap();
        assert_eq!(a.estimate, b.estimate);
        assert_eq!(derangement_rate(2, 1000, 5).unwrap().exact, "1/2");
    }

    #[test]
    fn small_exact_comparison() {
        let s = GroupSampler::new(Group::On, 8, 4).unwrap();
        let rep = compare_exact(&s, &Q::from_integer(1.into()), 2, 20000).unwrap();
        assert_eq!(rep.rows[1].exact.as_deref(), Some("1/1"));
        for r in &rep.rows {
            assert!(r.z.unwrap().abs() <= 4.0, "{r:?}");
        }
        let u = GroupSampler::new(Group::Un, 4, 4).unwrap();
        let rep = compare_exact(&u, &Q::from_integer(1.into()), 2, 20000).unwrap();
        let ob = rep.rows.iter().find(|r| r.word == "ob").unwrap();
        assert_eq!(ob.exact.as_deref(), Some("1/1"));
        assert!(ob.z.unwrap().abs() <= 4.0);
    }
}
