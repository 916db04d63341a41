//! Classical and free moment-cumulant calculus and the limit laws of truncated
//! characters.
//!
//! Sequences start at index 1: `values[0]` is `M_1` (or `k_1`, `κ_1`).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::categories::{CategorySpec, Param};
use crate::linalg::{fmt_q, parse_q};
use crate::partitions::{self, count_labels, ColorWord, Partition};
use crate::{Error, Result, Q};

/// Largest order accepted by `law_moments`.
pub const MAX_ORDER: usize = 16;
/// Largest order for which category-weighted moments are counted by enumeration.
pub const MAX_ENUMERATED: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Classical,
    Free,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Classical => "classical",
            Flavor::Free => "free",
        })
    }
}

impl FromStr for Flavor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "classical" => Ok(Flavor::Classical),
            "free" => Ok(Flavor::Free),
            o => Err(Error::Parse(format!("unknown flavor '{o}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentSeq {
    pub values: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CumulantSeq {
    pub values: Vec<Q>,
    pub flavor: Flavor,
}

impl MomentSeq {
    pub fn order(&self) -> usize {
        self.values.len()
    }

    fn with_zero(&self) -> Vec<Q> {
        std::iter::once(Q::one()).chain(self.values.iter().cloned()).collect()
    }
}

pub fn to_strings(v: &[Q]) -> Vec<String> {
    v.iter().map(fmt_q).collect()
}

fn qi(x: i64) -> Q {
    Q::from_integer(BigInt::from(x))
}

fn bin(n: usize, k: usize) -> Q {
    Q::from_integer(binomial(BigInt::from(n), BigInt::from(k)))
}

/// `[z^d] (Σ_{i≥0} m_i z^i)^s` for `d = 0..=n`, given `m_0 = 1`.
fn power_coeffs(m: &[Q], s: usize, n: usize) -> Vec<Q> {
    let mut acc = vec![Q::zero(); n + 1];
    acc[0] = Q::one();
    for _ in 0..s {
        let mut next = vec![Q::zero(); n + 1];
        for (i, a) in acc.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for j in 0..=n - i {
                if j < m.len() && !m[j].is_zero() {
                    next[i + j] += a * &m[j];
                }
            }
        }
        acc = next;
    }
    acc
}

/// Contribution to `M_n` of the cumulants `c_1..c_{n-1}` and lower moments.
fn lower_terms(c: &[Q], m: &[Q], n: usize, flavor: Flavor) -> Q {
    let mut s = Q::zero();
    for size in 1..n {
        let cs = &c[size - 1];
        if cs.is_zero() {
            continue;
        }
        match flavor {
            // M_n = Σ_s C(n-1, s-1) k_s M_{n-s}
            Flavor::Classical => s += cs * bin(n - 1, size - 1) * &m[n - size],
            // M_n = Σ_s κ_s [z^{n-s}] M(z)^s
            Flavor::Free => s += cs * &power_coeffs(m, size, n - size)[n - size],
        }
    }
    s
}

pub fn cumulants_to_moments(c: &CumulantSeq) -> MomentSeq {
    let n = c.values.len();
    let mut m = vec![Q::one()];
    for k in 1..=n {
        let v = lower_terms(&c.values, &m, k, c.flavor) + &c.values[k - 1];
        m.push(v);
    }
    MomentSeq { values: m[1..].to_vec() }
}

pub fn moments_to_cumulants(m: &MomentSeq, flavor: Flavor) -> CumulantSeq {
    let full = m.with_zero();
    let mut c: Vec<Q> = Vec::with_capacity(m.order());
    for k in 1..=m.order() {
        c.push(Q::zero());
        let rest = lower_terms(&c, &full, k, flavor);
        c[k - 1] = &full[k] - rest;
    }
    CumulantSeq { values: c, flavor }
}

fn lattice(n: usize, flavor: Flavor) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    partitions::for_each_set_partition(n, None, |lab| {
        if flavor == Flavor::Classical || partitions::noncrossing_sequence(lab) {
            out.push(lab.to_vec());
        }
    });
    out
}

fn block_sizes(lab: &[u8]) -> Vec<usize> {
    let mut sizes = vec![0usize; count_labels(lab)];
    for &b in lab {
        sizes[b as usize] += 1;
    }
    sizes
}

/// `M_n = Σ_{ν ∈ L(n)} c_ν` with `L = P` or `NC`, by enumeration.
pub fn moments_from_partitions(c: &[Q], flavor: Flavor) -> Vec<Q> {
    (1..=c.len())
        .map(|n| {
            lattice(n, flavor)
                .iter()
                .map(|lab| block_sizes(lab).iter().fold(Q::one(), |a, &s| a * &c[s - 1]))
                .sum()
        })
        .collect()
}

/// `c_n = Σ_{ν ∈ L(n)} M_ν μ(ν, 1_n)`, with the Möbius function of `L(n)`.
pub fn cumulants_from_partitions(m: &[Q], flavor: Flavor) -> Result<Vec<Q>> {
    let mut out = Vec::new();
    for n in 1..=m.len() {
        let w = ColorWord::white(n);
        let e = ColorWord::empty();
        let elems: Vec<Partition> = lattice(n, flavor)
            .iter()
            .map(|l| Partition::from_labels(e.clone(), w.clone(), l))
            .collect::<Result<_>>()?;
        let top = Partition::from_labels(e.clone(), w.clone(), &vec![0u8; n])?;
        let mut s = Q::zero();
        for nu in &elems {
            let mu = partitions::mobius_in(&elems, nu, &top)?;
            if mu != 0 {
                let mv = block_sizes(nu.labels()).iter().fold(Q::one(), |a, &b| a * &m[b - 1]);
                s += mv * qi(mu);
            }
        }
        out.push(s);
    }
    Ok(out)
}

/// Moment-level description of a probability law.
#[derive(Clone, Debug, PartialEq)]
pub enum LawSpec {
    /// `Σ_{π ∈ D(k)} t^{|π|}` over all-white words
    CategoryWeighted { spec: CategorySpec, t: Q },
    Dirac(Q),
    Poisson(Q),
    Gaussian(Q),
    Semicircle(Q),
    FreePoisson(Q),
    Bessel { s: Param, t: Q },
    FreeBessel { s: Param, t: Q },
    /// Law of `t + X` with `X` following the base law
    Shifted { base: Box<LawSpec>, t: Q },
}

impl fmt::Display for LawSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LawSpec::CategoryWeighted { spec, t } => write!(f, "cat:t={}:{}", fmt_q(t), spec),
            LawSpec::Dirac(c) => write!(f, "dirac:c={}", fmt_q(c)),
            LawSpec::Poisson(t) => write!(f, "poisson:t={}", fmt_q(t)),
            LawSpec::Gaussian(t) => write!(f, "gaussian:t={}", fmt_q(t)),
            LawSpec::Semicircle(t) => write!(f, "semicircle:t={}", fmt_q(t)),
            LawSpec::FreePoisson(t) => write!(f, "free_poisson:t={}", fmt_q(t)),
            LawSpec::Bessel { s, t } => write!(f, "bessel:s={},t={}", s, fmt_q(t)),
            LawSpec::FreeBessel { s, t } => write!(f, "free_bessel:s={},t={}", s, fmt_q(t)),
            LawSpec::Shifted { base, t } => write!(f, "shifted:t={}:{}", fmt_q(t), base),
        }
    }
}

fn parse_params(s: &str) -> Result<HashMap<String, String>> {
    let mut out = HashMap::new();
    for kv in s.split(',').filter(|x| !x.trim().is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got '{kv}'")))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// Grammar: `poisson:t=1`, `bessel:s=2,t=1/2`, `dirac:c=3`,
/// `cat:t=1/2:peven`, `shifted:t=1:semicircle:t=1`.
impl FromStr for LawSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let kind = kind.to_ascii_lowercase();
        if kind == "cat" || kind == "shifted" {
            let (params, tail) = rest
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("'{s}': expected {kind}:t=<t>:<...>")))?;
            let p = parse_params(params)?;
            let t = parse_q(p.get("t").ok_or_else(|| Error::Parse("missing t".into()))?)?;
            return Ok(if kind == "cat" {
                LawSpec::CategoryWeighted { spec: tail.parse()?, t }
            } else {
                LawSpec::Shifted { base: Box::new(tail.parse()?), t }
            });
        }
        let p = parse_params(rest)?;
        let get_q = |key: &str, default: Option<&str>| -> Result<Q> {
            match p.get(key).map(|x| x.as_str()).or(default) {
                Some(v) => parse_q(v),
                None => Err(Error::Parse(format!("law '{kind}' needs {key}=..."))),
            }
        };
        let get_s = || -> Result<Param> {
            p.get("s").ok_or_else(|| Error::Parse(format!("law '{kind}' needs s=...")))?.parse()
        };
        Ok(match kind.as_str() {
            "dirac" => LawSpec::Dirac(get_q("c", None)?),
            "poisson" => LawSpec::Poisson(get_q("t", Some("1"))?),
            "gaussian" | "normal" => LawSpec::Gaussian(get_q("t", Some("1"))?),
            "semicircle" => LawSpec::Semicircle(get_q("t", Some("1"))?),
            "free_poisson" | "marchenko_pastur" => LawSpec::FreePoisson(get_q("t", Some("1"))?),
            "bessel" => LawSpec::Bessel { s: get_s()?, t: get_q("t", Some("1"))? },
            "free_bessel" => LawSpec::FreeBessel { s: get_s()?, t: get_q("t", Some("1"))? },
            o => return Err(Error::Parse(format!("unknown law '{o}'"))),
        })
    }
}

fn seq(n: usize, f: impl FnMut(usize) -> Q) -> Vec<Q> {
    (1..=n).map(f).collect()
}

fn bessel_cumulants(s: Param, t: &Q, n: usize) -> Result<Vec<Q>> {
    match s {
        Param::Finite(1) | Param::Finite(2) => Ok(seq(n, |k| if s.divides(k as i64) { t.clone() } else { Q::zero() })),
        _ => Err(Error::Unsupported(format!(
            "real moments of the Bessel law with s = {s}; use colored category moments instead"
        ))),
    }
}

fn check_t(t: &Q) -> Result<()> {
    if t.is_negative() {
        return Err(Error::InvalidArgument("t must be nonnegative".into()));
    }
    Ok(())
}

/// Closed-form cumulants of the given flavor, where the law has them.
fn closed_cumulants(law: &LawSpec, n: usize, flavor: Flavor) -> Result<Option<Vec<Q>>> {
    use Flavor::*;
    let first = |c: &Q| seq(n, |k| if k == 1 { c.clone() } else { Q::zero() });
    let second = |t: &Q| seq(n, |k| if k == 2 { t.clone() } else { Q::zero() });
    Ok(match (law, flavor) {
        (LawSpec::Dirac(c), _) => Some(first(c)),
        (LawSpec::Poisson(t), Classical) | (LawSpec::FreePoisson(t), Free) => {
            check_t(t)?;
            Some(seq(n, |_| t.clone()))
        }
        (LawSpec::Gaussian(t), Classical) | (LawSpec::Semicircle(t), Free) => Some(second(t)),
        (LawSpec::Bessel { s, t }, Classical) | (LawSpec::FreeBessel { s, t }, Free) => {
            check_t(t)?;
            Some(bessel_cumulants(*s, t, n)?)
        }
        (LawSpec::Shifted { base, t }, fl) => closed_cumulants(base, n, fl)?.map(|mut c| {
            if n > 0 {
                c[0] += t;
            }
            c
        }),
        (LawSpec::CategoryWeighted { spec, t }, fl) => {
            check_t(t)?;
            match spec.block_law() {
                Some(b) if (b.free == (fl == Free)) => {
                    Some(seq(n, |k| if (b.sizes)(k, b.param) { t.clone() } else { Q::zero() }))
                }
                _ => None,
            }
        }
        _ => None,
    })
}

fn flavor_of(law: &LawSpec) -> Option<Flavor> {
    match law {
        LawSpec::Poisson(_) | LawSpec::Gaussian(_) | LawSpec::Bessel { .. } | LawSpec::Dirac(_) => Some(Flavor::Classical),
        LawSpec::Semicircle(_) | LawSpec::FreePoisson(_) | LawSpec::FreeBessel { .. } => Some(Flavor::Free),
        LawSpec::Shifted { base, .. } => flavor_of(base),
        LawSpec::CategoryWeighted { spec, .. } => spec.block_law().map(|b| if b.free { Flavor::Free } else { Flavor::Classical }),
    }
}

/// `Σ_{π ∈ D(white k)} t^{|π|}`, `k = 1..=n`, by enumeration.
pub fn category_weighted_moments(spec: &CategorySpec, t: &Q, n: usize) -> Result<Vec<Q>> {
    (1..=n)
        .map(|k| {
            let mut s = Q::zero();
            for p in spec.basis(&ColorWord::white(k))? {
                s += qpow(t, p.num_blocks());
            }
            Ok(s)
        })
        .collect()
}

fn qpow(x: &Q, e: usize) -> Q {
    let mut r = Q::one();
    for _ in 0..e {
        r *= x;
    }
    r
}

pub fn law_moments(law: &LawSpec, n: usize) -> Result<MomentSeq> {
    if n > MAX_ORDER {
        return Err(Error::SizeGuard { points: n, bound: MAX_ORDER });
    }
    match law {
        LawSpec::CategoryWeighted { spec, t } => {
            check_t(t)?;
            if n <= MAX_ENUMERATED {
                return Ok(MomentSeq { values: category_weighted_moments(spec, t, n)? });
            }
            match closed_cumulants(law, n, flavor_of(law).unwrap_or(Flavor::Classical))? {
                Some(c) => Ok(cumulants_to_moments(&CumulantSeq { values: c, flavor: flavor_of(law).unwrap() })),
                None => Err(Error::SizeGuard { points: n, bound: MAX_ENUMERATED }),
            }
        }
        LawSpec::Shifted { base, t } => {
            let m = law_moments(base, n)?.with_zero();
            Ok(MomentSeq { values: seq(n, |k| (0..=k).map(|j| bin(k, j) * qpow(t, k - j) * &m[j]).sum()) })
        }
        _ => {
            let fl = flavor_of(law).unwrap();
            let c = closed_cumulants(law, n, fl)?.expect("named laws have closed cumulants");
            Ok(cumulants_to_moments(&CumulantSeq { values: c, flavor: fl }))
        }
    }
}

/// Cumulants of a law; closed form where known, checked against the moments.
pub fn law_cumulants(law: &LawSpec, n: usize, flavor: Flavor) -> Result<CumulantSeq> {
    let numeric = || -> Result<CumulantSeq> { Ok(moments_to_cumulants(&law_moments(law, n)?, flavor)) };
    match closed_cumulants(law, n, flavor)? {
        Some(c) => {
            if let LawSpec::CategoryWeighted { .. } = law {
                let num = numeric()?;
                if num.values != c {
                    return Err(Error::InvalidArgument(format!("closed-form cumulants of {law} disagree with its moments")));
                }
            }
            Ok(CumulantSeq { values: c, flavor })
        }
        None => numeric(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BpReport {
    pub classical: CategorySpec,
    pub free: CategorySpec,
    pub t: String,
    pub classical_cumulants: Vec<String>,
    pub free_cumulants: Vec<String>,
    pub first_mismatch: Option<usize>,
    pub passed: bool,
}

/// Compares classical cumulants of `Σ_{π∈D} t^{|π|}` with free cumulants of
/// `Σ_{π∈D∩NC} t^{|π|}` up to order `n`.
pub fn bp_check(classical: &CategorySpec, free: &CategorySpec, t: &Q, n: usize) -> Result<BpReport> {
    if classical.free_version().as_ref() != Some(free) {
        return Err(Error::InvalidArgument(format!("{free} is not the free version of {classical}")));
    }
    let mc = MomentSeq { values: category_weighted_moments(classical, t, n)? };
    let mf = MomentSeq { values: category_weighted_moments(free, t, n)? };
    let kc = moments_to_cumulants(&mc, Flavor::Classical).values;
    let kf = moments_to_cumulants(&mf, Flavor::Free).values;
    let first_mismatch = (0..n).find(|&i| kc[i] != kf[i]).map(|i| i + 1);
    Ok(BpReport {
        classical: classical.clone(),
        free: free.clone(),
        t: fmt_q(t),
        classical_cumulants: to_strings(&kc),
        free_cumulants: to_strings(&kf),
        first_mismatch,
        passed: first_mismatch.is_none(),
    })
}

/// `Σ_{r=0}^N (-1)^r / r!`, the probability that a uniform permutation of N
/// points has no fixed point.
pub fn derangement_exact(n: u64) -> Q {
    let mut s = Q::zero();
    let mut term = Q::one();
    for r in 0..=n {
        if r > 0 {
            term = -term / qi(r as i64);
        }
        s += &term;
    }
    s
}

/// Rational enclosure `[lo, hi]` of `e^{-t} t^j / j!` of width at most `precision`.
pub fn poisson_pmf(t: &Q, j: u64, precision: &Q) -> Result<(Q, Q)> {
    check_t(t)?;
    if !precision.is_positive() {
        return Err(Error::InvalidArgument("precision must be positive".into()));
    }
    let mut fact = Q::one();
    for i in 1..=j {
        fact *= qi(i as i64);
    }
    let w = qpow(t, j as usize) / fact;
    let mut m = 0u64;
    loop {
        // partial sum S of e^t and a tail bound R, valid once m + 2 > t
        let mut s = Q::zero();
        let mut term = Q::one();
        for i in 0..=m {
            if i > 0 {
                term = term * t / qi(i as i64);
            }
            s += &term;
        }
        let next = &term * t / qi(m as i64 + 1);
        let ratio = t / qi(m as i64 + 2);
        if ratio < Q::one() {
            let r = next / (Q::one() - ratio);
            let lo = &w / (&s + r);
            let hi = &w / &s;
            if &hi - &lo <= *precision {
                return Ok((lo, hi));
            }
        }
        m += 1;
    }
}

/// Moments `1..=n` of a finitely supported measure given as `(atom, mass)` pairs.
pub fn measure_moments(atoms: &[(Q, Q)], n: usize) -> Vec<Q> {
    seq(n, |k| atoms.iter().map(|(x, w)| w * qpow(x, k)).sum())
}

/// Moments of `X + Y` for independent `X, Y`.
pub fn classical_sum_moments(a: &MomentSeq, b: &MomentSeq) -> MomentSeq {
    let n = a.order().min(b.order());
    let (ma, mb) = (a.with_zero(), b.with_zero());
    MomentSeq { values: seq(n, |k| (0..=k).map(|j| bin(k, j) * &ma[j] * &mb[k - j]).sum()) }
}

/// Moments of `a + b` for freely independent `a, b`, computed from the
/// definition of freeness: alternating products of centered elements have
/// vanishing expectation.
pub fn free_sum_moments(a: &MomentSeq, b: &MomentSeq) -> MomentSeq {
    let n = a.order().min(b.order());
    let ms = [a.with_zero(), b.with_zero()];
    let mut memo: HashMap<Vec<(u8, usize)>, Q> = HashMap::new();
    let values = seq(n, |k| {
        let mut total = Q::zero();
        for mask in 0u32..(1 << k) {
            let letters: Vec<u8> = (0..k).map(|i| ((mask >> i) & 1) as u8).collect();
            total += phi_word(&normalize(&letters.iter().map(|&l| (l, 1)).collect::<Vec<_>>()), &ms, &mut memo);
        }
        total
    });
    MomentSeq { values }
}

/// Merges adjacent equal letters and drops zero powers.
fn normalize(w: &[(u8, usize)]) -> Vec<(u8, usize)> {
    let mut out: Vec<(u8, usize)> = Vec::new();
    for &(l, p) in w {
        if p == 0 {
            continue;
        }
        match out.last_mut() {
            Some((ll, pp)) if *ll == l => *pp += p,
            _ => out.push((l, p)),
        }
    }
    out
}

fn phi_word(w: &[(u8, usize)], ms: &[Vec<Q>; 2], memo: &mut HashMap<Vec<(u8, usize)>, Q>) -> Q {
    if w.is_empty() {
        return Q::one();
    }
    if w.len() == 1 {
        return ms[w[0].0 as usize][w[0].1].clone();
    }
    if let Some(v) = memo.get(w) {
        return v.clone();
    }
    // 0 = φ(Π (x_i - m_i)) = Σ_A (-1)^{m-|A|} Π_{i∉A} m_i φ(Π_{i∈A} x_i)
    let m = w.len();
    let means: Vec<Q> = w.iter().map(|&(l, p)| ms[l as usize][p].clone()).collect();
    let mut acc = Q::zero();
    for mask in 0u32..(1 << m) - 1 {
        let mut coef = Q::one();
        let mut sub = Vec::new();
        for i in 0..m {
            if mask >> i & 1 == 1 {
                sub.push(w[i]);
            } else {
                coef = -coef * &means[i];
            }
        }
        if coef.is_zero() {
            continue;
        }
        acc += coef * phi_word(&normalize(&sub), ms, memo);
    }
    let v = -acc;
    memo.insert(w.to_vec(), v.clone());
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Q {
        Q::new(BigInt::from(a), BigInt::from(b))
    }

    fn ms(v: &[i64]) -> MomentSeq {
        MomentSeq { values: v.iter().map(|&x| qi(x)).collect() }
    }

    #[test]
    fn fourth_cumulants() {
        let m = ms(&[1, 2, 5, 15]);
        let k = moments_to_cumulants(&m, Flavor::Classical).values;
        assert_eq!(k[3], qi(1));
        let f = moments_to_cumulants(&m, Flavor::Free).values;
        assert_eq!(f[3], qi(2));
        assert_eq!(k[0], qi(1));
        assert_eq!(f[0], qi(1));
    }

    #[test]
    fn round_trip_and_oracle() {
        let c: Vec<Q> = vec![q(1, 2), q(-3, 1), q(2, 7), q(5, 1), q(0, 1), q(1, 3)];
        for fl in [Flavor::Classical, Flavor::Free] {
            let m = cumulants_to_moments(&CumulantSeq { values: c.clone(), flavor: fl });
            assert_eq!(m.values, moments_from_partitions(&c, fl));
            assert_eq!(moments_to_cumulants(&m, fl).values, c);
            assert_eq!(cumulants_from_partitions(&m.values, fl).unwrap(), c);
        }
    }

    #[test]
    fn named_laws() {
        let bell = law_moments(&"poisson:t=1".parse().unwrap(), 6).unwrap();
        assert_eq!(bell, ms(&[1, 2, 5, 15, 52, 203]));
        let sc = law_moments(&"semicircle:t=1".parse().unwrap(), 8).unwrap();
        assert_eq!(sc, ms(&[0, 1, 0, 2, 0, 5, 0, 14]));
        let g = law_moments(&LawSpec::Gaussian(qi(1)), 6).unwrap();
        assert_eq!(g, ms(&[0, 1, 0, 3, 0, 15]));
        let mp = law_moments(&LawSpec::FreePoisson(qi(1)), 5).unwrap();
        assert_eq!(mp, ms(&[1, 2, 5, 14, 42]));
        let b = law_cumulants(&"bessel:s=2,t=3".parse().unwrap(), 4, Flavor::Classical).unwrap();
        assert_eq!(b.values, vec![qi(0), qi(3), qi(0), qi(3)]);
        let fp = law_cumulants(&LawSpec::FreePoisson(q(1, 2)), 3, Flavor::Free).unwrap();
        assert_eq!(fp.values, vec![q(1, 2); 3]);
        let e = law_moments(&"bessel:s=3,t=1".parse().unwrap(), 3).unwrap_err();
        assert_eq!(e.kind(), "Unsupported");
    }

    #[test]
    fn category_laws() {
        let p12: LawSpec = "cat:t=1/2:p12".parse().unwrap();
        let c = law_cumulants(&p12, 6, Flavor::Classical).unwrap();
        assert_eq!(c.values, vec![q(1, 2), q(1, 2), qi(0), qi(0), qi(0), qi(0)]);
        let nc: LawSpec = "cat:t=1:nc".parse().unwrap();
        assert_eq!(law_moments(&nc, 5).unwrap(), ms(&[1, 2, 5, 14, 42]));
        assert_eq!(p12.to_string(), "cat:t=1/2:p12");
    }

    #[test]
    fn shifted_semicircle() {
        let t = q(1, 2);
        let base = LawSpec::Semicircle(t.clone());
        let shifted = LawSpec::Shifted { base: Box::new(base.clone()), t: t.clone() };
        let m = law_moments(&shifted, 6).unwrap();
        let b = law_moments(&base, 6).unwrap().with_zero();
        for k in 1..=6 {
            let want: Q = (0..=k).map(|j| bin(k, j) * qpow(&t, k - j) * &b[j]).sum();
            assert_eq!(m.values[k - 1], want);
        }
        // shifted semicircle is the free law of NC12
        assert_eq!(m, law_moments(&LawSpec::CategoryWeighted { spec: CategorySpec::NC12, t }, 6).unwrap());
    }

    #[test]
    fn bp_pairs() {
        for (c, f) in [(CategorySpec::P, CategorySpec::NC), (CategorySpec::Peven, CategorySpec::NCeven)] {
            assert!(bp_check(&c, &f, &qi(2), 7).unwrap().passed);
        }
        assert!(bp_check(&CategorySpec::P, &CategorySpec::NC2, &qi(1), 4).is_err());
    }

    #[test]
    fn derangements_and_pmf() {
        assert_eq!(derangement_exact(3), q(1, 3));
        assert_eq!(derangement_exact(2), q(1, 2));
        let (lo, hi) = poisson_pmf(&qi(1), 0, &q(1, 1_000_000_000)).unwrap();
        assert!(lo > q(3678, 10000) && hi < q(3679, 10000));
        assert!(lo <= hi);
    }

    #[test]
    fn free_convolution_oracle() {
        // two semicircles add to a semicircle of summed variance
        let a = law_moments(&LawSpec::Semicircle(qi(1)), 6).unwrap();
        let b = law_moments(&LawSpec::Semicircle(qi(2)), 6).unwrap();
        assert_eq!(free_sum_moments(&a, &b), law_moments(&LawSpec::Semicircle(qi(3)), 6).unwrap());
        let g1 = law_moments(&LawSpec::Gaussian(qi(1)), 6).unwrap();
        assert_eq!(classical_sum_moments(&g1, &g1), law_moments(&LawSpec::Gaussian(qi(2)), 6).unwrap());
    }
}
