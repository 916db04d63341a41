//! Exact integer and rational matrix routines.
//!
//! Determinants use fraction-free Bareiss elimination.  Inverses of integer
//! matrices are computed modulo word-size primes, lifted by Chinese remaindering
//! and rational reconstruction, and then verified exactly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::Q;

pub type IMat = Vec<Vec<BigInt>>;
pub type QMat = Vec<Vec<Q>>;

pub fn identity_q(n: usize) -> QMat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
        .collect()
}

pub fn to_q(m: &IMat) -> QMat {
    m.iter().map(|r| r.iter().map(|x| Q::from_integer(x.clone())).collect()).collect()
}

pub fn matmul_q(a: &QMat, b: &QMat) -> QMat {
    let n = a.len();
    let m = b.first().map(|r| r.len()).unwrap_or(0);
    let inner = b.len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s = Q::zero();
                    for t in 0..inner {
                        if !a[i][t].is_zero() && !b[t][j].is_zero() {
                            s += &a[i][t] * &b[t][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn trace_q(a: &QMat) -> Q {
    let mut s = Q::zero();
    for (i, r) in a.iter().enumerate() {
        s += &r[i];
    }
    s
}

/// Determinant by fraction-free elimination with row pivoting.
pub fn det_bareiss(m: &IMat) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Indices of a maximal linearly independent set of columns, chosen greedily
/// left to right, and hence the rank.
pub fn independent_columns(m: &QMat) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    // reduced basis: (pivot row, vector)
    let mut basis: Vec<(usize, Vec<Q>)> = Vec::new();
    let mut chosen = Vec::new();
    for c in 0..cols {
        let mut v: Vec<Q> = (0..rows).map(|r| m[r][c].clone()).collect();
        for (p, b) in &basis {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                for r in 0..rows {
                    if !b[r].is_zero() {
                        v[r] -= &f * &b[r];
                    }
                }
            }
        }
        if let Some(p) = (0..rows).find(|&r| !v[r].is_zero()) {
            let inv = v[p].recip();
            for x in v.iter_mut() {
                *x *= &inv;
            }
            for (_, b) in basis.iter_mut() {
                if !b[p].is_zero() {
                    let f = b[p].clone();
                    for r in 0..rows {
                        if !v[r].is_zero() {
                            b[r] -= &f * &v[r];
                        }
                    }
                }
            }
            basis.push((p, v));
            chosen.push(c);
        }
    }
    chosen
}

pub fn rank_q(m: &QMat) -> usize {
    independent_columns(m).len()
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

fn is_prime_u32(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Primes below 2^31, largest first, so products of two residues fit in `u64`.
struct PrimeStream {
    next: u64,
}

impl PrimeStream {
    fn new() -> Self {
        PrimeStream { next: (1u64 << 31) - 1 }
    }
}

impl Iterator for PrimeStream {
    type Item = u64;
    fn next(&mut self) -> Option<u64> {
        while self.next > 3 {
            let c = self.next;
            self.next -= 2;
            if is_prime_u32(c) {
                return Some(c);
            }
        }
        None
    }
}

const PRIME_BITS: f64 = 30.0;

fn reduce_mod(x: &BigInt, p: u64) -> u64 {
    let r = x % p;
    let r = r.to_i64().unwrap();
    if r < 0 {
        (r + p as i64) as u64
    } else {
        r as u64
    }
}

/// Inverse modulo `p` as a flat row-major matrix; `None` when singular mod p.
fn inv_mod(m: &[Vec<u64>], p: u64) -> Option<Vec<u64>> {
    let n = m.len();
    let w = 2 * n;
    let mut a = vec![0u64; n * w];
    for i in 0..n {
        a[i * w..i * w + n].copy_from_slice(&m[i]);
        a[i * w + n + i] = 1;
    }
    for k in 0..n {
        let piv = (k..n).find(|&r| a[r * w + k] != 0)?;
        if piv != k {
            for j in 0..w {
                a.swap(piv * w + j, k * w + j);
            }
        }
        let dinv = pow_mod(a[k * w + k], p - 2, p);
        for j in k..w {
            a[k * w + j] = a[k * w + j] * dinv % p;
        }
        let pivot_row: Vec<u64> = a[k * w..(k + 1) * w].to_vec();
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = a[i * w + k];
            if f == 0 {
                continue;
            }
            let g = p - f;
            let row = &mut a[i * w..(i + 1) * w];
            for j in k..w {
                let v = pivot_row[j];
                if v != 0 {
                    row[j] = (row[j] + g * v) % p;
                }
            }
        }
    }
    let mut out = vec![0u64; n * n];
    for i in 0..n {
        out[i * n..(i + 1) * n].copy_from_slice(&a[i * w + n..(i + 1) * w]);
    }
    Some(out)
}

/// log2 of the Hadamard bound, which bounds the determinant and every minor.
fn hadamard_bits(m: &IMat) -> f64 {
    let mut bits = 0.0;
    for r in m {
        let top = r.iter().map(|x| x.bits()).max().unwrap_or(0);
        let shift = top.saturating_sub(500);
        // scale by 2^-shift so the sum of squares stays finite
        let s: f64 = r.iter().map(|x| (x >> shift).to_f64().unwrap_or(0.0).powi(2)).sum();
        let lg = 0.5 * (s + 1.0).log2() + shift as f64 + 1e-9;
        bits += lg.max(0.0);
    }
    bits
}

/// CRT reconstruction into `[0, M)` via Garner's mixed radix form.
struct Garner {
    primes: Vec<u64>,
    inv: Vec<Vec<u64>>,
    modulus: BigInt,
}

impl Garner {
    fn new(primes: &[u64]) -> Self {
        let k = primes.len();
        let mut inv = vec![vec![0u64; k]; k];
        for i in 0..k {
            for j in 0..i {
                inv[j][i] = pow_mod(primes[j] % primes[i], primes[i] - 2, primes[i]);
            }
        }
        let modulus = primes.iter().fold(BigInt::one(), |a, &p| a * p);
        Garner { primes: primes.to_vec(), inv, modulus }
    }

    fn reconstruct(&self, res: &[u64]) -> BigInt {
        let k = self.primes.len();
        let mut coef = vec![0u64; k];
        for i in 0..k {
            let p = self.primes[i];
            let mut x = res[i] % p;
            for j in 0..i {
                let diff = (x + p - coef[j] % p) % p;
                x = diff * self.inv[j][i] % p;
            }
            coef[i] = x;
        }
        let mut v = BigInt::zero();
        for i in (0..k).rev() {
            v = v * self.primes[i] + coef[i];
        }
        v
    }
}

/// Rational `a/b` with `|a|, |b| <= sqrt(M/2)` congruent to `u` mod `M`.
fn rational_reconstruct(u: &BigInt, m: &BigInt, bound: &BigInt) -> Option<Q> {
    let (mut r0, mut r1) = (m.clone(), u.clone());
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while &r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > *bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(Q::new(r1, t1))
}

/// Exact check of `w · m = I`, done modulo enough primes to exceed the
/// largest possible entry of `D w m - D I` where `D` clears denominators.
fn verify_inverse(m: &IMat, w: &QMat) -> bool {
    let n = m.len();
    let mut d = BigInt::one();
    for r in w {
        for x in r {
            d = d.lcm(x.denom());
        }
    }
    let a: IMat = w.iter().map(|r| r.iter().map(|x| x.numer() * (&d / x.denom())).collect()).collect();
    let amax = a.iter().flatten().map(|x| x.bits()).max().unwrap_or(0);
    let mmax = m.iter().flatten().map(|x| x.bits()).max().unwrap_or(0);
    let bound_bits = (amax + mmax) as f64 + (n as f64 + 1.0).log2() + d.bits() as f64 + 2.0;
    let mut covered = 0.0;
    for p in PrimeStream::new() {
        let ap: Vec<Vec<u64>> = a.iter().map(|r| r.iter().map(|x| reduce_mod(x, p)).collect()).collect();
        let mp: Vec<Vec<u64>> = m.iter().map(|r| r.iter().map(|x| reduce_mod(x, p)).collect()).collect();
        let dp = reduce_mod(&d, p);
        for i in 0..n {
            for j in 0..n {
                let mut s: u128 = 0;
                for t in 0..n {
                    s += (ap[i][t] * mp[t][j]) as u128;
                }
                let s = (s % p as u128) as u64;
                let want = if i == j { dp } else { 0 };
                if s != want {
                    return false;
                }
            }
        }
        covered += PRIME_BITS;
        if covered > bound_bits {
            return true;
        }
    }
    false
}

/// Gauss-Jordan inverse with fraction-free updates; slow fallback.
pub fn inverse_bareiss(m: &IMat) -> Option<(IMat, BigInt)> {
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();
    let mut prev = BigInt::one();
    let mut sign = 1i32;
    for k in 0..n {
        let piv = (k..n).find(|&r| !a[r][k].is_zero())?;
        if piv != k {
            a.swap(piv, k);
            sign = -sign;
        }
        for i in 0..n {
            if i == k {
                continue;
            }
            for j in 0..2 * n {
                if j == k {
                    continue;
                }
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    // each diagonal entry now equals det (up to the row swaps' sign)
    let det = if sign < 0 { -prev.clone() } else { prev.clone() };
    let adj: IMat = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let v = a[i][n + j].clone();
                    if sign < 0 {
                        -v
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    Some((adj, det))
}

/// Exact rational inverse of an integer matrix, or `None` when singular.
///
/// Inverses modulo a growing set of primes are lifted by Chinese remaindering
/// and rational reconstruction as soon as the reconstruction stabilises; each
/// candidate is then verified exactly.  The number of primes never exceeds what
/// the Hadamard bound requires for a guaranteed reconstruction.
pub fn inverse_q(m: &IMat) -> Option<QMat> {
    let n = m.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let had = hadamard_bits(m);
    let max_primes = ((2.0 * had + 4.0) / PRIME_BITS).ceil() as usize + 2;
    let max_zero = (had / PRIME_BITS).floor() as usize + 1;
    let mut used: Vec<u64> = Vec::new();
    let mut res: Vec<Vec<u64>> = Vec::new();
    let mut zero = 0usize;
    let mut next_try = 2usize;
    let mut last_sample: Option<Vec<Q>> = None;
    let sample: Vec<(usize, usize)> = (0..n).map(|i| (i, i)).chain((0..n).map(|j| (n - 1, j))).chain((0..n).map(|j| (0, j))).collect();
    for p in PrimeStream::new() {
        let red: Vec<Vec<u64>> = m.iter().map(|r| r.iter().map(|x| reduce_mod(x, p)).collect()).collect();
        match inv_mod(&red, p) {
            Some(iv) => {
                used.push(p);
                res.push(iv);
            }
            None => {
                zero += 1;
                if zero >= max_zero {
                    return None;
                }
                continue;
            }
        }
        if used.len() < next_try && used.len() < max_primes {
            continue;
        }
        next_try = used.len() + 1.max(used.len() / 4);
        let g = Garner::new(&used);
        let half: BigInt = &g.modulus >> 1usize;
        let bound = half.sqrt();
        let entry = |i: usize, j: usize| -> Option<Q> {
            let r: Vec<u64> = res.iter().map(|v| v[i * n + j]).collect();
            rational_reconstruct(&g.reconstruct(&r), &g.modulus, &bound)
        };
        let s: Option<Vec<Q>> = sample.iter().map(|&(i, j)| entry(i, j)).collect();
        let stable = match (&s, &last_sample) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        };
        let exhausted = used.len() >= max_primes;
        last_sample = s;
        if !stable && !exhausted {
            continue;
        }
        let w: Option<QMat> = (0..n).map(|i| (0..n).map(|j| entry(i, j)).collect()).collect();
        if let Some(w) = w {
            if verify_inverse(m, &w) {
                return Some(w);
            }
        }
        if exhausted {
            break;
        }
    }
    let (adj, det) = inverse_bareiss(m)?;
    if det.is_zero() {
        return None;
    }
    Some(adj.into_iter().map(|r| r.into_iter().map(|x| Q::new(x, det.clone())).collect()).collect())
}

pub fn is_identity(m: &QMat) -> bool {
    m.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, x)| if i == j { x.is_one() } else { x.is_zero() }))
}

/// Formats an exact rational as `"p/q"` (denominator always present).
pub fn fmt_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `"p/q"`, `"p"` or a finite decimal like `"0.25"`.
pub fn parse_q(s: &str) -> crate::Result<Q> {
    let s = s.trim();
    let bad = || crate::Error::Parse(format!("not a rational: '{s}'"));
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(a, b));
    }
    if let Some((a, b)) = s.split_once('.') {
        let neg = a.starts_with('-');
        let int: BigInt = if a.is_empty() || a == "-" { BigInt::zero() } else { a.parse().map_err(|_| bad())? };
        if b.is_empty() || !b.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let frac: BigInt = b.parse().map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), b.len());
        let f = Q::new(frac, den);
        let i = Q::from_integer(int.abs());
        let v = i + f;
        return Ok(if neg { -v } else { v });
    }
    let a: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Q::from_integer(a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn im(rows: &[&[i64]]) -> IMat {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn det_small() {
        assert_eq!(det_bareiss(&im(&[&[4, 2], &[2, 2]])), BigInt::from(4));
        assert_eq!(det_bareiss(&im(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(det_bareiss(&im(&[&[1, 2], &[2, 4]])), BigInt::zero());
        assert_eq!(det_bareiss(&im(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 2]])), BigInt::from(6));
    }

    #[test]
    fn inverse_small() {
        let m = im(&[&[4, 2], &[2, 2]]);
        let w = inverse_q(&m).unwrap();
        assert!(is_identity(&matmul_q(&w, &to_q(&m))));
        assert!(inverse_q(&im(&[&[1, 2], &[2, 4]])).is_none());
        let (adj, det) = inverse_bareiss(&m).unwrap();
        assert_eq!(det, BigInt::from(4));
        assert_eq!(adj, im(&[&[2, -2], &[-2, 4]]));
    }

    #[test]
    fn inverse_matches_fallback() {
        let m = im(&[&[3, 1, 4, 1], &[5, 9, 2, 6], &[5, 3, 5, 8], &[9, 7, 9, 3]]);
        let w = inverse_q(&m).unwrap();
        let (adj, det) = inverse_bareiss(&m).unwrap();
        assert_eq!(det, det_bareiss(&m));
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(w[i][j], Q::new(adj[i][j].clone(), det.clone()));
            }
        }
    }

    #[test]
    fn inverse_with_large_entries() {
        // Hilbert-like matrix scaled to integers has a tiny determinant relative to its entries
        let n = 7;
        let l: i64 = 360360;
        let m: IMat = (0..n).map(|i| (0..n).map(|j| BigInt::from(l / (i + j + 1) as i64)).collect()).collect();
        let w = inverse_q(&m).unwrap();
        assert!(is_identity(&matmul_q(&w, &to_q(&m))));
        let sing: IMat = (0..4).map(|i| (0..4).map(|j| BigInt::from((i * j) as i64)).collect()).collect();
        assert!(inverse_q(&sing).is_none());
    }

    #[test]
    fn rational_strings() {
        assert_eq!(fmt_q(&Q::new(BigInt::from(6), BigInt::from(-4))), "-3/2");
        assert_eq!(fmt_q(&Q::from_integer(BigInt::from(5))), "5/1");
        assert_eq!(parse_q("3/6").unwrap(), Q::new(BigInt::from(1), BigInt::from(2)));
        assert_eq!(parse_q("-0.25").unwrap(), Q::new(BigInt::from(-1), BigInt::from(4)));
        assert_eq!(parse_q("7").unwrap(), Q::from_integer(BigInt::from(7)));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn rank_and_columns() {
        let m = to_q(&im(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]));
        assert_eq!(independent_columns(&m), vec![0, 1]);
        assert_eq!(rank_q(&m), 2);
    }
}
