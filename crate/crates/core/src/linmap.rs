//! The maps `π -> T_π` and `π -> T̄_π` on `(C^N)^{⊗k} -> (C^N)^{⊗l}`.
//!
//! Index tuples are 1-based: entries run over `1..=N`.  `T_π` sends the basis
//! vector `e_i` (upper row) to `Σ_j δ_π(i, j) e_j` (lower row).

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::categories::CategorySpec;
use crate::partitions::{self, ColorWord, Partition};
use crate::{linalg, weingarten, Error, Result};

pub type IndexTuple = Vec<u32>;

fn check_lengths(p: &Partition, i: &[u32], j: &[u32]) -> Result<()> {
    if i.len() != p.k() || j.len() != p.l() {
        return Err(Error::ShapeMismatch(format!(
            "tuples of length {}/{} for a partition in P({},{})",
            i.len(),
            j.len(),
            p.k(),
            p.l()
        )));
    }
    Ok(())
}

fn block_constant(p: &Partition, all: &[u32]) -> bool {
    let mut val = [0u32; 256];
    let mut set = [false; 256];
    for (pt, &x) in all.iter().enumerate() {
        let b = p.labels()[pt] as usize;
        if set[b] {
            if val[b] != x {
                return false;
            }
        } else {
            set[b] = true;
            val[b] = x;
        }
    }
    true
}

/// `δ_π(i, j)`: 1 when every block of `π` carries a constant index.
pub fn delta(p: &Partition, i: &[u32], j: &[u32]) -> Result<i64> {
    check_lengths(p, i, j)?;
    let all: Vec<u32> = i.iter().chain(j).copied().collect();
    Ok(block_constant(p, &all) as i64)
}

/// `δ̄_π(i, j) = ε(τ)` with `τ = ker(i/j)` when `τ ≥ π`, and 0 otherwise.
pub fn delta_twisted(p: &Partition, i: &[u32], j: &[u32]) -> Result<i64> {
    if !p.is_even() {
        return Err(Error::OddBlock);
    }
    check_lengths(p, i, j)?;
    let all: Vec<u32> = i.iter().chain(j).copied().collect();
    if !block_constant(p, &all) {
        return Ok(0);
    }
    let tau = Partition::from_labels(p.upper().clone(), p.lower().clone(), &all)?;
    partitions::signature(&tau)
}

/// Sparse integer operator keyed by `(out tuple, in tuple)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseOperator {
    pub n: u32,
    pub in_word: ColorWord,
    pub out_word: ColorWord,
    pub entries: BTreeMap<(IndexTuple, IndexTuple), i64>,
}

#[derive(Serialize)]
struct Triple<'a>(&'a [u32], &'a [u32], i64);

impl SparseOperator {
    pub fn zero(n: u32, in_word: ColorWord, out_word: ColorWord) -> Self {
        SparseOperator { n, in_word, out_word, entries: BTreeMap::new() }
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, out: &[u32], inp: &[u32]) -> i64 {
        self.entries.get(&(out.to_vec(), inp.to_vec())).copied().unwrap_or(0)
    }

    fn insert_add(&mut self, key: (IndexTuple, IndexTuple), v: i64) {
        if v == 0 {
            return;
        }
        match self.entries.entry(key) {
            Entry::Vacant(e) => {
                e.insert(v);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += v;
                if *e.get() == 0 {
                    e.remove();
                }
            }
        }
    }

    fn check_same_shape(&self, o: &SparseOperator) -> Result<()> {
        if self.n != o.n || self.in_word != o.in_word || self.out_word != o.out_word {
            return Err(Error::ShapeMismatch("operators act between different spaces".into()));
        }
        Ok(())
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, other: &SparseOperator, c: i64) -> Result<SparseOperator> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (k, v) in &other.entries {
            out.insert_add(k.clone(), c * v);
        }
        Ok(out)
    }

    pub fn scale(&self, c: i64) -> SparseOperator {
        let mut out = self.clone();
        if c == 0 {
            out.entries.clear();
        } else {
            for v in out.entries.values_mut() {
                *v *= c;
            }
        }
        out
    }

    /// Sorted JSON triples `[out, in, value]`.
    pub fn to_json(&self) -> serde_json::Value {
        let v: Vec<Triple> = self.entries.iter().map(|((o, i), x)| Triple(o, i, *x)).collect();
        serde_json::to_value(v).unwrap()
    }

    /// Inner product of two column operators (empty input word).
    pub fn inner(&self, other: &SparseOperator) -> Result<i64> {
        self.check_same_shape(other)?;
        Ok(self
            .entries
            .iter()
            .map(|(k, v)| v * other.entries.get(k).copied().unwrap_or(0))
            .sum())
    }
}

fn assignments(p: &Partition, n: u32, mut f: impl FnMut(&[u32])) {
    let nb = p.num_blocks();
    let mut vals = vec![1u32; nb];
    let mut all = vec![0u32; p.points()];
    loop {
        for (pt, a) in all.iter_mut().enumerate() {
            *a = vals[p.labels()[pt] as usize];
        }
        f(&all);
        let mut d = 0;
        loop {
            if d == nb {
                return;
            }
            if vals[d] < n {
                vals[d] += 1;
                break;
            }
            vals[d] = 1;
            d += 1;
        }
    }
}

fn build(p: &Partition, n: u32, twisted: bool) -> Result<SparseOperator> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    if twisted && !p.is_even() {
        return Err(Error::OddBlock);
    }
    let k = p.k();
    let mut op = SparseOperator::zero(n, p.upper().clone(), p.lower().clone());
    let mut err = None;
    assignments(p, n, |all| {
        let v = if twisted {
            match Partition::from_labels(p.upper().clone(), p.lower().clone(), all).and_then(|t| partitions::signature(&t)) {
                Ok(s) => s,
                Err(e) => {
                    err = Some(e);
                    0
                }
            }
        } else {
            1
        };
        op.entries.insert((all[k..].to_vec(), all[..k].to_vec()), v);
    });
    match err {
        Some(e) => Err(e),
        None => Ok(op),
    }
}

/// `T_π` with `N^{|π|}` nonzero entries.
pub fn tpi(p: &Partition, n: u32) -> Result<SparseOperator> {
    build(p, n, false)
}

/// The signed twist `T̄_π` of an even partition.
pub fn tpi_twisted(p: &Partition, n: u32) -> Result<SparseOperator> {
    build(p, n, true)
}

pub fn op_tensor(a: &SparseOperator, b: &SparseOperator) -> Result<SparseOperator> {
    if a.n != b.n {
        return Err(Error::ShapeMismatch("tensor of operators with different N".into()));
    }
    let mut out = SparseOperator::zero(a.n, a.in_word.concat(&b.in_word), a.out_word.concat(&b.out_word));
    for ((ao, ai), av) in &a.entries {
        for ((bo, bi), bv) in &b.entries {
            let mut o = ao.clone();
            o.extend_from_slice(bo);
            let mut i = ai.clone();
            i.extend_from_slice(bi);
            out.entries.insert((o, i), av * bv);
        }
    }
    Ok(out)
}

/// Matrix product `a · b` (apply `b` first).
pub fn op_compose(a: &SparseOperator, b: &SparseOperator) -> Result<SparseOperator> {
    if a.n != b.n || a.in_word != b.out_word {
        return Err(Error::ShapeMismatch(format!(
            "cannot compose: middle words {} and {}",
            a.in_word, b.out_word
        )));
    }
    let mut by_out: BTreeMap<&IndexTuple, Vec<(&IndexTuple, i64)>> = BTreeMap::new();
    for ((o, i), v) in &b.entries {
        by_out.entry(o).or_default().push((i, *v));
    }
    let mut acc: BTreeMap<(IndexTuple, IndexTuple), i64> = BTreeMap::new();
    for ((ao, ai), av) in &a.entries {
        if let Some(list) = by_out.get(ai) {
            for (bi, bv) in list {
                *acc.entry((ao.clone(), (*bi).clone())).or_insert(0) += av * bv;
            }
        }
    }
    acc.retain(|_, v| *v != 0);
    Ok(SparseOperator { n: a.n, in_word: b.in_word.clone(), out_word: a.out_word.clone(), entries: acc })
}

/// Transpose, with the words swapped and complemented as in `involute`.
pub fn op_adjoint(a: &SparseOperator) -> SparseOperator {
    SparseOperator {
        n: a.n,
        in_word: a.out_word.complement(),
        out_word: a.in_word.complement(),
        entries: a.entries.iter().map(|((o, i), v)| ((i.clone(), o.clone()), *v)).collect(),
    }
}

/// `dim Fix(u^{⊗word})`, the exact rank of the Gram matrix of `{ξ_π : π ∈ D(word)}`.
pub fn fix_space_dim(spec: &CategorySpec, word: &ColorWord, n: u64) -> Result<usize> {
    let g = weingarten::gram(spec, word, n)?;
    Ok(linalg::rank_q(&linalg::to_q(&g.integer_entries())))
}

/// Coefficients `α_σ` for `σ ≥ π` in `T̄_π = Σ α_σ T_σ`.
pub fn mobius_coefficients(p: &Partition) -> Result<Vec<(Partition, i64)>> {
    if !p.is_even() {
        return Err(Error::OddBlock);
    }
    let top = Partition::from_labels(p.upper().clone(), p.lower().clone(), &vec![0u8; p.points()])?;
    let coarser = partitions::interval(p, &top)?;
    let mut out = Vec::new();
    for s in &coarser {
        let mut a = 0i64;
        for t in partitions::interval(p, s)? {
            a += partitions::signature(&t)? * partitions::mobius(&t, s)?;
        }
        if a != 0 {
            out.push((s.clone(), a));
        }
    }
    Ok(out)
}

/// Checks `T̄_π = Σ_{σ≥π} α_σ T_σ` entrywise.
pub fn mobius_expansion_check(p: &Partition, n: u32) -> Result<bool> {
    let tw = tpi_twisted(p, n)?;
    let mut sum = SparseOperator::zero(n, p.upper().clone(), p.lower().clone());
    for (s, a) in mobius_coefficients(p)? {
        sum = sum.add_scaled(&tpi(&s, n)?, a)?;
    }
    Ok(sum == tw)
}

/// Gram matrix of the columns produced by `f` over a one-row basis.
pub fn column_gram<F>(basis: &[Partition], n: u32, f: F) -> Result<Vec<Vec<BigInt>>>
where
    F: Fn(&Partition, u32) -> Result<SparseOperator>,
{
    let cols: Vec<SparseOperator> = basis.iter().map(|p| f(p, n)).collect::<Result<_>>()?;
    let mut g = vec![vec![BigInt::zero(); cols.len()]; cols.len()];
    for a in 0..cols.len() {
        for b in 0..cols.len() {
            g[a][b] = BigInt::from(cols[a].inner(&cols[b])?);
        }
    }
    Ok(g)
}

/// `N^e` as `i64`, for loop factors.
pub fn npow(n: u32, e: usize) -> i64 {
    let mut r = BigInt::one();
    for _ in 0..e {
        r *= n;
    }
    r.to_i64().expect("loop factor overflow")
}
