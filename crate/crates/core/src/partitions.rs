//! Colored two-row set partitions and the lattice and diagram operations on them.
//!
//! Points are numbered with the upper row first, `0..k` left to right, then the
//! lower row `k..k+l` left to right.  The circular order used for planarity
//! reads the upper row left to right and then the lower row right to left.
//! Block structure is stored as a restricted-growth string over the points.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default cap on the number of points `enumerate` will handle.
pub const DEFAULT_BOUND: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    White,
    Black,
}

impl Color {
    pub fn complement(self) -> Color {
        match self {
            Color::White => Color::Black,
            Color::Black => Color::White,
        }
    }

    /// +1 for white, -1 for black, as seen on the lower row.
    pub fn weight(self) -> i64 {
        match self {
            Color::White => 1,
            Color::Black => -1,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Color::White => 'o',
            Color::Black => 'b',
        }
    }

    pub fn from_char(c: char) -> Result<Color> {
        match c {
            'o' | 'w' | '∘' | '+' => Ok(Color::White),
            'b' | '•' | '-' => Ok(Color::Black),
            _ => Err(Error::Parse(format!("bad color letter '{c}'"))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColorWord(pub Vec<Color>);

impl ColorWord {
    pub fn new(letters: Vec<Color>) -> Self {
        ColorWord(letters)
    }

    pub fn empty() -> Self {
        ColorWord(Vec::new())
    }

    pub fn white(n: usize) -> Self {
        ColorWord(vec![Color::White; n])
    }

    /// The word `o b o b ...` of length `n`.
    pub fn alternating(n: usize) -> Self {
        ColorWord(
            (0..n)
                .map(|i| if i % 2 == 0 { Color::White } else { Color::Black })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn complement(&self) -> ColorWord {
        ColorWord(self.0.iter().map(|c| c.complement()).collect())
    }

    pub fn concat(&self, other: &ColorWord) -> ColorWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        ColorWord(v)
    }

    pub fn letters(&self) -> &[Color] {
        &self.0
    }
}

impl fmt::Display for ColorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.0 {
            write!(f, "{}", c.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for ColorWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(Color::from_char)
            .collect::<Result<Vec<_>>>()
            .map(ColorWord)
    }
}

/// A colored two-row set partition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    upper: ColorWord,
    lower: ColorWord,
    labels: Vec<u8>,
}

/// Restricted-growth relabeling of an arbitrary labeling.
fn canonical_labels<T: Eq + std::hash::Hash + Copy>(raw: &[T]) -> Vec<u8> {
    let mut seen: HashMap<T, u8> = HashMap::new();
    let mut out = Vec::with_capacity(raw.len());
    for &x in raw {
        let next = seen.len() as u8;
        let v = *seen.entry(x).or_insert(next);
        out.push(v);
    }
    out
}

impl Partition {
    /// Build from any labeling of the points; equal labels mean same block.
    pub fn from_labels<T: Eq + std::hash::Hash + Copy>(
        upper: ColorWord,
        lower: ColorWord,
        raw: &[T],
    ) -> Result<Partition> {
        if raw.len() != upper.len() + lower.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} labels for {} points",
                raw.len(),
                upper.len() + lower.len()
            )));
        }
        if raw.len() > 255 {
            return Err(Error::SizeGuard { points: raw.len(), bound: 255 });
        }
        Ok(Partition { upper, lower, labels: canonical_labels(raw) })
    }

    pub fn from_blocks(upper: ColorWord, lower: ColorWord, blocks: &[Vec<usize>]) -> Result<Partition> {
        let n = upper.len() + lower.len();
        let mut lab = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::Parse("empty block".into()));
            }
            for &p in block {
                if p >= n {
                    return Err(Error::Parse(format!("point {p} out of range 0..{n}")));
                }
                if lab[p] != usize::MAX {
                    return Err(Error::Parse(format!("point {p} appears twice")));
                }
                lab[p] = b;
            }
        }
        if lab.iter().any(|&x| x == usize::MAX) {
            return Err(Error::Parse("blocks do not cover all points".into()));
        }
        Partition::from_labels(upper, lower, &lab)
    }

    /// Uncolored (all white) partition of `k` upper and `l` lower points.
    pub fn uncolored(k: usize, l: usize, blocks: &[Vec<usize>]) -> Result<Partition> {
        Partition::from_blocks(ColorWord::white(k), ColorWord::white(l), blocks)
    }

    pub fn empty() -> Partition {
        Partition { upper: ColorWord::empty(), lower: ColorWord::empty(), labels: Vec::new() }
    }

    /// The identity `|...|` on a word.
    pub fn identity(word: &ColorWord) -> Partition {
        let k = word.len();
        let lab: Vec<usize> = (0..k).chain(0..k).collect();
        Partition::from_labels(word.clone(), word.clone(), &lab).unwrap()
    }

    /// Lower semicircle on the word `c c̄`, an element of P(∅, c c̄).
    pub fn semicircle(c: Color) -> Partition {
        Partition::from_labels(ColorWord::empty(), ColorWord(vec![c, c.complement()]), &[0, 0]).unwrap()
    }

    /// The basic crossing in P(2,2) on the given colors (upper word a b).
    pub fn crossing(a: Color, b: Color) -> Partition {
        Partition::from_labels(ColorWord(vec![a, b]), ColorWord(vec![b, a]), &[0, 1, 1, 0]).unwrap()
    }

    pub fn upper(&self) -> &ColorWord {
        &self.upper
    }

    pub fn lower(&self) -> &ColorWord {
        &self.lower
    }

    pub fn k(&self) -> usize {
        self.upper.len()
    }

    pub fn l(&self) -> usize {
        self.lower.len()
    }

    pub fn points(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn label(&self, p: usize) -> usize {
        self.labels[p] as usize
    }

    pub fn num_blocks(&self) -> usize {
        self.labels.iter().map(|&x| x as usize + 1).max().unwrap_or(0)
    }

    /// Color of a point as it sits in its row.
    pub fn color(&self, p: usize) -> Color {
        if p < self.k() {
            self.upper.0[p]
        } else {
            self.lower.0[p - self.k()]
        }
    }

    /// Signed weight of a point: lower white +1, lower black -1, upper reversed.
    pub fn weight(&self, p: usize) -> i64 {
        if p < self.k() {
            -self.upper.0[p].weight()
        } else {
            self.lower.0[p - self.k()].weight()
        }
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_blocks()];
        for (p, &b) in self.labels.iter().enumerate() {
            out[b as usize].push(p);
        }
        out
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.num_blocks()];
        for &b in &self.labels {
            out[b as usize] += 1;
        }
        out
    }

    pub fn same_shape(&self, other: &Partition) -> bool {
        self.upper == other.upper && self.lower == other.lower
    }

    fn check_shape(&self, other: &Partition) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "{}/{} vs {}/{}",
                self.upper, self.lower, other.upper, other.lower
            )))
        }
    }

    /// Points listed in circular order.
    pub fn circular_order(&self) -> Vec<usize> {
        let k = self.k();
        let n = self.points();
        (0..k).chain((k..n).rev()).collect()
    }

    /// The one-line form: every upper leg rotated down on the left.
    ///
    /// The lower row of the result reads `u_{k-1}..u_0` (complemented) followed by
    /// the original lower row.
    pub fn flat(&self) -> Partition {
        let k = self.k();
        let n = self.points();
        let mut colors = Vec::with_capacity(n);
        let mut lab = Vec::with_capacity(n);
        for p in (0..k).rev() {
            colors.push(self.upper.0[p].complement());
            lab.push(self.labels[p]);
        }
        for p in k..n {
            colors.push(self.lower.0[p - k]);
            lab.push(self.labels[p]);
        }
        Partition::from_labels(ColorWord::empty(), ColorWord(colors), &lab).unwrap()
    }

    /// `(weights, labels)` of the flat form, read left to right.
    pub fn flat_sequence(&self) -> (Vec<i64>, Vec<u8>) {
        let f = self.flat();
        let w = f.lower.0.iter().map(|c| c.weight()).collect();
        (w, f.labels)
    }

    pub fn is_pairing(&self) -> bool {
        self.block_sizes().iter().all(|&s| s == 2)
    }

    pub fn is_even(&self) -> bool {
        self.block_sizes().iter().all(|&s| s % 2 == 0)
    }

    /// Partition with the given blocks (by canonical index) removed.
    pub fn remove_blocks(&self, remove: &[usize]) -> Partition {
        let k = self.k();
        let mut up = Vec::new();
        let mut lo = Vec::new();
        let mut lab = Vec::new();
        for p in 0..self.points() {
            if remove.contains(&self.label(p)) {
                continue;
            }
            if p < k {
                up.push(self.upper.0[p]);
            } else {
                lo.push(self.lower.0[p - k]);
            }
            lab.push(self.labels[p]);
        }
        Partition::from_labels(ColorWord(up), ColorWord(lo), &lab).unwrap()
    }

    /// Same blocks on complemented colors everywhere.
    pub fn with_colors(&self, upper: ColorWord, lower: ColorWord) -> Result<Partition> {
        if upper.len() != self.k() || lower.len() != self.l() {
            return Err(Error::ShapeMismatch("color words do not fit".into()));
        }
        Ok(Partition { upper, lower, labels: self.labels.clone() })
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: by shape, then more blocks first, then restricted-growth string.
impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.upper
            .cmp(&other.upper)
            .then_with(|| self.lower.cmp(&other.lower))
            .then_with(|| other.num_blocks().cmp(&self.num_blocks()))
            .then_with(|| self.labels.cmp(&other.labels))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}/{}]", self.upper, self.lower)?;
        for b in self.blocks() {
            let s: Vec<String> = b.iter().map(|p| p.to_string()).collect();
            write!(f, "{{{}}}", s.join(","))?;
        }
        Ok(())
    }
}

/// Parses the display form `[oo/ob]{0,2}{1,3}`, or the JSON object form.
impl FromStr for Partition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()));
        }
        let bad = || Error::Parse(format!("bad partition '{s}'"));
        let rest = s.strip_prefix('[').ok_or_else(bad)?;
        let (rows, blocks) = rest.split_once(']').ok_or_else(bad)?;
        let (up, lo) = rows.split_once('/').ok_or_else(bad)?;
        let (up, lo): (ColorWord, ColorWord) = (up.parse()?, lo.parse()?);
        let mut out = Vec::new();
        for b in blocks.split('}').map(str::trim).filter(|b| !b.is_empty()) {
            let b = b.strip_prefix('{').ok_or_else(bad)?;
            let pts = b
                .split(',')
                .filter(|x| !x.trim().is_empty())
                .map(|x| x.trim().parse::<usize>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            out.push(pts);
        }
        Partition::from_blocks(up, lo, &out)
    }
}

#[derive(Serialize, Deserialize)]
struct PartitionJson {
    upper: String,
    lower: String,
    blocks: Vec<Vec<usize>>,
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PartitionJson {
            upper: self.upper.to_string(),
            lower: self.lower.to_string(),
            blocks: self.blocks(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PartitionJson::deserialize(d)?;
        let up: ColorWord = j.upper.parse().map_err(serde::de::Error::custom)?;
        let lo: ColorWord = j.lower.parse().map_err(serde::de::Error::custom)?;
        Partition::from_blocks(up, lo, &j.blocks).map_err(serde::de::Error::custom)
    }
}

/// Calls `f` on the restricted-growth string of every set partition of `n` points
/// whose blocks have at most `max_block` elements.
pub fn for_each_set_partition<F: FnMut(&[u8])>(n: usize, max_block: Option<usize>, mut f: F) {
    let cap = max_block.unwrap_or(usize::MAX);
    let mut labels = vec![0u8; n];
    let mut sizes = vec![0usize; n + 1];
    fn rec<F: FnMut(&[u8])>(
        pos: usize,
        nblocks: usize,
        labels: &mut Vec<u8>,
        sizes: &mut Vec<usize>,
        cap: usize,
        f: &mut F,
    ) {
        if pos == labels.len() {
            f(labels);
            return;
        }
        for b in 0..=nblocks {
            if sizes[b] >= cap {
                continue;
            }
            labels[pos] = b as u8;
            sizes[b] += 1;
            let nb = if b == nblocks { nblocks + 1 } else { nblocks };
            rec(pos + 1, nb, labels, sizes, cap, f);
            sizes[b] -= 1;
        }
    }
    rec(0, 0, &mut labels, &mut sizes, cap, &mut f);
}

/// All set partitions of `n` points as restricted-growth strings.
pub fn set_partitions(n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for_each_set_partition(n, None, |l| out.push(l.to_vec()));
    out
}

/// Every partition on the given rows satisfying `pred`, in canonical order.
pub fn enumerate<F: Fn(&Partition) -> bool>(
    upper: &ColorWord,
    lower: &ColorWord,
    pred: F,
) -> Result<Vec<Partition>> {
    enumerate_with(upper, lower, pred, DEFAULT_BOUND, None)
}

/// `enumerate` with an explicit point bound and an optional block-size cap used
/// to prune the search.
pub fn enumerate_with<F: Fn(&Partition) -> bool>(
    upper: &ColorWord,
    lower: &ColorWord,
    pred: F,
    bound: usize,
    max_block: Option<usize>,
) -> Result<Vec<Partition>> {
    let n = upper.len() + lower.len();
    if n > bound {
        return Err(Error::SizeGuard { points: n, bound });
    }
    let mut out = Vec::new();
    for_each_set_partition(n, max_block, |lab| {
        let p = Partition { upper: upper.clone(), lower: lower.clone(), labels: lab.to_vec() };
        if pred(&p) {
            out.push(p);
        }
    });
    out.sort();
    Ok(out)
}

/// Partition grouping equal index values; `i` goes on the upper row.
pub fn kernel(i: &[usize], j: &[usize], upper: &ColorWord, lower: &ColorWord) -> Result<Partition> {
    if i.len() != upper.len() || j.len() != lower.len() {
        return Err(Error::ShapeMismatch("index tuples do not match the color words".into()));
    }
    let all: Vec<usize> = i.iter().chain(j.iter()).copied().collect();
    Partition::from_labels(upper.clone(), lower.clone(), &all)
}

/// Refinement order: every block of `a` lies inside a block of `b`.
pub fn leq(a: &Partition, b: &Partition) -> Result<bool> {
    a.check_shape(b)?;
    Ok(leq_labels(&a.labels, &b.labels))
}

pub(crate) fn leq_labels(a: &[u8], b: &[u8]) -> bool {
    let mut map = [u8::MAX; 256];
    for (x, y) in a.iter().zip(b) {
        let m = &mut map[*x as usize];
        if *m == u8::MAX {
            *m = *y;
        } else if *m != *y {
            return false;
        }
    }
    true
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

pub(crate) fn join_labels(a: &[u8], b: &[u8]) -> Vec<u8> {
    let n = a.len();
    let mut uf = UnionFind::new(n);
    let mut first_a = [usize::MAX; 256];
    let mut first_b = [usize::MAX; 256];
    for p in 0..n {
        let (x, y) = (a[p] as usize, b[p] as usize);
        if first_a[x] == usize::MAX {
            first_a[x] = p;
        } else {
            uf.union(first_a[x], p);
        }
        if first_b[y] == usize::MAX {
            first_b[y] = p;
        } else {
            uf.union(first_b[y], p);
        }
    }
    let roots: Vec<usize> = (0..n).map(|p| uf.find(p)).collect();
    canonical_labels(&roots)
}

pub(crate) fn count_labels(a: &[u8]) -> usize {
    a.iter().map(|&x| x as usize + 1).max().unwrap_or(0)
}

/// Number of blocks of the join, without building the partition.
pub(crate) fn join_count(a: &[u8], b: &[u8]) -> usize {
    count_labels(&join_labels(a, b))
}

/// Least upper bound in refinement order.
pub fn join(a: &Partition, b: &Partition) -> Result<Partition> {
    a.check_shape(b)?;
    Ok(Partition { upper: a.upper.clone(), lower: a.lower.clone(), labels: join_labels(&a.labels, &b.labels) })
}

pub fn num_blocks(p: &Partition) -> usize {
    p.num_blocks()
}

/// Every `t` with `a <= t <= b`, finest first.
pub fn interval(a: &Partition, b: &Partition) -> Result<Vec<Partition>> {
    if !leq(a, b)? {
        return Ok(Vec::new());
    }
    let m = a.num_blocks();
    let a_to_b: Vec<u8> = {
        let mut v = vec![0u8; m];
        for (x, y) in a.labels.iter().zip(&b.labels) {
            v[*x as usize] = *y;
        }
        v
    };
    let mut out = Vec::new();
    for_each_set_partition(m, None, |grp| {
        // group blocks of `a`; only merge blocks inside the same block of `b`
        let mut rep = [u8::MAX; 256];
        for (blk, &g) in grp.iter().enumerate() {
            let r = &mut rep[g as usize];
            if *r == u8::MAX {
                *r = a_to_b[blk];
            } else if *r != a_to_b[blk] {
                return;
            }
        }
        let lab: Vec<u8> = a.labels.iter().map(|&x| grp[x as usize]).collect();
        out.push(Partition { upper: a.upper.clone(), lower: a.lower.clone(), labels: canonical_labels(&lab) });
    });
    out.sort_by(|x, y| y.num_blocks().cmp(&x.num_blocks()).then_with(|| x.labels.cmp(&y.labels)));
    Ok(out)
}

/// Möbius function of the partition lattice, by the defining recurrence.
pub fn mobius(a: &Partition, b: &Partition) -> Result<i64> {
    let iv = interval(a, b)?;
    if iv.is_empty() {
        return Ok(0);
    }
    let mut mu: Vec<i64> = Vec::with_capacity(iv.len());
    for (t, tau) in iv.iter().enumerate() {
        if t == 0 {
            mu.push(1);
            continue;
        }
        let mut s = 0i64;
        for (r, rho) in iv[..t].iter().enumerate() {
            if leq_labels(&rho.labels, &tau.labels) {
                s += mu[r];
            }
        }
        mu.push(-s);
    }
    Ok(*mu.last().unwrap())
}

/// Möbius function between two arbitrary elements of a finite poset given as a
/// list, using refinement order restricted to that list.
pub fn mobius_in(elements: &[Partition], a: &Partition, b: &Partition) -> Result<i64> {
    a.check_shape(b)?;
    if !leq_labels(&a.labels, &b.labels) {
        return Ok(0);
    }
    let mut iv: Vec<&Partition> = elements
        .iter()
        .filter(|t| leq_labels(&a.labels, &t.labels) && leq_labels(&t.labels, &b.labels))
        .collect();
    iv.sort_by(|x, y| y.num_blocks().cmp(&x.num_blocks()).then_with(|| x.labels.cmp(&y.labels)));
    let mut mu: Vec<i64> = Vec::with_capacity(iv.len());
    for t in 0..iv.len() {
        if iv[t].labels == a.labels {
            mu.push(1);
            continue;
        }
        let mut s = 0i64;
        for r in 0..t {
            if leq_labels(&iv[r].labels, &iv[t].labels) {
                s += mu[r];
            }
        }
        mu.push(-s);
    }
    Ok(iv.iter().position(|t| t.labels == b.labels).map(|i| mu[i]).unwrap_or(0))
}

/// `(|a| + |b|)/2 - |a ∨ b|`.
pub fn distance(a: &Partition, b: &Partition) -> Result<BigRational> {
    Ok(BigRational::new(BigInt::from(twice_distance(a, b)?), BigInt::from(2)))
}

/// `|a| + |b| - 2|a ∨ b|`, an integer.
pub fn twice_distance(a: &Partition, b: &Partition) -> Result<i64> {
    a.check_shape(b)?;
    let j = join_count(&a.labels, &b.labels) as i64;
    Ok(a.num_blocks() as i64 + b.num_blocks() as i64 - 2 * j)
}

/// Horizontal concatenation.
pub fn tensor(a: &Partition, b: &Partition) -> Partition {
    let (ka, la) = (a.k(), a.l());
    let off = a.num_blocks();
    let mut lab: Vec<usize> = Vec::with_capacity(a.points() + b.points());
    for p in 0..ka {
        lab.push(a.label(p));
    }
    for p in 0..b.k() {
        lab.push(b.label(p) + off);
    }
    for p in 0..la {
        lab.push(a.label(ka + p));
    }
    for p in 0..b.l() {
        lab.push(b.label(b.k() + p) + off);
    }
    Partition::from_labels(a.upper.concat(&b.upper), a.lower.concat(&b.lower), &lab).unwrap()
}

/// Vertical concatenation: `top` above `bottom`, glued along `top`'s lower row.
/// Returns the composite and the number of closed components erased in the middle.
pub fn compose(top: &Partition, bottom: &Partition) -> Result<(Partition, usize)> {
    if top.lower != bottom.upper {
        return Err(Error::ColorMismatch { top: top.lower.to_string(), bottom: bottom.upper.to_string() });
    }
    let (k, m, l) = (top.k(), top.l(), bottom.l());
    let off = k + m;
    let total = off + m + l;
    let mut uf = UnionFind::new(total);
    let mut first = vec![usize::MAX; 256];
    for p in 0..top.points() {
        let b = top.label(p);
        if first[b] == usize::MAX {
            first[b] = p;
        } else {
            uf.union(first[b], p);
        }
    }
    let mut first = vec![usize::MAX; 256];
    for p in 0..bottom.points() {
        let b = bottom.label(p);
        if first[b] == usize::MAX {
            first[b] = off + p;
        } else {
            uf.union(first[b], off + p);
        }
    }
    for i in 0..m {
        uf.union(k + i, off + i);
    }
    let outer: Vec<usize> = (0..k).chain(off + m..total).collect();
    let roots: Vec<usize> = outer.iter().map(|&p| uf.find(p)).collect();
    let mut middle_roots: Vec<usize> = (k..off).map(|p| uf.find(p)).collect();
    middle_roots.sort_unstable();
    middle_roots.dedup();
    let loops = middle_roots.iter().filter(|r| !roots.contains(r)).count();
    let p = Partition::from_labels(top.upper.clone(), bottom.lower.clone(), &roots)?;
    Ok((p, loops))
}

/// Upside-down turning with all colors switched.
pub fn involute(p: &Partition) -> Partition {
    let k = p.k();
    let lab: Vec<u8> = p.labels[k..].iter().chain(p.labels[..k].iter()).copied().collect();
    Partition::from_labels(p.lower.complement(), p.upper.complement(), &lab).unwrap()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Leftmost upper leg moves to the leftmost lower position.
    Left,
    /// Leftmost lower leg moves to the leftmost upper position.
    Right,
    /// Rightmost upper leg moves to the rightmost lower position.
    RightDown,
    /// Rightmost lower leg moves to the rightmost upper position.
    RightUp,
}

/// Frobenius rotation of a single leg, complementing its color.
pub fn rotate(p: &Partition, dir: Direction) -> Result<Partition> {
    let k = p.k();
    let n = p.points();
    let lab = &p.labels;
    let mut up = p.upper.0.clone();
    let mut lo = p.lower.0.clone();
    let new_lab: Vec<u8>;
    match dir {
        Direction::Left => {
            if k == 0 {
                return Err(Error::EmptySide);
            }
            let c = up.remove(0);
            lo.insert(0, c.complement());
            new_lab = lab[1..k].iter().chain(std::iter::once(&lab[0])).chain(lab[k..].iter()).copied().collect();
        }
        Direction::Right => {
            if k == n {
                return Err(Error::EmptySide);
            }
            let c = lo.remove(0);
            up.insert(0, c.complement());
            new_lab = std::iter::once(&lab[k]).chain(lab[..k].iter()).chain(lab[k + 1..].iter()).copied().collect();
        }
        Direction::RightDown => {
            if k == 0 {
                return Err(Error::EmptySide);
            }
            let c = up.pop().unwrap();
            lo.push(c.complement());
            new_lab = lab[..k - 1].iter().chain(lab[k..].iter()).chain(std::iter::once(&lab[k - 1])).copied().collect();
        }
        Direction::RightUp => {
            if k == n {
                return Err(Error::EmptySide);
            }
            let c = lo.pop().unwrap();
            up.push(c.complement());
            new_lab = lab[..k].iter().chain(std::iter::once(&lab[n - 1])).chain(lab[k..n - 1].iter()).copied().collect();
        }
    }
    Partition::from_labels(ColorWord(up), ColorWord(lo), &new_lab)
}

/// Cyclic shift of a flat partition by `r` positions (colors travel with points).
pub fn rotate_flat(p: &Partition, r: usize) -> Result<Partition> {
    if p.k() != 0 {
        return Err(Error::ShapeMismatch("rotate_flat expects an empty upper row".into()));
    }
    let n = p.points();
    if n == 0 {
        return Ok(p.clone());
    }
    let r = r % n;
    let lab: Vec<u8> = (0..n).map(|i| p.labels[(i + r) % n]).collect();
    let col: Vec<Color> = (0..n).map(|i| p.lower.0[(i + r) % n]).collect();
    Partition::from_labels(ColorWord::empty(), ColorWord(col), &lab)
}

/// Noncrossing test in circular order.
pub fn is_noncrossing(p: &Partition) -> bool {
    let order = p.circular_order();
    let seq: Vec<u8> = order.iter().map(|&q| p.labels[q]).collect();
    noncrossing_sequence(&seq)
}

pub(crate) fn noncrossing_sequence(seq: &[u8]) -> bool {
    // a b a b pattern detection with a stack
    let nb = count_labels(seq);
    let mut last = vec![0usize; nb];
    for (i, &b) in seq.iter().enumerate() {
        last[b as usize] = i;
    }
    let mut stack: Vec<u8> = Vec::new();
    for (i, &b) in seq.iter().enumerate() {
        if let Some(&top) = stack.last() {
            if top != b {
                if stack.contains(&b) {
                    return false;
                }
                stack.push(b);
            }
        } else {
            stack.push(b);
        }
        if last[b as usize] == i {
            if stack.last() != Some(&b) {
                return false;
            }
            stack.pop();
        }
    }
    true
}

/// Doubles every leg; a noncrossing partition becomes a noncrossing pairing.
pub fn fatten(p: &Partition) -> Result<Partition> {
    if !is_noncrossing(p) {
        return Err(Error::Crossing);
    }
    let (k, l) = (p.k(), p.l());
    let (k2, l2) = (2 * k, 2 * l);
    let order = p.circular_order();
    // doubled point for circular position c and copy e in {0,1}
    let doubled = |c: usize, e: usize| -> usize {
        let d = 2 * c + e;
        if d < k2 {
            d
        } else {
            k2 + (l2 - 1 - (d - k2))
        }
    };
    let mut lab = vec![usize::MAX; k2 + l2];
    let mut pos_of_block: Vec<Vec<usize>> = vec![Vec::new(); p.num_blocks()];
    for (c, &q) in order.iter().enumerate() {
        pos_of_block[p.label(q)].push(c);
    }
    let mut next = 0;
    for cs in &pos_of_block {
        let m = cs.len();
        for j in 0..m {
            let a = doubled(cs[j], 1);
            let b = doubled(cs[(j + 1) % m], 0);
            lab[a] = next;
            lab[b] = next;
            next += 1;
        }
    }
    Partition::from_labels(ColorWord::white(k2), ColorWord::white(l2), &lab)
}

/// Inverse of `fatten`.
pub fn shrink(p: &Partition) -> Result<Partition> {
    if p.k() % 2 != 0 || p.l() % 2 != 0 || !p.is_pairing() || !is_noncrossing(p) {
        return Err(Error::InvalidArgument("shrink expects a noncrossing pairing on even rows".into()));
    }
    let (k, l) = (p.k() / 2, p.l() / 2);
    let order = p.circular_order();
    let n = k + l;
    let mut uf = UnionFind::new(n);
    let mut partner_circ = vec![0usize; 2 * n];
    let circ_of: HashMap<usize, usize> = order.iter().enumerate().map(|(c, &q)| (q, c)).collect();
    for b in p.blocks() {
        let (x, y) = (circ_of[&b[0]], circ_of[&b[1]]);
        partner_circ[x] = y;
        partner_circ[y] = x;
    }
    for c in 0..n {
        uf.union(c, partner_circ[2 * c + 1] / 2);
    }
    let shape_order: Vec<usize> = (0..k).chain((k..n).rev()).collect();
    let mut lab = vec![0usize; n];
    for (c, &q) in shape_order.iter().enumerate() {
        lab[q] = uf.find(c);
    }
    let out = Partition::from_labels(ColorWord::white(k), ColorWord::white(l), &lab)?;
    if fatten(&out)?.labels != p.labels {
        return Err(Error::InvalidArgument("pairing is not a fattened partition".into()));
    }
    Ok(out)
}

/// Signature of an even partition, by switch normalization of the flat form.
pub fn signature(p: &Partition) -> Result<i64> {
    signature_with(p, 0, None)
}

/// Signature computed after a cyclic rotation by `rotation` of the flat form and
/// sorting legs into the block order `target` (a permutation of block indices of
/// the rotated flat form; `None` means order of first appearance).  The count of
/// adjacent switches between legs of distinct blocks is returned as a sign.
pub fn signature_with(p: &Partition, rotation: usize, target: Option<&[usize]>) -> Result<i64> {
    if !p.is_even() {
        return Err(Error::OddBlock);
    }
    let f = rotate_flat(&p.flat(), rotation)?;
    let nb = f.num_blocks();
    let rank: Vec<usize> = match target {
        Some(t) => {
            if t.len() != nb {
                return Err(Error::InvalidArgument("target order has wrong length".into()));
            }
            let mut r = vec![0; nb];
            for (pos, &b) in t.iter().enumerate() {
                r[b] = pos;
            }
            r
        }
        None => (0..nb).collect(),
    };
    let mut seq: Vec<usize> = f.labels.iter().map(|&b| rank[b as usize]).collect();
    let mut switches = 0usize;
    // bubble sort by adjacent switches
    let n = seq.len();
    for i in 0..n {
        for j in 0..n.saturating_sub(1 + i) {
            if seq[j] > seq[j + 1] {
                seq.swap(j, j + 1);
                switches += 1;
            }
        }
    }
    Ok(if switches % 2 == 0 { 1 } else { -1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unc(k: usize, l: usize, blocks: &[&[usize]]) -> Partition {
        let b: Vec<Vec<usize>> = blocks.iter().map(|x| x.to_vec()).collect();
        Partition::uncolored(k, l, &b).unwrap()
    }

    #[test]
    fn enumerate_counts() {
        let all = enumerate(&ColorWord::empty(), &ColorWord::white(3), |_| true).unwrap();
        assert_eq!(all.len(), 5);
        let sizes: Vec<usize> = all.iter().map(|p| p.num_blocks()).collect();
        assert_eq!(sizes, vec![3, 2, 2, 2, 1]);
        let e = enumerate(&ColorWord::empty(), &ColorWord::empty(), |_| true).unwrap();
        assert_eq!(e.len(), 1);
        assert!(enumerate_with(&ColorWord::empty(), &ColorWord::white(5), |_| true, 4, None).is_err());
    }

    #[test]
    fn kernel_examples() {
        let e = ColorWord::empty();
        let k = kernel(&[1, 2, 1], &[], &ColorWord::white(3), &e).unwrap();
        assert_eq!(k.blocks(), vec![vec![0, 2], vec![1]]);
        let k = kernel(&[5, 5, 5], &[5], &ColorWord::white(3), &ColorWord::white(1)).unwrap();
        assert_eq!(k.num_blocks(), 1);
        let k = kernel(&[1, 2], &[2, 1], &ColorWord::white(2), &ColorWord::white(2)).unwrap();
        assert_eq!(k.blocks(), vec![vec![0, 3], vec![1, 2]]);
    }

    #[test]
    fn order_and_mobius_small() {
        let bars = unc(0, 2, &[&[0], &[1]]);
        let cap = unc(0, 2, &[&[0, 1]]);
        assert!(leq(&bars, &cap).unwrap());
        assert!(!leq(&cap, &bars).unwrap());
        assert_eq!(mobius(&bars, &bars).unwrap(), 1);
        assert_eq!(mobius(&bars, &cap).unwrap(), -1);
        assert_eq!(mobius(&cap, &bars).unwrap(), 0);
        assert_eq!(join(&bars, &cap).unwrap(), cap);
        assert_eq!(distance(&bars, &cap).unwrap(), BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn join_chain() {
        let a = unc(0, 4, &[&[0, 1], &[2, 3]]);
        let b = unc(0, 4, &[&[1, 2], &[0], &[3]]);
        assert_eq!(join(&a, &b).unwrap().num_blocks(), 1);
    }

    #[test]
    fn compose_loops() {
        let w = ColorWord::white(2);
        let cup = Partition::from_labels(ColorWord::empty(), w.clone(), &[0, 0]).unwrap();
        let cap = Partition::from_labels(w.clone(), ColorWord::empty(), &[0, 0]).unwrap();
        let (p, loops) = compose(&cup, &cap).unwrap();
        assert_eq!(p, Partition::empty());
        assert_eq!(loops, 1);
        let x = unc(2, 1, &[&[0, 1, 2]]);
        let (q, c) = compose(&Partition::identity(&ColorWord::white(2)), &x).unwrap();
        assert_eq!((q, c), (x, 0));
    }

    #[test]
    fn compose_color_mismatch() {
        let a = Partition::semicircle(Color::White);
        let b = Partition::identity(&ColorWord::white(2));
        assert!(compose(&a, &b).is_err());
    }

    #[test]
    fn involute_example() {
        let cap = Partition::semicircle(Color::White);
        let inv = involute(&cap);
        assert_eq!(inv.upper().to_string(), "bo");
        assert_eq!(inv.l(), 0);
        assert_eq!(involute(&inv), cap);
    }

    #[test]
    fn rotation_round_trip_and_flat() {
        let w = "obo".parse::<ColorWord>().unwrap();
        let half = Partition::from_labels(w.clone(), w.clone(), &[0, 1, 2, 2, 1, 0]).unwrap();
        let f = half.flat();
        assert_eq!(f.points(), 6);
        assert_eq!(f.num_blocks(), 3);
        let r = rotate(&rotate(&half, Direction::Left).unwrap(), Direction::Right).unwrap();
        assert_eq!(r, half);
        let r = rotate(&rotate(&half, Direction::RightDown).unwrap(), Direction::RightUp).unwrap();
        assert_eq!(r, half);
        assert!(rotate(&Partition::semicircle(Color::White), Direction::Left).is_err());
    }

    #[test]
    fn noncrossing_examples() {
        assert!(is_noncrossing(&unc(0, 4, &[&[0, 1], &[2, 3]])));
        assert!(!is_noncrossing(&unc(0, 4, &[&[0, 2], &[1, 3]])));
        let nc4 = enumerate(&ColorWord::empty(), &ColorWord::white(4), is_noncrossing).unwrap();
        assert_eq!(nc4.len(), 14);
    }

    #[test]
    fn fatten_examples() {
        let one = unc(0, 1, &[&[0]]);
        assert_eq!(fatten(&one).unwrap(), unc(0, 2, &[&[0, 1]]));
        let nc3 = enumerate(&ColorWord::empty(), &ColorWord::white(3), is_noncrossing).unwrap();
        let mut img: Vec<Partition> = nc3.iter().map(|p| fatten(p).unwrap()).collect();
        img.sort();
        img.dedup();
        assert_eq!(img.len(), 5);
        for p in &nc3 {
            assert_eq!(&shrink(&fatten(p).unwrap()).unwrap(), p);
        }
        assert!(fatten(&unc(0, 4, &[&[0, 2], &[1, 3]])).is_err());
    }

    #[test]
    fn signature_examples() {
        assert_eq!(signature(&unc(0, 4, &[&[0, 2], &[1, 3]])).unwrap(), -1);
        assert_eq!(signature(&unc(0, 4, &[&[0, 3], &[1, 2]])).unwrap(), 1);
        // 3-cycle in P2(3,3): upper i joined to lower σ(i)
        let cyc = unc(3, 3, &[&[0, 4], &[1, 5], &[2, 3]]);
        assert_eq!(signature(&cyc).unwrap(), 1);
        let transp = unc(2, 2, &[&[0, 3], &[1, 2]]);
        assert_eq!(signature(&transp).unwrap(), -1);
        assert!(signature(&unc(0, 1, &[&[0]])).is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = Partition::crossing(Color::White, Color::Black);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"upper":"ob","lower":"bo","blocks":[[0,3],[1,2]]}"#);
        let q: Partition = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
    }
}
