//! Fusion rings of the free orthogonal, free unitary and free wreath quantum
//! groups, as combinatorial rings on labels.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

use crate::categories::Param;
use crate::partitions::{Color, ColorWord};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ring {
    /// Also the ring of SU_2
    OnPlus,
    UnPlus,
    HsPlus(Param),
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::OnPlus => f.write_str("on+"),
            Ring::UnPlus => f.write_str("un+"),
            Ring::HsPlus(s) => write!(f, "hs+:{s}"),
        }
    }
}

impl FromStr for Ring {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "on+" | "on_plus" | "su2" => Ok(Ring::OnPlus),
            "un+" | "un_plus" => Ok(Ring::UnPlus),
            _ => {
                let p = t
                    .strip_prefix("hs+:")
                    .or_else(|| t.strip_prefix("hs_plus:"))
                    .ok_or_else(|| Error::Parse(format!("unknown ring '{s}'")))?;
                let s = p.parse()?;
                if s == Param::Finite(0) {
                    return Err(Error::Parse("hs+ needs s ≥ 1".into()));
                }
                Ok(Ring::HsPlus(s))
            }
        }
    }
}

/// An irreducible label: `Int(k)` for on+, a letter word otherwise.
/// un+ letters are `1` (white) and `-1` (black); hs+ letters are residues.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Int(u64),
    Word(Vec<i64>),
}

impl Ord for Label {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (Label::Int(a), Label::Int(b)) => a.cmp(b),
            (Label::Word(a), Label::Word(b)) => a.len().cmp(&b.len()).then_with(|| a.cmp(b)),
            (Label::Int(_), Label::Word(_)) => std::cmp::Ordering::Less,
            (Label::Word(_), Label::Int(_)) => std::cmp::Ordering::Greater,
        }
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ring {
    pub fn unit(self) -> Label {
        match self {
            Ring::OnPlus => Label::Int(0),
            _ => Label::Word(vec![]),
        }
    }

    fn reduce(self, x: i64) -> i64 {
        match self {
            Ring::HsPlus(Param::Finite(s)) => x.rem_euclid(s as i64),
            _ => x,
        }
    }

    pub fn validate(self, l: &Label) -> Result<()> {
        let ok = match (self, l) {
            (Ring::OnPlus, Label::Int(_)) => true,
            (Ring::UnPlus, Label::Word(w)) => w.iter().all(|&x| x == 1 || x == -1),
            (Ring::HsPlus(Param::Finite(s)), Label::Word(w)) => w.iter().all(|&x| (0..s as i64).contains(&x)),
            (Ring::HsPlus(_), Label::Word(_)) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidLabel(format!("{} is not a label of {self}", self.show(l))))
        }
    }

    /// Parses `3` (on+), `obo` (un+), `1,2,0` or `(1,2,0)` (hs+). The empty
    /// string, `()` and `e` denote the unit of word rings.
    pub fn parse_label(self, s: &str) -> Result<Label> {
        let t = s.trim();
        let l = match self {
            Ring::OnPlus => Label::Int(t.parse().map_err(|_| Error::InvalidLabel(format!("'{s}'")))?),
            Ring::UnPlus => {
                let t = if t == "e" { "" } else { t };
                let w: ColorWord = t.parse().map_err(|_| Error::InvalidLabel(format!("'{s}'")))?;
                Label::Word(w.letters().iter().map(|c| c.weight()).collect())
            }
            Ring::HsPlus(_) => {
                let t = t.trim_start_matches('(').trim_end_matches(')');
                let t = if t == "e" { "" } else { t };
                let w = t
                    .split(',')
                    .filter(|x| !x.trim().is_empty())
                    .map(|x| x.trim().parse::<i64>().map(|v| self.reduce(v)))
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::InvalidLabel(format!("'{s}'")))?;
                Label::Word(w)
            }
        };
        self.validate(&l)?;
        Ok(l)
    }

    pub fn show(self, l: &Label) -> String {
        match l {
            Label::Int(k) => k.to_string(),
            Label::Word(w) => match self {
                Ring::UnPlus => w.iter().map(|&x| if x > 0 { 'o' } else { 'b' }).collect(),
                _ => format!("({})", w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")),
            },
        }
    }

    /// `x̄`: on+ labels are self-conjugate; words are reversed with letters negated.
    pub fn conjugate(self, l: &Label) -> Label {
        match l {
            Label::Int(k) => Label::Int(*k),
            Label::Word(w) => Label::Word(w.iter().rev().map(|&x| self.reduce(-x)).collect()),
        }
    }

    /// The generator label whose powers decompose the fundamental corepresentation.
    pub fn fundamental(self) -> Label {
        match self {
            Ring::OnPlus => Label::Int(1),
            Ring::UnPlus => Label::Word(vec![1]),
            Ring::HsPlus(_) => Label::Word(vec![1]),
        }
    }

    /// `r_a ⊗ r_b` decomposed into irreducibles.
    pub fn fuse(self, a: &Label, b: &Label) -> Result<FusionElement> {
        self.validate(a)?;
        self.validate(b)?;
        let mut out = FusionElement::zero(self);
        match (a, b) {
            (Label::Int(k), Label::Int(l)) => {
                let (k, l) = (*k, *l);
                let mut j = k.abs_diff(l);
                while j <= k + l {
                    out.add(Label::Int(j), 1);
                    j += 2;
                }
            }
            (Label::Word(x), Label::Word(y)) => {
                // x = v z, y = z̄ w
                for zl in 0..=x.len().min(y.len()) {
                    let (v, z) = x.split_at(x.len() - zl);
                    let (zb, w) = y.split_at(zl);
                    let conj: Vec<i64> = z.iter().rev().map(|&c| self.reduce(-c)).collect();
                    if conj != zb {
                        continue;
                    }
                    out.add(Label::Word([v, w].concat()), 1);
                    if let Ring::HsPlus(_) = self {
                        if let (Some((&vl, vh)), Some((&wf, wt))) = (v.split_last(), w.split_first()) {
                            let mut dot = vh.to_vec();
                            dot.push(self.reduce(vl + wf));
                            dot.extend_from_slice(wt);
                            out.add(Label::Word(dot), 1);
                        }
                    }
                }
            }
            _ => unreachable!("validated"),
        }
        Ok(out)
    }

    pub fn fuse_elements(self, a: &FusionElement, b: &FusionElement) -> Result<FusionElement> {
        let mut out = FusionElement::zero(self);
        for (la, ma) in &a.terms {
            for (lb, mb) in &b.terms {
                for (l, m) in self.fuse(la, lb)?.terms {
                    out.add(l, m * ma * mb);
                }
            }
        }
        Ok(out)
    }

    /// Word of fundamental factors for `decompose_power`: on+ ignores colors;
    /// un+ maps white to `u` and black to `ū`; hs+ reads letters as powers.
    fn factor(self, letter: i64) -> FusionElement {
        let mut e = FusionElement::zero(self);
        match self {
            Ring::OnPlus => e.add(Label::Int(1), 1),
            Ring::UnPlus => e.add(Label::Word(vec![letter]), 1),
            Ring::HsPlus(_) => {
                let i = self.reduce(letter);
                e.add(Label::Word(vec![i]), 1);
                if i == 0 {
                    e.add(Label::Word(vec![]), 1);
                }
            }
        }
        e
    }
}

/// Maximal tensor power for `decompose_power`.
pub const MAX_POWER: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FusionElement {
    pub ring: Ring,
    pub terms: BTreeMap<Label, u64>,
}

impl FusionElement {
    pub fn zero(ring: Ring) -> Self {
        FusionElement { ring, terms: BTreeMap::new() }
    }

    pub fn single(ring: Ring, l: Label) -> Self {
        let mut e = Self::zero(ring);
        e.add(l, 1);
        e
    }

    pub fn add(&mut self, l: Label, m: u64) {
        if m > 0 {
            *self.terms.entry(l).or_insert(0) += m;
        }
    }

    pub fn multiplicity(&self, l: &Label) -> u64 {
        self.terms.get(l).copied().unwrap_or(0)
    }

    pub fn trivial_multiplicity(&self) -> u64 {
        self.multiplicity(&self.ring.unit())
    }

    pub fn total(&self) -> u64 {
        self.terms.values().sum()
    }

    /// `Σ mult · dim` at parameter N, for rings with a dimension function.
    pub fn dimension(&self, n: u64) -> Result<BigInt> {
        let mut s = BigInt::zero();
        for (l, m) in &self.terms {
            s += dim(self.ring, l, n)? * BigInt::from(*m);
        }
        Ok(s)
    }
}

impl fmt::Display for FusionElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(l, m)| {
                let r = format!("r_{}", self.ring.show(l));
                if *m == 1 {
                    r
                } else {
                    format!("{m}·{r}")
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

struct Terms<'a>(&'a FusionElement);

impl Serialize for Terms<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.terms.len()))?;
        for (l, m) in &self.0.terms {
            seq.serialize_element(&(self.0.ring.show(l), m))?;
        }
        seq.end()
    }
}

impl Serialize for FusionElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("ring", &self.ring.to_string())?;
        m.serialize_entry("terms", &Terms(self))?;
        m.end()
    }
}

type Memo = Mutex<HashMap<(Ring, Vec<i64>), FusionElement>>;

fn memo() -> &'static Memo {
    static M: OnceLock<Memo> = OnceLock::new();
    M.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `u_{w_1} ⊗ … ⊗ u_{w_k}` for the letters of `word`, memoized on prefixes.
pub fn decompose_word(ring: Ring, word: &[i64]) -> Result<FusionElement> {
    if word.len() > MAX_POWER {
        return Err(Error::SizeGuard { points: word.len(), bound: MAX_POWER });
    }
    let word: Vec<i64> = word.iter().map(|&x| ring.reduce(x)).collect();
    if ring == Ring::UnPlus && word.iter().any(|&x| x != 1 && x != -1) {
        return Err(Error::InvalidLabel("un+ letters are ±1".into()));
    }
    if let Some(e) = memo().lock().unwrap().get(&(ring, word.clone())) {
        return Ok(e.clone());
    }
    let e = match word.split_last() {
        None => FusionElement::single(ring, ring.unit()),
        Some((&last, init)) => ring.fuse_elements(&decompose_word(ring, init)?, &ring.factor(last))?,
    };
    memo().lock().unwrap().insert((ring, word), e.clone());
    Ok(e)
}

/// `u^{⊗k}` for the fundamental label.
pub fn decompose_power(ring: Ring, k: usize) -> Result<FusionElement> {
    decompose_word(ring, &vec![1; k])
}

/// un+ tensor word from a color word: white is `u`, black is `ū`.
pub fn color_letters(w: &ColorWord) -> Vec<i64> {
    w.letters().iter().map(|c| if *c == Color::White { 1 } else { -1 }).collect()
}

pub fn trivial_multiplicity(ring: Ring, word: &[i64]) -> Result<u64> {
    Ok(decompose_word(ring, word)?.trivial_multiplicity())
}

/// `dim r_k` for on+ by `d_k = N d_{k-1} - d_{k-2}`.
pub fn dim_on(k: u64, n: u64) -> Result<BigInt> {
    if n < 2 {
        return Err(Error::InvalidArgument("dim_on needs N ≥ 2".into()));
    }
    let nn = BigInt::from(n);
    let (mut a, mut b) = (BigInt::one(), nn.clone());
    if k == 0 {
        return Ok(a);
    }
    for _ in 1..k {
        let c = &nn * &b - &a;
        a = b;
        b = c;
    }
    Ok(b)
}

/// `dim r_x` for un+, from `r_x ⊗ r_a = r_{xa} + [x ends in ā] r_{x'}`.
pub fn dim_un(x: &[i64], n: u64) -> Result<BigInt> {
    if n < 2 {
        return Err(Error::InvalidArgument("dim_un needs N ≥ 2".into()));
    }
    let nn = BigInt::from(n);
    let mut dims = vec![BigInt::one()];
    for i in 0..x.len() {
        let prev = &dims[i];
        let mut d = &nn * prev;
        if i >= 1 && x[i - 1] == -x[i] {
            d -= &dims[i - 1];
        }
        dims.push(d);
    }
    Ok(dims.pop().unwrap())
}

pub fn dim(ring: Ring, l: &Label, n: u64) -> Result<BigInt> {
    ring.validate(l)?;
    match (ring, l) {
        (Ring::OnPlus, Label::Int(k)) => dim_on(*k, n),
        (Ring::UnPlus, Label::Word(w)) => dim_un(w, n),
        _ => Err(Error::Unsupported(format!("dimensions for {ring}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[i64]) -> Label {
        Label::Word(v.to_vec())
    }

    #[test]
    fn on_plus_rules() {
        let r = Ring::OnPlus;
        let e = r.fuse(&Label::Int(1), &Label::Int(1)).unwrap();
        assert_eq!(e.to_string(), "r_0 + r_2");
        assert_eq!(r.fuse(&Label::Int(5), &Label::Int(0)).unwrap(), FusionElement::single(r, Label::Int(5)));
        assert_eq!(decompose_power(r, 4).unwrap().trivial_multiplicity(), 2);
        assert_eq!(decompose_power(r, 6).unwrap().trivial_multiplicity(), 5);
        assert_eq!(dim_on(2, 5).unwrap(), BigInt::from(24));
        assert_eq!(decompose_power(r, 4).unwrap().dimension(3).unwrap(), BigInt::from(81));
    }

    #[test]
    fn hs_plus_rule() {
        let r = Ring::HsPlus(Param::Finite(3));
        let e = r.fuse(&w(&[1]), &w(&[2])).unwrap();
        let mut want = FusionElement::zero(r);
        want.add(w(&[1, 2]), 1);
        want.add(w(&[0]), 1);
        want.add(w(&[]), 1);
        assert_eq!(e, want);
        assert_eq!(r.conjugate(&w(&[1, 0, 2])), w(&[1, 0, 2]));
        assert_eq!(r.conjugate(&w(&[1, 1])), w(&[2, 2]));
        let one = Ring::HsPlus(Param::Finite(1));
        assert_eq!(trivial_multiplicity(one, &[0; 4]).unwrap(), 14);
    }

    #[test]
    fn un_plus_rules() {
        let r = Ring::UnPlus;
        assert_eq!(trivial_multiplicity(r, &[1, -1, 1, -1]).unwrap(), 2);
        assert_eq!(trivial_multiplicity(r, &[1, 1]).unwrap(), 0);
        let e = decompose_word(r, &[1, -1, -1, 1]).unwrap();
        assert_eq!(e.dimension(3).unwrap(), BigInt::from(81));
        assert_eq!(r.parse_label("obb").unwrap(), w(&[1, -1, -1]));
        assert_eq!(r.show(&w(&[1, -1])), "ob");
    }

    #[test]
    fn serialization() {
        let e = decompose_power(Ring::OnPlus, 3).unwrap();
        assert_eq!(serde_json::to_string(&e).unwrap(), r#"{"ring":"on+","terms":[["1",2],["3",1]]}"#);
        assert!(Ring::OnPlus.parse_label("x").is_err());
        assert!(Ring::HsPlus(Param::Finite(2)).validate(&w(&[3])).is_err());
    }
}
