//! Categories of partitions as named membership predicates, with axiom audits,
//! the uniformity test and bounded generation.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::partitions::{
    compose, enumerate_with, for_each_set_partition, involute, is_noncrossing, leq_labels, rotate_flat,
    signature, tensor, Color, ColorWord, Partition, DEFAULT_BOUND,
};

/// A modulus in `{1, 2, ...} ∪ {∞}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Param {
    Finite(u64),
    Infinite,
}

impl Param {
    /// `x ≡ 0` modulo the parameter; at infinity this means `x = 0`.
    pub fn divides(self, x: i64) -> bool {
        match self {
            Param::Finite(0) | Param::Infinite => x == 0,
            Param::Finite(s) => x.rem_euclid(s as i64) == 0,
        }
    }

    pub fn is(self, v: u64) -> bool {
        self == Param::Finite(v)
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Finite(s) => write!(f, "{s}"),
            Param::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Param {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "∞" | "infinity" | "0" => Ok(Param::Infinite),
            t => t
                .parse::<u64>()
                .map(Param::Finite)
                .map_err(|_| Error::Parse(format!("bad parameter '{t}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CategorySpec {
    P,
    Peven,
    P2,
    P12,
    P12prime,
    NC,
    NCeven,
    NC2,
    NC12,
    NC12prime,
    MatchP2,
    MatchNC2,
    MatchPeven,
    MatchNCeven,
    Ps(Param),
    NCs(Param),
    PevenStar,
    P2Star,
    P2GlobalMod(Param),
    PevenBalanced(Param),
    PevenLocallyBalanced(Param),
    PevenInfty,
    MatchP2String(Param),
    MatchP2Circ,
    /// Residue set `residues` modulo `modulus`; modulus 0 means the literal finite set.
    MatchP2Cosemigroup { residues: Vec<u64>, modulus: u64 },
    NCevenAlternating,
    Diamond(u32),
}

use CategorySpec::*;

impl fmt::Display for CategorySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            P => write!(f, "p"),
            Peven => write!(f, "peven"),
            P2 => write!(f, "p2"),
            P12 => write!(f, "p12"),
            P12prime => write!(f, "p12p"),
            NC => write!(f, "nc"),
            NCeven => write!(f, "nceven"),
            NC2 => write!(f, "nc2"),
            NC12 => write!(f, "nc12"),
            NC12prime => write!(f, "nc12p"),
            MatchP2 => write!(f, "mp2"),
            MatchNC2 => write!(f, "mnc2"),
            MatchPeven => write!(f, "mpeven"),
            MatchNCeven => write!(f, "mnceven"),
            Ps(s) => write!(f, "ps:{s}"),
            NCs(s) => write!(f, "ncs:{s}"),
            PevenStar => write!(f, "pevenstar"),
            P2Star => write!(f, "p2star"),
            P2GlobalMod(r) => write!(f, "p2r:{r}"),
            PevenBalanced(s) => write!(f, "pevenbal:{s}"),
            PevenLocallyBalanced(s) => write!(f, "pevenlocbal:{s}"),
            PevenInfty => write!(f, "peveninf"),
            MatchP2String(r) => write!(f, "mp2str:{r}"),
            MatchP2Circ => write!(f, "mp2circ"),
            MatchP2Cosemigroup { residues, modulus } => {
                let r: Vec<String> = residues.iter().map(|x| x.to_string()).collect();
                write!(f, "p2c:{}/{}", r.join(","), modulus)
            }
            NCevenAlternating => write!(f, "ncevenalt"),
            Diamond(r) => write!(f, "diamond:{r}"),
        }
    }
}

impl FromStr for CategorySpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h.to_ascii_lowercase(), Some(a)),
            None => (s.to_ascii_lowercase(), None),
        };
        let param = || -> Result<Param> {
            arg.ok_or_else(|| Error::Parse(format!("'{head}' needs a parameter")))?.parse()
        };
        let spec = match head.as_str() {
            "p" => P,
            "peven" => Peven,
            "p2" => P2,
            "p12" => P12,
            "p12p" | "p12prime" => P12prime,
            "nc" => NC,
            "nceven" => NCeven,
            "nc2" => NC2,
            "nc12" => NC12,
            "nc12p" | "nc12prime" => NC12prime,
            "mp2" | "matchp2" => MatchP2,
            "mnc2" | "matchnc2" => MatchNC2,
            "mpeven" | "matchpeven" => MatchPeven,
            "mnceven" | "matchnceven" => MatchNCeven,
            "ps" => Ps(param()?),
            "ncs" => NCs(param()?),
            "pevenstar" => PevenStar,
            "p2star" => P2Star,
            "p2r" | "p2globalmod" => P2GlobalMod(param()?),
            "pevenbal" | "pevenbalanced" => PevenBalanced(param()?),
            "pevenlocbal" | "pevenlocallybalanced" => PevenLocallyBalanced(param()?),
            "peveninf" | "peveninfty" => PevenInfty,
            "mp2str" | "matchp2string" => MatchP2String(param()?),
            "mp2circ" | "matchp2circ" => MatchP2Circ,
            "p2c" | "matchp2cosemigroup" => {
                let a = arg.ok_or_else(|| Error::Parse("p2c needs C/m".into()))?;
                let (res, m) = a.split_once('/').ok_or_else(|| Error::Parse("p2c expects C/m".into()))?;
                let modulus: u64 = m.trim().parse().map_err(|_| Error::Parse(format!("bad modulus '{m}'")))?;
                let mut residues = Vec::new();
                for t in res.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                    let v: u64 = t.parse().map_err(|_| Error::Parse(format!("bad residue '{t}'")))?;
                    residues.push(if modulus > 0 { v % modulus } else { v });
                }
                residues.sort_unstable();
                residues.dedup();
                MatchP2Cosemigroup { residues, modulus }
            }
            "ncevenalt" | "ncevenalternating" => NCevenAlternating,
            "diamond" => {
                let a = arg.ok_or_else(|| Error::Parse("diamond needs r".into()))?;
                let r: u32 = a.trim().parse().map_err(|_| Error::Parse(format!("bad r '{a}'")))?;
                if r == 0 {
                    return Err(Error::Parse("diamond needs r >= 1".into()));
                }
                Diamond(r)
            }
            _ => return Err(Error::Parse(format!("unknown category '{s}'"))),
        };
        Ok(spec)
    }
}

impl Serialize for CategorySpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Which kind of cumulants linearize a uniform category, and its block sizes.
#[derive(Clone, Copy, Debug)]
pub struct BlockLaw {
    pub free: bool,
    pub sizes: fn(usize, Param) -> bool,
    pub param: Param,
}

/// The flat form of a partition, read left to right.
struct Flat {
    w: Vec<i64>,
    lab: Vec<u8>,
    blocks: Vec<Vec<usize>>,
}

impl Flat {
    fn of(p: &Partition) -> Flat {
        let (w, lab) = p.flat_sequence();
        let nb = lab.iter().map(|&x| x as usize + 1).max().unwrap_or(0);
        let mut blocks = vec![Vec::new(); nb];
        for (i, &b) in lab.iter().enumerate() {
            blocks[b as usize].push(i);
        }
        Flat { w, lab, blocks }
    }

    fn block_weight(&self, b: usize) -> i64 {
        self.blocks[b].iter().map(|&i| self.w[i]).sum()
    }

    fn interior(&self, a: usize, b: usize) -> i64 {
        self.w[a + 1..b].iter().sum()
    }
}

fn crosses(a: &[usize], b: &[usize]) -> bool {
    let (a0, a1) = (a[0], a[1]);
    let inside = |x: usize| a0 < x && x < a1;
    inside(b[0]) != inside(b[1])
}

fn balanced_flat(lab: &[u8], s: Param) -> bool {
    if lab.len() % 2 != 0 {
        return false;
    }
    let nb = lab.iter().map(|&x| x as usize + 1).max().unwrap_or(0);
    let mut bal = vec![0i64; nb];
    for (i, &b) in lab.iter().enumerate() {
        bal[b as usize] += if i % 2 == 0 { 1 } else { -1 };
    }
    bal.iter().all(|&x| s.divides(x))
}

fn all_blocks_weighted(f: &Flat, s: Param) -> bool {
    (0..f.blocks.len()).all(|b| s.divides(f.block_weight(b)))
}

fn is_match_pairing(f: &Flat) -> bool {
    f.blocks.iter().all(|b| b.len() == 2) && all_blocks_weighted(f, Param::Infinite)
}

fn strings_balanced(f: &Flat, r: Param) -> bool {
    f.blocks.iter().all(|b| r.divides(f.interior(b[0], b[1])))
}

fn cosemigroup_member(x: u64, residues: &[u64], modulus: u64) -> bool {
    if modulus == 0 {
        residues.contains(&x)
    } else {
        residues.contains(&(x % modulus))
    }
}

fn crossing_condition(f: &Flat, residues: &[u64], modulus: u64) -> bool {
    let nb = f.blocks.len();
    for x in 0..nb {
        for y in x + 1..nb {
            let (a, b) = (&f.blocks[x], &f.blocks[y]);
            if !crosses(a, b) {
                continue;
            }
            for &p in a {
                for &q in b {
                    if f.w[p] == f.w[q] {
                        continue;
                    }
                    let (lo, hi) = if p < q { (p, q) } else { (q, p) };
                    let v = f.interior(lo, hi).unsigned_abs();
                    if !cosemigroup_member(v, residues, modulus) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn alternating_blocks(f: &Flat) -> bool {
    f.blocks.iter().all(|b| b.windows(2).all(|w| f.w[w[0]] != f.w[w[1]]))
}

/// Every coarsening of an even partition has signature one.
fn all_coarsenings_positive(p: &Partition) -> bool {
    let m = p.num_blocks();
    let mut ok = true;
    for_each_set_partition(m, None, |grp| {
        if !ok {
            return;
        }
        let lab: Vec<u8> = p.labels().iter().map(|&x| grp[x as usize]).collect();
        let tau = Partition::from_labels(p.upper().clone(), p.lower().clone(), &lab).unwrap();
        if signature(&tau).unwrap_or(-1) != 1 {
            ok = false;
        }
    });
    ok
}

fn locally_balanced(p: &Partition, s: Param) -> bool {
    let f = Flat::of(p);
    let nb = f.blocks.len();
    if nb > 20 {
        return false;
    }
    for mask in 0u32..(1u32 << nb) {
        let lab: Vec<u8> = f.lab.iter().copied().filter(|&b| mask & (1 << b) == 0).collect();
        if !balanced_flat(&lab, s) {
            return false;
        }
    }
    true
}

impl CategorySpec {
    /// Membership test.
    pub fn contains(&self, p: &Partition) -> bool {
        let sizes = p.block_sizes();
        let pairing = || sizes.iter().all(|&s| s == 2);
        let even = || sizes.iter().all(|&s| s % 2 == 0);
        let small = || sizes.iter().all(|&s| s <= 2);
        let nc = || is_noncrossing(p);
        match self {
            P => true,
            Peven => even(),
            P2 => pairing(),
            P12 => small(),
            P12prime => small() && p.points() % 2 == 0,
            NC => nc(),
            NCeven => even() && nc(),
            NC2 => pairing() && nc(),
            NC12 => small() && nc(),
            NC12prime => small() && p.points() % 2 == 0 && nc(),
            MatchP2 => pairing() && is_match_pairing(&Flat::of(p)),
            MatchNC2 => pairing() && nc() && is_match_pairing(&Flat::of(p)),
            MatchPeven => all_blocks_weighted(&Flat::of(p), Param::Infinite),
            MatchNCeven => nc() && all_blocks_weighted(&Flat::of(p), Param::Infinite),
            Ps(s) => all_blocks_weighted(&Flat::of(p), *s),
            NCs(s) => nc() && all_blocks_weighted(&Flat::of(p), *s),
            PevenStar => even() && balanced_flat(&Flat::of(p).lab, Param::Infinite),
            P2Star => {
                pairing() && Flat::of(p).blocks.iter().all(|b| (b[0] + b[1]) % 2 == 1)
            }
            P2GlobalMod(r) => pairing() && r.divides(Flat::of(p).w.iter().sum()),
            PevenBalanced(s) => balanced_flat(&Flat::of(p).lab, *s),
            PevenLocallyBalanced(s) => locally_balanced(p, *s),
            PevenInfty => even() && all_coarsenings_positive(p),
            MatchP2String(r) => {
                let f = Flat::of(p);
                pairing() && is_match_pairing(&f) && strings_balanced(&f, *r)
            }
            MatchP2Circ => {
                let f = Flat::of(p);
                pairing() && is_match_pairing(&f) && strings_balanced(&f, Param::Infinite)
            }
            MatchP2Cosemigroup { residues, modulus } => {
                let f = Flat::of(p);
                pairing()
                    && is_match_pairing(&f)
                    && strings_balanced(&f, Param::Infinite)
                    && crossing_condition(&f, residues, *modulus)
            }
            NCevenAlternating => {
                let f = Flat::of(p);
                even() && nc() && alternating_blocks(&f)
            }
            Diamond(r) => diamond_contains(*r, p),
        }
    }

    /// Whether membership depends on the colors.
    pub fn is_colored(&self) -> bool {
        match self {
            MatchP2 | MatchNC2 | MatchPeven | MatchNCeven | MatchP2String(_) | MatchP2Circ
            | MatchP2Cosemigroup { .. } | NCevenAlternating => true,
            Ps(s) | NCs(s) => !(s.is(1) || s.is(2)),
            P2GlobalMod(r) => !r.is(1),
            _ => false,
        }
    }

    /// Default word for a bare length: alternating for colored specs, white otherwise.
    pub fn default_word(&self, k: usize) -> ColorWord {
        if self.is_colored() {
            ColorWord::alternating(k)
        } else {
            ColorWord::white(k)
        }
    }

    /// Largest block size a member can have, when bounded.
    pub fn max_block_size(&self) -> Option<usize> {
        match self {
            P2 | NC2 | P12 | P12prime | NC12 | NC12prime | MatchP2 | MatchNC2 | P2Star | P2GlobalMod(_)
            | MatchP2String(_) | MatchP2Circ | MatchP2Cosemigroup { .. } => Some(2),
            _ => None,
        }
    }

    /// Members of `D(upper, lower)` in canonical order.
    pub fn enumerate(&self, upper: &ColorWord, lower: &ColorWord) -> Result<Vec<Partition>> {
        self.enumerate_bounded(upper, lower, DEFAULT_BOUND)
    }

    pub fn enumerate_bounded(&self, upper: &ColorWord, lower: &ColorWord, bound: usize) -> Result<Vec<Partition>> {
        if let Diamond(r) = self {
            // warm the generation cache once for this size
            diamond_generated(*r, upper.len() + lower.len());
        }
        enumerate_with(upper, lower, |p| self.contains(p), bound, self.max_block_size())
    }

    /// The one-row basis `D(word)` (empty upper row).
    pub fn basis(&self, word: &ColorWord) -> Result<Vec<Partition>> {
        self.enumerate(&ColorWord::empty(), word)
    }

    /// Subset of `NC` obtained by intersecting with noncrossing partitions.
    pub fn free_version(&self) -> Option<CategorySpec> {
        Some(match self {
            P => NC,
            Peven => NCeven,
            P2 => NC2,
            P12 => NC12,
            P12prime => NC12prime,
            MatchP2 => MatchNC2,
            MatchPeven => MatchNCeven,
            Ps(s) => NCs(*s),
            _ => return None,
        })
    }

    pub fn is_noncrossing_spec(&self) -> bool {
        matches!(self, NC | NCeven | NC2 | NC12 | NC12prime | MatchNC2 | MatchNCeven | NCs(_) | NCevenAlternating)
    }

    /// Block-size description for the uniform specs whose weighted counts are
    /// classical or free compound Poisson.  Evaluated on all-white words.
    pub fn block_law(&self) -> Option<BlockLaw> {
        fn all(_: usize, _: Param) -> bool {
            true
        }
        fn even(n: usize, _: Param) -> bool {
            n % 2 == 0
        }
        fn two(n: usize, _: Param) -> bool {
            n == 2
        }
        fn one_two(n: usize, _: Param) -> bool {
            n <= 2
        }
        fn multiple(n: usize, s: Param) -> bool {
            s.divides(n as i64)
        }
        let inf = Param::Infinite;
        let (free, sizes, param): (bool, fn(usize, Param) -> bool, Param) = match self {
            P => (false, all, inf),
            NC => (true, all, inf),
            Peven => (false, even, inf),
            NCeven => (true, even, inf),
            P2 => (false, two, inf),
            NC2 => (true, two, inf),
            P12 => (false, one_two, inf),
            NC12 => (true, one_two, inf),
            Ps(s) => (false, multiple, *s),
            NCs(s) => (true, multiple, *s),
            _ => return None,
        };
        Some(BlockLaw { free, sizes, param })
    }
}

/// Categories exercised by audits and sweeps.
pub fn shipped() -> Vec<CategorySpec> {
    let f = Param::Finite;
    let inf = Param::Infinite;
    vec![
        P,
        Peven,
        P2,
        P12,
        P12prime,
        NC,
        NCeven,
        NC2,
        NC12,
        NC12prime,
        MatchP2,
        MatchNC2,
        MatchPeven,
        MatchNCeven,
        Ps(f(1)),
        Ps(f(2)),
        Ps(f(3)),
        Ps(f(4)),
        Ps(inf),
        NCs(f(1)),
        NCs(f(2)),
        NCs(f(3)),
        NCs(f(4)),
        NCs(inf),
        PevenStar,
        P2Star,
        P2GlobalMod(f(2)),
        P2GlobalMod(f(3)),
        P2GlobalMod(inf),
        PevenBalanced(f(2)),
        PevenBalanced(f(3)),
        PevenBalanced(f(4)),
        PevenBalanced(inf),
        PevenLocallyBalanced(f(3)),
        PevenLocallyBalanced(f(4)),
        PevenLocallyBalanced(inf),
        PevenInfty,
        MatchP2String(f(2)),
        MatchP2String(f(3)),
        MatchP2Circ,
        MatchP2Cosemigroup { residues: vec![0], modulus: 0 },
        MatchP2Cosemigroup { residues: vec![], modulus: 1 },
        MatchP2Cosemigroup { residues: vec![0], modulus: 1 },
        MatchP2Cosemigroup { residues: vec![1, 2, 3], modulus: 4 },
        NCevenAlternating,
        Diamond(1),
        Diamond(2),
    ]
}

/// All words of the given length, or just the white one for uncolored specs.
pub fn words_for(spec: &CategorySpec, n: usize) -> Vec<ColorWord> {
    if !spec.is_colored() {
        return vec![ColorWord::white(n)];
    }
    (0..1u32 << n)
        .map(|m| {
            ColorWord(
                (0..n)
                    .map(|i| if m & (1 << i) == 0 { Color::White } else { Color::Black })
                    .collect(),
            )
        })
        .collect()
}

/// Every member with at most `max_points` points, over every row split and color word.
pub fn members_upto(spec: &CategorySpec, max_points: usize) -> Result<Vec<Partition>> {
    let mut out = Vec::new();
    for n in 0..=max_points {
        for w in words_for(spec, n) {
            for k in 0..=n {
                let up = ColorWord(w.0[..k].to_vec());
                let lo = ColorWord(w.0[k..].to_vec());
                out.extend(spec.enumerate(&up, &lo)?);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct AuditReport {
    pub spec: String,
    pub max_points: usize,
    pub members: usize,
    pub checks: usize,
    pub passed: bool,
    pub failures: Vec<String>,
}

impl AuditReport {
    fn fail(&mut self, law: &str, witness: String) {
        self.passed = false;
        if !self.failures.iter().any(|f| f.starts_with(law)) {
            self.failures.push(format!("{law}: {witness}"));
        }
    }
}

/// Checks closure under tensor, composition and involution, and the presence of
/// identities and semicircles, on all members up to `max_points` points.
pub fn audit_axioms(spec: &CategorySpec, max_points: usize) -> Result<AuditReport> {
    audit_predicate(&spec.to_string(), spec.is_colored(), max_points, |p| spec.contains(p))
}

/// `audit_axioms` for an arbitrary predicate.
pub fn audit_predicate<F: Fn(&Partition) -> bool>(
    name: &str,
    colored: bool,
    max_points: usize,
    pred: F,
) -> Result<AuditReport> {
    let mut rep = AuditReport { spec: name.to_string(), max_points, passed: true, ..Default::default() };
    let words = |n: usize| -> Vec<ColorWord> {
        if !colored {
            return vec![ColorWord::white(n)];
        }
        (0..1u32 << n)
            .map(|m| ColorWord((0..n).map(|i| if m & (1 << i) == 0 { Color::White } else { Color::Black }).collect()))
            .collect()
    };
    let mut members = Vec::new();
    for n in 0..=max_points {
        for w in words(n) {
            for k in 0..=n {
                let up = ColorWord(w.0[..k].to_vec());
                let lo = ColorWord(w.0[k..].to_vec());
                members.extend(enumerate_with(&up, &lo, &pred, DEFAULT_BOUND, None)?);
            }
        }
    }
    rep.members = members.len();

    for n in 0..=max_points / 2 {
        for w in words(n) {
            rep.checks += 1;
            let id = Partition::identity(&w);
            if !pred(&id) {
                rep.fail("identity", id.to_string());
            }
        }
    }
    if max_points >= 2 {
        let caps: Vec<Partition> = if colored {
            vec![Partition::semicircle(Color::White), Partition::semicircle(Color::Black)]
        } else {
            vec![Partition::from_labels(ColorWord::empty(), ColorWord::white(2), &[0, 0]).unwrap()]
        };
        for c in caps {
            for q in [involute(&c), c] {
                rep.checks += 1;
                if !pred(&q) {
                    rep.fail("semicircle", q.to_string());
                }
            }
        }
    }
    for m in &members {
        rep.checks += 1;
        let inv = involute(m);
        if !pred(&inv) {
            rep.fail("involution", m.to_string());
        }
    }
    for a in &members {
        for b in &members {
            if a.points() + b.points() > max_points {
                continue;
            }
            rep.checks += 1;
            let t = tensor(a, b);
            if !pred(&t) {
                rep.fail("tensor", format!("{a} ⊗ {b}"));
            }
        }
    }
    let mut by_upper: HashMap<&ColorWord, Vec<&Partition>> = HashMap::new();
    for m in &members {
        by_upper.entry(m.upper()).or_default().push(m);
    }
    for top in &members {
        if let Some(bottoms) = by_upper.get(top.lower()) {
            for bottom in bottoms {
                if top.k() + bottom.l() > max_points {
                    continue;
                }
                rep.checks += 1;
                let (c, _) = compose(top, bottom)?;
                if !pred(&c) {
                    rep.fail("composition", format!("{top} then {bottom}"));
                }
            }
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct UniformityReport {
    pub spec: String,
    pub max_points: usize,
    pub uniform: bool,
    pub witness: Option<String>,
}

/// Stability under deleting blocks, on members up to `max_points` points.
pub fn is_uniform(spec: &CategorySpec, max_points: usize) -> Result<UniformityReport> {
    let mut rep = UniformityReport { spec: spec.to_string(), max_points, uniform: true, witness: None };
    for m in members_upto(spec, max_points)? {
        for b in 0..m.num_blocks() {
            let r = m.remove_blocks(&[b]);
            if !spec.contains(&r) {
                rep.uniform = false;
                rep.witness = Some(format!("{m} minus block {b} gives {r}"));
                return Ok(rep);
            }
        }
    }
    Ok(rep)
}

/// Bounded closure of a set of generators.
///
/// Partitions are stored as flat forms up to rotation and reflection.  The `work`
/// bound allows intermediate diagrams slightly larger than `max_points`.
#[derive(Clone, Debug)]
pub struct Generated {
    pub colored: bool,
    pub max_points: usize,
    pub work: usize,
    pub rounds: usize,
    classes: BTreeSet<Partition>,
}

fn recolor_white(p: &Partition) -> Partition {
    p.with_colors(ColorWord::white(p.k()), ColorWord::white(p.l())).unwrap()
}

fn reflect_flat(f: &Partition) -> Partition {
    let n = f.points();
    let lab: Vec<u8> = (0..n).rev().map(|i| f.labels()[i]).collect();
    let col: Vec<Color> = (0..n).rev().map(|i| f.lower().0[i]).collect();
    Partition::from_labels(ColorWord::empty(), ColorWord(col), &lab).unwrap()
}

fn dihedral_class(f: &Partition) -> Partition {
    let n = f.points();
    let mut best = f.clone();
    let r = reflect_flat(f);
    for base in [f, &r] {
        for i in 0..n.max(1) {
            let c = rotate_flat(base, i).unwrap();
            if c < best {
                best = c;
            }
        }
    }
    best
}

fn rotations(f: &Partition) -> Vec<Partition> {
    (0..f.points().max(1)).map(|i| rotate_flat(f, i).unwrap()).collect()
}

fn concat_flat(a: &Partition, b: &Partition) -> Partition {
    tensor(a, b)
}

/// Contract the adjacent flat points `i, i+1 (mod n)`.
fn cap_flat(f: &Partition, i: usize) -> Partition {
    let n = f.points();
    let j = (i + 1) % n;
    let (bi, bj) = (f.labels()[i], f.labels()[j]);
    let mut col = Vec::new();
    let mut lab = Vec::new();
    for p in 0..n {
        if p == i || p == j {
            continue;
        }
        col.push(f.lower().0[p]);
        let b = f.labels()[p];
        lab.push(if b == bj { bi } else { b });
    }
    Partition::from_labels(ColorWord::empty(), ColorWord(col), &lab).unwrap()
}

impl Generated {
    pub fn contains(&self, p: &Partition) -> bool {
        if p.points() > self.max_points {
            return false;
        }
        let f = if self.colored { p.flat() } else { recolor_white(&p.flat()) };
        self.classes.contains(&dihedral_class(&f))
    }

    /// Members with the given rows.
    pub fn members(&self, upper: &ColorWord, lower: &ColorWord) -> Result<Vec<Partition>> {
        enumerate_with(upper, lower, |p| self.contains(p), DEFAULT_BOUND, None)
    }

    /// Number of rotation/reflection classes of flat members.
    pub fn num_classes(&self) -> usize {
        self.classes.iter().filter(|c| c.points() <= self.max_points).count()
    }
}

/// Bounded saturation of `generators` under tensor, composition (as capping),
/// involution and rotation, together with identities and semicircles.
pub fn generate(generators: &[Partition], max_points: usize, max_rounds: usize, colored: bool) -> Generated {
    generate_with_work(generators, max_points, max_points + 2, max_rounds, colored)
}

pub fn generate_with_work(
    generators: &[Partition],
    max_points: usize,
    work: usize,
    max_rounds: usize,
    colored: bool,
) -> Generated {
    let work = work.max(max_points);
    let mut classes: BTreeSet<Partition> = BTreeSet::new();
    let prep = |p: &Partition| -> Partition {
        let f = p.flat();
        if colored {
            f
        } else {
            recolor_white(&f)
        }
    };
    classes.insert(Partition::empty());
    if colored {
        classes.insert(dihedral_class(&Partition::semicircle(Color::White)));
    } else {
        classes.insert(dihedral_class(&recolor_white(&Partition::semicircle(Color::White))));
    }
    for g in generators {
        if g.points() <= work {
            classes.insert(dihedral_class(&prep(g)));
        }
    }
    let mut rounds = 0;
    while rounds < max_rounds {
        rounds += 1;
        let current: Vec<Partition> = classes.iter().cloned().collect();
        let mut fresh: Vec<Partition> = Vec::new();
        for f in &current {
            let n = f.points();
            if n >= 2 {
                for i in 0..n {
                    let j = (i + 1) % n;
                    if colored && f.lower().0[i] == f.lower().0[j] {
                        continue;
                    }
                    fresh.push(cap_flat(f, i));
                }
            }
        }
        for a in &current {
            for b in &current {
                if a.points() == 0 || b.points() == 0 || a.points() + b.points() > work || a > b {
                    continue;
                }
                for ra in rotations(a) {
                    fresh.push(concat_flat(&ra, b));
                }
            }
        }
        let before = classes.len();
        for f in fresh {
            classes.insert(dihedral_class(&f));
        }
        if classes.len() == before {
            break;
        }
    }
    Generated { colored, max_points, work, rounds, classes }
}

/// The diamond generator `ker(1..r r..1 / 1..r r..1)` in P(2r, 2r).
pub fn diamond_generator(r: u32) -> Partition {
    let r = r as usize;
    let row: Vec<usize> = (0..r).chain((0..r).rev()).collect();
    let lab: Vec<usize> = row.iter().chain(row.iter()).copied().collect();
    Partition::from_labels(ColorWord::white(2 * r), ColorWord::white(2 * r), &lab).unwrap()
}

type DiamondCache = Mutex<HashMap<(u32, usize), Arc<Generated>>>;

fn diamond_cache() -> &'static DiamondCache {
    static CACHE: OnceLock<DiamondCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Bound used when deciding diamond membership for partitions of `n` points.
fn diamond_bound(r: u32, n: usize) -> usize {
    let b = n.max(4 * r as usize);
    b + (b % 2)
}

fn diamond_generated(r: u32, n: usize) -> Arc<Generated> {
    let b = diamond_bound(r, n.max(6));
    let key = (r, b);
    if let Some(g) = diamond_cache().lock().unwrap().get(&key) {
        return g.clone();
    }
    let g = Arc::new(generate(&[diamond_generator(r)], b, usize::MAX, false));
    diamond_cache().lock().unwrap().insert(key, g.clone());
    g
}

fn diamond_contains(r: u32, p: &Partition) -> bool {
    diamond_generated(r, p.points()).contains(p)
}

/// Whether every block of `a` is a union of blocks of `b` (used by tests).
pub fn coarsens(a: &Partition, b: &Partition) -> bool {
    leq_labels(b.labels(), a.labels())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unc(k: usize, l: usize, blocks: &[&[usize]]) -> Partition {
        let b: Vec<Vec<usize>> = blocks.iter().map(|x| x.to_vec()).collect();
        Partition::uncolored(k, l, &b).unwrap()
    }

    #[test]
    fn parse_round_trip() {
        for s in shipped() {
            let t: CategorySpec = s.to_string().parse().unwrap();
            assert_eq!(t, s);
        }
        assert_eq!("ncs:4".parse::<CategorySpec>().unwrap(), NCs(Param::Finite(4)));
        assert_eq!("p2r:3".parse::<CategorySpec>().unwrap(), P2GlobalMod(Param::Finite(3)));
        assert_eq!(
            "p2c:0/4".parse::<CategorySpec>().unwrap(),
            MatchP2Cosemigroup { residues: vec![0], modulus: 4 }
        );
        assert!("bogus".parse::<CategorySpec>().is_err());
    }

    #[test]
    fn contains_examples() {
        let semi = Partition::semicircle(Color::White);
        assert!(MatchNC2.contains(&semi));
        let cross = unc(0, 4, &[&[0, 2], &[1, 3]]);
        assert!(!PevenInfty.contains(&cross));
        let one = unc(0, 4, &[&[0, 1, 2, 3]]);
        assert!(Ps(Param::Finite(2)).contains(&one));
    }

    #[test]
    fn basis_sizes() {
        let w = ColorWord::alternating(4);
        assert_eq!(MatchNC2.basis(&w).unwrap().len(), 2);
        assert_eq!(NC2.basis(&ColorWord::white(6)).unwrap().len(), 5);
        assert_eq!(P2.basis(&ColorWord::white(6)).unwrap().len(), 15);
        assert_eq!(P12.basis(&ColorWord::white(2)).unwrap().len(), 2);
    }

    #[test]
    fn half_liberation_not_uniform() {
        assert!(!is_uniform(&PevenStar, 6).unwrap().uniform);
        assert!(is_uniform(&P12, 5).unwrap().uniform);
        assert!(is_uniform(&NC, 5).unwrap().uniform);
    }

    #[test]
    fn audit_small() {
        assert!(audit_axioms(&P2, 4).unwrap().passed);
        assert!(audit_axioms(&NC, 4).unwrap().passed);
        let bad = audit_predicate("two-blocks", false, 4, |p| p.num_blocks() == 2).unwrap();
        assert!(!bad.passed);
        assert!(bad.failures.iter().any(|f| f.starts_with("tensor")));
    }

    #[test]
    fn generation_examples() {
        let cross = Partition::crossing(Color::White, Color::White);
        let g = generate(&[cross], 4, 10, false);
        for n in [2usize, 4] {
            for k in 0..=n {
                let d = P2.enumerate(&ColorWord::white(k), &ColorWord::white(n - k)).unwrap();
                for p in d {
                    assert!(g.contains(&p), "{p}");
                }
            }
        }
        let g = generate(&[], 4, 10, false);
        for p in members_upto(&P, 4).unwrap() {
            assert_eq!(g.contains(&p), NC2.contains(&p), "{p}");
        }
        let fork = unc(2, 1, &[&[0, 1, 2]]);
        let g = generate(&[fork], 4, 10, false);
        for p in members_upto(&P, 4).unwrap() {
            assert_eq!(g.contains(&p), NC.contains(&p), "{p}");
        }
    }
}
