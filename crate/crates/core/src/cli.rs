//! The `easyqg` command line.
//!
//! Output is JSON lines: a metadata line echoing the effective configuration,
//! then one line per result. Exact rationals are printed as `"p/q"` strings.
//! Exit codes: 0 on success, 1 on a domain error, 2 on a usage error; errors
//! are printed as a one-line `{"error": {...}}` object.

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use crate::categories::{self, CategorySpec};
use crate::freeprob::{self, CumulantSeq, Flavor, LawSpec, MomentSeq};
use crate::fusion::{self, Label, Ring};
use crate::haarmc::{self, GroupSampler};
use crate::linalg::{fmt_q, parse_q};
use crate::linmap;
use crate::partitions::{self, ColorWord, Direction, Partition};
use crate::weingarten::{self, DetFormula};
use crate::{Error, Result, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug, Serialize)]
#[command(name = "easyqg", version, about = "Exact partition combinatorics for easy quantum groups")]
pub struct Cli {
    /// Largest number of points any enumeration may visit
    #[arg(long, global = true, default_value_t = partitions::DEFAULT_BOUND)]
    pub bound: usize,
    /// Output format; csv is available for list-shaped results
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for Monte Carlo subcommands
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Width of rational enclosures, as p/q or decimal
    #[arg(long, global = true, default_value = "1/1000000000000")]
    pub precision: String,
    /// Worker threads (0: rayon default)
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Print JSON schemas of the main output objects and exit
    #[arg(long)]
    pub schema: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Partition enumeration and diagram calculus
    Partitions(PartitionsArgs),
    /// Named categories: list, basis, audit, uniformity, generation
    Category(CategoryArgs),
    /// Gram matrix G(π,σ) = N^{|π∨σ|}
    Gram(MatrixArgs),
    /// Weingarten matrix, the inverse Gram matrix
    Weingarten(MatrixArgs),
    /// Haar integral of a monomial in the coordinates
    Integrate(IntegrateArgs),
    /// Gram determinant, optionally against a closed formula
    Gramdet(GramdetArgs),
    /// Moments from cumulants
    Moments(SeqArgs),
    /// Cumulants from moments
    Cumulants(SeqArgs),
    /// Moments and cumulants of a named law
    LawMoments(LawArgs),
    /// Bercovici-Pata check for a classical/free pair of categories
    BpCheck(BpArgs),
    /// Fusion rings of free quantum groups
    Fusion(FusionArgs),
    /// Monte Carlo over classical groups
    Mc(McArgs),
    /// Signed (twisted) maps
    Twist(TwistArgs),
    /// Weingarten path expansion and large-N estimates
    WgExpand(WgArgs),
    /// Quick invariant suite with a pass/fail table
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PartOp {
    Enum,
    Count,
    Compose,
    Tensor,
    Involute,
    Rotate,
    Flat,
    Join,
    Leq,
    Mobius,
    Distance,
    Signature,
    Fatten,
    Shrink,
    Noncrossing,
}

#[derive(Args, Debug, Serialize)]
pub struct PartitionsArgs {
    #[arg(value_enum)]
    pub op: PartOp,
    /// Upper color word for enum/count
    #[arg(long, default_value = "")]
    pub upper: String,
    /// Lower color word for enum/count
    #[arg(long, default_value = "")]
    pub lower: String,
    /// Category restricting enum/count
    #[arg(long, default_value = "p")]
    pub cat: String,
    /// First partition, as [up/lo]{..}{..}
    #[arg(long)]
    pub a: Option<String>,
    /// Second partition
    #[arg(long)]
    pub b: Option<String>,
    /// Rotation direction: left, right, right-down, right-up
    #[arg(long, default_value = "left")]
    pub dir: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CatOp {
    List,
    Basis,
    Audit,
    Uniform,
    Generate,
}

#[derive(Args, Debug, Serialize)]
pub struct CategoryArgs {
    #[arg(value_enum)]
    pub op: CatOp,
    #[arg(long, default_value = "p")]
    pub cat: String,
    /// Color word; defaults to the category's standard word on --k points
    #[arg(long)]
    pub word: Option<String>,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 4)]
    pub max_points: usize,
    /// Generators for `generate`
    #[arg(long = "gen")]
    pub generators: Vec<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct MatrixArgs {
    #[arg(long)]
    pub cat: String,
    #[arg(long)]
    pub word: Option<String>,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long = "N")]
    pub n: u64,
    /// Weingarten only: pseudo-inverse on the independent columns when singular
    #[arg(long)]
    pub quasi: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct IntegrateArgs {
    #[arg(long)]
    pub cat: String,
    #[arg(long)]
    pub word: Option<String>,
    /// Row indices, 1-based, comma separated
    #[arg(long)]
    pub i: String,
    /// Column indices
    #[arg(long)]
    pub j: String,
    #[arg(long = "N")]
    pub n: u64,
    /// Also compute the S_N integral by permutation counting
    #[arg(long)]
    pub sn_check: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct GramdetArgs {
    #[arg(long)]
    pub cat: String,
    /// Number of points
    #[arg(long)]
    pub k: usize,
    #[arg(long = "N")]
    pub n: u64,
    /// Closed formula: lindstrom, on, onplus, snplus, bn, bnplus
    #[arg(long)]
    pub check: Option<String>,
    /// Category indexing the exponent a_k
    #[arg(long)]
    pub ak_set: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct SeqArgs {
    /// Comma separated sequence starting at order 1
    #[arg(long)]
    pub values: String,
    #[arg(long, default_value = "classical")]
    pub flavor: String,
}

#[derive(Args, Debug, Serialize)]
pub struct LawArgs {
    /// e.g. poisson:t=1, bessel:s=2,t=1/2, cat:t=1:peven, shifted:t=1:semicircle:t=1
    #[arg(long)]
    pub law: String,
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    /// Also print cumulants of this flavor
    #[arg(long)]
    pub flavor: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct BpArgs {
    #[arg(long)]
    pub classical: Option<String>,
    #[arg(long)]
    pub free: Option<String>,
    #[arg(long, default_value = "1")]
    pub t: String,
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    /// Run every standard pair at t ∈ {1/2, 1, 2}
    #[arg(long)]
    pub all: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FusionOp {
    Fuse,
    Power,
    Dims,
    Conjugate,
}

#[derive(Args, Debug, Serialize)]
pub struct FusionArgs {
    /// on+, un+, hs+:<s>
    #[arg(long)]
    pub ring: String,
    #[arg(long, value_enum, default_value_t = FusionOp::Fuse)]
    pub op: FusionOp,
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub b: Option<String>,
    /// Power of the fundamental label
    #[arg(long)]
    pub k: Option<usize>,
    /// Tensor word: un+ color word, hs+ comma separated residues
    #[arg(long)]
    pub word: Option<String>,
    #[arg(long = "N")]
    pub n: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
pub struct McArgs {
    /// sn, hn, hsn:<s>, kn, bn, on, un
    #[arg(long, default_value = "sn")]
    pub group: String,
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long, default_value = "1")]
    pub t: String,
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    /// Estimate the rate of fixed-point-free permutations instead
    #[arg(long)]
    pub derangement: bool,
    /// Skip the exact finite-N comparison
    #[arg(long)]
    pub no_exact: bool,
    /// Overrides --format
    #[arg(long, value_enum)]
    pub out: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TwistOp {
    Signature,
    Operator,
    Expansion,
    Gram,
}

#[derive(Args, Debug, Serialize)]
pub struct TwistArgs {
    #[arg(long, value_enum, default_value_t = TwistOp::Signature)]
    pub op: TwistOp,
    /// Partition for signature/operator/expansion
    #[arg(long)]
    pub p: Option<String>,
    /// Category and points for the Gram comparison
    #[arg(long, default_value = "peven")]
    pub cat: String,
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    #[arg(long = "N", default_value_t = 2)]
    pub n: u32,
}

#[derive(Args, Debug, Serialize)]
pub struct WgArgs {
    #[arg(long, default_value = "p")]
    pub cat: String,
    #[arg(long)]
    pub word: Option<String>,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long)]
    pub pi: String,
    #[arg(long)]
    pub sigma: String,
    #[arg(long, default_value_t = 2)]
    pub g_max: usize,
    /// Comma separated N values for the estimate check
    #[arg(long)]
    pub ns: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct SelftestArgs {
    /// Run only checks whose name contains this string
    #[arg(long)]
    pub only: Option<String>,
}

struct Sink<'a> {
    w: &'a mut dyn Write,
}

impl Sink<'_> {
    fn line(&mut self, v: &Value) -> Result<()> {
        writeln!(self.w, "{v}").map_err(|e| Error::InvalidArgument(format!("write failed: {e}")))
    }

    fn raw(&mut self, s: &str) -> Result<()> {
        write!(self.w, "{s}").map_err(|e| Error::InvalidArgument(format!("write failed: {e}")))
    }
}

fn parse_indices(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<u32>().map_err(|_| Error::Parse(format!("bad index '{x}'"))))
        .collect()
}

fn parse_qs(s: &str) -> Result<Vec<Q>> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(parse_q).collect()
}

fn qs(v: &[Q]) -> Value {
    json!(freeprob::to_strings(v))
}

fn word_for(spec: &CategorySpec, word: &Option<String>, k: usize) -> Result<ColorWord> {
    match word {
        Some(w) => w.parse(),
        None => Ok(spec.default_word(k)),
    }
}

fn need<'a>(x: &'a Option<String>, name: &str) -> Result<&'a str> {
    x.as_deref().ok_or_else(|| Error::Parse(format!("--{name} is required")))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

/// JSON schemas of `Partition`, `PartitionMatrix`, `FusionElement` and `EmpiricalMoments`.
pub fn schemas() -> Value {
    let rational = json!({"type": "string", "pattern": "^-?[0-9]+/[0-9]+$"});
    let partition = json!({
        "type": "object",
        "required": ["upper", "lower", "blocks"],
        "properties": {
            "upper": {"type": "string", "pattern": "^[ob]*$"},
            "lower": {"type": "string", "pattern": "^[ob]*$"},
            "blocks": {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0}}}
        }
    });
    json!({
        "Partition": partition,
        "PartitionMatrix": {
            "type": "object",
            "required": ["basis", "rows"],
            "properties": {
                "basis": {"type": "array", "items": partition},
                "rows": {"type": "array", "items": {"type": "array", "items": rational}}
            }
        },
        "FusionElement": {
            "type": "object",
            "required": ["ring", "terms"],
            "properties": {
                "ring": {"type": "string"},
                "terms": {"type": "array", "items": {
                    "type": "array", "prefixItems": [{"type": "string"}, {"type": "integer", "minimum": 1}]
                }}
            }
        },
        "EmpiricalMoments": {
            "type": "object",
            "required": ["group", "n", "seed", "rng", "t", "s", "k_max", "n_samples", "rows"],
            "properties": {
                "group": {"type": "string"},
                "n": {"type": "integer"},
                "seed": {"type": "integer"},
                "rng": {"type": "string"},
                "t": rational,
                "s": {"type": "integer"},
                "k_max": {"type": "integer"},
                "n_samples": {"type": "integer"},
                "rows": {"type": "array", "items": {
                    "type": "object",
                    "required": ["word", "k", "estimate", "estimate_im", "std_error", "std_error_im"],
                    "properties": {
                        "word": {"type": "string"},
                        "k": {"type": "integer"},
                        "estimate": {"type": "number"},
                        "estimate_im": {"type": "number"},
                        "std_error": {"type": "number"},
                        "std_error_im": {"type": "number"},
                        "exact": {"type": ["string", "null"]},
                        "exact_f64": {"type": ["number", "null"]},
                        "asymptotic": {"type": ["string", "null"]},
                        "z": {"type": ["number", "null"]}
                    }
                }}
            }
        }
    })
}

fn error_value(kind: &str, msg: &str) -> Value {
    json!({"error": {"kind": kind, "message": msg}})
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            let _ = writeln!(out, "{}", error_value("Usage", first));
            return 2;
        }
    };
    let mut sink = Sink { w: out };
    if cli.schema {
        return match sink.line(&schemas()) {
            Ok(()) => 0,
            Err(_) => 1,
        };
    }
    let Some(cmd) = &cli.command else {
        let _ = sink.line(&error_value("Usage", "a subcommand is required (see --help)"));
        return 2;
    };
    if cli.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    match dispatch(&cli, cmd, &mut sink) {
        Ok(code) => code,
        Err(e) => {
            let _ = sink.line(&error_value(e.kind(), &e.to_string()));
            if matches!(e, Error::Parse(_)) {
                2
            } else {
                1
            }
        }
    }
}

fn meta(cli: &Cli, fmt: Format) -> Value {
    json!({"meta": {
        "tool": "easyqg",
        "version": env!("CARGO_PKG_VERSION"),
        "config": to_value(cli),
        "format": fmt,
        "rng": haarmc::RNG_NAME,
    }})
}

fn header(cli: &Cli, sink: &mut Sink, fmt: Format) -> Result<()> {
    match fmt {
        Format::Json => sink.line(&meta(cli, fmt)),
        Format::Csv => sink.raw(&format!("# {}\n", meta(cli, fmt))),
    }
}

fn no_csv(fmt: Format, what: &str) -> Result<()> {
    if fmt == Format::Csv {
        return Err(Error::Unsupported(format!("csv output for {what}")));
    }
    Ok(())
}

fn dispatch(cli: &Cli, cmd: &Command, sink: &mut Sink) -> Result<i32> {
    let fmt = match cmd {
        Command::Mc(a) => a.out.unwrap_or(cli.format),
        _ => cli.format,
    };
    match cmd {
        Command::Partitions(a) => {
            if !matches!(a.op, PartOp::Enum) {
                no_csv(fmt, "this operation")?;
            }
            header(cli, sink, fmt)?;
            run_partitions(cli, a, sink, fmt)
        }
        Command::Category(a) => {
            no_csv(fmt, "category")?;
            header(cli, sink, fmt)?;
            run_category(cli, a, sink)
        }
        Command::Gram(a) | Command::Weingarten(a) => {
            no_csv(fmt, "matrices")?;
            header(cli, sink, fmt)?;
            let spec: CategorySpec = a.cat.parse()?;
            let w = word_for(&spec, &a.word, a.k)?;
            let m = match cmd {
                Command::Gram(_) => weingarten::gram(&spec, &w, a.n)?,
                _ if a.quasi => weingarten::weingarten_quasi(&spec, &w, a.n)?,
                _ => weingarten::weingarten(&spec, &w, a.n)?,
            };
            sink.line(&m.to_json())?;
            Ok(0)
        }
        Command::Integrate(a) => {
            no_csv(fmt, "integrate")?;
            header(cli, sink, fmt)?;
            let spec: CategorySpec = a.cat.parse()?;
            let i = parse_indices(&a.i)?;
            let j = parse_indices(&a.j)?;
            let w = word_for(&spec, &a.word, i.len())?;
            let v = weingarten::integrate(&spec, &w, &i, &j, a.n)?;
            let mut o = json!({"cat": spec.to_string(), "word": w.to_string(), "value": fmt_q(&v)});
            if a.sn_check {
                let s = weingarten::sn_integral(&i, &j, a.n)?;
                o["sn_integral"] = json!(fmt_q(&s));
                o["equal"] = json!(s == v);
            }
            sink.line(&o)?;
            Ok(0)
        }
        Command::Gramdet(a) => {
            no_csv(fmt, "gramdet")?;
            header(cli, sink, fmt)?;
            let spec: CategorySpec = a.cat.parse()?;
            let w = spec.default_word(a.k);
            let g = weingarten::gram_det(&spec, &w, a.n)?;
            let mut o = json!({"cat": spec.to_string(), "k": a.k, "N": a.n, "gram_det": g.to_string()});
            if let Some(id) = &a.check {
                let id: DetFormula = id.parse().map_err(|e: Error| Error::Parse(e.to_string()))?;
                let set = a.ak_set.as_deref().map(str::parse::<CategorySpec>).transpose()?;
                let f = weingarten::det_formula_with(id, a.k, a.n, set.as_ref())?;
                o["formula"] = json!(id.to_string());
                o["value"] = json!(fmt_q(&f));
                o["equal"] = json!(f == Q::from_integer(g));
            }
            sink.line(&o)?;
            Ok(0)
        }
        Command::Moments(a) | Command::Cumulants(a) => {
            header(cli, sink, fmt)?;
            let flavor: Flavor = a.flavor.parse()?;
            let v = parse_qs(&a.values)?;
            let res = match cmd {
                Command::Moments(_) => freeprob::cumulants_to_moments(&CumulantSeq { values: v, flavor }).values,
                _ => freeprob::moments_to_cumulants(&MomentSeq { values: v }, flavor).values,
            };
            let name = if matches!(cmd, Command::Moments(_)) { "moments" } else { "cumulants" };
            emit_seq(sink, fmt, name, &flavor.to_string(), &res)?;
            Ok(0)
        }
        Command::LawMoments(a) => {
            header(cli, sink, fmt)?;
            let law: LawSpec = a.law.parse()?;
            let m = freeprob::law_moments(&law, a.n)?;
            emit_seq(sink, fmt, "moments", &law.to_string(), &m.values)?;
            if let Some(f) = &a.flavor {
                let fl: Flavor = f.parse()?;
                let c = freeprob::law_cumulants(&law, a.n, fl)?;
                emit_seq(sink, fmt, &format!("{fl}_cumulants"), &law.to_string(), &c.values)?;
            }
            Ok(0)
        }
        Command::BpCheck(a) => {
            no_csv(fmt, "bp-check")?;
            header(cli, sink, fmt)?;
            run_bp(a, sink)
        }
        Command::Fusion(a) => {
            no_csv(fmt, "fusion")?;
            header(cli, sink, fmt)?;
            run_fusion(a, sink)
        }
        Command::Mc(a) => {
            header(cli, sink, fmt)?;
            run_mc(cli, a, sink, fmt)
        }
        Command::Twist(a) => {
            no_csv(fmt, "twist")?;
            header(cli, sink, fmt)?;
            run_twist(a, sink)
        }
        Command::WgExpand(a) => {
            no_csv(fmt, "wg-expand")?;
            header(cli, sink, fmt)?;
            let spec: CategorySpec = a.cat.parse()?;
            let w = word_for(&spec, &a.word, a.k)?;
            let pi: Partition = a.pi.parse()?;
            let sigma: Partition = a.sigma.parse()?;
            let k = weingarten::weingarten_expansion(&spec, &w, &pi, &sigma, a.g_max)?;
            let mut o = json!({"pi": pi, "sigma": sigma, "K": k});
            if partitions::leq(&pi, &sigma)? {
                let basis = spec.basis(&w)?;
                o["mobius"] = json!(partitions::mobius_in(&basis, &pi, &sigma)?);
            }
            sink.line(&o)?;
            if let Some(ns) = &a.ns {
                let ns: Vec<u64> = parse_indices(ns)?.into_iter().map(u64::from).collect();
                let rep = weingarten::weingarten_estimate_check(&spec, &w, &pi, &sigma, &ns)?;
                sink.line(&to_value(&rep))?;
            }
            Ok(0)
        }
        Command::Selftest(a) => {
            no_csv(fmt, "selftest")?;
            header(cli, sink, fmt)?;
            run_selftest(a, sink)
        }
    }
}

fn emit_seq(sink: &mut Sink, fmt: Format, name: &str, label: &str, v: &[Q]) -> Result<()> {
    match fmt {
        Format::Json => sink.line(&json!({"kind": name, "of": label, "values": qs(v)})),
        Format::Csv => {
            let mut s = format!("kind,of,n,value\n");
            for (i, x) in v.iter().enumerate() {
                s += &format!("{name},{label},{},{}\n", i + 1, fmt_q(x));
            }
            sink.raw(&s)
        }
    }
}

fn parse_dir(s: &str) -> Result<Direction> {
    Ok(match s {
        "left" => Direction::Left,
        "right" => Direction::Right,
        "right-down" => Direction::RightDown,
        "right-up" => Direction::RightUp,
        o => return Err(Error::Parse(format!("unknown direction '{o}'"))),
    })
}

fn run_partitions(cli: &Cli, a: &PartitionsArgs, sink: &mut Sink, fmt: Format) -> Result<i32> {
    let pa = || -> Result<Partition> { need(&a.a, "a")?.parse() };
    let pb = || -> Result<Partition> { need(&a.b, "b")?.parse() };
    let v = match a.op {
        PartOp::Enum | PartOp::Count => {
            let spec: CategorySpec = a.cat.parse()?;
            let up: ColorWord = a.upper.parse()?;
            let lo: ColorWord = a.lower.parse()?;
            let all = spec.enumerate_bounded(&up, &lo, cli.bound)?;
            if a.op == PartOp::Count {
                json!({"cat": spec.to_string(), "upper": up.to_string(), "lower": lo.to_string(), "count": all.len()})
            } else {
                if fmt == Format::Csv {
                    let mut s = String::from("index,partition\n");
                    for (i, p) in all.iter().enumerate() {
                        s += &format!("{i},{p}\n");
                    }
                    sink.raw(&s)?;
                } else {
                    for p in &all {
                        sink.line(&to_value(p))?;
                    }
                }
                return Ok(0);
            }
        }
        PartOp::Compose => {
            let (c, loops) = partitions::compose(&pa()?, &pb()?)?;
            json!({"result": c, "display": c.to_string(), "loops": loops})
        }
        PartOp::Tensor => {
            let c = partitions::tensor(&pa()?, &pb()?);
            json!({"result": c, "display": c.to_string()})
        }
        PartOp::Involute => {
            let c = partitions::involute(&pa()?);
            json!({"result": c, "display": c.to_string()})
        }
        PartOp::Rotate => {
            let c = partitions::rotate(&pa()?, parse_dir(&a.dir)?)?;
            json!({"result": c, "display": c.to_string()})
        }
        PartOp::Flat => {
            let c = pa()?.flat();
            json!({"result": c, "display": c.to_string()})
        }
        PartOp::Join => {
            let c = partitions::join(&pa()?, &pb()?)?;
            json!({"result": c, "display": c.to_string()})
        }
        PartOp::Leq => json!({"leq": partitions::leq(&pa()?, &pb()?)?}),
        PartOp::Mobius => json!({"mobius": partitions::mobius(&pa()?, &pb()?)?}),
        PartOp::Distance => json!({"distance": fmt_q(&partitions::distance(&pa()?, &pb()?)?)}),
        PartOp::Signature => json!({"signature": partitions::signature(&pa()?)?}),
        PartOp::Fatten => {
            let c = partitions::fatten(&pa()?)?;
            json!({"result": c, "display": c.to_string()})
        }
        PartOp::Shrink => {
            let c = partitions::shrink(&pa()?)?;
            json!({"result": c, "display": c.to_string()})
        }
        PartOp::Noncrossing => json!({"noncrossing": partitions::is_noncrossing(&pa()?)}),
    };
    sink.line(&v)?;
    Ok(0)
}

fn run_category(cli: &Cli, a: &CategoryArgs, sink: &mut Sink) -> Result<i32> {
    match a.op {
        CatOp::List => {
            for s in categories::shipped() {
                sink.line(&json!({
                    "cat": s.to_string(),
                    "colored": s.is_colored(),
                    "free_version": s.free_version().map(|f| f.to_string()),
                }))?;
            }
        }
        CatOp::Basis => {
            let spec: CategorySpec = a.cat.parse()?;
            let w = word_for(&spec, &a.word, a.k)?;
            let b = spec.enumerate_bounded(&ColorWord::empty(), &w, cli.bound)?;
            sink.line(&json!({"cat": spec.to_string(), "word": w.to_string(), "size": b.len()}))?;
            for p in &b {
                sink.line(&to_value(p))?;
            }
        }
        CatOp::Audit => {
            let spec: CategorySpec = a.cat.parse()?;
            let r = categories::audit_axioms(&spec, a.max_points)?;
            sink.line(&to_value(&r))?;
            return Ok(if r.passed { 0 } else { 1 });
        }
        CatOp::Uniform => {
            let spec: CategorySpec = a.cat.parse()?;
            sink.line(&to_value(&categories::is_uniform(&spec, a.max_points)?))?;
        }
        CatOp::Generate => {
            let gens: Vec<Partition> = a.generators.iter().map(|g| g.parse()).collect::<Result<_>>()?;
            if gens.is_empty() {
                return Err(Error::Parse("--gen is required at least once".into()));
            }
            let colored = gens.iter().any(|g| g.upper().letters().iter().chain(g.lower().letters()).any(|c| *c == partitions::Color::Black));
            let g = categories::generate(&gens, a.max_points, 8, colored);
            let w = match &a.word {
                Some(w) => w.parse()?,
                None => ColorWord::white(a.k),
            };
            let m = g.members(&ColorWord::empty(), &w)?;
            sink.line(&json!({"classes": g.num_classes(), "rounds": g.rounds, "word": w.to_string(), "members": m.len()}))?;
            for p in &m {
                sink.line(&to_value(p))?;
            }
        }
    }
    Ok(0)
}

/// Classical/free pairs checked by `bp-check --all`.
pub fn standard_bp_pairs() -> Vec<(CategorySpec, CategorySpec)> {
    use categories::Param::Finite;
    let mut v = vec![
        (CategorySpec::P, CategorySpec::NC),
        (CategorySpec::Peven, CategorySpec::NCeven),
        (CategorySpec::P2, CategorySpec::NC2),
        (CategorySpec::P12, CategorySpec::NC12),
    ];
    for s in 1..=4 {
        v.push((CategorySpec::Ps(Finite(s)), CategorySpec::NCs(Finite(s))));
    }
    v
}

fn run_bp(a: &BpArgs, sink: &mut Sink) -> Result<i32> {
    let mut cases = Vec::new();
    if a.all {
        for (c, f) in standard_bp_pairs() {
            for t in ["1/2", "1", "2"] {
                cases.push((c.clone(), f.clone(), parse_q(t)?));
            }
        }
    } else {
        let c: CategorySpec = need(&a.classical, "classical")?.parse()?;
        let f: CategorySpec = match &a.free {
            Some(f) => f.parse()?,
            None => c.free_version().ok_or_else(|| Error::InvalidArgument(format!("{c} has no free version")))?,
        };
        cases.push((c, f, parse_q(&a.t)?));
    }
    let mut ok = true;
    for (c, f, t) in cases {
        let r = freeprob::bp_check(&c, &f, &t, a.n)?;
        ok &= r.passed;
        sink.line(&to_value(&r))?;
    }
    Ok(if ok { 0 } else { 1 })
}

fn tensor_word(ring: Ring, s: &str) -> Result<Vec<i64>> {
    match ring {
        Ring::HsPlus(_) => Ok(s
            .trim_matches(|c| c == '(' || c == ')')
            .split(',')
            .map(str::trim)
            .filter(|x| !x.is_empty())
            .map(|x| x.parse::<i64>().map_err(|_| Error::Parse(format!("bad letter '{x}'"))))
            .collect::<Result<_>>()?),
        _ => Ok(fusion::color_letters(&s.parse()?)),
    }
}

fn run_fusion(a: &FusionArgs, sink: &mut Sink) -> Result<i32> {
    let ring: Ring = a.ring.parse()?;
    let label = |s: &Option<String>, n: &str| -> Result<Label> { ring.parse_label(need(s, n)?) };
    match a.op {
        FusionOp::Fuse => {
            let e = ring.fuse(&label(&a.a, "a")?, &label(&a.b, "b")?)?;
            sink.line(&json!({"element": e, "display": e.to_string()}))?;
        }
        FusionOp::Conjugate => {
            let l = label(&a.a, "a")?;
            sink.line(&json!({"label": ring.show(&l), "conjugate": ring.show(&ring.conjugate(&l))}))?;
        }
        FusionOp::Power => {
            let e = match (&a.word, a.k) {
                (Some(w), _) => fusion::decompose_word(ring, &tensor_word(ring, w)?)?,
                (None, Some(k)) => fusion::decompose_power(ring, k)?,
                _ => return Err(Error::Parse("--k or --word is required".into())),
            };
            let mut o = json!({"element": e, "trivial_multiplicity": e.trivial_multiplicity()});
            if let Some(n) = a.n {
                o["dimension"] = json!(e.dimension(n)?.to_string());
            }
            sink.line(&o)?;
        }
        FusionOp::Dims => {
            let n = a.n.ok_or_else(|| Error::Parse("--N is required".into()))?;
            if a.a.is_some() {
                let l = label(&a.a, "a")?;
                sink.line(&json!({"label": ring.show(&l), "N": n, "dim": fusion::dim(ring, &l, n)?.to_string()}))?;
            } else {
                let k = a.k.ok_or_else(|| Error::Parse("--a or --k is required".into()))?;
                let e = fusion::decompose_power(ring, k)?;
                let d = e.dimension(n)?;
                let want = num_traits::pow(BigInt::from(n), k);
                sink.line(&json!({"k": k, "N": n, "sum": d.to_string(), "N^k": want.to_string(), "equal": d == want}))?;
            }
        }
    }
    Ok(0)
}

fn run_mc(cli: &Cli, a: &McArgs, sink: &mut Sink, fmt: Format) -> Result<i32> {
    if a.derangement {
        let d = haarmc::derangement_rate(a.n, a.samples, cli.seed)?;
        match fmt {
            Format::Json => sink.line(&to_value(&d))?,
            Format::Csv => sink.raw(&format!(
                "N,estimate,std_error,exact,z\n{},{:.10},{:.10},{:.10},{:.4}\n",
                d.n, d.estimate, d.std_error, d.exact_f64, d.z
            ))?,
        }
        return Ok(0);
    }
    let sampler = GroupSampler::new(a.group.parse()?, a.n, cli.seed)?;
    let t = parse_q(&a.t)?;
    let rep = if a.no_exact {
        haarmc::empirical_moments(&sampler, &t, a.k, a.samples)?
    } else {
        haarmc::compare_exact(&sampler, &t, a.k, a.samples)?
    };
    match fmt {
        Format::Json => sink.line(&to_value(&rep))?,
        Format::Csv => sink.raw(&haarmc::to_csv(&rep))?,
    }
    Ok(0)
}

fn run_twist(a: &TwistArgs, sink: &mut Sink) -> Result<i32> {
    let p = || -> Result<Partition> { need(&a.p, "p")?.parse() };
    match a.op {
        TwistOp::Signature => sink.line(&json!({"signature": partitions::signature(&p()?)?}))?,
        TwistOp::Operator => {
            let t = linmap::tpi_twisted(&p()?, a.n)?;
            sink.line(&json!({"N": a.n, "entries": t.to_json()}))?;
        }
        TwistOp::Expansion => {
            let q = p()?;
            let coefs: Vec<Value> = linmap::mobius_coefficients(&q)?
                .into_iter()
                .map(|(s, c)| json!({"sigma": s.to_string(), "alpha": c}))
                .collect();
            sink.line(&json!({"coefficients": coefs, "verified": linmap::mobius_expansion_check(&q, a.n)?}))?;
        }
        TwistOp::Gram => {
            let spec: CategorySpec = a.cat.parse()?;
            let basis = spec.basis(&spec.default_word(a.k))?;
            let g = linmap::column_gram(&basis, a.n, linmap::tpi)?;
            let gt = linmap::column_gram(&basis, a.n, linmap::tpi_twisted)?;
            sink.line(&json!({"cat": spec.to_string(), "k": a.k, "N": a.n, "size": basis.len(), "equal": g == gt}))?;
            return Ok(if g == gt { 0 } else { 1 });
        }
    }
    Ok(0)
}

type Check = (&'static str, fn() -> Result<bool>);

fn selftest_checks() -> Vec<Check> {
    vec![
        ("lindstrom_determinant", || {
            for k in 1..=4 {
                for n in 1..=5 {
                    let g = weingarten::gram_det(&CategorySpec::P, &ColorWord::white(k), n)?;
                    if weingarten::det_formula(DetFormula::Lindstrom, k, n)? != Q::from_integer(g) {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }),
        ("onplus_determinant", || {
            for k in [2, 4, 6] {
                for n in 2..=4 {
                    let g = weingarten::gram_det(&CategorySpec::NC2, &ColorWord::white(k), n)?;
                    if weingarten::det_formula(DetFormula::OnPlus, k, n)? != Q::from_integer(g) {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }),
        ("weingarten_inverse", || {
            for spec in [CategorySpec::P, CategorySpec::NC, CategorySpec::P2, CategorySpec::MatchP2] {
                for k in 1..=4 {
                    let w = spec.default_word(k);
                    let g = weingarten::gram(&spec, &w, 5)?;
                    let wm = weingarten::weingarten(&spec, &w, 5)?;
                    let prod = crate::linalg::matmul_q(&wm.entries, &crate::linalg::to_q(&g.integer_entries()));
                    if !crate::linalg::is_identity(&prod) {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }),
        ("functor_composition", || {
            let mem = categories::members_upto(&CategorySpec::P, 3)?;
            for a in &mem {
                for b in &mem {
                    if a.lower() == b.upper() {
                        let (c, loops) = partitions::compose(a, b)?;
                        let lhs = linmap::op_compose(&linmap::tpi(b, 2)?, &linmap::tpi(a, 2)?)?;
                        if lhs != linmap::tpi(&c, 2)?.scale(linmap::npow(2, loops)) {
                            return Ok(false);
                        }
                    }
                }
            }
            Ok(true)
        }),
        ("twisted_gram", || {
            for k in [2, 4] {
                let basis = CategorySpec::Peven.basis(&ColorWord::white(k))?;
                if linmap::column_gram(&basis, 2, linmap::tpi)? != linmap::column_gram(&basis, 2, linmap::tpi_twisted)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }),
        ("moment_cumulant_round_trip", || {
            let m = MomentSeq { values: parse_qs("1,2,5,15,52,203")? };
            for fl in [Flavor::Classical, Flavor::Free] {
                if freeprob::cumulants_to_moments(&freeprob::moments_to_cumulants(&m, fl)) != m {
                    return Ok(false);
                }
            }
            Ok(true)
        }),
        ("bercovici_pata", || {
            for (c, f) in standard_bp_pairs() {
                if !freeprob::bp_check(&c, &f, &parse_q("1/2")?, 6)?.passed {
                    return Ok(false);
                }
            }
            Ok(true)
        }),
        ("weingarten_leading_term", || {
            let w = ColorWord::white(3);
            let basis = CategorySpec::P.basis(&w)?;
            for pi in &basis {
                for sigma in &basis {
                    if partitions::leq(pi, sigma)? {
                        let k = weingarten::weingarten_expansion(&CategorySpec::P, &w, pi, sigma, 0)?;
                        if k[0] != partitions::mobius(pi, sigma)? {
                            return Ok(false);
                        }
                    }
                }
            }
            Ok(true)
        }),
        ("fusion_catalan", || {
            let mut cat = BigInt::from(1);
            for k in 1..=6u64 {
                cat = cat * BigInt::from(2 * (2 * k - 1)) / BigInt::from(k + 1);
                let e = fusion::decompose_power(Ring::OnPlus, 2 * k as usize)?;
                if BigInt::from(e.trivial_multiplicity()) != cat {
                    return Ok(false);
                }
            }
            Ok(true)
        }),
        ("fixed_point_dimensions", || {
            for spec in [CategorySpec::P, CategorySpec::NC2, CategorySpec::Peven] {
                for k in 1..=3 {
                    let w = spec.default_word(k);
                    let n = 4;
                    let tm = weingarten::truncated_moment(&spec, &w, n, n, false)?;
                    let d = linmap::fix_space_dim(&spec, &w, n)?;
                    if tm != Q::from_integer(BigInt::from(d)) || d != spec.basis(&w)?.len() {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }),
        ("category_axioms", || {
            for spec in [CategorySpec::P2, CategorySpec::NCeven, CategorySpec::MatchNC2] {
                if !categories::audit_axioms(&spec, 4)?.passed {
                    return Ok(false);
                }
            }
            Ok(true)
        }),
        ("derangement_series", || {
            let d = freeprob::derangement_exact(20);
            let v: f64 = num_traits::ToPrimitive::to_f64(&d).unwrap_or(0.0);
            Ok((v - (-1f64).exp()).abs() < 1e-15)
        }),
    ]
}

fn run_selftest(a: &SelftestArgs, sink: &mut Sink) -> Result<i32> {
    let mut all = true;
    for (name, f) in selftest_checks() {
        if let Some(o) = &a.only {
            if !name.contains(o.as_str()) {
                continue;
            }
        }
        let t = Instant::now();
        let (passed, err) = match f() {
            Ok(b) => (b, None),
            Err(e) => (false, Some(e.to_string())),
        };
        all &= passed;
        sink.line(&json!({"check": name, "passed": passed, "error": err, "millis": t.elapsed().as_millis() as u64}))?;
    }
    sink.line(&json!({"summary": if all { "pass" } else { "fail" }}))?;
    Ok(if all { 0 } else { 1 })
}
