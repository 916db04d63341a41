use easyqg::categories::CategorySpec;
use easyqg::freeprob::{self, CumulantSeq, Flavor, LawSpec, MomentSeq};
use easyqg::fusion::{self, FusionElement, Ring};
use easyqg::haarmc::{self, Group, GroupSampler};
use easyqg::linalg::IMat;
use easyqg::linmap;
use easyqg::partitions::{self, ColorWord, Partition};
use easyqg::weingarten::{self, DetFormula};
use easyqg::{Error, Q};
use num_bigint::BigInt;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: Error) -> PyErr {
    let msg = format!("{}: {e}", e.kind());
    match e {
        Error::SingularGram { .. } | Error::SizeGuard { .. } | Error::Unsupported(_) => PyRuntimeError::new_err(msg),
        _ => PyValueError::new_err(msg),
    }
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(err)
}

fn cword(s: &str) -> PyResult<ColorWord> {
    parse(s)
}

fn json<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (s,))
}

/// Partition with colored upper and lower rows.
#[pyclass(name = "Partition", module = "easyqg_py", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyPartition(Partition);

#[pymethods]
impl PyPartition {
    /// Parse `[upper/lower]{blocks}` (0-based points) or the JSON form.
    #[new]
    fn new(s: &str) -> PyResult<Self> {
        parse(s).map(PyPartition)
    }

    #[staticmethod]
    fn from_blocks(upper: &str, lower: &str, blocks: Vec<Vec<usize>>) -> PyResult<Self> {
        Partition::from_blocks(cword(upper)?, cword(lower)?, &blocks).map(PyPartition).map_err(err)
    }

    #[getter]
    fn k(&self) -> usize {
        self.0.k()
    }

    #[getter]
    fn l(&self) -> usize {
        self.0.l()
    }

    #[getter]
    fn upper(&self) -> String {
        self.0.upper().to_string()
    }

    #[getter]
    fn lower(&self) -> String {
        self.0.lower().to_string()
    }

    fn points(&self) -> usize {
        self.0.points()
    }

    fn num_blocks(&self) -> usize {
        self.0.num_blocks()
    }

    fn blocks(&self) -> Vec<Vec<usize>> {
        self.0.blocks()
    }

    fn is_noncrossing(&self) -> bool {
        partitions::is_noncrossing(&self.0)
    }

    fn is_pairing(&self) -> bool {
        self.0.is_pairing()
    }

    fn is_even(&self) -> bool {
        self.0.is_even()
    }

    /// Stack `self` on top of `bottom`; returns the composite and the number of closed loops.
    fn compose(&self, bottom: &PyPartition) -> PyResult<(PyPartition, usize)> {
        partitions::compose(&self.0, &bottom.0).map(|(p, n)| (PyPartition(p), n)).map_err(err)
    }

    fn tensor(&self, other: &PyPartition) -> PyPartition {
        PyPartition(partitions::tensor(&self.0, &other.0))
    }

    fn involute(&self) -> PyPartition {
        PyPartition(partitions::involute(&self.0))
    }

    fn flat(&self) -> PyPartition {
        PyPartition(self.0.flat())
    }

    fn leq(&self, other: &PyPartition) -> PyResult<bool> {
        partitions::leq(&self.0, &other.0).map_err(err)
    }

    fn join(&self, other: &PyPartition) -> PyResult<PyPartition> {
        partitions::join(&self.0, &other.0).map(PyPartition).map_err(err)
    }

    fn mobius(&self, other: &PyPartition) -> PyResult<i64> {
        partitions::mobius(&self.0, &other.0).map_err(err)
    }

    fn to_json<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        json(py, &self.0)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Partition('{}')", self.0)
    }
}

/// Category of partitions, by name (`p`, `nc2`, `ps:3`, ...).
#[pyclass(name = "Category", module = "easyqg_py", frozen)]
struct PyCategory(CategorySpec);

#[pymethods]
impl PyCategory {
    #[new]
    fn new(s: &str) -> PyResult<Self> {
        parse(s).map(PyCategory)
    }

    #[staticmethod]
    fn shipped() -> Vec<String> {
        easyqg::categories::shipped().iter().map(|c| c.to_string()).collect()
    }

    fn contains(&self, p: &PyPartition) -> bool {
        self.0.contains(&p.0)
    }

    /// One-row basis for a color word such as `"oobb"`.
    fn basis(&self, word: &str) -> PyResult<Vec<PyPartition>> {
        Ok(self.0.basis(&cword(word)?).map_err(err)?.into_iter().map(PyPartition).collect())
    }

    fn enumerate(&self, upper: &str, lower: &str) -> PyResult<Vec<PyPartition>> {
        Ok(self.0.enumerate(&cword(upper)?, &cword(lower)?).map_err(err)?.into_iter().map(PyPartition).collect())
    }

    fn default_word(&self, k: usize) -> String {
        self.0.default_word(k).to_string()
    }

    fn free_version(&self) -> Option<String> {
        self.0.free_version().map(|c| c.to_string())
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Category('{}')", self.0)
    }
}

#[pyfunction]
fn gram(cat: &str, word: &str, n: u64) -> PyResult<IMat> {
    Ok(weingarten::gram(&parse(cat)?, &cword(word)?, n).map_err(err)?.integer_entries())
}

#[pyfunction]
#[pyo3(signature = (cat, word, n, quasi = false))]
fn weingarten_matrix(cat: &str, word: &str, n: u64, quasi: bool) -> PyResult<Vec<Vec<Q>>> {
    let (spec, w) = (parse(cat)?, cword(word)?);
    let m = if quasi { weingarten::weingarten_quasi(&spec, &w, n) } else { weingarten::weingarten(&spec, &w, n) };
    Ok(m.map_err(err)?.entries)
}

#[pyfunction]
fn gram_det(cat: &str, word: &str, n: u64) -> PyResult<BigInt> {
    weingarten::gram_det(&parse(cat)?, &cword(word)?, n).map_err(err)
}

#[pyfunction]
fn det_formula(name: &str, k: usize, n: u64) -> PyResult<Q> {
    weingarten::det_formula(parse::<DetFormula>(name)?, k, n).map_err(err)
}

/// `∫ u_{i1 j1} ... u_{ik jk}` over the quantum group of the category (1-based indices).
#[pyfunction]
#[pyo3(signature = (cat, i, j, n, word = None))]
fn integrate(cat: &str, i: Vec<u32>, j: Vec<u32>, n: u64, word: Option<&str>) -> PyResult<Q> {
    let w = match word {
        Some(s) => cword(s)?,
        None => ColorWord::white(i.len()),
    };
    weingarten::integrate(&parse(cat)?, &w, &i, &j, n).map_err(err)
}

#[pyfunction]
fn sn_integral(i: Vec<u32>, j: Vec<u32>, n: u64) -> PyResult<Q> {
    weingarten::sn_integral(&i, &j, n).map_err(err)
}

#[pyfunction]
fn truncated_moment(cat: &str, word: &str, n: u64, s: u64) -> PyResult<Q> {
    weingarten::truncated_moment(&parse(cat)?, &cword(word)?, n, s, false).map_err(err)
}

#[pyfunction]
fn fix_space_dim(cat: &str, word: &str, n: u64) -> PyResult<usize> {
    linmap::fix_space_dim(&parse(cat)?, &cword(word)?, n).map_err(err)
}

/// Nonzero entries `[out, in, value]` of `T_π` on `(C^N)^{⊗k} → (C^N)^{⊗l}`.
#[pyfunction]
#[pyo3(signature = (p, n, twisted = false))]
fn operator<'py>(py: Python<'py>, p: &PyPartition, n: u32, twisted: bool) -> PyResult<Bound<'py, PyAny>> {
    let t = if twisted { linmap::tpi_twisted(&p.0, n) } else { linmap::tpi(&p.0, n) };
    json(py, &t.map_err(err)?.to_json())
}

#[pyfunction]
fn moments_to_cumulants(values: Vec<Q>, flavor: &str) -> PyResult<Vec<Q>> {
    Ok(freeprob::moments_to_cumulants(&MomentSeq { values }, parse::<Flavor>(flavor)?).values)
}

#[pyfunction]
fn cumulants_to_moments(values: Vec<Q>, flavor: &str) -> PyResult<Vec<Q>> {
    Ok(freeprob::cumulants_to_moments(&CumulantSeq { values, flavor: parse(flavor)? }).values)
}

#[pyfunction]
fn law_moments(law: &str, n: usize) -> PyResult<Vec<Q>> {
    Ok(freeprob::law_moments(&parse::<LawSpec>(law)?, n).map_err(err)?.values)
}

#[pyfunction]
fn bp_check<'py>(py: Python<'py>, classical: &str, free: &str, t: Q, n: usize) -> PyResult<Bound<'py, PyAny>> {
    json(py, &freeprob::bp_check(&parse(classical)?, &parse(free)?, &t, n).map_err(err)?)
}

fn element_dict<'py>(py: Python<'py>, e: &FusionElement) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for (l, m) in &e.terms {
        d.set_item(e.ring.show(l), *m)?;
    }
    Ok(d)
}

/// Decomposition of `r_a ⊗ r_b` as `{label: multiplicity}`.
#[pyfunction]
fn fuse<'py>(py: Python<'py>, ring: &str, a: &str, b: &str) -> PyResult<Bound<'py, PyDict>> {
    let r: Ring = parse(ring)?;
    let e = r.fuse(&r.parse_label(a).map_err(err)?, &r.parse_label(b).map_err(err)?).map_err(err)?;
    element_dict(py, &e)
}

/// Decomposition of the `k`-th tensor power of the fundamental representation.
#[pyfunction]
fn decompose_power<'py>(py: Python<'py>, ring: &str, k: usize) -> PyResult<Bound<'py, PyDict>> {
    element_dict(py, &fusion::decompose_power(parse(ring)?, k).map_err(err)?)
}

#[pyfunction]
fn fusion_dim(ring: &str, label: &str, n: u64) -> PyResult<BigInt> {
    let r: Ring = parse(ring)?;
    fusion::dim(r, &r.parse_label(label).map_err(err)?, n).map_err(err)
}

/// Monte Carlo moments of the truncated character, compared with exact values when `exact` is set.
#[pyfunction]
#[pyo3(signature = (group, n, t, k_max, samples, seed = 42, exact = true))]
fn empirical_moments<'py>(
    py: Python<'py>,
    group: &str,
    n: usize,
    t: Q,
    k_max: usize,
    samples: u64,
    seed: u64,
    exact: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let s = GroupSampler::new(parse::<Group>(group)?, n, seed).map_err(err)?;
    let rep = if exact { haarmc::compare_exact(&s, &t, k_max, samples) } else { haarmc::empirical_moments(&s, &t, k_max, samples) };
    json(py, &rep.map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (n, samples, seed = 42))]
fn derangement_rate<'py>(py: Python<'py>, n: usize, samples: u64, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    json(py, &haarmc::derangement_rate(n, samples, seed).map_err(err)?)
}

/// Run the command-line tool in-process; returns `(exit code, stdout)`.
#[pyfunction]
fn run_cli(args: Vec<String>) -> (i32, String) {
    let mut out = Vec::new();
    let argv = std::iter::once("easyqg".to_string()).chain(args);
    let code = easyqg::cli::run(argv, &mut out);
    (code, String::from_utf8_lossy(&out).into_owned())
}

#[pymodule]
fn easyqg_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPartition>()?;
    m.add_class::<PyCategory>()?;
    m.add_function(wrap_pyfunction!(gram, m)?)?;
    m.add_function(wrap_pyfunction!(weingarten_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(gram_det, m)?)?;
    m.add_function(wrap_pyfunction!(det_formula, m)?)?;
    m.add_function(wrap_pyfunction!(integrate, m)?)?;
    m.add_function(wrap_pyfunction!(sn_integral, m)?)?;
    m.add_function(wrap_pyfunction!(truncated_moment, m)?)?;
    m.add_function(wrap_pyfunction!(fix_space_dim, m)?)?;
    m.add_function(wrap_pyfunction!(operator, m)?)?;
    m.add_function(wrap_pyfunction!(moments_to_cumulants, m)?)?;
    m.add_function(wrap_pyfunction!(cumulants_to_moments, m)?)?;
    m.add_function(wrap_pyfunction!(law_moments, m)?)?;
    m.add_function(wrap_pyfunction!(bp_check, m)?)?;
    m.add_function(wrap_pyfunction!(fuse, m)?)?;
    m.add_function(wrap_pyfunction!(decompose_power, m)?)?;
    m.add_function(wrap_pyfunction!(fusion_dim, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_moments, m)?)?;
    m.add_function(wrap_pyfunction!(derangement_rate, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    m.add("RNG", haarmc::RNG_NAME)?;
    Ok(())
}
