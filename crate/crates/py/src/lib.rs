//! Python bindings for the `seqrecon` library.
//!
//! Sequences cross the boundary as strings of `0`/`1`, witnesses and
//! certificates as dictionaries, and every library error is raised as
//! `ValueError`.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use seqrecon::debruijn::edge_usage;
use seqrecon::events::Scanner;
use seqrecon::model::format_window;
use seqrecon::{
    Budget, DeBruijnGraph, EventKind, EventWitness, ExperimentConfig, KmerSet, Params, SourceSet,
    Uniqueness,
};

fn err(e: seqrecon::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn event_kind(name: &str) -> PyResult<EventKind> {
    EventKind::ALL
        .into_iter()
        .find(|k| k.to_string().eq_ignore_ascii_case(name))
        .ok_or_else(|| PyValueError::new_err(format!("unknown event {name:?}")))
}

fn budget(max_solutions: Option<usize>, max_expansions: Option<u64>) -> Budget {
    Budget {
        max_solutions,
        max_expansions,
    }
}

#[pyclass(name = "Params", module = "seqrecon", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyParams(Params);

#[pymethods]
impl PyParams {
    #[new]
    fn new(n: usize, m: usize, k: usize) -> PyResult<Self> {
        Params::new(n, m, k).map(PyParams).map_err(err)
    }

    /// `m = round(n^alpha)` and `k = round(beta * log2 n)`.
    #[staticmethod]
    fn derive(n: usize, alpha: f64, beta: f64) -> PyResult<Self> {
        seqrecon::derive_params(n, alpha, beta)
            .map(PyParams)
            .map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.m
    }

    #[getter]
    fn k(&self) -> usize {
        self.0.k
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.0.effective_alpha()
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.0.effective_beta()
    }

    fn __repr__(&self) -> String {
        format!("Params(n={}, m={}, k={})", self.0.n, self.0.m, self.0.k)
    }
}

/// A multiset of equal-length binary sources. Equality ignores order.
#[pyclass(
    name = "SourceSet",
    module = "seqrecon",
    frozen,
    eq,
    skip_from_py_object
)]
#[derive(Clone, PartialEq)]
struct PySourceSet(SourceSet);

#[pymethods]
impl PySourceSet {
    #[new]
    fn new(sources: Vec<String>) -> PyResult<Self> {
        let refs: Vec<&str> = sources.iter().map(String::as_str).collect();
        SourceSet::from_strs(&refs).map(PySourceSet).map_err(err)
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        SourceSet::from_text(text).map(PySourceSet).map_err(err)
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    #[getter]
    fn sources(&self) -> Vec<String> {
        self.0.iter().map(|s| s.to_string()).collect()
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.m()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn __len__(&self) -> usize {
        self.0.m()
    }

    fn __repr__(&self) -> String {
        format!("SourceSet({:?})", self.sources())
    }
}

/// A sorted, duplicate-free set of `(k+1)`-mers.
#[pyclass(name = "KmerSet", module = "seqrecon", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyKmerSet(KmerSet);

#[pymethods]
impl PyKmerSet {
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        KmerSet::from_text(text).map(PyKmerSet).map_err(err)
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    #[getter]
    fn k(&self) -> usize {
        self.0.k()
    }

    #[getter]
    fn kmers(&self) -> Vec<String> {
        self.0
            .iter()
            .map(|w| format_window(w, self.0.k() + 1))
            .collect()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("KmerSet(k={}, len={})", self.0.k(), self.0.len())
    }
}

#[pyclass(name = "ReconstructionResult", module = "seqrecon", frozen, get_all)]
struct PyReconstruction {
    solutions: Vec<PySourceSet>,
    exhausted: bool,
    expansions: u64,
    /// "exhausted", "solution_cap" or "expansion_cap".
    stop: String,
}

#[pymethods]
impl PyReconstruction {
    fn __repr__(&self) -> String {
        format!(
            "ReconstructionResult(solutions={}, exhausted={}, expansions={}, stop={:?})",
            self.solutions.len(),
            self.exhausted,
            self.expansions,
            self.stop
        )
    }
}

fn witness_dict<'py>(py: Python<'py>, w: &EventWitness) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("kind", w.kind.to_string())?;
    d.set_item("indices", w.indices.clone())?;
    d.set_item("positions", w.positions.clone())?;
    Ok(d)
}

fn witness_from(d: &Bound<'_, PyDict>) -> PyResult<EventWitness> {
    let get = |key: &str| {
        d.get_item(key)?
            .ok_or_else(|| PyValueError::new_err(format!("witness is missing {key:?}")))
    };
    Ok(EventWitness {
        kind: event_kind(&get("kind")?.extract::<String>()?)?,
        indices: get("indices")?.extract()?,
        positions: get("positions")?.extract()?,
    })
}

#[pyfunction]
fn generate_sources(params: &PyParams, seed: u64) -> PySourceSet {
    PySourceSet(seqrecon::generate_sources(&params.0, seed))
}

#[pyfunction]
fn extract_kmer_set(x: &PySourceSet, k: usize) -> PyResult<PyKmerSet> {
    seqrecon::extract_kmer_set(&x.0, k)
        .map(PyKmerSet)
        .map_err(err)
}

/// Every source set of `m` length-`n` sources with k-mer set `y`, up to the
/// given limits. `None` means no limit.
#[pyfunction]
#[pyo3(signature = (y, m, n, max_solutions=None, max_expansions=None))]
fn enumerate_reconstructions(
    py: Python<'_>,
    y: &PyKmerSet,
    m: usize,
    n: usize,
    max_solutions: Option<usize>,
    max_expansions: Option<u64>,
) -> PyResult<PyReconstruction> {
    let r = py
        .detach(|| {
            seqrecon::enumerate_reconstructions(&y.0, m, n, budget(max_solutions, max_expansions))
        })
        .map_err(err)?;
    Ok(PyReconstruction {
        solutions: r.solutions.into_iter().map(PySourceSet).collect(),
        exhausted: r.exhausted,
        expansions: r.expansions,
        stop: match r.stop {
            seqrecon::reconstruct::Stop::Exhausted => "exhausted",
            seqrecon::reconstruct::Stop::SolutionCap => "solution_cap",
            seqrecon::reconstruct::Stop::ExpansionCap => "expansion_cap",
        }
        .to_string(),
    })
}

/// "unique", "ambiguous" or "unknown".
#[pyfunction]
#[pyo3(signature = (x, k, max_expansions=1_000_000))]
fn is_unique(
    py: Python<'_>,
    x: &PySourceSet,
    k: usize,
    max_expansions: Option<u64>,
) -> PyResult<&'static str> {
    let verdict = py
        .detach(|| seqrecon::is_unique(&x.0, k, budget(Some(2), max_expansions)))
        .map_err(err)?;
    Ok(match verdict {
        Uniqueness::Unique => "unique",
        Uniqueness::Ambiguous => "ambiguous",
        Uniqueness::Unknown => "unknown",
    })
}

#[pyfunction]
fn brute_force_oracle(y: &PyKmerSet, m: usize, n: usize) -> PyResult<Vec<PySourceSet>> {
    seqrecon::brute_force_oracle(&y.0, m, n)
        .map(|v| v.into_iter().map(PySourceSet).collect())
        .map_err(err)
}

/// The first witness of `kind` ("A", "B", "C", "D" or "H"), or every one
/// when `all` is set.
#[pyfunction]
#[pyo3(signature = (x, k, kind, all=false))]
fn detect<'py>(
    py: Python<'py>,
    x: &PySourceSet,
    k: usize,
    kind: &str,
    all: bool,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let kind = event_kind(kind)?;
    let scanner = Scanner::new(&x.0, k).map_err(err)?;
    let witnesses = if all {
        scanner.all(kind)
    } else {
        scanner.detect(kind).into_iter().collect()
    };
    witnesses.iter().map(|w| witness_dict(py, w)).collect()
}

/// Apply a D- or H-swap. Returns `(alternative, certificate)`.
#[pyfunction]
fn construct_swap(
    x: &PySourceSet,
    witness: &Bound<'_, PyDict>,
    k: usize,
) -> PyResult<(PySourceSet, bool)> {
    let w = witness_from(witness)?;
    let out = match w.kind {
        EventKind::D => seqrecon::construct_swap_d(&x.0, &w, k),
        EventKind::H => seqrecon::construct_swap_h(&x.0, &w, k),
        other => return Err(PyValueError::new_err(format!("event {other} has no swap"))),
    }
    .map_err(err)?;
    Ok((PySourceSet(out.alternative), out.certificate))
}

/// A verified alternative as `{"rearrangement", "witnesses", "alternative"}`,
/// or `None`.
#[pyfunction]
fn find_certificate<'py>(
    py: Python<'py>,
    x: &PySourceSet,
    k: usize,
) -> PyResult<Option<Bound<'py, PyDict>>> {
    let Some(c) = py
        .detach(|| seqrecon::find_certificate(&x.0, k))
        .map_err(err)?
    else {
        return Ok(None);
    };
    let d = PyDict::new(py);
    d.set_item("rearrangement", format!("{:?}", c.rearrangement))?;
    let witnesses = c
        .witnesses
        .iter()
        .map(|w| witness_dict(py, w))
        .collect::<PyResult<Vec<_>>>()?;
    d.set_item("witnesses", witnesses)?;
    d.set_item("alternative", PySourceSet(c.alternative))?;
    Ok(Some(d))
}

#[pyfunction]
fn verify_equivalent(x: &PySourceSet, x_alt: &PySourceSet, k: usize) -> bool {
    seqrecon::verify_equivalent(&x.0, &x_alt.0, k)
}

/// The graph as text, one `PREFIX -> SUFFIX [mult=μ]` line per edge. With
/// `m`, edge counts come from inferred node multiplicities.
#[pyfunction]
#[pyo3(signature = (y, m=None))]
fn dump_graph(y: &PyKmerSet, m: Option<usize>) -> PyResult<String> {
    let g = DeBruijnGraph::build(&y.0);
    let usage = match m {
        Some(m) => Some(edge_usage(
            &g,
            &seqrecon::label_multiplicities(&g, m).map_err(err)?,
        )),
        None => None,
    };
    Ok(g.dump(usage.as_ref()))
}

/// Node multiplicities inferred from graph structure, keyed by k-mer.
#[pyfunction]
fn label_multiplicities(y: &PyKmerSet, m: usize) -> PyResult<BTreeMap<String, u32>> {
    let g = DeBruijnGraph::build(&y.0);
    let mu = seqrecon::label_multiplicities(&g, m).map_err(err)?;
    Ok(mu
        .iter()
        .map(|(v, c)| (format_window(v, g.k()), c))
        .collect())
}

/// `(verdict, binding_constraint)` for a point of the (alpha, beta) plane.
#[pyfunction]
fn classify_region(alpha: f64, beta: f64) -> (String, String) {
    let r = seqrecon::classify_region(alpha, beta);
    (r.verdict.to_string(), r.binding_constraint.to_string())
}

#[pyfunction]
fn repeat_free_bound(params: &PyParams) -> f64 {
    seqrecon::repeat_free_bound(&params.0)
}

#[pyfunction]
fn event_bounds(params: &PyParams) -> BTreeMap<String, f64> {
    seqrecon::event_bounds(&params.0)
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

fn moments<'py>(
    py: Python<'py>,
    r: seqrecon::Result<seqrecon::MomentReport>,
) -> PyResult<Bound<'py, PyDict>> {
    let r = r.map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("e_first", r.e_first)?;
    d.set_item("e_second_bound", r.e_second_bound)?;
    d.set_item("pz_lower", r.pz_lower)?;
    Ok(d)
}

#[pyfunction]
fn moments_v<'py>(py: Python<'py>, params: &PyParams) -> PyResult<Bound<'py, PyDict>> {
    moments(py, seqrecon::moments_v(&params.0))
}

#[pyfunction]
fn moments_u<'py>(py: Python<'py>, params: &PyParams) -> PyResult<Bound<'py, PyDict>> {
    moments(py, seqrecon::moments_u(&params.0))
}

#[pyfunction]
fn v_statistic(x: &PySourceSet, k: usize) -> PyResult<u64> {
    seqrecon::v_statistic(&x.0, k).map_err(err)
}

#[pyfunction]
fn u_statistic(x: &PySourceSet, k: usize) -> PyResult<u64> {
    seqrecon::u_statistic(&x.0, k).map_err(err)
}

/// Run an experiment grid from a JSON config. Returns the CSV text and, when
/// `measure` is given, an SVG heatmap of that measure.
#[pyfunction]
#[pyo3(signature = (config_json, threads=None, measure=None))]
fn run_region(
    py: Python<'_>,
    config_json: &str,
    threads: Option<usize>,
    measure: Option<&str>,
) -> PyResult<(String, Option<String>)> {
    let config = ExperimentConfig::from_json(config_json).map_err(err)?;
    let reports = py
        .detach(|| seqrecon::run_grid_with_threads(&config, threads))
        .map_err(err)?;
    let svg = measure.map(|m| seqrecon::emit_svg_heatmap(&reports, m));
    Ok((seqrecon::emit_csv(&reports), svg))
}

#[pymodule]
#[pyo3(name = "seqrecon")]
pub fn seqrecon_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyParams>()?;
    m.add_class::<PySourceSet>()?;
    m.add_class::<PyKmerSet>()?;
    m.add_class::<PyReconstruction>()?;
    m.add_function(wrap_pyfunction!(generate_sources, m)?)?;
    m.add_function(wrap_pyfunction!(extract_kmer_set, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_reconstructions, m)?)?;
    m.add_function(wrap_pyfunction!(is_unique, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(detect, m)?)?;
    m.add_function(wrap_pyfunction!(construct_swap, m)?)?;
    m.add_function(wrap_pyfunction!(find_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(verify_equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(dump_graph, m)?)?;
    m.add_function(wrap_pyfunction!(label_multiplicities, m)?)?;
    m.add_function(wrap_pyfunction!(classify_region, m)?)?;
    m.add_function(wrap_pyfunction!(repeat_free_bound, m)?)?;
    m.add_function(wrap_pyfunction!(event_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(moments_v, m)?)?;
    m.add_function(wrap_pyfunction!(moments_u, m)?)?;
    m.add_function(wrap_pyfunction!(v_statistic, m)?)?;
    m.add_function(wrap_pyfunction!(u_statistic, m)?)?;
    m.add_function(wrap_pyfunction!(run_region, m)?)?;
    Ok(())
}
