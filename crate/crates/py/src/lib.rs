//! Python bindings for the hx toolkit: the `Hypergraph` type, the property
//! checkers (verdict + JSON witness), the construction pipelines, exact
//! extremal search, and the bounds/certificate routines.

use hx_core::constructions::{build_cancellative, build_union_free, ConstructionParams};
use hx_core::io::{format_hypergraph, parse_hypergraph, HgFormat, IoOptions};
use hx_core::properties::{self, PropertyWitness};
use hx_core::search::{
    brute_force_oracle, extremal_search, SearchKind, SearchProblem,
};
use hx_core::{bounds, Hypergraph};
use num_traits::ToPrimitive;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: hx_core::HxError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn verdict(w: PropertyWitness) -> (bool, String) {
    let witness = serde_json::to_string(&w.witness).unwrap_or_else(|_| "null".into());
    (w.holds, witness)
}

/// An r-uniform hypergraph on vertices 0..n with colex-sorted edges.
#[pyclass(name = "Hypergraph")]
#[derive(Clone)]
struct PyHypergraph {
    inner: Hypergraph,
}

#[pymethods]
impl PyHypergraph {
    #[new]
    fn new(edges: Vec<Vec<usize>>, n: usize, r: usize) -> PyResult<Self> {
        Ok(Self { inner: Hypergraph::canonicalize(&edges, n, r).map_err(err)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn r(&self) -> usize {
        self.inner.r()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn edges(&self) -> Vec<Vec<usize>> {
        self.inner.edge_lists()
    }

    fn to_text(&self) -> String {
        format_hypergraph(&self.inner, HgFormat::Text, &IoOptions::default())
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Self { inner: parse_hypergraph(text, &IoOptions::default()).map_err(err)? })
    }

    fn is_t_cancellative(&self, t: usize) -> PyResult<(bool, String)> {
        Ok(verdict(properties::is_t_cancellative(&self.inner, t).map_err(err)?))
    }

    fn is_t_union_free(&self, t: usize) -> PyResult<(bool, String)> {
        Ok(verdict(properties::is_t_union_free(&self.inner, t).map_err(err)?))
    }

    fn is_t_cover_free(&self, t: usize) -> PyResult<(bool, String)> {
        Ok(verdict(properties::is_t_cover_free(&self.inner, t).map_err(err)?))
    }

    fn is_ve_free(&self, v: usize, e: usize) -> PyResult<(bool, String)> {
        Ok(verdict(properties::is_ve_free(&self.inner, v, e).map_err(err)?))
    }

    fn is_ell_minus_free(&self, k: usize, ell: usize) -> PyResult<(bool, String)> {
        Ok(verdict(properties::is_ell_minus_free(&self.inner, k, ell).map_err(err)?))
    }

    fn matching_number(&self) -> usize {
        properties::matching_number(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "Hypergraph(n={}, r={}, edges={})",
            self.inner.n(),
            self.inner.r(),
            self.inner.len()
        )
    }
}

/// Exact extremal value for a property at small (n, r).
/// kind: "cancellative" | "union-free" | "cover-free" | "matching"
/// (t is the matching bound when kind = "matching").
#[pyfunction]
#[pyo3(signature = (kind, t, n, r, budget=None, oracle=false))]
fn search(
    kind: &str,
    t: usize,
    n: usize,
    r: usize,
    budget: Option<u64>,
    oracle: bool,
) -> PyResult<(usize, Vec<Vec<usize>>, u64, String)> {
    let kind = match kind {
        "cancellative" => SearchKind::Cancellative { t },
        "union-free" => SearchKind::UnionFree { t },
        "cover-free" => SearchKind::CoverFree { t },
        "matching" => SearchKind::MatchingBounded { nu_max: t },
        other => return Err(PyValueError::new_err(format!("unknown search kind: {other}"))),
    };
    let mut problem = SearchProblem::new(kind, n, r);
    problem.node_budget = budget;
    let result = if oracle {
        let value = brute_force_oracle(&problem).map_err(err)?;
        let exact = extremal_search(&problem).map_err(err)?;
        if value != exact.optimum {
            return Err(PyValueError::new_err("search/oracle disagreement"));
        }
        exact
    } else {
        extremal_search(&problem).map_err(err)?
    };
    let status = serde_json::to_string(&result.status).unwrap_or_default();
    Ok((result.optimum, result.witness.edge_lists(), result.nodes, status))
}

fn pipeline_params(
    t: usize,
    k: usize,
    n: usize,
    seed: u64,
    m0: Option<usize>,
    target_copies: Option<usize>,
) -> ConstructionParams {
    let mut params = ConstructionParams::new(t, k, n, seed);
    params.m0 = m0;
    params.target_copies = target_copies;
    params
}

/// Run the t-cancellative construction pipeline; returns (H, report_json).
#[pyfunction]
#[pyo3(signature = (t, k, n, seed, m0=None, target_copies=None))]
fn construct_cancellative(
    t: usize,
    k: usize,
    n: usize,
    seed: u64,
    m0: Option<usize>,
    target_copies: Option<usize>,
) -> PyResult<(PyHypergraph, String)> {
    let params = pipeline_params(t, k, n, seed, m0, target_copies);
    let (h, report) = build_cancellative(&params).map_err(err)?;
    let report = serde_json::to_string(&report).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok((PyHypergraph { inner: h }, report))
}

/// Run the t-union-free construction pipeline; returns (H, report_json).
#[pyfunction]
#[pyo3(signature = (t, k, n, seed, m0=None, target_copies=None))]
fn construct_union_free(
    t: usize,
    k: usize,
    n: usize,
    seed: u64,
    m0: Option<usize>,
    target_copies: Option<usize>,
) -> PyResult<(PyHypergraph, String)> {
    let params = pipeline_params(t, k, n, seed, m0, target_copies);
    let (h, report) = build_union_free(&params).map_err(err)?;
    let report = serde_json::to_string(&report).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok((PyHypergraph { inner: h }, report))
}

/// Closed-form bounds table as CSV text.
#[pyfunction]
fn bounds_csv(t: usize, r: usize, n: usize) -> String {
    bounds::closed_form_bounds(t, r, n).to_csv()
}

/// Replay the counting certificate; returns (all_hold, report_json).
#[pyfunction]
fn certify(h: &PyHypergraph, t: usize, k: usize) -> PyResult<(bool, String)> {
    let report = bounds::upper_bound_certificate(&h.inner, t, k).map_err(err)?;
    let json = serde_json::to_string(&report).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok((report.all_hold(), json))
}

/// Exact density ratio |H|·C(tk−1,k−1)/C(n,k) as (numer, denom, float).
#[pyfunction]
fn density_ratio(h: &PyHypergraph, n: usize, t: usize, k: usize) -> PyResult<(String, String, f64)> {
    let ratio = bounds::density_ratio(&h.inner, n, t, k).map_err(err)?;
    Ok((
        ratio.numer().to_string(),
        ratio.denom().to_string(),
        ratio.to_f64().unwrap_or(0.0),
    ))
}

#[pymodule]
fn hx_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHypergraph>()?;
    m.add_function(wrap_pyfunction!(search, m)?)?;
    m.add_function(wrap_pyfunction!(construct_cancellative, m)?)?;
    m.add_function(wrap_pyfunction!(construct_union_free, m)?)?;
    m.add_function(wrap_pyfunction!(bounds_csv, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(density_ratio, m)?)?;
    Ok(())
}
