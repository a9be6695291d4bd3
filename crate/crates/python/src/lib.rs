//! Python bindings: graphs, topology, canonical keys, coproducts, antipodes
//! and renormalized values. Structured results come back as plain dicts.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use hopfgraph::dsl::{parse_graph_source, to_dsl};
use hopfgraph::graph::{canonical_key, commutative_key, divergent_subgraphs, FeynmanGraph, Theory};
use hopfgraph::hopf::{CoproductMode, HopfAlgebra as Algebra};
use hopfgraph::json::{element_to_json, laurent_from_json, laurent_to_json, tensor_to_json};
use hopfgraph::renorm::{DefaultRule, FeynmanRules, Renormalizer, Window};
use hopfgraph::ribbon::{is_planar_regular, topology};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

fn from_py(obj: &Bound<'_, PyAny>) -> PyResult<serde_json::Value> {
    let text: String = obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&text).map_err(err)
}

#[pyclass(name = "Graph", module = "hopfgraph_py", frozen)]
pub struct PyGraph {
    inner: FeynmanGraph,
}

#[pymethods]
impl PyGraph {
    /// The single graph defined in `source`.
    #[new]
    fn new(source: &str) -> PyResult<Self> {
        let mut graphs = parse_graph_source(source).map_err(err)?;
        if graphs.len() != 1 {
            return Err(PyValueError::new_err(format!("expected one graph, found {}", graphs.len())));
        }
        Ok(PyGraph { inner: graphs.remove(0) })
    }

    #[getter]
    fn name(&self) -> Option<String> {
        self.inner.name.clone()
    }

    #[getter]
    fn vertices(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn internal(&self) -> usize {
        self.inner.internal_count()
    }

    #[getter]
    fn external(&self) -> usize {
        self.inner.external_count()
    }

    #[getter]
    fn loops(&self) -> usize {
        self.inner.loop_number()
    }

    fn is_connected(&self) -> bool {
        self.inner.is_connected()
    }

    fn is_one_particle_irreducible(&self) -> bool {
        self.inner.is_one_particle_irreducible()
    }

    fn is_planar_regular(&self) -> PyResult<bool> {
        is_planar_regular(&self.inner).map_err(err)
    }

    /// `{"V", "I", "E", "F", "B", "g"}`.
    fn topology<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let t = topology(&self.inner).map_err(err)?;
        to_py(py, &serde_json::to_value(t).map_err(err)?)
    }

    fn canonical_key(&self) -> String {
        canonical_key(&self.inner).to_hex()
    }

    fn commutative_key(&self) -> String {
        commutative_key(&self.inner).to_hex()
    }

    /// Edge-label lists of the divergent subgraphs.
    #[pyo3(signature = (theory = "phi4"))]
    fn divergent_subgraphs(&self, theory: &str) -> PyResult<Vec<Vec<String>>> {
        let theory = match theory {
            "phi4" => Theory::Phi4,
            "gw" => Theory::Gw,
            other => return Err(PyValueError::new_err(format!("unknown theory {other:?}"))),
        };
        let subs = divergent_subgraphs(&self.inner, theory).map_err(err)?;
        Ok(subs
            .iter()
            .map(|s| s.edges().iter().map(|&e| self.inner.internal[e].label.clone()).collect())
            .collect())
    }

    fn to_dsl(&self) -> String {
        to_dsl(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph({}, V={}, I={}, E={})",
            self.inner.name.as_deref().unwrap_or("?"),
            self.inner.vertex_count(),
            self.inner.internal_count(),
            self.inner.external_count()
        )
    }
}

/// Graph Hopf algebra in mode `phi4`, `gw` or `core`.
#[pyclass(name = "HopfAlgebra", module = "hopfgraph_py", frozen)]
pub struct PyHopfAlgebra {
    inner: Algebra,
}

#[pymethods]
impl PyHopfAlgebra {
    #[new]
    #[pyo3(signature = (mode = "phi4"))]
    fn new(mode: &str) -> PyResult<Self> {
        let mode: CoproductMode = mode.parse().map_err(err)?;
        Ok(PyHopfAlgebra { inner: Algebra::new(mode) })
    }

    #[getter]
    fn mode(&self) -> &'static str {
        self.inner.mode().name()
    }

    #[pyo3(signature = (graph, reduced = false))]
    fn coproduct<'py>(&self, py: Python<'py>, graph: &PyGraph, reduced: bool) -> PyResult<Bound<'py, PyAny>> {
        self.inner.intern(&graph.inner);
        let t = if reduced {
            self.inner.reduced_coproduct(&graph.inner)
        } else {
            self.inner.coproduct(&graph.inner)
        }
        .map_err(err)?;
        to_py(py, &tensor_to_json(&self.inner, &t).map_err(err)?)
    }

    fn antipode<'py>(&self, py: Python<'py>, graph: &PyGraph) -> PyResult<Bound<'py, PyAny>> {
        self.inner.intern(&graph.inner);
        let s = self.inner.antipode(&graph.inner).map_err(err)?;
        to_py(py, &element_to_json(&self.inner, &s).map_err(err)?)
    }

    /// Coassociativity, counit, antipode and grading checks on one graph.
    fn check_axioms<'py>(&self, py: Python<'py>, graph: &PyGraph) -> PyResult<Bound<'py, PyDict>> {
        let g = &graph.inner;
        let out = PyDict::new(py);
        out.set_item("coassociativity", self.inner.check_coassociativity(g).map_err(err)?.holds)?;
        out.set_item("counit", self.inner.check_counit_laws(g).map_err(err)?)?;
        out.set_item("antipode", self.inner.check_antipode_axiom(g).map_err(err)?)?;
        out.set_item("grading", self.inner.check_grading(g).map_err(err)?)?;
        Ok(out)
    }

    /// Renormalized value φ₊ (or the counterterm φ₋) under minimal
    /// subtraction. `rules` maps graph names or canonical keys to series
    /// `{exponent: "p/q"}`; `default` is `toy`, `pole` or `None`.
    #[pyo3(signature = (graph, rules = None, default = Some("toy"), window = (-8, 8), counterterm = false))]
    fn renormalize<'py>(
        &self,
        py: Python<'py>,
        graph: &PyGraph,
        rules: Option<&Bound<'py, PyDict>>,
        default: Option<&str>,
        window: (i32, i32),
        counterterm: bool,
    ) -> PyResult<Bound<'py, PyAny>> {
        let window = Window::new(window.0, window.1).map_err(err)?;
        let default = match default {
            Some("toy") => Some(DefaultRule::Toy),
            Some("pole") => Some(DefaultRule::PurePole),
            None => None,
            Some(other) => return Err(PyValueError::new_err(format!("unknown default rule {other:?}"))),
        };
        let mut feynman = FeynmanRules::new(window, default);
        if let Some(rules) = rules {
            for (k, v) in rules.iter() {
                let name: String = k.extract()?;
                let value = laurent_from_json(&from_py(&v)?, window).map_err(err)?;
                if graph.inner.name.as_deref() == Some(name.as_str()) {
                    feynman.set(&graph.inner, value).map_err(err)?;
                } else {
                    let key = hopfgraph::graph::CanonicalKey::from_hex(&name)
                        .ok_or_else(|| PyValueError::new_err(format!("{name} is neither the graph's name nor a key")))?;
                    feynman.set_key(key, value).map_err(err)?;
                }
            }
        }
        let r = Renormalizer::minimal(&self.inner, &feynman);
        let value = if counterterm {
            r.twisted_antipode(&graph.inner)
        } else {
            r.renormalize(&graph.inner)
        }
        .map_err(err)?;
        to_py(py, &laurent_to_json(&value))
    }
}

/// Every graph defined in `source`.
#[pyfunction]
fn parse(source: &str) -> PyResult<Vec<PyGraph>> {
    Ok(parse_graph_source(source)
        .map_err(err)?
        .into_iter()
        .map(|inner| PyGraph { inner })
        .collect())
}

/// Named fixture graphs: TADPOLE_P, BUBBLE, CHAIN, SUNSET_P, ...
#[pyfunction]
fn fixtures() -> Vec<PyGraph> {
    hopfgraph::fixtures::all().into_iter().map(|inner| PyGraph { inner }).collect()
}

/// Ribbon classes generated by insertion up to `max_internal` edges.
#[pyfunction]
fn corpus(max_internal: usize) -> PyResult<Vec<PyGraph>> {
    Ok(hopfgraph::corpus::generate(max_internal)
        .map_err(err)?
        .into_iter()
        .map(|inner| PyGraph { inner })
        .collect())
}

#[pymodule]
fn hopfgraph_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyHopfAlgebra>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(fixtures, m)?)?;
    m.add_function(wrap_pyfunction!(corpus, m)?)?;
    Ok(())
}
