//! Python bindings for the prooflab engines.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use pyo3::exceptions::{PyTimeoutError, PyValueError};
use pyo3::prelude::*;

use prooflab::algebra::Field;
use prooflab::cfi::{self, CfiBase};
use prooflab::encoders;
use prooflab::games;
use prooflab::logic::{self, LfpFormula};
use prooflab::pc::{self, EngineKind, SaturationOptions};
use prooflab::resolution;
use prooflab::wl;

fn err(e: prooflab::Error) -> PyErr {
    match e {
        prooflab::Error::Timeout => PyTimeoutError::new_err("timeout"),
        e => PyValueError::new_err(e.to_string()),
    }
}

fn field(name: &str) -> PyResult<Field> {
    name.parse().map_err(err)
}

fn deadline(timeout: Option<f64>) -> Option<Instant> {
    timeout.map(|s| Instant::now() + Duration::from_secs_f64(s))
}

#[pyclass(name = "CnfFormula", from_py_object)]
#[derive(Clone)]
struct PyCnf(resolution::CnfFormula);

#[pymethods]
impl PyCnf {
    #[staticmethod]
    fn from_dimacs(text: &str) -> PyResult<Self> {
        resolution::CnfFormula::from_dimacs(text).map(PyCnf).map_err(err)
    }

    /// Builds a formula from clauses of signed, 1-based literals.
    #[staticmethod]
    #[pyo3(signature = (clauses, num_vars=None))]
    fn from_clauses(clauses: Vec<Vec<i64>>, num_vars: Option<u32>) -> PyResult<Self> {
        let n = num_vars.unwrap_or_else(|| clauses.iter().flatten().map(|x| x.unsigned_abs() as u32).max().unwrap_or(0));
        let mut f = resolution::CnfFormula::new(n);
        for c in &clauses {
            f.add(resolution::Clause::from_dimacs(c).map_err(err)?);
        }
        Ok(PyCnf(f))
    }

    fn to_dimacs(&self) -> String {
        self.0.to_dimacs()
    }

    #[getter]
    fn num_vars(&self) -> u32 {
        self.0.num_vars
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn is_horn(&self) -> bool {
        self.0.is_horn()
    }

    fn max_width(&self) -> usize {
        self.0.max_width()
    }

    fn satisfied_by(&self, assignment: Vec<bool>) -> bool {
        self.0.satisfied_by(&assignment)
    }

    fn flip_polarity(&self) -> Self {
        PyCnf(self.0.flip_polarity())
    }

    fn __repr__(&self) -> String {
        format!("CnfFormula(vars={}, clauses={})", self.0.num_vars, self.0.len())
    }
}

/// Returns `(refuted, derived)`: the verdict and the least model of the
/// definite clauses.
#[pyfunction]
fn horn_refute(f: &PyCnf) -> PyResult<(bool, Vec<u32>)> {
    let r = resolution::horn_refute(&f.0).map_err(err)?;
    Ok((r.refuted, r.derived))
}

#[pyfunction]
#[pyo3(signature = (f, k, timeout=None))]
fn kres_refutes(py: Python<'_>, f: &PyCnf, k: usize, timeout: Option<f64>) -> PyResult<bool> {
    let d = deadline(timeout);
    py.detach(|| resolution::kres_refutes(&f.0, k, d)).map_err(err)
}

#[pyfunction]
fn two_sat(f: &PyCnf) -> PyResult<bool> {
    resolution::two_sat_oracle(&f.0).map_err(err)
}

#[pyclass(name = "PolySystem", from_py_object)]
#[derive(Clone)]
struct PySystem(pc::PolySystem);

#[pymethods]
impl PySystem {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        pc::PolySystem::from_json(text).map(PySystem).map_err(err)
    }

    /// Builds a system from polynomials given as `[(coefficient, [vars]), ...]`.
    #[staticmethod]
    #[pyo3(signature = (num_vars, polys, field="Q"))]
    fn from_terms(num_vars: u32, polys: Vec<Vec<(i64, Vec<u32>)>>, field: &str) -> PyResult<Self> {
        let f = self::field(field)?;
        let mut s = pc::PolySystem::new(f, num_vars);
        for p in &polys {
            let terms: Vec<(i64, &[u32])> = p.iter().map(|(c, m)| (*c, m.as_slice())).collect();
            s.push(pc::Polynomial::from_int_terms(f, &terms));
        }
        Ok(PySystem(s))
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    fn over_field(&self, field: &str) -> PyResult<Self> {
        self.0.over_field(self::field(field)?).map(PySystem).map_err(err)
    }

    #[getter]
    fn num_vars(&self) -> u32 {
        self.0.num_vars
    }

    #[getter]
    fn field(&self) -> String {
        self.0.field.to_string()
    }

    fn __len__(&self) -> usize {
        self.0.axioms.len()
    }

    fn max_degree(&self) -> usize {
        self.0.max_degree()
    }

    fn satisfied_by(&self, assignment: Vec<bool>) -> bool {
        self.0.satisfied_by(&assignment)
    }

    fn __repr__(&self) -> String {
        format!("PolySystem(field={}, vars={}, axioms={})", self.0.field, self.0.num_vars, self.0.axioms.len())
    }
}

fn engine(name: &str) -> PyResult<EngineKind> {
    name.parse().map_err(err)
}

/// Degree-`k` saturation. Returns `(refuted, stats)` with the engine
/// statistics as a dict.
#[pyfunction]
#[pyo3(signature = (sys, k, engine="monpc", timeout=None, max_columns=None, max_entries=None))]
fn saturate(
    py: Python<'_>,
    sys: &PySystem,
    k: usize,
    engine: &str,
    timeout: Option<f64>,
    max_columns: Option<usize>,
    max_entries: Option<usize>,
) -> PyResult<(bool, BTreeMap<String, usize>)> {
    let kind = self::engine(engine)?;
    let opts = SaturationOptions { deadline: deadline(timeout), max_columns, max_entries, ..Default::default() };
    let s = py.detach(|| pc::saturate(&sys.0, k, kind, &opts)).map_err(err)?;
    let st = &s.stats;
    let stats = [
        ("rounds", st.rounds),
        ("lifts", st.lifts),
        ("live_rows", st.live_rows),
        ("derived_generators", st.derived_generators),
        ("columns", st.columns),
        ("peak_entries", st.peak_entries),
    ];
    Ok((s.refuted, stats.into_iter().map(|(k, v)| (k.to_string(), v)).collect()))
}

#[pyfunction]
#[pyo3(signature = (sys, k_max, engine="monpc"))]
fn min_refutation_degree(py: Python<'_>, sys: &PySystem, k_max: usize, engine: &str) -> PyResult<Option<usize>> {
    let kind = self::engine(engine)?;
    py.detach(|| pc::min_refutation_degree(&sys.0, kind, k_max)).map_err(err)
}

#[pyclass(name = "ColoredGraph", from_py_object)]
#[derive(Clone)]
struct PyGraph(wl::ColoredGraph);

#[pymethods]
impl PyGraph {
    /// Parses the text or JSON graph format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        wl::ColoredGraph::parse(text).map(PyGraph).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (n, edges, colors=None))]
    fn undirected(n: usize, edges: Vec<(u32, u32)>, colors: Option<Vec<u32>>) -> PyResult<Self> {
        let mut g = wl::ColoredGraph::undirected(n, &edges).map_err(err)?;
        if let Some(c) = colors {
            g.colors = c;
            g.validate().map_err(err)?;
        }
        Ok(PyGraph(g))
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n
    }

    #[getter]
    fn colors(&self) -> Vec<u32> {
        self.0.colors.clone()
    }

    fn edges(&self) -> Vec<(u32, u32)> {
        self.0.edges()
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    fn __repr__(&self) -> String {
        format!("ColoredGraph(n={}, relations={})", self.0.n, self.0.relations.len())
    }
}

#[pyfunction]
fn wl_distinguishes(py: Python<'_>, g: &PyGraph, h: &PyGraph, dim: usize) -> PyResult<bool> {
    py.detach(|| wl::wl_distinguishes(&g.0, &h.0, dim)).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (g, h, dim_max=3))]
fn wl_sweep(py: Python<'_>, g: &PyGraph, h: &PyGraph, dim_max: usize) -> PyResult<Option<usize>> {
    py.detach(|| wl::wl_sweep(&g.0, &h.0, dim_max)).map_err(err)
}

#[pyfunction]
fn encode_iso_cnf(g: &PyGraph, h: &PyGraph) -> PyResult<PyCnf> {
    encoders::encode_iso_cnf(&g.0, &h.0).map(PyCnf).map_err(err)
}

/// The colored isomorphism system; with `mismatch_unsat` a color-class size
/// mismatch yields the trivially refuted system instead of an error.
#[pyfunction]
#[pyo3(signature = (g, h, field="Q", mismatch_unsat=false))]
fn encode_iso_poly(g: &PyGraph, h: &PyGraph, field: &str, mismatch_unsat: bool) -> PyResult<PySystem> {
    let m = if mismatch_unsat { encoders::ClassMismatch::Unsatisfiable } else { encoders::ClassMismatch::Error };
    encoders::encode_iso_poly_colored(&g.0, &h.0, self::field(field)?, m).map(PySystem).map_err(err)
}

#[pyfunction]
fn encode_nonreach(n: u32, edges: Vec<(u32, u32)>, source: u32, target: u32) -> PyResult<PyCnf> {
    encoders::encode_nonreach(n, &edges, source, target).map(PyCnf).map_err(err)
}

#[pyclass(name = "RelStructure", from_py_object)]
#[derive(Clone)]
struct PyStructure(logic::RelStructure);

#[pymethods]
impl PyStructure {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        logic::RelStructure::from_json(text).map(PyStructure).map_err(err)
    }

    #[staticmethod]
    fn undirected_graph(n: u32, edges: Vec<(u32, u32)>) -> PyResult<Self> {
        logic::RelStructure::undirected_graph(n, &edges).map(PyStructure).map_err(err)
    }

    #[new]
    fn new(n: u32) -> Self {
        PyStructure(logic::RelStructure::new(n))
    }

    fn add_relation(&mut self, name: &str, arity: usize) -> PyResult<()> {
        self.0.add_relation(name, arity).map_err(err)
    }

    fn add_tuple(&mut self, name: &str, tuple: Vec<u32>) -> PyResult<()> {
        self.0.add_tuple(name, &tuple).map_err(err)
    }

    fn holds(&self, name: &str, tuple: Vec<u32>) -> bool {
        self.0.holds(name, &tuple)
    }

    #[getter]
    fn n(&self) -> u32 {
        self.0.n
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }
}

#[pyfunction]
#[pyo3(signature = (a, t, k, full_subsets=false))]
fn k_consistency(py: Python<'_>, a: &PyStructure, t: &PyStructure, k: usize, full_subsets: bool) -> PyResult<bool> {
    let opts = encoders::KConsistencyOptions { full_subsets };
    py.detach(|| encoders::k_consistency_with(&a.0, &t.0, k, opts)).map(|r| r.consistent).map_err(err)
}

#[pyfunction]
fn encode_kconsistency_cnf(a: &PyStructure, t: &PyStructure, k: usize) -> PyResult<PyCnf> {
    encoders::encode_kconsistency_cnf(&a.0, &t.0, k).map(PyCnf).map_err(err)
}

fn formula(text: &str, constants: BTreeMap<String, u32>) -> PyResult<LfpFormula> {
    LfpFormula::parse(text, &constants).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (structure, sentence, constants=BTreeMap::new()))]
fn eval_poslfp(structure: &PyStructure, sentence: &str, constants: BTreeMap<String, u32>) -> PyResult<bool> {
    logic::eval_poslfp(&structure.0, &formula(sentence, constants)?).map_err(err)
}

/// The Horn encoding of model checking; the formula is refuted iff the
/// sentence holds.
#[pyfunction]
#[pyo3(signature = (structure, sentence, constants=BTreeMap::new()))]
fn horn_encode(structure: &PyStructure, sentence: &str, constants: BTreeMap<String, u32>) -> PyResult<PyCnf> {
    logic::horn_encode(&structure.0, &formula(sentence, constants)?).map(|h| PyCnf(h.cnf)).map_err(err)
}

#[pyclass(name = "ThresholdGame", from_py_object)]
#[derive(Clone)]
struct PyGame(games::ThresholdGame);

#[pymethods]
impl PyGame {
    #[new]
    #[pyo3(signature = (n, edges, theta, start=0))]
    fn new(n: usize, edges: Vec<(usize, usize)>, theta: Vec<usize>, start: usize) -> PyResult<Self> {
        let g = games::ThresholdGame { n, edges, theta, start };
        g.validate().map_err(err)?;
        Ok(PyGame(g))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        games::ThresholdGame::from_json(text).map(PyGame).map_err(err)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    /// Winning regions `(w0, w1)`.
    fn solve(&self) -> PyResult<(Vec<usize>, Vec<usize>)> {
        let s = games::solve_threshold_game(&self.0).map_err(err)?;
        Ok((s.w0, s.w1))
    }

    #[pyo3(signature = (field="Q"))]
    fn axioms(&self, field: &str) -> PyResult<PySystem> {
        games::encode_threshold_axioms(&self.0, self::field(field)?).map(|a| PySystem(a.system)).map_err(err)
    }

    /// Variable of the node indicator `X_v` in the axiom system.
    fn x(&self, v: usize) -> PyResult<u32> {
        let a = games::encode_threshold_axioms(&self.0, Field::Rationals).map_err(err)?;
        if v >= self.0.n {
            return Err(PyValueError::new_err(format!("node {v} out of range")));
        }
        Ok(a.x(v))
    }
}

#[pyclass(name = "CfiStructure", from_py_object)]
#[derive(Clone)]
struct PyCfi(cfi::CfiStructure);

#[pymethods]
impl PyCfi {
    /// `base` is a library name (k4, prism, cube, petersen, ...) or a file.
    #[new]
    fn new(base: &str, p: u32, lambda: Vec<u32>) -> PyResult<Self> {
        let b = CfiBase::load(base).map_err(err)?;
        cfi::build_cfi(&b, p, &lambda).map(PyCfi).map_err(err)
    }

    #[getter]
    fn p(&self) -> u32 {
        self.0.p
    }

    #[getter]
    fn lambda(&self) -> Vec<u32> {
        self.0.lambda.clone()
    }

    fn lambda_sum(&self) -> u32 {
        self.0.lambda_sum()
    }

    fn universe_size(&self) -> usize {
        self.0.universe_size()
    }

    fn isomorphic(&self, other: &PyCfi) -> PyResult<bool> {
        cfi::cfi_isomorphic(&self.0, &other.0).map_err(err)
    }

    fn apply_shift(&self, pi: Vec<u32>) -> PyResult<Self> {
        cfi::apply_shift(&self.0, &pi).map(PyCfi).map_err(err)
    }

    fn to_graph(&self) -> PyGraph {
        PyGraph(cfi::to_graph(&self.0))
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }
}

#[pyfunction]
fn cfi_twisted_pair(base: &str, p: u32) -> PyResult<(PyCfi, PyCfi)> {
    let b = CfiBase::load(base).map_err(err)?;
    let (x, y) = cfi::twisted_pair(&b, p).map_err(err)?;
    Ok((PyCfi(x), PyCfi(y)))
}

#[pyfunction]
fn cfi_automorphism_dimension(base: &str, p: u32) -> PyResult<usize> {
    let b = CfiBase::load(base).map_err(err)?;
    cfi::automorphism_space(&b, p).map(|a| a.dimension()).map_err(err)
}

#[pymodule]
pub fn prooflab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCnf>()?;
    m.add_class::<PySystem>()?;
    m.add_class::<PyGraph>()?;
    m.add_class::<PyStructure>()?;
    m.add_class::<PyGame>()?;
    m.add_class::<PyCfi>()?;
    m.add_function(wrap_pyfunction!(horn_refute, m)?)?;
    m.add_function(wrap_pyfunction!(kres_refutes, m)?)?;
    m.add_function(wrap_pyfunction!(two_sat, m)?)?;
    m.add_function(wrap_pyfunction!(saturate, m)?)?;
    m.add_function(wrap_pyfunction!(min_refutation_degree, m)?)?;
    m.add_function(wrap_pyfunction!(wl_distinguishes, m)?)?;
    m.add_function(wrap_pyfunction!(wl_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(encode_iso_cnf, m)?)?;
    m.add_function(wrap_pyfunction!(encode_iso_poly, m)?)?;
    m.add_function(wrap_pyfunction!(encode_nonreach, m)?)?;
    m.add_function(wrap_pyfunction!(k_consistency, m)?)?;
    m.add_function(wrap_pyfunction!(encode_kconsistency_cnf, m)?)?;
    m.add_function(wrap_pyfunction!(eval_poslfp, m)?)?;
    m.add_function(wrap_pyfunction!(horn_encode, m)?)?;
    m.add_function(wrap_pyfunction!(cfi_twisted_pair, m)?)?;
    m.add_function(wrap_pyfunction!(cfi_automorphism_dimension, m)?)?;
    Ok(())
}
