//! Python bindings. The extension module is importable as `latk`.

use std::sync::Arc;

use latk_core::data;
use latk_core::degen::{check_expected, classify_case as classify, DegenerationCase};
use latk_core::discform::{self, GenusSymbol};
use latk_core::intlinalg::{self, IntMatrix};
use latk_core::lattice::{self, Lattice, Sublattice};
use latk_core::niemeier::{build_niemeier, verify_niemeier as verify};
use latk_core::roots::{self, RootComponent, RootType};
use num_bigint::BigInt;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix(rows: Vec<Vec<BigInt>>) -> PyResult<IntMatrix> {
    let cols = rows.first().map_or(0, Vec::len);
    IntMatrix::from_rows(&rows, cols).map_err(err)
}

fn symbol(s: &str) -> PyResult<GenusSymbol> {
    discform::parse_symbol(s).map_err(err)
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

fn component_label(c: &RootComponent) -> String {
    RootType::new(vec![(c.kind, c.rank())]).map(|t| t.to_string()).unwrap_or_default()
}

/// An integral lattice given by a symmetric Gram matrix.
#[pyclass(name = "Lattice", module = "latk", frozen)]
struct PyLattice {
    inner: Arc<Lattice>,
}

impl PyLattice {
    fn wrap(l: Lattice) -> Self {
        PyLattice { inner: Arc::new(l) }
    }

    fn sublattice(&self, rows: Vec<Vec<BigInt>>) -> PyResult<Sublattice> {
        let gens = matrix(rows)?;
        if gens.rows() > 0 && gens.cols() != self.inner.rank() {
            return Err(PyValueError::new_err(format!(
                "vectors have {} coordinates, lattice rank is {}",
                gens.cols(),
                self.inner.rank()
            )));
        }
        Sublattice::spanned_by(self.inner.clone(), &gens).map_err(err)
    }
}

#[pymethods]
impl PyLattice {
    #[new]
    fn new(gram: Vec<Vec<BigInt>>) -> PyResult<Self> {
        Ok(Self::wrap(Lattice::new(matrix(gram)?).map_err(err)?))
    }

    /// Root lattice of an ADE label such as `"E_8"` or `"2A_1+D_4"`, negative definite.
    #[staticmethod]
    fn ade(label: &str) -> PyResult<Self> {
        Ok(Self::wrap(data::load_ade(label).map_err(err)?))
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    #[getter]
    fn det(&self) -> BigInt {
        self.inner.det()
    }

    #[getter]
    fn gram(&self) -> Vec<Vec<BigInt>> {
        self.inner.gram().row_vecs()
    }

    /// `(positive, negative, zero)` inertia.
    #[getter]
    fn signature(&self) -> (usize, usize, usize) {
        let s = self.inner.signature();
        (s.plus, s.minus, s.zero)
    }

    fn is_even(&self) -> bool {
        self.inner.is_even()
    }

    fn is_unimodular(&self) -> bool {
        self.inner.is_unimodular()
    }

    fn is_negative_definite(&self) -> bool {
        self.inner.is_negative_definite()
    }

    fn direct_sum(&self, other: &PyLattice) -> Self {
        Self::wrap(self.inner.direct_sum(&other.inner))
    }

    fn rescale(&self, m: i64) -> PyResult<Self> {
        Ok(Self::wrap(self.inner.rescale(m).map_err(err)?))
    }

    /// Canonical genus symbol of the discriminant form (even lattices only).
    fn genus_symbol(&self) -> PyResult<String> {
        let s = discform::genus_symbol(&self.inner).map_err(err)?;
        Ok(discform::canonicalize(&s).map_err(err)?.to_string())
    }

    /// Whether the discriminant forms are isometric, by exhaustive search
    /// over forms of order at most `bound`.
    #[pyo3(signature = (other, bound = 4096))]
    fn discriminant_isometric(&self, other: &PyLattice, bound: u128) -> PyResult<bool> {
        let a = discform::discriminant_form(&self.inner).map_err(err)?;
        let b = discform::discriminant_form(&other.inner).map_err(err)?;
        discform::fqf_isomorphic_bounded(&a, &b, bound).map_err(err)
    }

    /// Roots, one per `±` pair (negative definite lattices only).
    fn roots(&self) -> PyResult<Vec<Vec<i64>>> {
        roots::enumerate_roots(&self.inner).map_err(err)
    }

    fn root_type(&self) -> PyResult<String> {
        Ok(roots::root_type(&self.inner).map_err(err)?.to_string())
    }

    /// `{"count", "type", "components": [{"type", "simple_roots"}]}`.
    fn root_system<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let rec = roots::root_system(&self.inner).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("count", 2 * rec.roots.len())?;
        d.set_item("type", rec.label())?;
        let comps = rec
            .components
            .iter()
            .map(|c| {
                let cd = PyDict::new(py);
                cd.set_item("type", component_label(c))?;
                cd.set_item("simple_roots", c.simple_roots.clone())?;
                Ok(cd)
            })
            .collect::<PyResult<Vec<_>>>()?;
        d.set_item("components", comps)?;
        Ok(d)
    }

    /// Basis of the orthogonal complement of the span of `rows`.
    fn orthogonal_complement(&self, rows: Vec<Vec<BigInt>>) -> PyResult<Vec<Vec<BigInt>>> {
        let s = self.sublattice(rows)?;
        Ok(lattice::orthogonal_complement(&self.inner, &s).map_err(err)?.basis().row_vecs())
    }

    /// Basis of the primitive closure of the span of `rows`.
    fn primitive_closure(&self, rows: Vec<Vec<BigInt>>) -> PyResult<Vec<Vec<BigInt>>> {
        let s = self.sublattice(rows)?;
        Ok(lattice::primitive_closure(&self.inner, &s).map_err(err)?.basis().row_vecs())
    }

    /// Gram matrix of the span of `rows`.
    fn restrict(&self, rows: Vec<Vec<BigInt>>) -> PyResult<Self> {
        Ok(Self::wrap(self.sublattice(rows)?.lattice()))
    }

    fn __repr__(&self) -> String {
        format!("Lattice(rank={}, det={})", self.inner.rank(), self.inner.det())
    }

    fn __eq__(&self, other: &PyLattice) -> bool {
        self.inner.gram() == other.inner.gram()
    }
}

/// The Niemeier lattice `N_j`, `1 <= j <= 23`, negative definite.
#[pyfunction]
fn niemeier(j: usize) -> PyResult<PyLattice> {
    Ok(PyLattice::wrap(build_niemeier(j).map_err(err)?))
}

/// Verify `N_j`: returns a dict with the individual checks.
#[pyfunction]
fn verify_niemeier<'py>(py: Python<'py>, j: usize) -> PyResult<Bound<'py, PyDict>> {
    let l = build_niemeier(j).map_err(err)?;
    let r = verify(&l, j).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("even", r.even)?;
    d.set_item("det", r.det.clone())?;
    d.set_item("rank", r.rank)?;
    d.set_item("root_type", r.root_type.as_ref().map(ToString::to_string).unwrap_or_default())?;
    d.set_item("expected", r.expected.to_string())?;
    d.set_item("root_count", r.root_count)?;
    d.set_item("passed", r.passed())?;
    d.set_item("summary", r.to_string())?;
    Ok(d)
}

#[pyfunction]
fn canonicalize(sym: &str) -> PyResult<String> {
    Ok(discform::canonicalize(&symbol(sym)?).map_err(err)?.to_string())
}

/// Canonical symbol of the negated form.
#[pyfunction]
fn negate_symbol(sym: &str) -> PyResult<String> {
    Ok(discform::negate_symbol(&symbol(sym)?).map_err(err)?.to_string())
}

/// Signature modulo 8 of the form described by a symbol.
#[pyfunction]
fn signature_mod8(sym: &str) -> PyResult<u8> {
    discform::symbol_signature_mod8(&symbol(sym)?).map_err(err)
}

#[pyfunction]
fn hnf(rows: Vec<Vec<BigInt>>) -> PyResult<Vec<Vec<BigInt>>> {
    Ok(intlinalg::hnf(&matrix(rows)?).map_err(err)?.h.row_vecs())
}

/// Elementary divisors.
#[pyfunction]
fn snf(rows: Vec<Vec<BigInt>>) -> PyResult<Vec<BigInt>> {
    Ok(intlinalg::snf(&matrix(rows)?).map_err(err)?.diagonal())
}

/// Left kernel basis `{x : x M = 0}`.
#[pyfunction]
fn kernel(rows: Vec<Vec<BigInt>>) -> PyResult<Vec<Vec<BigInt>>> {
    Ok(intlinalg::kernel_basis(&matrix(rows)?).map_err(err)?.row_vecs())
}

/// Classify a degeneration case given as JSON text. Returns the record and,
/// when the case has an `expected` block, the per-field comparison.
#[pyfunction]
fn classify_case<'py>(py: Python<'py>, case_json: &str) -> PyResult<Bound<'py, PyDict>> {
    let case = DegenerationCase::from_json(case_json).map_err(err)?;
    let rec = classify(&case).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("record", json_to_py(py, &rec.to_json())?)?;
    if let Some(exp) = &case.expected {
        let rep = check_expected(&rec, exp).map_err(err)?;
        let checks = serde_json::to_value(&rep.checks).map_err(err)?;
        d.set_item("checks", json_to_py(py, &checks)?)?;
        d.set_item("expected_ok", rep.passed())?;
    }
    Ok(d)
}

/// Per-table consistency results over the embedded classification tables.
#[pyfunction]
fn check_tables<'py>(py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let rows = data::load_tables().map_err(err)?;
    data::check_tables(&rows)
        .into_iter()
        .map(|c| {
            let d = PyDict::new(py);
            d.set_item("table", c.table)?;
            d.set_item("rows", c.rows)?;
            d.set_item("passed", c.passed)?;
            d.set_item("failures", c.failures)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
#[pyo3(name = "latk")]
fn latk_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLattice>()?;
    m.add_function(wrap_pyfunction!(niemeier, m)?)?;
    m.add_function(wrap_pyfunction!(verify_niemeier, m)?)?;
    m.add_function(wrap_pyfunction!(canonicalize, m)?)?;
    m.add_function(wrap_pyfunction!(negate_symbol, m)?)?;
    m.add_function(wrap_pyfunction!(signature_mod8, m)?)?;
    m.add_function(wrap_pyfunction!(hnf, m)?)?;
    m.add_function(wrap_pyfunction!(snf, m)?)?;
    m.add_function(wrap_pyfunction!(kernel, m)?)?;
    m.add_function(wrap_pyfunction!(classify_case, m)?)?;
    m.add_function(wrap_pyfunction!(check_tables, m)?)?;
    Ok(())
}
