//! Python bindings. Structured results come back as plain dicts and lists
//! (the same JSON the CLI prints); data are `BranchDatum` objects.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyList, PyString};
use serde::Serialize;

use conic_hurwitz_core as core;
use core::{AngleVector, Certification, OracleResult, SearchConfig};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(value_error)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A degree together with one partition of it per branch point.
#[pyclass(
    name = "BranchDatum",
    module = "conic_hurwitz",
    frozen,
    eq,
    hash,
    skip_from_py_object
)]
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PyBranchDatum {
    inner: core::BranchDatum,
}

#[pymethods]
impl PyBranchDatum {
    /// Parse `"4: 3,1 | 2,2 | 2,2"` or the JSON form.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        core::parse_datum(text)
            .map(|inner| Self { inner })
            .map_err(value_error)
    }

    /// Build from a degree and a list of rows.
    #[staticmethod]
    fn from_rows(degree: u32, rows: Vec<Vec<u32>>) -> PyResult<Self> {
        let rows = rows
            .into_iter()
            .map(core::Partition::new)
            .collect::<Result<Vec<_>, _>>()
            .map_err(value_error)?;
        core::BranchDatum::new(degree, rows)
            .map(|inner| Self { inner })
            .map_err(value_error)
    }

    #[getter]
    fn degree(&self) -> u32 {
        self.inner.degree()
    }

    #[getter]
    fn rows(&self) -> Vec<Vec<u32>> {
        self.inner
            .rows()
            .iter()
            .map(|r| r.parts().to_vec())
            .collect()
    }

    fn validate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.validate())
    }

    fn is_valid(&self) -> bool {
        self.inner.is_valid()
    }

    fn canonical(&self) -> Self {
        Self {
            inner: self.inner.canonical(),
        }
    }

    /// Same datum up to the order of the rows.
    fn equivalent(&self, other: &Self) -> bool {
        self.inner.equivalent(&other.inner)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(value_error)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("BranchDatum('{}')", self.inner)
    }
}

/// A datum argument: a `BranchDatum` or its text form.
struct DatumArg(core::BranchDatum);

impl<'a, 'py> FromPyObject<'a, 'py> for DatumArg {
    type Error = PyErr;

    fn extract(ob: Borrowed<'a, 'py, PyAny>) -> PyResult<Self> {
        if let Ok(d) = ob.cast::<PyBranchDatum>() {
            return Ok(DatumArg(d.get().inner.clone()));
        }
        let text: String = ob.extract()?;
        core::parse_datum(&text).map(DatumArg).map_err(value_error)
    }
}

impl DatumArg {
    fn get(self) -> core::BranchDatum {
        self.0
    }
}

/// Angles as `"1/2,2/3"` or a list of strings and ints.
fn angles(ob: &Bound<'_, PyAny>) -> PyResult<AngleVector> {
    let text = if let Ok(s) = ob.cast::<PyString>() {
        s.to_str()?.to_owned()
    } else if let Ok(list) = ob.cast::<PyList>() {
        list.iter()
            .map(|item| item.str().map(|s| s.to_string()))
            .collect::<PyResult<Vec<_>>>()?
            .join(",")
    } else {
        return Err(value_error("angles must be a string or a list"));
    };
    core::parse_angles(&text).map_err(value_error)
}

fn angle_strings(v: &AngleVector) -> Vec<String> {
    v.entries().iter().map(|r| r.to_string()).collect()
}

/// Admissibility verdict as a dict with `admissible`, `case`, `distance`, ...
#[pyfunction]
fn decide_admissible<'py>(
    py: Python<'py>,
    beta: &Bound<'py, PyAny>,
) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &core::decide_admissible(&angles(beta)?))
}

/// Closed-form rule for entries in (0, 1).
#[pyfunction]
fn troyanov_admissible(beta: &Bound<'_, PyAny>) -> PyResult<bool> {
    core::troyanov_admissible(&angles(beta)?).map_err(value_error)
}

#[pyfunction]
fn strip_units(beta: &Bound<'_, PyAny>) -> PyResult<Vec<String>> {
    Ok(angle_strings(&core::strip_units(&angles(beta)?)))
}

#[pyfunction]
fn lift_angles(datum: DatumArg, beta: &Bound<'_, PyAny>) -> PyResult<Vec<String>> {
    let lifted = core::lift_angles(&angles(beta)?, &datum.get()).map_err(value_error)?;
    Ok(angle_strings(&lifted))
}

/// Certificate dict, or `None`. With `beta` only that vector is tried;
/// otherwise the search runs.
#[pyfunction]
#[pyo3(signature = (datum, beta=None, max_den=6, max_num=6))]
fn certify<'py>(
    py: Python<'py>,
    datum: DatumArg,
    beta: Option<&Bound<'py, PyAny>>,
    max_den: u32,
    max_num: u32,
) -> PyResult<Option<Bound<'py, PyAny>>> {
    let datum = datum.get();
    let cert = match beta {
        Some(b) => match core::certify_exceptional(&datum, &angles(b)?).map_err(value_error)? {
            Certification::Certified(c) => Some(*c),
            Certification::Refused(_) => None,
        },
        None => {
            let config = SearchConfig {
                max_denominator: max_den,
                max_numerator: max_num,
                extra_candidates: Vec::new(),
            };
            py.detach(|| core::search_certificate(&datum, &config))
        }
    };
    cert.map(|c| to_py(py, &c)).transpose()
}

/// Re-checks a certificate given as a dict or a JSON string.
#[pyfunction]
fn verify_certificate(py: Python<'_>, cert: &Bound<'_, PyAny>) -> PyResult<bool> {
    let text = if let Ok(s) = cert.cast::<PyString>() {
        s.to_str()?.to_owned()
    } else {
        py.import("json")?
            .call_method1("dumps", (cert,))?
            .extract()?
    };
    let cert: core::ExceptionalityCertificate = serde_json::from_str(&text).map_err(value_error)?;
    Ok(core::verify_certificate(&cert))
}

/// `{"result": "realizable" | "unrealizable" | "unknown", ...}`.
#[pyfunction]
#[pyo3(signature = (datum, budget=None))]
fn find_witness<'py>(
    py: Python<'py>,
    datum: DatumArg,
    budget: Option<u64>,
) -> PyResult<Bound<'py, PyAny>> {
    let datum = datum.get();
    let result = py.detach(|| core::find_witness(&datum, budget));
    let mut value = serde_json::json!({ "result": result.label() });
    match result {
        OracleResult::Realizable(w) => {
            value["witness"] = serde_json::to_value(&w).map_err(value_error)?
        }
        OracleResult::Unknown { nodes } => value["nodes"] = nodes.into(),
        OracleResult::Unrealizable => {}
    }
    to_py(py, &value)
}

/// Checks permutations in cycle notation, e.g. `["(1 2)", "(1 2)"]`.
#[pyfunction]
fn verify_witness(datum: DatumArg, witness: Vec<String>) -> PyResult<bool> {
    let datum = datum.get();
    let w = core::MonodromyWitness::from_notation(datum.degree() as usize, &witness)
        .map_err(value_error)?;
    Ok(core::verify_witness(&datum, &w.perms))
}

#[pyfunction]
fn enumerate_data(degree: u32, branch_points: usize) -> Vec<PyBranchDatum> {
    core::enumerate_data(degree, branch_points)
        .map(|inner| PyBranchDatum { inner })
        .collect()
}

/// Every family instance of a degree, as dicts.
#[pyfunction]
fn families<'py>(py: Python<'py>, degree: u32) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &core::all_instances(degree))
}

#[pyfunction]
fn nonprime_witness<'py>(py: Python<'py>, degree: u32) -> PyResult<Bound<'py, PyAny>> {
    let inst = core::nonprime_witness(degree).map_err(value_error)?;
    to_py(py, &inst)
}

#[pymodule]
fn conic_hurwitz(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBranchDatum>()?;
    m.add_function(wrap_pyfunction!(decide_admissible, m)?)?;
    m.add_function(wrap_pyfunction!(troyanov_admissible, m)?)?;
    m.add_function(wrap_pyfunction!(strip_units, m)?)?;
    m.add_function(wrap_pyfunction!(lift_angles, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(verify_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(find_witness, m)?)?;
    m.add_function(wrap_pyfunction!(verify_witness, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_data, m)?)?;
    m.add_function(wrap_pyfunction!(families, m)?)?;
    m.add_function(wrap_pyfunction!(nonprime_witness, m)?)?;
    Ok(())
}
