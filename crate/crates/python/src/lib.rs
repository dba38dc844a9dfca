//! Python bindings: parse and elaborate specifications, check contracts, and
//! run the batch checker.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use sc_core::algebra::{
    check_compatibility, check_composed_compatibility, check_composed_consistency, check_consistency,
    check_refinement, compose_contracts, ComposedContract, Concrete, ProjectionStatus, Side,
};
use sc_core::cli::{parse_grid_flag, run_check, CheckOptions, Input};
use sc_core::engine::{Engine, EngineConfig, Verdict};
use sc_core::model::{format_rational, Contract};
use sc_core::syntax::{format_spec as format_document, parse_assertion, parse_document, parse_spec};
use sc_core::types::{elaborate, resolve_operator, Program};

fn value_error(diags: impl IntoIterator<Item = impl ToString>) -> PyErr {
    let lines: Vec<String> = diags.into_iter().map(|d| d.to_string()).collect();
    PyValueError::new_err(lines.join("\n"))
}

/// Outcome of one check.
#[pyclass(name = "Verdict", frozen, module = "structural_contracts")]
struct PyVerdict {
    /// "proved", "falsified" or "unknown".
    #[pyo3(get)]
    status: String,
    #[pyo3(get)]
    method: Option<String>,
    /// Variable name to rational, as `p` or `p/q` strings.
    #[pyo3(get)]
    witness: Option<BTreeMap<String, String>>,
    #[pyo3(get)]
    reason: Option<String>,
    /// For refinements: "environment" or "implementation" when falsified.
    #[pyo3(get)]
    side: Option<String>,
}

impl PyVerdict {
    fn new(v: &Verdict, side: Option<Side>) -> Self {
        let (method, reason) = match v {
            Verdict::Proved { method, .. } | Verdict::Falsified { method, .. } => (Some(method.to_string()), None),
            Verdict::Unknown { reason } => (None, Some(reason.clone())),
        };
        PyVerdict {
            status: v.label().to_string(),
            method,
            witness: v.witness().map(|w| w.iter().map(|(k, x)| (k.clone(), format_rational(x))).collect()),
            reason,
            side: side.map(|s| match s {
                Side::Environment => "environment".to_string(),
                Side::Implementation => "implementation".to_string(),
            }),
        }
    }
}

#[pymethods]
impl PyVerdict {
    #[getter]
    fn proved(&self) -> bool {
        self.status == "proved"
    }

    #[getter]
    fn falsified(&self) -> bool {
        self.status == "falsified"
    }

    fn __repr__(&self) -> String {
        let mut s = format!("Verdict({}", self.status);
        if let Some(m) = &self.method {
            s.push_str(&format!(", method={m}"));
        }
        if let Some(w) = &self.witness {
            let vals: Vec<String> = w.iter().map(|(k, v)| format!("{k}={v}")).collect();
            s.push_str(&format!(", witness={{{}}}", vals.join(", ")));
        }
        s.push(')');
        s
    }
}

/// The decision ladder with its settings.
#[pyclass(name = "Engine", frozen, module = "structural_contracts")]
struct PyEngine(Engine);

#[pymethods]
impl PyEngine {
    #[new]
    #[pyo3(signature = (seed = 0, samples = 10_000, dnf_cap = 4096))]
    fn new(seed: u64, samples: usize, dnf_cap: usize) -> Self {
        PyEngine(Engine::new(EngineConfig { seed, samples, dnf_cap, ..EngineConfig::default() }))
    }

    fn check_satisfiable(&self, formula: &str) -> PyResult<PyVerdict> {
        let f = parse_assertion(formula).map_err(value_error)?;
        Ok(PyVerdict::new(&self.0.check_satisfiable(&f), None))
    }

    fn check_valid(&self, formula: &str) -> PyResult<PyVerdict> {
        let f = parse_assertion(formula).map_err(value_error)?;
        Ok(PyVerdict::new(&self.0.check_valid(&f), None))
    }

    fn check_implication(&self, premise: &str, conclusion: &str) -> PyResult<PyVerdict> {
        let p = parse_assertion(premise).map_err(value_error)?;
        let c = parse_assertion(conclusion).map_err(value_error)?;
        Ok(PyVerdict::new(&self.0.check_implication(&p, &c), None))
    }
}

fn engine_or_default(engine: Option<PyRef<'_, PyEngine>>) -> Engine {
    engine.map(|e| e.0.clone()).unwrap_or_default()
}

#[pyclass(name = "Contract", frozen, module = "structural_contracts")]
struct PyContract(Contract);

#[pymethods]
impl PyContract {
    #[getter]
    fn name(&self) -> &str {
        &self.0.name
    }

    #[getter]
    fn subject(&self) -> &str {
        &self.0.subject.name
    }

    #[getter]
    fn assumption(&self) -> String {
        self.0.assumption.to_string()
    }

    #[getter]
    fn guarantee(&self) -> String {
        self.0.guarantee.to_string()
    }

    #[pyo3(signature = (engine = None))]
    fn check_compatibility(&self, engine: Option<PyRef<'_, PyEngine>>) -> PyVerdict {
        PyVerdict::new(&check_compatibility(&self.0, &engine_or_default(engine)), None)
    }

    #[pyo3(signature = (engine = None))]
    fn check_consistency(&self, engine: Option<PyRef<'_, PyEngine>>) -> PyVerdict {
        PyVerdict::new(&check_consistency(&self.0, &engine_or_default(engine)), None)
    }

    /// Whether this contract refines `abstract`.
    #[pyo3(signature = (abstract_, engine = None))]
    fn refines(&self, abstract_: PyRef<'_, PyContract>, engine: Option<PyRef<'_, PyEngine>>) -> PyResult<PyVerdict> {
        let r = check_refinement(Concrete::Contract(&self.0), &abstract_.0, &engine_or_default(engine))
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyVerdict::new(&r.verdict, r.side))
    }

    fn __repr__(&self) -> String {
        format!("Contract({} for {}: assume {}; guarantee {})", self.0.name, self.0.subject.name, self.0.assumption, self.0.guarantee)
    }
}

#[pyclass(name = "ComposedContract", frozen, module = "structural_contracts")]
struct PyComposed(ComposedContract);

#[pymethods]
impl PyComposed {
    #[getter]
    fn name(&self) -> String {
        self.0.name()
    }

    #[getter]
    fn assumption(&self) -> String {
        self.0.assumption.to_string()
    }

    #[getter]
    fn guarantee(&self) -> String {
        self.0.guarantee.to_string()
    }

    /// "exact" or "quantified_residue".
    #[getter]
    fn status(&self) -> &'static str {
        match self.0.status {
            ProjectionStatus::Exact => "exact",
            ProjectionStatus::QuantifiedResidue => "quantified_residue",
        }
    }

    #[pyo3(signature = (engine = None))]
    fn check_compatibility(&self, engine: Option<PyRef<'_, PyEngine>>) -> PyVerdict {
        PyVerdict::new(&check_composed_compatibility(&self.0, &engine_or_default(engine)), None)
    }

    #[pyo3(signature = (engine = None))]
    fn check_consistency(&self, engine: Option<PyRef<'_, PyEngine>>) -> PyVerdict {
        PyVerdict::new(&check_composed_consistency(&self.0, &engine_or_default(engine)), None)
    }

    #[pyo3(signature = (abstract_, engine = None))]
    fn refines(&self, abstract_: PyRef<'_, PyContract>, engine: Option<PyRef<'_, PyEngine>>) -> PyResult<PyVerdict> {
        let r = check_refinement(Concrete::Composed(&self.0), &abstract_.0, &engine_or_default(engine))
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyVerdict::new(&r.verdict, r.side))
    }

    fn __repr__(&self) -> String {
        format!("ComposedContract({}: assume {}; guarantee {})", self.0.name(), self.0.assumption, self.0.guarantee)
    }
}

/// A parsed and type-checked specification.
#[pyclass(name = "Specification", frozen, module = "structural_contracts")]
struct PySpec(Program);

#[pymethods]
impl PySpec {
    /// Raises `ValueError` with every diagnostic on syntax or type errors.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        let doc = parse_spec(text).map_err(value_error)?;
        let program = elaborate(&doc);
        if program.has_errors() {
            return Err(value_error(program.all_diagnostics()));
        }
        Ok(PySpec(program))
    }

    #[getter]
    fn contracts(&self) -> Vec<String> {
        self.0.contracts.keys().cloned().collect()
    }

    #[getter]
    fn obligations(&self) -> Vec<String> {
        self.0.obligations.iter().map(|o| o.name.clone()).collect()
    }

    fn contract(&self, name: &str) -> PyResult<PyContract> {
        self.0
            .contracts
            .get(name)
            .cloned()
            .map(PyContract)
            .ok_or_else(|| PyValueError::new_err(format!("no contract named `{name}`")))
    }

    /// Composes `(contract, instance)` pairs through the named operator.
    #[pyo3(signature = (operator, parts, engine = None))]
    fn compose(
        &self,
        operator: &str,
        parts: Vec<(String, String)>,
        engine: Option<PyRef<'_, PyEngine>>,
    ) -> PyResult<PyComposed> {
        let mut bindings = Vec::new();
        for (c, inst) in parts {
            bindings.push((inst, self.contract(&c)?.0));
        }
        let args: Vec<&str> = bindings.iter().map(|(_, c)| c.subject.name.as_str()).collect();
        let op = resolve_operator(operator, &args, &self.0.operators, &self.0.components)
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        let cc = compose_contracts(&op, &bindings, &engine_or_default(engine))
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyComposed(cc))
    }
}

/// Runs the batch checker on specification text and returns the JSON report.
#[pyfunction]
#[pyo3(signature = (text, obligations = None, seed = 0, samples = 10_000, dnf_cap = 4096, grid = None, oracle = false, deterministic = true))]
#[allow(clippy::too_many_arguments)]
fn check(
    text: &str,
    obligations: Option<Vec<String>>,
    seed: u64,
    samples: usize,
    dnf_cap: usize,
    grid: Option<&str>,
    oracle: bool,
    deterministic: bool,
) -> PyResult<String> {
    let grid = grid.map(parse_grid_flag).transpose().map_err(PyValueError::new_err)?.unwrap_or_default();
    let opts = CheckOptions {
        obligations: obligations.unwrap_or_default(),
        grid,
        engine: EngineConfig { seed, samples, dnf_cap, ..EngineConfig::default() },
        deterministic,
        oracle,
    };
    let input = Input { name: "<string>".into(), text: text.to_string() };
    Ok(run_check(&[input], &opts).to_json())
}

/// Canonical formatting of specification text.
#[pyfunction]
fn format_spec(text: &str) -> PyResult<String> {
    let (doc, diags) = parse_document(text);
    if !diags.is_empty() {
        return Err(value_error(diags));
    }
    Ok(format_document(&doc))
}

#[pymodule]
fn structural_contracts(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyVerdict>()?;
    m.add_class::<PyEngine>()?;
    m.add_class::<PyContract>()?;
    m.add_class::<PyComposed>()?;
    m.add_class::<PySpec>()?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(format_spec, m)?)?;
    Ok(())
}
