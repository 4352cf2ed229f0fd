//! Python bindings. Structured results cross the boundary as JSON and come
//! back out as plain Python dicts and lists.

use cosemo_core::diagnostic::has_errors;
use cosemo_core::{
    classify_all, emit_json, emit_text, explain as explain_code, explore as explore_model, fixtures, parse_json,
    parse_text, run_script as run_model_script, to_dot as render_dot, to_mermaid as render_mermaid, validate,
    Bounds, Diagnostic, Query, RenderOptions, ScriptStep, Token,
};
use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;
use serde::de::DeserializeOwned;

fn to_py(py: Python<'_>, json: &str) -> PyResult<Py<PyAny>> {
    let loads = PyModule::import(py, "json")?.getattr("loads")?;
    Ok(loads.call1((json,))?.unbind())
}

fn from_py<T: DeserializeOwned>(py: Python<'_>, value: &Bound<'_, PyAny>, what: &str) -> PyResult<T> {
    let dumps = PyModule::import(py, "json")?.getattr("dumps")?;
    let text: String = dumps.call1((value,))?.extract()?;
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(format!("invalid {what}: {e}")))
}

fn diagnostics_error(diagnostics: &[Diagnostic]) -> PyErr {
    let lines: Vec<String> = diagnostics.iter().map(ToString::to_string).collect();
    PyValueError::new_err(lines.join("\n"))
}

fn diagnostics_json(diagnostics: &[Diagnostic]) -> String {
    let lines: Vec<String> = diagnostics.iter().map(Diagnostic::to_json_line).collect();
    format!("[{}]", lines.join(","))
}

#[pyclass(name = "Model", module = "cosemo")]
struct PyModel {
    inner: cosemo_core::Model,
}

impl PyModel {
    fn from_parse(parsed: cosemo_core::ParseResult) -> PyResult<Self> {
        match parsed.model {
            Some(inner) => Ok(Self { inner }),
            None => Err(diagnostics_error(&parsed.diagnostics)),
        }
    }

    fn require_valid(&self) -> PyResult<()> {
        let diagnostics = validate(&self.inner);
        if has_errors(&diagnostics) {
            return Err(diagnostics_error(&diagnostics));
        }
        Ok(())
    }
}

#[pymethods]
impl PyModel {
    /// Parses `.csm` text. Raises `ValueError` listing the syntax errors.
    #[staticmethod]
    #[pyo3(signature = (text, path = "<string>"))]
    fn parse(text: &str, path: &str) -> PyResult<Self> {
        Self::from_parse(parse_text(text, path))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Self::from_parse(parse_json(text.as_bytes()))
    }

    fn to_text(&self) -> String {
        emit_text(&self.inner)
    }

    fn to_json(&self) -> String {
        String::from_utf8(emit_json(&self.inner)).expect("JSON is UTF-8")
    }

    #[getter]
    fn name(&self) -> &str {
        &self.inner.name
    }

    #[getter]
    fn roles(&self) -> Vec<String> {
        self.inner.roles.iter().map(ToString::to_string).collect()
    }

    #[getter]
    fn classes(&self) -> Vec<String> {
        self.inner.classes.iter().map(|c| c.name.to_string()).collect()
    }

    #[getter]
    fn processes(&self) -> Vec<String> {
        self.inner.processes.iter().map(|p| p.name.to_string()).collect()
    }

    /// Diagnostics as a list of dicts with `code`, `severity`, `site`, ...
    fn validate(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &diagnostics_json(&validate(&self.inner)))
    }

    fn classify(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let report = classify_all(&self.inner).map_err(|e| PyValueError::new_err(e.to_string()))?;
        to_py(py, &report.to_json())
    }

    fn input_classes(&self, process: &str) -> PyResult<Vec<String>> {
        let inputs = self
            .inner
            .input_classes(process)
            .map_err(|e| PyKeyError::new_err(e.to_string()))?;
        Ok(inputs.iter().map(ToString::to_string).collect())
    }

    fn output_classes(&self, process: &str) -> PyResult<Vec<String>> {
        let outputs = self
            .inner
            .output_classes(process)
            .map_err(|e| PyKeyError::new_err(e.to_string()))?;
        Ok(outputs.iter().map(ToString::to_string).collect())
    }

    fn shared_processes(&self, r1: &str, r2: &str) -> PyResult<Vec<String>> {
        let shared = self
            .inner
            .shared_processes(r1, r2)
            .map_err(|e| PyKeyError::new_err(e.to_string()))?;
        Ok(shared.iter().map(ToString::to_string).collect())
    }

    /// `(class, producer, consumer)` triples.
    fn shared_classes(&self, r1: &str, r2: &str) -> PyResult<Vec<(String, String, String)>> {
        let shared = self
            .inner
            .shared_classes(r1, r2)
            .map_err(|e| PyKeyError::new_err(e.to_string()))?;
        Ok(shared
            .into_iter()
            .map(|s| (s.class.to_string(), s.producer.to_string(), s.consumer.to_string()))
            .collect())
    }

    #[pyo3(signature = (show_privileges = false))]
    fn to_dot(&self, show_privileges: bool) -> PyResult<String> {
        render_dot(&self.inner, RenderOptions { show_privileges })
            .map_err(|cosemo_core::RenderError::InvalidModel(d)| diagnostics_error(&d))
    }

    fn to_mermaid(&self) -> PyResult<String> {
        render_mermaid(&self.inner).map_err(|cosemo_core::RenderError::InvalidModel(d)| diagnostics_error(&d))
    }

    /// Runs `script` (a list of `{"process", "object"}` dicts) from `seed`
    /// (a list of `{"object", "class"}` dicts) and returns the trace.
    fn run_script(&self, py: Python<'_>, seed: &Bound<'_, PyAny>, script: &Bound<'_, PyAny>) -> PyResult<Py<PyAny>> {
        self.require_valid()?;
        let seed: Vec<Token> = from_py(py, seed, "seed")?;
        let script: Vec<ScriptStep> = from_py(py, script, "script")?;
        let events = run_model_script(&self.inner, &seed, &script).map_err(|e| PyValueError::new_err(e.to_string()))?;
        let lines: Vec<String> = events.iter().map(|e| e.to_json_line()).collect();
        to_py(py, &format!("[{}]", lines.join(",")))
    }

    #[pyo3(signature = (seed, queries, max_steps = 8, max_objects = 2))]
    fn explore(
        &self,
        py: Python<'_>,
        seed: &Bound<'_, PyAny>,
        queries: &Bound<'_, PyAny>,
        max_steps: usize,
        max_objects: usize,
    ) -> PyResult<Py<PyAny>> {
        self.require_valid()?;
        let seed: Vec<Token> = from_py(py, seed, "seed")?;
        let queries: Vec<Query> = from_py(py, queries, "queries")?;
        let summary = explore_model(&self.inner, &seed, Bounds { max_steps, max_objects })
            .and_then(|graph| graph.summary(&queries))
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        to_py(py, &serde_json::to_string(&summary).expect("summaries always serialize"))
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "Model({:?}, roles={}, classes={}, processes={})",
            self.inner.name,
            self.inner.roles.len(),
            self.inner.classes.len(),
            self.inner.processes.len()
        )
    }
}

#[pyfunction]
fn explain(code: &str) -> PyResult<&'static str> {
    explain_code(code).map_err(|e| PyKeyError::new_err(e.to_string()))
}

/// Source text of a bundled example model.
#[pyfunction]
fn fixture(name: &str) -> PyResult<&'static str> {
    fixtures::source(name).ok_or_else(|| PyKeyError::new_err(format!("no fixture named {name:?}")))
}

#[pyfunction]
fn fixture_names() -> Vec<&'static str> {
    fixtures::ALL.iter().map(|(name, _)| *name).collect()
}

#[pymodule]
fn cosemo(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(explain, m)?)?;
    m.add_function(wrap_pyfunction!(fixture, m)?)?;
    m.add_function(wrap_pyfunction!(fixture_names, m)?)?;
    Ok(())
}
