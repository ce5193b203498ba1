//! Python bindings: codec tables, configuration, single trials and sweeps.

use std::collections::BTreeMap;

use gfdm_im::codec;
use gfdm_im::sim;
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyFloat, PyInt, PyString};

fn to_py(e: gfdm_im::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Look-up table of active-subcarrier combinations for groups of `N` with
/// `K` active.
#[pyclass(name = "LookupTable", frozen)]
struct PyLookupTable(codec::LookupTable);

#[pymethods]
impl PyLookupTable {
    #[new]
    fn new(group_size: usize, active: usize) -> PyResult<Self> {
        codec::LookupTable::new(group_size, active).map(Self).map_err(to_py)
    }

    #[getter]
    fn group_size(&self) -> usize {
        self.0.group_size()
    }

    #[getter]
    fn active(&self) -> usize {
        self.0.active()
    }

    #[getter]
    fn index_bits(&self) -> usize {
        self.0.index_bits()
    }

    fn rows(&self) -> Vec<Vec<usize>> {
        self.0.rows().map(<[usize]>::to_vec).collect()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("LookupTable(group_size={}, active={})", self.0.group_size(), self.0.active())
    }
}

/// Gray-labelled square QAM with unit average energy.
#[pyclass(name = "Constellation", frozen)]
struct PyConstellation(codec::Constellation);

#[pymethods]
impl PyConstellation {
    #[new]
    fn new(order: usize) -> PyResult<Self> {
        codec::Constellation::new(order).map(Self).map_err(to_py)
    }

    #[getter]
    fn order(&self) -> usize {
        self.0.order()
    }

    #[getter]
    fn bits_per_symbol(&self) -> usize {
        self.0.bits_per_symbol()
    }

    fn points(&self) -> Vec<Complex64> {
        self.0.points().to_vec()
    }

    fn modulate(&self, bits: Vec<bool>) -> PyResult<Complex64> {
        self.0.modulate(&bits).map_err(to_py)
    }

    fn demodulate(&self, symbol: Complex64) -> Vec<bool> {
        self.0.demodulate(symbol)
    }
}

/// Maps one group's bits to its `N` subcarrier amplitudes.
#[pyfunction]
fn encode_group(
    bits: Vec<bool>,
    table: &PyLookupTable,
    constellation: &PyConstellation,
) -> PyResult<Vec<Complex64>> {
    codec::encode_group(&bits, &table.0, &constellation.0)
        .map(|g| g.values)
        .map_err(to_py)
}

/// Returns `(row, active_positions)` chosen by the index detector.
#[pyfunction]
fn detect_group(observed: Vec<Complex64>, table: &PyLookupTable) -> PyResult<(usize, Vec<usize>)> {
    if observed.len() != table.0.group_size() {
        return Err(PyValueError::new_err(format!(
            "expected {} observations, got {}",
            table.0.group_size(),
            observed.len()
        )));
    }
    let (row, active) = codec::detect_group(&observed, &table.0);
    Ok((row, active.to_vec()))
}

/// Simulation configuration. Keyword arguments use the same names as the
/// JSON configuration file; omitted keys keep their defaults.
#[pyclass(name = "SimConfig", frozen)]
struct PySimConfig(sim::SimConfig);

fn kwarg_to_json(value: &Bound<'_, PyAny>) -> PyResult<serde_json::Value> {
    if value.is_instance_of::<PyBool>() {
        return Ok(serde_json::Value::Bool(value.extract()?));
    }
    if value.is_instance_of::<PyInt>() {
        return Ok(serde_json::Value::from(value.extract::<i64>()?));
    }
    if value.is_instance_of::<PyFloat>() {
        return Ok(serde_json::Value::from(value.extract::<f64>()?));
    }
    if value.is_instance_of::<PyString>() {
        return Ok(serde_json::Value::String(value.extract()?));
    }
    if let Ok(list) = value.extract::<Vec<f64>>() {
        return Ok(serde_json::Value::from(list));
    }
    Err(PyValueError::new_err(format!(
        "unsupported configuration value {}",
        value.repr()?
    )))
}

#[pymethods]
impl PySimConfig {
    #[new]
    #[pyo3(signature = (**kwargs))]
    fn new(kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut fields = BTreeMap::new();
        if let Some(kwargs) = kwargs {
            for (key, value) in kwargs.iter() {
                fields.insert(key.extract::<String>()?, kwarg_to_json(&value)?);
            }
        }
        let text = serde_json::to_string(&fields).map_err(|e| PyValueError::new_err(e.to_string()))?;
        sim::SimConfig::from_json_str(&text).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        sim::SimConfig::from_json_str(text).map(Self).map_err(to_py)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[getter]
    fn scheme(&self) -> &'static str {
        self.0.scheme.as_str()
    }

    #[getter]
    fn snr_db(&self) -> Vec<f64> {
        self.0.snr_db.clone()
    }

    #[getter]
    fn payload_bits(&self) -> usize {
        self.0.payload_bits()
    }

    #[getter]
    fn ebn0_factor(&self) -> f64 {
        self.0.ebn0_factor()
    }

    fn __repr__(&self) -> String {
        format!("SimConfig({})", serde_json::to_string(&self.0).unwrap_or_default())
    }
}

/// Runs the configured sweep and returns one dict per SNR point.
#[pyfunction]
fn run_sweep<'py>(py: Python<'py>, config: &PySimConfig) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let cfg = config.0.clone();
    let records = py.detach(move || sim::run_sweep(&cfg)).map_err(to_py)?;
    records
        .into_iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("snr_db", r.snr_db)?;
            d.set_item("bits", r.bits)?;
            d.set_item("errors", r.errors)?;
            d.set_item("ber", r.ber)?;
            d.set_item("ci95", r.ci95)?;
            d.set_item("trials", r.trials)?;
            Ok(d)
        })
        .collect()
}

/// One trial; returns `(sent_bits, decided_bits)`.
#[pyfunction]
fn run_trial(
    py: Python<'_>,
    config: &PySimConfig,
    trial_index: u64,
    snr_db: f64,
) -> PyResult<(Vec<bool>, Vec<bool>)> {
    let cfg = config.0.clone();
    let outcome = py
        .detach(move || sim::run_trial(&cfg, trial_index, snr_db))
        .map_err(to_py)?;
    Ok((outcome.tx_bits, outcome.rx_bits))
}

#[pyfunction]
fn snr_to_noise_power(snr_db: f64) -> f64 {
    sim::snr_to_noise_power(snr_db)
}

#[pymodule]
fn gfdm_im_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLookupTable>()?;
    m.add_class::<PyConstellation>()?;
    m.add_class::<PySimConfig>()?;
    m.add_function(wrap_pyfunction!(encode_group, m)?)?;
    m.add_function(wrap_pyfunction!(detect_group, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(run_trial, m)?)?;
    m.add_function(wrap_pyfunction!(snr_to_noise_power, m)?)?;
    Ok(())
}
