//! Python bindings: the feature format, the kernel pipeline, the simulator
//! and the full run driver, exposed in-process. Structured results cross
//! the boundary as JSON strings.

use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use microdss_core::config::KernelConfig;
use microdss_core::fsf::Fsf as CoreFsf;
use microdss_core::proximity::{proximity as core_proximity, PolarityTable, ProximityConfig};
use microdss_core::records::{CharacterizationRecord, SnapshotRecord};
use microdss_core::runner;
use microdss_core::scenario::Scenario;
use microdss_core::sim::{Action, ActionKind, World};
use microdss_core::{Coord, Kernel as CoreKernel};

fn value_err(err: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn kernel_config(overrides: Option<Vec<String>>) -> PyResult<KernelConfig> {
    let mut cfg = KernelConfig::new();
    for assignment in overrides.unwrap_or_default() {
        cfg.apply_assignment(&assignment).map_err(value_err)?;
    }
    Ok(cfg)
}

/// One factual semantic feature.
#[pyclass(name = "Fsf")]
#[derive(Clone)]
struct PyFsf {
    inner: CoreFsf,
}

#[pymethods]
impl PyFsf {
    /// Parse the one-line textual form.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        CoreFsf::parse(text)
            .map(|inner| Self { inner })
            .map_err(value_err)
    }

    /// Canonical textual form.
    fn serialize(&self) -> String {
        self.inner.to_line()
    }

    fn to_json(&self) -> String {
        self.inner.to_json_line()
    }

    fn selector(&self) -> String {
        self.inner.selector().to_string()
    }

    fn time(&self) -> u64 {
        self.inner.time()
    }

    fn location(&self) -> (i32, i32) {
        let loc = self.inner.location();
        (loc.x, loc.y)
    }

    /// Integer value of a qualifier, or None.
    fn int_value(&self, qualifier: &str) -> Option<i64> {
        self.inner.int_value(qualifier)
    }

    fn __str__(&self) -> String {
        self.inner.to_line()
    }

    fn __repr__(&self) -> String {
        format!("Fsf({})", self.inner.to_line())
    }
}

/// Signed spatio-temporal proximity of two features under the default
/// polarity table.
#[pyfunction]
#[pyo3(signature = (a, b, d_max=10, t_max=5))]
fn proximity(a: &PyFsf, b: &PyFsf, d_max: u32, t_max: u64) -> f64 {
    let cfg = ProximityConfig {
        d_max,
        t_max,
        ..ProximityConfig::default()
    };
    core_proximity(&a.inner, &b.inner, &PolarityTable::default(), &cfg)
}

/// The two kernel layers, fed one batch of feature lines per cycle.
#[pyclass]
struct Kernel {
    inner: CoreKernel,
}

#[pymethods]
impl Kernel {
    #[new]
    #[pyo3(signature = (overrides=None))]
    fn new(overrides: Option<Vec<String>>) -> PyResult<Self> {
        Ok(Self {
            inner: CoreKernel::new(&kernel_config(overrides)?),
        })
    }

    /// Run one cycle over textual feature lines. Returns the snapshot and
    /// characterization records as a pair of JSON strings.
    fn cycle(&mut self, lines: Vec<String>, cycle: u64) -> PyResult<(String, String)> {
        let mut fsfs = Vec::with_capacity(lines.len());
        for line in &lines {
            fsfs.push(CoreFsf::parse(line).map_err(value_err)?);
        }
        let (snapshot, report) = self
            .inner
            .cycle(fsfs, cycle)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        let snapshot_json = serde_json::to_string(&SnapshotRecord::from(&snapshot)).unwrap();
        let report_json =
            serde_json::to_string(&CharacterizationRecord::from(&report)).unwrap();
        Ok((snapshot_json, report_json))
    }
}

/// The deterministic miniature fire world.
#[pyclass]
struct Simulator {
    world: World,
}

#[pymethods]
impl Simulator {
    #[new]
    fn new(scenario_json: &str, seed: u64) -> PyResult<Self> {
        let scenario = Scenario::from_json(scenario_json).map_err(value_err)?;
        let world = World::from_scenario(&scenario, seed).map_err(value_err)?;
        Ok(Self { world })
    }

    fn cycle(&self) -> u64 {
        self.world.cycle()
    }

    /// The cycle's observations as textual feature lines.
    fn perceive(&self) -> Vec<String> {
        self.world.perceive().iter().map(CoreFsf::to_line).collect()
    }

    /// Advance one cycle; `dispatches` is a list of (brigade_id, x, y).
    #[pyo3(signature = (dispatches=None))]
    fn step(&mut self, dispatches: Option<Vec<(u64, i32, i32)>>) -> PyResult<()> {
        let actions: Vec<Action> = dispatches
            .unwrap_or_default()
            .into_iter()
            .map(|(brigade_id, x, y)| Action {
                brigade_id,
                kind: ActionKind::Dispatch(Coord::new(x, y)),
            })
            .collect();
        self.world.step(&actions).map_err(value_err)
    }

    /// Building phase counts and total fieriness as JSON.
    fn metrics(&self) -> String {
        serde_json::to_string(&self.world.metrics()).unwrap()
    }
}

/// Full closed-loop run; writes events.jsonl, fsf.log and summary.json
/// into `out_dir` and returns the run report as JSON.
#[pyfunction]
#[pyo3(signature = (scenario, out_dir, seed=1, cycles=30, policy="none", casebase=None, overrides=None))]
#[allow(clippy::too_many_arguments)]
fn run_scenario(
    scenario: &str,
    out_dir: &str,
    seed: u64,
    cycles: u64,
    policy: &str,
    casebase: Option<String>,
    overrides: Option<Vec<String>>,
) -> PyResult<String> {
    let policy = match policy {
        "none" => runner::Policy::None,
        "baseline" => runner::Policy::Baseline,
        "dss" => runner::Policy::Dss,
        other => return Err(value_err(format!("unknown policy `{other}`"))),
    };
    let cfg = runner::RunConfig {
        scenario_path: PathBuf::from(scenario),
        seed,
        cycles,
        policy,
        casebase_path: casebase.map(PathBuf::from),
        out_dir: PathBuf::from(out_dir),
        kernel: kernel_config(overrides)?,
    };
    let report = runner::run_scenario(&cfg).map_err(value_err)?;
    Ok(serde_json::to_string(&report).unwrap())
}

/// Replay a captured feature log through the kernel alone.
#[pyfunction]
#[pyo3(signature = (log, out_dir, overrides=None))]
fn replay_log(log: &str, out_dir: &str, overrides: Option<Vec<String>>) -> PyResult<String> {
    let report = runner::replay_log(
        std::path::Path::new(log),
        std::path::Path::new(out_dir),
        &kernel_config(overrides)?,
    )
    .map_err(value_err)?;
    Ok(serde_json::to_string(&report).unwrap())
}

/// Write the seeded 4-case default case base.
#[pyfunction]
fn init_case_base(path: &str) -> PyResult<()> {
    runner::init_case_base(std::path::Path::new(path)).map_err(value_err)
}

#[pymodule]
fn microdss_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyFsf>()?;
    m.add_class::<Kernel>()?;
    m.add_class::<Simulator>()?;
    m.add_function(wrap_pyfunction!(proximity, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(replay_log, m)?)?;
    m.add_function(wrap_pyfunction!(init_case_base, m)?)?;
    Ok(())
}
