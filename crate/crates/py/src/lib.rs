use pyo3::exceptions::{PyIOError, PyIndexError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use shearwave::approx::{nterm_curve, n_schedule, wavelet_baseline, NtermConfig};
use shearwave::hybrid::frame_bounds_estimate;
use shearwave::solver::{solve, SolveConfig};
use shearwave::{grid, io, Error};

fn err(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyIOError::new_err(e.to_string()),
        Error::UnknownIndex(_) => PyIndexError::new_err(e.to_string()),
        Error::NonConvergence { .. } | Error::Divergence { .. } => PyRuntimeError::new_err(e.to_string()),
        e => PyValueError::new_err(e.to_string()),
    }
}

fn from_json<T: serde::de::DeserializeOwned + Default>(s: Option<&str>) -> PyResult<T> {
    match s {
        None => Ok(T::default()),
        Some(s) => serde_json::from_str(s).map_err(|e| PyValueError::new_err(format!("invalid configuration: {e}"))),
    }
}

/// n×n samples at the cell centres ((i+½)/n, (k+½)/n), row-major.
#[pyclass(name = "GridFunction", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGrid(shearwave::GridFunction);

#[pymethods]
impl PyGrid {
    #[new]
    fn new(n: usize, values: Vec<f64>) -> PyResult<Self> {
        shearwave::GridFunction::new(n, values).map(Self).map_err(err)
    }

    #[staticmethod]
    fn zeros(n: usize) -> PyResult<Self> {
        shearwave::GridFunction::zeros(n).map(Self).map_err(err)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        io::read_grid(path.as_ref()).map(Self).map_err(err)
    }

    fn save(&self, path: &str) -> PyResult<()> {
        io::write_grid(path.as_ref(), &self.0).map_err(err)
    }

    fn save_pgm(&self, path: &str) -> PyResult<()> {
        io::write_pgm(path.as_ref(), &self.0).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn values(&self) -> Vec<f64> {
        self.0.values().to_vec()
    }

    fn get(&self, i: usize, k: usize) -> PyResult<f64> {
        let n = self.0.n();
        if i >= n || k >= n {
            return Err(PyIndexError::new_err(format!("({i}, {k}) outside a {n}x{n} grid")));
        }
        Ok(self.0.get(i, k))
    }

    fn norm_l2(&self) -> f64 {
        self.0.norm_l2()
    }

    fn norm_h1(&self) -> f64 {
        grid::norm_h1(&self.0)
    }

    fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }

    fn laplacian(&self) -> Self {
        Self(grid::laplacian(&self.0))
    }

    fn inner_l2(&self, other: &Self) -> PyResult<f64> {
        grid::inner_l2(&self.0, &other.0).map_err(err)
    }

    fn inner_h1(&self, other: &Self) -> PyResult<f64> {
        grid::inner_h1(&self.0, &other.0).map_err(err)
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        self.0.add(&other.0).map(Self).map_err(err)
    }

    fn __sub__(&self, other: &Self) -> PyResult<Self> {
        self.0.sub(&other.0).map(Self).map_err(err)
    }

    fn __mul__(&self, a: f64) -> Self {
        Self(self.0.scale(a))
    }

    fn __rmul__(&self, a: f64) -> Self {
        Self(self.0.scale(a))
    }

    fn __len__(&self) -> usize {
        self.0.values().len()
    }

    fn __repr__(&self) -> String {
        format!("GridFunction(n={}, max_abs={:.3e})", self.0.n(), self.0.max_abs())
    }
}

/// Hybrid shearlet–wavelet frame; `config` is a JSON object of FrameConfig fields.
#[pyclass(name = "HybridFrame", frozen)]
struct PyFrame(shearwave::HybridFrame);

#[pymethods]
impl PyFrame {
    #[new]
    #[pyo3(signature = (n, config=None))]
    fn new(n: usize, config: Option<&str>) -> PyResult<Self> {
        let cfg: shearwave::FrameConfig = from_json(config)?;
        shearwave::HybridFrame::new(&cfg, n).map(Self).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn q_sh(&self) -> f64 {
        self.0.q_sh()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn wavelet_count(&self) -> usize {
        self.0.wavelet_count()
    }

    fn shearlet_count(&self) -> usize {
        self.0.shearlet_count()
    }

    /// (scale, wavelets, shearlets) per scale.
    fn counts_by_scale(&self) -> Vec<(u32, usize, usize)> {
        self.0.counts_by_scale()
    }

    /// Weighted H¹ coefficients, one per slot.
    fn analysis(&self, py: Python<'_>, f: &PyGrid) -> PyResult<Vec<f64>> {
        py.detach(|| self.0.analysis_dense(&f.0)).map_err(err)
    }

    fn synthesis(&self, py: Python<'_>, c: Vec<f64>) -> PyResult<PyGrid> {
        py.detach(|| self.0.synthesis_dense(&c)).map(PyGrid).map_err(err)
    }

    fn element(&self, slot: usize) -> PyResult<PyGrid> {
        self.0.element(slot).map(PyGrid).map_err(err)
    }

    fn weight(&self, slot: usize) -> PyResult<f64> {
        if slot >= self.0.len() {
            return Err(PyIndexError::new_err(format!("slot {slot} out of range")));
        }
        Ok(self.0.weight_of(slot))
    }

    /// Index of a slot as a dict with a `kind` key.
    fn index<'py>(&self, py: Python<'py>, slot: usize) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        match self.0.index(slot).map_err(err)? {
            shearwave::HybridIndex::Wavelet(w) => {
                d.set_item("kind", "wavelet")?;
                d.set_item("j", w.j)?;
                d.set_item("m", (w.m1, w.m2))?;
                d.set_item("v", w.v)?;
            }
            shearwave::HybridIndex::Shearlet { index, .. } => {
                d.set_item("kind", "shearlet")?;
                d.set_item("j", index.j)?;
                d.set_item("k", index.k)?;
                d.set_item("iota", index.iota)?;
                d.set_item("m", (index.m1, index.m2))?;
            }
        }
        Ok(d)
    }

    #[pyo3(signature = (seed=7, tol=1e-3, max_iter=300))]
    fn frame_bounds(&self, py: Python<'_>, seed: u64, tol: f64, max_iter: usize) -> PyResult<(f64, f64)> {
        let fb = py.detach(|| frame_bounds_estimate(&self.0, seed, tol, max_iter)).map_err(err)?;
        Ok((fb.a, fb.b))
    }

    fn __repr__(&self) -> String {
        format!("HybridFrame(n={}, wavelets={}, shearlets={})", self.0.n(), self.0.wavelet_count(), self.0.shearlet_count())
    }
}

#[pyfunction]
fn experiment_rhs(n: usize) -> PyResult<PyGrid> {
    shearwave::cartoon::experiment_rhs(n).map(|(_, f)| PyGrid(f)).map_err(err)
}

#[pyfunction]
fn experiment_solution(n: usize) -> PyResult<PyGrid> {
    shearwave::cartoon::experiment_solution(n).map(PyGrid).map_err(err)
}

/// Solution of −Δu = f with the discrete Dirichlet condition.
#[pyfunction]
fn poisson_solve(f: &PyGrid) -> PyResult<PyGrid> {
    shearwave::spectral::poisson_solve(&f.0).map(PyGrid).map_err(err)
}

#[pyfunction]
fn reference_solution(f: &PyGrid) -> PyResult<PyGrid> {
    shearwave::cartoon::reference_solution(&f.0).map(PyGrid).map_err(err)
}

/// Damped Richardson iteration in frame coordinates. `config` is a JSON
/// object of SolveConfig fields.
#[pyfunction]
#[pyo3(name = "solve", signature = (f, frame, config=None, reference=None))]
fn py_solve<'py>(
    py: Python<'py>,
    f: &PyGrid,
    frame: &PyFrame,
    config: Option<&str>,
    reference: Option<&PyGrid>,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg: SolveConfig = from_json(config)?;
    let out = py.detach(|| solve(&f.0, &frame.0, &cfg, reference.map(|r| &r.0))).map_err(err)?;
    let d = PyDict::new(py);
    let status = serde_json::to_value(out.trace.status).unwrap();
    d.set_item("status", status.as_str().unwrap_or_default())?;
    d.set_item("omega", out.trace.omega)?;
    d.set_item("lambda_max", out.trace.lambda_max)?;
    d.set_item("residuals", out.trace.records.iter().map(|r| r.residual).collect::<Vec<_>>())?;
    d.set_item("active_counts", out.trace.records.iter().map(|r| r.active_count).collect::<Vec<_>>())?;
    d.set_item("h1_errors", out.trace.records.iter().map(|r| r.h1_error).collect::<Vec<_>>())?;
    d.set_item("coefficients", out.coefficients.to_dense())?;
    d.set_item("solution", PyGrid(out.solution))?;
    Ok(d)
}

/// Relative squared H¹ errors of greedy N-term approximations (with dual
/// reconstruction), as a list of (N, err2_h1) pairs plus the fitted slope.
#[pyfunction]
#[pyo3(signature = (u, frame, ns=None, baseline=false))]
fn nterm<'py>(
    py: Python<'py>,
    u: &PyGrid,
    frame: &PyFrame,
    ns: Option<Vec<usize>>,
    baseline: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let ns = ns.unwrap_or_else(|| n_schedule(frame.0.len()));
    let cfg = NtermConfig::default();
    let table = py
        .detach(|| {
            if baseline {
                wavelet_baseline(&u.0, frame.0.config(), &ns, &cfg)
            } else {
                nterm_curve(&u.0, &frame.0, &ns, &cfg)
            }
        })
        .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("rows", table.rows.iter().map(|r| (r.n, r.err2_h1)).collect::<Vec<_>>())?;
    d.set_item("slope", table.fit().ok().map(|f| f.slope))?;
    d.set_item("total", table.total)?;
    Ok(d)
}

#[pymodule]
pub fn shearwave_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyFrame>()?;
    m.add_function(wrap_pyfunction!(experiment_rhs, m)?)?;
    m.add_function(wrap_pyfunction!(experiment_solution, m)?)?;
    m.add_function(wrap_pyfunction!(poisson_solve, m)?)?;
    m.add_function(wrap_pyfunction!(reference_solution, m)?)?;
    m.add_function(wrap_pyfunction!(py_solve, m)?)?;
    m.add_function(wrap_pyfunction!(nterm, m)?)?;
    Ok(())
}
