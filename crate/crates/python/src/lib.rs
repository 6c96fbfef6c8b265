//! Python bindings for `sparse-pr`.
//!
//! Autocorrelations cross the boundary as lists of complex numbers, supports
//! and distance sets as lists of ints.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use sparse_pr::harness::InstanceConfig;
use sparse_pr::noisy_support::NoisySupportParams;
use sparse_pr::recovery::{FienupParams, NoisyOptions, SdpMethod, SdpSettings, TsprOptions};
use sparse_pr::turnpike::{GraphWidth, TurnpikeParams};
use sparse_pr::{Autocorrelation, DistanceSet, Error, SupportSet};

create_exception!(sparse_pr_py, RecoveryError, PyException);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidInput(_) | Error::Dimension(_) | Error::Parse { .. } => PyValueError::new_err(e.to_string()),
        _ => RecoveryError::new_err(e.to_string()),
    }
}

fn measurement(a: Vec<Complex64>) -> PyResult<Autocorrelation> {
    Autocorrelation::new(a).map_err(to_py)
}

fn distances(w: Vec<usize>) -> DistanceSet {
    DistanceSet::from_unsorted(w)
}

fn sdp_settings(method: &str, tol: f64, max_iter: usize) -> PyResult<SdpSettings> {
    let method = match method {
        "direct" => SdpMethod::DirectGraph,
        "splitting" => SdpMethod::Splitting,
        other => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
    };
    let s = SdpSettings {
        tol_feas: tol,
        max_iter,
        method,
        ..Default::default()
    };
    s.validate().map_err(to_py)?;
    Ok(s)
}

fn turnpike_params(t: Option<usize>, verify: bool, refine: bool) -> PyResult<TurnpikeParams> {
    let t = match t {
        None => GraphWidth::Auto,
        Some(0) => return Err(PyValueError::new_err("t must be at least 1")),
        Some(t) => GraphWidth::Fixed(t),
    };
    Ok(TurnpikeParams { t, verify, refine })
}

/// A length-`n` signal stored as sorted `(index, value)` pairs.
#[pyclass(name = "SparseSignal", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PySparseSignal(sparse_pr::SparseSignal);

#[pymethods]
impl PySparseSignal {
    #[new]
    fn new(n: usize, support: Vec<usize>, values: Vec<Complex64>) -> PyResult<Self> {
        sparse_pr::SparseSignal::from_parts(n, &support, &values)
            .map(Self)
            .map_err(to_py)
    }

    #[staticmethod]
    fn from_dense(values: Vec<Complex64>) -> PyResult<Self> {
        sparse_pr::SparseSignal::from_dense(&values).map(Self).map_err(to_py)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn support(&self) -> Vec<usize> {
        self.0.support()
    }

    #[getter]
    fn values(&self) -> Vec<Complex64> {
        self.0.values()
    }

    #[getter]
    fn sparsity(&self) -> usize {
        self.0.sparsity()
    }

    fn to_dense(&self) -> Vec<Complex64> {
        self.0.to_dense()
    }

    fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn is_real(&self) -> bool {
        self.0.is_real()
    }

    fn shifted(&self, offset: isize) -> PyResult<Self> {
        self.0.shifted(offset).map(Self).map_err(to_py)
    }

    fn conj_flip(&self) -> Self {
        Self(self.0.conj_flip())
    }

    fn scaled(&self, c: Complex64) -> Self {
        Self(self.0.scaled(c))
    }

    #[pyo3(signature = (tol = 1e-9))]
    fn canonicalize(&self, tol: f64) -> Self {
        Self(sparse_pr::canonicalize(&self.0, tol))
    }

    fn autocorrelation(&self) -> Vec<Complex64> {
        sparse_pr::autocorrelation(&self.0).values().to_vec()
    }

    fn __len__(&self) -> usize {
        self.0.n()
    }

    fn __repr__(&self) -> String {
        format!("SparseSignal(n={}, support={:?})", self.0.n(), self.0.support())
    }
}

#[pyfunction]
fn autocorrelation(x: &PySparseSignal) -> Vec<Complex64> {
    x.autocorrelation()
}

#[pyfunction]
fn power_spectrum(x: &PySparseSignal, m: usize) -> PyResult<Vec<f64>> {
    sparse_pr::power_spectrum(&x.0, m).map_err(to_py)
}

/// Lags of `a` whose magnitude reaches `threshold` (0 means nonzero).
#[pyfunction]
#[pyo3(signature = (a, threshold = 0.0))]
fn support_of(a: Vec<Complex64>, threshold: f64) -> PyResult<Vec<usize>> {
    sparse_pr::support_of(&measurement(a)?, threshold)
        .map(DistanceSet::into_vec)
        .map_err(to_py)
}

#[pyfunction]
fn distance_set(points: Vec<usize>) -> Vec<usize> {
    sparse_pr::distance_set(&points).into_vec()
}

/// Support from a distance set. `t=None` picks the graph width automatically.
#[pyfunction]
#[pyo3(signature = (w, t = None, verify = true, refine = false))]
fn recover_support(w: Vec<usize>, t: Option<usize>, verify: bool, refine: bool) -> PyResult<Vec<usize>> {
    let params = turnpike_params(t, verify, refine)?;
    sparse_pr::turnpike::recover_support(&distances(w), &params)
        .map(SupportSet::into_vec)
        .map_err(to_py)
}

/// Every canonical support with distance set `w`, by exhaustive search.
#[pyfunction]
#[pyo3(signature = (w, cap = 14))]
fn brute_force_turnpike(w: Vec<usize>, cap: usize) -> PyResult<Vec<Vec<usize>>> {
    sparse_pr::turnpike::brute_force_turnpike(&distances(w), cap)
        .map(|all| all.into_iter().map(SupportSet::into_vec).collect())
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (a, t = None, refine = false, method = "direct", tol = 1e-7, max_iter = 50_000))]
fn tspr(
    py: Python<'_>,
    a: Vec<Complex64>,
    t: Option<usize>,
    refine: bool,
    method: &str,
    tol: f64,
    max_iter: usize,
) -> PyResult<PySparseSignal> {
    let a = measurement(a)?;
    let opts = TsprOptions {
        turnpike: turnpike_params(t, true, refine)?,
        sdp: sdp_settings(method, tol, max_iter)?,
        ..Default::default()
    };
    py.detach(|| sparse_pr::recovery::tspr(&a, &opts))
        .map(PySparseSignal)
        .map_err(to_py)
}

/// Noisy recovery. Returns the signal and the lifted estimate as a list of rows.
#[pyfunction]
#[pyo3(signature = (a, tau, eta = 0.0, c = 2, method = "direct", tol = 1e-7, max_iter = 50_000))]
#[allow(clippy::too_many_arguments)]
fn tspr_noisy(
    py: Python<'_>,
    a: Vec<Complex64>,
    tau: f64,
    eta: f64,
    c: usize,
    method: &str,
    tol: f64,
    max_iter: usize,
) -> PyResult<(PySparseSignal, Vec<Vec<Complex64>>)> {
    let a = measurement(a)?;
    let opts = NoisyOptions {
        support: NoisySupportParams {
            tau,
            c,
            ..Default::default()
        },
        eta,
        sdp: sdp_settings(method, tol, max_iter)?,
    };
    let (x, lifted) = py
        .detach(|| sparse_pr::recovery::tspr_noisy(&a, &opts))
        .map_err(to_py)?;
    let m = lifted.matrix();
    let rows = (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
    Ok((PySparseSignal(x), rows))
}

/// Values on a known support from the lifted program, as a signal.
#[pyfunction]
#[pyo3(signature = (a, support, method = "direct", tol = 1e-7, max_iter = 50_000))]
fn solve_sdp_equality(
    py: Python<'_>,
    a: Vec<Complex64>,
    support: Vec<usize>,
    method: &str,
    tol: f64,
    max_iter: usize,
) -> PyResult<PySparseSignal> {
    let a = measurement(a)?;
    let u = SupportSet::new(support).map_err(to_py)?;
    let settings = sdp_settings(method, tol, max_iter)?;
    py.detach(|| sparse_pr::recovery::recover_on_support(&a, &u, &settings))
        .map(PySparseSignal)
        .map_err(to_py)
}

/// Sparse error reduction. Returns the best signal and its relative residual.
#[pyfunction]
#[pyo3(signature = (a, k, inits = 100, iters = 500, seed = 0))]
fn sparse_fienup(
    py: Python<'_>,
    a: Vec<Complex64>,
    k: usize,
    inits: usize,
    iters: usize,
    seed: u64,
) -> PyResult<(PySparseSignal, f64)> {
    let a = measurement(a)?;
    let params = FienupParams { k, inits, iters, seed };
    py.detach(|| sparse_pr::recovery::sparse_fienup(&a, &params))
        .map(|r| (PySparseSignal(r.signal), r.residual))
        .map_err(to_py)
}

/// Uniformly random support of size `k` with complex Gaussian values.
#[pyfunction]
#[pyo3(signature = (n, k, seed = 0))]
fn gen_instance(n: usize, k: usize, seed: u64) -> PyResult<PySparseSignal> {
    sparse_pr::harness::gen_instance(&InstanceConfig::uniform(n, k, seed))
        .map(PySparseSignal)
        .map_err(to_py)
}

/// Whether `x` and `y` agree up to shift, conjugate-flip and global phase.
#[pyfunction]
#[pyo3(signature = (x, y, tol = 1e-6))]
fn equivalent(x: &PySparseSignal, y: &PySparseSignal, tol: f64) -> PyResult<bool> {
    sparse_pr::equivalent(&x.0, &y.0, tol).map_err(to_py)
}

#[pyfunction]
fn orbit_distance(x: &PySparseSignal, y: &PySparseSignal) -> PyResult<f64> {
    sparse_pr::orbit_distance(&x.0, &y.0).map_err(to_py)
}

#[pymodule]
fn sparse_pr_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("RecoveryError", m.py().get_type::<RecoveryError>())?;
    m.add_class::<PySparseSignal>()?;
    m.add_function(wrap_pyfunction!(autocorrelation, m)?)?;
    m.add_function(wrap_pyfunction!(power_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(support_of, m)?)?;
    m.add_function(wrap_pyfunction!(distance_set, m)?)?;
    m.add_function(wrap_pyfunction!(recover_support, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_turnpike, m)?)?;
    m.add_function(wrap_pyfunction!(tspr, m)?)?;
    m.add_function(wrap_pyfunction!(tspr_noisy, m)?)?;
    m.add_function(wrap_pyfunction!(solve_sdp_equality, m)?)?;
    m.add_function(wrap_pyfunction!(sparse_fienup, m)?)?;
    m.add_function(wrap_pyfunction!(gen_instance, m)?)?;
    m.add_function(wrap_pyfunction!(equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(orbit_distance, m)?)?;
    Ok(())
}
