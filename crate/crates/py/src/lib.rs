//! Python bindings: grids, phantoms, the two frames, per-subband separation,
//! coherence reports and the tiny-instance oracle.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

use geosep::coherence::{coherence_report, ReportOptions, SubbandTruth};
use geosep::frames::{FrameKind, FramePair};
use geosep::oracle::{self, SweepKind, TinyInstance};
use geosep::phantoms::{self, CurveConfig, PointConfig};
use geosep::separator::{self, SolverConfig};
use geosep::subband::{decompose_spectrum, filter_spectrum, ResidualRouting};
use geosep::{forward_dft, Field, GridSpec};

fn err(e: geosep::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Serializes through JSON into plain Python objects.
fn to_py<'py>(py: Python<'py>, v: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (s,))
}

fn frame_kind(name: &str) -> PyResult<FrameKind> {
    match name {
        "wavelet" => Ok(FrameKind::Wavelet),
        "curvelet" => Ok(FrameKind::Curvelet),
        _ => Err(PyValueError::new_err(format!("unknown frame {name:?}"))),
    }
}

/// Square grid with a subband scale range.
#[pyclass(name = "Grid", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGrid(GridSpec);

#[pymethods]
impl PyGrid {
    #[new]
    #[pyo3(signature = (size, j_min=None, j_max=None))]
    fn new(size: usize, j_min: Option<i32>, j_max: Option<i32>) -> PyResult<Self> {
        let g = match (j_min, j_max) {
            (Some(a), Some(b)) => GridSpec::new(size, a, b),
            (None, None) => GridSpec::with_default_scales(size),
            _ => return Err(PyValueError::new_err("give both j_min and j_max or neither")),
        };
        g.map(Self).map_err(err)
    }

    #[getter]
    fn size(&self) -> usize {
        self.0.size()
    }

    #[getter]
    fn scales(&self) -> (i32, i32) {
        (self.0.j_min(), self.0.j_max())
    }

    fn __repr__(&self) -> String {
        format!("Grid({}, {}, {})", self.0.size(), self.0.j_min(), self.0.j_max())
    }
}

/// Real image on a grid, row-major.
#[pyclass(name = "Field", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyField(Field);

#[pymethods]
impl PyField {
    #[new]
    fn new(grid: &PyGrid, values: Vec<f64>) -> PyResult<Self> {
        Field::new(grid.0, values).map(Self).map_err(err)
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.0.values().to_vec()
    }

    #[getter]
    fn size(&self) -> usize {
        self.0.grid().size()
    }

    fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }

    fn __add__(&self, other: &PyField) -> PyResult<Self> {
        if self.0.grid() != other.0.grid() {
            return Err(err(geosep::Error::GridMismatch));
        }
        Ok(Self(self.0.add(&other.0)))
    }

    fn __sub__(&self, other: &PyField) -> PyResult<Self> {
        if self.0.grid() != other.0.grid() {
            return Err(err(geosep::Error::GridMismatch));
        }
        Ok(Self(self.0.sub(&other.0)))
    }
}

/// Point phantom `sum_i a_i |x - x_i|^(-3/2)` sampled through its spectrum.
#[pyfunction]
#[pyo3(signature = (grid, points, amplitudes=None))]
fn point_phantom(grid: &PyGrid, points: Vec<[f64; 2]>, amplitudes: Option<Vec<f64>>) -> PyResult<PyField> {
    let n = points.len();
    let cfg = PointConfig::new(points, amplitudes.unwrap_or(vec![1.0; n])).map_err(err)?;
    Ok(PyField(phantoms::point_spectrum(&cfg, &grid.0).map_err(err)?.field))
}

/// Arclength measure on the circle of radius 1/4 about the torus center.
#[pyfunction]
fn circle_phantom(grid: &PyGrid) -> PyResult<PyField> {
    let c = CurveConfig::reference(8 * grid.0.size());
    Ok(PyField(phantoms::curve_spectrum(&c, &grid.0).map_err(err)?.field))
}

/// Tapered segment `{0} x [-rho, rho]`.
#[pyfunction]
fn segment_phantom(grid: &PyGrid, rho: f64) -> PyResult<PyField> {
    Ok(PyField(phantoms::segment_spectrum(rho, &grid.0).map_err(err)?.field))
}

/// Rescales `curve` so its per-annulus energies match `point` on the mid
/// band. Returns the rescaled curve and the factor.
#[pyfunction]
fn match_energies(point: &PyField, curve: &PyField) -> PyResult<(PyField, f64)> {
    let wrap = |f: &Field, kind| phantoms::Phantom::from_spectrum(kind, forward_dft(f));
    let p = wrap(&point.0, phantoms::PhantomKind::Point);
    let c = wrap(&curve.0, phantoms::PhantomKind::Curve);
    let (_, c, k) = phantoms::match_energies(&p, &c).map_err(err)?;
    Ok((PyField(c.field), k))
}

/// Radial wavelet and curvelet Parseval frames on one grid.
#[pyclass(name = "FramePair", frozen)]
struct PyFramePair(FramePair);

#[pymethods]
impl PyFramePair {
    #[new]
    fn new(grid: &PyGrid) -> Self {
        Self(FramePair::new(grid.0))
    }

    fn coefficient_count(&self, frame: &str) -> PyResult<usize> {
        Ok(self.0.frame(frame_kind(frame)?).layout().total)
    }

    fn analysis(&self, frame: &str, field: &PyField) -> PyResult<Vec<f64>> {
        Ok(self.0.frame(frame_kind(frame)?).analysis(&field.0).values().to_vec())
    }

    fn synthesis(&self, frame: &str, coefficients: Vec<f64>) -> PyResult<PyField> {
        let f = self.0.frame(frame_kind(frame)?);
        let c = geosep::CoefficientSet::from_values(f.layout().clone(), coefficients).map_err(err)?;
        f.synthesis(&c).map(PyField).map_err(err)
    }
}

/// Result of a full separation.
#[pyclass(name = "Separation", frozen)]
struct PySeparation {
    #[pyo3(get)]
    point: PyField,
    #[pyo3(get)]
    curve: PyField,
    #[pyo3(get)]
    residual: PyField,
    #[pyo3(get)]
    degraded: bool,
    inner: separator::FullSeparation,
}

#[pymethods]
impl PySeparation {
    /// Per-scale diagnostics as a list of dicts.
    fn subbands<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let rows: Vec<_> = self
            .inner
            .subbands
            .iter()
            .map(|s| {
                serde_json::json!({
                    "j": s.j,
                    "objective": s.objective,
                    "dual": s.dual,
                    "iterations": s.iterations,
                    "stop": s.stop,
                })
            })
            .collect();
        to_py(py, &rows)
    }

    /// Separation ratios against a known split, with the fitted log2 slope.
    fn metrics<'py>(&self, py: Python<'py>, point: &PyField, curve: &PyField) -> PyResult<Bound<'py, PyAny>> {
        let tp = decompose_spectrum(&forward_dft(&point.0));
        let tc = decompose_spectrum(&forward_dft(&curve.0));
        let m = separator::separation_metrics(&self.inner, &tp, &tc).map_err(err)?;
        to_py(py, &m)
    }
}

fn routing(name: &str) -> PyResult<ResidualRouting> {
    match name {
        "curve" => Ok(ResidualRouting::Curve),
        "point" => Ok(ResidualRouting::Point),
        "separate" => Ok(ResidualRouting::Separate),
        _ => Err(PyValueError::new_err(format!("unknown routing {name:?}"))),
    }
}

/// Splits `field` into point and curve parts, subband by subband.
#[pyfunction]
#[pyo3(signature = (pair, field, tol=1e-3, max_iter=5000, residual="curve"))]
fn separate(
    py: Python<'_>,
    pair: &PyFramePair,
    field: &PyField,
    tol: f64,
    max_iter: usize,
    residual: &str,
) -> PyResult<PySeparation> {
    let cfg = SolverConfig {
        relative_gap_tol: tol,
        max_iterations: max_iter,
        ..Default::default()
    };
    let routing = routing(residual)?;
    let r = py
        .detach(|| separator::separate_full(&field.0, &pair.0, &cfg, routing))
        .map_err(err)?;
    Ok(PySeparation {
        point: PyField(r.point.clone()),
        curve: PyField(r.curve.clone()),
        residual: PyField(r.residual.clone()),
        degraded: r.degraded(),
        inner: r,
    })
}

/// Clusters, coherences and sparsity defects at scale `j` for a point
/// set and the default circle, given the two ground-truth parts.
#[pyfunction]
#[pyo3(signature = (pair, j, points, point, curve, epsilon=1.0/64.0, kappa_samples=0, seed=0))]
#[allow(clippy::too_many_arguments)]
fn coherence<'py>(
    py: Python<'py>,
    pair: &PyFramePair,
    j: i32,
    points: Vec<[f64; 2]>,
    point: &PyField,
    curve: &PyField,
    epsilon: f64,
    kappa_samples: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let pair = &pair.0;
    let pts = PointConfig::unit(points).map_err(err)?;
    let circ = CurveConfig::reference(8 * pair.grid().size());
    let ps = filter_spectrum(&forward_dft(&point.0), j);
    let cs = filter_spectrum(&forward_dft(&curve.0), j);
    let pc = pair.wavelet().analysis_spectrum(&ps);
    let cc = pair.curvelet().analysis_spectrum(&cs);
    let truth = SubbandTruth {
        points: Some(&pts),
        curve: Some(&circ),
        point_coeffs: &pc,
        curve_coeffs: &cc,
        norm: ps.add(&cs).norm(),
    };
    let opts = ReportOptions {
        epsilon,
        kappa_samples,
        seed,
    };
    let (rep, _, _) = coherence_report(pair, j, &truth, &opts).map_err(err)?;
    to_py(py, &rep)
}

/// Two Parseval frames of `R^n`, a signal and its ground-truth split.
#[pyclass(name = "TinyInstance", frozen)]
struct PyTinyInstance(TinyInstance);

#[pymethods]
impl PyTinyInstance {
    /// Seeded random instance with `kappa_upper < 1/2`.
    #[staticmethod]
    fn random(seed: u64) -> PyResult<Self> {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        oracle::random_applicable_instance(&mut rng).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        TinyInstance::from_json(s).map(Self).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        self.0.to_json().map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n
    }

    #[getter]
    fn signal(&self) -> Vec<f64> {
        self.0.s.clone()
    }

    fn kappa_upper(&self) -> f64 {
        self.0.kappa_upper()
    }

    /// Exact minimizer `(s1, s2, objective)` by vertex enumeration.
    fn exact_separation(&self) -> PyResult<(Vec<f64>, Vec<f64>, f64)> {
        let s = oracle::exact_separation(&self.0).map_err(err)?;
        Ok((s.s1, s.s2, s.objective))
    }

    fn verify_bound<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &oracle::verify_recovery_bound(&self.0).map_err(err)?)
    }

    fn verify_noise_bound<'py>(&self, py: Python<'py>, noise: Vec<f64>, eps: f64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &oracle::verify_noise_bound(&self.0, &noise, eps).map_err(err)?)
    }
}

/// Seeded sweep of exact bound checks: `kind` is `clean`, `noisy` or
/// `adversarial`.
#[pyfunction]
#[pyo3(signature = (kind, count, seed=0, bound_factor=1.0))]
fn oracle_sweep<'py>(
    py: Python<'py>,
    kind: &str,
    count: usize,
    seed: u64,
    bound_factor: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let kind = match kind {
        "clean" => SweepKind::Clean,
        "noisy" => SweepKind::Noisy,
        "adversarial" => SweepKind::Adversarial,
        _ => return Err(PyValueError::new_err(format!("unknown sweep {kind:?}"))),
    };
    to_py(py, &oracle::sweep(kind, count, seed, bound_factor).map_err(err)?)
}

/// Runs the command-line tool with `args` (without the program name);
/// returns its exit status.
#[pyfunction]
fn run_cli(py: Python<'_>, args: Vec<String>) -> i32 {
    let argv: Vec<String> = std::iter::once("geosep".to_string()).chain(args).collect();
    py.detach(|| geosep::cli::run(argv))
}

#[pymodule]
fn geosep_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyField>()?;
    m.add_class::<PyFramePair>()?;
    m.add_class::<PySeparation>()?;
    m.add_class::<PyTinyInstance>()?;
    m.add_function(wrap_pyfunction!(point_phantom, m)?)?;
    m.add_function(wrap_pyfunction!(circle_phantom, m)?)?;
    m.add_function(wrap_pyfunction!(segment_phantom, m)?)?;
    m.add_function(wrap_pyfunction!(match_energies, m)?)?;
    m.add_function(wrap_pyfunction!(separate, m)?)?;
    m.add_function(wrap_pyfunction!(coherence, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
