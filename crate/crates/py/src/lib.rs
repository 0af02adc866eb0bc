//! Python bindings: `Domain` and `Kernel` classes plus module-level
//! shortcuts. Points and directions are lists of Python complex numbers;
//! matrices come back as lists of rows.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use reinhardt_bergman::linalg::CMatrix;
use reinhardt_bergman::space::{self, MultiIndex, SpaceError};
use reinhardt_bergman::{DomainSpec, Exponent, KernelForm, Point, QuadratureConfig, RadiusScale};

/// `a` may be passed as a float or as a string such as `"5/2"`.
#[derive(FromPyObject)]
enum ExponentArg {
    Text(String),
    Number(f64),
}

impl ExponentArg {
    fn parse(self) -> PyResult<Exponent> {
        match self {
            ExponentArg::Text(s) => s.parse().map_err(|e| PyValueError::new_err(format!("{e}"))),
            ExponentArg::Number(a) => Exponent::real(a).map_err(|e| PyValueError::new_err(e.to_string())),
        }
    }
}

fn space_err(e: SpaceError) -> PyErr {
    match e {
        SpaceError::OutsideLinearWindow { .. } | SpaceError::IndexDimension { .. } => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn point(z: Vec<Complex64>, n: usize) -> PyResult<Point> {
    if z.len() != n {
        return Err(PyValueError::new_err(format!("expected {n} coordinates, got {}", z.len())));
    }
    Point::new(z).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn rows(m: &CMatrix) -> Vec<Vec<Complex64>> {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect()).collect()
}

fn quadrature(rel_tol: f64) -> PyResult<QuadratureConfig> {
    let cfg = QuadratureConfig::default().with_rel_tol(rel_tol);
    cfg.validate().map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(cfg)
}

/// The domain D(a) in C^n, or its enlarged variant when `radius_scale=2`.
#[pyclass(name = "Domain", frozen, module = "reinhardt")]
struct PyDomain {
    spec: DomainSpec,
}

#[pymethods]
impl PyDomain {
    #[new]
    #[pyo3(signature = (n, a, radius_scale=1))]
    fn new(n: usize, a: ExponentArg, radius_scale: u32) -> PyResult<Self> {
        let scale = RadiusScale::from_factor(radius_scale)
            .ok_or_else(|| PyValueError::new_err("radius_scale must be 1 or 2"))?;
        let spec = DomainSpec::with_scale(n, a.parse()?, scale).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Self { spec })
    }

    #[getter]
    fn n(&self) -> usize {
        self.spec.n()
    }

    /// The exponent as given, e.g. `"5/2"`.
    #[getter]
    fn a(&self) -> String {
        self.spec.exponent().to_string()
    }

    #[getter]
    fn a_value(&self) -> f64 {
        self.spec.a()
    }

    fn __repr__(&self) -> String {
        format!("Domain(n={}, a={}, radius_scale={})", self.spec.n(), self.spec.exponent(), self.spec.radius_scale().factor())
    }

    fn contains(&self, z: Vec<Complex64>) -> PyResult<bool> {
        Ok(self.spec.contains(&point(z, self.spec.n())?))
    }

    /// `(lo, hi)` bounds on each `|z_k|^2` over `|z_n|^2 = rho`.
    fn radial_interval(&self, rho: f64) -> (f64, f64) {
        let iv = self.spec.radial_interval(rho);
        (iv.lo, iv.hi)
    }

    fn f_exact(&self, q: u32, rho: f64) -> f64 {
        self.spec.f_exact(q, rho)
    }

    fn f_asymptotic(&self, q: u32, rho: f64) -> f64 {
        self.spec.f_asymptotic(q, rho)
    }

    #[pyo3(signature = (count, radial_bound=10.0, seed=1))]
    fn sample_points(&self, count: usize, radial_bound: f64, seed: u64) -> PyResult<Vec<Vec<Complex64>>> {
        if radial_bound.is_nan() || radial_bound <= 0.0 {
            return Err(PyValueError::new_err("radial_bound must be positive"));
        }
        Ok(self
            .spec
            .sample_points(count, radial_bound, seed)
            .into_iter()
            .map(Point::into_inner)
            .collect())
    }

    fn dimension(&self) -> u64 {
        space::bergman_dimension(&self.spec)
    }

    /// Exponent tuples of the monomial basis in graded-lex order.
    fn basis(&self) -> Vec<Vec<u32>> {
        space::enumerate_basis(&self.spec)
            .into_iter()
            .map(|p| p.exponents().to_vec())
            .collect()
    }

    fn is_square_integrable(&self, p: Vec<u32>) -> PyResult<bool> {
        let p = MultiIndex::new(p);
        if p.len() != self.spec.n() {
            return Err(PyValueError::new_err("multi-index length must equal n"));
        }
        Ok(space::is_square_integrable(&self.spec, &p))
    }

    /// Squared L2 norm of `z^p`; `inf` when the monomial is not square-integrable.
    #[pyo3(signature = (p, rel_tol=1e-10))]
    fn monomial_norm_sq(&self, py: Python<'_>, p: Vec<u32>, rel_tol: f64) -> PyResult<f64> {
        let cfg = quadrature(rel_tol)?;
        let p = MultiIndex::new(p);
        let norm = py
            .detach(|| space::monomial_norm_sq(&self.spec, &p, &cfg))
            .map_err(space_err)?;
        Ok(norm.norm_sq.finite().unwrap_or(f64::INFINITY))
    }

    /// `[c_0, ..., c_n]`; raises ValueError outside `2 < (n-1)a <= 3`.
    #[pyo3(signature = (rel_tol=1e-10))]
    fn kernel_coefficients(&self, py: Python<'_>, rel_tol: f64) -> PyResult<Vec<f64>> {
        let cfg = quadrature(rel_tol)?;
        let k = py
            .detach(|| space::kernel_coefficients(&self.spec, &cfg))
            .map_err(space_err)?;
        Ok(k.c)
    }

    #[pyo3(signature = (rel_tol=1e-10))]
    fn kernel(&self, py: Python<'_>, rel_tol: f64) -> PyResult<PyKernel> {
        let c = self.kernel_coefficients(py, rel_tol)?;
        PyKernel::new(c)
    }
}

/// `K(z, w) = c_0 + sum_k c_k z_k conj(w_k)` and everything derived from it.
#[pyclass(name = "Kernel", frozen, module = "reinhardt")]
struct PyKernel {
    form: KernelForm,
}

#[pymethods]
impl PyKernel {
    #[new]
    fn new(coeffs: Vec<f64>) -> PyResult<Self> {
        let form = KernelForm::new(coeffs).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Self { form })
    }

    #[staticmethod]
    fn fubini_study(n: usize) -> Self {
        Self { form: KernelForm::fubini_study(n) }
    }

    #[getter]
    fn coeffs(&self) -> Vec<f64> {
        self.form.coeffs().to_vec()
    }

    #[getter]
    fn n(&self) -> usize {
        self.form.n()
    }

    fn __repr__(&self) -> String {
        format!("Kernel({:?})", self.form.coeffs())
    }

    fn __call__(&self, z: Vec<Complex64>, w: Vec<Complex64>) -> PyResult<Complex64> {
        let n = self.form.n();
        Ok(self.form.kernel_eval(&point(z, n)?, &point(w, n)?))
    }

    /// Rows of `g` with `g[j][i] = d^2 log K / dz_i dconj(z_j)`.
    fn metric(&self, z: Vec<Complex64>) -> PyResult<Vec<Vec<Complex64>>> {
        let z = point(z, self.form.n())?;
        Ok(rows(self.form.metric_at(&z).entries()))
    }

    /// Rows of `T(z, w)`, same layout as `metric`.
    fn t_matrix(&self, z: Vec<Complex64>, w: Vec<Complex64>) -> PyResult<Vec<Vec<Complex64>>> {
        let n = self.form.n();
        let t = self
            .form
            .t_matrix(&point(z, n)?, &point(w, n)?)
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(rows(&t))
    }

    /// Holomorphic sectional curvature at `z` in direction `x`.
    fn curvature(&self, z: Vec<Complex64>, x: Vec<Complex64>) -> PyResult<f64> {
        let n = self.form.n();
        if x.len() != n {
            return Err(PyValueError::new_err(format!("expected {n} direction components")));
        }
        self.form
            .sectional_curvature(&point(z, n)?, &x)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn b_function(&self, z: Vec<Complex64>) -> PyResult<f64> {
        Ok(self.form.b_function(&point(z, self.form.n())?))
    }

    fn b_closed_form(&self, z: Vec<Complex64>) -> PyResult<f64> {
        Ok(self.form.b_closed_form(&point(z, self.form.n())?))
    }
}

fn domain(n: usize, a: ExponentArg) -> PyResult<PyDomain> {
    PyDomain::new(n, a, 1)
}

#[pyfunction]
fn dimension(n: usize, a: ExponentArg) -> PyResult<u64> {
    Ok(domain(n, a)?.dimension())
}

#[pyfunction]
fn basis(n: usize, a: ExponentArg) -> PyResult<Vec<Vec<u32>>> {
    Ok(domain(n, a)?.basis())
}

#[pyfunction]
#[pyo3(signature = (n, a, p, rel_tol=1e-10))]
fn monomial_norm_sq(py: Python<'_>, n: usize, a: ExponentArg, p: Vec<u32>, rel_tol: f64) -> PyResult<f64> {
    domain(n, a)?.monomial_norm_sq(py, p, rel_tol)
}

#[pyfunction]
#[pyo3(signature = (n, a, rel_tol=1e-10))]
fn kernel_coefficients(py: Python<'_>, n: usize, a: ExponentArg, rel_tol: f64) -> PyResult<Vec<f64>> {
    domain(n, a)?.kernel_coefficients(py, rel_tol)
}

#[pyfunction]
fn metric(py: Python<'_>, n: usize, a: ExponentArg, z: Vec<Complex64>) -> PyResult<Vec<Vec<Complex64>>> {
    domain(n, a)?.kernel(py, 1e-10)?.metric(z)
}

#[pyfunction]
fn curvature(py: Python<'_>, n: usize, a: ExponentArg, z: Vec<Complex64>, x: Vec<Complex64>) -> PyResult<f64> {
    domain(n, a)?.kernel(py, 1e-10)?.curvature(z, x)
}

#[pyfunction]
fn b_function(py: Python<'_>, n: usize, a: ExponentArg, z: Vec<Complex64>) -> PyResult<f64> {
    domain(n, a)?.kernel(py, 1e-10)?.b_function(z)
}

#[pyfunction]
#[pyo3(signature = (n, a, count, radial_bound=10.0, seed=1))]
fn sample_points(n: usize, a: ExponentArg, count: usize, radial_bound: f64, seed: u64) -> PyResult<Vec<Vec<Complex64>>> {
    domain(n, a)?.sample_points(count, radial_bound, seed)
}

#[pymodule]
fn reinhardt(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDomain>()?;
    m.add_class::<PyKernel>()?;
    m.add_function(wrap_pyfunction!(dimension, m)?)?;
    m.add_function(wrap_pyfunction!(basis, m)?)?;
    m.add_function(wrap_pyfunction!(monomial_norm_sq, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(metric, m)?)?;
    m.add_function(wrap_pyfunction!(curvature, m)?)?;
    m.add_function(wrap_pyfunction!(b_function, m)?)?;
    m.add_function(wrap_pyfunction!(sample_points, m)?)?;
    Ok(())
}
