//! Bergman kernel, metric, curvature and the biholomorphic invariant `B`
//! for kernels of the form
//!
//! ```text
//! K(z, w) = c_0 + Σ_k c_k z_k conj(w_k).
//! ```
//!
//! All derivatives are analytic. Matrix layout: entry `(j, i)` of a metric
//! or T-matrix is `∂²/∂z_i ∂conj(w_j) log K`, so rows carry the conjugated
//! index and `g(X, X̄) = X^H · G · X`. Transformation laws then read
//! `T₁ = J^H · T₂(F z, F w) · J`.
//!
//! Curvature convention:
//! `R_{ij̄kl̄} = −∂_k∂_l̄ g_{ij̄} + Σ g^{q̄p} ∂_k g_{iq̄} ∂_l̄ g_{pj̄}` and
//! `H(X) = R(X, X̄, X, X̄) / g(X, X̄)²`. The Fubini–Study potential
//! `log(1 + |z|²)` has `H ≡ 2`; the Poincaré disk potential
//! `−2 log(1 − |z|²)` has `H ≡ −1`.

use num_complex::Complex64;
use thiserror::Error;

use crate::domain::Point;
use crate::linalg::{self, CMatrix};
use crate::space::KernelCoefficients;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeometryError {
    #[error("kernel vanishes at the requested pair of points")]
    ZeroKernel,
    #[error("direction is degenerate (zero or underflowing metric norm)")]
    DegenerateDirection,
    #[error("expected dimension {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("kernel coefficients must be positive and finite, at least two of them")]
    InvalidCoefficients,
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("linear map is singular")]
    SingularMap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelForm {
    coeffs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianForm {
    entries: CMatrix,
}

impl HermitianForm {
    const TOLERANCE: f64 = 1e-13;

    /// Accepts `m` if it is Hermitian to within `1e-13` (relative to its
    /// largest entry) and stores the exactly Hermitian average `(m + m^H)/2`.
    pub fn new(m: CMatrix) -> Result<Self, GeometryError> {
        let scale = linalg::max_abs(&m).max(f64::MIN_POSITIVE);
        let dev = linalg::max_abs(&(&m - m.adjoint())) / scale;
        if dev > Self::TOLERANCE || !m.is_square() {
            return Err(GeometryError::NotHermitian(dev));
        }
        Ok(Self::symmetrized(m))
    }

    fn symmetrized(m: CMatrix) -> Self {
        let entries = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        HermitianForm { entries }
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// `X^H · G · X`, real for a Hermitian form.
    pub fn quadratic(&self, x: &[Complex64]) -> f64 {
        let v = nalgebra::DVector::from_column_slice(x);
        (v.adjoint() * &self.entries * &v)[(0, 0)].re
    }

    pub fn determinant(&self) -> f64 {
        linalg::det(&self.entries).re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .entries
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn is_positive_definite(&self) -> bool {
        self.entries.clone().cholesky().is_some()
    }
}

/// An invertible linear map of `ℂⁿ`; its own Jacobian.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    matrix: CMatrix,
}

impl LinearMap {
    pub fn new(matrix: CMatrix) -> Result<Self, GeometryError> {
        if !matrix.is_square() || linalg::det(&matrix).norm() == 0.0 {
            return Err(GeometryError::SingularMap);
        }
        Ok(LinearMap { matrix })
    }

    pub fn diagonal(d: &[Complex64]) -> Result<Self, GeometryError> {
        Self::new(CMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d)))
    }

    /// `z_k ↦ e^{iθ_k} z_k`.
    pub fn phase_rotation(thetas: &[f64]) -> Self {
        let d: Vec<Complex64> = thetas.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
        Self::diagonal(&d).expect("unit diagonal is invertible")
    }

    /// `(F z)_k = z_{perm[k]}` (0-based).
    pub fn permutation(perm: &[usize]) -> Result<Self, GeometryError> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(GeometryError::SingularMap);
            }
        }
        let mut m = CMatrix::zeros(n, n);
        for (k, &p) in perm.iter().enumerate() {
            m[(k, p)] = Complex64::new(1.0, 0.0);
        }
        Self::new(m)
    }

    pub fn scaling(n: usize, factor: f64) -> Result<Self, GeometryError> {
        Self::diagonal(&vec![Complex64::new(factor, 0.0); n])
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn jacobian_det(&self) -> Complex64 {
        linalg::det(&self.matrix)
    }

    pub fn apply(&self, z: &Point) -> Point {
        let v = &self.matrix * nalgebra::DVector::from_column_slice(z.coords());
        Point::new(v.iter().copied().collect()).expect("finite image of a finite point")
    }
}

/// Metric of a Kähler potential together with its first and mixed second
/// derivatives at one point. Layout as in the module docs:
/// `metric[(j, i)] = g_{ij̄}`, `d_hol[k][(j, i)] = ∂_k g_{ij̄}`,
/// `d_antihol[l][(j, i)] = ∂_l̄ g_{ij̄}`,
/// `d_mixed[k * n + l][(j, i)] = ∂_k ∂_l̄ g_{ij̄}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricJet {
    pub metric: CMatrix,
    pub d_hol: Vec<CMatrix>,
    pub d_antihol: Vec<CMatrix>,
    pub d_mixed: Vec<CMatrix>,
}

impl MetricJet {
    pub fn dim(&self) -> usize {
        self.metric.nrows()
    }
}

/// Holomorphic sectional curvature `H(X)` from a metric jet.
pub fn sectional_curvature_of_jet(jet: &MetricJet, x: &[Complex64]) -> Result<f64, GeometryError> {
    let n = jet.dim();
    if x.len() != n {
        return Err(GeometryError::Dimension {
            expected: n,
            got: x.len(),
        });
    }
    let xv = nalgebra::DVector::from_column_slice(x);
    let xh = xv.adjoint();
    let norm_sq = (&xh * &jet.metric * &xv)[(0, 0)].re;
    let denom = norm_sq * norm_sq;
    if !(denom.is_normal() && denom > 0.0) {
        return Err(GeometryError::DegenerateDirection);
    }

    let mut u = CMatrix::zeros(n, n);
    let mut v = CMatrix::zeros(n, n);
    let mut w = CMatrix::zeros(n, n);
    for k in 0..n {
        u += &jet.d_hol[k] * x[k];
        v += &jet.d_antihol[k] * x[k].conj();
        for l in 0..n {
            w += &jet.d_mixed[k * n + l] * (x[k] * x[l].conj());
        }
    }
    let inv = linalg::inverse(&jet.metric).ok_or(GeometryError::DegenerateDirection)?;
    let first = -(&xh * &w * &xv)[(0, 0)];
    let second = (&xh * &v * &inv * &u * &xv)[(0, 0)];
    Ok((first + second).re / denom)
}

impl KernelForm {
    pub fn new(coeffs: Vec<f64>) -> Result<Self, GeometryError> {
        if coeffs.len() < 2 || coeffs.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
            return Err(GeometryError::InvalidCoefficients);
        }
        Ok(KernelForm { coeffs })
    }

    pub fn from_coefficients(k: &KernelCoefficients) -> Result<Self, GeometryError> {
        Self::new(k.c.clone())
    }

    /// `K(z, w) = 1 + Σ z_k conj(w_k)`: the Fubini–Study potential on the
    /// affine chart.
    pub fn fubini_study(n: usize) -> Self {
        KernelForm {
            coeffs: vec![1.0; n + 1],
        }
    }

    pub fn n(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    fn check(&self, z: &Point) -> Result<(), GeometryError> {
        if z.dim() != self.n() {
            return Err(GeometryError::Dimension {
                expected: self.n(),
                got: z.dim(),
            });
        }
        Ok(())
    }

    fn eval_raw(&self, z: &[Complex64], w: &[Complex64]) -> Complex64 {
        z.iter()
            .zip(w)
            .zip(&self.coeffs[1..])
            .fold(Complex64::new(self.coeffs[0], 0.0), |acc, ((zk, wk), ck)| {
                acc + zk * wk.conj() * *ck
            })
    }

    /// # Panics
    /// On a dimension mismatch.
    pub fn kernel_eval(&self, z: &Point, w: &Point) -> Complex64 {
        self.check(z).and(self.check(w)).expect("point dimension");
        self.eval_raw(z.coords(), w.coords())
    }

    /// `K(z, z)`, real and at least `c_0`.
    pub fn diagonal(&self, z: &Point) -> f64 {
        self.check(z).expect("point dimension");
        self.coeffs[0]
            + z.coords()
                .iter()
                .zip(&self.coeffs[1..])
                .map(|(zk, ck)| ck * zk.norm_sqr())
                .sum::<f64>()
    }

    fn t_raw(&self, z: &[Complex64], w: &[Complex64]) -> Result<CMatrix, GeometryError> {
        let n = self.n();
        let c = &self.coeffs[1..];
        let k = self.eval_raw(z, w);
        let scale = self.coeffs[0]
            + z.iter()
                .zip(w)
                .zip(c)
                .map(|((a, b), ck)| ck * a.norm() * b.norm())
                .sum::<f64>();
        if k.norm() <= f64::EPSILON * scale {
            return Err(GeometryError::ZeroKernel);
        }
        let k2 = k * k;
        Ok(CMatrix::from_fn(n, n, |j, i| {
            let a_i = w[i].conj() * c[i];
            let b_j = z[j] * c[j];
            let m = if i == j { Complex64::new(c[i], 0.0) } else { ZERO };
            m / k - a_i * b_j / k2
        }))
    }

    /// `T(z, w)`, entry `(j, i) = ∂²/∂z_i ∂conj(w_j) log K(z, w)`.
    pub fn t_matrix(&self, z: &Point, w: &Point) -> Result<CMatrix, GeometryError> {
        self.check(z)?;
        self.check(w)?;
        self.t_raw(z.coords(), w.coords())
    }

    /// Bergman metric `g = ∂∂̄ log K(z, z)`.
    pub fn metric_at(&self, z: &Point) -> HermitianForm {
        self.check(z).expect("point dimension");
        let t = self
            .t_raw(z.coords(), z.coords())
            .expect("K(z, z) ≥ c_0 > 0");
        HermitianForm::symmetrized(t)
    }

    /// Analytic jet of the metric of `log K(z, z)`.
    pub fn metric_jet(&self, z: &Point) -> MetricJet {
        self.check(z).expect("point dimension");
        let n = self.n();
        let c = &self.coeffs[1..];
        let zc = z.coords();
        let big_a = self.diagonal(z);
        let a: Vec<Complex64> = (0..n).map(|i| zc[i].conj() * c[i]).collect();
        let b: Vec<Complex64> = (0..n).map(|j| zc[j] * c[j]).collect();
        let m = |i: usize, j: usize| if i == j { c[i] } else { 0.0 };
        let (a1, a2, a3, a4) = (1.0 / big_a, big_a.powi(-2), big_a.powi(-3), big_a.powi(-4));

        let g = |i: usize, j: usize| m(i, j) * a1 - a[i] * b[j] * a2;
        let dk = |k: usize, i: usize, j: usize| {
            -(a[k] * m(i, j) + a[i] * m(k, j)) * a2 + a[i] * b[j] * a[k] * (2.0 * a3)
        };
        let dl = |l: usize, i: usize, j: usize| {
            -(b[l] * m(i, j) + b[j] * m(i, l)) * a2 + a[i] * b[j] * b[l] * (2.0 * a3)
        };
        let dkl = |k: usize, l: usize, i: usize, j: usize| {
            let second = -(m(i, j) * m(k, l) + m(i, l) * m(k, j)) * a2;
            let third = (a[k] * b[l] * m(i, j)
                + a[i] * b[l] * m(k, j)
                + a[k] * b[j] * m(i, l)
                + a[i] * b[j] * m(k, l))
                * (2.0 * a3);
            let fourth = a[i] * b[j] * a[k] * b[l] * (6.0 * a4);
            second + third - fourth
        };

        let layout = |f: &dyn Fn(usize, usize) -> Complex64| CMatrix::from_fn(n, n, |j, i| f(i, j));
        MetricJet {
            metric: layout(&|i, j| g(i, j) + ZERO),
            d_hol: (0..n).map(|k| layout(&|i, j| dk(k, i, j))).collect(),
            d_antihol: (0..n).map(|l| layout(&|i, j| dl(l, i, j))).collect(),
            d_mixed: (0..n * n)
                .map(|kl| layout(&|i, j| dkl(kl / n, kl % n, i, j)))
                .collect(),
        }
    }

    pub fn sectional_curvature(&self, z: &Point, x: &[Complex64]) -> Result<f64, GeometryError> {
        self.check(z)?;
        sectional_curvature_of_jet(&self.metric_jet(z), x)
    }

    /// The diagonal map `w_k = sqrt(c_k / c_0) z_k` carrying this metric to
    /// the Fubini–Study metric.
    pub fn rescale_to_fubini_study(&self) -> LinearMap {
        let c0 = self.coeffs[0];
        let d: Vec<Complex64> = self.coeffs[1..]
            .iter()
            .map(|ck| Complex64::new((ck / c0).sqrt(), 0.0))
            .collect();
        LinearMap::diagonal(&d).expect("positive coefficients")
    }

    /// `B(z) = det T(z, z) / K(z, z)`.
    pub fn b_function(&self, z: &Point) -> f64 {
        self.metric_at(z).determinant() / self.diagonal(z)
    }

    /// `Π_{j=0}^n c_j / K(z, z)^{n+2}`.
    pub fn b_closed_form(&self, z: &Point) -> f64 {
        let prod: f64 = self.coeffs.iter().product();
        prod / self.diagonal(z).powi(self.n() as i32 + 2)
    }

    pub fn check_transformation_law(&self, f: &LinearMap, samples: &[Point]) -> TransformationReport {
        assert_eq!(f.dim(), self.n(), "map dimension");
        let jac = f.matrix();
        let jac_h = jac.adjoint();
        let det = f.jacobian_det();
        let mut report = TransformationReport::default();
        let m = samples.len();
        for (idx, z) in samples.iter().enumerate() {
            let fz = f.apply(z);
            let b_lhs = self.b_function(z);
            let b_rhs = self.b_function(&fz);
            report.b_deviation = report.b_deviation.max(rel(b_lhs, b_rhs));

            for w in [z, &samples[(idx + 1) % m]] {
                let fw = f.apply(w);
                let k_lhs = self.kernel_eval(z, w);
                let k_rhs = det.conj() * self.kernel_eval(&fz, &fw) * det;
                let dev = (k_lhs - k_rhs).norm() / k_lhs.norm();
                report.kernel_deviation = report.kernel_deviation.max(dev);
                let ratio = k_rhs.norm() / k_lhs.norm();
                report.kernel_ratio_min = report.kernel_ratio_min.min(ratio);
                report.kernel_ratio_max = report.kernel_ratio_max.max(ratio);

                // rows are indexed by w̄, columns by z: T(z,w) = J(w)^H T(Fz,Fw) J(z)
                match (self.t_matrix(z, w), self.t_matrix(&fz, &fw)) {
                    (Ok(t1), Ok(t2)) => {
                        let mapped = &jac_h * t2 * jac;
                        let dev = linalg::max_abs(&(&t1 - mapped)) / linalg::max_abs(&t1);
                        report.t_deviation = report.t_deviation.max(dev);
                        report.pairs += 1;
                    }
                    _ => report.skipped_pairs += 1,
                }
            }
        }
        report.max_deviation = report
            .kernel_deviation
            .max(report.t_deviation)
            .max(report.b_deviation);
        report
    }

    pub fn cartan_conditions(&self, samples: &[Point]) -> CartanReport {
        let n = self.n();
        let origin = Point::origin(n);
        let k00 = self.kernel_eval(&origin, &origin);
        let t00 = self.t_matrix(&origin, &origin).expect("K(0,0) = c_0 > 0");
        let mut report = CartanReport {
            kernel_deviation: 0.0,
            t_deviation: 0.0,
            min_eigenvalue: HermitianForm::symmetrized(t00.clone()).min_eigenvalue(),
            samples: samples.len(),
        };
        for z in samples {
            let kz0 = self.kernel_eval(z, &origin);
            report.kernel_deviation = report.kernel_deviation.max((kz0 - k00).norm());
            let tz0 = self.t_matrix(z, &origin).expect("K(z,0) = c_0 > 0");
            report.t_deviation = report.t_deviation.max(linalg::max_abs(&(tz0 - &t00)));
        }
        report
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(f64::MIN_POSITIVE)
}

/// Worst deviations from the kernel, T-matrix and `B` transformation laws
/// over a sample set (relative, max over points and pairs).
#[derive(Debug, Clone, PartialEq)]
pub struct TransformationReport {
    pub kernel_deviation: f64,
    pub t_deviation: f64,
    pub b_deviation: f64,
    pub max_deviation: f64,
    /// Range of `|conj(det J) K(Fz, Fw) det J| / |K(z, w)|`.
    pub kernel_ratio_min: f64,
    pub kernel_ratio_max: f64,
    pub pairs: usize,
    pub skipped_pairs: usize,
}

impl Default for TransformationReport {
    fn default() -> Self {
        Self {
            kernel_deviation: 0.0,
            t_deviation: 0.0,
            b_deviation: 0.0,
            max_deviation: 0.0,
            kernel_ratio_min: f64::INFINITY,
            kernel_ratio_max: 0.0,
            pairs: 0,
            skipped_pairs: 0,
        }
    }
}

impl TransformationReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.max_deviation < tol
    }
}

/// `|K(z,0) − K(0,0)|` and `max |T(z,0) − T(0,0)|` over the samples, plus
/// the smallest eigenvalue of `T(0,0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CartanReport {
    pub kernel_deviation: f64,
    pub t_deviation: f64,
    pub min_eigenvalue: f64,
    pub samples: usize,
}

impl CartanReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.kernel_deviation < tol && self.t_deviation < tol && self.min_eigenvalue > 0.0
    }
}
