//! Monomials in the Bergman space of `D(a)`.
//!
//! In polar coordinates and squared moduli the norm of `z^p` reduces to
//!
//! ```text
//! ‖z^p‖² = πⁿ ∫_0^∞ Π_{k<n} f_{p_k}(ρ) · ρ^{p_n} dρ,
//! ```
//!
//! which is finite exactly when `|p| < (n−1)a − 1`. The finite norms of
//! `1, z_1, …, z_n` give the kernel coefficients `c_0 = 1/vol`,
//! `c_k = ‖z_k‖^{−2}`.

use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

use crate::domain::DomainSpec;
use crate::quadrature::{
    integrate_half_line_with_breakpoints, integrate_interval, probe_divergence, QuadratureConfig,
    QuadratureError, QuadratureOutcome, Verdict,
};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SpaceError {
    #[error("quadrature verdict {numerical:?} contradicts the finiteness criterion (square-integrable: {predicted}) for p = {p}")]
    VerdictMismatch {
        p: MultiIndex,
        predicted: bool,
        numerical: Verdict,
    },
    #[error("a = {a} lies outside (2/(n-1), 3/(n-1)] for n = {n}; the kernel is not spanned by 1, z_1, ..., z_n")]
    OutsideLinearWindow { n: usize, a: String },
    #[error("multi-index has {got} entries, expected {expected}")]
    IndexDimension { expected: usize, got: usize },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(p: Vec<u32>) -> Self {
        MultiIndex(p)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// `e_k` with `k` counted from 1.
    pub fn unit(n: usize, k: usize) -> Self {
        assert!((1..=n).contains(&k), "unit index {k} out of 1..={n}");
        let mut p = vec![0; n];
        p[k - 1] = 1;
        MultiIndex(p)
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&v| v as u64).sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// All multi-indices of length `n` and total degree `d`, lexicographically
/// ascending.
pub fn multi_indices_of_degree(n: usize, d: u32) -> Vec<MultiIndex> {
    fn fill(prefix: &mut Vec<u32>, slots: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
        if slots == 1 {
            prefix.push(remaining);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for v in 0..=remaining {
            prefix.push(v);
            fill(prefix, slots - 1, remaining - v, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        fill(&mut Vec::with_capacity(n), n, d, &mut out);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormSq {
    Finite(f64),
    Infinite,
}

impl NormSq {
    pub fn finite(&self) -> Option<f64> {
        match *self {
            NormSq::Finite(v) => Some(v),
            NormSq::Infinite => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonomialNorm {
    pub p: MultiIndex,
    pub norm_sq: NormSq,
    /// For a finite norm: the quadrature of the full `πⁿ`-scaled integral.
    /// For an infinite one: `value` is `+∞` and the verdict carries the
    /// fitted growth exponent.
    pub outcome: QuadratureOutcome,
}

/// `(c_0, …, c_n)` with first-order error estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelCoefficients {
    pub c: Vec<f64>,
    pub errors: Vec<f64>,
}

impl KernelCoefficients {
    pub fn n(&self) -> usize {
        self.c.len() - 1
    }
}

/// `|p| < (n−1)a − 1`, compared as `|p| + 1 < (n−1)·a` (exact for ratios).
pub fn is_square_integrable(spec: &DomainSpec, p: &MultiIndex) -> bool {
    spec.exponent()
        .scaled_exceeds(spec.n() as u64 - 1, p.degree() + 1)
}

/// Closed-form dimension: 0 for `a ≤ 1/(n−1)`, otherwise `C(n+k, k)` where
/// `(k+1)/(n−1) < a ≤ (k+2)/(n−1)`.
pub fn bergman_dimension(spec: &DomainSpec) -> u64 {
    let n = spec.n() as u64;
    let m = spec.exponent().scaled_ceil(n - 1);
    if m < 2 {
        return 0;
    }
    binomial(n + (m - 2), m - 2)
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Orthogonal monomial basis of the Bergman space, graded-lexicographic.
pub fn enumerate_basis(spec: &DomainSpec) -> Vec<MultiIndex> {
    let n = spec.n();
    let mut out = Vec::new();
    for d in 0u32.. {
        let mut probe = vec![0; n];
        probe[0] = d;
        if !is_square_integrable(spec, &MultiIndex(probe)) {
            break;
        }
        out.extend(multi_indices_of_degree(n, d));
    }
    out
}

/// The reduced one-dimensional integrand `Π_{k<n} f_{p_k}(ρ) · ρ^{p_n}`
/// (without the `πⁿ`).
///
/// The first `n−1` exponents are multiplied in sorted order so the integrand
/// is bitwise invariant under permutations of those coordinates.
pub fn moment_integrand<'a>(spec: &'a DomainSpec, p: &MultiIndex) -> impl Fn(f64) -> f64 + 'a {
    let n = spec.n();
    let mut head: Vec<u32> = p.0[..n - 1].to_vec();
    head.sort_unstable();
    let last = p.0[n - 1] as i32;
    move |rho: f64| {
        let mut prod = rho.powi(last);
        for &q in &head {
            prod *= spec.f_exact(q, rho);
        }
        prod
    }
}

fn check_len(spec: &DomainSpec, p: &MultiIndex) -> Result<(), SpaceError> {
    if p.len() != spec.n() {
        return Err(SpaceError::IndexDimension {
            expected: spec.n(),
            got: p.len(),
        });
    }
    Ok(())
}

pub fn monomial_norm_sq(
    spec: &DomainSpec,
    p: &MultiIndex,
    cfg: &QuadratureConfig,
) -> Result<MonomialNorm, SpaceError> {
    check_len(spec, p)?;
    let scale = PI.powi(spec.n() as i32);
    let f = moment_integrand(spec, p);
    let breaks = [spec.clamp_point()];
    let predicted = is_square_integrable(spec, p);
    if predicted {
        let out = integrate_half_line_with_breakpoints(&f, &breaks, cfg)?;
        match out.verdict {
            Verdict::Converged => Ok(MonomialNorm {
                p: p.clone(),
                norm_sq: NormSq::Finite(scale * out.value),
                outcome: QuadratureOutcome {
                    value: scale * out.value,
                    error_estimate: scale * out.error_estimate,
                    ..out
                },
            }),
            Verdict::Inconclusive => Err(out.require_converged().unwrap_err().into()),
            numerical => Err(SpaceError::VerdictMismatch {
                p: p.clone(),
                predicted,
                numerical,
            }),
        }
    } else {
        let probe = probe_divergence(&f, &breaks, cfg)?;
        match probe.verdict {
            Verdict::Diverges { .. } => Ok(MonomialNorm {
                p: p.clone(),
                norm_sq: NormSq::Infinite,
                outcome: QuadratureOutcome {
                    value: f64::INFINITY,
                    error_estimate: f64::INFINITY,
                    panels_used: probe.panels_used,
                    verdict: probe.verdict,
                },
            }),
            numerical => Err(SpaceError::VerdictMismatch {
                p: p.clone(),
                predicted,
                numerical,
            }),
        }
    }
}

/// `∫_{D(a) ∩ {|z_n|² < radial_bound}} |z^p|² dV`, by quadrature.
pub fn truncated_moment(
    spec: &DomainSpec,
    p: &MultiIndex,
    radial_bound: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureOutcome, SpaceError> {
    check_len(spec, p)?;
    let scale = PI.powi(spec.n() as i32);
    let out = integrate_interval(
        moment_integrand(spec, p),
        0.0,
        radial_bound,
        &[spec.clamp_point()],
        cfg,
    )?
    .require_converged()?;
    Ok(QuadratureOutcome {
        value: scale * out.value,
        error_estimate: scale * out.error_estimate,
        ..out
    })
}

/// Whether `2/(n−1) < a ≤ 3/(n−1)`, i.e. the Bergman space is exactly
/// `span{1, z_1, …, z_n}`.
pub fn in_linear_window(spec: &DomainSpec) -> bool {
    let e = spec.exponent();
    let m = spec.n() as u64 - 1;
    e.scaled_exceeds(m, 2) && !e.scaled_exceeds(m, 3)
}

pub fn kernel_coefficients(
    spec: &DomainSpec,
    cfg: &QuadratureConfig,
) -> Result<KernelCoefficients, SpaceError> {
    if !in_linear_window(spec) {
        return Err(SpaceError::OutsideLinearWindow {
            n: spec.n(),
            a: spec.exponent().to_string(),
        });
    }
    let n = spec.n();
    let indices = std::iter::once(MultiIndex::zero(n)).chain((1..=n).map(|k| MultiIndex::unit(n, k)));
    let mut c = Vec::with_capacity(n + 1);
    let mut errors = Vec::with_capacity(n + 1);
    for p in indices {
        let norm = monomial_norm_sq(spec, &p, cfg)?;
        let v = norm
            .norm_sq
            .finite()
            .expect("window guarantees square-integrability");
        c.push(1.0 / v);
        errors.push(norm.outcome.error_estimate / (v * v));
    }
    Ok(KernelCoefficients { c, errors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Exponent;
    use approx::assert_relative_eq;

    fn ratio(n: usize, num: u64, den: u64) -> DomainSpec {
        DomainSpec::new(n, Exponent::ratio(num, den).unwrap()).unwrap()
    }

    fn mi(p: &[u32]) -> MultiIndex {
        MultiIndex::new(p.to_vec())
    }

    #[test]
    fn integrability_examples() {
        let d = ratio(2, 5, 2);
        assert!(is_square_integrable(&d, &mi(&[1, 0])));
        assert!(!is_square_integrable(&d, &mi(&[1, 1])));
        assert!(!is_square_integrable(&ratio(2, 1, 1), &mi(&[0, 0])));
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(bergman_dimension(&ratio(2, 5, 2)), 3);
        assert_eq!(bergman_dimension(&ratio(3, 1, 1)), 1);
        assert_eq!(bergman_dimension(&ratio(2, 1, 2)), 0);
        assert_eq!(bergman_dimension(&ratio(4, 1, 1)), 5);
    }

    #[test]
    fn basis_examples() {
        assert_eq!(
            enumerate_basis(&ratio(2, 5, 2)),
            vec![mi(&[0, 0]), mi(&[0, 1]), mi(&[1, 0])]
        );
        assert!(enumerate_basis(&ratio(2, 1, 1)).is_empty());
    }

    #[test]
    fn boundary_takes_larger_dimension() {
        // a = (k+2)/(n-1) exactly, n = 3, k = 1: dimension C(4,1) = 4
        let d = ratio(3, 3, 2);
        assert_eq!(bergman_dimension(&d), 4);
        assert_eq!(enumerate_basis(&d).len(), 4);
        // a = 1/(n-1) exactly: trivial space
        assert_eq!(bergman_dimension(&ratio(3, 1, 2)), 0);
    }

    #[test]
    fn degree_enumeration_is_lexicographic() {
        let v = multi_indices_of_degree(3, 2);
        assert_eq!(v.len(), 6);
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        assert!(v.iter().all(|p| p.degree() == 2));
    }

    #[test]
    fn divergent_monomial_is_marked_infinite() {
        let d = ratio(2, 5, 2);
        let out = monomial_norm_sq(&d, &mi(&[1, 1]), &QuadratureConfig::default()).unwrap();
        assert_eq!(out.norm_sq, NormSq::Infinite);
        match out.outcome.verdict {
            Verdict::Diverges { exponent } => assert!((exponent - 0.5).abs() < 0.1, "{exponent}"),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn finite_monomials() {
        let cfg = QuadratureConfig::default();
        let out = monomial_norm_sq(&ratio(3, 2, 1), &mi(&[0, 0, 1]), &cfg).unwrap();
        assert!(out.norm_sq.finite().unwrap() > 0.0);
        assert!(out.outcome.error_estimate <= cfg.rel_tol * out.outcome.value);
    }

    #[test]
    fn wrong_length_index_is_rejected() {
        let err = monomial_norm_sq(&ratio(3, 2, 1), &mi(&[0, 1]), &QuadratureConfig::default());
        assert!(matches!(err, Err(SpaceError::IndexDimension { .. })));
    }

    #[test]
    fn coefficients_outside_window_are_rejected() {
        let err = kernel_coefficients(&ratio(2, 2, 1), &QuadratureConfig::default());
        assert!(matches!(err, Err(SpaceError::OutsideLinearWindow { .. })));
        assert!(in_linear_window(&ratio(2, 3, 1)));
        assert!(!in_linear_window(&ratio(2, 31, 10)));
    }

    #[test]
    fn coefficients_positive_and_symmetric() {
        let cfg = QuadratureConfig::default();
        let k = kernel_coefficients(&ratio(2, 5, 2), &cfg).unwrap();
        assert_eq!(k.c.len(), 3);
        assert!(k.c.iter().all(|&c| c > 0.0));

        let k3 = kernel_coefficients(&ratio(3, 5, 4), &cfg).unwrap();
        assert!((k3.c[1] - k3.c[2]).abs() <= k3.errors[1] + k3.errors[2]);
    }

    #[test]
    fn volume_integrand_has_known_small_rho_form() {
        // below the clamp point f_0(ρ) = ρ + (ρ+1)^{-a}
        let d = ratio(2, 5, 2);
        let f = moment_integrand(&d, &mi(&[0, 0]));
        let rho = 0.1;
        assert_relative_eq!(f(rho), rho + 1.1f64.powf(-2.5), max_relative = 1e-15);
    }
}
