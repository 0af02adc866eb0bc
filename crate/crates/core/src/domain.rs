//! The Reinhardt domains
//!
//! ```text
//! D(a) = { z ∈ ℂⁿ : ||z_k|² − |z_n|²| < s·(|z_n|² + 1)^{−a},  k = 1, …, n−1 }
//! ```
//!
//! with `s = 1` (the domain itself) or `s = 2` (the enlarged domain whose
//! boundary stays away from that of `D(a)`).

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum DomainError {
    #[error("dimension must be at least 2, got {0}")]
    Dimension(usize),
    #[error("exponent must be positive and finite, got {0}")]
    Exponent(String),
    #[error("cannot parse exponent {0:?} (expected a decimal or a ratio p/q)")]
    ParseExponent(String),
    #[error("point has {got} coordinates, expected {expected}")]
    PointDimension { expected: usize, got: usize },
    #[error("point has a non-finite coordinate")]
    NonFinitePoint,
}

/// The exponent `a`, kept exact when supplied as a ratio of integers so
/// that case boundaries `a = m/(n−1)` compare without rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Ratio { num: u64, den: u64 },
    Real(f64),
}

impl Exponent {
    pub fn ratio(num: u64, den: u64) -> Result<Self, DomainError> {
        if num == 0 || den == 0 {
            return Err(DomainError::Exponent(format!("{num}/{den}")));
        }
        Ok(Exponent::Ratio { num, den })
    }

    pub fn real(a: f64) -> Result<Self, DomainError> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(DomainError::Exponent(a.to_string()));
        }
        Ok(Exponent::Real(a))
    }

    pub fn value(&self) -> f64 {
        match *self {
            Exponent::Ratio { num, den } => num as f64 / den as f64,
            Exponent::Real(a) => a,
        }
    }

    /// Whether `factor · a > bound`, exactly for ratios.
    pub fn scaled_exceeds(&self, factor: u64, bound: u64) -> bool {
        match *self {
            Exponent::Ratio { num, den } => {
                factor as u128 * num as u128 > bound as u128 * den as u128
            }
            Exponent::Real(a) => factor as f64 * a > bound as f64,
        }
    }

    /// `⌈factor · a⌉`, exactly for ratios.
    pub fn scaled_ceil(&self, factor: u64) -> u64 {
        match *self {
            Exponent::Ratio { num, den } => {
                let m = factor as u128 * num as u128;
                m.div_ceil(den as u128) as u64
            }
            Exponent::Real(a) => (factor as f64 * a).ceil() as u64,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Ratio { num, den } => write!(f, "{num}/{den}"),
            Exponent::Real(a) => write!(f, "{a}"),
        }
    }
}

impl FromStr for Exponent {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || DomainError::ParseExponent(s.to_string());
        match s.split_once('/') {
            Some((p, q)) => {
                let num = p.trim().parse::<u64>().map_err(|_| bad())?;
                let den = q.trim().parse::<u64>().map_err(|_| bad())?;
                Exponent::ratio(num, den)
            }
            None => Exponent::real(s.parse::<f64>().map_err(|_| bad())?),
        }
    }
}

/// Selects `D(a)` (`Standard`, half-width factor 1) or the enlarged domain
/// (`Enlarged`, factor 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RadiusScale {
    #[default]
    Standard,
    Enlarged,
}

impl RadiusScale {
    pub fn factor(self) -> f64 {
        match self {
            RadiusScale::Standard => 1.0,
            RadiusScale::Enlarged => 2.0,
        }
    }

    pub fn from_factor(s: u32) -> Option<Self> {
        match s {
            1 => Some(RadiusScale::Standard),
            2 => Some(RadiusScale::Enlarged),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainSpec {
    n: usize,
    a: Exponent,
    radius_scale: RadiusScale,
}

/// A point of `ℂⁿ` with finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<Complex64>);

impl Point {
    pub fn new(z: Vec<Complex64>) -> Result<Self, DomainError> {
        if z.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(DomainError::NonFinitePoint);
        }
        Ok(Point(z))
    }

    pub fn origin(n: usize) -> Self {
        Point(vec![Complex64::new(0.0, 0.0); n])
    }

    /// Point with real coordinates.
    pub fn real(x: &[f64]) -> Self {
        Point(x.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.0
    }

    pub fn scaled(&self, t: f64) -> Self {
        Point(self.0.iter().map(|c| c * t).collect())
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }
}

impl AsRef<[Complex64]> for Point {
    fn as_ref(&self) -> &[Complex64] {
        &self.0
    }
}

/// The slice `I(ρ) ∩ [0, ∞)` of admissible squared moduli `|z_k|²` over a
/// given `ρ = |z_n|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialInterval {
    pub lo: f64,
    pub hi: f64,
    /// `hi − lo`, computed without cancellation.
    pub width: f64,
}

impl DomainSpec {
    pub fn new(n: usize, a: Exponent) -> Result<Self, DomainError> {
        Self::with_scale(n, a, RadiusScale::Standard)
    }

    pub fn enlarged(n: usize, a: Exponent) -> Result<Self, DomainError> {
        Self::with_scale(n, a, RadiusScale::Enlarged)
    }

    pub fn with_scale(n: usize, a: Exponent, radius_scale: RadiusScale) -> Result<Self, DomainError> {
        if n < 2 {
            return Err(DomainError::Dimension(n));
        }
        let a = match a {
            Exponent::Real(v) => Exponent::real(v)?,
            Exponent::Ratio { num, den } => Exponent::ratio(num, den)?,
        };
        Ok(Self { n, a, radius_scale })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn exponent(&self) -> Exponent {
        self.a
    }

    pub fn a(&self) -> f64 {
        self.a.value()
    }

    pub fn radius_scale(&self) -> RadiusScale {
        self.radius_scale
    }

    fn half_width(&self, rho: f64) -> f64 {
        self.radius_scale.factor() * (rho + 1.0).powf(-self.a())
    }

    fn check_dim(&self, z: &Point) -> Result<(), DomainError> {
        if z.dim() != self.n {
            return Err(DomainError::PointDimension {
                expected: self.n,
                got: z.dim(),
            });
        }
        Ok(())
    }

    /// Membership test; the boundary is excluded.
    ///
    /// # Panics
    /// If `z` does not have `n` coordinates.
    pub fn contains(&self, z: &Point) -> bool {
        if let Err(e) = self.check_dim(z) {
            panic!("{e}");
        }
        self.contains_moduli_sq(&z.0.iter().map(|c| c.norm_sqr()).collect::<Vec<_>>())
    }

    /// Membership expressed through the squared moduli `|z_k|²`.
    pub fn contains_moduli_sq(&self, r: &[f64]) -> bool {
        assert_eq!(r.len(), self.n, "expected {} squared moduli", self.n);
        let rho = r[self.n - 1];
        let bound = self.half_width(rho);
        r[..self.n - 1].iter().all(|rk| (rk - rho).abs() < bound)
    }

    pub fn radial_interval(&self, rho: f64) -> RadialInterval {
        debug_assert!(rho >= 0.0);
        let h = self.half_width(rho);
        if rho >= h {
            RadialInterval {
                lo: rho - h,
                hi: rho + h,
                width: 2.0 * h,
            }
        } else {
            RadialInterval {
                lo: 0.0,
                hi: rho + h,
                width: rho + h,
            }
        }
    }

    /// The unique `ρ* > 0` with `ρ* = s·(ρ*+1)^{−a}`; below it the radial
    /// interval is clamped at 0 and `f_q` has a kink there.
    pub fn clamp_point(&self) -> f64 {
        let g = |rho: f64| rho - self.half_width(rho);
        let (mut lo, mut hi) = (0.0, self.radius_scale.factor());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// `f_q(ρ) = ∫_{I(ρ)} r^q dr`.
    ///
    /// Evaluated as `width · Σ_j hi^j lo^{q−j} / (q+1)`, which stays accurate
    /// when the interval is far narrower than `ρ·ε` (large `ρ`).
    pub fn f_exact(&self, q: u32, rho: f64) -> f64 {
        let RadialInterval { lo, hi, width } = self.radial_interval(rho);
        let mut sum = 0.0;
        let mut hi_pow = 1.0;
        for j in 0..=q {
            sum += hi_pow * lo.powi((q - j) as i32);
            hi_pow *= hi;
        }
        width * sum / (q + 1) as f64
    }

    /// Leading large-`ρ` behaviour `2s·ρ^{q−a}` of `f_q`.
    pub fn f_asymptotic(&self, q: u32, rho: f64) -> f64 {
        2.0 * self.radius_scale.factor() * rho.powf(q as f64 - self.a())
    }

    /// Random points of the domain: `|z_n|²` uniform on `[0, radial_bound]`,
    /// `|z_k|²` uniform on the radial interval, phases uniform. Not the
    /// volume measure. Deterministic for a given seed.
    pub fn sample_points(&self, count: usize, radial_bound: f64, seed: u64) -> Vec<Point> {
        assert!(radial_bound > 0.0, "radial_bound must be positive");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        let mut moduli = vec![0.0; self.n];
        while out.len() < count {
            let rho = rng.gen::<f64>() * radial_bound;
            let iv = self.radial_interval(rho);
            moduli[self.n - 1] = rho;
            for m in moduli[..self.n - 1].iter_mut() {
                *m = iv.lo + rng.gen::<f64>() * iv.width;
            }
            let z: Vec<Complex64> = moduli
                .iter()
                .map(|r| Complex64::from_polar(r.sqrt(), rng.gen::<f64>() * TAU))
                .collect();
            let p = Point(z);
            // rounding in sqrt/polar can land a draw on the boundary
            if self.contains(&p) {
                out.push(p);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn spec(n: usize, a: f64) -> DomainSpec {
        DomainSpec::new(n, Exponent::real(a).unwrap()).unwrap()
    }

    #[test]
    fn membership_examples() {
        let d = spec(2, 1.0);
        assert!(d.contains(&Point::real(&[0.0, 0.0])));
        assert!(!d.contains(&Point::real(&[1.0, 0.0])));
        let d3 = spec(3, 2.0);
        for t in [0.0, 1.0, 10.0, 1e6] {
            assert!(d3.contains(&Point::real(&[t, t, t])));
        }
    }

    #[test]
    fn enlarged_domain_contains_standard_boundary() {
        let a = Exponent::real(1.0).unwrap();
        let d = DomainSpec::new(2, a).unwrap();
        let big = DomainSpec::enlarged(2, a).unwrap();
        let z = Point::real(&[1.0, 0.0]);
        assert!(!d.contains(&z));
        assert!(big.contains(&z));
        for p in d.sample_points(200, 10.0, 3) {
            assert!(big.contains(&p));
        }
    }

    #[test]
    fn radial_interval_examples() {
        let d = spec(2, 1.0);
        let iv = d.radial_interval(3.0);
        assert_eq!((iv.lo, iv.hi), (2.75, 3.25));
        let iv0 = d.radial_interval(0.0);
        assert_eq!((iv0.lo, iv0.hi), (0.0, 1.0));
        let d25 = spec(2, 2.5);
        let iv = d25.radial_interval(0.2);
        assert_eq!(iv.lo, 0.0);
        assert_relative_eq!(iv.hi, 0.2 + 1.2f64.powf(-2.5), max_relative = 1e-15);
    }

    #[test]
    fn f_exact_examples() {
        let d = spec(2, 1.0);
        assert_relative_eq!(d.f_exact(0, 3.0), 0.5, max_relative = 1e-15);
        assert_relative_eq!(d.f_exact(1, 3.0), 1.5, max_relative = 1e-15);
        assert_relative_eq!(d.f_exact(0, 0.0), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn f_exact_matches_naive_form_when_unclamped() {
        let d = spec(3, 1.7);
        for &rho in &[2.0, 5.0, 40.0] {
            for q in 0..5 {
                let iv = d.radial_interval(rho);
                let naive = (iv.hi.powi(q as i32 + 1) - iv.lo.powi(q as i32 + 1)) / (q + 1) as f64;
                assert_relative_eq!(d.f_exact(q, rho), naive, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn f_asymptotic_examples() {
        let d = spec(2, 1.0);
        assert_relative_eq!(d.f_asymptotic(0, 1e4), 2e-4, max_relative = 1e-15);
        let r = d.f_exact(0, 1e4) / d.f_asymptotic(0, 1e4);
        assert!((r - 1.0).abs() <= 1e-3);

        let d = spec(2, 2.5);
        assert_relative_eq!(d.f_asymptotic(3, 1e3), 2.0 * 10f64.powf(1.5), max_relative = 1e-14);
        let r = d.f_exact(3, 1e3) / d.f_asymptotic(3, 1e3);
        assert!((r - 1.0).abs() <= 2.5 * 2.0 / 1e3);

        let big = DomainSpec::enlarged(2, Exponent::real(2.5).unwrap()).unwrap();
        assert_eq!(big.f_asymptotic(1, 7.0), 4.0 * 7f64.powf(-1.5));
    }

    #[test]
    fn clamp_point_solves_fixed_point() {
        for d in [spec(2, 1.0), spec(2, 2.5), spec(4, 0.9)] {
            let r = d.clamp_point();
            assert_relative_eq!(r, (r + 1.0).powf(-d.a()), max_relative = 1e-14);
            assert!(d.radial_interval(r * 0.999).lo == 0.0);
            assert!(d.radial_interval(r * 1.001).lo > 0.0);
        }
    }

    #[test]
    fn sampling_contract() {
        let d = spec(2, 2.5);
        let pts = d.sample_points(100, 10.0, 42);
        assert_eq!(pts.len(), 100);
        assert!(pts.iter().all(|p| d.contains(p)));
        assert_eq!(pts, d.sample_points(100, 10.0, 42));
        assert_ne!(pts, d.sample_points(100, 10.0, 43));
        let big = d.sample_points(2000, 10.0, 1);
        let max_rho = big
            .iter()
            .map(|p| p.coords()[1].norm_sqr())
            .fold(0.0, f64::max);
        assert!(max_rho > 9.5 && max_rho <= 10.0 + 1e-12);
    }

    #[test]
    fn exponent_parsing() {
        assert_eq!("5/2".parse::<Exponent>().unwrap(), Exponent::Ratio { num: 5, den: 2 });
        assert_eq!("2.5".parse::<Exponent>().unwrap(), Exponent::Real(2.5));
        assert!("0/3".parse::<Exponent>().is_err());
        assert!("-1".parse::<Exponent>().is_err());
        assert!("a/b".parse::<Exponent>().is_err());
        assert!(DomainSpec::new(1, Exponent::Real(1.0)).is_err());
    }

    #[test]
    fn exact_ratio_comparisons() {
        let a = Exponent::ratio(2, 3).unwrap();
        // 3 · 2/3 = 2: not strictly greater than 2
        assert!(!a.scaled_exceeds(3, 2));
        assert!(a.scaled_exceeds(3, 1));
        assert_eq!(a.scaled_ceil(3), 2);
        assert_eq!(Exponent::ratio(7, 3).unwrap().scaled_ceil(1), 3);
    }

    proptest! {
        #[test]
        fn reinhardt_symmetry(
            r in proptest::collection::vec(0.0f64..4.0, 3),
            phases in proptest::collection::vec(0.0f64..TAU, 3),
            phases2 in proptest::collection::vec(0.0f64..TAU, 3),
        ) {
            let d = spec(3, 1.3);
            let z = Point::new(r.iter().zip(&phases).map(|(m, t)| Complex64::from_polar(*m, *t)).collect()).unwrap();
            let w = Point::new(r.iter().zip(&phases2).map(|(m, t)| Complex64::from_polar(*m, *t)).collect()).unwrap();
            let moduli: Vec<f64> = r.iter().map(|m| m * m).collect();
            prop_assert_eq!(d.contains(&z), d.contains(&w));
            prop_assert_eq!(d.contains(&z), d.contains_moduli_sq(&moduli));
        }

        #[test]
        fn permutation_symmetry(r in proptest::collection::vec(0.0f64..3.0, 4)) {
            let d = spec(4, 0.9);
            let base = Point::real(&r);
            let perm = Point::real(&[r[2], r[0], r[1], r[3]]);
            prop_assert_eq!(d.contains(&base), d.contains(&perm));
        }

        #[test]
        fn contains_is_star_shaped(seed in 0u64..1000, t in 0.0f64..1.0) {
            let d = spec(3, 1.25);
            for p in d.sample_points(4, 10.0, seed) {
                prop_assert!(d.contains(&p.scaled(t)));
            }
        }

        #[test]
        fn exponent_display_round_trips(num in 1u64..10_000, den in 1u64..10_000, x in 1e-6f64..1e6) {
            let r = Exponent::ratio(num, den).unwrap();
            prop_assert_eq!(r.to_string().parse::<Exponent>().unwrap(), r);
            let e = Exponent::real(x).unwrap();
            prop_assert_eq!(e.to_string().parse::<Exponent>().unwrap(), e);
        }
    }
}
