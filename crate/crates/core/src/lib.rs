//! Bergman spaces of the unbounded Reinhardt domains
//!
//! ```text
//! D(a) = { z ∈ ℂⁿ : ||z_k|² − |z_n|²| < (|z_n|² + 1)^{−a},  k < n }
//! ```
//!
//! Monomial norms reduce to one-dimensional improper integrals
//! ([`space`], [`quadrature`]); for `2/(n−1) < a ≤ 3/(n−1)` the kernel is
//! `c_0 + Σ c_k z_k conj(w_k)` and [`geometry`] computes its metric,
//! curvature and the invariant `B = det T / K` in closed form.
//! [`oracles`] holds the independent Monte Carlo, finite-difference and
//! symbolic cross-checks, and [`cli`] exposes everything on the command
//! line.

pub mod cli;
pub mod domain;
pub mod geometry;
pub mod linalg;
pub mod oracles;
pub mod quadrature;
pub mod space;
pub mod verify;

pub use domain::{DomainSpec, Exponent, Point, RadialInterval, RadiusScale};
pub use geometry::{HermitianForm, KernelForm, LinearMap, MetricJet};
pub use quadrature::{QuadratureConfig, QuadratureOutcome, Verdict};
pub use space::{KernelCoefficients, MonomialNorm, MultiIndex, NormSq};
