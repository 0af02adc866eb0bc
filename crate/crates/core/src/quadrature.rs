//! Adaptive quadrature on the half line `[0, ∞)`.
//!
//! The half line is split at `tail_cut`. The core `[0, tail_cut]` is
//! integrated directly; the tail is pulled back through
//! `ρ = tail_cut + t/(1-t)`, written in the reflected variable `u = 1 - t`
//! (so `ρ = tail_cut + (1-u)/u`, `dρ = du/u²`). Working in `u` keeps the
//! neighbourhood of `ρ = ∞` at `u = 0`, where doubles are dense, so power-law
//! tails can be resolved far beyond what `1 - t` could represent.
//!
//! Every panel is integrated with the 10-point Gauss / 21-point Kronrod pair;
//! the difference of the two, rescaled as in QUADPACK, is the local error
//! estimate. Refinement is global: the panel with the largest error estimate
//! is bisected until the summed estimate meets the tolerance or the panel
//! budget runs out.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

/// Kronrod abscissae on `[-1, 1]` (non-negative half, descending).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

/// Gauss weights for the odd-indexed Kronrod nodes.
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Slope threshold separating growing from decaying partial-integral increments.
pub const DIVERGENCE_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
    /// Junction between the directly integrated core and the mapped tail.
    pub tail_cut: f64,
    /// Number of doublings of the cutoff radius used by [`probe_divergence`].
    pub growth_window: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_panels: 4000,
            tail_cut: 64.0,
            growth_window: 6,
        }
    }
}

impl QuadratureConfig {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        let ok = self.rel_tol > 0.0
            && self.rel_tol.is_finite()
            && self.abs_tol >= 0.0
            && self.max_panels >= 1
            && self.tail_cut > 0.0
            && self.tail_cut.is_finite()
            && self.growth_window >= 3;
        if ok {
            Ok(())
        } else {
            Err(QuadratureError::InvalidConfig(*self))
        }
    }

    fn tolerance_for(&self, value: f64) -> f64 {
        (self.rel_tol * value.abs()).max(self.abs_tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    Converged,
    /// Partial integrals grow; `exponent` is the fitted power of the increments.
    Diverges { exponent: f64 },
    Inconclusive,
}

impl Verdict {
    pub fn is_converged(&self) -> bool {
        matches!(self, Verdict::Converged)
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, Verdict::Diverges { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOutcome {
    pub value: f64,
    pub error_estimate: f64,
    pub panels_used: usize,
    pub verdict: Verdict,
}

impl QuadratureOutcome {
    /// Turns an exhausted budget into [`QuadratureError::PanelBudgetExhausted`].
    pub fn require_converged(self) -> Result<Self, QuadratureError> {
        match self.verdict {
            Verdict::Converged => Ok(self),
            _ => Err(QuadratureError::PanelBudgetExhausted {
                value: self.value,
                error_estimate: self.error_estimate,
                panels: self.panels_used,
            }),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum QuadratureError {
    #[error("panel budget exhausted after {panels} panels (value {value}, error estimate {error_estimate})")]
    PanelBudgetExhausted {
        value: f64,
        error_estimate: f64,
        panels: usize,
    },
    #[error("integrand is not finite at x = {at}")]
    NonFiniteIntegrand { at: f64 },
    #[error("invalid quadrature configuration: {0:?}")]
    InvalidConfig(QuadratureConfig),
}

/// How panel coordinates map to the integration variable.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Chart {
    Direct,
    /// `x = cut + (1 - u)/u`, `dx = du / u²`.
    Tail { cut: f64 },
}

impl Chart {
    fn eval<F: Fn(f64) -> f64>(&self, f: &F, s: f64) -> Result<f64, QuadratureError> {
        let (x, jac) = match *self {
            Chart::Direct => (s, 1.0),
            Chart::Tail { cut } => (cut + (1.0 - s) / s, 1.0 / (s * s)),
        };
        let fx = f(x);
        if !fx.is_finite() {
            return Err(QuadratureError::NonFiniteIntegrand { at: x });
        }
        if fx == 0.0 {
            // avoids 0 * inf when the jacobian overflows deep in the tail
            return Ok(0.0);
        }
        let v = fx * jac;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QuadratureError::NonFiniteIntegrand { at: x })
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    chart: Chart,
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl Panel {
    fn splittable(&self) -> bool {
        let mid = 0.5 * (self.lo + self.hi);
        mid > self.lo && mid < self.hi && (self.hi - self.lo) > 1e-280
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    // Largest error first; ties broken by position so the schedule is deterministic.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// One Gauss-Kronrod (10, 21) evaluation on `[lo, hi]` in chart coordinates.
fn gauss_kronrod<F: Fn(f64) -> f64>(
    f: &F,
    chart: Chart,
    lo: f64,
    hi: f64,
) -> Result<Panel, QuadratureError> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let f_center = chart.eval(f, center)?;

    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    let mut res_gauss = 0.0;
    let mut res_kronrod = WGK[10] * f_center;
    let mut res_abs = res_kronrod.abs();

    for j in 0..10 {
        let abscissa = half * XGK[j];
        let f1 = chart.eval(f, center - abscissa)?;
        let f2 = chart.eval(f, center + abscissa)?;
        fv1[j] = f1;
        fv2[j] = f2;
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * (f1 + f2);
        }
        res_kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let err = (res_kronrod - res_gauss) * half;
    Ok(Panel {
        chart,
        lo,
        hi,
        value: res_kronrod * half,
        error: rescale_error(err, res_abs * half.abs(), res_asc * half.abs()),
    })
}

/// Neumaier-compensated sum over panels in a fixed (positional) order.
fn compensated_total(panels: &mut [Panel]) -> (f64, f64) {
    panels.sort_by(|p, q| {
        let key = |c: &Chart| match c {
            Chart::Direct => 0,
            Chart::Tail { .. } => 1,
        };
        key(&p.chart)
            .cmp(&key(&q.chart))
            .then_with(|| p.lo.total_cmp(&q.lo))
    });
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    let mut err = 0.0_f64;
    for p in panels.iter() {
        let t = sum + p.value;
        if sum.abs() >= p.value.abs() {
            comp += (sum - t) + p.value;
        } else {
            comp += (p.value - t) + sum;
        }
        sum = t;
        err += p.error;
    }
    (sum + comp, err)
}

fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    segments: &[(Chart, f64, f64)],
    cfg: &QuadratureConfig,
) -> Result<QuadratureOutcome, QuadratureError> {
    cfg.validate()?;
    let mut heap = BinaryHeap::with_capacity(cfg.max_panels + segments.len());
    let mut stuck: Vec<Panel> = Vec::new();
    let mut value = 0.0;
    let mut error = 0.0;
    for &(chart, lo, hi) in segments {
        if hi > lo {
            let p = gauss_kronrod(f, chart, lo, hi)?;
            value += p.value;
            error += p.error;
            heap.push(p);
        }
    }

    let mut panels_used = heap.len();
    let mut converged = false;
    loop {
        if error <= cfg.tolerance_for(value) {
            // recompute from scratch; running sums drift
            let mut all: Vec<Panel> = heap.iter().chain(stuck.iter()).copied().collect();
            let (v, e) = compensated_total(&mut all);
            value = v;
            error = e;
            if error <= cfg.tolerance_for(value) {
                converged = true;
                break;
            }
        }
        if panels_used >= cfg.max_panels {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        if !worst.splittable() {
            stuck.push(worst);
            continue;
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        let left = gauss_kronrod(f, worst.chart, worst.lo, mid)?;
        let right = gauss_kronrod(f, worst.chart, mid, worst.hi)?;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        panels_used += 1;
    }

    let mut all: Vec<Panel> = heap.into_iter().chain(stuck).collect();
    let (value, error_estimate) = compensated_total(&mut all);
    Ok(QuadratureOutcome {
        value,
        error_estimate,
        panels_used,
        verdict: if converged {
            Verdict::Converged
        } else {
            Verdict::Inconclusive
        },
    })
}

fn core_segments(lo: f64, hi: f64, breakpoints: &[f64]) -> Vec<(Chart, f64, f64)> {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|b| b.is_finite() && *b > lo && *b < hi)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(lo);
    edges.extend(cuts);
    edges.push(hi);
    edges
        .windows(2)
        .map(|w| (Chart::Direct, w[0], w[1]))
        .collect()
}

/// Integrates `f` over `[0, ∞)`.
///
/// A [`Verdict::Inconclusive`] outcome means the panel budget ran out; use
/// [`QuadratureOutcome::require_converged`] to turn that into an error.
pub fn integrate_half_line<F: Fn(f64) -> f64>(
    f: F,
    cfg: &QuadratureConfig,
) -> Result<QuadratureOutcome, QuadratureError> {
    integrate_half_line_with_breakpoints(f, &[], cfg)
}

/// Like [`integrate_half_line`], with known kinks of `f` inside the core
/// used as initial panel edges.
pub fn integrate_half_line_with_breakpoints<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<QuadratureOutcome, QuadratureError> {
    cfg.validate()?;
    let mut segments = core_segments(0.0, cfg.tail_cut, breakpoints);
    segments.push((Chart::Tail { cut: cfg.tail_cut }, 0.0, 1.0));
    adaptive(&f, &segments, cfg)
}

/// Integrates `f` over the finite interval `[lo, hi]`.
pub fn integrate_interval<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<QuadratureOutcome, QuadratureError> {
    cfg.validate()?;
    if hi < lo {
        let out = integrate_interval(f, hi, lo, breakpoints, cfg)?;
        return Ok(QuadratureOutcome {
            value: -out.value,
            ..out
        });
    }
    adaptive(&f, &core_segments(lo, hi, breakpoints), cfg)
}

/// Partial integrals gathered by [`probe_divergence`].
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceProbe {
    pub verdict: Verdict,
    /// Cutoffs `R_j = tail_cut · 2^j`, `j = 0..=growth_window`.
    pub radii: Vec<f64>,
    /// `∫_0^{R_j} f`.
    pub partial_integrals: Vec<f64>,
    /// Least-squares slope of `log ΔI_j` against `log R_j`, if it could be fitted.
    pub increment_slope: Option<f64>,
    pub panels_used: usize,
}

/// Decides whether `∫_0^∞ f` is finite by watching partial integrals grow.
///
/// For `f ~ ρ^s` the increments `ΔI_j = I(R_j) - I(R_{j-1})` over doubling
/// radii scale like `R_j^{s+1}`, so the log-log slope of the increments
/// estimates `s + 1`. A slope above `-DIVERGENCE_THRESHOLD` is reported as
/// divergence with that exponent (logarithmic growth shows up as a slope
/// near 0); a slope below it means the increments shrink geometrically and
/// the integral converges.
pub fn probe_divergence<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<DivergenceProbe, QuadratureError> {
    cfg.validate()?;
    let radii: Vec<f64> = (0..=cfg.growth_window)
        .map(|j| cfg.tail_cut * 2f64.powi(j as i32))
        .collect();

    let mut panels_used = 0;
    let mut resolved = true;
    let first = integrate_interval(&f, 0.0, radii[0], breakpoints, cfg)?;
    panels_used += first.panels_used;
    resolved &= first.verdict.is_converged();

    let mut increments = Vec::with_capacity(cfg.growth_window);
    let mut partial_integrals = vec![first.value];
    for w in radii.windows(2) {
        let piece = integrate_interval(&f, w[0], w[1], breakpoints, cfg)?;
        panels_used += piece.panels_used;
        resolved &= piece.verdict.is_converged();
        increments.push(piece.value);
        let last = *partial_integrals.last().unwrap_or(&0.0);
        partial_integrals.push(last + piece.value);
    }

    let scale = partial_integrals
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    let negligible = |d: f64| d.abs() <= cfg.tolerance_for(scale);

    let increment_slope = if increments.iter().all(|d| *d > 0.0) {
        let xs: Vec<f64> = radii[1..].iter().map(|r| r.ln()).collect();
        let ys: Vec<f64> = increments.iter().map(|d| d.ln()).collect();
        Some(least_squares_slope(&xs, &ys))
    } else {
        None
    };

    let verdict = if !resolved {
        Verdict::Inconclusive
    } else if increments.iter().rev().take(2).all(|d| negligible(*d)) {
        // the integrand has effectively vanished: partial integrals are Cauchy
        Verdict::Converged
    } else {
        match increment_slope {
            Some(s) if s > -DIVERGENCE_THRESHOLD => Verdict::Diverges { exponent: s },
            Some(_) => Verdict::Converged,
            None => Verdict::Inconclusive,
        }
    };

    Ok(DivergenceProbe {
        verdict,
        radii,
        partial_integrals,
        increment_slope,
        panels_used,
    })
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (num, den) = xs
        .iter()
        .zip(ys)
        .fold((0.0, 0.0), |(num, den), (x, y)| {
            (num + (x - mx) * (y - my), den + (x - mx) * (x - mx))
        });
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_on_half_line() {
        let cfg = QuadratureConfig::default();
        let out = integrate_half_line(|x: f64| (-x).exp(), &cfg).unwrap();
        assert!(out.verdict.is_converged());
        assert_relative_eq!(out.value, 1.0, max_relative = cfg.rel_tol);
        assert!(out.error_estimate <= cfg.rel_tol * out.value.abs());
    }

    #[test]
    fn algebraic_tail() {
        let cfg = QuadratureConfig::default();
        let out = integrate_half_line(|x: f64| (1.0 + x).powf(-2.5), &cfg).unwrap();
        assert!(out.verdict.is_converged());
        assert_relative_eq!(out.value, 2.0 / 3.0, max_relative = cfg.rel_tol);
    }

    #[test]
    fn slow_power_tail_resolves_in_reflected_chart() {
        // ∫_0^∞ (1+x)^{-1.2} dx = 5
        let cfg = QuadratureConfig::default();
        let out = integrate_half_line(|x: f64| (1.0 + x).powf(-1.2), &cfg).unwrap();
        assert!(out.verdict.is_converged(), "{out:?}");
        assert_relative_eq!(out.value, 5.0, max_relative = 1e-9);
    }

    #[test]
    fn interval_integrates_polynomials_exactly() {
        let cfg = QuadratureConfig::default();
        let out = integrate_interval(|x: f64| x.powi(7), 0.5, 2.0, &[], &cfg).unwrap();
        assert_relative_eq!(out.value, (2f64.powi(8) - 0.5f64.powi(8)) / 8.0, max_relative = 1e-14);
        assert_eq!(out.panels_used, 1);
        let rev = integrate_interval(|x: f64| x.powi(7), 2.0, 0.5, &[], &cfg).unwrap();
        assert_relative_eq!(rev.value, -out.value);
    }

    #[test]
    fn breakpoints_split_kinks() {
        let cfg = QuadratureConfig::default();
        let f = |x: f64| (x - 1.0).abs();
        let with = integrate_interval(f, 0.0, 3.0, &[1.0], &cfg).unwrap();
        let without = integrate_interval(f, 0.0, 3.0, &[], &cfg).unwrap();
        assert_relative_eq!(with.value, 2.5, max_relative = 1e-14);
        assert_relative_eq!(without.value, 2.5, max_relative = 1e-10);
        assert!(with.panels_used < without.panels_used);
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        let cfg = QuadratureConfig::default();
        let err = integrate_half_line(|x: f64| if x > 10.0 { f64::NAN } else { 1.0 }, &cfg)
            .unwrap_err();
        assert!(matches!(err, QuadratureError::NonFiniteIntegrand { .. }));
    }

    #[test]
    fn budget_exhaustion_is_inconclusive() {
        let cfg = QuadratureConfig {
            max_panels: 3,
            ..QuadratureConfig::default()
        };
        let out = integrate_half_line(|x: f64| (1.0 + x).powf(-1.05), &cfg).unwrap();
        assert_eq!(out.verdict, Verdict::Inconclusive);
        assert!(matches!(
            out.require_converged(),
            Err(QuadratureError::PanelBudgetExhausted { .. })
        ));
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = QuadratureConfig {
            growth_window: 2,
            ..QuadratureConfig::default()
        };
        assert!(matches!(
            integrate_half_line(|x: f64| x, &cfg),
            Err(QuadratureError::InvalidConfig(_))
        ));
        assert!(QuadratureConfig::default().with_rel_tol(0.0).validate().is_err());
    }

    #[test]
    fn probe_classifies_power_laws() {
        let cfg = QuadratureConfig::default();
        let conv = probe_divergence(|x: f64| (1.0 + x).powi(-2), &[], &cfg).unwrap();
        assert_eq!(conv.verdict, Verdict::Converged);

        let flat = probe_divergence(|_x: f64| 1.0, &[], &cfg).unwrap();
        match flat.verdict {
            Verdict::Diverges { exponent } => assert!((exponent - 1.0).abs() < 1e-9),
            v => panic!("expected divergence, got {v:?}"),
        }

        let log = probe_divergence(|x: f64| 1.0 / (1.0 + x), &[], &cfg).unwrap();
        assert!(log.verdict.is_divergent());

        let slow = probe_divergence(|x: f64| (1.0 + x).powf(-1.1), &[], &cfg).unwrap();
        assert_eq!(slow.verdict, Verdict::Converged);
    }

    #[test]
    fn probe_on_compact_support_is_converged() {
        let cfg = QuadratureConfig::default();
        let out = probe_divergence(|x: f64| if x < 1.0 { 1.0 - x } else { 0.0 }, &[1.0], &cfg)
            .unwrap();
        assert_eq!(out.verdict, Verdict::Converged);
        assert_eq!(out.increment_slope, None);
    }

    #[test]
    fn probe_records_partials() {
        let cfg = QuadratureConfig::default();
        let out = probe_divergence(|_x: f64| 2.0, &[], &cfg).unwrap();
        assert_eq!(out.radii.len(), cfg.growth_window + 1);
        for (r, i) in out.radii.iter().zip(&out.partial_integrals) {
            assert_relative_eq!(*i, 2.0 * r, max_relative = 1e-13);
        }
    }
}
