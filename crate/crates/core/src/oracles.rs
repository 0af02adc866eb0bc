//! Independent cross-checks: Monte Carlo moments over D(a) and its truncations,
//! finite-difference Wirtinger derivatives of log-kernels, and a tiny
//! symbolic differentiator for the Fubini–Study potential.
//!
//! Nothing here calls the analytic derivative code in [`crate::geometry`].

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{DomainSpec, Point};
use crate::geometry::{GeometryError, KernelForm, MetricJet};
use crate::linalg::CMatrix;
use crate::space::MultiIndex;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Sample blocks per estimate; fixed so results do not depend on the
/// number of worker threads.
pub const MC_BLOCKS: u64 = 16;

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "REINHARDT_THREADS";

pub fn worker_threads() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Running mean and sum of squared deviations (Welford).
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.count;
        self.m2 += delta * (x - self.mean);
    }

    /// Chan et al. pairwise combination.
    fn merge(self, other: Moments) -> Moments {
        if other.count == 0.0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        Moments {
            count,
            mean: self.mean + delta * other.count / count,
            m2: self.m2 + other.m2 + delta * delta * self.count * other.count / count,
        }
    }
}

/// How `ρ = |z_n|²` is drawn.
#[derive(Debug, Clone, Copy)]
enum Radial {
    /// Uniform on `[0, bound]`.
    Uniform(f64),
    /// Lomax density `β (1+ρ)^-(β+1)` on `[0, ∞)`.
    Lomax(f64),
}

impl Radial {
    /// Draws `ρ` and returns it with `1 / density(ρ)`.
    fn draw(self, rng: &mut ChaCha8Rng) -> (f64, f64) {
        match self {
            Radial::Uniform(bound) => (rng.gen::<f64>() * bound, bound),
            Radial::Lomax(beta) => {
                let u = 1.0 - rng.gen::<f64>();
                let rho = u.powf(-1.0 / beta) - 1.0;
                (rho, (1.0 + rho).powf(beta + 1.0) / beta)
            }
        }
    }
}

fn mc_blocks(spec: &DomainSpec, p: &MultiIndex, radial: Radial, samples: usize, seed: u64) -> MonteCarloEstimate {
    let n = spec.n();
    assert_eq!(p.len(), n, "multi-index length");
    assert!(samples >= 2, "need at least two samples");
    let exps = p.exponents();
    let scale = PI.powi(n as i32);

    let block = |b: u64| {
        let per = samples / MC_BLOCKS as usize;
        let count = per + usize::from((b as usize) < samples % MC_BLOCKS as usize);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b);
        let mut m = Moments::default();
        for _ in 0..count {
            let (rho, inv_density) = radial.draw(&mut rng);
            let iv = spec.radial_interval(rho);
            let mut w = scale * inv_density * rho.powi(exps[n - 1] as i32);
            for &q in &exps[..n - 1] {
                let r = iv.lo + rng.gen::<f64>() * iv.width;
                w *= iv.width * r.powi(q as i32);
            }
            m.push(w);
        }
        m
    };

    let threads = worker_threads().min(MC_BLOCKS as usize);
    let per_thread = (MC_BLOCKS as usize).div_ceil(threads);
    let mut results = vec![Moments::default(); MC_BLOCKS as usize];
    std::thread::scope(|s| {
        for (t, chunk) in results.chunks_mut(per_thread).enumerate() {
            let block = &block;
            s.spawn(move || {
                for (i, slot) in chunk.iter_mut().enumerate() {
                    *slot = block((t * per_thread + i) as u64);
                }
            });
        }
    });
    let total = results.into_iter().fold(Moments::default(), Moments::merge);
    let var = total.m2 / (total.count - 1.0);
    MonteCarloEstimate {
        value: total.mean,
        std_error: (var / total.count).sqrt(),
        samples,
        seed,
    }
}

/// Monte Carlo estimate of `∫_{D(a) ∩ {|z_n|² < radial_bound}} |z^p|² dV`.
///
/// Draws `ρ = |z_n|²` uniformly on `[0, radial_bound]` and each
/// `r_k = |z_k|²` uniformly on the radial interval over `ρ`; the weight
/// `πⁿ · radial_bound · Π widths` undoes the sampling density. Samples are
/// split into [`MC_BLOCKS`] blocks, block `b` drawing from ChaCha stream `b`
/// of `seed`; blocks run on [`worker_threads`] threads and are merged in
/// block order.
pub fn mc_moment(
    spec: &DomainSpec,
    p: &MultiIndex,
    radial_bound: f64,
    samples: usize,
    seed: u64,
) -> MonteCarloEstimate {
    assert!(radial_bound > 0.0, "radial bound must be positive");
    mc_blocks(spec, p, Radial::Uniform(radial_bound), samples, seed)
}

/// Monte Carlo estimate of the untruncated `‖z^p‖²`, or `None` when the
/// monomial is not square-integrable.
///
/// `ρ` is drawn from a Lomax law whose tail `ρ^-(β+1)` matches the
/// integrand's decay `ρ^-t`, `t = (n−1)a − |p|`, so the weights stay
/// bounded at infinity and the variance is finite.
pub fn mc_moment_full(spec: &DomainSpec, p: &MultiIndex, samples: usize, seed: u64) -> Option<MonteCarloEstimate> {
    let t = (spec.n() - 1) as f64 * spec.a() - p.degree() as f64;
    (t > 1.0).then(|| mc_blocks(spec, p, Radial::Lomax(t - 1.0), samples, seed))
}

/// Relative step for [`fd_log_kernel_hessian`]; see [`fd_step_at`].
pub const FD_STEP: f64 = 1e-3;

/// Step scaled to the size of `z`. Second derivatives of `log K` decay
/// like `|z|^-2`, so a fixed step loses relative accuracy to roundoff far
/// from the origin; a proportional step keeps both error terms level.
pub fn fd_step_at(z: &[Complex64]) -> f64 {
    FD_STEP * z.iter().fold(1.0_f64, |m, c| m.max(c.norm()))
}

fn bump(v: &[Complex64], k: usize, d: Complex64) -> Vec<Complex64> {
    let mut out = v.to_vec();
    out[k] += d;
    out
}

/// Mixed Wirtinger derivative matrix of a log-kernel `L(z, w)`:
/// entry `(j, i) ≈ ∂²L / ∂z_i ∂conj(w_j)`.
///
/// Each of the four real mixed partials in `(Re z_i, Im z_i) × (Re w_j,
/// Im w_j)` uses the 4-point product stencil; one Richardson step combines
/// steps `h` and `h/2`.
pub fn fd_log_kernel_hessian<L>(log_kernel: L, z: &[Complex64], w: &[Complex64], h: f64) -> CMatrix
where
    L: Fn(&[Complex64], &[Complex64]) -> Complex64,
{
    assert!(h > 0.0, "step must be positive");
    let n = z.len();
    let unit = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
    let mixed = |i: usize, j: usize, dz: Complex64, dw: Complex64, h: f64| {
        let f = |sz: f64, sw: f64| log_kernel(&bump(z, i, dz * (sz * h)), &bump(w, j, dw * (sw * h)));
        (f(1.0, 1.0) - f(1.0, -1.0) - f(-1.0, 1.0) + f(-1.0, -1.0)) / (4.0 * h * h)
    };
    let wirtinger = |i: usize, j: usize, h: f64| {
        let xu = mixed(i, j, unit[0], unit[0], h);
        let xv = mixed(i, j, unit[0], unit[1], h);
        let yu = mixed(i, j, unit[1], unit[0], h);
        let yv = mixed(i, j, unit[1], unit[1], h);
        // ∂_z = (∂_x − i∂_y)/2,  ∂_w̄ = (∂_u + i∂_v)/2
        let im = Complex64::new(0.0, 1.0);
        (xu + im * xv - im * yu + yv) * 0.25
    };
    CMatrix::from_fn(n, n, |j, i| {
        let coarse = wirtinger(i, j, h);
        let fine = wirtinger(i, j, 0.5 * h);
        (fine * 4.0 - coarse) / 3.0
    })
}

/// `log K(z, w)` for a kernel of the standard form.
pub fn log_kernel_of(k: &KernelForm) -> impl Fn(&[Complex64], &[Complex64]) -> Complex64 + '_ {
    move |z, w| {
        let zp = Point::new(z.to_vec()).expect("finite");
        let wp = Point::new(w.to_vec()).expect("finite");
        k.kernel_eval(&zp, &wp).ln()
    }
}

/// Metric jet of a sesqui-holomorphic log-kernel `L(z, w)` on the diagonal,
/// by finite differences.
///
/// Holomorphy in `z` and anti-holomorphy in `w` mean each Wirtinger
/// derivative equals a plain difference quotient along the real axis of
/// that coordinate, so every entry is a product stencil of real
/// increments (2 to 4 of them) with one Richardson step.
///
/// `h` is the step for the metric itself. An m-th order stencil divides
/// roundoff by `h^m`, so third and fourth derivatives use `h·10^{(m−2)/2}`.
pub fn fd_metric_jet<L>(log_kernel: L, z: &[Complex64], h: f64) -> MetricJet
where
    L: Fn(&[Complex64], &[Complex64]) -> Complex64,
{
    let n = z.len();
    let diff = |zi: &[usize], wi: &[usize], h: f64| -> Complex64 {
        let m = zi.len() + wi.len();
        let mut total = Complex64::new(0.0, 0.0);
        for mask in 0..(1u32 << m) {
            let mut zz = z.to_vec();
            let mut ww = z.to_vec();
            let mut sign = 1.0;
            for (bit, &k) in zi.iter().chain(wi).enumerate() {
                let s = if mask & (1 << bit) != 0 { 1.0 } else { -1.0 };
                sign *= s;
                if bit < zi.len() {
                    zz[k] += s * h;
                } else {
                    ww[k] += s * h;
                }
            }
            total += log_kernel(&zz, &ww) * sign;
        }
        total / (2.0 * h).powi(m as i32)
    };
    let rich = |zi: &[usize], wi: &[usize]| {
        let h = h * 10f64.powf((zi.len() + wi.len()) as f64 / 2.0 - 1.0);
        let coarse = diff(zi, wi, h);
        let fine = diff(zi, wi, 0.5 * h);
        (fine * 4.0 - coarse) / 3.0
    };
    let layout = |f: &dyn Fn(usize, usize) -> Complex64| CMatrix::from_fn(n, n, |j, i| f(i, j));
    MetricJet {
        metric: layout(&|i, j| rich(&[i], &[j])),
        d_hol: (0..n).map(|k| layout(&|i, j| rich(&[i, k], &[j]))).collect(),
        d_antihol: (0..n).map(|l| layout(&|i, j| rich(&[i], &[j, l]))).collect(),
        d_mixed: (0..n * n)
            .map(|kl| layout(&|i, j| rich(&[i, kl / n], &[j, kl % n])))
            .collect(),
    }
}

/// A term `coeff · Π z^α · Π z̄^β · S^{−m}` with `S = 1 + Σ|z_k|²`.
#[derive(Debug, Clone, PartialEq)]
struct Term {
    coeff: i64,
    alpha: Vec<u32>,
    beta: Vec<u32>,
    s_pow: u32,
}

/// Sum of [`Term`]s; closed under `∂_k` and `∂_l̄` since `∂_k S = z̄_k`.
#[derive(Debug, Clone, PartialEq, Default)]
struct Expr(Vec<Term>);

impl Expr {
    fn d_hol(&self, k: usize) -> Expr {
        let mut out = Vec::new();
        for t in &self.0 {
            if t.alpha[k] > 0 {
                let mut a = t.alpha.clone();
                a[k] -= 1;
                out.push(Term {
                    coeff: t.coeff * t.alpha[k] as i64,
                    alpha: a,
                    beta: t.beta.clone(),
                    s_pow: t.s_pow,
                });
            }
            if t.s_pow > 0 {
                let mut b = t.beta.clone();
                b[k] += 1;
                out.push(Term {
                    coeff: -t.coeff * t.s_pow as i64,
                    alpha: t.alpha.clone(),
                    beta: b,
                    s_pow: t.s_pow + 1,
                });
            }
        }
        Expr(out)
    }

    /// By symmetry of the term shapes, `∂_l̄` swaps the roles of α and β.
    fn d_antihol(&self, l: usize) -> Expr {
        let swapped = Expr(
            self.0
                .iter()
                .map(|t| Term {
                    alpha: t.beta.clone(),
                    beta: t.alpha.clone(),
                    ..t.clone()
                })
                .collect(),
        );
        let d = swapped.d_hol(l);
        Expr(
            d.0.into_iter()
                .map(|t| Term {
                    alpha: t.beta.clone(),
                    beta: t.alpha.clone(),
                    ..t
                })
                .collect(),
        )
    }

    fn eval(&self, z: &[Complex64]) -> Complex64 {
        let s = 1.0 + z.iter().map(|v| v.norm_sqr()).sum::<f64>();
        self.0.iter().fold(Complex64::new(0.0, 0.0), |acc, t| {
            let mut v = Complex64::new(t.coeff as f64 / s.powi(t.s_pow as i32), 0.0);
            for (k, zk) in z.iter().enumerate() {
                v *= zk.powu(t.alpha[k]) * zk.conj().powu(t.beta[k]);
            }
            acc + v
        })
    }
}

/// `g_{ij̄}` of `log(1 + |z|²)`: `δ_ij S^{−1} − z̄_i z_j S^{−2}`.
fn fs_metric_entry(n: usize, i: usize, j: usize) -> Expr {
    let mut terms = Vec::new();
    if i == j {
        terms.push(Term {
            coeff: 1,
            alpha: vec![0; n],
            beta: vec![0; n],
            s_pow: 1,
        });
    }
    let mut alpha = vec![0; n];
    let mut beta = vec![0; n];
    alpha[j] += 1;
    beta[i] += 1;
    terms.push(Term {
        coeff: -1,
        alpha,
        beta,
        s_pow: 2,
    });
    Expr(terms)
}

/// Holomorphic sectional curvature of the Fubini–Study potential at `z`
/// along `x`, from symbolically differentiated closed forms and the
/// explicit inverse `g^{q̄p} = S (δ_qp + z̄_q z_p)`.
pub fn fs_reference_curvature(z: &[Complex64], x: &[Complex64]) -> Result<f64, GeometryError> {
    let n = z.len();
    if x.len() != n {
        return Err(GeometryError::Dimension {
            expected: n,
            got: x.len(),
        });
    }
    let s = 1.0 + z.iter().map(|v| v.norm_sqr()).sum::<f64>();
    let g: Vec<Vec<Expr>> = (0..n)
        .map(|i| (0..n).map(|j| fs_metric_entry(n, i, j)).collect())
        .collect();
    let inv = |q: usize, p: usize| {
        let d = if q == p { 1.0 } else { 0.0 };
        (Complex64::new(d, 0.0) + z[q].conj() * z[p]) * s
    };

    let mut denom = Complex64::new(0.0, 0.0);
    let mut num = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let xij = x[i] * x[j].conj();
            denom += g[i][j].eval(z) * xij;
            for k in 0..n {
                for l in 0..n {
                    let w = xij * x[k] * x[l].conj();
                    if w == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let mut r = -g[i][j].d_hol(k).d_antihol(l).eval(z);
                    for p in 0..n {
                        for q in 0..n {
                            r += inv(q, p) * g[i][q].d_hol(k).eval(z) * g[p][j].d_antihol(l).eval(z);
                        }
                    }
                    num += r * w;
                }
            }
        }
    }
    let d = denom.re * denom.re;
    if !(d.is_normal() && d > 0.0) {
        return Err(GeometryError::DegenerateDirection);
    }
    Ok(num.re / d)
}
