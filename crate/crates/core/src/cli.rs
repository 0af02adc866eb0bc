//! `reinhardt` command line.
//!
//! Exit codes: 0 success, 1 a mathematical check failed, 2 usage error.
//! Output goes to stdout (or `--out PATH`) as JSON or CSV; real numbers in
//! JSON are decimal strings, complex numbers `[re, im]` pairs of them.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::domain::{DomainSpec, Exponent, Point, RadiusScale};
use crate::geometry::KernelForm;
use crate::quadrature::{QuadratureConfig, Verdict};
use crate::space::{self, MultiIndex, NormSq, SpaceError};
use crate::verify::{self, CheckStatus, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        })
    }
}

fn parse_exponent(s: &str) -> Result<Exponent, String> {
    Exponent::from_str(s).map_err(|e| e.to_string())
}

fn parse_scale(s: &str) -> Result<u32, String> {
    match s.parse::<u32>() {
        Ok(v @ (1 | 2)) => Ok(v),
        _ => Err(format!("radius scale must be 1 or 2, got {s:?}")),
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, PartialEq, Args)]
pub struct RunConfig {
    /// Dimension n ≥ 2.
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    pub n: u32,
    /// Exponent a, decimal or exact ratio "p/q".
    #[arg(long, value_parser = parse_exponent, allow_hyphen_values = true)]
    pub a: Exponent,
    /// 1 for D(a), 2 for the enlarged domain.
    #[arg(long, default_value_t = 1, value_parser = parse_scale)]
    pub radius_scale: u32,
    #[arg(long, default_value_t = 1e-10, value_parser = parse_positive)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

impl RunConfig {
    pub fn spec(&self) -> Result<DomainSpec, String> {
        let scale = RadiusScale::from_factor(self.radius_scale)
            .ok_or_else(|| format!("radius scale {}", self.radius_scale))?;
        DomainSpec::with_scale(self.n as usize, self.a, scale).map_err(|e| e.to_string())
    }

    pub fn quadrature(&self) -> QuadratureConfig {
        QuadratureConfig::default().with_rel_tol(self.rel_tol)
    }

    /// Flags that parse back to this configuration.
    pub fn to_args(&self) -> Vec<String> {
        let mut v = vec![
            "--n".into(),
            self.n.to_string(),
            "--a".into(),
            self.a.to_string(),
            "--radius-scale".into(),
            self.radius_scale.to_string(),
            "--rel-tol".into(),
            self.rel_tol.to_string(),
            "--seed".into(),
            self.seed.to_string(),
            "--format".into(),
            self.format.to_string(),
        ];
        if let Some(p) = &self.out {
            v.push("--out".into());
            v.push(p.display().to_string());
        }
        v
    }

    fn header(&self) -> serde_json::Map<String, Value> {
        let mut m = serde_json::Map::new();
        m.insert("n".into(), json!(self.n));
        m.insert("a".into(), json!(self.a.to_string()));
        m.insert("radius_scale".into(), json!(self.radius_scale));
        m
    }
}

#[derive(Debug, Parser)]
#[command(name = "reinhardt", version, about = "Bergman spaces, kernels and curvature of unbounded Reinhardt domains D(a)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimension and monomial basis of the Bergman space.
    Dim {
        #[command(flatten)]
        cfg: RunConfig,
    },
    /// Squared norm of a monomial z^p, or its divergence.
    Norm {
        #[command(flatten)]
        cfg: RunConfig,
        /// Multi-index, comma separated, e.g. 1,0.
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<u32>,
    },
    /// Kernel coefficients c_0, ..., c_n.
    Coeffs {
        #[command(flatten)]
        cfg: RunConfig,
    },
    /// Holomorphic sectional curvature of the Bergman metric.
    Curvature {
        #[command(flatten)]
        cfg: RunConfig,
        /// Point as comma-separated complex numbers (e.g. 0.1+0.2i,0.3); random if absent.
        #[arg(long, value_delimiter = ',', value_parser = parse_complex, allow_hyphen_values = true)]
        point: Option<Vec<Complex64>>,
        /// Direction, same syntax; random if absent.
        #[arg(long, value_delimiter = ',', value_parser = parse_complex, allow_hyphen_values = true)]
        direction: Option<Vec<Complex64>>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
    /// B(z) = det T(z,z) / K(z) against its closed form.
    Bfunction {
        #[command(flatten)]
        cfg: RunConfig,
        #[arg(long, value_delimiter = ',', value_parser = parse_complex, allow_hyphen_values = true, required = true)]
        point: Vec<Complex64>,
    },
    /// f_q(ρ) against its leading asymptotic 2s·ρ^(q-a).
    Profile {
        #[command(flatten)]
        cfg: RunConfig,
        #[arg(long, default_value_t = 0)]
        q: u32,
        /// ρ values; defaults to 10^0 ... 10^6.
        #[arg(long, value_delimiter = ',')]
        rho: Option<Vec<f64>>,
    },
    /// Run the full invariant suite and print a pass/fail table.
    Verify {
        #[command(flatten)]
        cfg: RunConfig,
        #[arg(long, default_value_t = 1_000_000)]
        mc_samples: usize,
    },
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    Complex64::from_str(s.trim()).map_err(|_| format!("cannot parse complex number {s:?}"))
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::String(x.to_string())
    } else {
        Value::Null
    }
}

fn cnum(z: Complex64) -> Value {
    json!([num(z.re), num(z.im)])
}

enum Failure {
    Usage(String),
    Check(String),
}

/// A rendered result: a JSON document and the equivalent CSV table.
struct Rendered {
    json: Value,
    csv_header: Vec<String>,
    csv_rows: Vec<Vec<String>>,
    passed: bool,
}

impl Rendered {
    fn key_values(json: Value, pairs: Vec<(&str, String)>) -> Self {
        Rendered {
            json,
            csv_header: vec!["key".into(), "value".into()],
            csv_rows: pairs.into_iter().map(|(k, v)| vec![k.to_string(), v]).collect(),
            passed: true,
        }
    }

    fn write(&self, format: OutputFormat) -> Result<Vec<u8>, String> {
        match format {
            OutputFormat::Json => {
                let mut s = serde_json::to_vec_pretty(&self.json).map_err(|e| e.to_string())?;
                s.push(b'\n');
                Ok(s)
            }
            OutputFormat::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.csv_header).map_err(|e| e.to_string())?;
                for r in &self.csv_rows {
                    w.write_record(r).map_err(|e| e.to_string())?;
                }
                w.into_inner().map_err(|e| e.to_string())
            }
        }
    }
}

fn with_header(cfg: &RunConfig, body: Value) -> Value {
    let mut m = cfg.header();
    if let Value::Object(b) = body {
        m.extend(b);
    }
    Value::Object(m)
}

fn space_failure(e: SpaceError) -> Failure {
    match e {
        SpaceError::OutsideLinearWindow { .. } | SpaceError::IndexDimension { .. } => {
            Failure::Usage(e.to_string())
        }
        _ => Failure::Check(e.to_string()),
    }
}

fn point_of(spec: &DomainSpec, z: Vec<Complex64>) -> Result<Point, Failure> {
    let p = Point::new(z).map_err(|e| Failure::Usage(e.to_string()))?;
    if p.dim() != spec.n() {
        return Err(Failure::Usage(format!("point has {} coordinates, expected {}", p.dim(), spec.n())));
    }
    Ok(p)
}

fn kernel_for(cfg: &RunConfig, spec: &DomainSpec) -> Result<KernelForm, Failure> {
    let k = space::kernel_coefficients(spec, &cfg.quadrature()).map_err(space_failure)?;
    KernelForm::from_coefficients(&k).map_err(|e| Failure::Check(e.to_string()))
}

fn cmd_dim(cfg: &RunConfig, spec: &DomainSpec) -> Result<Rendered, Failure> {
    let basis = space::enumerate_basis(spec);
    let dimension = space::bergman_dimension(spec);
    let passed = dimension == basis.len() as u64;
    let json = with_header(
        cfg,
        json!({
            "dimension": dimension,
            "basis": basis.iter().map(|p| p.exponents().to_vec()).collect::<Vec<_>>(),
        }),
    );
    Ok(Rendered {
        json,
        csv_header: (1..=spec.n()).map(|k| format!("p{k}")).collect(),
        csv_rows: basis
            .iter()
            .map(|p| p.exponents().iter().map(|v| v.to_string()).collect())
            .collect(),
        passed,
    })
}

fn cmd_norm(cfg: &RunConfig, spec: &DomainSpec, p: &[u32]) -> Result<Rendered, Failure> {
    let p = MultiIndex::new(p.to_vec());
    let norm = space::monomial_norm_sq(spec, &p, &cfg.quadrature()).map_err(space_failure)?;
    let (verdict, exponent) = match norm.outcome.verdict {
        Verdict::Converged => ("converged", None),
        Verdict::Diverges { exponent } => ("diverges", Some(exponent)),
        Verdict::Inconclusive => ("inconclusive", None),
    };
    let finite = norm.norm_sq.finite();
    let json = with_header(
        cfg,
        json!({
            "p": p.exponents(),
            "finite": matches!(norm.norm_sq, NormSq::Finite(_)),
            "norm_sq": finite.map_or(Value::Null, num),
            "error_estimate": finite.map_or(Value::Null, |_| num(norm.outcome.error_estimate)),
            "verdict": verdict,
            "growth_exponent": exponent.map_or(Value::Null, num),
            "predicted_square_integrable": space::is_square_integrable(spec, &p),
            "panels_used": norm.outcome.panels_used,
        }),
    );
    let show = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
    Ok(Rendered::key_values(
        json,
        vec![
            ("p", p.to_string()),
            ("norm_sq", show(finite)),
            ("error_estimate", show(finite.map(|_| norm.outcome.error_estimate))),
            ("verdict", verdict.to_string()),
            ("growth_exponent", show(exponent)),
        ],
    ))
}

fn cmd_coeffs(cfg: &RunConfig, spec: &DomainSpec) -> Result<Rendered, Failure> {
    let k = space::kernel_coefficients(spec, &cfg.quadrature()).map_err(space_failure)?;
    let json = with_header(
        cfg,
        json!({
            "c": k.c.iter().map(|&v| num(v)).collect::<Vec<_>>(),
            "errors": k.errors.iter().map(|&v| num(v)).collect::<Vec<_>>(),
        }),
    );
    Ok(Rendered {
        json,
        csv_header: vec!["index".into(), "c".into(), "error".into()],
        csv_rows: k
            .c
            .iter()
            .zip(&k.errors)
            .enumerate()
            .map(|(i, (c, e))| vec![i.to_string(), c.to_string(), e.to_string()])
            .collect(),
        passed: true,
    })
}

fn cmd_curvature(
    cfg: &RunConfig,
    spec: &DomainSpec,
    point: Option<Vec<Complex64>>,
    direction: Option<Vec<Complex64>>,
    trials: usize,
) -> Result<Rendered, Failure> {
    if trials == 0 {
        return Err(Failure::Usage("trials must be at least 1".into()));
    }
    let kernel = kernel_for(cfg, spec)?;
    let n = spec.n();
    let points = match point {
        Some(z) => vec![point_of(spec, z)?; trials],
        None => spec.sample_points(trials, verify::SAMPLE_RADIAL_BOUND, cfg.seed),
    };
    let dirs = match direction {
        Some(x) if x.len() == n => vec![x; trials],
        Some(x) => return Err(Failure::Usage(format!("direction has {} entries, expected {n}", x.len()))),
        None => verify::random_directions(n, trials, cfg.seed.wrapping_add(17)),
    };
    let mut values = Vec::with_capacity(trials);
    for (z, x) in points.iter().zip(&dirs) {
        let h = kernel
            .sectional_curvature(z, x)
            .map_err(|e| Failure::Usage(e.to_string()))?;
        values.push(h);
    }
    let (mean, sd) = verify::mean_sd(&values);
    let json = with_header(
        cfg,
        json!({
            "trials": points.iter().zip(&dirs).zip(&values).map(|((z, x), h)| json!({
                "point": z.coords().iter().map(|&c| cnum(c)).collect::<Vec<_>>(),
                "direction": x.iter().map(|&c| cnum(c)).collect::<Vec<_>>(),
                "h": num(*h),
            })).collect::<Vec<_>>(),
            "mean": num(mean),
            "stddev": num(sd),
        }),
    );
    Ok(Rendered {
        json,
        csv_header: vec!["trial".into(), "h".into()],
        csv_rows: values
            .iter()
            .enumerate()
            .map(|(i, h)| vec![i.to_string(), h.to_string()])
            .collect(),
        passed: true,
    })
}

fn cmd_bfunction(cfg: &RunConfig, spec: &DomainSpec, point: Vec<Complex64>) -> Result<Rendered, Failure> {
    let kernel = kernel_for(cfg, spec)?;
    let z = point_of(spec, point)?;
    let b = kernel.b_function(&z);
    let closed = kernel.b_closed_form(&z);
    let dev = (b - closed).abs() / closed;
    let b0 = kernel.b_function(&Point::origin(spec.n()));
    let json = with_header(
        cfg,
        json!({
            "point": z.coords().iter().map(|&c| cnum(c)).collect::<Vec<_>>(),
            "in_domain": spec.contains(&z),
            "b": num(b),
            "b_closed_form": num(closed),
            "relative_deviation": num(dev),
            "b_origin": num(b0),
        }),
    );
    Ok(Rendered::key_values(
        json,
        vec![
            ("b", b.to_string()),
            ("b_closed_form", closed.to_string()),
            ("relative_deviation", dev.to_string()),
            ("b_origin", b0.to_string()),
        ],
    ))
}

fn cmd_profile(cfg: &RunConfig, spec: &DomainSpec, q: u32, rho: Option<Vec<f64>>) -> Result<Rendered, Failure> {
    let grid = rho.unwrap_or_else(|| (0..=6).map(|e| 10f64.powi(e)).collect());
    if grid.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(Failure::Usage("rho values must be positive".into()));
    }
    let rows: Vec<[f64; 4]> = grid
        .iter()
        .map(|&r| {
            let exact = spec.f_exact(q, r);
            let asym = spec.f_asymptotic(q, r);
            [r, exact, asym, exact / asym]
        })
        .collect();
    let json = with_header(
        cfg,
        json!({
            "q": q,
            "rows": rows.iter().map(|r| json!({
                "rho": num(r[0]), "f_exact": num(r[1]), "f_asymptotic": num(r[2]), "ratio": num(r[3]),
            })).collect::<Vec<_>>(),
        }),
    );
    Ok(Rendered {
        json,
        csv_header: ["rho", "f_exact", "f_asymptotic", "ratio"].map(String::from).to_vec(),
        csv_rows: rows
            .iter()
            .map(|r| r.iter().map(|v| v.to_string()).collect())
            .collect(),
        passed: true,
    })
}

fn cmd_verify(cfg: &RunConfig, spec: &DomainSpec, mc_samples: usize, err: &mut dyn Write) -> Result<Rendered, Failure> {
    if mc_samples < 2 {
        return Err(Failure::Usage("mc-samples must be at least 2".into()));
    }
    let vcfg = VerifyConfig {
        spec: *spec,
        quadrature: cfg.quadrature(),
        seed: cfg.seed,
        mc_samples,
    };
    let results = verify::run(&vcfg);
    for r in &results {
        let tag = match r.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skipped => "SKIPPED",
        };
        let _ = writeln!(err, "{tag:<8} {:<24} {}", r.name, r.detail);
    }
    let passed = verify::all_passed(&results);
    let json = with_header(cfg, json!({ "passed": passed, "checks": results }));
    Ok(Rendered {
        json,
        csv_header: ["check", "status", "detail"].map(String::from).to_vec(),
        csv_rows: results
            .iter()
            .map(|r| {
                let status = serde_json::to_value(r.status)
                    .ok()
                    .and_then(|v| v.as_str().map(String::from))
                    .unwrap_or_default();
                vec![r.name.to_string(), status, r.detail.clone()]
            })
            .collect(),
        passed,
    })
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    EXIT_USAGE
                }
            };
        }
    };

    let cfg = match &cli.command {
        Command::Dim { cfg }
        | Command::Norm { cfg, .. }
        | Command::Coeffs { cfg }
        | Command::Curvature { cfg, .. }
        | Command::Bfunction { cfg, .. }
        | Command::Profile { cfg, .. }
        | Command::Verify { cfg, .. } => cfg.clone(),
    };
    let spec = match cfg.spec() {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };

    let result = match cli.command {
        Command::Dim { .. } => cmd_dim(&cfg, &spec),
        Command::Norm { p, .. } => cmd_norm(&cfg, &spec, &p),
        Command::Coeffs { .. } => cmd_coeffs(&cfg, &spec),
        Command::Curvature {
            point,
            direction,
            trials,
            ..
        } => cmd_curvature(&cfg, &spec, point, direction, trials),
        Command::Bfunction { point, .. } => cmd_bfunction(&cfg, &spec, point),
        Command::Profile { q, rho, .. } => cmd_profile(&cfg, &spec, q, rho),
        Command::Verify { mc_samples, .. } => cmd_verify(&cfg, &spec, mc_samples, err),
    };

    let rendered = match result {
        Ok(r) => r,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            return EXIT_USAGE;
        }
        Err(Failure::Check(m)) => {
            let _ = writeln!(err, "verification failure: {m}");
            return EXIT_CHECK_FAILED;
        }
    };

    let bytes = match rendered.write(cfg.format) {
        Ok(b) => b,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_CHECK_FAILED;
        }
    };
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, &bytes).map_err(|e| e.to_string()),
        None => out.write_all(&bytes).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: {e}");
        return EXIT_USAGE;
    }
    if rendered.passed {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("reinhardt").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn dim_reports_basis() {
        let (code, out, _) = run_str(&["dim", "--n", "2", "--a", "5/2"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["dimension"], 3);
        assert_eq!(v["basis"], json!([[0, 0], [0, 1], [1, 0]]));
        assert_eq!(v["a"], "5/2");
    }

    #[test]
    fn dim_agrees_with_enumeration() {
        let (code, out, _) = run_str(&["dim", "--n", "4", "--a", "1"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["dimension"].as_u64().unwrap() as usize, v["basis"].as_array().unwrap().len());
        assert_eq!(v["dimension"], 5);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_str(&["dim", "--n", "1", "--a", "1"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["dim", "--n", "2", "--a", "0/1"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["dim", "--n", "2"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["coeffs", "--n", "2", "--a", "1"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["dim", "--n", "2", "--a", "1", "--radius-scale", "3"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn profile_csv() {
        let (code, out, _) = run_str(&["profile", "--n", "2", "--a", "1", "--q", "0", "--rho", "3,1e4", "--format", "csv"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "rho,f_exact,f_asymptotic,ratio");
        assert!(lines[1].starts_with("3,0.5,"));
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn norm_divergent_monomial() {
        let (code, out, _) = run_str(&["norm", "--n", "2", "--a", "5/2", "--p", "1,1"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["verdict"], "diverges");
        assert_eq!(v["norm_sq"], Value::Null);
        let e: f64 = v["growth_exponent"].as_str().unwrap().parse().unwrap();
        assert!((e - 0.5).abs() < 0.1);
    }

    #[test]
    fn bfunction_and_curvature() {
        let (code, out, _) = run_str(&["bfunction", "--n", "2", "--a", "5/2", "--point", "0.3+0.1i,0.2-0.4i"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        let dev: f64 = v["relative_deviation"].as_str().unwrap().parse().unwrap();
        assert!(dev < 1e-10);

        let (code, out, _) = run_str(&["curvature", "--n", "2", "--a", "5/2", "--trials", "5"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        let mean: f64 = v["mean"].as_str().unwrap().parse().unwrap();
        assert!((mean - 2.0).abs() < 1e-8);
        assert_eq!(v["trials"].as_array().unwrap().len(), 5);
    }

    #[test]
    fn output_file() {
        let dir = std::env::temp_dir().join(format!("reinhardt-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("dim.json");
        let (code, out, _) = run_str(&["dim", "--n", "3", "--a", "1", "--out", path.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(out.is_empty());
        let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(v["dimension"], 1);
        std::fs::remove_dir_all(dir).unwrap();
    }

    fn exponent_strategy() -> impl Strategy<Value = Exponent> {
        prop_oneof![
            (1u64..1000, 1u64..1000).prop_map(|(p, q)| Exponent::ratio(p, q).unwrap()),
            (1e-3f64..100.0).prop_map(|a| Exponent::real(a).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn run_config_round_trips(
            n in 2u32..8,
            a in exponent_strategy(),
            scale in 1u32..=2,
            rel_tol in 1e-14f64..1.0,
            seed in any::<u64>(),
            csv in any::<bool>(),
        ) {
            let cfg = RunConfig {
                n, a, radius_scale: scale, rel_tol, seed,
                format: if csv { OutputFormat::Csv } else { OutputFormat::Json },
                out: None,
            };
            let args: Vec<String> = ["reinhardt".to_string(), "dim".to_string()].into_iter().chain(cfg.to_args()).collect();
            let parsed = Cli::try_parse_from(args).unwrap();
            match parsed.command {
                Command::Dim { cfg: back } => prop_assert_eq!(back, cfg),
                _ => prop_assert!(false),
            }
        }
    }
}
