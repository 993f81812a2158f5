//! The `ksnorm` command line: norms of functions in measure spec files,
//! gauge integrals of built-in integrands, and the verification suites.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use ksnorm::norms::ksp_norm_truncated;
use ksnorm::verify::{builtin_fixture, run_suite, Fixture, Suite, SuiteConfig, BUILTIN_FIXTURES};
use ksnorm::{
    hkl_norm, ksp_norm, ksp_weak_norm, lp_norm, CandidateStrategy, Error, FamilyKind, Integrand, NormResult,
    PExponent,
};

pub mod spec;

use spec::{parse_number, MeasureSpecFile, Overrides};

pub const EXIT_OK: u8 = 0;
/// A check failed or a computation missed its contract.
pub const EXIT_FAILURE: u8 = 1;
/// Bad usage or an input that does not validate.
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "ksnorm", version, about = "Kuelbs-Steadman norms and gauge integrals on finite atomic models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a norm of one function from a measure spec file.
    Norm(NormArgs),
    /// Gauge-integrate a built-in integrand over [a, b].
    Integrate(IntegrateArgs),
    /// Run the verification suites and write reports.
    Check(CheckArgs),
    /// Write a built-in fixture as a measure spec file.
    EmitFixture(EmitArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormKind {
    /// `L^p` norm, maximized over the candidates.
    Lp,
    /// Kuelbs-Steadman norm over the set family.
    Ks,
    /// Weak-topology Kuelbs-Steadman norm, weighted over the candidates.
    Ksw,
    /// Alexiewicz norm.
    Hkl,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    #[arg(value_enum)]
    pub norm: NormKind,
    pub file: PathBuf,
    pub function: String,
    /// Exponent p >= 1, or `inf`.
    #[arg(long, default_value = "1")]
    pub p: PExponent,
    /// Override the file's set family: all_subsets, dyadic or explicit.
    #[arg(long)]
    pub family: Option<FamilyKind>,
    /// Override the file's candidates: extreme_points or sphere_sample.
    #[arg(long)]
    pub candidates: Option<CandidateStrategy>,
    /// Sphere samples when candidates are sampled.
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Integrate |f| instead of f.
    #[arg(long)]
    pub modulus: bool,
    /// For `ks`: keep the fewest family terms whose tail bound is at most tol.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Print the result as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum IntegrandName {
    Poly,
    SqrtSingular,
    OscillatoryDerivative,
}

#[derive(Debug, Args)]
pub struct IntegrateArgs {
    #[arg(value_enum)]
    pub integrand: IntegrandName,
    #[arg(long, default_value = "0", value_parser = number, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value = "1", value_parser = number, allow_hyphen_values = true)]
    pub b: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Polynomial coefficients, constant term first.
    #[arg(long, value_delimiter = ',', value_parser = number, default_value = "0,2", allow_hyphen_values = true)]
    pub coeffs: Vec<f64>,
    /// Singular point of sqrt_singular and oscillatory_derivative.
    #[arg(long, default_value = "0", value_parser = number, allow_hyphen_values = true)]
    pub center: f64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Measure spec files to check alongside the built-in fixtures.
    #[arg(long = "fixture")]
    pub fixtures: Vec<PathBuf>,
    /// Comma-separated suites: spaces, measures, integration, norms, corpus or all.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub report_json: Option<PathBuf>,
    #[arg(long)]
    pub report_text: Option<PathBuf>,
    /// Random models per model-level check.
    #[arg(long, default_value_t = 200)]
    pub instances: usize,
    /// Random sequences per weighted-series check.
    #[arg(long, default_value_t = 500)]
    pub sequences: usize,
    /// Split points for the gauge-integral additivity check.
    #[arg(long, default_value_t = 50)]
    pub hk_splits: usize,
    /// Check only the given fixture files.
    #[arg(long)]
    pub no_builtin_fixtures: bool,
}

#[derive(Debug, Args)]
pub struct EmitArgs {
    /// Fixture name; see --list.
    #[arg(required_unless_present = "list")]
    pub name: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// List the built-in fixtures.
    #[arg(long)]
    pub list: bool,
}

fn number(s: &str) -> Result<f64, String> {
    parse_number(s)
}

/// Runs one command, writing results to `out` and diagnostics to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let result = match cli.command {
        Command::Norm(a) => cmd_norm(&a, out),
        Command::Integrate(a) => cmd_integrate(&a, out),
        Command::Check(a) => cmd_check(&a, out),
        Command::EmitFixture(a) => cmd_emit(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure { code, message }) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.to_string(),
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    usage(format!("{}: {e}", path.display()))
}

fn from_core(e: Error) -> Failure {
    match e {
        Error::NonConvergence { .. } => Failure {
            code: EXIT_FAILURE,
            message: e.to_string(),
        },
        e => usage(e),
    }
}

/// Reads and validates a spec file; diagnostics carry the path.
pub fn load_fixture(path: &Path, ov: &Overrides) -> Result<Fixture, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("model");
    MeasureSpecFile::from_json(&text)
        .and_then(|f| f.validate(stem, ov))
        .map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_norm(a: &NormArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    if a.tol.is_some() && a.norm != NormKind::Ks {
        return Err(usage("--tol applies to the ks norm only"));
    }
    if let Some(t) = a.tol {
        if t.is_nan() || t <= 0.0 {
            return Err(usage(format!("--tol must be positive, got {t}")));
        }
    }
    let ov = Overrides {
        family: a.family,
        candidates: a.candidates,
        size: a.size,
        seed: a.seed,
    };
    let fx = load_fixture(&a.file, &ov).map_err(usage)?;
    let f = fx.functions.get(&a.function).ok_or_else(|| {
        let known: Vec<&str> = fx.functions.keys().map(String::as_str).collect();
        usage(format!("no function `{}` in {}; known: {}", a.function, a.file.display(), known.join(", ")))
    })?;
    let (mu, fam, d) = (&fx.measure, &fx.family, &fx.candidates);
    let mut terms = None;
    let r: NormResult = match a.norm {
        NormKind::Lp => {
            if a.modulus {
                return Err(usage("--modulus has no effect on lp; it already integrates |f|"));
            }
            lp_norm(f, mu, a.p, d)
        }
        NormKind::Ks => match a.tol {
            Some(tol) => {
                let (k, r) = truncate_to_tol(tol, fam.len(), |k| ksp_norm_truncated(f, mu, a.p, fam, d, a.modulus, k))
                    .map_err(from_core)?;
                terms = Some(k);
                Ok(r)
            }
            None => ksp_norm(f, mu, a.p, fam, d, a.modulus),
        },
        NormKind::Ksw => ksp_weak_norm(f, mu, a.p, fam, d, a.modulus),
        NormKind::Hkl => {
            if a.modulus {
                return Err(usage("--modulus is not defined for hkl"));
            }
            hkl_norm(f, mu, d)
        }
    }
    .map_err(from_core)?;
    let name = format!("{:?}", a.norm).to_lowercase();
    if a.json {
        let doc = serde_json::json!({
            "norm": name,
            "p": a.p,
            "function": a.function,
            "use_modulus": a.modulus,
            "terms": terms.unwrap_or(fam.len()),
            "result": r,
        });
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("result serializes"));
        return Ok(EXIT_OK);
    }
    let _ = writeln!(out, "norm {name}  p {}  function {}{}", a.p, a.function, if a.modulus { "  (|f|)" } else { "" });
    let _ = writeln!(out, "value                  {}", r.value);
    let _ = writeln!(out, "lower_bound_certified  {}", r.lower_bound_certified);
    let _ = writeln!(out, "series_tail_bound      {}", r.series_tail_bound);
    if matches!(a.norm, NormKind::Ks | NormKind::Ksw) {
        let _ = writeln!(out, "family terms           {} of {}", terms.unwrap_or(fam.len()), fam.len());
    }
    let _ = writeln!(out, "candidates             {}", r.candidate_provenance);
    Ok(EXIT_OK)
}

/// The fewest leading terms whose tail bound is at most `tol`. The bound
/// shrinks as terms are added, so a bisection finds the count.
fn truncate_to_tol(
    tol: f64,
    total: usize,
    eval: impl Fn(usize) -> ksnorm::Result<NormResult>,
) -> ksnorm::Result<(usize, NormResult)> {
    let (mut lo, mut hi) = (1, total);
    let mut best = eval(total)?;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        let r = eval(mid)?;
        if r.series_tail_bound <= tol {
            hi = mid;
            best = r;
        } else {
            lo = mid + 1;
        }
    }
    if hi != total || best.series_tail_bound > tol {
        best = eval(hi)?;
    }
    Ok((hi, best))
}

fn cmd_integrate(a: &IntegrateArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    let f = match a.integrand {
        IntegrandName::Poly => Integrand::Poly {
            coeffs: a.coeffs.clone(),
        },
        IntegrandName::SqrtSingular => Integrand::SqrtSingular { center: a.center },
        IntegrandName::OscillatoryDerivative => Integrand::OscillatoryDerivative { center: a.center },
    };
    let r = f.integrate(a.a, a.b, a.tol).map_err(from_core)?;
    let exact = f.exact(a.a, a.b);
    if a.json {
        let doc = serde_json::json!({
            "integrand": f,
            "a": a.a,
            "b": a.b,
            "tol": a.tol,
            "value": r.value,
            "achieved_tol": r.achieved_tol,
            "refinement_depth": r.refinement_depth,
            "evaluations": r.evaluations,
            "antiderivative_value": exact,
        });
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("result serializes"));
        return Ok(EXIT_OK);
    }
    let _ = writeln!(out, "integrand          {f} on [{}, {}]", a.a, a.b);
    let _ = writeln!(out, "value              {}", r.value);
    let _ = writeln!(out, "achieved_tol       {:e}", r.achieved_tol);
    let _ = writeln!(out, "refinement_depth   {}", r.refinement_depth);
    let _ = writeln!(out, "evaluations        {}", r.evaluations);
    let _ = writeln!(out, "F(b) - F(a)        {exact}");
    Ok(EXIT_OK)
}

fn cmd_check(a: &CheckArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    let suites = Suite::parse_selection(&a.suite).map_err(usage)?;
    let fixtures = a
        .fixtures
        .iter()
        .map(|p| load_fixture(p, &Overrides::default()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(usage)?;
    // open report files first so a bad path fails before the run
    let mut json_file = a
        .report_json
        .as_ref()
        .map(|p| fs::File::create(p).map(|f| (p, f)).map_err(|e| io_failure(p, e)))
        .transpose()?;
    let mut text_file = a
        .report_text
        .as_ref()
        .map(|p| fs::File::create(p).map(|f| (p, f)).map_err(|e| io_failure(p, e)))
        .transpose()?;
    let cfg = SuiteConfig {
        suites,
        seed: a.seed,
        instances: a.instances,
        sequences: a.sequences,
        hk_splits: a.hk_splits,
        fixtures,
        builtin_fixtures: !a.no_builtin_fixtures,
        ..SuiteConfig::default()
    };
    let report = run_suite(&cfg).map_err(usage)?;
    let text = report.to_text();
    if let Some((p, f)) = json_file.as_mut() {
        f.write_all(report.to_json().as_bytes()).map_err(|e| io_failure(p, e))?;
    }
    match text_file.as_mut() {
        Some((p, f)) => {
            f.write_all(text.as_bytes()).map_err(|e| io_failure(p, e))?;
            let s = &report.summary;
            let _ = writeln!(
                out,
                "{} passed, {} failed, {} skipped, {} expected failures, {} unexpected passes",
                s.pass, s.fail, s.skip, s.xfail, s.xpass
            );
        }
        None => {
            let _ = out.write_all(text.as_bytes());
        }
    }
    Ok(if report.has_unexpected_failures() {
        EXIT_FAILURE
    } else {
        EXIT_OK
    })
}

fn cmd_emit(a: &EmitArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    if a.list {
        for name in BUILTIN_FIXTURES {
            let _ = writeln!(out, "{name}");
        }
        return Ok(EXIT_OK);
    }
    let name = a.name.as_deref().unwrap_or_default();
    let fx = builtin_fixture(name)
        .ok_or_else(|| usage(format!("no fixture `{name}`; known: {}", BUILTIN_FIXTURES.join(", "))))?
        .map_err(usage)?;
    let json = MeasureSpecFile::from_fixture(&fx).to_json();
    match &a.out {
        Some(p) => fs::write(p, json).map_err(|e| io_failure(p, e))?,
        None => {
            let _ = out.write_all(json.as_bytes());
        }
    }
    Ok(EXIT_OK)
}
