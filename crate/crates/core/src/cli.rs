//! Command-line front end: `list`, `verify` and `eval`.
//!
//! [`run`] parses arguments and returns the process exit code: 0 when every
//! selected identity passes, 1 when any fails, 2 on configuration or
//! evaluation errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::cubic::gamma;
use crate::error::{Error, Result};
use crate::params::{EllipticParams, TruncationPolicy, C64};
use crate::pochhammer::qp_fact_multi;
use crate::registry::{check_identity, find, list_identities, CheckOptions, SamplingRanges};
use crate::report::{Format, SuiteReport};
use crate::series::{ft_rhs, vwp_sum, BalancedQuintuple};
use crate::theta::theta;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// Environment variable naming the default config file of `verify`.
pub const CONFIG_ENV: &str = "ELLHYP_CONFIG";

#[derive(Debug, Parser)]
#[command(name = "ellhyp", version, about = "Elliptic hypergeometric kernels and a randomized identity verifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the registered identities.
    List {
        /// `human` (default) or `json`.
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
    /// Verify identities at random points and write a report.
    Verify(VerifyArgs),
    /// Evaluate a single kernel.
    Eval {
        #[command(subcommand)]
        kind: EvalKind,
    },
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Identity slug; repeatable.
    #[arg(long = "id")]
    ids: Vec<String>,
    /// Every registered identity.
    #[arg(long)]
    all: bool,
    /// Trials per identity (default: each identity's own count).
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides every identity's tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    tail_tol: Option<f64>,
    #[arg(long)]
    max_factors: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Report path; standard output when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// JSON file mirroring [`RunConfig`]; flags override its values.
    #[arg(long, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores). Reports do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args, Clone, Copy)]
struct PolicyArgs {
    #[arg(long, default_value_t = TruncationPolicy::default().tail_tol)]
    tail_tol: f64,
    #[arg(long, default_value_t = TruncationPolicy::default().max_factors)]
    max_factors: usize,
}

#[derive(Debug, Subcommand)]
enum EvalKind {
    /// `θ(x;p)`.
    Theta {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        x: C64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0")]
        p: C64,
        #[command(flatten)]
        policy: PolicyArgs,
    },
    /// Cubic theta function `γ(z,a;p)`.
    Gamma {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: C64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        a: C64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0")]
        p: C64,
        #[command(flatten)]
        policy: PolicyArgs,
    },
    /// `(a_1,…,a_m;q,p)_n`; `--a` is repeatable and `n` may be negative.
    Qpfact {
        #[arg(long = "a", value_parser = parse_complex, allow_hyphen_values = true, required = true)]
        a: Vec<C64>,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        q: C64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0")]
        p: C64,
        #[command(flatten)]
        policy: PolicyArgs,
    },
    /// Terminating `10V9(a; b, c, d, e, q^{-n})` with `e` fixed by the balancing
    /// condition `a²q^{n+1} = bcde`.
    Vwp {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        a: C64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        b: C64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        c: C64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        d: C64,
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        q: C64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0")]
        p: C64,
        /// Print the product side of the summation instead of the series.
        #[arg(long)]
        closed_form: bool,
        #[command(flatten)]
        policy: PolicyArgs,
    },
}

/// Parses `a+bi`, `a-bi`, `a` or `bi` (whitespace ignored).
pub fn parse_complex(s: &str) -> std::result::Result<C64, String> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    compact
        .parse::<C64>()
        .map_err(|_| format!("`{s}` is not a complex literal of the form a+bi"))
}

/// Formats with 17 significant digits in the `a+bi` form [`parse_complex`] reads.
pub fn format_complex(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:.16e}{sign}{:.16e}i", z.re, z.im.abs())
}

/// A `verify` run as read from a JSON config file. Every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub ids: Vec<String>,
    pub all: bool,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub tail_tol: Option<f64>,
    pub max_factors: Option<usize>,
    pub ranges: Option<SamplingRanges>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("reading config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::InvalidParameter(format!("config {}: {e}", path.display())))
    }

    /// Flags that were given replace file values; `--id` replaces the file's list.
    fn overlay(mut self, a: VerifyArgs) -> Self {
        if !a.ids.is_empty() {
            self.ids = a.ids;
        }
        self.all |= a.all;
        self.trials = a.trials.or(self.trials);
        self.seed = a.seed.or(self.seed);
        self.tolerance = a.tolerance.or(self.tolerance);
        self.tail_tol = a.tail_tol.or(self.tail_tol);
        self.max_factors = a.max_factors.or(self.max_factors);
        self.format = a.format.or(self.format);
        self.output = a.output.or(self.output);
        self.threads = a.threads.or(self.threads);
        self
    }

    fn policy(&self) -> Result<TruncationPolicy> {
        let d = TruncationPolicy::default();
        TruncationPolicy::new(self.tail_tol.unwrap_or(d.tail_tol), self.max_factors.unwrap_or(d.max_factors))
    }

    /// Selected slugs: every identity for `all`, else the given list without repeats.
    fn selection(&self) -> Result<Vec<String>> {
        if self.all {
            return Ok(list_identities().into_iter().map(|e| e.id).collect());
        }
        if self.ids.is_empty() {
            return Err(Error::InvalidParameter("select identities with --id or --all".into()));
        }
        let mut out: Vec<String> = Vec::new();
        for id in &self.ids {
            find(id)?;
            if !out.contains(id) {
                out.push(id.clone());
            }
        }
        Ok(out)
    }
}

/// Runs every selected identity and assembles the report.
pub fn verify(config: &RunConfig) -> Result<SuiteReport> {
    if config.trials == Some(0) {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    if let Some(t) = config.tolerance {
        if !(t > 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance must be positive, got {t}")));
        }
    }
    let ids = config.selection()?;
    let policy = config.policy()?;
    let seed = config.seed.unwrap_or(0);
    let run = || -> Result<Vec<_>> {
        ids.iter()
            .map(|id| {
                let entry = find(id)?;
                let opts = CheckOptions {
                    trials: config.trials.unwrap_or(entry.default_trials),
                    seed,
                    tolerance: config.tolerance,
                    ranges: config.ranges.clone().unwrap_or_default(),
                    policy,
                    rhs_scale: 1.0,
                };
                check_identity(id, &opts)
            })
            .collect()
    };
    let results = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    Ok(SuiteReport {
        suite_seed: seed,
        policy,
        results,
    })
}

fn cmd_list(format: Format, out: &mut dyn Write) -> Result<()> {
    let list = list_identities();
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&list).map_err(|e| Error::InvalidParameter(e.to_string()))? + "\n",
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for e in &list {
                w.serialize(e).map_err(|e| Error::InvalidParameter(e.to_string()))?;
            }
            String::from_utf8(w.into_inner().map_err(|e| Error::InvalidParameter(e.to_string()))?)
                .map_err(|e| Error::InvalidParameter(e.to_string()))?
        }
        Format::Human => list
            .iter()
            .map(|e| format!("{:<30} {:>5} {:>8.0e}  {}\n", e.id, e.default_trials, e.tolerance, e.anchor))
            .collect(),
    };
    write_out(out, &text)
}

fn cmd_verify(args: VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool> {
    let base = match &args.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    let config = base.overlay(args);
    let report = verify(&config)?;
    let text = report.render(config.format.unwrap_or(Format::Human))?;
    match &config.output {
        Some(path) => {
            std::fs::write(path, &text)
                .map_err(|e| Error::InvalidParameter(format!("writing {}: {e}", path.display())))?;
            let ok = report.results.iter().filter(|r| r.passed).count();
            let _ = writeln!(err, "{ok}/{} identities passed; report written to {}", report.results.len(), path.display());
        }
        None => write_out(out, &text)?,
    }
    Ok(report.passed())
}

fn cmd_eval(kind: EvalKind) -> Result<C64> {
    let policy = |a: PolicyArgs| TruncationPolicy::new(a.tail_tol, a.max_factors);
    match kind {
        EvalKind::Theta { x, p, policy: pa } => theta(x, p, &policy(pa)?),
        EvalKind::Gamma { z, a, p, policy: pa } => gamma(z, a, p, &policy(pa)?),
        EvalKind::Qpfact { a, n, q, p, policy: pa } => {
            qp_fact_multi(&a, n, &EllipticParams::with_principal_roots(q, p)?, &policy(pa)?)
        }
        EvalKind::Vwp { a, b, c, d, n, q, p, closed_form, policy: pa } => {
            let params = EllipticParams::with_principal_roots(q, p)?;
            let policy = policy(pa)?;
            let q5 = BalancedQuintuple::solve(a, b, c, d, n, params.q())?;
            if closed_form {
                ft_rhs(&q5, &params, &policy)
            } else {
                vwp_sum(&q5.spec_10v9(&params)?, &params, &policy)
            }
        }
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::InvalidParameter(format!("writing output: {e}")))
}

/// Parses `args` (including the program name) and runs the command, writing
/// to `out` and `err`. Returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let outcome = match cli.command {
        Command::List { format } => cmd_list(format, out).map(|_| true),
        Command::Verify(args) => cmd_verify(args, out, err),
        Command::Eval { kind } => cmd_eval(kind).and_then(|v| write_out(out, &(format_complex(v) + "\n")).map(|_| true)),
    };
    match outcome {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

/// [`run_with`] on the process arguments and standard streams.
pub fn run() -> i32 {
    run_with(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_with(std::iter::once("ellhyp").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn complex_literals_round_trip() {
        for z in [C64::new(0.5, 0.0), C64::new(-1e-3, 2.5e-4), C64::new(1.0 / 3.0, -7.0), C64::new(0.0, -0.0)] {
            assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
        }
        assert_eq!(parse_complex(" 1 - 2i ").unwrap(), C64::new(1.0, -2.0));
        assert!(parse_complex("1+2").is_err());
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn eval_basic_values() {
        let (code, out, _) = call(&["eval", "theta", "--x", "0.5", "--p", "0"]);
        assert_eq!(code, 0);
        assert_eq!(parse_complex(out.trim()).unwrap(), C64::new(0.5, 0.0));
        let (code, out, _) = call(&["eval", "gamma", "--z", "1", "--a", "1", "--p", "0"]);
        assert_eq!(code, 0);
        assert_eq!(parse_complex(out.trim()).unwrap(), C64::new(1.0, 0.0));
        // (a;q)_2 = (1-a)(1-aq)
        let (_, out, _) = call(&["eval", "qpfact", "--a", "0.5", "--n", "2", "--q", "0.5"]);
        assert_eq!(parse_complex(out.trim()).unwrap(), C64::new(0.375, 0.0));
        // (a;q)_{-1} = 1/(1-a/q)
        let (_, out, _) = call(&["eval", "qpfact", "--a", "0.25", "--n", "-1", "--q", "0.5"]);
        assert!((parse_complex(out.trim()).unwrap() - 2.0).norm() < 1e-15);
    }

    #[test]
    fn eval_errors_exit_2() {
        assert_eq!(call(&["eval", "theta", "--x", "1+2", "--p", "0"]).0, EXIT_ERROR);
        assert_eq!(call(&["eval", "theta", "--x", "0.5", "--p", "0.999"]).0, EXIT_ERROR);
        assert_eq!(call(&["eval", "gamma", "--z", "0", "--a", "1"]).0, EXIT_ERROR);
        assert_eq!(call(&["frobnicate"]).0, EXIT_ERROR);
    }

    #[test]
    fn vwp_matches_its_closed_form() {
        let point = ["--a", "0.6+0.2i", "--b", "0.9-0.3i", "--c", "1.1+0.4i", "--d", "0.7", "--n", "3", "--q", "0.4+0.1i", "--p", "0.2i"];
        let series: Vec<&str> = ["eval", "vwp"].into_iter().chain(point).collect();
        let closed: Vec<&str> = series.iter().copied().chain(["--closed-form"]).collect();
        let (c1, s, _) = call(&series);
        let (c2, f, _) = call(&closed);
        assert_eq!((c1, c2), (0, 0));
        let (s, f) = (parse_complex(s.trim()).unwrap(), parse_complex(f.trim()).unwrap());
        assert!(crate::relative_residual(s, f) < 1e-12, "{s} vs {f}");
    }

    #[test]
    fn verify_selection_errors() {
        let (code, _, err) = call(&["verify", "--id", "no-such-identity"]);
        assert_eq!(code, EXIT_ERROR);
        assert!(err.contains("no-such-identity"));
        assert_eq!(call(&["verify"]).0, EXIT_ERROR);
        assert_eq!(call(&["verify", "--id", "theta-structural", "--trials", "0"]).0, EXIT_ERROR);
    }

    #[test]
    fn flags_override_config() {
        let file = RunConfig {
            ids: vec!["theta-structural".into()],
            trials: Some(7),
            seed: Some(5),
            ..RunConfig::default()
        };
        let args = VerifyArgs {
            ids: vec![],
            all: false,
            trials: Some(3),
            seed: None,
            tolerance: None,
            tail_tol: None,
            max_factors: None,
            format: Some(Format::Csv),
            output: None,
            config: None,
            threads: None,
        };
        let merged = file.overlay(args);
        assert_eq!(merged.trials, Some(3));
        assert_eq!(merged.seed, Some(5));
        assert_eq!(merged.ids, vec!["theta-structural".to_string()]);
        assert_eq!(merged.format, Some(Format::Csv));
    }

    #[test]
    fn list_is_stable() {
        let (code, a, _) = call(&["list"]);
        assert_eq!(code, 0);
        assert!(a.contains("frenkel-turaev-10v9"));
        assert!(a.lines().count() >= list_identities().len());
        assert_eq!(call(&["list"]).1, a);
    }
}
