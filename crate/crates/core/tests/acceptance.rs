//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Exits non-zero when a criterion fails that is not listed in
//! `KNOWN_FAILURES`. A known failure still prints FAIL; the list only keeps a
//! documented, understood shortfall from masking new regressions.

use std::process::Command;
use std::time::Instant;

use ellhyp::cli::{verify, RunConfig};
use ellhyp::registry::{check_identity, list_identities, registry, run_identity, CheckOptions, VerificationReport};
use ellhyp::report::strip_wall_time;

const SEED: u64 = 42;

/// The second `p → 0` degeneration does not converge: its residuals stay
/// near 1, so "strictly decreasing" fails for most points.
const KNOWN_FAILURES: &[usize] = &[10];

type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(id: &str, trials: usize, tolerance: f64) -> VerificationReport {
    let opts = CheckOptions {
        trials,
        seed: SEED,
        tolerance: Some(tolerance),
        ..CheckOptions::default()
    };
    check_identity(id, &opts).unwrap_or_else(|e| panic!("{id}: {e}"))
}

/// Every listed identity at `trials` points must stay strictly below `tol`.
fn block(ids: &[&str], trials: usize, tol: f64) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for id in ids {
        let r = check(id, trials, tol);
        let ok = r.passed && r.max_residual < tol;
        pass &= ok;
        parts.push(format!("{id} max {:.2e}{}", r.max_residual, if ok { "" } else { " (over)" }));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn c1() -> Outcome {
    let r = check("frenkel-turaev-10v9", 200, 1e-9);
    Outcome {
        pass: r.passed && r.max_residual < 1e-9 && r.wall_time < 5.0,
        detail: format!("200 points, max {:.2e}, {:.2} s", r.max_residual, r.wall_time),
    }
}

fn c6() -> Outcome {
    let ids = [
        "multivar-taylor",
        "multivar-explicit-operator",
        "multivar-interpolation",
        "multivar-km",
        "multivar-km-theta-form",
    ];
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let start = Instant::now();
    let mut out = pool.install(|| block(&ids, 50, 1e-8));
    let secs = start.elapsed().as_secs_f64();
    out.pass &= secs < 60.0;
    out.detail = format!("{}; single-threaded {secs:.2} s", out.detail);
    out
}

fn c10() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for id in ["degeneration-first", "degeneration-second"] {
        let r = check(id, 50, 1.0);
        pass &= r.passed;
        let order = r.empirical_order.map_or("none".to_string(), |o| format!("{o:.3}"));
        parts.push(format!("{id}: {}/{} points fail, order {order}", r.failures.len(), r.trials));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn suite_json(threads: &str) -> String {
    let o = Command::new(env!("CARGO_BIN_EXE_ellhyp"))
        .env_remove("ELLHYP_CONFIG")
        .args(["verify", "--all", "--seed", &SEED.to_string(), "--format", "json", "--threads", threads])
        .output()
        .expect("binary runs");
    let mut v: serde_json::Value = serde_json::from_slice(&o.stdout).expect("JSON report");
    strip_wall_time(&mut v);
    serde_json::to_string_pretty(&v).unwrap()
}

fn c11() -> Outcome {
    let n = std::thread::available_parallelism().map_or(4, |n| n.get()).max(4).to_string();
    let a = suite_json("1");
    let b = suite_json("1");
    let c = suite_json(&n);
    let d = suite_json(&n);
    Outcome {
        pass: a == b && a == c && c == d,
        detail: format!("verify --all twice at 1 and twice at {n} threads, {} bytes each", a.len()),
    }
}

fn c12() -> Outcome {
    let mut missed = Vec::new();
    let mut checked = 0;
    for entry in registry().iter().filter(|e| e.is_equality()) {
        let opts = CheckOptions {
            trials: entry.default_trials,
            seed: SEED,
            rhs_scale: 1.0 + 1e-6,
            ..CheckOptions::default()
        };
        let r = run_identity(entry, &opts).unwrap();
        checked += 1;
        if r.passed {
            missed.push(entry.id);
        }
    }
    let start = Instant::now();
    let config = RunConfig {
        all: true,
        seed: Some(SEED),
        ..RunConfig::default()
    };
    let suite = verify(&config).expect("full suite runs");
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        pass: missed.is_empty() && secs < 120.0 && suite.results.len() == list_identities().len(),
        detail: format!(
            "{checked} perturbed identities, {} passed wrongly{}; full suite {secs:.2} s",
            missed.len(),
            if missed.is_empty() { String::new() } else { format!(" ({})", missed.join(", ")) }
        ),
    }
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("Frenkel-Turaev 10V9 summation", Box::new(c1)),
        ("Jackson 8phi7 (p = 0)", Box::new(|| block(&["jackson-8phi7"], 200, 1e-11))),
        ("explicit iterate = recursive iterate, annihilation", Box::new(|| block(&["cooper-explicit-vs-recursive"], 100, 1e-9))),
        ("Taylor round trip and interpolation", Box::new(|| block(&["taylor-expansion", "interpolation"], 100, 1e-9))),
        ("Karlsson-Minton type identities", Box::new(|| block(&["km-12v11", "km-theta-products"], 100, 1e-9))),
        ("multivariate block", Box::new(c6)),
        ("quadratic-basis block", Box::new(|| block(&["quadratic-taylor", "warnaar-gessel-stanton", "remark-pseudo-quadratic"], 100, 1e-9))),
        (
            "cubic theta structure",
            Box::new(|| {
                let mut a = block(&["gamma-structural"], 200, 1e-9);
                let b = block(&["gamma-series-oracle"], 200, 1e-12);
                a.pass &= b.pass;
                a.detail = format!("{}; {}", a.detail, b.detail);
                a
            }),
        ),
        (
            "cubic summations",
            Box::new(|| {
                block(
                    &["cubic-jackson-1", "cubic-km", "cubic-gessel-stanton-1", "cubic-jackson-2", "cubic-gessel-stanton-2"],
                    100,
                    1e-8,
                )
            }),
        ),
        ("p -> 0 degenerations", Box::new(c10)),
        ("determinism across runs and threads", Box::new(c11)),
        ("negative controls and suite runtime", Box::new(c12)),
    ];

    let mut unexpected = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        let out = run();
        println!("{} {n:>2} {name}: {}", if out.pass { "PASS" } else { "FAIL" }, out.detail);
        if !out.pass && !KNOWN_FAILURES.contains(&n) {
            unexpected.push(n);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
