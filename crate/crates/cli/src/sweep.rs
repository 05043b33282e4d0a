//! Sweep configuration, parallel runner, and plot-data output.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;

use qregion::constants::{INVARIANT_DEFAULT_MAX_ITER, INVARIANT_DEFAULT_TOL};
use qregion::hypotest::beta;
use qregion::repbounds::pure_state_bound;
use qregion::symmetry::invariant_bound_with;
use qregion::{Error, Result};

use crate::commands::{builtin_state, emit, expand_range, parse_range};
use crate::SweepArgs;

const CONFIG_KEYS: [&str; 7] = ["states", "n-range", "alpha", "tol", "output", "parallel", "workers"];
const SWEEP_LABELS: [&str; 6] = ["ghz", "plus", "sine", "uniform", "optimal-u1", "pure-d2"];

/// Fully resolved sweep parameters (config file merged with flag overrides).
struct SweepConfig {
    states: Vec<String>,
    n_range: (usize, usize, usize),
    alpha: f64,
    tol: f64,
    output: Option<PathBuf>,
    parallel: bool,
    workers: Option<usize>,
}

/// Flat `key = value` lines; blank lines and `#` comments are skipped.
fn parse_config_file(text: &str) -> Result<Vec<(String, String)>> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: format!("expected key = value, got {line:?}"),
        })?;
        let key = key.trim().to_string();
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("unknown key {key:?} (expected one of {CONFIG_KEYS:?})"),
            });
        }
        entries.push((key, value.trim().to_string()));
    }
    Ok(entries)
}

fn resolve_config(args: &SweepArgs) -> Result<SweepConfig> {
    let file = match &args.config {
        Some(path) => parse_config_file(&fs::read_to_string(path).map_err(|e| {
            Error::InvalidArgument(format!("cannot read {}: {e}", path.display()))
        })?)?,
        None => Vec::new(),
    };
    let get = |key: &str| file.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
    let parse_num = |key: &str, value: &str| -> Result<f64> {
        value
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("unreadable {key} value {value:?}")))
    };

    let states_text = args
        .states
        .as_deref()
        .or_else(|| get("states"))
        .ok_or_else(|| Error::InvalidArgument("no states given (flag --states or config)".into()))?;
    let states: Vec<String> = states_text
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    if states.is_empty() {
        return Err(Error::InvalidArgument("state list is empty".into()));
    }
    for label in &states {
        if !SWEEP_LABELS.contains(&label.as_str()) {
            return Err(Error::InvalidArgument(format!(
                "unknown sweep state {label:?} (expected one of {SWEEP_LABELS:?})"
            )));
        }
    }

    let range_text = args
        .n_range
        .as_deref()
        .or_else(|| get("n-range"))
        .ok_or_else(|| Error::InvalidArgument("no N range given (flag --n-range or config)".into()))?;
    let n_range = parse_range(range_text)?;

    let alpha = match args.alpha {
        Some(a) => a,
        None => match get("alpha") {
            Some(v) => parse_num("alpha", v)?,
            None => 0.9,
        },
    };
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidAlpha { alpha, expected: "(0, 1]" });
    }

    let tol = match args.tol {
        Some(t) => t,
        None => match get("tol") {
            Some(v) => parse_num("tol", v)?,
            None => INVARIANT_DEFAULT_TOL,
        },
    };

    let output = args.output.clone().or_else(|| get("output").map(PathBuf::from));

    let parallel = match args.parallel {
        Some(p) => p,
        None => match get("parallel") {
            Some(v) => v.parse().map_err(|_| {
                Error::InvalidArgument(format!("unreadable parallel value {v:?}"))
            })?,
            None => true,
        },
    };

    let workers = match args.workers {
        Some(w) => Some(w),
        None => match get("workers") {
            Some(v) => Some(v.parse().map_err(|_| {
                Error::InvalidArgument(format!("unreadable workers value {v:?}"))
            })?),
            None => None,
        },
    };

    Ok(SweepConfig { states, n_range, alpha, tol, output, parallel, workers })
}

struct Row {
    state: String,
    n: usize,
    lower: f64,
    upper: f64,
    iters: usize,
    seconds: f64,
    converged: bool,
    verified: bool,
}

fn solve_row(label: &str, n: usize, cfg: &SweepConfig, verify: bool, timing: bool) -> Result<Row> {
    let start = Instant::now();
    let (lower, upper, iters, converged, verified) = if label == "pure-d2" {
        let value = pure_state_bound(2, n, cfg.alpha)?;
        (value, value, 0, true, true)
    } else {
        let probe = builtin_state(label, n)?;
        let bracket =
            invariant_bound_with(&probe, cfg.alpha, cfg.tol, INVARIANT_DEFAULT_MAX_ITER)?;
        let verified = if verify {
            let assembled = bracket.sigma_cert.assemble()?;
            let recomputed = beta(probe.state(), assembled.operator(), cfg.alpha)?.value;
            (recomputed - bracket.lower).abs() <= 1e-8
        } else {
            true
        };
        (bracket.lower, bracket.upper, bracket.iterations, bracket.converged, verified)
    };
    let seconds = if timing { start.elapsed().as_secs_f64() } else { 0.0 };
    Ok(Row { state: label.to_string(), n, lower, upper, iters, seconds, converged, verified })
}

/// `.dat` companion: per-state blocks of `N value` lines, blank-line
/// separated, in the same sorted order as the CSV.
fn plot_blocks(rows: &[Row]) -> String {
    let mut out = String::new();
    let mut current: Option<&str> = None;
    for row in rows {
        if current != Some(row.state.as_str()) {
            if current.is_some() {
                out.push('\n');
            }
            current = Some(&row.state);
        }
        out.push_str(&format!("{} {}\n", row.n, row.lower));
    }
    out
}

pub fn sweep_cmd(args: &SweepArgs) -> Result<bool> {
    let cfg = resolve_config(args)?;
    let ns = expand_range(cfg.n_range);
    let jobs: Vec<(&str, usize)> = cfg
        .states
        .iter()
        .flat_map(|s| ns.iter().map(move |&n| (s.as_str(), n)))
        .collect();
    let solve = |&(label, n): &(&str, usize)| solve_row(label, n, &cfg, args.verify, args.timing);
    let mut rows: Vec<Row> = if cfg.parallel {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers.unwrap_or(0))
            .build()
            .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
        pool.install(|| jobs.par_iter().map(solve).collect::<Result<Vec<_>>>())?
    } else {
        jobs.iter().map(solve).collect::<Result<Vec<_>>>()?
    };
    rows.sort_by(|a, b| a.state.cmp(&b.state).then(a.n.cmp(&b.n)));

    let mut csv = String::from("state,N,alpha,lower,upper,iters,seconds\n");
    for row in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.state, row.n, cfg.alpha, row.lower, row.upper, row.iters, row.seconds
        ));
    }
    emit(cfg.output.as_deref(), &csv)?;
    if let Some(path) = &cfg.output {
        let dat = path.with_extension("dat");
        fs::write(&dat, plot_blocks(&rows)).map_err(|e| {
            Error::InvalidArgument(format!("cannot write {}: {e}", dat.display()))
        })?;
    }

    let mut flagged = false;
    for row in rows.iter().filter(|r| !r.verified) {
        eprintln!("verify failed for {} N={}", row.state, row.n);
        flagged = true;
    }
    if args.strict {
        for row in rows.iter().filter(|r| !r.converged) {
            eprintln!(
                "not converged: {} N={} bracket [{}, {}]",
                row.state, row.n, row.lower, row.upper
            );
            flagged = true;
        }
    }
    Ok(flagged)
}
