//! Single-shot subcommand handlers and shared plumbing.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use num_traits::ToPrimitive;

use qregion::corollaries::{
    avg_volume_bounds, avg_volume_bounds_with, energy_bounded_bound, entropic_mse_bound_circle,
    entropic_region_bound, heisenberg_mse_bound, nonlinear_example_bound, scaling_fit,
    separable_analytic_bound, separable_certificate, shotnoise_mse_bound,
};
use qregion::hypotest::{beta, conditional_entropy_covariant, dpi_deficit};
use qregion::io::{parse_complex, parse_state};
use qregion::repbounds::{
    group_bound, group_denominator, homogeneous_bound, homogeneous_denominator, max_weyl_dim,
    mixed_state_bound, pure_state_bound, symmetric_dim, u1_eigenvalue_count,
};
use qregion::states::{
    dephase, ghz, plus_power, sine_state, uniform_phase_state, ProbeState, U1Generator,
};
use qregion::symmetry::{invariant_bound_with, optimal_probe_state};
use qregion::{Error, Result};

use crate::{BetaArgs, CorollaryArgs, EntropyArgs, FitArgs, InvariantBoundArgs, RepBoundArgs, RepMode, StateArg, Which};

/// Write `content` to `output`, or stdout when absent.
pub fn emit(output: Option<&Path>, content: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, content)
            .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

/// Builtin probe families available by label.
pub fn builtin_state(label: &str, n: usize) -> Result<ProbeState> {
    match label {
        "ghz" => ghz(n),
        "plus" => plus_power(n),
        "sine" => sine_state(n),
        "uniform" => uniform_phase_state(n),
        "optimal-u1" => Ok(optimal_probe_state(&U1Generator::n_qubit(n))),
        other => Err(Error::InvalidArgument(format!(
            "unknown builtin state {other:?} (expected ghz, plus, sine, uniform, optimal-u1)"
        ))),
    }
}

/// Resolve a `--state` argument: `builtin:<label>` with `--n`, or a file.
///
/// Also returns the qubit count for the CSV `N` column: the requested `--n`
/// for builtins, otherwise the largest absolute generator weight (which
/// equals the qubit count for every builtin family).
pub fn load_state(arg: &StateArg) -> Result<(ProbeState, usize)> {
    if let Some(label) = arg.state.strip_prefix("builtin:") {
        let n = arg.n.ok_or_else(|| {
            Error::InvalidArgument("--n is required with builtin states".into())
        })?;
        Ok((builtin_state(label, n)?, n))
    } else {
        let path = Path::new(&arg.state);
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "state".into());
        let probe = parse_state(&read_text(path)?)?.into_probe(label)?;
        let n = probe.generator().weights().iter().map(|w| w.unsigned_abs()).max().unwrap_or(0);
        Ok((probe, n as usize))
    }
}

/// Inclusive `start:stop:step` range.
pub fn parse_range(text: &str) -> Result<(usize, usize, usize)> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidArgument(format!(
            "range must be start:stop:step, got {text:?}"
        )));
    }
    let nums: Vec<usize> = parts
        .iter()
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("unreadable range part {p:?}")))
        })
        .collect::<Result<_>>()?;
    if nums[0] == 0 || nums[2] == 0 {
        return Err(Error::InvalidArgument("range start and step must be at least 1".into()));
    }
    Ok((nums[0], nums[1], nums[2]))
}

/// Expand an inclusive range into its points (empty when stop < start).
pub fn expand_range((start, stop, step): (usize, usize, usize)) -> Vec<usize> {
    if stop < start {
        return Vec::new();
    }
    (start..=stop).step_by(step).collect()
}

fn parse_site(text: &str) -> Result<(Complex64, Complex64)> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::InvalidArgument(format!(
            "site must be two comma-separated amplitudes, got {text:?}"
        )));
    }
    Ok((parse_complex(parts[0])?, parse_complex(parts[1])?))
}

fn balanced_site() -> (Complex64, Complex64) {
    let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    (a, a)
}

pub fn beta_cmd(args: &BetaArgs) -> Result<bool> {
    let rho = parse_state(&read_text(&args.rho)?)?.into_probe("rho")?;
    let (sigma, _) = parse_state(&read_text(&args.sigma)?)?.into_operator()?;
    let res = beta(rho.state(), &sigma, args.alpha)?;
    let csv = format!(
        "alpha,value,gap,mu\n{},{},{},{}\n",
        res.alpha, res.value, res.gap, res.dual.mu
    );
    emit(args.output.as_deref(), &csv)?;
    Ok(false)
}

pub fn invariant_bound_cmd(args: &InvariantBoundArgs) -> Result<bool> {
    let (state, n) = load_state(&args.state)?;
    let bracket = invariant_bound_with(&state, args.alpha, args.tol, args.max_iter)?;
    let csv = format!(
        "label,N,alpha,lower,upper,iters\n{},{n},{},{},{},{}\n",
        state.label(),
        args.alpha,
        bracket.lower,
        bracket.upper,
        bracket.iterations
    );
    emit(args.output.as_deref(), &csv)?;
    let mut flagged = false;
    if args.verify {
        let assembled = bracket.sigma_cert.assemble()?;
        let recomputed = beta(state.state(), assembled.operator(), args.alpha)?.value;
        if (recomputed - bracket.lower).abs() > 1e-8 {
            eprintln!(
                "verify failed: certificate re-solve {} vs reported lower {}",
                recomputed, bracket.lower
            );
            flagged = true;
        }
    }
    if args.strict && !bracket.converged {
        eprintln!(
            "not converged: bracket [{}, {}] after {} iterations",
            bracket.lower, bracket.upper, bracket.iterations
        );
        flagged = true;
    }
    Ok(flagged)
}

pub fn rep_bound_cmd(args: &RepBoundArgs) -> Result<bool> {
    let ns = expand_range(parse_range(&args.n_range)?);
    let site_weights: Vec<i64> = args
        .site_weights
        .split(',')
        .map(|w| {
            w.trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("unreadable site weight {w:?}")))
        })
        .collect::<Result<_>>()?;
    let mut csv = String::from("mode,d,N,denominator,bound\n");
    for n in ns {
        let (denominator, bound) = match args.mode {
            RepMode::Group => (
                group_denominator(args.d, n)?.to_f64().unwrap_or(f64::INFINITY),
                group_bound(args.d, n, args.alpha)?,
            ),
            RepMode::Homogeneous => (
                homogeneous_denominator(args.d, n)?.to_f64().unwrap_or(f64::INFINITY),
                homogeneous_bound(args.d, n, args.alpha)?,
            ),
            RepMode::Mixed => (
                max_weyl_dim(args.d, n)?.to_f64().unwrap_or(f64::INFINITY),
                mixed_state_bound(args.d, n, args.alpha)?,
            ),
            RepMode::Pure => (
                symmetric_dim(args.d, n)?.to_f64().unwrap_or(f64::INFINITY),
                pure_state_bound(args.d, n, args.alpha)?,
            ),
            RepMode::U1Count => {
                let count = u1_eigenvalue_count(&site_weights, n)?;
                (count as f64, args.alpha / count as f64)
            }
        };
        csv.push_str(&format!(
            "{},{},{n},{denominator},{bound}\n",
            args.mode.name(),
            args.d
        ));
    }
    emit(args.output.as_deref(), &csv)?;
    Ok(false)
}

fn require<T: Copy>(value: Option<T>, flag: &str, which: &str) -> Result<T> {
    value.ok_or_else(|| Error::InvalidArgument(format!("--{flag} is required for {which}")))
}

pub fn corollary_cmd(args: &CorollaryArgs) -> Result<bool> {
    let which = args.which.name();
    let csv = match args.which {
        Which::MseH => {
            let n = require(args.n, "n", which)?;
            let bound = heisenberg_mse_bound(args.c, n)?;
            format!("which,c,n,bound\n{which},{},{n},{bound}\n", args.c)
        }
        Which::MseSn => {
            let n = require(args.n, "n", which)?;
            let bound = shotnoise_mse_bound(args.c, n)?;
            format!("which,c,n,bound\n{which},{},{n},{bound}\n", args.c)
        }
        Which::Entropic => {
            let h = require(args.h_cond, "h-cond", which)?;
            let region = entropic_region_bound(h, args.p_succ, args.volume)?;
            let mse = entropic_mse_bound_circle(h);
            format!(
                "which,h_cond,p_succ,volume,region_bound,mse_circle\n{which},{h},{},{},{region},{mse}\n",
                args.p_succ, args.volume
            )
        }
        Which::Energy => {
            let e = require(args.energy, "energy", which)?;
            let bound = energy_bounded_bound(e, args.p_succ)?;
            format!("which,energy,p_succ,bound\n{which},{e},{},{bound}\n", args.p_succ)
        }
        Which::Separable => {
            let n = require(args.n, "n", which)?;
            let site = match &args.site {
                Some(s) => parse_site(s)?,
                None => balanced_site(),
            };
            let analytic = separable_analytic_bound(args.m, args.k, n, args.alpha)?;
            let cert = separable_certificate(&[site], n, args.alpha)?;
            format!(
                "which,m,k,n,alpha,analytic,certificate,window,feasible\n\
                 {which},{},{},{n},{},{analytic},{},{},{}\n",
                args.m, args.k, args.alpha, cert.value, cert.window, cert.feasible
            )
        }
        Which::Nonlinear => {
            let n = require(args.n, "n", which)?;
            let site = match &args.site {
                Some(s) => parse_site(s)?,
                None => balanced_site(),
            };
            let aux = match &args.aux {
                Some(s) => parse_site(s)?,
                None => balanced_site(),
            };
            let cert = nonlinear_example_bound(&[site, aux], n, args.alpha)?;
            format!(
                "which,n,alpha,bound,window,feasible\n{which},{n},{},{},{},{}\n",
                args.alpha, cert.value, cert.window, cert.feasible
            )
        }
        Which::Avg => {
            let selector = args.state.clone().ok_or_else(|| {
                Error::InvalidArgument("--state is required for avg".into())
            })?;
            let (state, n) = load_state(&StateArg { state: selector, n: args.n })?;
            let floors = match args.eps {
                Some(eps) => avg_volume_bounds_with(&state, args.alpha, eps)?,
                None => avg_volume_bounds(&state, args.alpha)?,
            };
            format!(
                "which,label,N,alpha,at_x,averaged,truncation\n\
                 {which},{},{n},{},{},{},{}\n",
                state.label(),
                args.alpha,
                floors.at_x,
                floors.averaged,
                floors.truncation
            )
        }
    };
    emit(args.output.as_deref(), &csv)?;
    Ok(false)
}

pub fn entropy_cmd(args: &EntropyArgs) -> Result<bool> {
    let (state, n) = load_state(&args.state)?;
    let h_cond = conditional_entropy_covariant(&state, args.volume)?;
    let dephased = dephase(state.state(), state.generator())?;
    let deficit = dpi_deficit(state.state(), dephased.operator(), args.alpha)?;
    let csv = format!(
        "label,N,alpha,volume,h_cond,dpi_deficit\n{},{n},{},{},{h_cond},{deficit}\n",
        state.label(),
        args.alpha,
        args.volume
    );
    emit(args.output.as_deref(), &csv)?;
    Ok(false)
}

/// Fit `column` against `N` per state over the upper half of each state's N
/// range (at least the four largest points).
pub fn fit_cmd(args: &FitArgs) -> Result<bool> {
    let text = read_text(&args.input)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, message: "empty CSV".into() })?;
    let columns: Vec<&str> = header.split(',').collect();
    let find = |name: &str| {
        columns.iter().position(|c| *c == name).ok_or_else(|| Error::Parse {
            line: 1,
            message: format!("missing column {name:?} in {header:?}"),
        })
    };
    let state_idx = find("state")?;
    let n_idx = find("N")?;
    let value_idx = find(&args.column)?;
    let mut by_state: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let line_no = i + 2;
        if fields.len() != columns.len() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("{} fields, expected {}", fields.len(), columns.len()),
            });
        }
        let n: f64 = fields[n_idx].parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("unreadable N {:?}", fields[n_idx]),
        })?;
        let value: f64 = fields[value_idx].parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("unreadable {} {:?}", args.column, fields[value_idx]),
        })?;
        let label = fields[state_idx].to_string();
        match by_state.iter_mut().find(|(s, _)| *s == label) {
            Some((_, points)) => points.push((n, value)),
            None => by_state.push((label, vec![(n, value)])),
        }
    }
    by_state.sort_by(|a, b| a.0.cmp(&b.0));
    let mut csv = String::from("state,constant,slope,r2\n");
    for (label, mut points) in by_state {
        points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        if points.len() < 4 {
            return Err(Error::FitRejected(format!(
                "state {label:?} has {} rows, need at least 4",
                points.len()
            )));
        }
        let start = (points.len() / 2).min(points.len() - 4);
        let fit = scaling_fit(&points[start..])?;
        csv.push_str(&format!("{label},{},{},{}\n", fit.constant, fit.slope, fit.r2));
    }
    emit(args.output.as_deref(), &csv)?;
    Ok(false)
}
