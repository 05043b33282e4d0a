//! Estimation-theoretic consequences of the testing machinery: mean-squared-error
//! floors, entropic volume bounds, and constructive scaling certificates for
//! separable and nonlinearly-coupled probes.
//!
//! Conventions: phases live on the circle of circumference `2 pi`; region
//! volumes returned by the invariant-bound machinery are fractions of the
//! parameter-space volume, while the entropic bounds work in absolute units.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hypotest::beta;
use crate::numerics::entropy_of_spectrum;
use crate::repbounds::scaling_exponent;
use crate::states::{dephase, product_state, ProbeState};
use crate::symmetry::{invariant_bound, BoundBracket};

/// Volume of a ball of radius `delta` on the circle: `min(2 delta, 2 pi)`.
pub fn circle_ball_volume(delta: f64) -> f64 {
    (2.0 * delta).min(std::f64::consts::TAU).max(0.0)
}

/// Success-probability floor implied by a mean-squared error: an estimator
/// with MSE `mse` lands within `delta` of the truth with probability at least
/// `1 - mse / delta^2` (Chebyshev), clipped to `[0, 1]`.
pub fn point_to_region(mse: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    if !(mse >= 0.0) {
        return Err(Error::InvalidArgument(format!("mse must be nonnegative, got {mse}")));
    }
    Ok((1.0 - mse / (delta * delta)).clamp(0.0, 1.0))
}

/// Mean-squared-error floor `4 C^2 pi^2 / (27 N^2)` for phase estimation with
/// `N`-qubit probes whose region volume obeys a `C / N` floor.
pub fn heisenberg_mse_bound(c: f64, n: usize) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::InvalidArgument(format!("volume constant must be positive, got {c}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("probe count must be at least 1".into()));
    }
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    Ok(4.0 * c * c * pi2 / (27.0 * (n * n) as f64))
}

/// Mean-squared-error floor `2 D^2 pi^2 / (27 N)` when the region volume
/// obeys a `D / sqrt(N)` floor.
pub fn shotnoise_mse_bound(d: f64, n: usize) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::InvalidArgument(format!("volume constant must be positive, got {d}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("probe count must be at least 1".into()));
    }
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    Ok(2.0 * d * d * pi2 / (27.0 * n as f64))
}

fn binary_entropy(p: f64) -> f64 {
    entropy_of_spectrum(&[p, 1.0 - p]).expect("probabilities lie in [0, 1]")
}

/// Average-volume floor from a conditional entropy: any estimator that
/// succeeds with probability `p_succ` over a parameter space of volume
/// `volume_x` must report regions of average volume at least
/// `exp((h_cond - h(p_succ) - (1 - p_succ) ln(volume_x)) / p_succ)`.
pub fn entropic_region_bound(h_cond: f64, p_succ: f64, volume_x: f64) -> Result<f64> {
    if !(p_succ > 0.0 && p_succ <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "success probability must lie in (0, 1], got {p_succ}"
        )));
    }
    if !(volume_x > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "parameter-space volume must be positive, got {volume_x}"
        )));
    }
    Ok(((h_cond - binary_entropy(p_succ) - (1.0 - p_succ) * volume_x.ln()) / p_succ).exp())
}

/// Mean-squared-error floor `e^{2 h_cond} / (16 sqrt(2) pi)` for circular
/// phase estimation with conditional entropy `h_cond`.
pub fn entropic_mse_bound_circle(h_cond: f64) -> f64 {
    (2.0 * h_cond).exp() / (16.0 * std::f64::consts::SQRT_2 * std::f64::consts::PI)
}

/// Region-volume floor `p^3 / (8 E + 2 p^2)` for probes of mean energy at
/// most `E` (in generator units) detected with probability `p`.
pub fn energy_bounded_bound(energy: f64, p_succ: f64) -> Result<f64> {
    if !(energy >= 0.0) {
        return Err(Error::InvalidArgument(format!("energy must be nonnegative, got {energy}")));
    }
    if !(p_succ > 0.0 && p_succ <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "success probability must lie in (0, 1], got {p_succ}"
        )));
    }
    Ok(p_succ.powi(3) / (8.0 * energy + 2.0 * p_succ * p_succ))
}

/// Closed-form volume floor `alpha^{k+1} / (2 (2 sqrt(8 N) M + 1)^k)` for
/// `k`-round protocols on `N` sites with per-site weights bounded by `M`.
pub fn separable_analytic_bound(m: f64, k: usize, n: usize, alpha: f64) -> Result<f64> {
    if !(m >= 1.0) {
        return Err(Error::InvalidArgument(format!("weight cap must be at least 1, got {m}")));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("round count must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("site count must be at least 1".into()));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidAlpha { alpha, expected: "(0, 1]" });
    }
    let base = 2.0 * (8.0 * n as f64).sqrt() * m + 1.0;
    Ok(alpha.powi(k as i32 + 1) / (2.0 * base.powi(k as i32)))
}

/// Constructive truncation certificate: the window kept, its tail penalty,
/// and the resulting volume floor `(alpha - tail) / window`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparableCertificate {
    /// Volume floor; `0` when no window is feasible.
    pub value: f64,
    /// Whether some window met the tail condition `sqrt(1 - mass) <= alpha / 2`.
    pub feasible: bool,
    /// Number of distinct weights kept by the best window.
    pub window: usize,
    /// Truncation penalty `sqrt(1 - mass)` of the best window.
    pub tail: f64,
}

/// Best centred-window truncation bound for a weight distribution.
///
/// Windows grow outward from the distribution mean one weight at a time
/// (ties prefer the lower weight, for determinism).  A window of mass `q`
/// keeping `J'` weights certifies a volume floor `(alpha - sqrt(1-q)) / J'`
/// whenever `sqrt(1-q) <= alpha/2`; the best feasible window wins.
fn window_certificate(masses: &[(i64, f64)], alpha: f64) -> SeparableCertificate {
    let support: Vec<(i64, f64)> = masses
        .iter()
        .copied()
        .filter(|(_, p)| *p > crate::constants::WEIGHT_MASS_TOL)
        .collect();
    let mean: f64 = support.iter().map(|(w, p)| *w as f64 * p).sum::<f64>()
        / support.iter().map(|(_, p)| p).sum::<f64>();
    let mut order = support;
    order.sort_by(|a, b| {
        let da = (a.0 as f64 - mean).abs();
        let db = (b.0 as f64 - mean).abs();
        da.partial_cmp(&db).unwrap().then(a.0.cmp(&b.0))
    });
    let mut best = SeparableCertificate { value: 0.0, feasible: false, window: 0, tail: 1.0 };
    let mut mass = 0.0;
    for (count, (_, p)) in order.iter().enumerate() {
        mass += p;
        let tail = (1.0 - mass).max(0.0).sqrt();
        if tail <= alpha / 2.0 {
            let value = (alpha - tail) / (count + 1) as f64;
            if !best.feasible || value > best.value {
                best = SeparableCertificate { value, feasible: true, window: count + 1, tail };
            }
        }
    }
    best
}

/// Volume floor for a product of `N` single-qubit sites, built by truncating
/// the total-weight distribution to its best centred window.
///
/// `sites` follows [`product_state`]: one amplitude pair replicated across
/// all sites, or exactly `N` pairs.
pub fn separable_certificate(
    sites: &[(Complex64, Complex64)],
    n: usize,
    alpha: f64,
) -> Result<SeparableCertificate> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidAlpha { alpha, expected: "(0, 1)" });
    }
    let probe = product_state(sites, n)?;
    Ok(window_certificate(&probe.weight_masses(), alpha))
}

/// Volume floor for the nonlinear coupling `J_z (x) sigma_z` on `N` product
/// probes plus one auxiliary qubit.
///
/// The final pair in `sites` is the auxiliary site; the preceding pairs feed
/// [`product_state`] for the probes (one pair replicated, or exactly `N`).
/// The joint weight of total probe weight `W` and auxiliary sign `z` is
/// `W z`, so the joint distribution is `r_v = p_+ q_v + p_- q_{-v}`; the same
/// centred-window certificate then applies.
pub fn nonlinear_example_bound(
    sites: &[(Complex64, Complex64)],
    n: usize,
    alpha: f64,
) -> Result<SeparableCertificate> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidAlpha { alpha, expected: "(0, 1)" });
    }
    let (aux, probes) = sites
        .split_last()
        .ok_or_else(|| Error::InvalidArgument("need probe sites plus an auxiliary site".into()))?;
    if probes.is_empty() {
        return Err(Error::InvalidArgument("need at least one probe site".into()));
    }
    let (a, b) = *aux;
    let pa = a.norm_sqr();
    let pb = b.norm_sqr();
    if ((pa + pb).sqrt() - 1.0).abs() > crate::constants::AMPLITUDE_NORM_TOL {
        return Err(Error::InvalidState(format!(
            "auxiliary site has norm {:.12}, expected 1",
            (pa + pb).sqrt()
        )));
    }
    let q = product_state(probes, n)?.weight_masses();
    // Weight lattice -N..N step 2 is symmetric, so -v sits at the mirrored index.
    let len = q.len();
    let joint: Vec<(i64, f64)> = (0..len)
        .map(|i| (q[i].0, pb * q[i].1 + pa * q[len - 1 - i].1))
        .collect();
    Ok(window_certificate(&joint, alpha))
}

/// The three average-volume floors for a probe at detection level `alpha`:
/// the bound at a fixed parameter point, the parameter-averaged bound, and
/// the truncation route through the invariant-state machinery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AvgVolumeBounds {
    /// Floor at a fixed parameter point: `beta_alpha(rho, dephase(rho))`.
    pub at_x: f64,
    /// Floor on the parameter average; equals `at_x` for covariant families.
    pub averaged: f64,
    /// Floor `eps * (invariant bound at alpha - eps)` from sacrificing `eps`
    /// of detection probability.
    pub truncation: f64,
}

/// Average-volume floors with the default detection sacrifice `eps = alpha/2`.
pub fn avg_volume_bounds(psi: &ProbeState, alpha: f64) -> Result<AvgVolumeBounds> {
    avg_volume_bounds_with(psi, alpha, alpha / 2.0)
}

/// Average-volume floors with an explicit detection sacrifice `eps`.
pub fn avg_volume_bounds_with(psi: &ProbeState, alpha: f64, eps: f64) -> Result<AvgVolumeBounds> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidAlpha { alpha, expected: "(0, 1]" });
    }
    if !(eps > 0.0 && eps < alpha) {
        return Err(Error::InvalidArgument(format!(
            "detection sacrifice must lie in (0, alpha), got {eps}"
        )));
    }
    let dephased = dephase(psi.state(), psi.generator())?;
    let at_x = beta(psi.state(), dephased.operator(), alpha)?.value;
    let bracket: BoundBracket = invariant_bound(psi, alpha - eps)?;
    Ok(AvgVolumeBounds { at_x, averaged: at_x, truncation: eps * bracket.lower })
}

/// Power-law fit `y = constant * x^slope` of positive samples, with the
/// log-log coefficient of determination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    pub constant: f64,
    pub slope: f64,
    pub r2: f64,
}

/// Least-squares power-law fit through `(x, y)` samples.
pub fn scaling_fit(points: &[(f64, f64)]) -> Result<ScalingFit> {
    let (slope, r2) = scaling_exponent(points)?;
    let n = points.len() as f64;
    let mean_lx = points.iter().map(|(x, _)| x.ln()).sum::<f64>() / n;
    let mean_ly = points.iter().map(|(_, y)| y.ln()).sum::<f64>() / n;
    Ok(ScalingFit { constant: (mean_ly - slope * mean_lx).exp(), slope, r2 })
}
