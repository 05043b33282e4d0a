//! Optimal binary hypothesis tests with primal and dual certificates.
//!
//! The primal program is
//!
//! ```text
//!   beta_alpha(rho, sigma) = inf { <sigma, E> : 0 <= E <= 1, <rho, E> >= alpha },
//! ```
//!
//! where `sigma` is positive semidefinite but need not be normalized.  Its
//! Lagrange dual is
//!
//! ```text
//!   sup { alpha mu - tr tau : mu >= 0, tau >= 0, tau >= mu rho - sigma },
//! ```
//!
//! and the two values coincide.  The solver bisects on the threshold `mu`:
//! at each probe it splits the spectrum of `mu rho - sigma` into a strictly
//! positive part, a kernel band (eigenvalues within [`NP_KERNEL_TOL`] of
//! zero), and the rest.  The optimal test takes the positive part whole and
//! fills the kernel band with a uniform fractional weight so the detection
//! probability hits `alpha` exactly; the pair `(mu, {mu rho - sigma}_+)` is
//! the matching dual certificate.  For `alpha = 1` the optimum is the support
//! projector of `rho`; the dual supremum may then only be approached in the
//! `mu -> inf` limit, in which case the reported gap is the best certified
//! one rather than zero.

use crate::constants::{
    DENSITY_EIG_TOL, NP_KERNEL_TOL, NP_MAX_BISECTIONS, SUPPORT_TOL, TEST_EIG_TOL,
};
use crate::error::{Error, Result};
use crate::numerics::{
    eigh, quadratic_form, relative_entropy, von_neumann_entropy, DensityMatrix, EigenSystem,
    HermitianOperator,
};
use crate::states::{dephase, ProbeState};

/// Largest threshold explored while bracketing the bisection.
const MU_DOUBLING_CAP: f64 = 1e9;
/// Largest threshold for which a dual certificate is materialized; beyond
/// this, eigenvalue roundoff would exceed the certificate tolerance.
const MU_CERTIFICATE_CAP: f64 = 65536.0;

/// Measurement effect: Hermitian with spectrum inside `[0, 1]` within
/// [`TEST_EIG_TOL`].
#[derive(Debug, Clone)]
pub struct TestOperator {
    op: HermitianOperator,
}

impl TestOperator {
    pub fn try_new(op: HermitianOperator) -> Result<Self> {
        let eig = eigh(&op)?;
        let min = *eig.eigenvalues.first().expect("nonempty spectrum");
        let max = *eig.eigenvalues.last().expect("nonempty spectrum");
        if min < -TEST_EIG_TOL || max > 1.0 + TEST_EIG_TOL {
            return Err(Error::InvalidArgument(format!(
                "test operator spectrum [{min:.3e}, {max:.3e}] escapes [0, 1]"
            )));
        }
        Ok(Self { op })
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }
}

/// Dual feasible pair `(mu, tau)` certifying `beta >= alpha mu - tr tau`.
#[derive(Debug, Clone)]
pub struct DualCertificate {
    pub mu: f64,
    pub tau: HermitianOperator,
}

impl DualCertificate {
    /// Certified dual objective `alpha mu - tr tau`.
    pub fn objective(&self, alpha: f64) -> f64 {
        alpha * self.mu - self.tau.trace()
    }

    /// Smallest eigenvalue of `tau - (mu rho - sigma)`; feasibility demands
    /// this be `>= -`[`crate::constants::DUAL_FEASIBILITY_TOL`].
    pub fn domination_margin(
        &self,
        rho: &DensityMatrix,
        sigma: &HermitianOperator,
    ) -> Result<f64> {
        let shifted = self
            .tau
            .linear_comb(1.0, rho.operator(), -self.mu)?
            .linear_comb(1.0, sigma, 1.0)?;
        shifted.min_eigenvalue()
    }
}

/// Solved hypothesis test: optimal value with both certificates attached.
#[derive(Debug, Clone)]
pub struct BetaResult {
    pub alpha: f64,
    /// `<sigma, E>` of the returned test.
    pub value: f64,
    /// `<rho, E>` of the returned test (>= `alpha` up to roundoff).
    pub achieved_alpha: f64,
    pub test: TestOperator,
    pub dual: DualCertificate,
    /// `value - (alpha mu - tr tau)`, clamped at zero against roundoff.
    pub gap: f64,
}

/// Spectrum probe of `mu rho - sigma` at a fixed threshold.
struct Probe {
    mu: f64,
    eig: EigenSystem,
    /// Detection probability of the strictly positive eigenspace.
    strict_mass: f64,
    /// Additional probability available from the kernel band.
    kernel_mass: f64,
    /// `tr {mu rho - sigma}_+`.
    pos_trace: f64,
}

impl Probe {
    fn at(mu: f64, rho: &DensityMatrix, sigma: &HermitianOperator) -> Result<Self> {
        let m = rho.operator().linear_comb(mu, sigma, -1.0)?;
        let eig = eigh(&m)?;
        let n = eig.eigenvalues.len();
        let mut strict_mass = 0.0;
        let mut kernel_mass = 0.0;
        let mut pos_trace = 0.0;
        for i in 0..n {
            let lambda = eig.eigenvalues[i];
            if lambda > 0.0 {
                pos_trace += lambda;
            }
            if lambda >= -NP_KERNEL_TOL {
                let mass = quadratic_form(rho.matrix(), &eig.eigenvector(i));
                if lambda > NP_KERNEL_TOL {
                    strict_mass += mass;
                } else {
                    kernel_mass += mass;
                }
            }
        }
        Ok(Self { mu, eig, strict_mass, kernel_mass, pos_trace })
    }

    fn dual_value(&self, alpha: f64) -> f64 {
        alpha * self.mu - self.pos_trace
    }

    /// Positive part `{mu rho - sigma}_+` as the dual `tau`.
    fn tau(&self) -> HermitianOperator {
        self.eig.apply_spectral(|l| if l > 0.0 { l } else { 0.0 })
    }

    /// Test = positive eigenspace plus uniform fraction `gamma` on the kernel band.
    fn test_with_fill(&self, gamma: f64) -> HermitianOperator {
        self.eig.apply_spectral(|l| {
            if l > NP_KERNEL_TOL {
                1.0
            } else if l >= -NP_KERNEL_TOL {
                gamma
            } else {
                0.0
            }
        })
    }
}

fn validate_beta_inputs(
    rho: &DensityMatrix,
    sigma: &HermitianOperator,
    alpha: f64,
) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { left: rho.dim(), right: sigma.dim() });
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidAlpha { alpha, expected: "[0, 1]" });
    }
    let min = sigma.min_eigenvalue()?;
    if min < -DENSITY_EIG_TOL.max(TEST_EIG_TOL) {
        return Err(Error::InvalidState(format!(
            "sigma has negative eigenvalue {min:.3e}"
        )));
    }
    Ok(())
}

fn finish(
    rho: &DensityMatrix,
    sigma: &HermitianOperator,
    alpha: f64,
    test_op: HermitianOperator,
    dual: DualCertificate,
) -> Result<BetaResult> {
    let value = sigma.expectation(&test_op)?;
    let achieved_alpha = rho.expectation(&test_op)?;
    let gap = (value - dual.objective(alpha)).max(0.0);
    Ok(BetaResult { alpha, value, achieved_alpha, test: TestOperator::try_new(test_op)?, dual, gap })
}

/// Optimal type-II error with certificates.
///
/// `sigma` must be positive semidefinite; it may be unnormalized.  The
/// bisection runs until a threshold whose kernel band straddles `alpha` is
/// found or the threshold interval collapses at float resolution, capped at
/// [`NP_MAX_BISECTIONS`] probes; the result always reports the actually
/// certified gap.
pub fn beta(rho: &DensityMatrix, sigma: &HermitianOperator, alpha: f64) -> Result<BetaResult> {
    validate_beta_inputs(rho, sigma, alpha)?;
    let n = rho.dim();

    if alpha <= 0.0 {
        let dual = DualCertificate { mu: 0.0, tau: HermitianOperator::zeros(n) };
        return finish(rho, sigma, alpha, HermitianOperator::zeros(n), dual);
    }

    // mu = 0 hands out the kernel of sigma for free.
    let base = Probe::at(0.0, rho, sigma)?;
    if alpha <= base.strict_mass + base.kernel_mass {
        let gamma = if base.kernel_mass > 0.0 {
            ((alpha - base.strict_mass) / base.kernel_mass).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let dual = DualCertificate { mu: 0.0, tau: base.tau() };
        return finish(rho, sigma, alpha, base.test_with_fill(gamma), dual);
    }

    // At alpha = 1 the optimum is the support projector of rho; the threshold
    // sweep below would chase it into mu -> inf, so branch out directly.
    if alpha >= 1.0 - 1e-12 {
        return support_route(rho, sigma, alpha);
    }

    // Bracket: grow mu until the reachable mass covers alpha.
    let mut lo = base;
    let mut hi_mu = 1.0;
    let mut hi: Option<Probe> = None;
    while hi_mu <= MU_DOUBLING_CAP {
        let probe = Probe::at(hi_mu, rho, sigma)?;
        if probe.strict_mass + probe.kernel_mass >= alpha {
            hi = Some(probe);
            break;
        }
        lo = probe;
        hi_mu *= 2.0;
    }
    let Some(mut hi) = hi else {
        // alpha is (numerically) 1: fall back to the support projector.
        return support_route(rho, sigma, alpha);
    };

    let mut best_primal: Option<(f64, HermitianOperator)> = None;
    let mut best_dual: Option<(f64, Probe)> = None;
    let consider_dual = |probe: Probe, best: &mut Option<(f64, Probe)>| {
        let v = probe.dual_value(alpha);
        if best.as_ref().map_or(true, |(bv, _)| v > *bv) {
            *best = Some((v, probe));
        }
    };

    for _ in 0..NP_MAX_BISECTIONS {
        // The hi probe can already be exact: its kernel band straddles alpha.
        if hi.strict_mass <= alpha {
            let gamma = if hi.kernel_mass > 0.0 {
                ((alpha - hi.strict_mass) / hi.kernel_mass).clamp(0.0, 1.0)
            } else {
                1.0
            };
            let test_op = hi.test_with_fill(gamma);
            let dual = DualCertificate { mu: hi.mu, tau: hi.tau() };
            return finish(rho, sigma, alpha, test_op, dual);
        }
        // hi overshoots: its strict part alone is feasible.
        let primal_here = sigma.expectation(&hi.test_with_fill(0.0))?;
        if best_primal.as_ref().map_or(true, |(v, _)| primal_here < *v) {
            best_primal = Some((primal_here, hi.test_with_fill(0.0)));
        }
        let mid = 0.5 * (lo.mu + hi.mu);
        if mid <= lo.mu || mid >= hi.mu {
            break; // interval exhausted at float resolution
        }
        let probe = Probe::at(mid, rho, sigma)?;
        if probe.strict_mass + probe.kernel_mass < alpha {
            consider_dual(std::mem::replace(&mut lo, probe), &mut best_dual);
        } else {
            consider_dual(std::mem::replace(&mut hi, probe), &mut best_dual);
        }
    }
    consider_dual(hi, &mut best_dual);
    consider_dual(lo, &mut best_dual);
    let (_, test_op) = best_primal.expect("bisection recorded a feasible primal");
    let (_, dual_probe) = best_dual.expect("bisection recorded a dual probe");
    let dual = DualCertificate { mu: dual_probe.mu, tau: dual_probe.tau() };
    finish(rho, sigma, alpha, test_op, dual)
}

/// `alpha = 1` route: the unique optimal test is the support projector of
/// `rho`; the dual is maximized by a concave line search capped where the
/// certificate stays numerically verifiable.
fn support_route(
    rho: &DensityMatrix,
    sigma: &HermitianOperator,
    alpha: f64,
) -> Result<BetaResult> {
    let eig_rho = eigh(rho.operator())?;
    let support = eig_rho.apply_spectral(|l| if l > SUPPORT_TOL { 1.0 } else { 0.0 });
    // Stable dual objective: alpha mu - tr{mu rho - sigma}_+
    //   = tr sigma - tr{sigma - mu rho}_+ - (1 - alpha) mu.
    let tr_sigma = sigma.trace();
    let dual_at = |mu: f64| -> Result<f64> {
        let m = sigma.linear_comb(1.0, rho.operator(), -mu)?;
        let eig = eigh(&m)?;
        let pos: f64 = eig.eigenvalues.iter().filter(|l| **l > 0.0).sum();
        Ok(tr_sigma - pos - (1.0 - alpha) * mu)
    };
    // Golden-section search on the concave dual over [0, cap].
    let inv_phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let (mut a, mut b) = (0.0f64, MU_CERTIFICATE_CAP);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = dual_at(x1)?;
    let mut f2 = dual_at(x2)?;
    for _ in 0..90 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = dual_at(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = dual_at(x1)?;
        }
    }
    let mu = if f1 >= f2 { x1 } else { x2 };
    let probe = Probe::at(mu, rho, sigma)?;
    let dual = DualCertificate { mu, tau: probe.tau() };
    finish(rho, sigma, alpha, support, dual)
}

/// Classical restriction: likelihood-ratio test over probability vectors.
#[derive(Debug, Clone)]
pub struct ClassicalBeta {
    pub value: f64,
    /// Per-outcome acceptance probabilities in `[0, 1]`.
    pub test: Vec<f64>,
}

/// Minimal `<q, E>` over vectors `0 <= E <= 1` with `<p, E> >= alpha`.
///
/// Outcomes are taken in decreasing likelihood-ratio order `p_i / q_i`
/// (ties broken by index), with the boundary outcome weighted fractionally
/// so the detection probability meets `alpha` exactly.  `q` may be
/// unnormalized.
pub fn beta_classical(p: &[f64], q: &[f64], alpha: f64) -> Result<ClassicalBeta> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch { left: p.len(), right: q.len() });
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidAlpha { alpha, expected: "[0, 1]" });
    }
    let sum_p: f64 = p.iter().sum();
    if p.iter().any(|x| *x < -1e-12) || (sum_p - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!(
            "p must be a probability vector (sum = {sum_p:.12})"
        )));
    }
    if q.iter().any(|x| *x < 0.0) {
        return Err(Error::InvalidDistribution("q must be entrywise nonnegative".into()));
    }
    let n = p.len();
    let ratio = |i: usize| -> f64 {
        if q[i] > 0.0 {
            p[i] / q[i]
        } else if p[i] > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| ratio(j).partial_cmp(&ratio(i)).expect("finite ratios").then(i.cmp(&j)));
    let mut test = vec![0.0; n];
    let mut cum = 0.0;
    for &i in &order {
        if cum >= alpha || p[i] <= 0.0 {
            if cum >= alpha {
                break;
            }
            continue;
        }
        let take = ((alpha - cum) / p[i]).min(1.0);
        test[i] = take;
        cum += p[i] * take;
    }
    let value = test.iter().zip(q.iter()).map(|(e, qi)| e * qi).sum();
    Ok(ClassicalBeta { value, test })
}

/// Exact rank-one solution of the hypothesis test for a pure state against a
/// diagonal alternative (both in the same basis).
///
/// The operator `mu |psi><psi| - diag(s)` has at most one positive
/// eigenvalue, so the optimal test is a single direction `v` (plus a
/// fractional weight when the direction sits exactly on the kernel):
/// parametrizing by the top eigenvalue `lambda` gives closed-form sums and a
/// one-dimensional root-find.  `s` must be strictly positive wherever the
/// state has mass; `q` holds `|psi_j|^2`.
#[derive(Debug, Clone)]
pub(crate) struct PureDiagBeta {
    pub value: f64,
    /// Weight on the rank-one direction (1 unless the kernel case is active).
    pub gamma: f64,
    /// Unit direction magnitudes; phases follow the state's amplitudes.
    pub direction: Vec<f64>,
}

pub(crate) fn beta_pure_diag(q: &[f64], s: &[f64], alpha: f64) -> PureDiagBeta {
    debug_assert_eq!(q.len(), s.len());
    debug_assert!(q.iter().zip(s.iter()).all(|(qi, si)| *qi <= 0.0 || *si > 0.0));
    let n = q.len();
    if alpha <= 0.0 {
        return PureDiagBeta { value: 0.0, gamma: 0.0, direction: vec![0.0; n] };
    }
    // Sums T(lambda) = sum q/(s+lambda), R(lambda) = sum q/(s+lambda)^2,
    // and the detection probability A(lambda) = T^2 / R, increasing in lambda.
    let sums = |lambda: f64| -> (f64, f64) {
        let mut t = 0.0;
        let mut r = 0.0;
        for j in 0..n {
            if q[j] > 0.0 {
                let d = s[j] + lambda;
                t += q[j] / d;
                r += q[j] / (d * d);
            }
        }
        (t, r)
    };
    let (t0, r0) = sums(0.0);
    let a0 = t0 * t0 / r0;
    let direction_at = |lambda: f64| -> Vec<f64> {
        let mut v: Vec<f64> = (0..n)
            .map(|j| if q[j] > 0.0 { q[j].sqrt() / (s[j] + lambda) } else { 0.0 })
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in &mut v {
            *x /= norm;
        }
        v
    };

    if alpha <= a0 {
        // Fractional weight on the zero-eigenvalue direction of (rho/T - sigma).
        let gamma = (alpha / a0).min(1.0);
        return PureDiagBeta { value: alpha / t0, gamma, direction: direction_at(0.0) };
    }

    if alpha >= 1.0 {
        // Detection probability 1 forces the test to contain |psi><psi|.
        let value: f64 = q.iter().zip(s.iter()).map(|(qi, si)| qi * si).sum();
        let direction: Vec<f64> = q.iter().map(|qi| qi.sqrt()).collect();
        return PureDiagBeta { value, gamma: 1.0, direction };
    }

    // Solve A(lambda) = alpha on lambda > 0 by bisection.
    let a_of = |lambda: f64| -> f64 {
        let (t, r) = sums(lambda);
        t * t / r
    };
    let mut lo = 0.0;
    let mut hi = s.iter().cloned().fold(1.0, f64::max);
    while a_of(hi) < alpha {
        hi *= 2.0;
        if hi > 1e18 {
            break;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if a_of(mid) < alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda = hi;
    let (_, r) = sums(lambda);
    let v = direction_at(lambda);
    let value: f64 = (0..n)
        .map(|j| if q[j] > 0.0 { s[j] * q[j] / ((s[j] + lambda) * (s[j] + lambda)) } else { 0.0 })
        .sum::<f64>()
        / r;
    PureDiagBeta { value, gamma: 1.0, direction: v }
}

/// Binary relative entropy `d(p || q)` in nats, with the usual conventions
/// at the boundary (`0 ln 0 = 0`, finite iff the supports nest).
pub fn binary_relative_entropy(p: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidArgument(format!(
            "binary relative entropy needs p, q in [0, 1], got ({p}, {q})"
        )));
    }
    let mut d = 0.0;
    if p > 0.0 {
        if q == 0.0 {
            return Ok(f64::INFINITY);
        }
        d += p * (p / q).ln();
    }
    let (pc, qc) = (1.0 - p, 1.0 - q);
    if pc > 0.0 {
        if qc == 0.0 {
            return Ok(f64::INFINITY);
        }
        d += pc * (pc / qc).ln();
    }
    Ok(d)
}

/// Conditional entropy of the parameter given the quantum memory, for a
/// covariant estimation family with a flat prior over a parameter range of
/// measure `volume`:
/// `ln(volume) + S(rho) - S(dephased rho)`.
pub fn conditional_entropy_covariant(psi: &ProbeState, volume: f64) -> Result<f64> {
    if volume <= 0.0 {
        return Err(Error::InvalidArgument(format!("volume must be positive, got {volume}")));
    }
    let s_rho = von_neumann_entropy(psi.state())?;
    let pinched = dephase(psi.state(), psi.generator())?;
    let s_pinched = von_neumann_entropy(&pinched)?;
    Ok(volume.ln() + s_rho - s_pinched)
}

/// Slack in the data-processing inequality relating relative entropy to
/// hypothesis testing:
/// `D(rho || sigma) - [ d(alpha || beta_alpha / tr sigma) - ln tr sigma ]`.
///
/// Always `>= 0` up to solver roundoff; `+inf` when `D` diverges.
pub fn dpi_deficit(rho: &DensityMatrix, sigma: &HermitianOperator, alpha: f64) -> Result<f64> {
    let d = relative_entropy(rho, sigma)?;
    if d.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let res = beta(rho, sigma, alpha)?;
    let tr_sigma = sigma.trace();
    if tr_sigma <= 0.0 {
        return Err(Error::InvalidState("sigma has nonpositive trace".into()));
    }
    let ratio = (res.value / tr_sigma).clamp(0.0, 1.0);
    let rhs = binary_relative_entropy(alpha, ratio)? - tr_sigma.ln();
    Ok(d - rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::NP_GAP_TOL;
    use crate::numerics::tests::{random_density, random_hermitian};
    use crate::numerics::{positive_part, trace_distance, ComplexMatrix};
    use num_complex::Complex64;
    use crate::states::{ghz, plus_power, sine_state, uniform_phase_state, U1Generator};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_psd(rng: &mut ChaCha8Rng, n: usize, trace: f64) -> HermitianOperator {
        let d = random_density(rng, n);
        d.operator().linear_comb(trace, &HermitianOperator::zeros(n), 0.0).unwrap()
    }

    fn pure_ground(n: usize) -> DensityMatrix {
        let mut v = vec![c(0.0, 0.0); n];
        v[0] = c(1.0, 0.0);
        DensityMatrix::from_pure(&v).unwrap()
    }

    #[test]
    fn beta_projector_against_maximally_mixed() {
        let rho = pure_ground(2);
        let sigma = HermitianOperator::from_diag(&[0.5, 0.5]);
        let res = beta(&rho, &sigma, 0.9).unwrap();
        assert!((res.value - 0.45).abs() < 1e-10, "value {}", res.value);
        assert!(res.gap <= NP_GAP_TOL);
        assert!(res.achieved_alpha >= 0.9 - 1e-9);
    }

    #[test]
    fn beta_matches_two_dim_brute_force() {
        // Brute force over parameterized 2x2 tests E = e1 P + e2 (1 - P) for the
        // ground state against the maximally mixed alternative at alpha = 0.9.
        let alpha = 0.9;
        let mut best = f64::INFINITY;
        let steps = 60;
        for i in 0..=steps {
            for j in 0..=steps {
                for t in 0..=steps {
                    for ph in 0..4 {
                        let e1 = i as f64 / steps as f64;
                        let e2 = j as f64 / steps as f64;
                        let theta = std::f64::consts::PI * t as f64 / steps as f64;
                        let phi = std::f64::consts::FRAC_PI_2 * ph as f64;
                        let (ct, st) = (theta.cos(), theta.sin());
                        let u00 = c(ct, 0.0);
                        let u01 = -c(st, 0.0) * c(phi.cos(), -phi.sin());
                        let u10 = c(st, 0.0) * c(phi.cos(), phi.sin());
                        let u11 = c(ct, 0.0);
                        // E = e1 * col0 col0^dag + e2 * col1 col1^dag
                        let det = |a: Complex64, b: Complex64| {
                            ComplexMatrix::from_rows(
                                2,
                                vec![
                                    a * a.conj() * e1 + b * b.conj() * e2,
                                    a * u10.conj() * e1 + b * u11.conj() * e2,
                                    u10 * a.conj() * e1 + u11 * b.conj() * e2,
                                    u10 * u10.conj() * e1 + u11 * u11.conj() * e2,
                                ],
                            )
                            .unwrap()
                        };
                        let e = det(u00, u01);
                        let acc = e.get(0, 0).re;
                        if acc >= alpha {
                            let cost = 0.5 * (e.get(0, 0).re + e.get(1, 1).re);
                            best = best.min(cost);
                        }
                    }
                }
            }
        }
        assert!((best - 0.45).abs() < 5e-3, "grid best {best}");
    }

    #[test]
    fn beta_self_test_returns_alpha() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for alpha in [0.2, 0.5, 0.85] {
            let rho = random_density(&mut rng, 4);
            let res = beta(&rho, rho.operator(), alpha).unwrap();
            assert!((res.value - alpha).abs() < 1e-9);
            assert!(res.gap <= NP_GAP_TOL);
            // The optimal test is alpha times the identity on the kernel rule.
            let dev = res
                .test
                .operator()
                .linear_comb(1.0, &HermitianOperator::identity(4), -alpha)
                .unwrap()
                .matrix()
                .max_abs_entry();
            assert!(dev < 1e-8);
        }
    }

    #[test]
    fn beta_zero_alpha_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let rho = random_density(&mut rng, 3);
        let sigma = random_psd(&mut rng, 3, 0.7);
        let res = beta(&rho, &sigma, 0.0).unwrap();
        assert_eq!(res.value, 0.0);
        assert_eq!(res.gap, 0.0);
    }

    #[test]
    fn beta_dephased_ghz_reference() {
        let g = ghz(3).unwrap();
        let pinched = crate::states::dephase(g.state(), g.generator()).unwrap();
        let res = beta(g.state(), pinched.operator(), 0.9).unwrap();
        assert!((res.value - 0.45).abs() < 1e-9, "value {}", res.value);
    }

    #[test]
    fn beta_disjoint_supports_vanishes() {
        let rho = pure_ground(2);
        let sigma = HermitianOperator::from_diag(&[0.0, 1.0]);
        for alpha in [0.3, 0.9, 1.0] {
            let res = beta(&rho, &sigma, alpha).unwrap();
            assert!(res.value.abs() < 1e-12);
        }
    }

    #[test]
    fn beta_alpha_one_support_route() {
        // rho = |+><+|, sigma = |0><0|: beta_1 = 1/2, dual approached only in the limit.
        let plus = DensityMatrix::from_pure(&[c(0.5f64.sqrt(), 0.0), c(0.5f64.sqrt(), 0.0)]).unwrap();
        let sigma = HermitianOperator::from_diag(&[1.0, 0.0]);
        let res = beta(&plus, &sigma, 1.0).unwrap();
        assert!((res.value - 0.5).abs() < 1e-10, "value {}", res.value);
        assert!(res.achieved_alpha >= 1.0 - 1e-9);
        // The dual is legitimate even though the gap cannot reach 1e-8 here.
        let margin = res.dual.domination_margin(&plus, &sigma).unwrap();
        assert!(margin >= -1e-8, "margin {margin:.3e}");
        assert!(res.gap < 1e-4, "gap {:.3e}", res.gap);
    }

    #[test]
    fn beta_certificates_are_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..20 {
            let n = [2usize, 3, 5, 8][rng.gen_range(0..4)];
            let rho = random_density(&mut rng, n);
            let tr = rng.gen_range(0.5..2.0);
            let sigma = random_psd(&mut rng, n, tr);
            let alpha = rng.gen_range(0.05..0.95);
            let res = beta(&rho, &sigma, alpha).unwrap();
            assert!(res.gap <= NP_GAP_TOL, "gap {:.3e}", res.gap);
            assert!(res.achieved_alpha >= alpha - 1e-9);
            let margin = res.dual.domination_margin(&rho, &sigma).unwrap();
            assert!(margin >= -1e-8, "margin {margin:.3e}");
            assert!(res.dual.tau.min_eigenvalue().unwrap() >= -1e-9);
            assert!(res.dual.mu >= 0.0);
        }
    }

    #[test]
    fn beta_monotone_and_convex_in_alpha() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let rho = random_density(&mut rng, 5);
        let sigma = random_psd(&mut rng, 5, 1.0);
        let alphas: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0 * 0.95).collect();
        let values: Vec<f64> = alphas.iter().map(|a| beta(&rho, &sigma, *a).unwrap().value).collect();
        for w in values.windows(2) {
            assert!(w[1] >= w[0] - 1e-9, "not monotone: {w:?}");
        }
        for i in 1..values.len() - 1 {
            let chord = 0.5 * (values[i - 1] + values[i + 1]);
            assert!(values[i] <= chord + 1e-8, "not convex at {i}");
        }
    }

    #[test]
    fn beta_concave_in_sigma() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        for _ in 0..6 {
            let rho = random_density(&mut rng, 4);
            let s1 = random_psd(&mut rng, 4, 1.0);
            let s2 = random_psd(&mut rng, 4, 1.0);
            let mix = s1.linear_comb(0.5, &s2, 0.5).unwrap();
            let alpha = 0.8;
            let vmix = beta(&rho, &mix, alpha).unwrap().value;
            let v1 = beta(&rho, &s1, alpha).unwrap().value;
            let v2 = beta(&rho, &s2, alpha).unwrap().value;
            assert!(vmix >= 0.5 * (v1 + v2) - 1e-8);
        }
    }

    fn partial_trace_second(m: &ComplexMatrix, d1: usize, d2: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(d1, |i, j| {
            let mut acc = c(0.0, 0.0);
            for k in 0..d2 {
                acc += m.get(i * d2 + k, j * d2 + k);
            }
            acc
        })
    }

    #[test]
    fn beta_data_processing_under_pinching_and_partial_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        let gen = U1Generator::new(vec![-1, 0, 0, 2]).unwrap();
        for _ in 0..5 {
            let rho = random_density(&mut rng, 4);
            let sigma = random_psd(&mut rng, 4, 1.0);
            let alpha = 0.75;
            let base = beta(&rho, &sigma, alpha).unwrap().value;
            // Pinching both states cannot make discrimination easier.
            let rho_p = crate::states::dephase(&rho, &gen).unwrap();
            let sigma_p = crate::states::pinch_operator(&sigma, &gen).unwrap();
            let pinched = beta(&rho_p, &sigma_p, alpha).unwrap().value;
            assert!(pinched >= base - 1e-8);
            // Partial trace over a 2-dim factor likewise.
            let rho_r = DensityMatrix::new(
                HermitianOperator::try_new(partial_trace_second(rho.matrix(), 2, 2)).unwrap(),
            )
            .unwrap();
            let sigma_r =
                HermitianOperator::try_new(partial_trace_second(sigma.matrix(), 2, 2)).unwrap();
            let reduced = beta(&rho_r, &sigma_r, alpha).unwrap().value;
            assert!(reduced >= base - 1e-8);
        }
    }

    #[test]
    fn beta_smoothing_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..6 {
            let rho = random_density(&mut rng, 4);
            let other = random_density(&mut rng, 4);
            let eps = 0.03;
            let mixed = rho.operator().linear_comb(1.0 - eps, other.operator(), eps).unwrap();
            let rho2 = DensityMatrix::new(mixed).unwrap();
            let delta = trace_distance(&rho, &rho2).unwrap();
            let sigma = random_psd(&mut rng, 4, 1.0);
            let alpha = 0.7;
            let lhs = beta(&rho, &sigma, alpha + delta).unwrap().value;
            let rhs = beta(&rho2, &sigma, alpha).unwrap().value;
            assert!(lhs >= rhs - 1e-8, "smoothing violated: {lhs} < {rhs}");
        }
    }

    #[test]
    fn beta_pinching_lower_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(38);
        for n in [3usize, 5, 8] {
            let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..4)).collect();
            let gen = U1Generator::new(weights).unwrap();
            let amps: Vec<Complex64> = (0..n)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            let amps: Vec<Complex64> = amps.iter().map(|a| a / norm).collect();
            let rho = DensityMatrix::from_pure(&amps).unwrap();
            let pinched = crate::states::dephase(&rho, &gen).unwrap();
            let j = gen.block_count() as f64;
            for alpha in [0.3, 0.9] {
                let res = beta(&rho, pinched.operator(), alpha).unwrap();
                assert!(res.value >= alpha / j - 1e-9, "{} < {}", res.value, alpha / j);
            }
        }
    }

    #[test]
    fn beta_factorizes_over_a_shared_prior() {
        let mut rng = ChaCha8Rng::seed_from_u64(39);
        let rho = random_density(&mut rng, 3);
        let sigma = random_psd(&mut rng, 3, 1.0);
        let prior = [0.3, 0.7];
        let blockify = |m: &ComplexMatrix| {
            ComplexMatrix::from_fn(6, |i, j| {
                let (bi, ri) = (i / 3, i % 3);
                let (bj, rj) = (j / 3, j % 3);
                if bi == bj {
                    m.get(ri, rj) * prior[bi]
                } else {
                    c(0.0, 0.0)
                }
            })
        };
        let rho_big = DensityMatrix::new(HermitianOperator::try_new(blockify(rho.matrix())).unwrap()).unwrap();
        let sigma_big = HermitianOperator::try_new(blockify(sigma.matrix())).unwrap();
        let alpha = 0.8;
        let small = beta(&rho, &sigma, alpha).unwrap().value;
        let big = beta(&rho_big, &sigma_big, alpha).unwrap().value;
        assert!((small - big).abs() < 1e-7, "{small} vs {big}");
    }

    #[test]
    fn classical_likelihood_ratio_reference() {
        let res = beta_classical(&[0.9, 0.1], &[0.5, 0.5], 0.9).unwrap();
        assert!((res.value - 0.5).abs() < 1e-12);
        assert_eq!(res.test, vec![1.0, 0.0]);
        // Fractional boundary case.
        let res = beta_classical(&[0.6, 0.4], &[0.5, 0.5], 0.9).unwrap();
        assert!((res.value - 0.875).abs() < 1e-12);
        assert!((res.test[1] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn classical_matches_quantum_on_diagonals() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        for _ in 0..5 {
            let mut p: Vec<f64> = (0..4).map(|_| rng.gen_range(0.05..1.0)).collect();
            let sp: f64 = p.iter().sum();
            p.iter_mut().for_each(|x| *x /= sp);
            let q: Vec<f64> = (0..4).map(|_| rng.gen_range(0.05..0.5)).collect();
            let alpha = rng.gen_range(0.1..0.95);
            let cl = beta_classical(&p, &q, alpha).unwrap();
            let rho = DensityMatrix::new(HermitianOperator::from_diag(&p)).unwrap();
            let sigma = HermitianOperator::from_diag(&q);
            let qu = beta(&rho, &sigma, alpha).unwrap();
            assert!((cl.value - qu.value).abs() < 1e-8, "{} vs {}", cl.value, qu.value);
        }
    }

    #[test]
    fn pure_diag_solver_matches_general_beta() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..30 {
            let n = rng.gen_range(2..7);
            let amps: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
            let norm: f64 = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
            let q: Vec<f64> = amps.iter().map(|a| (a / norm) * (a / norm)).collect();
            let mut s: Vec<f64> = (0..n).map(|_| rng.gen_range(0.02..1.0)).collect();
            let ssum: f64 = s.iter().sum();
            s.iter_mut().for_each(|x| *x /= ssum);
            let alpha = rng.gen_range(0.05..1.0);
            let fast = beta_pure_diag(&q, &s, alpha);
            let psi: Vec<Complex64> = q.iter().map(|x| c(x.sqrt(), 0.0)).collect();
            let rho = DensityMatrix::from_pure(&psi).unwrap();
            let sigma = HermitianOperator::from_diag(&s);
            let slow = beta(&rho, &sigma, alpha).unwrap();
            assert!(
                (fast.value - slow.value).abs() < 1e-7,
                "n={n} alpha={alpha}: fast {} vs general {}",
                fast.value,
                slow.value
            );
        }
    }

    #[test]
    fn pure_diag_solver_closed_form_cases() {
        // Uniform state vs maximally mixed: alpha / J for feasible alpha.
        let j = 5usize;
        let q = vec![1.0 / j as f64; j];
        let s = vec![1.0 / j as f64; j];
        let res = beta_pure_diag(&q, &s, 0.9);
        assert!((res.value - 0.9 / j as f64).abs() < 1e-12);
        // Two-point state at alpha = 1: support expectation.
        let res = beta_pure_diag(&[0.9, 0.1], &[1.0, 0.0 + 1e-12], 1.0);
        assert!((res.value - 0.9).abs() < 1e-9);
    }

    #[test]
    fn binary_relative_entropy_conventions() {
        assert_eq!(binary_relative_entropy(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(binary_relative_entropy(1.0, 1.0).unwrap(), 0.0);
        assert!(binary_relative_entropy(0.5, 0.0).unwrap().is_infinite());
        assert!(binary_relative_entropy(0.5, 1.0).unwrap().is_infinite());
        let d = binary_relative_entropy(0.9, 0.45).unwrap();
        let manual = 0.9 * (0.9f64 / 0.45).ln() + 0.1 * (0.1f64 / 0.55).ln();
        assert!((d - manual).abs() < 1e-14);
        assert!(binary_relative_entropy(1.1, 0.5).is_err());
    }

    #[test]
    fn conditional_entropy_reference_values() {
        let two_pi = std::f64::consts::TAU;
        let g = ghz(4).unwrap();
        let h = conditional_entropy_covariant(&g, two_pi).unwrap();
        assert!((h - (two_pi.ln() - 2.0f64.ln())).abs() < 1e-9);
        let u = uniform_phase_state(6).unwrap();
        let h = conditional_entropy_covariant(&u, two_pi).unwrap();
        assert!((h - (two_pi.ln() - 7.0f64.ln())).abs() < 1e-9);
        // A single-weight state retains no phase information.
        let point = ProbeState::pure(vec![c(1.0, 0.0)], U1Generator::new(vec![3]).unwrap(), "point").unwrap();
        let h = conditional_entropy_covariant(&point, two_pi).unwrap();
        assert!((h - two_pi.ln()).abs() < 1e-12);
        assert!(conditional_entropy_covariant(&g, 0.0).is_err());
    }

    #[test]
    fn dpi_deficit_nonnegative_on_random_and_builtin() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..10 {
            let rho = random_density(&mut rng, 4);
            let tr = rng.gen_range(0.5..1.5);
            let sigma = random_psd(&mut rng, 4, tr);
            let alpha = rng.gen_range(0.1..0.95);
            let d = dpi_deficit(&rho, &sigma, alpha).unwrap();
            assert!(d >= -1e-7, "deficit {d:.3e}");
        }
        for state in [ghz(4).unwrap(), plus_power(4).unwrap(), sine_state(4).unwrap()] {
            let pinched = crate::states::dephase(state.state(), state.generator()).unwrap();
            let d = dpi_deficit(state.state(), pinched.operator(), 0.9).unwrap();
            assert!(d >= -1e-7, "{}: deficit {d:.3e}", state.label());
        }
    }

    #[test]
    fn beta_rejects_invalid_inputs() {
        let rho = pure_ground(2);
        let sigma = HermitianOperator::from_diag(&[0.5, 0.5]);
        assert!(matches!(beta(&rho, &sigma, 1.5), Err(Error::InvalidAlpha { .. })));
        assert!(matches!(beta(&rho, &sigma, -0.1), Err(Error::InvalidAlpha { .. })));
        let bad_sigma = HermitianOperator::from_diag(&[1.0, -0.5]);
        assert!(beta(&rho, &bad_sigma, 0.5).is_err());
        let wrong_dim = HermitianOperator::from_diag(&[1.0]);
        assert!(matches!(beta(&rho, &wrong_dim, 0.5), Err(Error::DimensionMismatch { .. })));
        assert!(beta_classical(&[0.5, 0.6], &[0.5, 0.5], 0.5).is_err());
        assert!(beta_classical(&[0.5, 0.5], &[0.5, -0.5], 0.5).is_err());
    }

    #[test]
    fn positive_part_consistency_with_probe() {
        // tr{A}_+ from positive_part agrees with the dual bookkeeping.
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let a = random_hermitian(&mut rng, 5);
        let (_, w) = positive_part(&a).unwrap();
        let eig = eigh(&a).unwrap();
        let manual: f64 = eig.eigenvalues.iter().filter(|l| **l > 0.0).sum();
        assert!((w - manual).abs() < 1e-12);
    }
}
