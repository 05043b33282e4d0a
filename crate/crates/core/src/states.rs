//! Phase-covariant probe states in the weight basis of a `U(1)` generator.
//!
//! A probe family is `rho^x = e^{-ixH} rho e^{ixH}` for a generator `H` with
//! integer eigenvalues ("weights").  Everything downstream only depends on
//! the weight decomposition, so an `N`-qubit symmetric probe is stored in the
//! `(N+1)`-dimensional weight basis (weights `-N, -N+2, ..., N`) rather than
//! in the full `2^N`-dimensional space.  Basis vectors may share a weight; in
//! that case they belong to the same dephasing block.

use num_complex::Complex64;

use crate::constants::{AMPLITUDE_NORM_TOL, PROJECTOR_TOL, WEIGHT_MASS_TOL};
use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, DensityMatrix, HermitianOperator};

/// Diagonal `U(1)` generator: one integer weight per basis vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct U1Generator {
    weights: Vec<i64>,
}

impl U1Generator {
    pub fn new(weights: Vec<i64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidArgument("generator needs at least one weight".into()));
        }
        Ok(Self { weights })
    }

    /// Generator of the `N`-qubit symmetric family: weights `-N..N` step 2.
    pub fn n_qubit(n: usize) -> Self {
        let weights = (0..=n).map(|m| 2 * m as i64 - n as i64).collect();
        Self { weights }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    /// Distinct weight values in ascending order, with the basis indices
    /// carrying each value.  Basis vectors with equal weight share a block.
    pub fn blocks(&self) -> Vec<(i64, Vec<usize>)> {
        let mut values: Vec<i64> = self.weights.clone();
        values.sort_unstable();
        values.dedup();
        values
            .into_iter()
            .map(|w| {
                let idx = self
                    .weights
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v == w)
                    .map(|(i, _)| i)
                    .collect();
                (w, idx)
            })
            .collect()
    }

    /// Number of distinct weight values.
    pub fn block_count(&self) -> usize {
        self.blocks().len()
    }
}

/// A labelled probe state tied to its generator.
#[derive(Debug, Clone)]
pub struct ProbeState {
    state: DensityMatrix,
    generator: U1Generator,
    label: String,
    /// Amplitudes when the state was constructed pure; kept so exact
    /// rank-one solver paths need no eigendecomposition.
    amplitudes: Option<Vec<Complex64>>,
}

impl ProbeState {
    pub fn new(state: DensityMatrix, generator: U1Generator, label: impl Into<String>) -> Result<Self> {
        if state.dim() != generator.dim() {
            return Err(Error::DimensionMismatch { left: state.dim(), right: generator.dim() });
        }
        Ok(Self { state, generator, label: label.into(), amplitudes: None })
    }

    /// Pure state from weight-basis amplitudes (norm 1 within tolerance).
    pub fn pure(
        amplitudes: Vec<Complex64>,
        generator: U1Generator,
        label: impl Into<String>,
    ) -> Result<Self> {
        if amplitudes.len() != generator.dim() {
            return Err(Error::DimensionMismatch { left: amplitudes.len(), right: generator.dim() });
        }
        let state = DensityMatrix::from_pure(&amplitudes)?;
        Ok(Self { state, generator, label: label.into(), amplitudes: Some(amplitudes) })
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn generator(&self) -> &U1Generator {
        &self.generator
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.state.dim()
    }

    /// Amplitudes if the state was built pure.
    pub fn amplitudes(&self) -> Option<&[Complex64]> {
        self.amplitudes.as_deref()
    }

    /// Probability mass per distinct weight value, ascending in weight.
    pub fn weight_masses(&self) -> Vec<(i64, f64)> {
        self.generator
            .blocks()
            .iter()
            .map(|(w, idx)| {
                let mass: f64 = idx.iter().map(|&i| self.state.matrix().get(i, i).re).sum();
                (*w, mass)
            })
            .collect()
    }
}

/// Greenberger–Horne–Zeilinger probe: equal superposition of the two extreme
/// weights of `N` qubits.
pub fn ghz(n: usize) -> Result<ProbeState> {
    if n == 0 {
        return Err(Error::InvalidArgument("ghz needs at least one qubit".into()));
    }
    let generator = U1Generator::new(vec![-(n as i64), n as i64])?;
    let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    ProbeState::pure(vec![a, a], generator, "ghz")
}

/// `|+>^{tensor N}` in the weight basis: amplitude `sqrt(C(N,m)/2^N)` on
/// weight `2m - N`.
pub fn plus_power(n: usize) -> Result<ProbeState> {
    if n == 0 {
        return Err(Error::InvalidArgument("plus_power needs at least one qubit".into()));
    }
    let mut amps = Vec::with_capacity(n + 1);
    // binom(N, m) / 2^N via a stable multiplicative recurrence.
    let mut coeff = 0.5f64.powi(n as i32);
    for m in 0..=n {
        amps.push(Complex64::new(coeff.sqrt(), 0.0));
        if m < n {
            coeff *= (n - m) as f64 / (m + 1) as f64;
        }
    }
    ProbeState::pure(amps, U1Generator::n_qubit(n), "plus")
}

/// Sine-profile probe: `psi_m = sqrt(2/(N+2)) sin((m+1) pi / (N+2))`.
///
/// This is the minimum-tail-mass profile among `N`-qubit phase probes; its
/// closed-form norm is exactly 1.
pub fn sine_state(n: usize) -> Result<ProbeState> {
    if n == 0 {
        return Err(Error::InvalidArgument("sine_state needs at least one qubit".into()));
    }
    let len = n as f64 + 2.0;
    let scale = (2.0 / len).sqrt();
    let amps: Vec<Complex64> = (0..=n)
        .map(|m| Complex64::new(scale * ((m as f64 + 1.0) * std::f64::consts::PI / len).sin(), 0.0))
        .collect();
    ProbeState::pure(amps, U1Generator::n_qubit(n), "sine")
}

/// Uniform-amplitude probe: `1/sqrt(N+1)` on every weight.
pub fn uniform_phase_state(n: usize) -> Result<ProbeState> {
    if n == 0 {
        return Err(Error::InvalidArgument("uniform_phase_state needs at least one qubit".into()));
    }
    let a = Complex64::new(1.0 / ((n + 1) as f64).sqrt(), 0.0);
    ProbeState::pure(vec![a; n + 1], U1Generator::n_qubit(n), "uniform")
}

/// Product of `N` single-qubit sites in the weight basis.
///
/// Each site is `(a, b)` with weight `-1` carrying `|a|^2` and weight `+1`
/// carrying `|b|^2`.  The total-weight distribution is the convolution of the
/// per-site distributions; the stored amplitude on weight `2m - N` is the
/// square root of that probability.  Supply one pair to replicate it across
/// all `N` sites, or exactly `N` pairs.
pub fn product_state(sites: &[(Complex64, Complex64)], n: usize) -> Result<ProbeState> {
    if n == 0 {
        return Err(Error::InvalidArgument("product_state needs at least one site".into()));
    }
    if sites.len() != 1 && sites.len() != n {
        return Err(Error::DimensionMismatch { left: sites.len(), right: n });
    }
    let site_probs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let (a, b) = if sites.len() == 1 { sites[0] } else { sites[i] };
            let pa = a.norm_sqr();
            let pb = b.norm_sqr();
            if ((pa + pb).sqrt() - 1.0).abs() > AMPLITUDE_NORM_TOL {
                return Err(Error::InvalidState(format!(
                    "site {i} has norm {:.12}, expected 1",
                    (pa + pb).sqrt()
                )));
            }
            Ok((pa / (pa + pb), pb / (pa + pb)))
        })
        .collect::<Result<_>>()?;
    // Convolve the per-site two-point distributions.
    let mut dist = vec![1.0f64];
    for &(pa, pb) in &site_probs {
        let mut next = vec![0.0; dist.len() + 1];
        for (m, &p) in dist.iter().enumerate() {
            next[m] += p * pa;
            next[m + 1] += p * pb;
        }
        dist = next;
    }
    let amps: Vec<Complex64> = dist.iter().map(|p| Complex64::new(p.max(0.0).sqrt(), 0.0)).collect();
    ProbeState::pure(amps, U1Generator::n_qubit(n), "product")
}

/// Dephasing (pinching) channel: keep only matrix blocks within equal-weight
/// subspaces, `sum_j P_j rho P_j`.
pub fn dephase(rho: &DensityMatrix, generator: &U1Generator) -> Result<DensityMatrix> {
    if rho.dim() != generator.dim() {
        return Err(Error::DimensionMismatch { left: rho.dim(), right: generator.dim() });
    }
    let op = pinch_operator(rho.operator(), generator)?;
    DensityMatrix::new(op)
}

/// Pinching of an arbitrary Hermitian observable into the weight blocks.
pub(crate) fn pinch_operator(op: &HermitianOperator, generator: &U1Generator) -> Result<HermitianOperator> {
    if op.dim() != generator.dim() {
        return Err(Error::DimensionMismatch { left: op.dim(), right: generator.dim() });
    }
    let w = generator.weights();
    let n = op.dim();
    let mat = ComplexMatrix::from_fn(n, |i, j| {
        if w[i] == w[j] {
            op.matrix().get(i, j)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    HermitianOperator::try_new(mat)
}

/// Number of distinct weight values carrying more than `mass_tol` of
/// probability.  Pass [`WEIGHT_MASS_TOL`] for the standard threshold.
pub fn weight_support(state: &ProbeState, mass_tol: f64) -> usize {
    state
        .weight_masses()
        .iter()
        .filter(|(_, mass)| *mass > mass_tol)
        .count()
}

/// Project onto `P` and renormalize: `(P rho P / overlap, overlap)`.
///
/// For pure `rho` the result stays within trace distance
/// `sqrt(1 - overlap)` of the input (gentle-measurement bound).
pub fn truncate_to_projector(
    rho: &DensityMatrix,
    projector: &HermitianOperator,
) -> Result<(DensityMatrix, f64)> {
    if rho.dim() != projector.dim() {
        return Err(Error::DimensionMismatch { left: rho.dim(), right: projector.dim() });
    }
    let p2 = HermitianOperator::try_new(projector.matrix().mul(projector.matrix())?)?;
    let dev = p2.linear_comb(1.0, projector, -1.0)?.matrix().max_abs_entry();
    if dev > PROJECTOR_TOL {
        return Err(Error::InvalidProjector(format!(
            "not idempotent: max |P^2 - P| entry = {dev:.3e}"
        )));
    }
    let overlap = rho.expectation(projector)?;
    if overlap <= WEIGHT_MASS_TOL {
        return Err(Error::InvalidProjector(format!(
            "state has no overlap with the projector ({overlap:.3e})"
        )));
    }
    let prp = projector
        .matrix()
        .mul(rho.matrix())?
        .mul(projector.matrix())?;
    let scaled = prp.linear_comb(
        Complex64::new(1.0 / overlap, 0.0),
        &ComplexMatrix::zeros(rho.dim()),
        Complex64::new(0.0, 0.0),
    )?;
    let truncated = DensityMatrix::new(HermitianOperator::try_new(scaled)?)?;
    Ok((truncated, overlap))
}

/// Diagonal projector selecting a subset of basis indices.
pub fn index_projector(dim: usize, indices: &[usize]) -> HermitianOperator {
    let mut diag = vec![0.0; dim];
    for &i in indices {
        diag[i] = 1.0;
    }
    HermitianOperator::from_diag(&diag)
}
