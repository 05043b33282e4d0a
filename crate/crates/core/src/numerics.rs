//! Dense complex Hermitian linear algebra.
//!
//! All operators in this crate are small (dimension a few hundred at most),
//! so matrices are stored densely in row-major order and eigendecompositions
//! use a cyclic Jacobi iteration with complex rotations.  Jacobi is slower
//! than Householder-based solvers but is simple, backward-stable, and keeps
//! the eigenbasis unitary to near machine precision — which matters because
//! every certificate check downstream is an eigenvalue bound.

use num_complex::Complex64;

use crate::constants::{
    AMPLITUDE_NORM_TOL, DENSITY_EIG_TOL, DENSITY_TRACE_TOL, HERMITICITY_TOL,
    JACOBI_MAX_SWEEPS, JACOBI_OFFDIAG_TOL, SUPPORT_TOL,
};
use crate::error::{Error, Result};

/// Square dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Zero matrix of the given dimension.
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    /// Identity matrix.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Build from a row-major entry slice; fails on non-square or non-finite data.
    pub fn from_rows(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch { left: dim * dim, right: data.len() });
        }
        let m = Self { dim, data };
        m.check_finite()?;
        Ok(m)
    }

    /// Build entry-wise from a closure.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    fn check_finite(&self) -> Result<()> {
        for i in 0..self.dim {
            for j in 0..self.dim {
                let z = self.get(i, j);
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFiniteEntry { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.get(i, k);
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Entry-wise linear combination `a*self + b*other`.
    pub fn linear_comb(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        Ok(Self::from_fn(self.dim, |i, j| a * self.get(i, j) + b * other.get(i, j)))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest entry magnitude (the sup norm used in reconstruction checks).
    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius norm of the strictly off-diagonal part.
    fn offdiag_frobenius(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    acc += self.get(i, j).norm_sqr();
                }
            }
        }
        acc.sqrt()
    }
}

/// Hermitian operator; symmetrized on construction.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    mat: ComplexMatrix,
}

impl HermitianOperator {
    /// Validate Hermiticity within [`HERMITICITY_TOL`] and symmetrize exactly.
    pub fn try_new(mat: ComplexMatrix) -> Result<Self> {
        let n = mat.dim();
        let mut deviation: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let d = (mat.get(i, j) - mat.get(j, i).conj()).norm();
                deviation = deviation.max(d);
            }
        }
        if deviation > HERMITICITY_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let mut sym = mat;
        for i in 0..n {
            let d = sym.get(i, i);
            sym.set(i, i, Complex64::new(d.re, 0.0));
            for j in (i + 1)..n {
                let avg = 0.5 * (sym.get(i, j) + sym.get(j, i).conj());
                sym.set(i, j, avg);
                sym.set(j, i, avg.conj());
            }
        }
        Ok(Self { mat: sym })
    }

    /// Diagonal operator from real entries.
    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        Self { mat: ComplexMatrix::from_fn(n, |i, j| if i == j { Complex64::new(diag[i], 0.0) } else { Complex64::new(0.0, 0.0) }) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { mat: ComplexMatrix::identity(dim) }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { mat: ComplexMatrix::zeros(dim) }
    }

    /// Rank-one operator `v v^dagger` (no normalization applied).
    pub fn outer(v: &[Complex64]) -> Self {
        let n = v.len();
        Self { mat: ComplexMatrix::from_fn(n, |i, j| v[i] * v[j].conj()) }
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// Real linear combination `a*self + b*other` (Hermitian by construction).
    pub fn linear_comb(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        let mat = self.mat.linear_comb(
            Complex64::new(a, 0.0),
            &other.mat,
            Complex64::new(b, 0.0),
        )?;
        Ok(Self { mat })
    }

    /// Hilbert–Schmidt pairing `tr(self * other)`; real for Hermitian pairs.
    pub fn expectation(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: other.dim() });
        }
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                // tr(AB) = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij) for Hermitian B.
                acc += (self.mat.get(i, j) * other.mat.get(i, j).conj()).re;
            }
        }
        Ok(acc)
    }

    /// Largest eigenvalue magnitude.
    pub fn operator_norm(&self) -> Result<f64> {
        let eig = eigh(self)?;
        Ok(eig.eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max))
    }

    /// Smallest eigenvalue (used for feasibility checks of certificates).
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let eig = eigh(self)?;
        Ok(*eig.eigenvalues.first().expect("nonempty spectrum"))
    }
}

/// Eigendecomposition of a Hermitian operator.
///
/// Eigenvalues are sorted ascending; `basis` holds the matching eigenvectors
/// as columns and is unitary to solver precision.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub basis: ComplexMatrix,
}

impl EigenSystem {
    /// Column `k` of the basis as a vector.
    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        let n = self.basis.dim();
        (0..n).map(|i| self.basis.get(i, k)).collect()
    }

    /// Rebuild `U f(diag) U^dagger` for a spectral function `f`.
    pub fn apply_spectral(&self, f: impl Fn(f64) -> f64) -> HermitianOperator {
        let n = self.basis.dim();
        let mat = ComplexMatrix::from_fn(n, |i, j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                let fk = f(self.eigenvalues[k]);
                if fk != 0.0 {
                    acc += self.basis.get(i, k) * self.basis.get(j, k).conj() * fk;
                }
            }
            acc
        });
        HermitianOperator { mat }
    }
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Sweeps rotate away off-diagonal entries until the off-diagonal Frobenius
/// mass drops below [`JACOBI_OFFDIAG_TOL`] relative to the input norm, or the
/// sweep cap is hit (reported as [`Error::EigNonConvergence`] with the
/// residual attached).
pub fn eigh(op: &HermitianOperator) -> Result<EigenSystem> {
    let n = op.dim();
    let mut a = op.mat.clone();
    let mut v = ComplexMatrix::identity(n);
    let norm = a.frobenius_norm();
    if n <= 1 || norm == 0.0 {
        let eigenvalues = (0..n).map(|i| a.get(i, i).re).collect();
        return Ok(EigenSystem { eigenvalues, basis: v });
    }
    let target = JACOBI_OFFDIAG_TOL * norm;
    let mut converged = false;
    let mut sweeps = 0;
    let mut residual = a.offdiag_frobenius();
    while sweeps < JACOBI_MAX_SWEEPS {
        if residual <= target {
            converged = true;
            break;
        }
        for p in 0..(n - 1) {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let absa = apq.norm();
                if absa <= norm * 1e-18 {
                    continue;
                }
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let phase = apq / absa;
                let tau = (aqq - app) / (2.0 * absa);
                let t = if tau.abs() > 1e150 {
                    0.5 / tau
                } else {
                    let sign = if tau >= 0.0 { 1.0 } else { -1.0 };
                    sign / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Unitary on the (p,q) plane: column p = (c, -s*conj(phase)),
                // column q = (s, c*conj(phase)); zeroes the (p,q) entry.
                let phc = phase.conj();
                for i in 0..n {
                    if i == p || i == q {
                        continue;
                    }
                    let aip = a.get(i, p);
                    let aiq = a.get(i, q);
                    let new_p = aip * c - aiq * (s * phc);
                    let new_q = aip * s + aiq * (c * phc);
                    a.set(i, p, new_p);
                    a.set(p, i, new_p.conj());
                    a.set(i, q, new_q);
                    a.set(q, i, new_q.conj());
                }
                a.set(p, p, Complex64::new(app - t * absa, 0.0));
                a.set(q, q, Complex64::new(aqq + t * absa, 0.0));
                a.set(p, q, Complex64::new(0.0, 0.0));
                a.set(q, p, Complex64::new(0.0, 0.0));
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip * c - viq * (s * phc));
                    v.set(i, q, vip * s + viq * (c * phc));
                }
            }
        }
        sweeps += 1;
        residual = a.offdiag_frobenius();
    }
    if !converged && residual > target {
        return Err(Error::EigNonConvergence { sweeps, residual: residual / norm });
    }
    // Sort ascending, carrying eigenvector columns along.
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("finite eigenvalues"));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let basis = ComplexMatrix::from_fn(n, |i, k| v.get(i, order[k]));
    Ok(EigenSystem { eigenvalues, basis })
}

/// Validated quantum state: Hermitian, positive semidefinite within
/// [`DENSITY_EIG_TOL`], unit trace within [`DENSITY_TRACE_TOL`].
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    op: HermitianOperator,
}

impl DensityMatrix {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let trace = op.trace();
        if (trace - 1.0).abs() > DENSITY_TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "trace {trace:.12} deviates from 1 by more than {DENSITY_TRACE_TOL:.0e}"
            )));
        }
        let min = op.min_eigenvalue()?;
        if min < -DENSITY_EIG_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e} below -{DENSITY_EIG_TOL:.0e}"
            )));
        }
        Ok(Self { op })
    }

    /// Pure state from amplitudes; the norm must already be 1 within
    /// [`AMPLITUDE_NORM_TOL`] and is then normalized exactly.
    pub fn from_pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq.sqrt() - 1.0).abs() > AMPLITUDE_NORM_TOL {
            return Err(Error::InvalidState(format!(
                "amplitude norm {:.12} deviates from 1",
                norm_sq.sqrt()
            )));
        }
        let norm = norm_sq.sqrt();
        let v: Vec<Complex64> = amplitudes.iter().map(|a| a / norm).collect();
        Ok(Self { op: HermitianOperator::outer(&v) })
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.op.matrix()
    }

    /// `tr(rho E)` for a Hermitian observable.
    pub fn expectation(&self, obs: &HermitianOperator) -> Result<f64> {
        self.op.expectation(obs)
    }

    /// Purity `tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += self.matrix().get(i, j).norm_sqr();
            }
        }
        acc
    }
}

/// Real quadratic form `<v| M |v>` (real part; exact for Hermitian `M`).
pub(crate) fn quadratic_form(m: &ComplexMatrix, v: &[Complex64]) -> f64 {
    let n = m.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let mut row = Complex64::new(0.0, 0.0);
        for j in 0..n {
            row += m.get(i, j) * v[j];
        }
        acc += v[i].conj() * row;
    }
    acc.re
}

/// Split `A` into its positive part; returns `({A}_+, tr {A}_+)`.
///
/// The complementary part is recovered as `{-A}_+ = {A}_+ - A`.
pub fn positive_part(op: &HermitianOperator) -> Result<(HermitianOperator, f64)> {
    let eig = eigh(op)?;
    let weight: f64 = eig.eigenvalues.iter().filter(|l| **l > 0.0).sum();
    let pos = eig.apply_spectral(|l| if l > 0.0 { l } else { 0.0 });
    Ok((pos, weight))
}

/// Trace distance `1/2 ||rho - rho'||_1`.
pub fn trace_distance(rho: &DensityMatrix, other: &DensityMatrix) -> Result<f64> {
    let diff = rho.operator().linear_comb(1.0, other.operator(), -1.0)?;
    let eig = eigh(&diff)?;
    Ok(0.5 * eig.eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
}

/// Von Neumann entropy `-tr rho ln rho` in nats.
///
/// Eigenvalues below [`SUPPORT_TOL`] are clipped to zero and the remainder
/// renormalized, so tiny negative noise never produces NaNs.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let eig = eigh(rho.operator())?;
    entropy_of_spectrum(&eig.eigenvalues)
}

pub(crate) fn entropy_of_spectrum(eigenvalues: &[f64]) -> Result<f64> {
    let clipped: Vec<f64> = eigenvalues.iter().map(|&l| if l < SUPPORT_TOL { 0.0 } else { l }).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidState("spectrum has no positive mass".into()));
    }
    let mut h = 0.0;
    for l in clipped {
        if l > 0.0 {
            let p = l / total;
            h -= p * p.ln();
        }
    }
    Ok(h)
}

/// Relative entropy `D(rho || sigma) = tr rho (ln rho - ln sigma)` in nats.
///
/// `sigma` may be any positive-semidefinite operator (not necessarily
/// normalized).  Returns `+inf` when the support of `rho` is not contained in
/// the support of `sigma`; support membership is decided at [`SUPPORT_TOL`].
pub fn relative_entropy(rho: &DensityMatrix, sigma: &HermitianOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { left: rho.dim(), right: sigma.dim() });
    }
    let min_sigma = sigma.min_eigenvalue()?;
    if min_sigma < -DENSITY_EIG_TOL {
        return Err(Error::InvalidState(format!(
            "sigma has negative eigenvalue {min_sigma:.3e}"
        )));
    }
    let eig_r = eigh(rho.operator())?;
    let eig_s = eigh(sigma)?;
    let n = rho.dim();
    // Mass of rho outside the support of sigma.
    let mut outside = 0.0;
    // tr rho ln sigma accumulated over the supported directions of sigma.
    let mut tr_rho_ln_sigma = 0.0;
    for j in 0..n {
        let s = eig_s.eigenvalues[j];
        let wj = eig_s.eigenvector(j);
        // <w_j| rho |w_j>
        let mut mass = 0.0;
        for i in 0..n {
            let li = eig_r.eigenvalues[i];
            if li <= SUPPORT_TOL {
                continue;
            }
            let ui = eig_r.eigenvector(i);
            let overlap: Complex64 = wj.iter().zip(ui.iter()).map(|(w, u)| w.conj() * u).sum();
            mass += li * overlap.norm_sqr();
        }
        if s <= SUPPORT_TOL {
            outside += mass;
        } else {
            tr_rho_ln_sigma += mass * s.ln();
        }
    }
    if outside > SUPPORT_TOL {
        return Ok(f64::INFINITY);
    }
    let mut tr_rho_ln_rho = 0.0;
    for &l in &eig_r.eigenvalues {
        if l > SUPPORT_TOL {
            tr_rho_ln_rho += l * l.ln();
        }
    }
    Ok(tr_rho_ln_rho - tr_rho_ln_sigma)
}
