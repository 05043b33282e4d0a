//! Central numerical tolerances.
//!
//! Every validation threshold used across the crate lives here so that the
//! contracts stay consistent between modules and tests.

/// Maximum allowed deviation from Hermitian symmetry on construction.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Relative off-diagonal Frobenius target for the Jacobi eigensolver.
pub const JACOBI_OFFDIAG_TOL: f64 = 1e-12;

/// Hard cap on Jacobi sweeps before reporting non-convergence.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Relative reconstruction error allowed for an eigendecomposition.
pub const EIG_RECONSTRUCTION_TOL: f64 = 1e-9;

/// Most negative eigenvalue tolerated in a density matrix.
pub const DENSITY_EIG_TOL: f64 = 1e-10;

/// Allowed deviation of a density-matrix trace from one.
pub const DENSITY_TRACE_TOL: f64 = 1e-10;

/// Eigenvalues below this are treated as zero when deciding support
/// membership (entropies, relative entropy, support projectors).
pub const SUPPORT_TOL: f64 = 1e-10;

/// Half-width of the spectral band around zero whose eigenvectors form the
/// fractional block of a Neyman–Pearson test.
pub const NP_KERNEL_TOL: f64 = 1e-10;

/// Primal-dual gap target for the hypothesis-testing solver.
pub const NP_GAP_TOL: f64 = 1e-8;

/// Maximum bisection steps on the Neyman–Pearson threshold.
pub const NP_MAX_BISECTIONS: usize = 200;

/// Slack allowed on test-operator eigenvalues outside `[0, 1]`.
pub const TEST_EIG_TOL: f64 = 1e-9;

/// Slack allowed when checking that a dual certificate dominates.
pub const DUAL_FEASIBILITY_TOL: f64 = 1e-8;

/// Probability mass below which a weight is dropped from a support count.
pub const WEIGHT_MASS_TOL: f64 = 1e-12;

/// Allowed deviation from idempotence for a projector argument.
pub const PROJECTOR_TOL: f64 = 1e-9;

/// Allowed norm deviation for state amplitudes supplied by a caller.
pub const AMPLITUDE_NORM_TOL: f64 = 1e-10;

/// Default relative bracket-width target for the invariant-bound solver.
pub const INVARIANT_DEFAULT_TOL: f64 = 1e-4;

/// Default iteration cap for the invariant-bound solver.
pub const INVARIANT_DEFAULT_MAX_ITER: usize = 5000;

/// Floor applied to invariant-state block eigenvalues during the ascent so
/// that every iterate keeps full support on the probe's weight range.
pub const INVARIANT_SUPPORT_FLOOR: f64 = 1e-14;

/// Width within which an inverted certificate bracket (lower above upper)
/// is attributed to roundoff and snapped back to ordered form.
pub const BRACKET_ORDER_TOL: f64 = 1e-9;
