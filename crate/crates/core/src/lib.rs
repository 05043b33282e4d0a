//! Rigorous lower bounds on the size of confidence regions in quantum
//! parameter estimation.
//!
//! The central object is the optimal type-II error of a binary quantum
//! hypothesis test,
//!
//! ```text
//!   beta_alpha(rho, sigma) = inf { <sigma, E> : 0 <= E <= 1, <rho, E> >= alpha },
//! ```
//!
//! which lower-bounds the measure of any confidence region that captures the
//! true parameter with probability `alpha`.  Everything this crate computes is
//! certificate-backed: primal values come with an explicit test operator, and
//! lower bounds on minimax quantities come with an explicit dominated state
//! whose `beta` value reproduces the bound.
//!
//! Module map:
//!
//! - [`numerics`] — dense complex Hermitian linear algebra (Jacobi
//!   eigensolver, positive parts, trace distance, entropies).
//! - [`states`] — phase-covariant probe families stored in the weight basis
//!   of a `U(1)` generator, plus the dephasing (pinching) channel.
//! - [`hypotest`] — exact Neyman–Pearson solver with dual certificates,
//!   its classical restriction, and entropy-based consequences.
//! - [`symmetry`] — group-invariant refinements: the minimax bound over
//!   invariant states, bracketed by a certified lower/upper pair.
//! - [`repbounds`] — state-independent bounds from representation counting
//!   (dimension formulas, branching, scaling fits); exact big-integer
//!   arithmetic throughout.
//! - [`corollaries`] — closed-form consequences: mean-square-error scalings,
//!   entropic bounds, energy-constrained and separable-probe bounds.
//! - [`io`] — plain-text matrix/state formats shared with the CLI.

pub mod constants;
pub mod corollaries;
pub mod error;
pub mod hypotest;
pub mod io;
pub mod numerics;
pub mod repbounds;
pub mod states;
pub mod symmetry;

pub use error::{Error, Result};
