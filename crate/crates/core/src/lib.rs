//! Choi-matrix toolkit for Hermitian linear maps between matrix algebras.
//!
//! A Hermitian map `Φ: M_m -> M_n` is stored through its Choi matrix, the
//! `mn x mn` Hermitian block matrix whose `(j,k)` block is `Φ(E_jk)`. All
//! higher-level quantities (distance from complete positivity, minimal
//! completely positive lift, witness functionals, decompositions into
//! completely positive parts) are spectral functions of that one matrix.

pub mod cli;
pub mod linalg;
pub mod decompose;
pub mod distance;
pub mod map;
pub mod witness;

pub use linalg::Complex64;

use thiserror::Error;

/// Errors surfaced by matrix validation, eigen-solves and map-level operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Construction from rows that are empty or of unequal length.
    #[error("invalid matrix shape: {0}")]
    InvalidShape(String),
    /// A NaN or infinite entry reached a constructor.
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("{context}: expected dimension {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    /// Hermitian deviation `max |a_jk - conj(a_kj)|` above the rejection tolerance.
    #[error("matrix is not Hermitian: deviation {deviation:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { deviation: f64, tolerance: f64 },
    /// The iterative eigen-solver did not converge or failed verification.
    #[error("eigendecomposition failed: {0}")]
    EigenFailure(String),
    #[error("not a density matrix: {0}")]
    NotDensity(String),
    /// Operation requires a map that is not completely positive.
    #[error("map is completely positive: {0}")]
    CompletelyPositive(String),
    /// Operation requires positivity evidence, but the evidence records a counterexample.
    #[error("positivity evidence reports NOT_POSITIVE")]
    NotPositiveEvidence,
    /// A diagonal block of a block-diagonal Choi matrix fails positive semidefiniteness.
    #[error("diagonal block {index} has negative eigenvalue {lambda_min:.3e}")]
    NegativeDiagonalBlock { index: usize, lambda_min: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Tolerance policy, centralized so every module draws from one table.
///
/// Scale-aware bounds are written as `COEFF * max(1, scale)` with the scale
/// stated on each constant; `max(1, ..)` keeps the absolute floor for
/// small-norm inputs.
pub mod tol {
    /// Relative eigenpair residual accepted from the solver:
    /// `||A v - lambda v|| <= EIG_TOL * max|lambda|` per pair.
    pub const EIG_TOL: f64 = 1e-10;
    /// Hermitian deviation coefficient; scale is the largest entry modulus.
    /// Below the bound inputs are symmetrized to `(A + A*)/2`, above they are rejected.
    pub const HERM_TOL_COEFF: f64 = 1e-9;
    /// Positive-semidefiniteness slack coefficient; scale is the operator norm.
    pub const PSD_TOL_COEFF: f64 = 1e-9;
    /// Per-sample positivity slack for outputs `Φ(xx*)`; scale is `||Φ(xx*)||`.
    pub const POS_TOL_COEFF: f64 = 1e-9;
    /// Spectral split band: eigenvalues within `EIG_SPLIT_COEFF * ||A||` of zero
    /// are assigned to the positive part when separating signs.
    pub const EIG_SPLIT_COEFF: f64 = 1e-10;
    /// Pass bound on the worst sampled violation in property verification runs.
    pub const PROPERTY_PASS_TOL: f64 = 1e-9;
    /// Largest off-diagonal block entry still counted as block-diagonal.
    pub const BLOCK_DIAG_TOL: f64 = 1e-10;
    /// A witness expectation counts as detection only below this margin:
    /// `tr(W rho) < -DETECTION_MARGIN`.
    pub const DETECTION_MARGIN: f64 = 1e-10;
    /// Allowed deviation of a density-matrix trace from one.
    pub const TRACE_ONE_TOL: f64 = 1e-10;

    /// Scale-aware Hermitian rejection bound.
    pub fn herm_tol(max_entry: f64) -> f64 {
        HERM_TOL_COEFF * max_entry.max(1.0)
    }

    /// Scale-aware PSD slack.
    pub fn psd_tol(op_norm: f64) -> f64 {
        PSD_TOL_COEFF * op_norm.max(1.0)
    }

    /// Scale-aware positivity slack for map outputs.
    pub fn pos_tol(op_norm: f64) -> f64 {
        POS_TOL_COEFF * op_norm.max(1.0)
    }
}
