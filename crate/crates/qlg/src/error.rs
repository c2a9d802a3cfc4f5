//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A matrix passed to an involution-exponential was not its own inverse.
    #[error("matrix is not an involution: max |A^2 - 1| = {deviation:.3e}")]
    NotInvolution { deviation: f64 },

    /// A physical parameter left its admissible domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A path problem with N - M odd has no checkerboard paths.
    #[error("invalid parity: N = {n} and M = {m} must have N - M even")]
    InvalidParity { n: usize, m: i64 },

    /// Exact enumeration was requested beyond the supported path length.
    #[error("enumeration budget exceeded: N = {n} > {max}")]
    BudgetExceeded { n: usize, max: usize },

    /// A rotation axis must be a unit vector.
    #[error("rotation axis is not unit length: |axis| = {norm}")]
    BadAxis { norm: f64 },

    /// A gate parameterization violated its defining algebraic identity.
    #[error("gate constraint violated: {0}")]
    ConstraintViolated(String),

    /// The bracketing scan found no root of the transcendental equation.
    #[error("no root found in ({lo}, {hi}]")]
    NoRoot { lo: f64, hi: f64 },

    /// Inputs that must be finite contained NaN or infinity.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// Mismatched lattice or vector sizes.
    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    /// Snapshot file parsing failed.
    #[error("snapshot format error: {0}")]
    SnapshotFormat(String),
}
