//! Error type shared by every module in the crate.

/// Hard cap on cells a partition sweep may emit before giving up.
pub const MAX_CELLS: usize = 1_000_000;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Precondition violation: bad parameters, mismatched domains, invalid structure.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Matrix/vector shape mismatch.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Symmetric-operator input with `a[i][j] != a[j][i]`.
    #[error("matrix is not exactly symmetric at ({i},{j}): {lower} vs {upper}")]
    NotSymmetric { i: usize, j: usize, lower: f64, upper: f64 },

    /// Point evaluation outside the function's domain K.
    #[error("point {x} lies outside the domain [{lo}, {hi}]")]
    OutsideDomain { x: f64, lo: f64, hi: f64 },

    /// An iteration failed to meet its tolerance within its budget.
    #[error("no convergence: {0}")]
    Convergence(String),

    /// A one-sided limit did not stabilize under geometric probing.
    #[error("possibly essential discontinuity near x = {x}: one-sided limit did not stabilize")]
    EssentialDiscontinuity { x: f64 },

    /// Partition sweep exceeded `MAX_CELLS` (or stalled in floating point).
    #[error("gauge too small near t = {at}: sweep would exceed {max_cells} cells")]
    GaugeTooSmall { at: f64, max_cells: usize },

    /// An improper integral whose truncations keep growing past the budget.
    /// Carries the partial sums observed at geometrically spaced truncations.
    #[error("divergence suspected: {context} (last partials {partial_sums:?})")]
    DivergenceSuspected { context: String, partial_sums: Vec<f64> },

    /// Malformed textual input (CSV rows, function specs).
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
