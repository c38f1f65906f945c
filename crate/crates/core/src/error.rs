//! Error taxonomy shared by every module of the library.
//!
//! Each variant corresponds to one failure class surfaced by the public
//! operations: rejected inputs (`Domain`), rejected configurations
//! (`Config`), infeasible constraint data (`Constraint`), quadrature or
//! iteration breakdowns (`Numerical`), geometric preconditions that do not
//! hold at the requested scale (`Geometry`), and rate fits requested with
//! too few data points (`InsufficientData`).

use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation
    /// (non-finite input, negative radius, exponent out of range, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration value is structurally invalid (unknown kind, empty
    /// sample table, non-convex sampled gauge, dimension mismatch, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Constraint data is infeasible (mass outside (-|Omega|, |Omega|),
    /// no sign change for a crossing search, ...).
    #[error("constraint error: {0}")]
    Constraint(String),

    /// A numerical procedure failed to reach its tolerance; the message
    /// carries the best estimate and the achieved error.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// A geometric precondition fails at the requested scale (enlarged-ball
    /// inclusion, bump support containment, layer fitting inside the domain).
    #[error("geometry error: {0}")]
    Geometry(String),

    /// A fit or summary was requested with fewer data points than required.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Filesystem failure while emitting reports.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
