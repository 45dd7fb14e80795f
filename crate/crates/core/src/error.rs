//! Error type shared by all kernels.
//!
//! Payloads carry `f64` diagnostics regardless of the scalar the caller uses,
//! so the error type itself stays scalar-free.

use thiserror::Error;

/// Crate-wide error enumeration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A point left the domain the map is defined on.
    #[error("point x = {x} lies outside the map domain")]
    OutOfDomain {
        /// The offending point.
        x: f64,
    },

    /// A Möbius node was evaluated at (or across) its pole.
    #[error("Möbius pole at x = {x}")]
    Pole {
        /// Location of the pole.
        x: f64,
    },

    /// The derivative vanishes on a whole subinterval; critical points are
    /// not isolated there.
    #[error("derivative vanishes on a subinterval of [{lo}, {hi}]")]
    FlatPiece {
        /// Lower end of the offending window.
        lo: f64,
        /// Upper end of the offending window.
        hi: f64,
    },

    /// The map fails to be a diffeomorphism on the given interval.
    #[error("map is not a diffeomorphism on [{lo}, {hi}]")]
    NotDiffeo {
        /// Lower end of the interval.
        lo: f64,
        /// Upper end of the interval.
        hi: f64,
    },

    /// A cross-ratio was requested for a degenerate configuration.
    #[error("degenerate cross-ratio configuration: {0}")]
    Degenerate(String),

    /// A quantity required a point away from critical points.
    #[error("critical point at x = {x} inside the working interval")]
    CriticalPoint {
        /// The critical point.
        x: f64,
    },

    /// An argument violated a documented precondition.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// An invalid parameter value (wrong sign, empty range, …).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// An iterative scheme failed to converge or produced non-finite values.
    #[error("numerical failure: {0}")]
    Numeric(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
