//! Crate-wide error type.

use thiserror::Error;

use crate::analysis::Regime;
use crate::measure::ColorId;
use crate::rrt::Vertex;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A kernel row does not sum to 1 within the row-sum tolerance.
    #[error("row {state} is not stochastic: sums to {sum}")]
    NonStochasticRow { state: ColorId, sum: f64 },

    /// A kernel row has a negative entry.
    #[error("negative entry in row {state} at color {color}")]
    NegativeEntry { state: ColorId, color: ColorId },

    /// A measure was given a negative weight.
    #[error("negative weight {weight} for color {color}")]
    NegativeWeight { color: ColorId, weight: f64 },

    /// A measure with zero total mass where positive mass is required.
    #[error("measure has zero total mass")]
    ZeroMass,

    /// A color outside an explicit kernel's row table.
    #[error("color {color} out of range for a kernel over {num_colors} colors")]
    ColorOutOfRange { color: ColorId, num_colors: u32 },

    /// Truncated support grew past the configured cap.
    #[error("truncation support {support} exceeds cap {cap}")]
    TruncationOverflow { support: usize, cap: usize },

    /// Power iteration did not reach the requested residual.
    #[error("no convergence after {iterations} iterations (residual {residual}, target {tol})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        tol: f64,
    },

    /// Probe errors do not decay geometrically; the certificate is refused.
    #[error("probe sup-errors do not decay; ergodicity certificate refused")]
    NoDecay,

    /// Exact enumeration horizon above the configured cap.
    #[error("horizon {horizon} exceeds enumeration cap {cap}")]
    HorizonTooLarge { horizon: usize, cap: usize },

    /// Exact enumeration would need a row with unbounded support.
    #[error("reachable color set is not finite: row of {state} has unbounded support")]
    InfiniteSupportReachable { state: ColorId },

    /// Two sequence laws with different horizons.
    #[error("law horizons differ: {left} vs {right}")]
    HorizonMismatch { left: usize, right: usize },

    /// A vertex handle that does not belong to the tree.
    #[error("vertex {0} is not in the tree")]
    UnknownVertex(Vertex),

    /// A growth-bound regime inconsistent with the series parameter r.
    #[error("regime {regime:?} is inconsistent with r = {r}")]
    RegimeMismatch { regime: Regime, r: f64 },

    /// A precondition on a numeric argument was violated.
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),

    /// Malformed kernel/measure text input.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
