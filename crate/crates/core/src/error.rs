use thiserror::Error;

/// Errors raised by the solvers and their supporting kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("order {order} exceeds the supported maximum {max}")]
    OrderTooLarge { order: i64, max: u32 },

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("evaluation point coincides with a source point (distance {distance:e})")]
    Coincidence { distance: f64 },

    #[error("parameter t = {0} is a corner of the boundary; the normal is undefined there")]
    Vertex(f64),

    #[error("pole {index} at ({x}, {y}) is not strictly inside the boundary")]
    PoleOutside { index: usize, x: f64, y: f64 },

    #[error("pole {index} at ({x}, {y}) is not strictly below the profile")]
    PoleAboveProfile { index: usize, x: f64, y: f64 },

    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),

    #[error("singular value decomposition did not converge")]
    SvdFailed,

    #[error("linear system is singular")]
    SingularSystem,

    #[error("series did not reach relative tolerance {tolerance:e} by order {max_order}")]
    Truncation { tolerance: f64, max_order: u32 },

    #[error("grating mode j = {j} is degenerate (lambda_j^2 = k^2)")]
    DegenerateMode { j: i64 },

    #[error("no phase information: every amplitude is zero")]
    NoPhase,

    #[error("phase unwrapping is ambiguous between samples {index} and {next} (jump {jump:.3} rad)")]
    UnwrapAmbiguity { index: usize, next: usize, jump: f64 },

    #[error("every singular value lies below the cutoff {cutoff:e}")]
    AllValuesCut { cutoff: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
