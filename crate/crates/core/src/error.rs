//! Error type shared by all modules.

use core::fmt;

/// Errors reported by kernel construction, metrics, and benchmark routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Error {
    /// A scale or standard-deviation parameter was not strictly positive.
    NonPositiveScale { value: f64 },
    /// A scale parameter that may be zero was negative (or not finite).
    NegativeScale { value: f64 },
    /// A truncation threshold was outside the accepted open interval (0, 0.1).
    InvalidEpsilon { value: f64 },
    /// A derivative or polynomial order outside the supported range.
    UnsupportedOrder { order: u32 },
    /// Kernel coefficients sum to zero, so the variance is undefined.
    UndefinedVariance,
    /// Kernel has no nonzero coefficient, so the spread is undefined.
    EmptyKernel,
    /// A signal with no samples.
    EmptySignal,
    /// A signal origin not within or adjacent to the index range.
    OriginOutOfRange { origin: i64, len: usize },
    /// An image whose dimensions do not match its sample count.
    BadImageShape {
        width: usize,
        height: usize,
        samples: usize,
    },
    /// A synthetic image extent too small for the requested feature width.
    ExtentTooSmall { extent: usize, required: usize },
    /// A probe point outside the image domain.
    PointOutsideImage { x: i64, y: i64 },
    /// A scale signature with too few samples for extremum analysis.
    ShortSignature { len: usize },
    /// Paired arrays whose lengths must agree.
    MismatchedLengths { left: usize, right: usize },
    /// A scale grid whose bounds or sample count are unusable.
    InvalidGrid,
    /// A scale-normalization power outside the accepted interval (0, 2].
    InvalidGamma { value: f64 },
    /// A non-finite angle parameter.
    InvalidAngle { value: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Error::NonPositiveScale { value } => {
                write!(
                    f,
                    "scale parameter must be positive and finite, got {value}"
                )
            }
            Error::NegativeScale { value } => {
                write!(
                    f,
                    "scale parameter must be nonnegative and finite, got {value}"
                )
            }
            Error::InvalidEpsilon { value } => {
                write!(f, "truncation epsilon must lie in (0, 0.1), got {value}")
            }
            Error::UnsupportedOrder { order } => {
                write!(f, "unsupported derivative order {order}")
            }
            Error::UndefinedVariance => {
                write!(f, "kernel coefficients sum to zero, variance undefined")
            }
            Error::EmptyKernel => write!(f, "kernel has no nonzero coefficients"),
            Error::EmptySignal => write!(f, "signal must contain at least one sample"),
            Error::OriginOutOfRange { origin, len } => {
                write!(
                    f,
                    "origin {origin} not within or adjacent to a signal of length {len}"
                )
            }
            Error::BadImageShape {
                width,
                height,
                samples,
            } => {
                write!(
                    f,
                    "image shape {width}x{height} does not match {samples} samples"
                )
            }
            Error::ExtentTooSmall { extent, required } => {
                write!(
                    f,
                    "image extent {extent} too small, need at least {required}"
                )
            }
            Error::PointOutsideImage { x, y } => {
                write!(f, "point ({x}, {y}) lies outside the image domain")
            }
            Error::ShortSignature { len } => {
                write!(f, "scale signature has {len} samples, need at least 3")
            }
            Error::MismatchedLengths { left, right } => {
                write!(f, "paired arrays differ in length: {left} vs {right}")
            }
            Error::InvalidGrid => write!(f, "scale grid bounds or count are invalid"),
            Error::InvalidGamma { value } => {
                write!(f, "normalization power must lie in (0, 2], got {value}")
            }
            Error::InvalidAngle { value } => write!(f, "angle must be finite, got {value}"),
        }
    }
}

impl core::error::Error for Error {}

/// Result alias used across the crate.
pub type Result<T> = core::result::Result<T, Error>;
