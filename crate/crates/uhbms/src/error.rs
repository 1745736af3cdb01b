use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not unimodular (det = {det})")]
    NotUnimodular { det: f64 },
    #[error("Haar chart ({chart}) is singular at this element")]
    ChartSingular { chart: &'static str },
    #[error("parity violation: {0}")]
    Parity(String),
    #[error("invalid little group parameters: {0}")]
    InvalidSpec(String),
    #[error("slope pair (0, 0) does not generate a one-parameter subgroup")]
    ZeroSlope,
    #[error("slope ({q}, {p}) lies on a coordinate axis and has no winding normal form")]
    AxisSlope { q: i64, p: i64 },
    #[error("slope given as an untagged float; closure needs exact data")]
    UntaggedSlope,
    #[error("character (nu = {nu}, n = {n}) is not trivial on the kernel of the parametrization")]
    CharacterNotWellDefined { nu: u32, n: i64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
