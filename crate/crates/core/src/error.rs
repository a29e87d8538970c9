use thiserror::Error;

use crate::hfun::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// Validation problems that are part of a report (see [`crate::hfun::ValidationReport`]
/// and [`crate::construct::EpReport`]) are data, not errors; the variants here are
/// raised when an operation cannot proceed.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Parse(String),

    #[error("invalid parameter set: {}", join(.0))]
    InvalidParams(Vec<Violation>),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("Re(s) = {re} is outside the strip ({lo}, {hi})")]
    OutOfStrip { re: f64, lo: f64, hi: f64 },

    #[error("Gamma pole at z = {re}{im:+}i")]
    Pole { re: f64, im: f64 },

    #[error("empty Mellin strip ({lo}, {hi})")]
    StripEmpty { lo: f64, hi: f64 },

    #[error("chi = {0} is not positive")]
    ChiNonpositive(f64),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("contour Re(s) = {0} passes through a Gamma pole")]
    PoleOnContour(f64),

    #[error("convolution spec violates its constraints: {}", join(.0))]
    SpecInvalid(Vec<Violation>),

    #[error("index rule violated: need n1 >= 1 or n3 >= 1")]
    IndexRule,

    #[error("{0} kernels requested, the quadrature oracle handles at most 3")]
    TooManyKernels(usize),

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("omega = {omega} is outside ({lo}, {hi})")]
    OmegaOutOfRange { omega: f64, lo: f64, hi: f64 },

    #[error("omega must be positive, got {0}")]
    NonpositiveOmega(f64),

    #[error("e.p. conditions fail: {}", join(.0))]
    EpFailed(Vec<Violation>),

    #[error("parameter set is not a Meijer G pattern")]
    NotMeijerPattern,
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse(_) => "Parse",
            Error::InvalidParams(_) => "InvalidParams",
            Error::Domain(_) => "DomainError",
            Error::InvalidKernel(_) => "InvalidKernel",
            Error::OutOfStrip { .. } => "OutOfStrip",
            Error::Pole { .. } => "PoleError",
            Error::StripEmpty { .. } => "StripEmpty",
            Error::ChiNonpositive(_) => "ChiNonpositive",
            Error::NoConvergence(_) => "NoConvergence",
            Error::PoleOnContour(_) => "PoleOnContour",
            Error::SpecInvalid(_) => "SpecInvalid",
            Error::IndexRule => "IndexRule",
            Error::TooManyKernels(_) => "TooManyKernels",
            Error::PreconditionFailed(_) => "PreconditionFailed",
            Error::OmegaOutOfRange { .. } => "OmegaOutOfRange",
            Error::NonpositiveOmega(_) => "NonpositiveOmega",
            Error::EpFailed(_) => "EpFailed",
            Error::NotMeijerPattern => "NotMeijerPattern",
        }
    }
}

fn join(v: &[Violation]) -> String {
    v.iter()
        .map(|x| format!("[{}] {}", x.rule, x.message))
        .collect::<Vec<_>>()
        .join("; ")
}
