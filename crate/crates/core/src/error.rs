use alloc::string::String;

/// Errors raised by the numerical routines.
///
/// Each variant corresponds to a precondition of one operation; the CLI maps
/// them onto exit codes.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid argument `{field}`: {reason}")]
    InvalidArgument { field: &'static str, reason: String },
    #[error("malformed piecewise-linear table: {0}")]
    MalformedTable(String),
    #[error("holder-constant-undefined: the Hölder constant formula degenerates at alpha = 1")]
    HolderConstantUndefined,
    #[error("pair-too-far: y - x must be below b^(-l0-1)")]
    PairTooFar,
    #[error("degenerate-pair: x and y coincide")]
    DegeneratePair,
    #[error("family-too-large: dense scans need an overridden l0")]
    FamilyTooLarge,
    #[error("coordinate index {index} out of range (d = {d})")]
    IndexOutOfRange { index: u64, d: String },
    #[error("non-periodic-perturbation: the raw coordinate cannot be used as a perturbation")]
    NonPeriodicPerturbation,
    #[error("non-periodic function: the raw coordinate is only allowed as the last embedding coordinate")]
    NonPeriodic,
    #[error("insufficient-scales: need at least 3 records with positive count, found {0}")]
    InsufficientScales(usize),
    #[error("cutoff {cutoff} beyond the frequency grid (xi_max = {xi_max})")]
    CutoffBeyondGrid { cutoff: f64, xi_max: f64 },
    #[error("magnitude overflow: {0}")]
    Overflow(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument { field, reason: reason.into() }
    }

    pub(crate) fn domain(reason: impl Into<String>) -> Self {
        Error::Domain(reason.into())
    }
}

pub type Result<T> = core::result::Result<T, Error>;
