use thiserror::Error;

/// Errors raised by the analysis and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("angle `{name}` = {value} rad is outside its admissible range")]
    AngleOutOfRange { name: &'static str, value: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("j*{omega} lies within {distance:e} of an eigenvalue of A")]
    Singular { omega: f64, distance: f64 },

    #[error("j*{omega} is not a simple imaginary-axis pole (multiplicity {multiplicity})")]
    NotSimplePole { omega: f64, multiplicity: usize },

    #[error("certificate check requires D = 0 (max |D| = {0:e})")]
    NonzeroFeedthrough(f64),

    #[error("trajectory samples are not uniformly spaced: {0}")]
    NonUniformSampling(String),

    #[error("non-finite value during integration at t = {t}")]
    NonFinite { t: f64 },

    #[error("invalid simulation config: {0}")]
    ConfigInvalid(String),

    #[error("requested attitude (phi = {phi:.4}, theta = {theta:.4}) reaches the tilt limit {limit:.4} rad")]
    AttitudeBound { phi: f64, theta: f64, limit: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
