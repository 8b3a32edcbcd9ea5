use thiserror::Error;

/// Errors raised while evaluating a spectrum or its derived quantities.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    /// A constructor parameter lies outside the usable domain.
    #[error("spectrum `{name}`: parameter out of domain: {detail}")]
    OutOfDomain { name: String, detail: String },

    /// The eigenvalue rule hit a pole or produced a non-finite value.
    #[error("spectrum `{name}` is singular at n = {n}: {detail}")]
    Singular { name: String, n: u32, detail: String },

    /// A level needed for a Jackson factorial (or a dual level) is <= 0.
    #[error("spectrum `{name}`: level e_{n} = {value} is not positive")]
    NonPositive { name: String, n: u32, value: f64 },

    /// A table-backed spectrum was asked past its last entry.
    #[error("spectrum `{name}` defines levels up to n = {max_n}, requested n = {n}")]
    OutOfRange { name: String, n: u32, max_n: u32 },
}

/// Errors raised while constructing a state expansion.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BuildError {
    /// State parameters are unusable (negative squeeze magnitude, NaN, ...).
    #[error("invalid state parameters: {0}")]
    InvalidParams(String),

    /// The ratio test certified that the normalization sum has no finite
    /// value, so a normalized state does not exist at these parameters.
    #[error("series diverges for {what}: {detail}")]
    Divergent { what: String, detail: String },

    /// The truncation tolerance was not met within the hard cap.
    #[error("series did not meet the truncation tolerance within {cap} terms")]
    Inconclusive { cap: usize },

    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}
