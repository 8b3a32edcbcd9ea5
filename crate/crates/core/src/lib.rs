//! Gazeau-Klauder squeezed states for arbitrary solvable spectra.
//!
//! Given an eigenvalue sequence `e_n` (harmonic, Poeschl-Teller, infinite
//! square well, hydrogen-like, trapped-ion, or user-supplied), this crate
//! builds the four classes of even-Fock squeezed-state expansions driven by
//! Jackson factorials of `e_{2n}` and of the dual levels
//! `eps_{2n} = (2n)^2/e_{2n}`, together with the coherent-state pair over
//! all Fock levels, and computes their photon statistics: number
//! distribution, Mandel Q, and quadrature variances.
//!
//! Numerical backbone:
//!
//! * factorial-sized products live in log space and are exponentiated only
//!   relative to the running normalization sum;
//! * every series is screened by a ratio test, and certified-divergent
//!   normalization sums are a hard error rather than a silently truncated
//!   number ([`build_squeezed_truncated`] is the explicit, labeled escape
//!   hatch);
//! * spectra memoize their levels and log-factorials behind a mutex, so
//!   instances are immutable, cheap to query repeatedly, and safe to share
//!   across threads.
//!
//! The math is generic over the floating-point scalar through the
//! [`Scalar`] trait (`f32` or `f64`); the `*64` aliases below pin the `f64`
//! instantiations the CLI and the reference tolerances are written against.

pub mod error;
pub mod laguerre;
mod scalar;
mod series;
pub mod spectra;
pub mod states;
pub mod stats;

pub use error::{BuildError, SpectrumError};
pub use laguerre::laguerre;
pub use scalar::Scalar;
pub use series::{ConvergenceReport, TruncationPolicy, Verdict};
pub use spectra::{
    trapped_ion_nonlinearity, DualSpectrum, LevelSequence, Spectrum, ValidationReport, Violation,
};
pub use states::{
    build_squeezed, build_squeezed_truncated, convergence_check, evolve, gk_coherent,
    gk_coherent_dual, nonlinearity_factorial, reclassify, CoherentState, LogAmplitude, Sign,
    SqueezedParams, SqueezedState, StateClass,
};
pub use stats::{
    a_squared_expectation, mandel_q, number_moments, photon_distribution, quadrature_variances,
    statistics, StatisticsReport,
};

/// `f64` instantiations of the core types.
pub type Spectrum64 = Spectrum<f64>;
pub type DualSpectrum64<'a> = DualSpectrum<'a, f64>;
pub type SqueezedParams64 = SqueezedParams<f64>;
pub type SqueezedState64 = SqueezedState<f64>;
pub type CoherentState64 = CoherentState<f64>;
pub type TruncationPolicy64 = TruncationPolicy<f64>;
pub type ConvergenceReport64 = ConvergenceReport<f64>;
pub type StatisticsReport64 = StatisticsReport<f64>;
