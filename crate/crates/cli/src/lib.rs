//! Library side of the `gksq` command-line tool; the binary is a thin clap
//! wrapper over these modules, and the acceptance tests drive them
//! directly.

pub mod config;
pub mod run;
pub mod verify;

pub use config::{CliError, ParamsSpec, SpectrumSpec, SweepDocument, SweepSpec, TruncationSpec};
pub use run::{cmd_spectra, cmd_state, cmd_sweep, fmt_float, StateRequest, SweepRequest, SweepVar};
