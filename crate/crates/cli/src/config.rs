//! Spectrum/sweep configuration shared by the flag and config-file front
//! ends, and the error-to-exit-code mapping.

use std::fmt;

use serde::Deserialize;

use gksq_core::{BuildError, Spectrum, SpectrumError, TruncationPolicy};

/// CLI-level failure, carrying its process exit code:
/// 2 config, 3 divergence, 4 invalid spectrum, 1 anything else.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Divergent(String),
    Spectrum(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Divergent(_) => 3,
            CliError::Spectrum(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Divergent(msg) => write!(f, "{msg}"),
            CliError::Spectrum(msg) => write!(f, "{msg}"),
            CliError::Io(err) => write!(f, "io error: {err}"),
        }
    }
}

impl From<BuildError> for CliError {
    fn from(err: BuildError) -> Self {
        match err {
            BuildError::InvalidParams(msg) => CliError::Config(msg),
            BuildError::Divergent { .. } | BuildError::Inconclusive { .. } => {
                CliError::Divergent(err.to_string())
            }
            BuildError::Spectrum(e) => CliError::Spectrum(e.to_string()),
        }
    }
}

impl From<SpectrumError> for CliError {
    fn from(err: SpectrumError) -> Self {
        CliError::Spectrum(err.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err)
    }
}

/// One spectrum entry: a kind plus its numeric parameters, or an explicit
/// level table.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSpec {
    pub kind: String,
    #[serde(default)]
    pub nu: Option<f64>,
    #[serde(default)]
    pub eta: Option<f64>,
    #[serde(default)]
    pub levels: Option<Vec<f64>>,
}

pub const SPECTRUM_KINDS: &[&str] = &[
    "harmonic",
    "poschl_teller",
    "square_well",
    "hydrogen",
    "trapped_ion",
    "table",
];

impl SpectrumSpec {
    pub fn from_flags(
        kind: Option<&str>,
        nu: Option<f64>,
        eta: Option<f64>,
        levels: Option<&str>,
    ) -> Result<Self, CliError> {
        let kind = kind
            .ok_or_else(|| CliError::Config("--spectrum is required".into()))?
            .to_string();
        let levels = match levels {
            None => None,
            Some(csv) => Some(
                csv.split(',')
                    .map(|tok| {
                        tok.trim()
                            .parse::<f64>()
                            .map_err(|_| CliError::Config(format!("bad level value `{tok}`")))
                    })
                    .collect::<Result<Vec<f64>, _>>()?,
            ),
        };
        Ok(SpectrumSpec {
            kind,
            nu,
            eta,
            levels,
        })
    }

    pub fn build(&self) -> Result<Spectrum<f64>, CliError> {
        match self.kind.as_str() {
            "harmonic" => Ok(Spectrum::harmonic()),
            "poschl_teller" => {
                let nu = self
                    .nu
                    .ok_or_else(|| CliError::Config("poschl_teller needs --nu".into()))?;
                Ok(Spectrum::poschl_teller(nu)?)
            }
            "square_well" => Ok(Spectrum::square_well()),
            "hydrogen" => Ok(Spectrum::hydrogen_like()),
            "trapped_ion" => {
                let eta = self
                    .eta
                    .ok_or_else(|| CliError::Config("trapped_ion needs --eta".into()))?;
                Ok(Spectrum::trapped_ion(eta)?)
            }
            "table" => {
                let levels = self
                    .levels
                    .clone()
                    .ok_or_else(|| CliError::Config("table needs --levels".into()))?;
                Ok(Spectrum::from_table("table", levels)?)
            }
            other => Err(CliError::Config(format!(
                "unknown spectrum kind `{other}` (expected one of {})",
                SPECTRUM_KINDS.join(", ")
            ))),
        }
    }

    pub fn describe(&self) -> String {
        let mut s = self.kind.clone();
        if let Some(nu) = self.nu {
            s.push_str(&format!(" nu={nu}"));
        }
        if let Some(eta) = self.eta {
            s.push_str(&format!(" eta={eta}"));
        }
        if let Some(levels) = &self.levels {
            s.push_str(&format!(" levels[{}]", levels.len()));
        }
        s
    }
}

/// Truncation knobs as they appear on the command line / in a document.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationSpec {
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub max_n: Option<usize>,
    #[serde(default)]
    pub force_truncate: Option<usize>,
}

impl TruncationSpec {
    pub fn policy(&self) -> Result<TruncationPolicy<f64>, CliError> {
        let mut policy = TruncationPolicy::default();
        if let Some(tol) = self.tol {
            if !(tol > 0.0 && tol < 1.0) {
                return Err(CliError::Config(format!("--tol {tol} must be in (0, 1)")));
            }
            policy.tolerance = tol;
        }
        if let Some(cap) = self.max_n {
            if cap < 1 {
                return Err(CliError::Config("--max-n must be >= 1".into()));
            }
            policy.hard_cap = cap;
        }
        Ok(policy)
    }
}

/// Fixed state parameters; the swept one stays `None`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    #[serde(default)]
    pub r: Option<f64>,
    #[serde(default)]
    pub phi: Option<f64>,
    #[serde(default)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub variable: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

/// Config-file alternative to the sweep flags: one document holding the
/// spectrum spec and the sweep spec.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepDocument {
    pub spectrum: SpectrumSpec,
    pub class: String,
    #[serde(default)]
    pub params: ParamsSpec,
    pub sweep: SweepSpec,
    #[serde(default)]
    pub truncation: TruncationSpec,
}
