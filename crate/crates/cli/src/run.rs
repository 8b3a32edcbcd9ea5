//! The `state`, `sweep` and `spectra` commands.
//!
//! All CSV output is byte-stable: floats are printed with 17 significant
//! digits, rows are emitted in input order, and sweep parallelism cannot
//! reorder or perturb anything (points are independent and collected by
//! index).

use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use gksq_core::{
    build_squeezed, build_squeezed_truncated, statistics, SqueezedParams, SqueezedState,
    StateClass, Verdict, Violation,
};

use crate::config::{CliError, ParamsSpec, SpectrumSpec, SweepDocument, TruncationSpec};

/// 17 significant digits; enough to round-trip any f64 and identical from
/// run to run.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Convergent => "convergent",
        Verdict::Divergent => "divergent",
        Verdict::Inconclusive => "inconclusive",
    }
}

pub struct StateRequest {
    pub spectrum: SpectrumSpec,
    pub class: StateClass,
    pub r: f64,
    pub phi: f64,
    pub alpha: f64,
    pub truncation: TruncationSpec,
}

fn build_state(
    spectrum: &gksq_core::Spectrum<f64>,
    class: StateClass,
    params: &SqueezedParams<f64>,
    truncation: &TruncationSpec,
) -> Result<SqueezedState<f64>, CliError> {
    match truncation.force_truncate {
        Some(n) => Ok(build_squeezed_truncated(class, spectrum, params, n)?),
        None => Ok(build_squeezed(class, spectrum, params, &truncation.policy()?)?),
    }
}

/// Emit `n, re(c), im(c), P(n)` for every Fock level up to the truncation.
pub fn cmd_state(req: &StateRequest, out: &mut dyn Write) -> Result<(), CliError> {
    let spectrum = req.spectrum.build()?;
    if spectrum.eigenvalue(0)? != 0.0 {
        return Err(CliError::Spectrum(format!(
            "spectrum `{}` has e_0 != 0",
            spectrum.name()
        )));
    }
    let params = SqueezedParams::new(req.r, req.phi, req.alpha);
    let state = build_state(&spectrum, req.class, &params, &req.truncation)?;

    // lost monotonicity is reported, not silently accepted
    let checked_to = 2 * state.truncation_index() as u32;
    for violation in spectrum.validate(checked_to).violations {
        if matches!(violation, Violation::NonMonotonic { .. }) {
            eprintln!("warning: spectrum `{}`: {violation}", spectrum.name());
        }
    }

    writeln!(
        out,
        "# spectrum={} class={} r={} phi={} alpha={}",
        req.spectrum.describe(),
        req.class,
        req.r,
        req.phi,
        req.alpha
    )?;
    if state.is_forced() {
        writeln!(out, "# truncated=forced n={}", state.truncation_index())?;
    }
    writeln!(
        out,
        "# terms={} verdict={} tail_bound={}",
        state.len(),
        verdict_name(state.convergence().verdict),
        fmt_float(state.tail_bound())
    )?;
    writeln!(out, "n,re_c,im_c,p")?;
    let zero = fmt_float(0.0);
    for k in 0..=2 * state.truncation_index() {
        if k % 2 == 0 {
            let c = state.amplitude(k / 2);
            writeln!(
                out,
                "{k},{},{},{}",
                fmt_float(c.re),
                fmt_float(c.im),
                fmt_float(state.probability(k / 2))
            )?;
        } else {
            writeln!(out, "{k},{zero},{zero},{zero}")?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    R,
    Alpha,
    Eta,
}

impl FromStr for SweepVar {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "r" => Ok(SweepVar::R),
            "alpha" => Ok(SweepVar::Alpha),
            "eta" => Ok(SweepVar::Eta),
            other => Err(format!("unknown sweep variable `{other}` (r, alpha or eta)")),
        }
    }
}

impl SweepVar {
    fn name(self) -> &'static str {
        match self {
            SweepVar::R => "r",
            SweepVar::Alpha => "alpha",
            SweepVar::Eta => "eta",
        }
    }
}

pub struct SweepRequest {
    pub spectrum: SpectrumSpec,
    pub class: StateClass,
    pub variable: SweepVar,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub fixed: ParamsSpec,
    pub truncation: TruncationSpec,
}

impl SweepRequest {
    pub fn from_document(doc: &SweepDocument) -> Result<Self, CliError> {
        let class = StateClass::from_str(&doc.class).map_err(CliError::Config)?;
        let variable = SweepVar::from_str(&doc.sweep.variable).map_err(CliError::Config)?;
        Ok(SweepRequest {
            spectrum: doc.spectrum.clone(),
            class,
            variable,
            start: doc.sweep.start,
            stop: doc.sweep.stop,
            steps: doc.sweep.steps,
            fixed: doc.params.clone(),
            truncation: doc.truncation.clone(),
        })
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.steps < 2 {
            return Err(CliError::Config("sweep needs at least 2 steps".into()));
        }
        if self.start.partial_cmp(&self.stop) != Some(std::cmp::Ordering::Less) {
            return Err(CliError::Config(format!(
                "sweep range start {} must be below stop {}",
                self.start, self.stop
            )));
        }
        let dup = match self.variable {
            SweepVar::R => self.fixed.r.is_some(),
            SweepVar::Alpha => self.fixed.alpha.is_some(),
            SweepVar::Eta => self.spectrum.eta.is_some(),
        };
        if dup {
            return Err(CliError::Config(format!(
                "swept variable `{}` also given as a fixed parameter",
                self.variable.name()
            )));
        }
        match self.variable {
            SweepVar::R => {}
            SweepVar::Alpha | SweepVar::Eta => {
                if self.fixed.r.is_none() {
                    return Err(CliError::Config(format!(
                        "sweeping `{}` needs a fixed --r",
                        self.variable.name()
                    )));
                }
            }
        }
        if self.variable == SweepVar::Eta && self.spectrum.kind != "trapped_ion" {
            return Err(CliError::Config(
                "sweeping `eta` requires --spectrum trapped_ion".into(),
            ));
        }
        Ok(())
    }
}

/// Emit `x, Q, var_x, var_p, mean_n, error` per grid point. Divergent
/// points become rows with a message in the error column instead of
/// aborting the sweep; an undefined Q is an empty field.
pub fn cmd_sweep(req: &SweepRequest, out: &mut dyn Write) -> Result<(), CliError> {
    req.validate()?;
    // fail early on an unusable spectrum spec
    let shared = if req.variable == SweepVar::Eta {
        None
    } else {
        Some(req.spectrum.build()?)
    };
    let phi = req.fixed.phi.unwrap_or(0.0);
    let alpha = req.fixed.alpha.unwrap_or(0.0);

    let grid: Vec<f64> = (0..req.steps)
        .map(|i| req.start + (req.stop - req.start) * i as f64 / (req.steps - 1) as f64)
        .collect();

    let rows: Vec<String> = grid
        .par_iter()
        .map(|&x| {
            let point = || -> Result<String, CliError> {
                let local;
                let spectrum = match (&shared, req.variable) {
                    (Some(s), _) => s,
                    (None, _) => {
                        let mut spec = req.spectrum.clone();
                        spec.eta = Some(x);
                        local = spec.build()?;
                        &local
                    }
                };
                let params = match req.variable {
                    SweepVar::R => SqueezedParams::new(x, phi, alpha),
                    SweepVar::Alpha => SqueezedParams::new(req.fixed.r.unwrap(), phi, x),
                    SweepVar::Eta => SqueezedParams::new(req.fixed.r.unwrap(), phi, alpha),
                };
                let state = build_state(spectrum, req.class, &params, &req.truncation)?;
                let report = statistics(&state);
                let q = report.mandel_q.map(fmt_float).unwrap_or_default();
                Ok(format!(
                    "{},{q},{},{},{},",
                    fmt_float(x),
                    fmt_float(report.var_x),
                    fmt_float(report.var_p),
                    fmt_float(report.mean_n)
                ))
            };
            point().unwrap_or_else(|err| {
                let msg = err.to_string().replace([',', '\n'], ";");
                format!("{},,,,,{msg}", fmt_float(x))
            })
        })
        .collect();

    writeln!(
        out,
        "# sweep var={} range={}:{}:{} spectrum={} class={} phi={} alpha={}",
        req.variable.name(),
        req.start,
        req.stop,
        req.steps,
        req.spectrum.describe(),
        req.class,
        phi,
        alpha,
    )?;
    if let Some(n) = req.truncation.force_truncate {
        writeln!(out, "# truncated=forced n={n}")?;
    }
    writeln!(out, "x,q,var_x,var_p,mean_n,error")?;
    for row in rows {
        writeln!(out, "{row}")?;
    }
    Ok(())
}

/// Tabulate a spectrum (levels and dual levels) and report its validation,
/// or list the built-in kinds when no spectrum is given.
pub fn cmd_spectra(
    spec: Option<&SpectrumSpec>,
    max_n: u32,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let Some(spec) = spec else {
        for kind in crate::config::SPECTRUM_KINDS {
            writeln!(out, "{kind}")?;
        }
        return Ok(());
    };
    let spectrum = spec.build()?;
    let report = spectrum.validate(max_n);
    writeln!(out, "# spectrum={} checked_to={}", spec.describe(), report.checked_to)?;
    for note in &report.notes {
        writeln!(out, "# note: {note}")?;
    }
    if report.is_valid() {
        writeln!(out, "# validation: valid")?;
    } else {
        for violation in &report.violations {
            writeln!(out, "# violation: {violation}")?;
        }
    }
    writeln!(out, "n,e_n,eps_n")?;
    for n in 0..=report.checked_to {
        let e = match spectrum.eigenvalue(n) {
            Ok(v) => fmt_float(v),
            Err(_) => break,
        };
        let eps = spectrum
            .dual_eigenvalue(n)
            .map(fmt_float)
            .unwrap_or_default();
        writeln!(out, "{n},{e},{eps}")?;
    }
    Ok(())
}
