//! Construction of the four squeezed-state classes and the coherent-state
//! pair for an arbitrary solvable spectrum.
//!
//! All four classes are superpositions of even Fock states |2n> with
//! amplitudes built from Jackson factorials of the spectrum levels `e_{2n}`
//! (classes I/II) or of the dual levels `eps_{2n}` (classes III/IV), a
//! temporal-stability phase `exp(-i alpha eps_{2n})`, and the squeeze kernel
//! `(exp(i phi) tanh r / 2)^n`:
//!
//! * class I:   c_n ~ e^{-i a e_{2n}}  sqrt([e_{2n}]!) / n!            * k^n
//! * class II:  c_n ~ e^{-i a e_{2n}}  (2n)! / (n! sqrt([e_{2n}]!))    * k^n
//! * class III: c_n ~ e^{-i a eps_{2n}} sqrt([eps_{2n}]!) / n!         * k^n
//! * class IV:  c_n ~ e^{-i a eps_{2n}} (2n)! / (n! sqrt([eps_{2n}]!)) * k^n
//!
//! Magnitudes are assembled in log space ((2n)! and the Jackson factorials
//! overflow doubles near n = 85) and only exponentiated relative to the
//! normalization sum. Whether a class converges at all depends on how fast
//! the levels grow: the square-root-factorial-in-the-numerator classes need
//! at most linear growth, the denominator classes at least linear. The
//! builders certify divergence with a ratio test and refuse to fabricate
//! truncation-dependent numbers; [`build_squeezed_truncated`] is the
//! explicit escape hatch and marks its output as forced.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use crate::error::{BuildError, SpectrumError};
use crate::scalar::{CompensatedSum, Scalar};
use crate::series::{
    adaptive_log_sum, classify, forced_log_sum, ratio_probe, ConvergenceReport, SeriesSum,
    SumOutcome, TruncationPolicy, Verdict,
};
use crate::spectra::{LevelSequence, Spectrum};

/// Window used when builders pre-screen a series for divergence.
const PROBE_WINDOW: usize = 64;

/// Squeeze and temporal-stability parameters: `xi = tanh r * exp(i phi)`,
/// plus the real parameter `alpha` carried by the phases. `alpha = 0` is
/// allowed and reduces the classes to plain nonlinear squeezed states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SqueezedParams<T: Scalar> {
    pub r: T,
    pub phi: T,
    pub alpha: T,
}

impl<T: Scalar> SqueezedParams<T> {
    pub fn new(r: T, phi: T, alpha: T) -> Self {
        SqueezedParams { r, phi, alpha }
    }

    fn check(&self) -> Result<(), BuildError> {
        if !self.r.is_finite() || self.r < T::zero() {
            return Err(BuildError::InvalidParams(format!(
                "squeeze magnitude r = {} must be finite and >= 0",
                self.r
            )));
        }
        if !self.phi.is_finite() || !self.alpha.is_finite() {
            return Err(BuildError::InvalidParams(
                "phi and alpha must be finite".into(),
            ));
        }
        Ok(())
    }
}

/// Which of the four expansions to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StateClass {
    I,
    II,
    III,
    IV,
}

impl StateClass {
    pub const ALL: [StateClass; 4] = [StateClass::I, StateClass::II, StateClass::III, StateClass::IV];

    /// Classes III/IV are built on the dual levels eps_{2n} = (2n)^2/e_{2n}.
    pub fn uses_dual_levels(self) -> bool {
        matches!(self, StateClass::III | StateClass::IV)
    }

    /// Classes II/IV carry sqrt([.]!) in the denominator together with the
    /// extra (2n)! factor.
    pub fn factorial_in_denominator(self) -> bool {
        matches!(self, StateClass::II | StateClass::IV)
    }
}

impl fmt::Display for StateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StateClass::I => "I",
            StateClass::II => "II",
            StateClass::III => "III",
            StateClass::IV => "IV",
        };
        f.write_str(s)
    }
}

impl FromStr for StateClass {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(StateClass::I),
            "II" | "2" => Ok(StateClass::II),
            "III" | "3" => Ok(StateClass::III),
            "IV" | "4" => Ok(StateClass::IV),
            other => Err(format!("unknown state class `{other}` (use I, II, III or IV)")),
        }
    }
}

/// One Fock amplitude stored as (log magnitude, phase).
#[derive(Clone, Copy, Debug)]
pub struct LogAmplitude<T: Scalar> {
    pub log_mag: T,
    pub phase: T,
}

impl<T: Scalar> LogAmplitude<T> {
    pub fn magnitude(&self) -> T {
        self.log_mag.exp()
    }

    pub fn value(&self) -> Complex<T> {
        Complex::from_polar(self.log_mag.exp(), self.phase)
    }
}

/// A normalized even-Fock squeezed state.
///
/// `coeffs[n]` is the amplitude on |2n>; magnitudes satisfy
/// sum |c_n|^2 = 1 up to roundoff. `levels[n]` holds the phase-generating
/// level (e_{2n} or eps_{2n} depending on the class), which is what time
/// evolution acts on.
#[derive(Clone, Debug)]
pub struct SqueezedState<T: Scalar> {
    class: StateClass,
    params: SqueezedParams<T>,
    spectrum_name: String,
    coeffs: Vec<LogAmplitude<T>>,
    levels: Vec<T>,
    log_norm: T,
    tail_bound: T,
    report: ConvergenceReport<T>,
    forced: bool,
}

impl<T: Scalar> SqueezedState<T> {
    pub fn class(&self) -> StateClass {
        self.class
    }

    pub fn params(&self) -> &SqueezedParams<T> {
        &self.params
    }

    pub fn spectrum_name(&self) -> &str {
        &self.spectrum_name
    }

    /// Number of retained coefficients (truncation index + 1).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest retained index n (the state extends to Fock level 2n).
    pub fn truncation_index(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn log_amplitude(&self, n: usize) -> LogAmplitude<T> {
        self.coeffs[n]
    }

    /// Amplitude on |2n>.
    pub fn amplitude(&self, n: usize) -> Complex<T> {
        self.coeffs[n].value()
    }

    /// |c_n|^2, the probability of Fock level 2n.
    pub fn probability(&self, n: usize) -> T {
        (self.coeffs[n].log_mag + self.coeffs[n].log_mag).exp()
    }

    pub fn coefficients(&self) -> &[LogAmplitude<T>] {
        &self.coeffs
    }

    /// Phase-generating level eps_{2n} (e_{2n} for classes I/II).
    pub fn phase_level(&self, n: usize) -> T {
        self.levels[n]
    }

    /// The normalization constant that was applied to the raw expansion.
    pub fn applied_norm(&self) -> T {
        self.log_norm.exp()
    }

    pub fn log_applied_norm(&self) -> T {
        self.log_norm
    }

    /// Relative estimate of the probability mass beyond the truncation.
    pub fn tail_bound(&self) -> T {
        self.tail_bound
    }

    pub fn convergence(&self) -> &ConvergenceReport<T> {
        &self.report
    }

    /// True when the truncation was imposed rather than chosen by the
    /// policy; every number derived from such a state is
    /// truncation-dependent.
    pub fn is_forced(&self) -> bool {
        self.forced
    }
}

struct LogFactorials<T: Scalar> {
    table: Vec<T>,
    acc: CompensatedSum<T>,
}

impl<T: Scalar> LogFactorials<T> {
    fn new() -> Self {
        LogFactorials {
            table: vec![T::zero()],
            acc: CompensatedSum::new(),
        }
    }

    fn get(&mut self, m: usize) -> T {
        while self.table.len() <= m {
            self.acc.add(T::from_index(self.table.len()).ln());
            self.table.push(self.acc.value());
        }
        self.table[m]
    }
}

/// Log-magnitude generator for the normalization terms of one class.
struct ClassTerms<'a, T: Scalar> {
    class: StateClass,
    spectrum: &'a Spectrum<T>,
    log_kernel: T,
    lgf: LogFactorials<T>,
}

impl<'a, T: Scalar> ClassTerms<'a, T> {
    fn new(class: StateClass, spectrum: &'a Spectrum<T>, r: T) -> Self {
        let half = T::from_f64(0.5).unwrap();
        ClassTerms {
            class,
            spectrum,
            log_kernel: (r.tanh() * half).ln(),
            lgf: LogFactorials::new(),
        }
    }

    fn log_jackson(&self, m: u32) -> Result<T, SpectrumError> {
        if self.class.uses_dual_levels() {
            self.spectrum.dual_jackson_log_factorial(m)
        } else {
            self.spectrum.jackson_log_factorial(m)
        }
    }

    /// ln |c_n| before normalization.
    fn log_amplitude(&mut self, n: usize) -> Result<T, SpectrumError> {
        let half = T::from_f64(0.5).unwrap();
        let lj = self.log_jackson(2 * n as u32)?;
        let ln_nf = self.lgf.get(n);
        let kernel = if n == 0 {
            T::zero()
        } else {
            T::from_index(n) * self.log_kernel
        };
        Ok(if self.class.factorial_in_denominator() {
            let ln_2nf = self.lgf.get(2 * n);
            ln_2nf - ln_nf - half * lj + kernel
        } else {
            half * lj - ln_nf + kernel
        })
    }

    /// ln of the normalization-sum term |c_n|^2.
    fn log_term(&mut self, n: usize) -> Result<T, SpectrumError> {
        let a = self.log_amplitude(n)?;
        Ok(a + a)
    }

    fn phase_level(&self, n: usize) -> Result<T, SpectrumError> {
        if self.class.uses_dual_levels() {
            self.spectrum.dual_eigenvalue(2 * n as u32)
        } else {
            self.spectrum.eigenvalue(2 * n as u32)
        }
    }
}

fn vacuum_state<T: Scalar>(
    class: StateClass,
    spectrum: &Spectrum<T>,
    params: &SqueezedParams<T>,
) -> SqueezedState<T> {
    SqueezedState {
        class,
        params: *params,
        spectrum_name: spectrum.name().to_string(),
        coeffs: vec![LogAmplitude {
            log_mag: T::zero(),
            phase: T::zero(),
        }],
        levels: vec![T::zero()],
        log_norm: T::zero(),
        tail_bound: T::zero(),
        report: ConvergenceReport::trivial(),
        forced: false,
    }
}

fn assemble<T: Scalar>(
    class: StateClass,
    spectrum: &Spectrum<T>,
    params: &SqueezedParams<T>,
    terms: &mut ClassTerms<'_, T>,
    sum: SeriesSum<T>,
    forced: bool,
) -> Result<SqueezedState<T>, SpectrumError> {
    let half = T::from_f64(0.5).unwrap();
    let half_total = half * sum.log_total;
    let mut coeffs = Vec::with_capacity(sum.log_terms.len());
    let mut levels = Vec::with_capacity(sum.log_terms.len());
    for (n, &lt) in sum.log_terms.iter().enumerate() {
        let level = terms.phase_level(n)?;
        let phase = T::from_index(n) * params.phi - params.alpha * level;
        coeffs.push(LogAmplitude {
            log_mag: half * lt - half_total,
            phase,
        });
        levels.push(level);
    }
    Ok(SqueezedState {
        class,
        params: *params,
        spectrum_name: spectrum.name().to_string(),
        coeffs,
        levels,
        log_norm: -half_total,
        tail_bound: sum.tail_bound,
        report: sum.report,
        forced,
    })
}

/// Build a normalized squeezed state of the given class.
///
/// Fails with [`BuildError::Divergent`] when the ratio test certifies that
/// the normalization sum has no finite value at these parameters, and with
/// [`BuildError::Inconclusive`] when the policy cap is exhausted first.
/// `r = 0` short-circuits to the exact vacuum.
pub fn build_squeezed<T: Scalar>(
    class: StateClass,
    spectrum: &Spectrum<T>,
    params: &SqueezedParams<T>,
    policy: &TruncationPolicy<T>,
) -> Result<SqueezedState<T>, BuildError> {
    params.check()?;
    if params.r == T::zero() {
        return Ok(vacuum_state(class, spectrum, params));
    }
    let mut terms = ClassTerms::new(class, spectrum, params.r);

    // A certified-divergent series is an error, not a silently truncated
    // state. Probe failures (table exhausted, spectrum pole beyond the range
    // the build itself needs) only downgrade the certificate.
    if let Ok(report) = ratio_probe(|n| terms.log_term(n), PROBE_WINDOW) {
        if report.verdict == Verdict::Divergent {
            return Err(divergent_error(class, spectrum, report));
        }
    }

    let sum = adaptive_log_sum(|n| terms.log_term(n), policy).map_err(|e| match e {
        SumOutcome::Term(err) => BuildError::Spectrum(err),
        SumOutcome::Divergent { at, detail } => BuildError::Divergent {
            what: format!("class {class} on `{}`", spectrum.name()),
            detail: format!("{detail} at n = {at}"),
        },
        SumOutcome::CapExceeded { cap } => BuildError::Inconclusive { cap },
    })?;
    Ok(assemble(class, spectrum, params, &mut terms, sum, false)?)
}

/// Build a state truncated at index `n_last` regardless of convergence.
///
/// The escape hatch for series with no finite normalization: the result is
/// well-defined as a vector but every derived number depends on `n_last`.
/// The state is marked forced and carries the ratio-test verdict over the
/// retained terms.
pub fn build_squeezed_truncated<T: Scalar>(
    class: StateClass,
    spectrum: &Spectrum<T>,
    params: &SqueezedParams<T>,
    n_last: usize,
) -> Result<SqueezedState<T>, BuildError> {
    params.check()?;
    if params.r == T::zero() {
        return Ok(vacuum_state(class, spectrum, params));
    }
    let mut terms = ClassTerms::new(class, spectrum, params.r);
    let sum = forced_log_sum(|n| terms.log_term(n), n_last).map_err(BuildError::Spectrum)?;
    Ok(assemble(class, spectrum, params, &mut terms, sum, true)?)
}

fn divergent_error<T: Scalar>(
    class: StateClass,
    spectrum: &Spectrum<T>,
    report: ConvergenceReport<T>,
) -> BuildError {
    BuildError::Divergent {
        what: format!("class {class} on `{}`", spectrum.name()),
        detail: format!(
            "term ratio reached {:.3} and kept growing over {} examined terms",
            report.limit_ratio.to_f64().unwrap_or(f64::NAN),
            report.terms_examined
        ),
    }
}

/// Ratio test on the normalization terms of `class` at squeeze magnitude
/// `r`, examining `window` successive term ratios.
pub fn convergence_check<T: Scalar>(
    class: StateClass,
    spectrum: &Spectrum<T>,
    r: T,
    window: usize,
) -> Result<ConvergenceReport<T>, SpectrumError> {
    if r == T::zero() {
        return Ok(ConvergenceReport::trivial());
    }
    let mut terms = ClassTerms::new(class, spectrum, r);
    ratio_probe(|n| terms.log_term(n), window.max(2))
}

/// Time evolution under the class Hamiltonian (the spectrum itself for
/// classes I/II, the dual for III/IV): each amplitude picks up
/// `exp(+i eps_{2n} t)`, which is coefficient-wise identical to rebuilding
/// the state with `alpha - t`. Normalization is untouched.
pub fn evolve<T: Scalar>(state: &SqueezedState<T>, t: T) -> SqueezedState<T> {
    let mut out = state.clone();
    for (c, &level) in out.coeffs.iter_mut().zip(state.levels.iter()) {
        c.phase += t * level;
    }
    out.params.alpha = out.params.alpha - t;
    out
}

/// Sign of the `alpha` argument in the nonlinearity factorial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// The factorial of the operator nonlinearity,
/// `[f^dag(+-alpha, n)]! = exp(-+ i alpha e_n) sqrt([e_n]!/n!)`,
/// evaluated in log space. Accepts either side of the spectrum/dual pair;
/// the dual variant replaces `e_n` by `eps_n` throughout.
pub fn nonlinearity_factorial<T: Scalar, L: LevelSequence<T>>(
    levels: &L,
    sign: Sign,
    alpha: T,
    n: u32,
) -> Result<Complex<T>, SpectrumError> {
    let half = T::from_f64(0.5).unwrap();
    let lj = levels.log_jackson_factorial(n)?;
    let mut lgf = LogFactorials::new();
    let log_mag = half * (lj - lgf.get(n as usize));
    let level = levels.level(n)?;
    let theta = match sign {
        Sign::Plus => -alpha * level,
        Sign::Minus => alpha * level,
    };
    Ok(Complex::from_polar(log_mag.exp(), theta))
}

/// A normalized coherent-state expansion over all Fock levels.
#[derive(Clone, Debug)]
pub struct CoherentState<T: Scalar> {
    spectrum_name: String,
    dual: bool,
    z: Complex<T>,
    alpha: T,
    coeffs: Vec<LogAmplitude<T>>,
    log_norm: T,
    tail_bound: T,
    report: ConvergenceReport<T>,
}

impl<T: Scalar> CoherentState<T> {
    pub fn spectrum_name(&self) -> &str {
        &self.spectrum_name
    }

    pub fn is_dual(&self) -> bool {
        self.dual
    }

    pub fn z(&self) -> Complex<T> {
        self.z
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Amplitude on |n>.
    pub fn amplitude(&self, n: usize) -> Complex<T> {
        self.coeffs[n].value()
    }

    pub fn probability(&self, n: usize) -> T {
        (self.coeffs[n].log_mag + self.coeffs[n].log_mag).exp()
    }

    pub fn coefficients(&self) -> &[LogAmplitude<T>] {
        &self.coeffs
    }

    /// The normalization constant that was applied to the raw expansion.
    pub fn applied_norm(&self) -> T {
        self.log_norm.exp()
    }

    pub fn tail_bound(&self) -> T {
        self.tail_bound
    }

    pub fn convergence(&self) -> &ConvergenceReport<T> {
        &self.report
    }
}

fn coherent_impl<T: Scalar>(
    spectrum: &Spectrum<T>,
    dual: bool,
    z: Complex<T>,
    alpha: T,
    policy: &TruncationPolicy<T>,
) -> Result<CoherentState<T>, BuildError> {
    if !z.re.is_finite() || !z.im.is_finite() || !alpha.is_finite() {
        return Err(BuildError::InvalidParams("z and alpha must be finite".into()));
    }
    let what = if dual {
        format!("dual coherent state on `{}`", spectrum.name())
    } else {
        format!("coherent state on `{}`", spectrum.name())
    };
    if z.norm_sqr() == T::zero() {
        return Ok(CoherentState {
            spectrum_name: spectrum.name().to_string(),
            dual,
            z,
            alpha,
            coeffs: vec![LogAmplitude {
                log_mag: T::zero(),
                phase: T::zero(),
            }],
            log_norm: T::zero(),
            tail_bound: T::zero(),
            report: ConvergenceReport::trivial(),
        });
    }
    let log_abs_z = z.norm().ln();
    let half = T::from_f64(0.5).unwrap();
    let log_jackson = |m: u32| -> Result<T, SpectrumError> {
        if dual {
            spectrum.dual_jackson_log_factorial(m)
        } else {
            spectrum.jackson_log_factorial(m)
        }
    };
    let log_amp = |n: usize| -> Result<T, SpectrumError> {
        let kernel = if n == 0 {
            T::zero()
        } else {
            T::from_index(n) * log_abs_z
        };
        Ok(kernel - half * log_jackson(n as u32)?)
    };

    if let Ok(report) = ratio_probe(|n| log_amp(n).map(|a| a + a), PROBE_WINDOW) {
        if report.verdict == Verdict::Divergent {
            return Err(BuildError::Divergent {
                what,
                detail: format!(
                    "term ratio reached {:.3} and kept growing over {} examined terms",
                    report.limit_ratio.to_f64().unwrap_or(f64::NAN),
                    report.terms_examined
                ),
            });
        }
    }
    let sum = adaptive_log_sum(|n| log_amp(n).map(|a| a + a), policy).map_err(|e| match e {
        SumOutcome::Term(err) => BuildError::Spectrum(err),
        SumOutcome::Divergent { at, detail } => BuildError::Divergent {
            what,
            detail: format!("{detail} at n = {at}"),
        },
        SumOutcome::CapExceeded { cap } => BuildError::Inconclusive { cap },
    })?;

    let arg_z = z.arg();
    let half_total = half * sum.log_total;
    let mut coeffs = Vec::with_capacity(sum.log_terms.len());
    for (n, &lt) in sum.log_terms.iter().enumerate() {
        let level = if dual {
            spectrum.dual_eigenvalue(n as u32)
        } else {
            spectrum.eigenvalue(n as u32)
        }
        .map_err(BuildError::Spectrum)?;
        let phase = T::from_index(n) * arg_z - alpha * level;
        coeffs.push(LogAmplitude {
            log_mag: half * lt - half_total,
            phase,
        });
    }
    Ok(CoherentState {
        spectrum_name: spectrum.name().to_string(),
        dual,
        z,
        alpha,
        coeffs,
        log_norm: -half_total,
        tail_bound: sum.tail_bound,
        report: sum.report,
    })
}

/// Coherent state `c_n ~ z^n exp(-i alpha e_n) / sqrt([e_n]!)`.
pub fn gk_coherent<T: Scalar>(
    spectrum: &Spectrum<T>,
    z: Complex<T>,
    alpha: T,
    policy: &TruncationPolicy<T>,
) -> Result<CoherentState<T>, BuildError> {
    coherent_impl(spectrum, false, z, alpha, policy)
}

/// Dual coherent state `c_n ~ z^n exp(-i alpha eps_n) / sqrt(mu(n))` with
/// `mu(n) = (n!)^2/[e_n]! = [eps_n]!`.
pub fn gk_coherent_dual<T: Scalar>(
    spectrum: &Spectrum<T>,
    z: Complex<T>,
    alpha: T,
    policy: &TruncationPolicy<T>,
) -> Result<CoherentState<T>, BuildError> {
    coherent_impl(spectrum, true, z, alpha, policy)
}

/// Ratio-test verdict over the forced terms of an already built state; used
/// to annotate forced truncations.
pub fn reclassify<T: Scalar>(state: &SqueezedState<T>) -> ConvergenceReport<T> {
    let log_terms: Vec<T> = state
        .coeffs
        .iter()
        .map(|c| c.log_mag + c.log_mag)
        .collect();
    classify(&log_terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::trapped_ion_nonlinearity;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn policy() -> TruncationPolicy<f64> {
        TruncationPolicy::default()
    }

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    fn max_coeff_diff(a: &SqueezedState<f64>, b: &SqueezedState<f64>) -> f64 {
        assert_eq!(a.len(), b.len(), "states truncate at different indices");
        (0..a.len())
            .map(|n| (a.amplitude(n) - b.amplitude(n)).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn zero_squeeze_is_exact_vacuum() {
        let spectra = [Spectrum::<f64>::harmonic(), Spectrum::hydrogen_like()];
        for s in &spectra {
            for class in StateClass::ALL {
                let st = build_squeezed(
                    class,
                    s,
                    &SqueezedParams::new(0.0, 0.3, 1.2),
                    &policy(),
                )
                .unwrap();
                assert_eq!(st.len(), 1);
                assert_eq!(st.amplitude(0), Complex::new(1.0, 0.0));
                assert_eq!(st.applied_norm(), 1.0);
            }
        }
    }

    #[test]
    fn harmonic_class_i_matches_closed_form() {
        // c_n = (cosh r)^{-1/2} sqrt((2n)!)/n! (tanh r / 2)^n at phi = alpha = 0
        let s = Spectrum::<f64>::harmonic();
        let r = 1.0f64;
        let st = build_squeezed(StateClass::I, &s, &SqueezedParams::new(r, 0.0, 0.0), &policy())
            .unwrap();
        let norm = (r.cosh()).powf(-0.5);
        assert_abs_diff_eq!(st.applied_norm(), norm, epsilon = 1e-12);
        let x = r.tanh() / 2.0;
        for n in 0..=15usize {
            let expect = norm * factorial(2 * n).sqrt() / factorial(n) * x.powi(n as i32);
            let got = st.amplitude(n);
            assert_abs_diff_eq!(got.re, expect, epsilon = 1e-13);
            assert_abs_diff_eq!(got.im, 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn all_classes_coincide_on_the_harmonic_spectrum() {
        let s = Spectrum::<f64>::harmonic();
        for &r in &[0.5, 1.0, 2.0] {
            for &alpha in &[0.0, 1.5] {
                let params = SqueezedParams::new(r, 0.7, alpha);
                let reference = build_squeezed(StateClass::I, &s, &params, &policy()).unwrap();
                for class in [StateClass::II, StateClass::III, StateClass::IV] {
                    let st = build_squeezed(class, &s, &params, &policy()).unwrap();
                    assert!(max_coeff_diff(&reference, &st) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn hydrogen_class_i_against_direct_summation_oracle() {
        // [e_{2n}]! telescopes to (2n+2)/(2(2n+1)); brute-force the
        // normalization in plain arithmetic and compare probabilities.
        let s = Spectrum::<f64>::hydrogen_like();
        let params = SqueezedParams::new(1.0, 0.0, 1.5);
        let st = build_squeezed(StateClass::I, &s, &params, &policy()).unwrap();

        let x = 1.0f64.tanh() / 2.0;
        let weights: Vec<f64> = (0..st.len())
            .map(|n| {
                let tn = (2 * n) as f64;
                let jackson = (tn + 2.0) / (2.0 * (tn + 1.0));
                jackson / factorial(n).powi(2) * x.powi(2 * n as i32)
            })
            .collect();
        let total: f64 = weights.iter().sum();
        for n in 0..st.len() {
            assert_relative_eq!(st.probability(n), weights[n] / total, max_relative = 1e-12);
        }
        // phases carry -alpha e_{2n} + n phi with phi = 0
        for n in 1..st.len().min(6) {
            let e2n = s.eigenvalue(2 * n as u32).unwrap();
            let expected = (-params.alpha * e2n).rem_euclid(2.0 * std::f64::consts::PI);
            let got = st.log_amplitude(n).phase.rem_euclid(2.0 * std::f64::consts::PI);
            assert_abs_diff_eq!(got, expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn coefficient_phases_follow_the_levels() {
        // phase(c_n) = -alpha e_{2n} + n phi (mod 2pi)
        let s = Spectrum::<f64>::harmonic();
        let (phi, alpha) = (0.7, 0.3);
        let st = build_squeezed(StateClass::I, &s, &SqueezedParams::new(1.0, phi, alpha), &policy())
            .unwrap();
        let tau = 2.0 * std::f64::consts::PI;
        for n in 0..st.len() {
            let expected = (-alpha * (2 * n) as f64 + n as f64 * phi).rem_euclid(tau);
            let got = st.log_amplitude(n).phase.rem_euclid(tau);
            assert_abs_diff_eq!(got, expected, epsilon = 1e-10);
        }
    }

    #[test]
    fn bounded_spectrum_denominator_class_diverges() {
        let s = Spectrum::<f64>::hydrogen_like();
        let err = build_squeezed(
            StateClass::II,
            &s,
            &SqueezedParams::new(0.5, 0.0, 0.0),
            &policy(),
        )
        .unwrap_err();
        assert!(matches!(err, BuildError::Divergent { .. }), "got {err:?}");
    }

    #[test]
    fn quadratic_spectrum_numerator_class_diverges() {
        // e_n ~ n^2 makes [e_{2n}]! outgrow (n!)^2 for any r > 0.
        let s = Spectrum::<f64>::poschl_teller(5.0).unwrap();
        for &r in &[0.1, 1.0, 2.5] {
            let err = build_squeezed(
                StateClass::I,
                &s,
                &SqueezedParams::new(r, 0.0, 0.0),
                &policy(),
            )
            .unwrap_err();
            assert!(matches!(err, BuildError::Divergent { .. }), "r = {r}: {err:?}");
        }
        // the dual-denominator class shares the weights of class I
        let err = build_squeezed(
            StateClass::IV,
            &s,
            &SqueezedParams::new(1.0, 0.0, 0.0),
            &policy(),
        )
        .unwrap_err();
        assert!(matches!(err, BuildError::Divergent { .. }));
    }

    #[test]
    fn forced_truncation_builds_divergent_series() {
        let s = Spectrum::<f64>::hydrogen_like();
        let params = SqueezedParams::new(0.5, 0.0, 0.0);
        let st = build_squeezed_truncated(StateClass::II, &s, &params, 20).unwrap();
        assert!(st.is_forced());
        assert_eq!(st.len(), 21);
        let total: f64 = (0..st.len()).map(|n| st.probability(n)).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        assert_eq!(reclassify(&st).verdict, Verdict::Divergent);
    }

    #[test]
    fn magnitudes_do_not_depend_on_alpha_or_phi() {
        let s = Spectrum::<f64>::hydrogen_like();
        let a = build_squeezed(
            StateClass::I,
            &s,
            &SqueezedParams::new(0.8, 0.0, 0.0),
            &policy(),
        )
        .unwrap();
        let b = build_squeezed(
            StateClass::I,
            &s,
            &SqueezedParams::new(0.8, 2.1, 3.7),
            &policy(),
        )
        .unwrap();
        assert_eq!(a.len(), b.len());
        for n in 0..a.len() {
            assert_abs_diff_eq!(
                a.log_amplitude(n).magnitude(),
                b.log_amplitude(n).magnitude(),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn class_pairs_share_magnitudes() {
        // [eps_m]! = (m!)^2/[e_m]! forces |c_n| of II == III and I == IV.
        let s = Spectrum::<f64>::hydrogen_like();
        let params = SqueezedParams::new(0.7, 0.0, 0.9);
        let ii = build_squeezed_truncated(StateClass::II, &s, &params, 15).unwrap();
        let iii = build_squeezed_truncated(StateClass::III, &s, &params, 15).unwrap();
        let i = build_squeezed_truncated(StateClass::I, &s, &params, 15).unwrap();
        let iv = build_squeezed_truncated(StateClass::IV, &s, &params, 15).unwrap();
        for n in 0..=15 {
            assert_relative_eq!(
                ii.log_amplitude(n).magnitude(),
                iii.log_amplitude(n).magnitude(),
                max_relative = 1e-11
            );
            assert_relative_eq!(
                i.log_amplitude(n).magnitude(),
                iv.log_amplitude(n).magnitude(),
                max_relative = 1e-11
            );
        }
    }

    #[test]
    fn class_i_ii_weight_duality() {
        // |c^I_n| |c^II_n| is proportional to (2n)!/(n!)^2 (tanh r/2)^{2n}.
        let s = Spectrum::<f64>::poschl_teller(5.0).unwrap();
        let params = SqueezedParams::new(1.0, 0.0, 0.0);
        let i = build_squeezed_truncated(StateClass::I, &s, &params, 12).unwrap();
        let ii = build_squeezed_truncated(StateClass::II, &s, &params, 12).unwrap();
        let x = 1.0f64.tanh() / 2.0;
        let c0 = i.log_amplitude(0).magnitude() * ii.log_amplitude(0).magnitude();
        for n in 0..=12usize {
            let weight = factorial(2 * n) / factorial(n).powi(2) * x.powi(2 * n as i32);
            let prod = i.log_amplitude(n).magnitude() * ii.log_amplitude(n).magnitude();
            assert_relative_eq!(prod / weight, c0, max_relative = 1e-10);
        }
    }

    #[test]
    fn alpha_zero_reduces_to_nonlinear_squeezed_states() {
        // Through e_n = n f(n)^2 the class-I expansion must carry
        // |c_n| ~ sqrt((2n)!)/n! |[f(2n)]!| (tanh r/2)^n.
        let eta = 0.3f64;
        let s = Spectrum::from_nonlinearity("ti_f", trapped_ion_nonlinearity(eta));
        let params = SqueezedParams::new(0.6, 0.0, 0.0);
        let st = build_squeezed(StateClass::I, &s, &params, &policy()).unwrap();

        let f = trapped_ion_nonlinearity(eta);
        let x = 0.6f64.tanh() / 2.0;
        let weights: Vec<f64> = (0..st.len())
            .map(|n| {
                let f_fact: f64 = (1..=2 * n as u32).map(|k| f(k)).product();
                factorial(2 * n).sqrt() / factorial(n) * f_fact.abs() * x.powi(n as i32)
            })
            .collect();
        let total: f64 = weights.iter().map(|w| w * w).sum();
        let scale = total.sqrt();
        for n in 0..st.len() {
            assert_relative_eq!(
                st.log_amplitude(n).magnitude(),
                weights[n] / scale,
                max_relative = 1e-12
            );
        }

        // and the induced spectrum agrees with the built-in trapped ion rule
        let ti = Spectrum::trapped_ion(eta).unwrap();
        let direct = build_squeezed(StateClass::I, &ti, &params, &policy()).unwrap();
        assert!(max_coeff_diff(&st, &direct) < 1e-12);
    }

    #[test]
    fn trapped_ion_spiky_spectrum_still_converges() {
        let s = Spectrum::<f64>::trapped_ion(0.5).unwrap();
        let st = build_squeezed(
            StateClass::I,
            &s,
            &SqueezedParams::new(1.0, 0.0, 0.0),
            &policy(),
        )
        .unwrap();
        let total: f64 = (0..st.len()).map(|n| st.probability(n)).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        // concentrated far from the vacuum: the Fock-6/8 levels dominate
        assert!(st.probability(3) + st.probability(4) > 0.9);
    }

    #[test]
    fn evolve_is_an_alpha_shift() {
        let s = Spectrum::<f64>::harmonic();
        let st = build_squeezed(
            StateClass::I,
            &s,
            &SqueezedParams::new(1.0, 0.0, 0.5),
            &policy(),
        )
        .unwrap();

        let same = evolve(&st, 0.0);
        assert!(max_coeff_diff(&st, &same) == 0.0);

        let moved = evolve(&st, 0.3);
        let rebuilt = build_squeezed(
            StateClass::I,
            &s,
            &SqueezedParams::new(1.0, 0.0, 0.2),
            &policy(),
        )
        .unwrap();
        assert!(max_coeff_diff(&moved, &rebuilt) < 1e-12);
        assert_abs_diff_eq!(moved.params().alpha, 0.2, epsilon = 1e-15);

        // additivity and exact norm preservation
        let two_step = evolve(&evolve(&st, 0.9), 0.8);
        let one_step = evolve(&st, 1.7);
        assert!(max_coeff_diff(&two_step, &one_step) < 1e-13);
        let norm: f64 = (0..two_step.len()).map(|n| two_step.probability(n)).sum();
        let norm0: f64 = (0..st.len()).map(|n| st.probability(n)).sum();
        assert_abs_diff_eq!(norm, norm0, epsilon = 1e-15);
    }

    #[test]
    fn convergence_check_examples() {
        let h = Spectrum::<f64>::harmonic();
        let report = convergence_check(StateClass::I, &h, 1.0, 64).unwrap();
        assert_eq!(report.verdict, Verdict::Convergent);
        // limiting ratio tends to tanh^2 r
        assert!((report.limit_ratio - 1.0f64.tanh().powi(2)).abs() < 0.02);

        let hy = Spectrum::<f64>::hydrogen_like();
        let report = convergence_check(StateClass::II, &hy, 0.5, 64).unwrap();
        assert_eq!(report.verdict, Verdict::Divergent);
        assert!(report.limit_ratio >= 1.0);

        let report = convergence_check(StateClass::IV, &hy, 0.0, 64).unwrap();
        assert_eq!(report.verdict, Verdict::Convergent);
    }

    #[test]
    fn invalid_params_are_rejected() {
        let s = Spectrum::<f64>::harmonic();
        for bad in [
            SqueezedParams::new(-0.5, 0.0, 0.0),
            SqueezedParams::new(f64::NAN, 0.0, 0.0),
            SqueezedParams::new(1.0, f64::INFINITY, 0.0),
        ] {
            let err = build_squeezed(StateClass::I, &s, &bad, &policy()).unwrap_err();
            assert!(matches!(err, BuildError::InvalidParams(_)));
        }
    }

    #[test]
    fn coherent_state_on_harmonic_is_poissonian() {
        let s = Spectrum::<f64>::harmonic();
        let z = Complex::new(1.3, 0.4);
        let st = gk_coherent(&s, z, 0.0, &policy()).unwrap();
        let nsq = z.norm_sqr();
        for n in 0..st.len().min(25) {
            let expect = (-nsq).exp() * nsq.powi(n as i32) / factorial(n);
            assert_abs_diff_eq!(st.probability(n), expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn coherent_state_at_origin_is_vacuum() {
        let s = Spectrum::<f64>::hydrogen_like();
        let st = gk_coherent(&s, Complex::new(0.0, 0.0), 1.0, &policy()).unwrap();
        assert_eq!(st.len(), 1);
        assert_eq!(st.probability(0), 1.0);
    }

    #[test]
    fn coherent_state_hydrogen_against_product_oracle() {
        let s = Spectrum::<f64>::hydrogen_like();
        let z = Complex::new(0.5, 0.0);
        let st = gk_coherent(&s, z, 1.0, &policy()).unwrap();
        // |c_n|^2 ~ |z|^{2n} / [e_n]! with [e_n]! = (n+2)/(2(n+1))
        let weights: Vec<f64> = (0..st.len())
            .map(|n| {
                let nf = n as f64;
                0.25f64.powi(n as i32) * (2.0 * (nf + 1.0)) / (nf + 2.0)
            })
            .collect();
        let total: f64 = weights.iter().sum();
        for n in 0..st.len() {
            assert_relative_eq!(st.probability(n), weights[n] / total, max_relative = 1e-12);
        }
    }

    #[test]
    fn coherent_state_hydrogen_diverges_outside_unit_disk() {
        let s = Spectrum::<f64>::hydrogen_like();
        let err = gk_coherent(&s, Complex::new(1.05, 0.0), 1.0, &policy()).unwrap_err();
        assert!(matches!(err, BuildError::Divergent { .. }));
    }

    #[test]
    fn dual_coherent_state_matches_on_harmonic_and_square_well_oracle() {
        let h = Spectrum::<f64>::harmonic();
        let z = Complex::new(0.8, -0.3);
        let plain = gk_coherent(&h, z, 0.7, &policy()).unwrap();
        let dual = gk_coherent_dual(&h, z, 0.7, &policy()).unwrap();
        assert_eq!(plain.len(), dual.len());
        for n in 0..plain.len() {
            assert!((plain.amplitude(n) - dual.amplitude(n)).norm() < 1e-13);
        }

        // square well: mu(n) = (n!)^2/[e_n]! = 2 n!/(n+2)! = 2/((n+1)(n+2))
        let sw = Spectrum::<f64>::square_well();
        let st = gk_coherent_dual(&sw, Complex::new(0.3, 0.0), 0.5, &policy()).unwrap();
        let weights: Vec<f64> = (0..st.len())
            .map(|n| {
                let nf = n as f64;
                0.09f64.powi(n as i32) * (nf + 1.0) * (nf + 2.0) / 2.0
            })
            .collect();
        let total: f64 = weights.iter().sum();
        for n in 0..st.len() {
            assert_relative_eq!(st.probability(n), weights[n] / total, max_relative = 1e-12);
        }
    }

    #[test]
    fn nonlinearity_factorial_identities() {
        let h = Spectrum::<f64>::harmonic();
        // [n]!/n! = 1, so only the phase e^{-i alpha n} remains
        let v = nonlinearity_factorial(&h, Sign::Plus, 0.7, 5).unwrap();
        assert_abs_diff_eq!(v.norm(), 1.0, epsilon = 1e-13);
        assert!((v - Complex::from_polar(1.0, -0.7 * 5.0)).norm() < 1e-12);

        // n = 0: empty products
        let v = nonlinearity_factorial(&h, Sign::Minus, 3.0, 0).unwrap();
        assert_eq!(v, Complex::new(1.0, 0.0));

        // hydrogen at alpha = 0, n = 3: sqrt((5/8)/6)
        let hy = Spectrum::<f64>::hydrogen_like();
        let v = nonlinearity_factorial(&hy, Sign::Plus, 0.0, 3).unwrap();
        assert_relative_eq!(v.re, ((5.0 / 8.0) / 6.0f64).sqrt(), max_relative = 1e-13);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);

        // dual variant accepts the dual view directly
        let d = hy.dual();
        let v = nonlinearity_factorial(&d, Sign::Plus, 0.0, 2).unwrap();
        // [eps_2]! = (4/3)(9/2)/... = eps_1 eps_2 = (4/3)(4.5) = 6, 2! = 2
        assert_relative_eq!(v.re, (6.0f64 / 2.0).sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn f32_smoke() {
        let s = Spectrum::<f32>::harmonic();
        let st = build_squeezed(
            StateClass::I,
            &s,
            &SqueezedParams::new(1.0f32, 0.0, 0.0),
            &TruncationPolicy {
                tolerance: 1e-7,
                tail_window: 5,
                hard_cap: 500,
            },
        )
        .unwrap();
        let total: f32 = (0..st.len()).map(|n| st.probability(n)).sum();
        assert!((total - 1.0).abs() < 1e-5);
    }
}
