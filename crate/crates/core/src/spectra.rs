//! Eigenvalue sequences for solvable systems and their derived quantities.
//!
//! A [`Spectrum`] is a named rule `n -> e_n` (dimensionless, hbar = omega = 1)
//! with `e_0 = 0`. Everything downstream is driven by two quantities:
//!
//! * the levels `e_n` themselves, and
//! * the Jackson factorial `[e_n]! = e_1 e_2 ... e_n`, kept as `ln [e_n]!`
//!   because the products overflow `f64` long before the state expansions
//!   stop needing terms.
//!
//! The dual system has levels `eps_n = n^2 / e_n`, so `[eps_n]! = (n!)^2 / [e_n]!`.
//! Both sequences are memoized per instance behind a mutex; instances are
//! immutable after construction and safe to share across threads.

use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::SpectrumError;
use crate::laguerre::laguerre_pair;
use crate::scalar::{CompensatedSum, Scalar};

/// Named eigenvalue sequence of a solvable system.
pub struct Spectrum<T: Scalar> {
    name: String,
    rule: Rule<T>,
    cache: Mutex<Cache<T>>,
}

#[derive(Clone)]
enum Rule<T: Scalar> {
    /// e_n = n
    Harmonic,
    /// e_n = n (n + nu)
    PoschlTeller { nu: T },
    /// e_n = n (n + 2)
    SquareWell,
    /// e_n = 1 - 1/(n+1)^2
    HydrogenLike,
    /// e_n = n / (n+1)^2 * (L_n^1(eta^2) / L_n^0(eta^2))^2
    TrappedIon { eta: T },
    /// Explicit list of levels.
    Table(Arc<Vec<T>>),
    /// e_n = n f(n)^2 for a user-supplied nonlinearity f.
    Nonlinearity(Arc<dyn Fn(u32) -> T + Send + Sync>),
}

struct Cache<T: Scalar> {
    levels: Vec<T>,
    /// First index (>= 1, if any) whose level could not be produced; nothing
    /// at or beyond it is usable.
    hard_stop: Option<(u32, SpectrumError)>,
    /// First index (>= 1, if any) with e_n <= 0; Jackson factorials and dual
    /// quantities stop being defined there.
    first_nonpositive: Option<u32>,
    log_fact: Vec<T>,
    log_fact_acc: CompensatedSum<T>,
    dual_log_fact: Vec<T>,
    dual_log_fact_acc: CompensatedSum<T>,
}

impl<T: Scalar> Cache<T> {
    fn empty() -> Self {
        Cache {
            levels: Vec::new(),
            hard_stop: None,
            first_nonpositive: None,
            log_fact: vec![T::zero()],
            log_fact_acc: CompensatedSum::new(),
            dual_log_fact: vec![T::zero()],
            dual_log_fact_acc: CompensatedSum::new(),
        }
    }
}

impl<T: Scalar> Spectrum<T> {
    /// Shifted harmonic oscillator, `e_n = n`.
    pub fn harmonic() -> Self {
        Self::new("harmonic", Rule::Harmonic)
    }

    /// Poeschl-Teller well, `e_n = n (n + nu)`.
    ///
    /// The potential itself requires `nu > 2`; smaller values (down to the
    /// positivity limit `nu > -1`) are accepted and flagged by
    /// [`Spectrum::validate`] as a note, since `nu = 2` is exactly the
    /// infinite square well.
    pub fn poschl_teller(nu: T) -> Result<Self, SpectrumError> {
        if !nu.is_finite() || nu <= -T::one() {
            return Err(SpectrumError::OutOfDomain {
                name: "poschl_teller".into(),
                detail: format!("nu = {nu} must be finite and > -1"),
            });
        }
        Ok(Self::new("poschl_teller", Rule::PoschlTeller { nu }))
    }

    /// Infinite square well, `e_n = n (n + 2)`.
    pub fn square_well() -> Self {
        Self::new("square_well", Rule::SquareWell)
    }

    /// Hydrogen-like spectrum, `e_n = 1 - 1/(n+1)^2`, bounded above by 1.
    pub fn hydrogen_like() -> Self {
        Self::new("hydrogen", Rule::HydrogenLike)
    }

    /// Center-of-mass motion of a trapped ion with Lamb-Dicke parameter
    /// `eta`: `e_n = n/(n+1)^2 * (L_n^1(eta^2)/L_n^0(eta^2))^2`.
    ///
    /// Zeros of the Laguerre polynomials sweep past `eta^2` as `n` grows, so
    /// for any `eta > 0` the sequence eventually spikes and loses
    /// monotonicity; run [`Spectrum::validate`] over the range you intend to
    /// use rather than assuming a safe `eta`.
    pub fn trapped_ion(eta: T) -> Result<Self, SpectrumError> {
        if !eta.is_finite() || eta < T::zero() {
            return Err(SpectrumError::OutOfDomain {
                name: "trapped_ion".into(),
                detail: format!("eta = {eta} must be finite and >= 0"),
            });
        }
        Ok(Self::new("trapped_ion", Rule::TrappedIon { eta }))
    }

    /// Spectrum given by an explicit table of levels starting at `e_0`.
    pub fn from_table(name: impl Into<String>, levels: Vec<T>) -> Result<Self, SpectrumError> {
        let name = name.into();
        if levels.is_empty() {
            return Err(SpectrumError::OutOfDomain {
                name,
                detail: "level table is empty".into(),
            });
        }
        Ok(Self::new(name, Rule::Table(Arc::new(levels))))
    }

    /// Spectrum induced by a nonlinearity function, `e_n = n f(n)^2`.
    ///
    /// With `alpha = 0` the squeezed-state classes built on this spectrum
    /// reduce to the nonlinear (f-deformed) squeezed states of `f`.
    pub fn from_nonlinearity(
        name: impl Into<String>,
        f: impl Fn(u32) -> T + Send + Sync + 'static,
    ) -> Self {
        Self::new(name.into(), Rule::Nonlinearity(Arc::new(f)))
    }

    fn new(name: impl Into<String>, rule: Rule<T>) -> Self {
        Spectrum {
            name: name.into(),
            rule,
            cache: Mutex::new(Cache::empty()),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Level `e_n`.
    pub fn eigenvalue(&self, n: u32) -> Result<T, SpectrumError> {
        let mut cache = self.cache.lock().unwrap();
        self.ensure(&mut cache, n)?;
        Ok(cache.levels[n as usize])
    }

    /// Dual level `eps_n = n^2 / e_n` (`eps_0 = 0`).
    pub fn dual_eigenvalue(&self, n: u32) -> Result<T, SpectrumError> {
        if n == 0 {
            return Ok(T::zero());
        }
        let e = self.eigenvalue(n)?;
        if e == T::zero() {
            return Err(SpectrumError::Singular {
                name: self.name.clone(),
                n,
                detail: "dual level n^2/e_n undefined where e_n = 0".into(),
            });
        }
        let nf = T::from_u32(n).unwrap();
        Ok(nf * nf / e)
    }

    /// `ln [e_n]!` with `[e_0]! = 1`; requires `e_k > 0` for `1 <= k <= n`.
    pub fn jackson_log_factorial(&self, n: u32) -> Result<T, SpectrumError> {
        let mut cache = self.cache.lock().unwrap();
        self.ensure(&mut cache, n)?;
        self.guard_positive(&cache, n)?;
        Ok(cache.log_fact[n as usize])
    }

    /// `ln [eps_n]!` for the dual levels; equal to `2 ln n! - ln [e_n]!`.
    pub fn dual_jackson_log_factorial(&self, n: u32) -> Result<T, SpectrumError> {
        let mut cache = self.cache.lock().unwrap();
        self.ensure(&mut cache, n)?;
        self.guard_positive(&cache, n)?;
        Ok(cache.dual_log_fact[n as usize])
    }

    /// View of the dual system (levels `eps_n`, factorials `[eps_n]!`).
    pub fn dual(&self) -> DualSpectrum<'_, T> {
        DualSpectrum { base: self }
    }

    fn guard_positive(&self, cache: &Cache<T>, n: u32) -> Result<(), SpectrumError> {
        if let Some(bad) = cache.first_nonpositive {
            if bad <= n {
                return Err(SpectrumError::NonPositive {
                    name: self.name.clone(),
                    n: bad,
                    value: cache.levels[bad as usize].to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(())
    }

    /// Extend the memoized tables so `levels[0..=n]` exists (or fail with the
    /// recorded hard error).
    fn ensure(&self, cache: &mut Cache<T>, n: u32) -> Result<(), SpectrumError> {
        if let Some((stop, ref err)) = cache.hard_stop {
            if stop <= n {
                return Err(err.clone());
            }
        }
        while cache.levels.len() <= n as usize {
            let m = cache.levels.len() as u32;
            let value = match self.raw_level(m) {
                Ok(v) if v.is_finite() => v,
                Ok(v) => {
                    let err = SpectrumError::Singular {
                        name: self.name.clone(),
                        n: m,
                        detail: format!("level evaluated to {v}"),
                    };
                    cache.hard_stop = Some((m, err.clone()));
                    return Err(err);
                }
                Err(err) => {
                    cache.hard_stop = Some((m, err.clone()));
                    return Err(err);
                }
            };
            cache.levels.push(value);
            if m >= 1 && cache.first_nonpositive.is_none() {
                if value > T::zero() {
                    let mf = T::from_u32(m).unwrap();
                    cache.log_fact_acc.add(value.ln());
                    cache.log_fact.push(cache.log_fact_acc.value());
                    // ln eps_m = 2 ln m - ln e_m
                    cache
                        .dual_log_fact_acc
                        .add(mf.ln() + mf.ln() - value.ln());
                    cache.dual_log_fact.push(cache.dual_log_fact_acc.value());
                } else {
                    cache.first_nonpositive = Some(m);
                }
            }
        }
        Ok(())
    }

    fn raw_level(&self, n: u32) -> Result<T, SpectrumError> {
        let nf = T::from_u32(n).unwrap();
        match &self.rule {
            Rule::Harmonic => Ok(nf),
            Rule::PoschlTeller { nu } => Ok(nf * (nf + *nu)),
            Rule::SquareWell => Ok(nf * (nf + T::from_u32(2).unwrap())),
            Rule::HydrogenLike => {
                let np1 = nf + T::one();
                Ok(nf / np1 * ((nf + T::from_u32(2).unwrap()) / np1))
            }
            Rule::TrappedIon { eta } => {
                if n == 0 {
                    return Ok(T::zero());
                }
                let x = *eta * *eta;
                let (l0, _) = laguerre_pair(n, 0, x);
                let (l1, _) = laguerre_pair(n, 1, x);
                if l0 == T::zero() {
                    return Err(SpectrumError::Singular {
                        name: self.name.clone(),
                        n,
                        detail: format!("Laguerre denominator L_n^0({x}) = 0"),
                    });
                }
                let ratio = l1 / l0;
                let np1 = nf + T::one();
                Ok(nf * (ratio * ratio) / (np1 * np1))
            }
            Rule::Table(levels) => {
                levels
                    .get(n as usize)
                    .copied()
                    .ok_or_else(|| SpectrumError::OutOfRange {
                        name: self.name.clone(),
                        n,
                        max_n: levels.len() as u32 - 1,
                    })
            }
            Rule::Nonlinearity(f) => {
                if n == 0 {
                    return Ok(T::zero());
                }
                let v = f(n);
                if !v.is_finite() || v == T::zero() {
                    return Err(SpectrumError::Singular {
                        name: self.name.clone(),
                        n,
                        detail: format!("nonlinearity f({n}) = {v}"),
                    });
                }
                Ok(nf * v * v)
            }
        }
    }

    /// Scan `[0, n_max]` for violations of the spectrum axioms: `e_0 = 0`,
    /// finiteness, positivity and strict monotonic growth. Violations are
    /// reported, never silently accepted; domain relaxations (for instance a
    /// Poeschl-Teller `nu <= 2`) show up as notes.
    pub fn validate(&self, n_max: u32) -> ValidationReport {
        let mut report = ValidationReport {
            name: self.name.clone(),
            checked_to: n_max,
            violations: Vec::new(),
            notes: Vec::new(),
        };
        if let Rule::PoschlTeller { nu } = &self.rule {
            if *nu <= T::from_u32(2).unwrap() {
                report
                    .notes
                    .push(format!("nu = {nu} relaxes the nu > 2 domain condition"));
            }
        }
        let mut prev: Option<T> = None;
        for n in 0..=n_max {
            let value = match self.eigenvalue(n) {
                Ok(v) => v,
                Err(err) => {
                    report.violations.push(Violation::Unavailable {
                        n,
                        reason: err.to_string(),
                    });
                    report.checked_to = n;
                    break;
                }
            };
            let as_f64 = value.to_f64().unwrap_or(f64::NAN);
            if n == 0 && value != T::zero() {
                report
                    .violations
                    .push(Violation::GroundLevelNotZero { value: as_f64 });
            }
            if !value.is_finite() {
                report.violations.push(Violation::NonFinite { n });
            }
            if n >= 1 && value <= T::zero() {
                report
                    .violations
                    .push(Violation::NonPositive { n, value: as_f64 });
            }
            if let Some(p) = prev {
                if value <= p {
                    report.violations.push(Violation::NonMonotonic {
                        n,
                        value: as_f64,
                        previous: p.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
            prev = Some(value);
        }
        report
    }
}

impl<T: Scalar> Clone for Spectrum<T> {
    fn clone(&self) -> Self {
        Spectrum {
            name: self.name.clone(),
            rule: self.rule.clone(),
            cache: Mutex::new(Cache::empty()),
        }
    }
}

impl<T: Scalar> fmt::Debug for Spectrum<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Spectrum").field("name", &self.name).finish()
    }
}

/// The dual system of a [`Spectrum`]: levels `eps_n = n^2 / e_n`.
#[derive(Clone, Copy, Debug)]
pub struct DualSpectrum<'a, T: Scalar> {
    base: &'a Spectrum<T>,
}

impl<'a, T: Scalar> DualSpectrum<'a, T> {
    pub fn base(&self) -> &'a Spectrum<T> {
        self.base
    }

    pub fn eigenvalue(&self, n: u32) -> Result<T, SpectrumError> {
        self.base.dual_eigenvalue(n)
    }

    pub fn jackson_log_factorial(&self, n: u32) -> Result<T, SpectrumError> {
        self.base.dual_jackson_log_factorial(n)
    }

    /// Axiom scan for the dual levels, mirroring [`Spectrum::validate`].
    pub fn validate(&self, n_max: u32) -> ValidationReport {
        let mut report = ValidationReport {
            name: format!("dual({})", self.base.name),
            checked_to: n_max,
            violations: Vec::new(),
            notes: Vec::new(),
        };
        let mut prev: Option<T> = None;
        for n in 0..=n_max {
            let value = match self.eigenvalue(n) {
                Ok(v) => v,
                Err(err) => {
                    report.violations.push(Violation::Unavailable {
                        n,
                        reason: err.to_string(),
                    });
                    report.checked_to = n;
                    break;
                }
            };
            let as_f64 = value.to_f64().unwrap_or(f64::NAN);
            if !value.is_finite() {
                report.violations.push(Violation::NonFinite { n });
            }
            if n >= 1 && value <= T::zero() {
                report
                    .violations
                    .push(Violation::NonPositive { n, value: as_f64 });
            }
            if let Some(p) = prev {
                if value <= p {
                    report.violations.push(Violation::NonMonotonic {
                        n,
                        value: as_f64,
                        previous: p.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
            prev = Some(value);
        }
        report
    }
}

/// Either side of the spectrum/dual pair, as consumed by the state builders.
pub trait LevelSequence<T: Scalar> {
    fn label(&self) -> String;
    fn level(&self, n: u32) -> Result<T, SpectrumError>;
    fn log_jackson_factorial(&self, n: u32) -> Result<T, SpectrumError>;
}

impl<T: Scalar> LevelSequence<T> for Spectrum<T> {
    fn label(&self) -> String {
        self.name.clone()
    }
    fn level(&self, n: u32) -> Result<T, SpectrumError> {
        self.eigenvalue(n)
    }
    fn log_jackson_factorial(&self, n: u32) -> Result<T, SpectrumError> {
        self.jackson_log_factorial(n)
    }
}

impl<'a, T: Scalar> LevelSequence<T> for DualSpectrum<'a, T> {
    fn label(&self) -> String {
        format!("dual({})", self.base.name)
    }
    fn level(&self, n: u32) -> Result<T, SpectrumError> {
        self.eigenvalue(n)
    }
    fn log_jackson_factorial(&self, n: u32) -> Result<T, SpectrumError> {
        self.jackson_log_factorial(n)
    }
}

/// The trapped-ion nonlinearity `f(n) = L_n^1(eta^2) / ((n+1) L_n^0(eta^2))`.
///
/// Feeding this through [`Spectrum::from_nonlinearity`] reproduces the
/// trapped-ion spectrum exactly.
pub fn trapped_ion_nonlinearity<T: Scalar>(eta: T) -> impl Fn(u32) -> T + Send + Sync {
    move |n: u32| {
        let x = eta * eta;
        let (l0, _) = laguerre_pair(n, 0, x);
        let (l1, _) = laguerre_pair(n, 1, x);
        let np1 = T::from_u32(n + 1).unwrap();
        l1 / (np1 * l0)
    }
}

/// Outcome of scanning a spectrum for axiom violations.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub name: String,
    pub checked_to: u32,
    pub violations: Vec<Violation>,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// Violations that make downstream series ill-defined (everything except
    /// lost monotonicity, which only breaks the level *ordering*).
    pub fn hard_violations(&self) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(|v| !matches!(v, Violation::NonMonotonic { .. }))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    GroundLevelNotZero { value: f64 },
    NonFinite { n: u32 },
    NonPositive { n: u32, value: f64 },
    NonMonotonic { n: u32, value: f64, previous: f64 },
    Unavailable { n: u32, reason: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::GroundLevelNotZero { value } => {
                write!(f, "e_0 = {value} (must be exactly 0)")
            }
            Violation::NonFinite { n } => write!(f, "e_{n} is not finite"),
            Violation::NonPositive { n, value } => write!(f, "e_{n} = {value} is not positive"),
            Violation::NonMonotonic { n, value, previous } => {
                write!(f, "e_{n} = {value} does not exceed e_{} = {previous}", n - 1)
            }
            Violation::Unavailable { n, reason } => write!(f, "e_{n} unavailable: {reason}"),
        }
    }
}
