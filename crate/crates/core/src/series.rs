//! Log-space summation of the (nonnegative) normalization series, with the
//! truncation policy and the ratio-test diagnostics used to certify
//! divergence before any numbers are fabricated from a truncated sum.

use crate::scalar::Scalar;

/// Governs where a state expansion is cut off.
#[derive(Clone, Copy, Debug)]
pub struct TruncationPolicy<T: Scalar> {
    /// A term is negligible once its relative contribution to the running
    /// normalization sum drops below this.
    pub tolerance: T,
    /// Number of consecutive negligible, shrinking terms required to stop.
    pub tail_window: usize,
    /// Highest term index ever examined; exceeding it without meeting the
    /// tolerance is an inconclusive-series error.
    pub hard_cap: usize,
}

impl<T: Scalar> Default for TruncationPolicy<T> {
    fn default() -> Self {
        TruncationPolicy {
            tolerance: T::from_f64(1e-16).unwrap(),
            tail_window: 5,
            hard_cap: 2000,
        }
    }
}

/// Outcome of a ratio-test examination of a term sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Convergent,
    Divergent,
    Inconclusive,
}

/// Ratio-test summary attached to every built state.
#[derive(Clone, Copy, Debug)]
pub struct ConvergenceReport<T: Scalar> {
    pub verdict: Verdict,
    /// Estimate of the limiting term ratio |t_{n+1}/t_n|.
    pub limit_ratio: T,
    pub terms_examined: usize,
}

impl<T: Scalar> ConvergenceReport<T> {
    pub(crate) fn trivial() -> Self {
        ConvergenceReport {
            verdict: Verdict::Convergent,
            limit_ratio: T::zero(),
            terms_examined: 1,
        }
    }
}

/// Ratios must stay below 1 - RATIO_MARGIN over the examined window for a
/// convergent verdict; the margin keeps a slowly-thinning tail (for instance
/// tanh^2 r at large r) from being waved through prematurely.
const RATIO_MARGIN: f64 = 0.01;
/// In-loop divergence guard: this many consecutive growing terms...
const GROWTH_RUN: usize = 48;
/// ...with at least this much total growth (in nats) certifies divergence.
const GROWTH_NATS: f64 = 23.0;

pub(crate) struct SeriesSum<T: Scalar> {
    /// ln t_n for every term kept (t_n nonnegative).
    pub log_terms: Vec<T>,
    /// ln of the summed series.
    pub log_total: T,
    /// Relative estimate of the discarded tail.
    pub tail_bound: T,
    pub report: ConvergenceReport<T>,
}

pub(crate) enum SumOutcome<E> {
    Term(E),
    Divergent { at: usize, detail: String },
    CapExceeded { cap: usize },
}

/// Sum `exp(log_term(n))` for n = 0, 1, ... under `policy`.
///
/// Stops once `tail_window` consecutive terms are both negligible and
/// shrinking; certifies divergence when a long sustained growth run is seen.
pub(crate) fn adaptive_log_sum<T, E, F>(
    mut log_term: F,
    policy: &TruncationPolicy<T>,
) -> Result<SeriesSum<T>, SumOutcome<E>>
where
    T: Scalar,
    F: FnMut(usize) -> Result<T, E>,
{
    let ln_tol = policy.tolerance.ln();
    let mut log_terms: Vec<T> = Vec::new();
    // streaming log-sum-exp state
    let mut max_log = T::neg_infinity();
    let mut scaled_sum = T::zero();
    let mut trailing_ok = 0usize;
    let mut run_len = 0usize;
    let mut run_start_log = T::zero();

    let mut n = 0usize;
    loop {
        if n > policy.hard_cap {
            return Err(SumOutcome::CapExceeded {
                cap: policy.hard_cap,
            });
        }
        let lt = log_term(n).map_err(SumOutcome::Term)?;
        if lt > max_log {
            scaled_sum = scaled_sum * (max_log - lt).exp() + T::one();
            max_log = lt;
        } else {
            scaled_sum += (lt - max_log).exp();
        }
        let prev = if n > 0 { log_terms[n - 1] } else { T::infinity() };
        log_terms.push(lt);

        let log_total = max_log + scaled_sum.ln();
        let negligible = lt - log_total < ln_tol;
        let shrinking = lt == T::neg_infinity() || lt < prev;
        if n > 0 && negligible && shrinking {
            trailing_ok += 1;
        } else {
            trailing_ok = 0;
        }
        if trailing_ok >= policy.tail_window {
            break;
        }

        // divergence guard: a sustained, large growth run cannot be a
        // transient spike
        if n > 0 && lt > prev {
            if run_len == 0 {
                run_start_log = prev;
            }
            run_len += 1;
            if run_len >= GROWTH_RUN && (lt - run_start_log) > T::from_f64(GROWTH_NATS).unwrap() {
                return Err(SumOutcome::Divergent {
                    at: n,
                    detail: format!(
                        "terms grew for {run_len} consecutive indices (factor e^{:.1})",
                        (lt - run_start_log).to_f64().unwrap_or(f64::NAN)
                    ),
                });
            }
        } else {
            run_len = 0;
        }
        n += 1;
    }

    let log_total = max_log + scaled_sum.ln();
    Ok(finish(log_terms, log_total))
}

/// Sum exactly the terms n = 0..=n_last, no policy, no divergence guard.
pub(crate) fn forced_log_sum<T, E, F>(
    mut log_term: F,
    n_last: usize,
) -> Result<SeriesSum<T>, E>
where
    T: Scalar,
    F: FnMut(usize) -> Result<T, E>,
{
    let mut log_terms = Vec::with_capacity(n_last + 1);
    let mut max_log = T::neg_infinity();
    let mut scaled_sum = T::zero();
    for n in 0..=n_last {
        let lt = log_term(n)?;
        if lt > max_log {
            scaled_sum = scaled_sum * (max_log - lt).exp() + T::one();
            max_log = lt;
        } else {
            scaled_sum += (lt - max_log).exp();
        }
        log_terms.push(lt);
    }
    let log_total = max_log + scaled_sum.ln();
    Ok(finish(log_terms, log_total))
}

fn finish<T: Scalar>(log_terms: Vec<T>, log_total: T) -> SeriesSum<T> {
    let n = log_terms.len();
    let report = classify(&log_terms);
    // geometric tail estimate from the last ratio, relative to the total
    let tail_bound = if n >= 2 {
        let q = report.limit_ratio;
        if q.is_finite() && q < T::one() && q > T::zero() {
            (log_terms[n - 1] - log_total).exp() * q / (T::one() - q)
        } else if q >= T::one() {
            T::infinity()
        } else {
            T::zero()
        }
    } else {
        T::zero()
    };
    SeriesSum {
        log_terms,
        log_total,
        tail_bound,
        report,
    }
}

/// Ratio-test verdict over an explicit list of log-terms.
///
/// Divergent: every post-burn-in ratio exceeds 1 and the growth is not
/// shrinking. Convergent: every post-burn-in ratio stays below
/// 1 - RATIO_MARGIN. Anything else (spiky spectra, ratios hugging 1) is
/// inconclusive.
pub(crate) fn classify<T: Scalar>(log_terms: &[T]) -> ConvergenceReport<T> {
    let n_terms = log_terms.len();
    if n_terms < 2 {
        return ConvergenceReport::trivial();
    }
    // log-ratios; a vanished term (ln = -inf) forces the ratio to 0
    let ratios: Vec<T> = log_terms
        .windows(2)
        .map(|w| {
            if w[1] == T::neg_infinity() {
                T::neg_infinity()
            } else {
                w[1] - w[0]
            }
        })
        .collect();
    let burn_in = (ratios.len() / 4).min(ratios.len() - 1);
    let tail = &ratios[burn_in..];
    let last = *ratios.last().unwrap();
    let limit_ratio = if last == T::neg_infinity() {
        T::zero()
    } else {
        last.exp()
    };
    let ln_conv = T::from_f64((1.0 - RATIO_MARGIN).ln()).unwrap();
    let verdict = if tail.iter().all(|&r| r < ln_conv) {
        Verdict::Convergent
    } else if tail.iter().all(|&r| r > T::zero()) && *tail.last().unwrap() >= tail[0] {
        Verdict::Divergent
    } else {
        Verdict::Inconclusive
    };
    ConvergenceReport {
        verdict,
        limit_ratio,
        terms_examined: n_terms,
    }
}

/// Examine `window` successive term ratios without summing anything.
pub(crate) fn ratio_probe<T, E, F>(
    mut log_term: F,
    window: usize,
) -> Result<ConvergenceReport<T>, E>
where
    T: Scalar,
    F: FnMut(usize) -> Result<T, E>,
{
    let mut log_terms = Vec::with_capacity(window + 1);
    for n in 0..=window {
        log_terms.push(log_term(n)?);
    }
    Ok(classify(&log_terms))
}
