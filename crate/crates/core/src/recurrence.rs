//! The abstract superlinear iteration `W_{k+1} = C^k W_k^beta` and its
//! convergence threshold `W_0 < C^{-1/(beta-1)^2}`.
//!
//! Substituting `V_k = W_k C^{k/(beta-1) + 1/(beta-1)^2}` turns the
//! iteration into `V_{k+1} = V_k^beta` exactly, so one crossing of
//! `V_k < 1` certifies convergence and `V_k > 1` certifies divergence of
//! the extremal sequence.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RecurrenceError {
    #[error("base constant must exceed 1, got {0}")]
    Base(f64),
    #[error("exponent must exceed 1, got {0}")]
    Exponent(f64),
    #[error("starting value must be positive, got {0}")]
    Start(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecurrenceParams {
    pub base: f64,
    pub exponent: f64,
    pub start: f64,
    pub k_max: usize,
}

impl RecurrenceParams {
    pub fn new(base: f64, exponent: f64, start: f64, k_max: usize) -> Result<Self, RecurrenceError> {
        if !(base > 1.0) {
            return Err(RecurrenceError::Base(base));
        }
        if !(exponent > 1.0) {
            return Err(RecurrenceError::Exponent(exponent));
        }
        if !(start >= 0.0) {
            return Err(RecurrenceError::Start(start));
        }
        Ok(RecurrenceParams { base, exponent, start, k_max })
    }
}

/// Convergence threshold `C^{-1/(beta-1)^2}`.
pub fn threshold(base: f64, exponent: f64) -> Result<f64, RecurrenceError> {
    if !(base > 1.0) {
        return Err(RecurrenceError::Base(base));
    }
    if !(exponent > 1.0) {
        return Err(RecurrenceError::Exponent(exponent));
    }
    Ok(base.powf(-1.0 / ((exponent - 1.0) * (exponent - 1.0))))
}

/// Iterate the extremal equality case. Underflow clamps to zero; overflow
/// stops the sequence at infinity.
pub fn iterate(p: &RecurrenceParams) -> Vec<f64> {
    let mut seq = Vec::with_capacity(p.k_max + 1);
    let mut w = p.start;
    seq.push(w);
    for k in 0..p.k_max {
        if w == 0.0 {
            seq.push(0.0);
            continue;
        }
        if !w.is_finite() {
            seq.push(f64::INFINITY);
            continue;
        }
        let next = p.base.powi(k as i32) * w.powf(p.exponent);
        w = if next < f64::MIN_POSITIVE { 0.0 } else { next };
        seq.push(w);
    }
    seq
}

/// Outcome of [`converges`], with the certificate that decided it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    /// The sequence provably tends to zero; carries the first index `k`
    /// with a certified bound and the bound value `V_k < 1`.
    Converges { certified_at: usize, contraction: f64 },
    /// The extremal sequence provably diverges (`V_k > 1` and growing, or
    /// numeric overflow).
    Diverges { first_growth: usize },
    /// Neither certificate fired within `k_max` (boundary case included).
    Undecided,
}

impl Verdict {
    pub fn converged(&self) -> bool {
        matches!(self, Verdict::Converges { .. })
    }
}

/// Decide the limit of the extremal iteration.
///
/// Convergence is certified by a crossing below
/// `C^{-k/(beta-1) - 1/(beta-1)^2}` (that is, `V_k < 1`), divergence by
/// `V_k > 1` or overflow; the exact boundary `V_k = 1` stays undecided
/// because the underlying statement is strict.
pub fn converges(p: &RecurrenceParams) -> Verdict {
    let bm1 = p.exponent - 1.0;
    let mut w = p.start;
    if w == 0.0 {
        return Verdict::Converges { certified_at: 0, contraction: 0.0 };
    }
    if let Ok(t) = threshold(p.base, p.exponent) {
        if w == t {
            return Verdict::Undecided;
        }
    }
    for k in 0..=p.k_max {
        if w == 0.0 {
            return Verdict::Converges { certified_at: k, contraction: 0.0 };
        }
        if !w.is_finite() {
            return Verdict::Diverges { first_growth: k };
        }
        // V_k = W_k * C^{k/(beta-1) + 1/(beta-1)^2}, compared in log space;
        // a small band absorbs the rounding of ln along the boundary orbit
        let log_v = w.ln() + (k as f64 / bm1 + 1.0 / (bm1 * bm1)) * p.base.ln();
        let band = 1e-13 * (k as f64 + 1.0);
        if log_v < -band {
            return Verdict::Converges { certified_at: k, contraction: log_v.exp() };
        }
        if log_v > band {
            return Verdict::Diverges { first_growth: k };
        }
        if k < p.k_max {
            let next = p.base.powi(k as i32) * w.powf(p.exponent);
            w = if next < f64::MIN_POSITIVE { 0.0 } else { next };
        }
    }
    Verdict::Undecided
}
