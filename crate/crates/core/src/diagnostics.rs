//! Monitored functionals and the analytical checks built on them: mass
//! dissipation, extrema monotonicity, the interpolation inequality, the
//! pointwise decay bound, and the regularity-criterion integral.

use std::f64::consts::PI;

use thiserror::Error;

use crate::fft::TransformPlan;
use crate::field::{PhysicalField, SpectralField};
use crate::norms;
use crate::operators;
use crate::tracer;

#[derive(Debug, Error, PartialEq)]
pub enum DiagnosticsError {
    #[error("check requires a field that is not identically zero")]
    ZeroField,
    #[error("series must hold at least {needed} records, got {found}")]
    TooShort { needed: usize, found: usize },
}

/// One time-stamped row of every monitored functional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// `integral theta dx`
    pub mass: f64,
    /// `integral max(theta, 0) dx`
    pub mass_positive: f64,
    /// maximum of the trigonometric interpolant (sub-grid refined)
    pub max: f64,
    /// minimum of the trigonometric interpolant
    pub min: f64,
    pub hdot_alpha_sq: f64,
    /// pointwise Euclidean sup-norm of the spectral gradient
    pub grad_inf: f64,
    /// sup over tensor entries and points of the Riesz-tensor field
    pub criterion_integrand: f64,
    /// spectral tail energy share of the latest advection product
    pub tail_fraction: f64,
}

/// Compute a full record from the spectral state.
///
/// `tail_fraction` is whatever the producer measured on the pre-dealiasing
/// advection product; it is threaded through untouched.
pub fn record(
    theta_hat: &SpectralField,
    alpha: f64,
    t: f64,
    tail_fraction: f64,
    plan: &TransformPlan,
) -> DiagnosticsRecord {
    let grid = theta_hat.grid;
    let theta = plan.inverse_unchecked(theta_hat);

    let mass = theta_hat.coeffs[0].re;
    let mass_positive = norms::positive_mass(&theta);
    let hdot_alpha_sq = norms::hdot_alpha_sq_spectral(theta_hat, alpha);

    let (argmax, argmin) = {
        let mut amax = 0;
        let mut amin = 0;
        for (i, v) in theta.values.iter().enumerate() {
            if *v > theta.values[amax] {
                amax = i;
            }
            if *v < theta.values[amin] {
                amin = i;
            }
        }
        (amax, amin)
    };
    let max = tracer::refined_maximum(theta_hat, argmax, theta.values[argmax]);
    let min = tracer::refined_minimum(theta_hat, argmin, theta.values[argmin]);

    let grad_hat = operators::gradient(theta_hat);
    let grad: Vec<PhysicalField> =
        grad_hat.components.iter().map(|c| plan.inverse_unchecked(c)).collect();
    let mut grad_inf: f64 = 0.0;
    for i in 0..grid.len() {
        let mut sq = 0.0;
        for g in &grad {
            sq += g.values[i] * g.values[i];
        }
        grad_inf = grad_inf.max(sq);
    }
    let grad_inf = grad_inf.sqrt();

    let mut criterion_integrand: f64 = 0.0;
    if hdot_alpha_sq > 0.0 {
        let tensor = operators::riesz_tensor_lambda2alpha(theta_hat, alpha)
            .expect("alpha validated by the caller");
        let n = grid.dim();
        for j in 0..n {
            for l in j..n {
                let entry = plan.inverse_unchecked(&tensor[j * n + l]);
                criterion_integrand = criterion_integrand.max(entry.max_abs());
            }
        }
    }

    DiagnosticsRecord {
        t,
        mass,
        mass_positive,
        max,
        min,
        hdot_alpha_sq,
        grad_inf,
        criterion_integrand,
        tail_fraction,
    }
}

/// Pointwise level truncation `max(theta - level, 0)`.
pub fn truncate(theta: &PhysicalField, level: f64) -> PhysicalField {
    PhysicalField {
        grid: theta.grid,
        values: theta.values.iter().map(|v| (v - level).max(0.0)).collect(),
    }
}

/// Three-point derivative of `y` at interior index `i` on a possibly
/// non-uniform time grid; one-sided at the endpoints.
fn series_derivative(ts: &[f64], ys: &[f64], i: usize) -> f64 {
    let last = ts.len() - 1;
    if i == 0 {
        (ys[1] - ys[0]) / (ts[1] - ts[0])
    } else if i == last {
        (ys[last] - ys[last - 1]) / (ts[last] - ts[last - 1])
    } else {
        let h1 = ts[i] - ts[i - 1];
        let h2 = ts[i + 1] - ts[i];
        // standard 3-point formula, exact for quadratics
        (-h2 / (h1 * (h1 + h2))) * ys[i - 1]
            + ((h2 - h1) / (h1 * h2)) * ys[i]
            + (h1 / (h2 * (h1 + h2))) * ys[i + 1]
    }
}

/// Residual series of the mass-dissipation identity
/// `d/dt integral theta dx = -|theta|^2_{Hdot^alpha}`.
#[derive(Debug, Clone)]
pub struct MassDissipationReport {
    /// `(t, residual, hdot_alpha_sq)` per interior record
    pub residuals: Vec<(f64, f64, f64)>,
    /// max over records of `|residual| / max(hdot_alpha_sq, eps)`
    pub worst_relative: f64,
    pub cadence_uniform: bool,
}

pub fn check_mass_dissipation(
    series: &[DiagnosticsRecord],
) -> Result<MassDissipationReport, DiagnosticsError> {
    if series.len() < 3 {
        return Err(DiagnosticsError::TooShort { needed: 3, found: series.len() });
    }
    let ts: Vec<f64> = series.iter().map(|r| r.t).collect();
    let masses: Vec<f64> = series.iter().map(|r| r.mass).collect();
    let dt0 = ts[1] - ts[0];
    let cadence_uniform = ts
        .windows(2)
        .all(|w| ((w[1] - w[0]) - dt0).abs() <= 1e-9 * dt0.max(1e-300));

    let eps = 1e-300;
    let mut residuals = Vec::with_capacity(series.len().saturating_sub(2));
    let mut worst: f64 = 0.0;
    for i in 1..series.len() - 1 {
        let ddt = series_derivative(&ts, &masses, i);
        let h = series[i].hdot_alpha_sq;
        let residual = ddt + h;
        residuals.push((ts[i], residual, h));
        worst = worst.max(residual.abs() / h.max(eps));
    }
    Ok(MassDissipationReport { residuals, worst_relative: worst, cadence_uniform })
}

/// Worst signed violation of the level-truncation energy inequality
/// `d/dt |theta_k|_L1 <= -|theta_k|^2_{Hdot^alpha} + slack`.
#[derive(Debug, Clone)]
pub struct LevelDissipationReport {
    pub level: f64,
    /// `(t, lhs - rhs)` per interior snapshot; positive means violation
    /// beyond the slack
    pub violations: Vec<(f64, f64)>,
    pub worst_violation: f64,
}

/// Slack factor for [`check_level_dissipation`]; the dropped complement
/// term in the derivation is sign-definite, so only the inequality is
/// asserted, with a small relative slack for discretization.
pub const LEVEL_DISSIPATION_SLACK: f64 = 1e-3;

pub fn check_level_dissipation(
    snapshots: &[(f64, PhysicalField)],
    level: f64,
    alpha: f64,
    plan: &TransformPlan,
) -> Result<LevelDissipationReport, DiagnosticsError> {
    if snapshots.len() < 3 {
        return Err(DiagnosticsError::TooShort { needed: 3, found: snapshots.len() });
    }
    let ts: Vec<f64> = snapshots.iter().map(|(t, _)| *t).collect();
    let mut l1s = Vec::with_capacity(snapshots.len());
    let mut hdots = Vec::with_capacity(snapshots.len());
    for (_, field) in snapshots {
        let trunc = truncate(field, level);
        l1s.push(norms::l1_norm(&trunc));
        let that = plan.forward(&trunc);
        hdots.push(norms::hdot_alpha_sq_spectral(&that, alpha));
    }
    let mut violations = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for i in 1..snapshots.len() - 1 {
        let ddt = series_derivative(&ts, &l1s, i);
        let slack = LEVEL_DISSIPATION_SLACK * hdots[i].max(1e-300);
        let excess = ddt + hdots[i] - slack;
        violations.push((ts[i], excess));
        worst = worst.max(excess);
    }
    Ok(LevelDissipationReport { level, violations, worst_violation: worst })
}

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    PI.powf(n as f64 / 2.0) / crate::quadrature::gamma(n as f64 / 2.0 + 1.0)
}

/// Sharp constant `2^{1/2} omega_n^{alpha/(n+2 alpha)}` of the
/// interpolation inequality
/// `|f|_L2 <= C |f|_L1^{2a/(n+2a)} |f|_{Hdot^a}^{n/(n+2a)}`.
pub fn interpolation_constant(n: usize, alpha: f64) -> f64 {
    2.0f64.sqrt() * unit_ball_volume(n).powf(alpha / (n as f64 + 2.0 * alpha))
}

/// Interpolation ratio `|f|_L2 / (|f|_L1^{2a/(n+2a)} |f|_{Hdot^a}^{n/(n+2a)})`;
/// the contract is `ratio <= interpolation_constant(n, alpha)` for fields
/// modeling data that decays at infinity.
pub fn check_interpolation(
    f: &PhysicalField,
    alpha: f64,
    plan: &TransformPlan,
) -> Result<f64, DiagnosticsError> {
    let n = f.grid.dim() as f64;
    let l2 = norms::l2_norm(f);
    if l2 == 0.0 {
        return Err(DiagnosticsError::ZeroField);
    }
    let l1 = norms::l1_norm(f);
    let fhat = plan.forward(f);
    let hdot = norms::hdot_alpha_sq_spectral(&fhat, alpha).sqrt();
    let denom = l1.powf(2.0 * alpha / (n + 2.0 * alpha)) * hdot.powf(n / (n + 2.0 * alpha));
    Ok(l2 / denom)
}

/// The small-mass constant of the level-set iteration,
/// `eps_0 = 2^{-(n+alpha)(n+2 alpha)/(2 alpha^2)} / C_{n,alpha}^{(n+2 alpha)/(2 alpha)}`
/// with `C_{n,alpha}` the interpolation constant.
pub fn epsilon0(n: usize, alpha: f64) -> f64 {
    let nf = n as f64;
    let c = interpolation_constant(n, alpha);
    2.0f64.powf(-(nf + alpha) * (nf + 2.0 * alpha) / (2.0 * alpha * alpha))
        / c.powf((nf + 2.0 * alpha) / (2.0 * alpha))
}

/// Margin of the pointwise decay bound
/// `sup theta(., T) <= (m0 / (eps_0 T^{n/(2 alpha)}))^{2 alpha/(n+2 alpha)}`
/// where `m0` is the initial positive mass; nonnegative margin means the
/// bound holds at this record.
pub fn check_decay_bound(
    rec: &DiagnosticsRecord,
    theta0_positive_mass: f64,
    alpha: f64,
    n: usize,
) -> f64 {
    let nf = n as f64;
    let t = rec.t;
    if t <= 0.0 {
        return f64::INFINITY;
    }
    let e0 = epsilon0(n, alpha);
    let bound =
        (theta0_positive_mass / (e0 * t.powf(nf / (2.0 * alpha)))).powf(2.0 * alpha / (nf + 2.0 * alpha));
    bound - rec.max
}

/// Trapezoid integral of the criterion integrand over recorded times up to
/// `t_limit` (inclusive; `None` integrates the whole series).
pub fn criterion_integral(series: &[DiagnosticsRecord], t_limit: Option<f64>) -> f64 {
    let mut acc = 0.0;
    for w in series.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if let Some(limit) = t_limit {
            if a.t >= limit {
                break;
            }
            if b.t > limit {
                // cut the last trapezoid at the limit
                let frac = (limit - a.t) / (b.t - a.t);
                let yb = a.criterion_integrand
                    + frac * (b.criterion_integrand - a.criterion_integrand);
                acc += 0.5 * (a.criterion_integrand + yb) * (limit - a.t);
                break;
            }
        }
        acc += 0.5 * (a.criterion_integrand + b.criterion_integrand) * (b.t - a.t);
    }
    acc
}

/// Worst violation of `M(t)` non-increase at rate tolerance `tol` per unit
/// time: `max over i<j of M_j - M_i - tol (t_j - t_i)`; nonpositive means
/// the maximum principle holds within tolerance. Pass negated extrema to
/// check that the minimum is non-decreasing.
pub fn max_principle_violation(times: &[f64], maxima: &[f64], tol_per_unit_time: f64) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    let mut running_min = f64::INFINITY;
    for (t, m) in times.iter().zip(maxima.iter()) {
        let shifted = m - tol_per_unit_time * t;
        if running_min.is_finite() {
            worst = worst.max(shifted - running_min);
        }
        running_min = running_min.min(shifted);
    }
    if worst.is_finite() {
        worst
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn truncate_cases() {
        let grid = Grid::new(1, 16, 4.0).unwrap();
        let f = PhysicalField::from_fn(grid, |x| (x[0] - 2.0).sin());
        // level below the minimum shifts the whole field
        let low = truncate(&f, -2.0);
        for (a, b) in low.values.iter().zip(f.values.iter()) {
            assert!((a - (b + 2.0)).abs() < 1e-15);
        }
        // level at or above the maximum kills the field
        let high = truncate(&f, 1.5);
        assert!(high.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn truncate_is_monotone_in_level() {
        let grid = Grid::new(1, 32, 2.0).unwrap();
        let f = PhysicalField::from_fn(grid, |x| (3.0 * x[0]).sin() + 0.3 * x[0]);
        let a = truncate(&f, 0.1);
        let b = truncate(&f, 0.4);
        for (lo, hi) in a.values.iter().zip(b.values.iter()) {
            assert!(lo >= hi);
        }
    }

    #[test]
    fn interpolation_constant_values() {
        // n=1, alpha=1/2: 2^{1/2} * 2^{1/4} = 2^{3/4}
        let c = interpolation_constant(1, 0.5);
        assert!((c - 2.0f64.powf(0.75)).abs() < 1e-14);
        assert!((c - 1.681793).abs() < 1e-6);
        // n=2: omega_2 = pi
        let c2 = interpolation_constant(2, 0.5);
        assert!((c2 - 2.0f64.sqrt() * PI.powf(1.0 / 6.0)).abs() < 1e-14);
        assert!((unit_ball_volume(1) - 2.0).abs() < 1e-14);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-14);
    }

    #[test]
    fn epsilon0_reference_value() {
        // n=2, alpha=1/2: 2^{-15} / (2^{1/2} pi^{1/6})^3
        let expect = 2.0f64.powf(-15.0) / (2.0f64.sqrt() * PI.powf(1.0 / 6.0)).powi(3);
        assert!((epsilon0(2, 0.5) - expect).abs() < 1e-18);
    }

    #[test]
    fn decay_bound_is_loose_for_small_times() {
        let rec = DiagnosticsRecord {
            t: 1e-6,
            mass: 0.0,
            mass_positive: 0.0,
            max: 1.0,
            min: 0.0,
            hdot_alpha_sq: 0.0,
            grad_inf: 0.0,
            criterion_integrand: 0.0,
            tail_fraction: 0.0,
        };
        assert!(check_decay_bound(&rec, 1.0, 0.5, 2) > 0.0);
    }

    #[test]
    fn mass_dissipation_zero_series() {
        let rec = |t| DiagnosticsRecord {
            t,
            mass: 0.0,
            mass_positive: 0.0,
            max: 0.0,
            min: 0.0,
            hdot_alpha_sq: 0.0,
            grad_inf: 0.0,
            criterion_integrand: 0.0,
            tail_fraction: 0.0,
        };
        let series = vec![rec(0.0), rec(0.1), rec(0.2), rec(0.3)];
        let report = check_mass_dissipation(&series).unwrap();
        assert_eq!(report.worst_relative, 0.0);
        assert!(report.cadence_uniform);
    }

    #[test]
    fn mass_dissipation_detects_exact_identity() {
        // synthesize mass(t) with d/dt mass = -h(t) exactly for quadratics
        let h = |t: f64| 1.0 + t;
        let mass = |t: f64| -(t + t * t / 2.0);
        let series: Vec<DiagnosticsRecord> = (0..10)
            .map(|i| {
                let t = i as f64 * 0.05;
                DiagnosticsRecord {
                    t,
                    mass: mass(t),
                    mass_positive: 0.0,
                    max: 0.0,
                    min: 0.0,
                    hdot_alpha_sq: h(t),
                    grad_inf: 0.0,
                    criterion_integrand: 0.0,
                    tail_fraction: 0.0,
                }
            })
            .collect();
        let report = check_mass_dissipation(&series).unwrap();
        assert!(report.worst_relative < 1e-12);
    }

    #[test]
    fn criterion_integral_trapezoid() {
        let rec = |t: f64, y: f64| DiagnosticsRecord {
            t,
            mass: 0.0,
            mass_positive: 0.0,
            max: 0.0,
            min: 0.0,
            hdot_alpha_sq: 0.0,
            grad_inf: 0.0,
            criterion_integrand: y,
            tail_fraction: 0.0,
        };
        let series = vec![rec(0.0, 0.0), rec(1.0, 2.0), rec(2.0, 4.0)];
        assert!((criterion_integral(&series, None) - 4.0).abs() < 1e-14);
        assert!((criterion_integral(&series, Some(1.0)) - 1.0).abs() < 1e-14);
        // cut inside the second trapezoid
        assert!((criterion_integral(&series, Some(1.5)) - (1.0 + 0.5 * (2.0 + 3.0) * 0.5)).abs() < 1e-14);
    }

    #[test]
    fn max_principle_violation_detects_increase() {
        let ts = [0.0, 1.0, 2.0];
        let ok = [1.0, 0.9, 0.85];
        assert!(max_principle_violation(&ts, &ok, 1e-6) <= 0.0);
        let bad = [1.0, 0.9, 1.05];
        assert!(max_principle_violation(&ts, &bad, 1e-6) > 0.1);
    }
}
