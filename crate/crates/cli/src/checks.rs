//! Post-hoc diagnostic checks over recorded series and snapshots, with
//! machine-readable verdicts.

use serde::Serialize;

use nlts_core::degiorgi;
use nlts_core::diagnostics::{self, DiagnosticsRecord};
use nlts_core::field::PhysicalField;
use nlts_core::solver::VelocityType;
use nlts_core::TransformPlan;

/// Tail-fraction gate below which records count as well resolved; checks
/// of smooth-solution statements only consume gated records.
pub const WELL_RESOLVED_TAIL: f64 = 1e-6;
/// Gate for the decay bound, which tolerates milder resolution loss.
pub const DECAY_BOUND_TAIL: f64 = 1e-4;

pub const MASS_DISSIPATION_TOL: f64 = 1e-4;
pub const MASS_CONSERVATION_TOL: f64 = 1e-8;
pub const EXTREMA_TOL_PER_UNIT_TIME: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub name: String,
    /// signed worst violation; <= 0 or below tolerance means pass
    pub worst: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    fn new(name: &str, worst: f64, tolerance: f64, pass: bool, detail: String) -> Self {
        Verdict { name: name.to_string(), worst, tolerance, pass, detail }
    }

    pub fn table_row(&self) -> String {
        format!(
            "{:<22} {:>14.6e} {:>12.1e}  {}  {}",
            self.name,
            self.worst,
            self.tolerance,
            if self.pass { "PASS" } else { "FAIL" },
            self.detail
        )
    }

    pub fn json_line(&self) -> String {
        serde_json::to_string(self).expect("verdict serializes")
    }
}

/// Records in the well-resolved phase (prefix of the series up to the
/// first record exceeding the gate).
fn resolved_prefix(series: &[DiagnosticsRecord], gate: f64) -> &[DiagnosticsRecord] {
    let end = series
        .iter()
        .position(|r| !(r.tail_fraction <= gate))
        .unwrap_or(series.len());
    &series[..end]
}

/// `|d/dt mass + hdot|` relative to `hdot`, over the well-resolved phase.
/// Meaningful for the gradient velocity only.
pub fn mass_dissipation(series: &[DiagnosticsRecord], velocity: VelocityType) -> Verdict {
    if velocity != VelocityType::Gradient {
        return Verdict::new(
            "mass_dissipation",
            f64::NAN,
            MASS_DISSIPATION_TOL,
            false,
            "only meaningful for velocity_type = gradient".into(),
        );
    }
    let gated = resolved_prefix(series, WELL_RESOLVED_TAIL);
    match diagnostics::check_mass_dissipation(gated) {
        Ok(report) => {
            let pass = report.worst_relative <= MASS_DISSIPATION_TOL;
            let detail = format!(
                "{} records in the resolved phase{}",
                gated.len(),
                if report.cadence_uniform { "" } else { " (non-uniform cadence)" }
            );
            Verdict::new("mass_dissipation", report.worst_relative, MASS_DISSIPATION_TOL, pass, detail)
        }
        Err(e) => Verdict::new("mass_dissipation", f64::NAN, MASS_DISSIPATION_TOL, false, e.to_string()),
    }
}

/// Mass is conserved (perp velocity contrast case).
pub fn mass_conservation(series: &[DiagnosticsRecord]) -> Verdict {
    let m0 = series.first().map(|r| r.mass).unwrap_or(0.0);
    let scale = m0.abs().max(1e-300);
    let worst = series
        .iter()
        .map(|r| (r.mass - m0).abs() / scale)
        .fold(0.0f64, f64::max);
    Verdict::new(
        "mass_conservation",
        worst,
        MASS_CONSERVATION_TOL,
        worst <= MASS_CONSERVATION_TOL,
        format!("relative drift over {} records", series.len()),
    )
}

/// Maximum non-increasing and minimum non-decreasing within
/// `1e-6 |theta_0|_inf` per unit time, over the well-resolved phase.
pub fn maximum_principle(series: &[DiagnosticsRecord]) -> Verdict {
    let gated = resolved_prefix(series, WELL_RESOLVED_TAIL);
    if gated.len() < 2 {
        return Verdict::new(
            "maximum_principle",
            f64::NAN,
            0.0,
            false,
            "needs at least 2 resolved records".into(),
        );
    }
    let scale = gated[0].max.abs().max(gated[0].min.abs()).max(1e-300);
    let tol = EXTREMA_TOL_PER_UNIT_TIME * scale;
    let ts: Vec<f64> = gated.iter().map(|r| r.t).collect();
    let maxima: Vec<f64> = gated.iter().map(|r| r.max).collect();
    let minima_neg: Vec<f64> = gated.iter().map(|r| -r.min).collect();
    let v1 = diagnostics::max_principle_violation(&ts, &maxima, tol);
    let v2 = diagnostics::max_principle_violation(&ts, &minima_neg, tol);
    let worst = v1.max(v2);
    Verdict::new(
        "maximum_principle",
        worst,
        0.0,
        worst <= 0.0,
        format!("M and m monotonicity over {} resolved records (tol {:.1e}/t)", gated.len(), tol),
    )
}

/// Pointwise decay-bound margin stays nonnegative on the smooth phase.
pub fn decay_bound(series: &[DiagnosticsRecord], alpha: f64, n: usize) -> Verdict {
    let gated = resolved_prefix(series, DECAY_BOUND_TAIL);
    let theta0_plus = gated.first().map(|r| r.mass_positive).unwrap_or(0.0);
    let mut worst = f64::INFINITY;
    for rec in gated.iter().filter(|r| r.t > 0.0) {
        worst = worst.min(diagnostics::check_decay_bound(rec, theta0_plus, alpha, n));
    }
    let pass = worst >= 0.0;
    Verdict::new(
        "decay_bound",
        -worst,
        0.0,
        pass,
        format!("smallest margin over {} smooth-phase records", gated.len()),
    )
}

/// Trapezoid integral of the criterion integrand; informational value plus
/// the back-loading ratio over the second half of the recorded window.
pub fn criterion_growth(series: &[DiagnosticsRecord]) -> Verdict {
    let total = diagnostics::criterion_integral(series, None);
    let t_stop = series.last().map(|r| r.t).unwrap_or(0.0);
    let half = diagnostics::criterion_integral(series, Some(t_stop / 2.0));
    let ratio = if half > 0.0 { total / half } else { f64::INFINITY };
    Verdict::new(
        "criterion_growth",
        ratio,
        0.0,
        total.is_finite(),
        format!("integral {total:.6e} over [0,{t_stop:.4}]; [0,T]/[0,T/2] = {ratio:.3}"),
    )
}

/// Level-truncation energy inequality on snapshots, levels 0..=k_max.
pub fn level_dissipation(
    snapshots: &[(f64, PhysicalField)],
    alpha: f64,
    k_max: usize,
    plan: &TransformPlan,
) -> Verdict {
    let mut worst = f64::NEG_INFINITY;
    let mut detail = String::new();
    for k in 0..=k_max {
        match diagnostics::check_level_dissipation(snapshots, degiorgi::level_value(k), alpha, plan)
        {
            Ok(report) => worst = worst.max(report.worst_violation),
            Err(e) => {
                detail = e.to_string();
                worst = f64::INFINITY;
                break;
            }
        }
    }
    if detail.is_empty() {
        detail = format!("levels 0..={k_max} over {} snapshots", snapshots.len());
    }
    Verdict::new("level_dissipation", worst, 0.0, worst <= 0.0, detail)
}

/// Interpolation-inequality ratio on every snapshot.
pub fn interpolation(
    snapshots: &[(f64, PhysicalField)],
    alpha: f64,
    n: usize,
    plan: &TransformPlan,
) -> Verdict {
    let bound = diagnostics::interpolation_constant(n, alpha);
    let mut worst: f64 = 0.0;
    for (_, field) in snapshots {
        if let Ok(ratio) = diagnostics::check_interpolation(field, alpha, plan) {
            worst = worst.max(ratio);
        }
    }
    Verdict::new(
        "interpolation",
        worst,
        bound,
        worst <= bound,
        format!("largest ratio over {} snapshots vs constant {bound:.6}", snapshots.len()),
    )
}

pub const CHECK_NAMES: &[&str] = &[
    "mass_dissipation",
    "mass_conservation",
    "maximum_principle",
    "decay_bound",
    "criterion_growth",
    "level_dissipation",
    "interpolation",
];

/// Run one named check; snapshot-based checks fail gracefully when no
/// snapshots are available.
pub fn run_check(
    name: &str,
    series: &[DiagnosticsRecord],
    snapshots: &[(f64, PhysicalField)],
    alpha: f64,
    n: usize,
    velocity: VelocityType,
    plan: Option<&TransformPlan>,
) -> Option<Verdict> {
    match name {
        "mass_dissipation" => Some(mass_dissipation(series, velocity)),
        "mass_conservation" => Some(mass_conservation(series)),
        "maximum_principle" => Some(maximum_principle(series)),
        "decay_bound" => Some(decay_bound(series, alpha, n)),
        "criterion_growth" => Some(criterion_growth(series)),
        "level_dissipation" => match (snapshots.is_empty(), plan) {
            (false, Some(plan)) => Some(level_dissipation(snapshots, alpha, 5, plan)),
            _ => Some(Verdict::new("level_dissipation", f64::NAN, 0.0, false, "needs snapshots".into())),
        },
        "interpolation" => match (snapshots.is_empty(), plan) {
            (false, Some(plan)) => Some(interpolation(snapshots, alpha, n, plan)),
            _ => Some(Verdict::new("interpolation", f64::NAN, 0.0, false, "needs snapshots".into())),
        },
        _ => None,
    }
}
