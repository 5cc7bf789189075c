//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (visible with `--nocapture`). Expensive reference runs are shared
//! through lazies so the suite stays inside its wall-clock budget.
//!
//! Run with:
//!   cargo test -p nlts-cli --test acceptance -- --nocapture

use std::f64::consts::PI;
use std::time::Instant;

use once_cell::sync::Lazy;

use nlts_core::degiorgi;
use nlts_core::diagnostics::{self, DiagnosticsRecord};
use nlts_core::field::PhysicalField;
use nlts_core::grid::Grid;
use nlts_core::initial;
use nlts_core::norms;
use nlts_core::operators;
use nlts_core::quadrature;
use nlts_core::recurrence::{converges, iterate, threshold, RecurrenceParams};
use nlts_core::scaling::scaling_pair_test;
use nlts_core::solver::{self, ModelParams, RunControls, RunOutput, StopReason, VelocityType};
use nlts_core::tracer;
use nlts_core::TransformPlan;

fn report(criterion: &str, pass: bool, detail: &str) {
    println!("[{}] {}: {}", if pass { "PASS" } else { "FAIL" }, criterion, detail);
}

fn rel_l2(a: &PhysicalField, b: &PhysicalField) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in a.values.iter().zip(b.values.iter()) {
        num += (x - y) * (x - y);
        den += y * y;
    }
    (num / den.max(1e-300)).sqrt()
}

/// The reference inviscid Gaussian run: n = 2, alpha = 1/2, kappa = 0,
/// A = 1, sigma = L/20, N = 256, L = 2 pi. The tail stop is disabled so
/// the gradient-growth stop is the active blow-up declaration.
static REFERENCE_RUN: Lazy<RunOutput> = Lazy::new(|| {
    let grid = Grid::new(2, 256, 2.0 * PI).unwrap();
    let length = grid.length();
    let theta0 = initial::gaussian(grid, 1.0, length / 20.0, &[length / 2.0, length / 2.0]);
    let params = ModelParams::inviscid(0.5, VelocityType::Gradient);
    let controls = RunControls {
        t_end: 10.0,
        c_cfl: 0.4,
        dt_max: 0.0025,
        grad_factor: 1e3,
        tail_threshold: 1.0,
        series_interval: 0.0025,
        ..Default::default()
    };
    solver::run(&theta0, params, &controls).unwrap()
});

#[test]
fn criterion_01_operator_identities() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for &n in &[1usize, 2] {
        let grid = Grid::new(n, 256, 2.0).unwrap();
        for &alpha in &[0.25, 0.5, 0.75] {
            for trial in 0..100u64 {
                let fhat = initial::random_spectrum(grid, trial * 31 + (alpha * 1000.0) as u64);
                let u = operators::velocity_gradient_type(&fhat, alpha).unwrap();
                let div = operators::divergence(&u);
                let lam = operators::fractional_laplacian(&fhat, 2.0 * alpha);
                let scale = lam.coeffs.iter().map(|c| c.norm()).fold(1e-300f64, f64::max);
                for flat in 0..grid.len() {
                    let defect = (div.coeffs[flat] + lam.coeffs[flat]).norm() / scale;
                    worst = worst.max(defect);
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst <= 1e-12 && elapsed < 10.0;
    report(
        "criterion 1: operator identities",
        pass,
        &format!("worst relative defect {worst:.3e} over 600 fields in {elapsed:.1}s"),
    );
    assert!(pass, "worst {worst:.3e}, elapsed {elapsed:.1}s");
}

#[test]
fn criterion_02_definition_equivalence() {
    let start = Instant::now();
    let mut details = Vec::new();
    let mut pass = true;

    // Lambda^s: both dimensions at N = 256
    for &n in &[1usize, 2] {
        let length = 16.0;
        let grid = Grid::new(n, 256, length).unwrap();
        let plan = TransformPlan::new(grid);
        let c = length / 2.0;
        let f = PhysicalField::from_fn(grid, |x| {
            let r2: f64 = x.iter().map(|xi| (xi - c) * (xi - c)).sum();
            (-PI * r2).exp()
        });
        let fhat = plan.forward(&f);
        for &s in &[0.5, 1.0, 1.5] {
            let spectral = plan.inverse_unchecked(&operators::fractional_laplacian(&fhat, s));
            let (quad, warn) = quadrature::singular_integral_lambda(&f, s).unwrap();
            let err = rel_l2(&quad, &spectral);
            pass &= err <= 0.01 && !warn.warning;
            details.push(format!("lambda n={n} s={s}: {err:.2e}"));
        }
    }

    // kernel velocity: n = 2 at N = 128 and n = 1 at N = 256
    {
        let grid = Grid::new(2, 128, 12.0).unwrap();
        let plan = TransformPlan::new(grid);
        let f = PhysicalField::from_fn(grid, |x| {
            (-PI * ((x[0] - 6.0).powi(2) + (x[1] - 6.0).powi(2))).exp()
        });
        let fhat = plan.forward(&f);
        let alpha = 0.5;
        let u_spec = operators::velocity_gradient_type(&fhat, alpha).unwrap();
        let (u_quad, warn) = quadrature::kernel_velocity(&f, alpha).unwrap();
        for ax in 0..2 {
            let reference = plan.inverse_unchecked(&u_spec.components[ax]);
            let err = rel_l2(&u_quad.components[ax], &reference);
            pass &= err <= 0.02 && !warn.warning;
            details.push(format!("velocity n=2 axis {ax}: {err:.2e}"));
        }
    }
    {
        let grid = Grid::new(1, 256, 16.0).unwrap();
        let plan = TransformPlan::new(grid);
        let f = PhysicalField::from_fn(grid, |x| (-PI * (x[0] - 8.0) * (x[0] - 8.0)).exp());
        let fhat = plan.forward(&f);
        for &alpha in &[0.25, 0.5, 0.75] {
            let u_spec = operators::velocity_gradient_type(&fhat, alpha).unwrap();
            let reference = plan.inverse_unchecked(&u_spec.components[0]);
            let (u_quad, _) = quadrature::kernel_velocity(&f, alpha).unwrap();
            let err = rel_l2(&u_quad.components[0], &reference);
            pass &= err <= 0.02;
            details.push(format!("velocity n=1 alpha={alpha}: {err:.2e}"));
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    pass &= elapsed < 120.0;
    report(
        "criterion 2: definition equivalence",
        pass,
        &format!("{} in {elapsed:.1}s", details.join("; ")),
    );
    assert!(pass, "{details:?}, elapsed {elapsed:.1}s");
}

/// Records of the reference run while it is squeaky-clean.
fn resolved(series: &[DiagnosticsRecord], gate: f64) -> &[DiagnosticsRecord] {
    let end = series.iter().position(|r| !(r.tail_fraction <= gate)).unwrap_or(series.len());
    &series[..end]
}

#[test]
fn criterion_03_mass_dissipation_identity() {
    let out = &*REFERENCE_RUN;
    let gated = resolved(&out.series, 1e-6);
    let mass_report = diagnostics::check_mass_dissipation(gated).unwrap();
    let strictly_decreasing = gated.windows(2).all(|w| w[1].mass < w[0].mass);
    let pass = mass_report.worst_relative <= 1e-4 && strictly_decreasing && gated.len() > 50;
    report(
        "criterion 3: mass dissipation at desk scale",
        pass,
        &format!(
            "relative residual {:.3e} over {} resolved records; mass strictly decreasing: {}",
            mass_report.worst_relative,
            gated.len(),
            strictly_decreasing
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_04_maximum_principle_matrix() {
    let grid = Grid::new(2, 256, 2.0 * PI).unwrap();
    let length = grid.length();
    let c = length / 2.0;
    let data: Vec<(&str, PhysicalField)> = vec![
        ("gaussian", initial::gaussian(grid, 1.0, length / 20.0, &[c, c])),
        ("smooth_bump", initial::smooth_bump(grid, 1.0, length / 6.0, &[c, c])),
        (
            "dipole",
            initial::dipole(grid, 0.8, length / 16.0, &[c - length / 8.0, c], &[c + length / 8.0, c]),
        ),
    ];
    let mut pass = true;
    let mut details = Vec::new();
    for (name, theta0) in &data {
        let tol = 1e-6 * theta0.max_abs();
        for &alpha in &[0.25, 0.5, 0.75] {
            let params = ModelParams::inviscid(alpha, VelocityType::Gradient);
            // the smooth window: stop on modest gradient growth before the
            // compressive amplification magnifies roundoff debris
            let controls = RunControls {
                t_end: 0.75,
                c_cfl: 0.4,
                dt_max: 0.005,
                grad_factor: 10.0,
                tail_threshold: 1e-4,
                series_interval: 0.01,
                ..Default::default()
            };
            let out = solver::run(theta0, params, &controls).unwrap();
            let ts: Vec<f64> = out.series.iter().map(|r| r.t).collect();
            let maxima: Vec<f64> = out.series.iter().map(|r| r.max).collect();
            let minima_neg: Vec<f64> = out.series.iter().map(|r| -r.min).collect();
            let v_max = diagnostics::max_principle_violation(&ts, &maxima, tol);
            let v_min = diagnostics::max_principle_violation(&ts, &minima_neg, tol);
            let ok = v_max <= 0.0 && v_min <= 0.0;
            pass &= ok;
            details.push(format!(
                "{name} alpha={alpha}: M viol {v_max:.1e}, m viol {v_min:.1e}, stop {} at {:.3}",
                out.report.reason.as_str(),
                out.report.t_stop
            ));
        }
    }
    report("criterion 4: extrema monotonicity matrix", pass, &details.join(" | "));
    assert!(pass, "{details:#?}");
}

#[test]
fn criterion_05_scaling_invariance() {
    let grid = Grid::new(2, 256, 8.0).unwrap();
    let f = initial::gaussian(grid, 0.6, 0.5, &[4.0, 4.0]);
    let scale = f.max_abs();
    let dt = 0.0025;
    let mut pass = true;
    let mut details = Vec::new();

    let inviscid = ModelParams::inviscid(0.5, VelocityType::Gradient);
    for &mu in &[1.0, 3.0] {
        let result = scaling_pair_test(&f, inviscid, 2, mu, &[0.05, 0.1], dt).unwrap();
        let ok = result.max_deviation_rel <= 1e-6;
        pass &= ok;
        details.push(format!(
            "inviscid (2,{mu}): {:.2e} (tol 1e-6 of {scale})",
            result.max_deviation_rel
        ));
    }

    let gamma = 1.0;
    let dissipative = ModelParams { alpha: 0.5, kappa: 1.0, gamma, velocity: VelocityType::Gradient };
    let matched = scaling_pair_test(&f, dissipative, 2, 2.0f64.powf(gamma), &[0.05, 0.1], dt).unwrap();
    pass &= matched.max_deviation_rel <= 1e-6;
    details.push(format!("dissipative (2, 2^gamma): {:.2e}", matched.max_deviation_rel));
    let mismatched = scaling_pair_test(&f, dissipative, 2, 1.0, &[0.05, 0.1], dt).unwrap();
    pass &= mismatched.max_deviation_rel > 1e-3;
    details.push(format!("dissipative (2, 1) deviates: {:.2e}", mismatched.max_deviation_rel));

    report("criterion 5: scaling invariance pairs", pass, &details.join("; "));
    assert!(pass, "{details:?}");
}

#[test]
fn criterion_06_interpolation_inequality() {
    let mut pass = true;
    let mut details = Vec::new();
    for &n in &[1usize, 2] {
        let pts = if n == 1 { 256 } else { 64 };
        let grid = Grid::new(n, pts, 5.0).unwrap();
        let plan = TransformPlan::new(grid);
        for &alpha in &[0.25, 0.5, 0.75] {
            let bound = diagnostics::interpolation_constant(n, alpha);
            let mut worst: f64 = 0.0;
            for seed in 0..1000u64 {
                let f = initial::random_bandlimited(grid, pts / 4, 1.0, seed * 7 + n as u64, &plan);
                let ratio = diagnostics::check_interpolation(&f, alpha, &plan).unwrap();
                worst = worst.max(ratio);
            }
            pass &= worst <= bound;
            details.push(format!("n={n} alpha={alpha}: worst {worst:.4} <= {bound:.4}"));
        }
    }

    // Gaussian witness in (n, alpha) = (1, 1/2)
    let grid = Grid::new(1, 512, 20.0).unwrap();
    let plan = TransformPlan::new(grid);
    let f = PhysicalField::from_fn(grid, |x| (-PI * (x[0] - 10.0) * (x[0] - 10.0)).exp());
    let ratio = diagnostics::check_interpolation(&f, 0.5, &plan).unwrap();
    let witness_ok = (ratio - 0.8409).abs() < 1e-3 && ratio <= 2.0f64.powf(0.75);
    pass &= witness_ok;
    details.push(format!("gaussian witness {ratio:.4} vs bound {:.4}", 2.0f64.powf(0.75)));

    report("criterion 6: interpolation inequality", pass, &details.join("; "));
    assert!(pass, "{details:?}");
}

#[test]
fn criterion_07_recurrence_sweep() {
    let mut pass = true;
    let mut checked = 0usize;
    for ci in 0..20 {
        let c = 1.0 + (ci as f64 + 1.0) * (9.0 / 20.0);
        for bi in 0..20 {
            let beta = 1.0 + (bi as f64 + 1.0) * (3.0 / 20.0);
            let t = threshold(c, beta).unwrap();
            for wi in 1..=10 {
                let w0 = t * wi as f64 / 11.0;
                let p = RecurrenceParams::new(c, beta, w0, 2000).unwrap();
                pass &= converges(&p).converged();
                checked += 1;
            }
        }
    }
    // explicit witnesses
    let conv = RecurrenceParams::new(2.0, 2.0, 0.25, 200).unwrap();
    let seq = iterate(&conv);
    pass &= converges(&conv).converged() && *seq.last().unwrap() == 0.0;
    let div = RecurrenceParams::new(2.0, 2.0, 1.5, 2000).unwrap();
    let dseq = iterate(&div);
    pass &= !converges(&div).converged() && dseq.iter().any(|w| w.is_infinite());

    report(
        "criterion 7: recurrence threshold sweep",
        pass,
        &format!("{checked} grid starts below threshold all converge; witnesses (2,2,0.25) -> 0 and (2,2,1.5) -> overflow"),
    );
    assert!(pass);
}

#[test]
fn criterion_08_level_set_pipeline() {
    // the small-mass experiment: positive mass pinned to eps_0(2, 1/2)
    let alpha = 0.5;
    let n = 2usize;
    let eps0 = diagnostics::epsilon0(n, alpha);
    let grid = Grid::new(2, 256, 0.2).unwrap();
    let amplitude = 0.015;
    let sigma = (eps0 / (2.0 * PI * amplitude)).sqrt();
    let theta0 = initial::gaussian(grid, amplitude, sigma, &[0.1, 0.1]);
    let theta0_plus = norms::positive_mass(&theta0);
    let mass_pinned = (theta0_plus - eps0).abs() <= 1e-3 * eps0;

    let snapshots_count = 256usize; // dyadic cadence 2^{-(k_max+2)}, k_max = 6
    let cadence = 1.0 / snapshots_count as f64;
    let params = ModelParams::inviscid(alpha, VelocityType::Gradient);
    let controls = RunControls {
        t_end: 1.0,
        c_cfl: 0.4,
        dt_max: cadence,
        grad_factor: 1e3,
        tail_threshold: 1e-4,
        series_interval: cadence,
        snapshot_times: (0..=snapshots_count).map(|i| i as f64 * cadence).collect(),
        ..Default::default()
    };
    let out = solver::run(&theta0, params, &controls).unwrap();
    let survived = out.report.reason == StopReason::ReachedEnd;

    let snaps: Vec<(f64, PhysicalField)> =
        out.snapshots.iter().map(|s| (s.t, s.field.clone())).collect();
    let plan = TransformPlan::new(grid);
    let outcome = degiorgi::degiorgi_sequence(&snaps, alpha, 6, &plan).unwrap();
    let sequence_ok = outcome.succeeded() && outcome.states().len() >= 6;
    let states = outcome.states();

    let strictly_decreasing =
        states.windows(2).take(5).all(|w| w[1].mass < w[0].mass);
    let w5_small = states.get(5).map(|s| s.mass < 1e-3 * states[0].mass).unwrap_or(false);
    let recurrence_ok =
        degiorgi::recurrence_bound_check(states, n, alpha).iter().all(|c| c.pass);
    let margins_ok = out
        .series
        .iter()
        .filter(|r| r.t > 0.0 && r.tail_fraction <= 1e-4)
        .all(|r| diagnostics::check_decay_bound(r, theta0_plus, alpha, n) >= 0.0);

    let pass = mass_pinned && survived && sequence_ok && strictly_decreasing && w5_small
        && recurrence_ok && margins_ok;
    let masses: Vec<String> = states.iter().map(|s| format!("W{}={:.3e}", s.k, s.mass)).collect();
    report(
        "criterion 8: level-set iteration pipeline",
        pass,
        &format!(
            "mass pinned to eps0: {mass_pinned}; run survived [0,1]: {survived}; sequence through k=5: {sequence_ok}; \
             W strictly decreasing: {strictly_decreasing}; W5 < 1e-3 W0: {w5_small}; \
             recurrence bound at every level: {recurrence_ok}; decay margins >= 0: {margins_ok} | {}",
            masses.join(" ")
        ),
    );
    // Strict decrease of every W_k is unattainable for real dynamics at
    // this mass scale: any initial datum with sup above the first level
    // collapses long before the construction's first admissible time,
    // while surviving data has W_k = 0 exactly from k = 1 on (see the
    // decisions ledger). The assertion states the criterion as written.
    assert!(pass, "clauses: mass={mass_pinned} survived={survived} seq={sequence_ok} strict={strictly_decreasing} w5={w5_small} rec={recurrence_ok} margins={margins_ok}");
}

#[test]
fn criterion_09_blowup_exhibition() {
    let out = &*REFERENCE_RUN;
    let reason_ok = matches!(
        out.report.reason,
        StopReason::GradientThreshold | StopReason::ResolutionLoss
    );
    let before_horizon = out.report.t_stop < 10.0;
    let g0 = out.series[0].grad_inf;
    let growth = out.series.iter().map(|r| r.grad_inf).fold(0.0f64, f64::max) / g0;
    let growth_ok = growth >= 1e3;

    let t_stop = out.report.t_stop;
    let total = diagnostics::criterion_integral(&out.series, None);
    let half = diagnostics::criterion_integral(&out.series, Some(t_stop / 2.0));
    let integral_ok = total >= 5.0 * half && half > 0.0;

    // contrast: the divergence-free velocity conserves mass over the window
    let grid = Grid::new(2, 256, 2.0 * PI).unwrap();
    let length = grid.length();
    let theta0 = initial::gaussian(grid, 1.0, length / 20.0, &[length / 2.0, length / 2.0]);
    let perp = ModelParams::inviscid(0.5, VelocityType::Perp);
    let controls = RunControls {
        t_end: t_stop,
        c_cfl: 0.4,
        dt_max: 0.0025,
        grad_factor: f64::INFINITY,
        tail_threshold: 1.0,
        series_interval: 0.01,
        ..Default::default()
    };
    let contrast = solver::run(&theta0, perp, &controls).unwrap();
    let m0 = contrast.series[0].mass;
    let drift = contrast
        .series
        .iter()
        .map(|r| (r.mass - m0).abs() / m0.abs())
        .fold(0.0f64, f64::max);
    let conserve_ok = drift <= 1e-8;

    let pass = reason_ok && before_horizon && growth_ok && integral_ok && conserve_ok;
    report(
        "criterion 9: blow-up exhibition and contrast",
        pass,
        &format!(
            "stop {} at t={:.4}; grad growth {growth:.1}x; criterion integral ratio {:.2}; perp mass drift {drift:.2e}",
            out.report.reason.as_str(),
            t_stop,
            total / half
        ),
    );
    assert!(pass, "reason={reason_ok} horizon={before_horizon} growth={growth_ok} integral={integral_ok} conserve={conserve_ok}");
}

#[test]
fn criterion_10_characteristics() {
    let tracer_error = |points: usize| -> (f64, f64, Vec<(f64, f64)>) {
        let grid = Grid::new(2, points, 2.0 * PI).unwrap();
        let length = grid.length();
        let c = length / 2.0;
        let theta0 = initial::dipole(
            grid,
            0.8,
            length / 16.0,
            &[c - length / 8.0, c],
            &[c + length / 8.0, c],
        );
        // seed exactly at the refined initial maximum
        let plan = TransformPlan::new(grid);
        let theta0_hat = plan.forward(&theta0);
        let (argmax, &val) = theta0
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        // Newton-polish the argmax position on the interpolant
        let mut x = grid.coordinates(argmax);
        for _ in 0..6 {
            let (_, g, h) = tracer::eval_with_derivatives(&theta0_hat, &x[..2]);
            let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
            if det.abs() < 1e-300 {
                break;
            }
            x[0] -= (g[0] * h[1][1] - g[1] * h[0][1]) / det;
            x[1] -= (g[1] * h[0][0] - g[0] * h[1][0]) / det;
        }
        let _ = val;
        let params = ModelParams::inviscid(0.5, VelocityType::Gradient);
        let controls = RunControls {
            t_end: 3.0,
            c_cfl: 0.4,
            dt_max: 0.005,
            grad_factor: 1e3,
            tail_threshold: 1e-4,
            series_interval: 0.01,
            tracer_seeds: vec![vec![x[0], x[1]]],
            ..Default::default()
        };
        let out = solver::run(&theta0, params, &controls).unwrap();
        let track = &out.tracers[0];
        let errs: Vec<(f64, f64)> = track
            .samples
            .iter()
            .map(|(t, _, v)| (*t, (v - track.theta_initial).abs()))
            .collect();
        let max_err = errs.iter().map(|(_, e)| *e).fold(0.0f64, f64::max);
        (max_err, out.report.t_stop, errs)
    };

    let (err_coarse, t_stop_coarse, _) = tracer_error(256);
    let (_, _, errs_fine) = tracer_error(512);
    let err_fine_on_window = errs_fine
        .iter()
        .filter(|(t, _)| *t <= t_stop_coarse + 1e-9)
        .map(|(_, e)| *e)
        .fold(0.0f64, f64::max);

    let grid = Grid::new(2, 256, 2.0 * PI).unwrap();
    let scale = initial::dipole(
        grid,
        0.8,
        grid.length() / 16.0,
        &[grid.length() / 2.0 - grid.length() / 8.0, grid.length() / 2.0],
        &[grid.length() / 2.0 + grid.length() / 8.0, grid.length() / 2.0],
    )
    .max_abs();

    let bound_ok = err_coarse <= 1e-3 * scale;
    let improvement = err_coarse / err_fine_on_window.max(1e-300);
    let improves_ok = improvement >= 4.0;
    let pass = bound_ok && improves_ok;
    report(
        "criterion 10: characteristics carry the scalar",
        pass,
        &format!(
            "N=256 error {err_coarse:.3e} (<= {:.1e}); N=512 error {err_fine_on_window:.3e}; improvement {improvement:.1}x",
            1e-3 * scale
        ),
    );
    assert!(pass, "bound={bound_ok} improvement={improvement:.2}");
}

#[test]
fn criterion_11_determinism_and_formats() {
    use nlts_cli::config::RunConfig;

    let dir = tempfile::tempdir().unwrap();
    let config_text = r#"
seed = 77

[grid]
n = 2
N = 256
L = 6.283185307179586

[model]
alpha = 0.5

[time]
t_end = 0.05
dt_max = 0.005

[output]
series_path = "out/series.csv"
snapshot_dir = "out/snaps"
series_interval = 0.01
snapshot_times = [0.0, 0.02]

[initial]
kind = "random_bandlimited"
k_cut = 20
amplitude = 0.5
"#;
    let cfg = RunConfig::parse(config_text).unwrap();
    let root_a = dir.path().join("a");
    let root_b = dir.path().join("b");
    nlts_cli::commands::run(&cfg, Some(&root_a), true).unwrap();
    nlts_cli::commands::run(&cfg, Some(&root_b), true).unwrap();
    let series_a = std::fs::read(root_a.join("out/series.csv")).unwrap();
    let series_b = std::fs::read(root_b.join("out/series.csv")).unwrap();
    let deterministic = series_a == series_b;

    // series round trip is bit-exact
    let records = nlts_cli::series::read_series(&root_a.join("out/series.csv")).unwrap();
    let rt_path = dir.path().join("rt.csv");
    nlts_cli::series::write_series(&rt_path, &records).unwrap();
    let series_rt = std::fs::read(&rt_path).unwrap() == series_a;

    // snapshot round trip is bit-exact
    let snaps = nlts_cli::snapshot::read_snapshot_dir(&root_a.join("out/snaps")).unwrap();
    let mut snapshot_rt = !snaps.is_empty();
    for (i, (t, field)) in snaps.iter().enumerate() {
        let p = dir.path().join(format!("rt_{i}.nlts"));
        nlts_cli::snapshot::write_snapshot(&p, field, *t).unwrap();
        let (back, tb) = nlts_cli::snapshot::read_snapshot(&p).unwrap();
        snapshot_rt &= tb == *t && back.values == field.values && back.grid == field.grid;
    }

    let pass = deterministic && series_rt && snapshot_rt;
    report(
        "criterion 11: determinism and formats",
        pass,
        &format!(
            "fixed-seed reruns bit-identical: {deterministic}; series round trip: {series_rt}; snapshot round trip: {snapshot_rt}"
        ),
    );
    assert!(pass);
}
