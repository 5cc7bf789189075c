//! Subcommand implementations shared by the binary and the test suite.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use nlts_core::degiorgi;
use nlts_core::field::PhysicalField;
use nlts_core::grid::Grid;
use nlts_core::initial;
use nlts_core::norms;
use nlts_core::operators;
use nlts_core::quadrature;
use nlts_core::recurrence::{converges, iterate, threshold, RecurrenceParams, Verdict as RVerdict};
use nlts_core::solver::{self, StopReason};
use nlts_core::TransformPlan;

use crate::checks;
use crate::config::RunConfig;
use crate::series;
use crate::snapshot;

/// Resolve a run-relative output path against the output root
/// (`--output-root`, else `NLTS_OUTPUT_ROOT`, else the working directory).
pub fn resolve_output(root: Option<&Path>, rel: &str) -> PathBuf {
    let rel = Path::new(rel);
    if rel.is_absolute() {
        return rel.to_path_buf();
    }
    match root {
        Some(r) => r.join(rel),
        None => match std::env::var_os("NLTS_OUTPUT_ROOT") {
            Some(r) => PathBuf::from(r).join(rel),
            None => rel.to_path_buf(),
        },
    }
}

pub struct RunSummary {
    pub reason: StopReason,
    pub t_stop: f64,
    pub series_path: PathBuf,
    pub snapshot_paths: Vec<PathBuf>,
    pub failed_checks: Vec<String>,
}

/// Execute a configured run: integrate, write the series CSV, snapshots,
/// and the config echo, then run any configured post-hoc checks.
pub fn run(config: &RunConfig, output_root: Option<&Path>, quiet: bool) -> Result<RunSummary> {
    let plan = TransformPlan::new(config.grid_object());
    let theta0 = config.initial_field(&plan);
    let controls = config.run_controls();
    let out = solver::run(&theta0, config.model_params(), &controls)?;

    let series_path = resolve_output(output_root, &config.output.series_path);
    series::write_series(&series_path, &out.series)?;

    let echo_path = series_path.with_extension("echo.toml");
    std::fs::write(&echo_path, config.echo())
        .with_context(|| format!("writing {}", echo_path.display()))?;

    let snap_dir = resolve_output(output_root, &config.output.snapshot_dir);
    let mut snapshot_paths = Vec::new();
    for (i, snap) in out.snapshots.iter().enumerate() {
        let path = snap_dir.join(snapshot::snapshot_file_name(i, snap.t));
        snapshot::write_snapshot(&path, &snap.field, snap.t)?;
        snapshot_paths.push(path);
    }

    if !quiet {
        println!(
            "run finished: reason={} t_stop={:.6} records={} snapshots={}",
            out.report.reason.as_str(),
            out.report.t_stop,
            out.series.len(),
            out.snapshots.len()
        );
        println!("series: {}", series_path.display());
    }

    let mut failed_checks = Vec::new();
    if !config.checks.run.is_empty() {
        let snaps: Vec<(f64, PhysicalField)> =
            out.snapshots.iter().map(|s| (s.t, s.field.clone())).collect();
        for name in &config.checks.run {
            let verdict = checks::run_check(
                name,
                &out.series,
                &snaps,
                config.model.alpha,
                config.grid.n,
                config.model_params().velocity,
                Some(&plan),
            )
            .with_context(|| format!("unknown check `{name}`"))?;
            if !quiet {
                println!("{}", verdict.table_row());
            }
            if !verdict.pass {
                failed_checks.push(name.clone());
            }
        }
    }

    Ok(RunSummary {
        reason: out.report.reason,
        t_stop: out.report.t_stop,
        series_path,
        snapshot_paths,
        failed_checks,
    })
}

/// Run named (or all) checks against a recorded series and optional
/// snapshot directory; writes verdicts as JSON lines next to the series.
pub fn check(
    series_path: &Path,
    snapshot_dir: Option<&Path>,
    config: &RunConfig,
    names: &[String],
) -> Result<(Vec<checks::Verdict>, PathBuf)> {
    let records = series::read_series(series_path)?;
    let snaps = match snapshot_dir {
        Some(dir) => snapshot::read_snapshot_dir(dir)?,
        None => Vec::new(),
    };
    let plan = snaps.first().map(|(_, f)| TransformPlan::new(f.grid));

    let selected: Vec<String> = if names.is_empty() {
        checks::CHECK_NAMES.iter().map(|s| s.to_string()).collect()
    } else {
        names.to_vec()
    };
    let mut verdicts = Vec::new();
    for name in &selected {
        let v = checks::run_check(
            name,
            &records,
            &snaps,
            config.model.alpha,
            config.grid.n,
            config.model_params().velocity,
            plan.as_ref(),
        )
        .with_context(|| format!("unknown check `{name}`"))?;
        verdicts.push(v);
    }

    let jsonl_path = series_path.with_extension("verdicts.jsonl");
    let mut text = String::new();
    for v in &verdicts {
        text.push_str(&v.json_line());
        text.push('\n');
    }
    std::fs::write(&jsonl_path, text)
        .with_context(|| format!("writing {}", jsonl_path.display()))?;
    Ok((verdicts, jsonl_path))
}

pub struct DeGiorgiRow {
    pub k: usize,
    pub level: f64,
    pub t: Option<f64>,
    pub mass: Option<f64>,
    pub bound: Option<f64>,
    pub pass: bool,
}

/// Level-set iteration over a snapshot directory: the time-sequence
/// construction plus the superlinear recurrence bound per level.
pub fn degiorgi_table(
    snapshot_dir: &Path,
    alpha: f64,
    k_max: usize,
) -> Result<(Vec<DeGiorgiRow>, bool)> {
    let snaps = snapshot::read_snapshot_dir(snapshot_dir)?;
    if snaps.is_empty() {
        bail!("no .nlts snapshots in {}", snapshot_dir.display());
    }
    let grid = snaps[0].1.grid;
    let plan = TransformPlan::new(grid);
    let outcome = degiorgi::degiorgi_sequence(&snaps, alpha, k_max, &plan)?;
    let states = outcome.states();
    let bounds = degiorgi::recurrence_bound_check(states, grid.dim(), alpha);

    let mut rows = Vec::new();
    for k in 0..=k_max {
        let state = states.iter().find(|s| s.k == k);
        let bound = bounds.iter().find(|b| b.k + 1 == k);
        rows.push(DeGiorgiRow {
            k,
            level: degiorgi::level_value(k),
            t: state.map(|s| s.t),
            mass: state.map(|s| s.mass),
            bound: bound.map(|b| b.bound),
            pass: state.is_some() && bound.map(|b| b.pass).unwrap_or(true),
        });
    }
    let all_pass = outcome.succeeded() && rows.iter().all(|r| r.pass);
    Ok((rows, all_pass))
}

pub struct RecurrenceRow {
    pub base: f64,
    pub exponent: f64,
    pub start: f64,
    pub converged: bool,
    pub k_at_underflow: Option<usize>,
}

impl RecurrenceRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.base,
            self.exponent,
            self.start,
            self.converged,
            self.k_at_underflow.map(|k| k.to_string()).unwrap_or_default()
        )
    }
}

fn recurrence_row(base: f64, exponent: f64, start: f64, k_max: usize) -> Result<RecurrenceRow> {
    let p = RecurrenceParams::new(base, exponent, start, k_max)?;
    let verdict = converges(&p);
    let seq = iterate(&p);
    let k_at_underflow = seq.iter().position(|w| *w == 0.0);
    Ok(RecurrenceRow {
        base,
        exponent,
        start,
        converged: matches!(verdict, RVerdict::Converges { .. }),
        k_at_underflow,
    })
}

/// One recurrence instance, or the full threshold sweep over a
/// 20 x 20 grid of `(C, beta)` with 10 starts below each threshold.
pub fn recurrence_table(
    base: f64,
    exponent: f64,
    start: f64,
    k_max: usize,
    grid_sweep: bool,
) -> Result<Vec<RecurrenceRow>> {
    if !grid_sweep {
        return Ok(vec![recurrence_row(base, exponent, start, k_max)?]);
    }
    let mut rows = Vec::new();
    for ci in 0..20 {
        let c = 1.0 + (ci as f64 + 1.0) * (9.0 / 20.0);
        for bi in 0..20 {
            let beta = 1.0 + (bi as f64 + 1.0) * (3.0 / 20.0);
            let t = threshold(c, beta)?;
            for wi in 1..=10 {
                let w0 = t * wi as f64 / 11.0;
                rows.push(recurrence_row(c, beta, w0, k_max)?);
            }
        }
    }
    Ok(rows)
}

pub struct SelfTestLine {
    pub name: String,
    pub worst: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl SelfTestLine {
    fn new(name: &str, worst: f64, tolerance: f64) -> Self {
        SelfTestLine { name: name.into(), worst, tolerance, pass: worst <= tolerance }
    }

    pub fn row(&self) -> String {
        format!(
            "{:<34} {:>12.4e} vs {:>8.1e}  {}",
            self.name,
            self.worst,
            self.tolerance,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

/// Spectral-operator self-test: round trip, Parseval, divergence identity,
/// and the singular-integral cross-validations on small grids.
pub fn operators_selftest() -> Result<Vec<SelfTestLine>> {
    let mut lines = Vec::new();

    // round trip + Parseval, n = 2
    {
        let grid = Grid::new(2, 64, 3.0)?;
        let plan = TransformPlan::new(grid);
        let f = initial::random_bandlimited(grid, 20, 1.0, 12, &plan);
        let back = plan.inverse_unchecked(&plan.forward(&f));
        let l2 = norms::l2_norm(&f).max(1e-300);
        let diff = f
            .values
            .iter()
            .zip(back.values.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
            * grid.cell_volume().sqrt();
        lines.push(SelfTestLine::new("round_trip_rel_l2", diff / l2, 1e-12));

        let fhat = plan.forward(&f);
        let parseval =
            (norms::l2_norm(&f).powi(2) - norms::l2_sq_spectral(&fhat)).abs() / l2.powi(2);
        lines.push(SelfTestLine::new("parseval_rel", parseval, 1e-12));
    }

    // divergence identity over alpha and n
    for &n in &[1usize, 2] {
        let grid = Grid::new(n, 48, 2.0)?;
        let mut worst: f64 = 0.0;
        for (i, alpha) in [0.25, 0.5, 0.75].into_iter().enumerate() {
            let fhat = initial::random_spectrum(grid, 31 + i as u64);
            let u = operators::velocity_gradient_type(&fhat, alpha)?;
            let div = operators::divergence(&u);
            let lam = operators::fractional_laplacian(&fhat, 2.0 * alpha);
            let scale = lam.coeffs.iter().map(|c| c.norm()).fold(1e-300f64, f64::max);
            for flat in 0..grid.len() {
                worst = worst.max((div.coeffs[flat] + lam.coeffs[flat]).norm() / scale);
            }
        }
        lines.push(SelfTestLine::new(&format!("divergence_identity_n{n}"), worst, 1e-12));
    }

    // definition equivalence on a compact bump, n = 1
    {
        let grid = Grid::new(1, 256, 16.0)?;
        let plan = TransformPlan::new(grid);
        let c = 8.0;
        let f = PhysicalField::from_fn(grid, |x| {
            (-std::f64::consts::PI * (x[0] - c) * (x[0] - c)).exp()
        });
        let fhat = plan.forward(&f);
        for s in [0.5, 1.0, 1.5] {
            let spectral = plan.inverse_unchecked(&operators::fractional_laplacian(&fhat, s));
            let (quad, _) = quadrature::singular_integral_lambda(&f, s)?;
            let num: f64 =
                quad.values.iter().zip(spectral.values.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
            let den: f64 = spectral.values.iter().map(|b| b * b).sum();
            lines.push(SelfTestLine::new(
                &format!("lambda_equivalence_s{s}"),
                (num / den).sqrt(),
                0.01,
            ));
        }
        // kernel velocity cross-validation
        let u_spec = operators::velocity_gradient_type(&fhat, 0.5)?;
        let reference = plan.inverse_unchecked(&u_spec.components[0]);
        let (u_quad, _) = quadrature::kernel_velocity(&f, 0.5)?;
        let num: f64 = u_quad.components[0]
            .values
            .iter()
            .zip(reference.values.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let den: f64 = reference.values.iter().map(|b| b * b).sum();
        lines.push(SelfTestLine::new("kernel_velocity_equivalence", (num / den).sqrt(), 0.02));
    }

    // 2-D kernel velocity on a small grid
    {
        let grid = Grid::new(2, 64, 10.0)?;
        let plan = TransformPlan::new(grid);
        let c = 5.0;
        let f = PhysicalField::from_fn(grid, |x| {
            (-std::f64::consts::PI * ((x[0] - c).powi(2) + (x[1] - c).powi(2))).exp()
        });
        let fhat = plan.forward(&f);
        let u_spec = operators::velocity_gradient_type(&fhat, 0.5)?;
        let mut num = 0.0;
        let mut den = 0.0;
        let (u_quad, _) = quadrature::kernel_velocity(&f, 0.5)?;
        for ax in 0..2 {
            let reference = plan.inverse_unchecked(&u_spec.components[ax]);
            for (a, b) in u_quad.components[ax].values.iter().zip(reference.values.iter()) {
                num += (a - b) * (a - b);
                den += b * b;
            }
        }
        lines.push(SelfTestLine::new("kernel_velocity_equivalence_2d", (num / den).sqrt(), 0.02));
    }

    // Riesz tensor trace identity
    {
        let grid = Grid::new(2, 32, 2.0)?;
        let fhat = initial::random_spectrum(grid, 77);
        let tensor = operators::riesz_tensor_lambda2alpha(&fhat, 0.6)?;
        let lam = operators::fractional_laplacian(&fhat, 1.2);
        let scale = lam.coeffs.iter().map(|c| c.norm()).fold(1e-300f64, f64::max);
        let mut worst: f64 = 0.0;
        for flat in 0..grid.len() {
            let trace = tensor[0].coeffs[flat] + tensor[3].coeffs[flat];
            worst = worst.max((trace + lam.coeffs[flat]).norm() / scale);
        }
        lines.push(SelfTestLine::new("riesz_tensor_trace", worst, 1e-12));
    }

    Ok(lines)
}

pub struct ScanRow {
    pub alpha: f64,
    pub reason: StopReason,
    pub t_stop: f64,
    pub grad_growth: f64,
}

/// Re-run the configured experiment across a list of alpha values
/// (parallel, each run single-threaded and deterministic).
pub fn blowup_scan(config: &RunConfig, alphas: &[f64]) -> Result<Vec<ScanRow>> {
    let rows: Result<Vec<ScanRow>> = alphas
        .par_iter()
        .map(|&alpha| {
            let mut cfg = config.clone();
            cfg.model.alpha = alpha;
            cfg.validate().map_err(anyhow::Error::from)?;
            let plan = TransformPlan::new(cfg.grid_object());
            let theta0 = cfg.initial_field(&plan);
            let out = solver::run(&theta0, cfg.model_params(), &cfg.run_controls())?;
            let g0 = out.series.first().map(|r| r.grad_inf).unwrap_or(0.0);
            let gmax = out.series.iter().map(|r| r.grad_inf).fold(0.0f64, f64::max);
            Ok(ScanRow {
                alpha,
                reason: out.report.reason,
                t_stop: out.report.t_stop,
                grad_growth: if g0 > 0.0 { gmax / g0 } else { f64::NAN },
            })
        })
        .collect();
    rows
}

/// Pretty-print helper shared by `degiorgi` output paths.
pub fn degiorgi_row_string(row: &DeGiorgiRow) -> String {
    match (row.t, row.mass) {
        (Some(t), Some(mass)) => format!(
            "{:>2}  {:>10.6}  {:>12.8}  {:>14.6e}  {}  {}",
            row.k,
            row.level,
            t,
            mass,
            row.bound.map(|b| format!("{b:>14.6e}")).unwrap_or_else(|| " ".repeat(14)),
            if row.pass { "PASS" } else { "FAIL" }
        ),
        _ => format!(
            "{:>2}  {:>10.6}  {:>12}  {:>14}  {:>14}  FAIL (no admissible time)",
            row.k, row.level, "-", "-", "-"
        ),
    }
}
