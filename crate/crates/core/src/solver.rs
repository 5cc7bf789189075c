//! Time integration: strong-stability-preserving RK3 on the advective
//! term composed with the exact integrating factor for the dissipative
//! term, adaptive CFL stepping, blow-up monitors, and run orchestration.

use std::f64::consts::PI;

use thiserror::Error;

use crate::diagnostics::{self, DiagnosticsRecord};
use crate::fft::TransformPlan;
use crate::field::{PhysicalField, SpectralField, VectorField};
use crate::grid::Grid;
use crate::operators;
use crate::tracer::{self, Tracer};

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("alpha out of (0,1): {0}")]
    Alpha(f64),
    #[error("kappa must be nonnegative and finite: {0}")]
    Kappa(f64),
    #[error("gamma out of (0,2): {0}")]
    Gamma(f64),
    #[error("perp velocity requires n = 2, grid has n = {0}")]
    PerpDimension(usize),
}

/// Which nonlocal velocity law drives the transport.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VelocityType {
    /// `u = grad Lambda^{-2+2 alpha} theta` (compressible, dissipates mass)
    Gradient,
    /// `u = grad^perp Lambda^{-2+2 alpha} theta` (divergence-free contrast)
    Perp,
}

/// The PDE instance: fractional order, dissipation strength and order,
/// and velocity law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub alpha: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub velocity: VelocityType,
}

impl ModelParams {
    pub fn inviscid(alpha: f64, velocity: VelocityType) -> Self {
        ModelParams { alpha, kappa: 0.0, gamma: 1.0, velocity }
    }

    pub fn validate(&self, dim: usize) -> Result<(), ParamError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(ParamError::Alpha(self.alpha));
        }
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return Err(ParamError::Kappa(self.kappa));
        }
        if self.kappa > 0.0 && !(self.gamma > 0.0 && self.gamma < 2.0) {
            return Err(ParamError::Gamma(self.gamma));
        }
        if self.velocity == VelocityType::Perp && dim != 2 {
            return Err(ParamError::PerpDimension(dim));
        }
        Ok(())
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    ReachedEnd,
    GradientThreshold,
    ResolutionLoss,
    NanDetected,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::ReachedEnd => "reached_T",
            StopReason::GradientThreshold => "gradient_threshold",
            StopReason::ResolutionLoss => "resolution_loss",
            StopReason::NanDetected => "nan_detected",
        }
    }
}

#[derive(Debug, Clone)]
pub struct StopReport {
    pub reason: StopReason,
    pub t_stop: f64,
    pub final_diagnostics: DiagnosticsRecord,
}

/// Evolving state: time, spectral scalar, current step size, step counter.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub t: f64,
    pub theta_hat: SpectralField,
    pub dt: f64,
    pub step_count: u64,
}

/// Advective right-hand side and the byproducts a step needs.
pub struct RhsEval {
    /// `-dealias(forward(u . grad theta))`
    pub rhs_hat: SpectralField,
    /// spectral velocity at the evaluated state (for tracers)
    pub u_hat: VectorField<SpectralField>,
    /// `max |u|` over the grid (for the CFL bound)
    pub u_max: f64,
    /// tail energy share of the product spectrum before dealiasing
    pub tail_fraction: f64,
}

/// Floor for `max |u|` in the CFL formula.
pub const CFL_VELOCITY_FLOOR: f64 = 1e-12;

/// `dt = c_cfl (L/N) / max(|u|_inf, floor)`, clamped to `dt_max`.
pub fn cfl_dt(grid: Grid, u_max: f64, c_cfl: f64, dt_max: f64) -> f64 {
    (c_cfl * grid.spacing() / u_max.max(CFL_VELOCITY_FLOOR)).min(dt_max)
}

/// The spectral integrator for one model on one grid.
pub struct Solver {
    grid: Grid,
    params: ModelParams,
    plan: TransformPlan,
    /// `kappa (2 pi |k| / L)^gamma` per mode; empty when kappa = 0
    damping: Vec<f64>,
}

impl Solver {
    pub fn new(grid: Grid, params: ModelParams) -> Result<Self, ParamError> {
        params.validate(grid.dim())?;
        let plan = TransformPlan::new(grid);
        let damping = if params.kappa > 0.0 {
            let base = 2.0 * PI / grid.length();
            (0..grid.len())
                .map(|flat| {
                    let ksq = grid.wavevector_norm_sq(flat);
                    params.kappa * (base * ksq.sqrt()).powf(params.gamma)
                })
                .collect()
        } else {
            Vec::new()
        };
        Ok(Solver { grid, params, plan, damping })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn plan(&self) -> &TransformPlan {
        &self.plan
    }

    /// Prepare the spectral initial state: forward transform + dealias.
    pub fn initial_state(&self, theta0: &PhysicalField) -> SolverState {
        let mut theta_hat = self.plan.forward(theta0);
        operators::dealias(&mut theta_hat);
        SolverState { t: 0.0, theta_hat, dt: 0.0, step_count: 0 }
    }

    fn velocity_hat(&self, theta_hat: &SpectralField) -> VectorField<SpectralField> {
        match self.params.velocity {
            VelocityType::Gradient => {
                operators::velocity_gradient_type(theta_hat, self.params.alpha)
            }
            VelocityType::Perp => operators::velocity_perp_type(theta_hat, self.params.alpha),
        }
        .expect("params validated at construction")
    }

    /// Advective right-hand side `-dealias(forward(u . grad theta))`; the
    /// dissipative term is handled exactly by the integrating factor in
    /// [`Solver::step`]. Input spectra are assumed dealiased (the solver
    /// keeps its state that way).
    pub fn rhs(&self, theta_hat: &SpectralField) -> RhsEval {
        let u_hat = self.velocity_hat(theta_hat);
        let grad_hat = operators::gradient(theta_hat);

        let u: Vec<PhysicalField> =
            u_hat.components.iter().map(|c| self.plan.inverse_unchecked(c)).collect();
        let grad: Vec<PhysicalField> =
            grad_hat.components.iter().map(|c| self.plan.inverse_unchecked(c)).collect();

        let mut u_max: f64 = 0.0;
        let mut product = PhysicalField::zeros(self.grid);
        for i in 0..self.grid.len() {
            let mut dot = 0.0;
            let mut usq = 0.0;
            for ax in 0..self.grid.dim() {
                dot += u[ax].values[i] * grad[ax].values[i];
                usq += u[ax].values[i] * u[ax].values[i];
            }
            product.values[i] = -dot;
            u_max = u_max.max(usq);
        }
        let u_max = u_max.sqrt();

        let mut rhs_hat = self.plan.forward(&product);
        let tail = operators::tail_fraction(&rhs_hat);
        operators::dealias(&mut rhs_hat);
        RhsEval { rhs_hat, u_hat, u_max, tail_fraction: tail }
    }

    /// Multiply by the dissipative propagator `exp(-kappa lambda_k tau)`;
    /// `tau` may be negative (inverse propagator inside the RK stages).
    fn propagate(&self, fhat: &mut SpectralField, tau: f64) {
        if self.params.kappa == 0.0 {
            return;
        }
        for (c, lam) in fhat.coeffs.iter_mut().zip(self.damping.iter()) {
            *c *= (-lam * tau).exp();
        }
    }

    /// One integrating-factor SSP-RK3 step of size `dt`.
    ///
    /// Stage states live at times `t`, `t + dt`, `t + dt/2`; pure
    /// dissipation (`rhs = 0`) is integrated exactly as
    /// `exp(-kappa lambda dt)` per mode. `stage0` must be the rhs
    /// evaluated at the current state; the evaluation at the new state is
    /// returned so consecutive steps cost three rhs evaluations each.
    /// Tracers, when present, are advanced with the matching stage
    /// velocities.
    pub fn step(
        &self,
        state: &mut SolverState,
        dt: f64,
        stage0: &RhsEval,
        tracers: &mut [Tracer],
    ) -> RhsEval {
        let theta_n = &state.theta_hat;

        // stage 1: Euler step propagated to t + dt
        let mut theta_1 = SpectralField {
            grid: self.grid,
            coeffs: theta_n
                .coeffs
                .iter()
                .zip(stage0.rhs_hat.coeffs.iter())
                .map(|(a, r)| a + dt * r)
                .collect(),
        };
        self.propagate(&mut theta_1, dt);
        let eval1 = self.rhs(&theta_1);

        // stage 2 at t + dt/2:
        //   3/4 E(dt/2) theta_n + 1/4 E(dt/2)(theta_n + dt N(theta_n))
        //   + dt/4 E(-dt/2) N(theta_1)
        let mut half_combo = SpectralField {
            grid: self.grid,
            coeffs: theta_n
                .coeffs
                .iter()
                .zip(stage0.rhs_hat.coeffs.iter())
                .map(|(a, r)| a + 0.25 * dt * r)
                .collect(),
        };
        self.propagate(&mut half_combo, 0.5 * dt);
        let mut back = SpectralField {
            grid: self.grid,
            coeffs: eval1.rhs_hat.coeffs.iter().map(|r| 0.25 * dt * r).collect(),
        };
        self.propagate(&mut back, -0.5 * dt);
        let theta_2 = SpectralField {
            grid: self.grid,
            coeffs: half_combo
                .coeffs
                .iter()
                .zip(back.coeffs.iter())
                .map(|(a, b)| a + b)
                .collect(),
        };
        let eval2 = self.rhs(&theta_2);

        // combine: 1/3 E(dt) theta_n + 2/3 E(dt/2) (theta_2 + dt N(theta_2))
        let mut part_n = SpectralField {
            grid: self.grid,
            coeffs: theta_n.coeffs.iter().map(|c| c / 3.0).collect(),
        };
        self.propagate(&mut part_n, dt);
        let mut part_2 = SpectralField {
            grid: self.grid,
            coeffs: theta_2
                .coeffs
                .iter()
                .zip(eval2.rhs_hat.coeffs.iter())
                .map(|(a, r)| (a + dt * r) * (2.0 / 3.0))
                .collect(),
        };
        self.propagate(&mut part_2, 0.5 * dt);
        let theta_next = SpectralField {
            grid: self.grid,
            coeffs: part_n
                .coeffs
                .iter()
                .zip(part_2.coeffs.iter())
                .map(|(a, b)| a + b)
                .collect(),
        };

        if !tracers.is_empty() {
            tracer::advance_tracers(tracers, &stage0.u_hat, &eval1.u_hat, &eval2.u_hat, dt, self.grid);
        }

        state.theta_hat = theta_next;
        state.t += dt;
        state.dt = dt;
        state.step_count += 1;

        self.rhs(&state.theta_hat)
    }
}

/// Knobs of one integration run.
#[derive(Debug, Clone)]
pub struct RunControls {
    pub t_end: f64,
    pub c_cfl: f64,
    pub dt_max: f64,
    /// stop when `|grad theta|_inf` exceeds this multiple of its initial value
    pub grad_factor: f64,
    /// stop when the pre-dealias product tail share exceeds this
    pub tail_threshold: f64,
    /// diagnostics cadence in time units
    pub series_interval: f64,
    /// capture the physical field at these times (sorted)
    pub snapshot_times: Vec<f64>,
    /// tracer seed positions
    pub tracer_seeds: Vec<Vec<f64>>,
    /// hard step budget; exhausting it reports resolution loss
    pub max_steps: u64,
}

impl Default for RunControls {
    fn default() -> Self {
        RunControls {
            t_end: 1.0,
            c_cfl: 0.4,
            dt_max: 0.01,
            grad_factor: 1e3,
            tail_threshold: 1e-4,
            series_interval: 0.01,
            snapshot_times: Vec::new(),
            tracer_seeds: Vec::new(),
            max_steps: 10_000_000,
        }
    }
}

/// A captured field with its actual capture time.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub field: PhysicalField,
}

/// Tracer history: `(t, position, theta at position)` per record tick.
#[derive(Debug, Clone)]
pub struct TracerTrack {
    pub theta_initial: f64,
    pub samples: Vec<(f64, [f64; 3], f64)>,
}

#[derive(Debug)]
pub struct RunOutput {
    pub report: StopReport,
    pub series: Vec<DiagnosticsRecord>,
    pub snapshots: Vec<Snapshot>,
    pub tracers: Vec<TracerTrack>,
}

/// Integrate from `theta0` until `t_end` or a stop trigger fires.
///
/// Gradient growth is checked at every diagnostics tick; NaN and tail
/// fraction are checked every step.
pub fn run(theta0: &PhysicalField, params: ModelParams, controls: &RunControls) -> Result<RunOutput, ParamError> {
    let solver = Solver::new(theta0.grid, params)?;
    let grid = solver.grid();
    let plan = solver.plan();
    let alpha = params.alpha;

    let mut state = solver.initial_state(theta0);
    let mut pending = solver.rhs(&state.theta_hat);

    let mut tracers: Vec<Tracer> = controls
        .tracer_seeds
        .iter()
        .map(|seed| {
            let value = tracer::eval_at(&state.theta_hat, &seed[..grid.dim()]);
            Tracer::new(grid, seed, value)
        })
        .collect();
    let mut tracks: Vec<TracerTrack> = tracers
        .iter()
        .map(|tr| TracerTrack { theta_initial: tr.theta_initial, samples: Vec::new() })
        .collect();

    let mut series = Vec::new();
    let mut snapshots = Vec::new();
    let mut snapshot_iter = controls.snapshot_times.iter().copied().peekable();

    let record_now = |state: &SolverState, tail: f64| -> DiagnosticsRecord {
        diagnostics::record(&state.theta_hat, alpha, state.t, tail, plan)
    };

    let first = record_now(&state, pending.tail_fraction);
    let grad_initial = first.grad_inf;
    let grad_limit = if grad_initial > 0.0 { controls.grad_factor * grad_initial } else { f64::INFINITY };
    series.push(first);
    for (tr, track) in tracers.iter().zip(tracks.iter_mut()) {
        track.samples.push((0.0, tr.position, tr.theta_initial));
    }
    while let Some(&ts) = snapshot_iter.peek() {
        if ts <= 0.0 {
            snapshots.push(Snapshot { t: 0.0, field: plan.inverse_unchecked(&state.theta_hat) });
            snapshot_iter.next();
        } else {
            break;
        }
    }

    let mut next_record = controls.series_interval;

    let finish = |reason: StopReason,
                  state: &SolverState,
                  series: &mut Vec<DiagnosticsRecord>,
                  tail: f64|
     -> StopReport {
        let last_is_current =
            series.last().map(|r| r.t == state.t).unwrap_or(false);
        let final_diagnostics = if last_is_current {
            *series.last().unwrap()
        } else if state.theta_hat.is_finite() {
            let rec = record_now(state, tail);
            series.push(rec);
            rec
        } else {
            let mut rec = *series.last().unwrap();
            rec.t = state.t;
            rec
        };
        StopReport { reason, t_stop: state.t, final_diagnostics }
    };

    loop {
        if state.t >= controls.t_end - 1e-14 * controls.t_end.max(1.0) {
            let tail = pending.tail_fraction;
            let report = finish(StopReason::ReachedEnd, &state, &mut series, tail);
            return Ok(RunOutput { report, series, snapshots, tracers: tracks });
        }
        if state.step_count >= controls.max_steps {
            let tail = pending.tail_fraction;
            let report = finish(StopReason::ResolutionLoss, &state, &mut series, tail);
            return Ok(RunOutput { report, series, snapshots, tracers: tracks });
        }

        let mut dt = cfl_dt(grid, pending.u_max, controls.c_cfl, controls.dt_max);
        // land exactly on the horizon, and on the next snapshot time
        dt = dt.min(controls.t_end - state.t);
        if let Some(&ts) = snapshot_iter.peek() {
            if ts > state.t {
                dt = dt.min(ts - state.t);
            }
        }
        if !(dt > 0.0) || dt < 1e-15 * state.t.max(1.0) {
            let tail = pending.tail_fraction;
            let report = finish(StopReason::ResolutionLoss, &state, &mut series, tail);
            return Ok(RunOutput { report, series, snapshots, tracers: tracks });
        }

        pending = solver.step(&mut state, dt, &pending, &mut tracers);

        if !state.theta_hat.is_finite() {
            let report = finish(StopReason::NanDetected, &state, &mut series, f64::NAN);
            return Ok(RunOutput { report, series, snapshots, tracers: tracks });
        }

        while let Some(&ts) = snapshot_iter.peek() {
            if state.t >= ts - 1e-12 {
                snapshots.push(Snapshot { t: state.t, field: plan.inverse_unchecked(&state.theta_hat) });
                snapshot_iter.next();
            } else {
                break;
            }
        }

        if pending.tail_fraction > controls.tail_threshold {
            let tail = pending.tail_fraction;
            let report = finish(StopReason::ResolutionLoss, &state, &mut series, tail);
            return Ok(RunOutput { report, series, snapshots, tracers: tracks });
        }

        if state.t >= next_record - 1e-12 {
            let rec = record_now(&state, pending.tail_fraction);
            let grad_now = rec.grad_inf;
            series.push(rec);
            for (tr, track) in tracers.iter().zip(tracks.iter_mut()) {
                let value = tracer::eval_at(&state.theta_hat, &tr.position[..grid.dim()]);
                track.samples.push((state.t, tr.position, value));
            }
            while next_record <= state.t + 1e-12 {
                next_record += controls.series_interval;
            }
            if grad_now > grad_limit {
                let report = StopReport {
                    reason: StopReason::GradientThreshold,
                    t_stop: state.t,
                    final_diagnostics: rec,
                };
                return Ok(RunOutput { report, series, snapshots, tracers: tracks });
            }
        }
    }
}

/// Fixed-step integration capturing spectral states after selected step
/// counts; the backbone of self-convergence and scaling-pair tests.
pub fn integrate_fixed(
    theta0: &PhysicalField,
    params: ModelParams,
    dt: f64,
    steps: usize,
    capture_after: &[usize],
) -> Result<Vec<SpectralField>, ParamError> {
    let solver = Solver::new(theta0.grid, params)?;
    let mut state = solver.initial_state(theta0);
    let mut pending = solver.rhs(&state.theta_hat);
    let mut captured = Vec::new();
    let mut capture_iter = capture_after.iter().copied().peekable();
    if capture_iter.peek() == Some(&0) {
        captured.push(state.theta_hat.clone());
        capture_iter.next();
    }
    for s in 1..=steps {
        pending = solver.step(&mut state, dt, &pending, &mut []);
        if capture_iter.peek() == Some(&s) {
            captured.push(state.theta_hat.clone());
            capture_iter.next();
        }
    }
    Ok(captured)
}
