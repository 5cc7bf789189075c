//! Paired-run scaling invariance test: if `theta` solves the equation,
//! so does `theta_{lambda,mu}(x,t) = lambda^{-2 alpha} mu theta(lambda x, mu t)`
//! (inviscid, two parameters) while the dissipative equation admits only
//! `mu = lambda^gamma`.

use thiserror::Error;

use crate::field::PhysicalField;
use crate::grid::Grid;
use crate::solver::{integrate_fixed, ModelParams, ParamError};

#[derive(Debug, Error)]
pub enum ScalingError {
    #[error("lambda must divide the grid resolution: N = {points}, lambda = {lambda}")]
    Incompatible { points: usize, lambda: usize },
    #[error("comparison times must be positive multiples of dt_b = {0}")]
    TimeGrid(f64),
    #[error(transparent)]
    Params(#[from] ParamError),
}

#[derive(Debug, Clone)]
pub struct ScalingPairResult {
    /// max over compare times and lattice points of
    /// `|lambda^{-2 alpha} mu theta_A(lambda x, mu t) - theta_B(x, t)|`,
    /// normalized by `|theta_0|_inf`
    pub max_deviation_rel: f64,
    pub compare_times: Vec<f64>,
}

/// Run A from `theta0`; run B from the rescaled data on the contracted
/// box with matched spacing and time step (`dt_B = dt_A / mu`), then
/// compare the rescaled A snapshots against B on B's lattice.
///
/// `t_compare` lists B-frame times; each must be an integer multiple of
/// `dt_a / mu` so both runs land on the comparison instants exactly.
pub fn scaling_pair_test(
    theta0: &PhysicalField,
    params: ModelParams,
    lambda: usize,
    mu: f64,
    t_compare: &[f64],
    dt_a: f64,
) -> Result<ScalingPairResult, ScalingError> {
    let grid_a = theta0.grid;
    let n_a = grid_a.points();
    if lambda == 0 || n_a % lambda != 0 || (n_a / lambda) % 2 != 0 || n_a / lambda < 4 {
        return Err(ScalingError::Incompatible { points: n_a, lambda });
    }
    let dt_b = dt_a / mu;
    let mut steps_b = Vec::with_capacity(t_compare.len());
    for &t in t_compare {
        let m = t / dt_b;
        let rounded = m.round();
        if t <= 0.0 || (m - rounded).abs() > 1e-9 {
            return Err(ScalingError::TimeGrid(dt_b));
        }
        steps_b.push(rounded as usize);
    }

    let amplitude = (lambda as f64).powf(-2.0 * params.alpha) * mu;

    // run B on the contracted box: same lattice spacing, N/lambda points
    let grid_b = Grid::new(grid_a.dim(), n_a / lambda, grid_a.length() / lambda as f64)
        .expect("divisor-checked grid");
    let mut theta0_b = PhysicalField::zeros(grid_b);
    for flat_b in 0..grid_b.len() {
        let idx_b = grid_b.unravel(flat_b);
        // lambda x on B's lattice is the A lattice point with stride lambda
        let mut idx_a = [0usize; 3];
        for ax in 0..grid_a.dim() {
            idx_a[ax] = (idx_b[ax] * lambda) % n_a;
        }
        theta0_b.values[flat_b] = amplitude * theta0.values[grid_a.ravel(&idx_a[..grid_a.dim()])];
    }

    let max_steps = *steps_b.last().unwrap_or(&0);
    let states_b = integrate_fixed(&theta0_b, params, dt_b, max_steps, &steps_b)?;
    let states_a = integrate_fixed(theta0, params, dt_a, max_steps, &steps_b)?;

    let scale_inf = theta0.max_abs().max(1e-300);
    let plan_a = crate::fft::TransformPlan::new(grid_a);
    let plan_b = crate::fft::TransformPlan::new(grid_b);
    let mut worst: f64 = 0.0;
    for (a_hat, b_hat) in states_a.iter().zip(states_b.iter()) {
        let a = plan_a.inverse_unchecked(a_hat);
        let b = plan_b.inverse_unchecked(b_hat);
        for flat_b in 0..grid_b.len() {
            let idx_b = grid_b.unravel(flat_b);
            let mut idx_a = [0usize; 3];
            for ax in 0..grid_a.dim() {
                idx_a[ax] = (idx_b[ax] * lambda) % n_a;
            }
            let rescaled = amplitude * a.values[grid_a.ravel(&idx_a[..grid_a.dim()])];
            worst = worst.max((rescaled - b.values[flat_b]).abs());
        }
    }
    Ok(ScalingPairResult {
        max_deviation_rel: worst / scale_inf,
        compare_times: t_compare.to_vec(),
    })
}
