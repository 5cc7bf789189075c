//! Trigonometric interpolation at off-grid points and Lagrangian tracers
//! carried along characteristics `x'(t) = u(x(t), t)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::field::{SpectralField, VectorField};
use crate::grid::Grid;

/// A tracer particle: periodic position plus the scalar value it started
/// with (constant along exact inviscid characteristics).
#[derive(Debug, Clone)]
pub struct Tracer {
    pub position: [f64; 3],
    pub theta_initial: f64,
}

impl Tracer {
    pub fn new(grid: Grid, position: &[f64], theta_initial: f64) -> Self {
        let mut p = [0.0; 3];
        for (ax, x) in position.iter().enumerate() {
            p[ax] = x.rem_euclid(grid.length());
        }
        Tracer { position: p, theta_initial }
    }
}

/// Per-axis phase tables `e^{2 pi i k(m) x_ax / L}` for one evaluation point.
fn phase_tables(grid: Grid, x: &[f64]) -> Vec<Vec<Complex64>> {
    let n = grid.points();
    (0..grid.dim())
        .map(|ax| {
            (0..n)
                .map(|m| {
                    let k = grid.wavenumber(m) as f64;
                    let phi = 2.0 * PI * k * x[ax] / grid.length();
                    Complex64::new(phi.cos(), phi.sin())
                })
                .collect()
        })
        .collect()
}

/// Value of the band-limited interpolant at an arbitrary point:
/// `(1/L^n) sum_k c_k e^{2 pi i k.x / L}`. Exact for band-limited fields.
pub fn eval_at(fhat: &SpectralField, x: &[f64]) -> f64 {
    let grid = fhat.grid;
    let tabs = phase_tables(grid, x);
    let mut acc = Complex64::new(0.0, 0.0);
    match grid.dim() {
        1 => {
            for (m, c) in fhat.coeffs.iter().enumerate() {
                acc += c * tabs[0][m];
            }
        }
        2 => {
            let n = grid.points();
            for m1 in 0..n {
                let mut row = Complex64::new(0.0, 0.0);
                for m2 in 0..n {
                    row += fhat.coeffs[m1 * n + m2] * tabs[1][m2];
                }
                acc += row * tabs[0][m1];
            }
        }
        _ => {
            let n = grid.points();
            for m1 in 0..n {
                let mut plane = Complex64::new(0.0, 0.0);
                for m2 in 0..n {
                    let mut row = Complex64::new(0.0, 0.0);
                    for m3 in 0..n {
                        row += fhat.coeffs[(m1 * n + m2) * n + m3] * tabs[2][m3];
                    }
                    plane += row * tabs[1][m2];
                }
                acc += plane * tabs[0][m1];
            }
        }
    }
    acc.re / grid.volume()
}

/// Value, gradient, and Hessian of the interpolant at one point.
pub fn eval_with_derivatives(fhat: &SpectralField, x: &[f64]) -> (f64, [f64; 3], [[f64; 3]; 3]) {
    let grid = fhat.grid;
    let dim = grid.dim();
    let tabs = phase_tables(grid, x);
    let base = 2.0 * PI / grid.length();
    let mut value = 0.0;
    let mut grad = [0.0; 3];
    let mut hess = [[0.0; 3]; 3];
    for (flat, c) in fhat.coeffs.iter().enumerate() {
        if c.re == 0.0 && c.im == 0.0 {
            continue;
        }
        let idx = grid.unravel(flat);
        let mut phase = Complex64::new(1.0, 0.0);
        for ax in 0..dim {
            phase *= tabs[ax][idx[ax]];
        }
        let z = c * phase;
        let k = grid.wavevector(flat);
        value += z.re;
        for j in 0..dim {
            let kj = base * k[j] as f64;
            // d/dx_j picks up i k_j: real part of i z is -z.im
            grad[j] -= kj * z.im;
            for l in j..dim {
                let kl = base * k[l] as f64;
                hess[j][l] -= kj * kl * z.re;
            }
        }
    }
    let vol = grid.volume();
    value /= vol;
    for j in 0..dim {
        grad[j] /= vol;
        for l in j..dim {
            hess[j][l] /= vol;
            hess[l][j] = hess[j][l];
        }
    }
    (value, grad, hess)
}

/// Interpolated velocity vector at an arbitrary point.
pub fn velocity_at(u_hat: &VectorField<SpectralField>, x: &[f64]) -> [f64; 3] {
    let mut u = [0.0; 3];
    for (ax, comp) in u_hat.components.iter().enumerate() {
        u[ax] = eval_at(comp, x);
    }
    u
}

/// Solve the small symmetric system `H d = -g`; `None` when singular.
fn newton_direction(dim: usize, hess: &[[f64; 3]; 3], grad: &[f64; 3]) -> Option<[f64; 3]> {
    match dim {
        1 => {
            let h = hess[0][0];
            if h.abs() < 1e-300 {
                return None;
            }
            Some([-grad[0] / h, 0.0, 0.0])
        }
        2 => {
            let det = hess[0][0] * hess[1][1] - hess[0][1] * hess[1][0];
            if det.abs() < 1e-300 {
                return None;
            }
            Some([
                (-grad[0] * hess[1][1] + grad[1] * hess[0][1]) / det,
                (-grad[1] * hess[0][0] + grad[0] * hess[1][0]) / det,
                0.0,
            ])
        }
        _ => {
            // 3x3 Cramer
            let h = hess;
            let det = h[0][0] * (h[1][1] * h[2][2] - h[1][2] * h[2][1])
                - h[0][1] * (h[1][0] * h[2][2] - h[1][2] * h[2][0])
                + h[0][2] * (h[1][0] * h[2][1] - h[1][1] * h[2][0]);
            if det.abs() < 1e-300 {
                return None;
            }
            let b = [-grad[0], -grad[1], -grad[2]];
            let mut d = [0.0; 3];
            for col in 0..3 {
                let mut m = *h;
                for row in 0..3 {
                    m[row][col] = b[row];
                }
                let dc = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                    - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                    + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
                d[col] = dc / det;
            }
            Some(d)
        }
    }
}

/// Maximum of the band-limited interpolant, refined from the grid argmax by
/// Newton iteration; falls back to the lattice value when refinement does
/// not improve it.
pub fn refined_maximum(fhat: &SpectralField, grid_argmax: usize, grid_value: f64) -> f64 {
    let grid = fhat.grid;
    let dim = grid.dim();
    let h = grid.spacing();
    let start = grid.coordinates(grid_argmax);
    let mut x = start;
    let mut best = grid_value;
    for _ in 0..5 {
        let (v, g, hs) = eval_with_derivatives(fhat, &x[..dim]);
        best = best.max(v);
        let Some(mut d) = newton_direction(dim, &hs, &g) else { break };
        let norm = (0..dim).map(|j| d[j] * d[j]).sum::<f64>().sqrt();
        if norm > h {
            for dj in d.iter_mut() {
                *dj *= h / norm;
            }
        }
        let mut moved = 0.0;
        for j in 0..dim {
            x[j] += d[j];
            moved += d[j] * d[j];
        }
        if moved.sqrt() < 1e-13 * grid.length() {
            break;
        }
    }
    let v = eval_at(fhat, &x[..grid.dim()]);
    best.max(v)
}

/// Minimum of the interpolant; mirror of [`refined_maximum`].
pub fn refined_minimum(fhat: &SpectralField, grid_argmin: usize, grid_value: f64) -> f64 {
    let mut neg = fhat.clone();
    for c in neg.coeffs.iter_mut() {
        *c = -*c;
    }
    -refined_maximum(&neg, grid_argmin, -grid_value)
}

/// One SSP-RK3 stage combination for tracer positions, using velocities
/// sampled at the three stage states (times `t`, `t + dt`, `t + dt/2`).
pub fn advance_tracers(
    tracers: &mut [Tracer],
    u_stage0: &VectorField<SpectralField>,
    u_stage1: &VectorField<SpectralField>,
    u_stage2: &VectorField<SpectralField>,
    dt: f64,
    grid: Grid,
) {
    let dim = grid.dim();
    let length = grid.length();
    for tracer in tracers.iter_mut() {
        let x0 = tracer.position;
        let k1 = velocity_at(u_stage0, &x0[..dim]);
        let mut x1 = [0.0; 3];
        for j in 0..dim {
            x1[j] = x0[j] + dt * k1[j];
        }
        let k2 = velocity_at(u_stage1, &x1[..dim]);
        let mut x2 = [0.0; 3];
        for j in 0..dim {
            x2[j] = 0.75 * x0[j] + 0.25 * (x1[j] + dt * k2[j]);
        }
        let k3 = velocity_at(u_stage2, &x2[..dim]);
        for j in 0..dim {
            let xn = x0[j] / 3.0 + 2.0 / 3.0 * (x2[j] + dt * k3[j]);
            tracer.position[j] = xn.rem_euclid(length);
        }
    }
}
