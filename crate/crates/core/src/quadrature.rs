//! Real-space singular-integral oracles for the fractional Laplacian and
//! the nonlocal velocity, used to cross-validate the Fourier multipliers.
//!
//! Both operators act on the periodic extension of the sampled field, so
//! the free-space kernels are periodized by summing over box images; the
//! Fourier path computes exactly that periodic operator. Near the
//! singularity the quadrature integrates kernel-times-interpolant over
//! subdivided cells, the singular cell itself is handled with an exact
//! second-moment correction, and far images are folded into the weight
//! table with an analytic smeared remainder. Everything here is direct
//! summation - deliberately independent of the FFT path it checks.

use std::f64::consts::PI;

use rayon::prelude::*;
use thiserror::Error;

use crate::field::{PhysicalField, VectorField};
use crate::grid::Grid;

#[derive(Debug, Error, PartialEq)]
pub enum QuadratureError {
    #[error("singular-integral order {0} outside (0, 2)")]
    OrderRange(f64),
    #[error("fractional order {0} outside (0, 1)")]
    AlphaRange(f64),
}

/// Support diagnostics for the effectively-compact-support precondition.
#[derive(Debug, Clone, Copy)]
pub struct TailReport {
    /// Share of the absolute mass within `0.1 L` of the box faces.
    pub edge_mass_fraction: f64,
    /// True when the precondition `edge_mass_fraction <= 1e-8` failed.
    pub warning: bool,
}

const EDGE_MASS_LIMIT: f64 = 1e-8;

/// Number of image shells folded into the periodized kernel table.
const IMAGE_SHELLS: i64 = 5;
/// Wrapped offsets with `|d|_inf` up to this many cells integrate kernel
/// times a local polynomial interpolant over the cell. The velocity
/// kernel needs a wider band: its output is a near-cancellation, so the
/// midpoint error of the `|z|^{-n-2 alpha + 1}` tail bites harder.
const SCALAR_NEAR_CELLS: i64 = 4;
const VELOCITY_NEAR_CELLS: i64 = 6;
/// Subdivision factor per axis for near-cell integration.
const NEAR_SUBDIV: usize = 6;

/// Surface area of the unit sphere in `R^n`.
fn unit_sphere_area(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => unreachable!("grids are 1-3 dimensional"),
    }
}

/// Gamma function on the positive axis.
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Normalization of the hypersingular integral representation of
/// `Lambda^s = (-Delta)^{s/2}`, `0 < s < 2`:
/// `C_{n,s} = 2^s Gamma((n+s)/2) / (pi^{n/2} |Gamma(-s/2)|)`, written with
/// `|Gamma(-s/2)| = (2/s) Gamma(1 - s/2)` so it stays finite on the whole
/// range.
pub fn lambda_constant(n: usize, s: f64) -> f64 {
    2.0f64.powf(s) * gamma((n as f64 + s) / 2.0) * s
        / (2.0 * PI.powf(n as f64 / 2.0) * gamma(1.0 - s / 2.0))
}

/// Normalization of the velocity kernel `C_{n,alpha} (x-y) / |x-y|^{n+2 alpha}`
/// for `u = grad Lambda^{-2+2 alpha} theta`. Using `z Gamma(z) = Gamma(z+1)`
/// the raw form `(2-2 alpha-n) Gamma(n/2-1+alpha) / (pi^{n/2} 2^{2-2 alpha}
/// Gamma(1-alpha))` collapses to `-2 Gamma(n/2+alpha) / (pi^{n/2}
/// 2^{2-2 alpha} Gamma(1-alpha))`, finite for all `alpha` in `(0,1)`.
pub fn velocity_constant(n: usize, alpha: f64) -> f64 {
    -2.0 * gamma(n as f64 / 2.0 + alpha)
        / (PI.powf(n as f64 / 2.0) * 2.0f64.powf(2.0 - 2.0 * alpha) * gamma(1.0 - alpha))
}

/// Fraction of `sum |f|` sitting within `0.1 L` of a box face.
fn edge_mass_fraction(f: &PhysicalField) -> f64 {
    let grid = f.grid;
    let n = grid.points();
    let band = (n as f64 * 0.1).ceil() as usize;
    let mut edge = 0.0;
    let mut total = 0.0;
    for (flat, v) in f.values.iter().enumerate() {
        let idx = grid.unravel(flat);
        let a = v.abs();
        total += a;
        let near_face = (0..grid.dim()).any(|ax| idx[ax] < band || idx[ax] >= n - band);
        if near_face {
            edge += a;
        }
    }
    if total > 0.0 {
        edge / total
    } else {
        0.0
    }
}

fn tail_report(f: &PhysicalField) -> TailReport {
    let frac = edge_mass_fraction(f);
    TailReport { edge_mass_fraction: frac, warning: frac > EDGE_MASS_LIMIT }
}

/// Minimum-image displacement for a wrapped offset index.
#[inline]
fn wrapped_offset(d: usize, n: usize) -> i64 {
    let d = d as i64;
    let n = n as i64;
    if d <= n / 2 {
        d
    } else {
        d - n
    }
}

/// Periodized scalar kernel weights `w(d) ~= integral over cell d of
/// sum_m |z + m L|^{-n-s} dz` on the wrapped offset lattice, plus the
/// smeared analytic remainder of the image sum. The entry at `d = 0`
/// covers images only; the singular `m = 0` cell is handled separately.
fn scalar_weight_table(grid: Grid, s: f64) -> Vec<f64> {
    let n = grid.points();
    let dim = grid.dim();
    let h = grid.spacing();
    let len = grid.len();
    let power = dim as f64 + s;
    let cell = grid.cell_volume();

    let mut table = vec![0.0f64; len];
    let shells = IMAGE_SHELLS;
    // fold K over the extended offset lattice d + m N per axis
    let fold = |flat: usize, table_entry: &mut f64| {
        let idx = grid.unravel(flat);
        let mut m = [-shells; 3];
        loop {
            let mut zsq = 0.0;
            let mut is_origin = true;
            for ax in 0..dim {
                let comp = wrapped_offset(idx[ax], n) + m[ax] * n as i64;
                if comp != 0 {
                    is_origin = false;
                }
                let z = comp as f64 * h;
                zsq += z * z;
            }
            if !is_origin {
                *table_entry += cell * zsq.sqrt().powf(-power);
            }
            // next image tuple
            let mut ax = 0;
            loop {
                if ax == dim {
                    return;
                }
                m[ax] += 1;
                if m[ax] <= shells {
                    break;
                }
                m[ax] = -shells;
                ax += 1;
            }
        }
    };
    table.par_iter_mut().enumerate().for_each(|(flat, w)| fold(flat, w));

    // Smeared remainder of the image sum beyond the folded shells: the
    // images are dense and smooth at that distance, so spread the residual
    // kernel mass uniformly over the box.
    let r_far = (shells as f64 + 0.5) * grid.length();
    let remainder = unit_sphere_area(dim) * r_far.powf(-s) / s;
    let density = remainder / grid.volume();
    for w in table.iter_mut() {
        *w += density * cell;
    }
    table
}

/// Exact second moment `integral over the singular cell of |z|^2 K(z) dz`
/// with `K = |z|^{-n-s}`: analytic ball part plus midpoint corners.
fn singular_cell_second_moment(grid: Grid, s: f64) -> f64 {
    let h = grid.spacing();
    let r = h / 2.0;
    let dim = grid.dim();
    let ball = unit_sphere_area(dim) * r.powf(2.0 - s) / (2.0 - s);
    if dim == 1 {
        return ball;
    }
    // corners of the cube [-r, r]^n outside the inscribed ball
    let g = 64usize;
    let sub = h / g as f64;
    let mut corner = 0.0;
    let mut idx = vec![0usize; dim];
    loop {
        let mut zsq = 0.0;
        for ax in 0..dim {
            let z = (idx[ax] as f64 + 0.5) * sub - r;
            zsq += z * z;
        }
        if zsq > r * r {
            corner += zsq * zsq.sqrt().powf(-(dim as f64 + s)) * sub.powi(dim as i32);
        }
        let mut ax = 0;
        loop {
            if ax == dim {
                return ball + corner;
            }
            idx[ax] += 1;
            if idx[ax] < g {
                break;
            }
            idx[ax] = 0;
            ax += 1;
        }
    }
}

/// Tensor-product cubic Lagrange interpolation of `f` at fractional lattice
/// coordinates (periodic).
fn cubic_interpolate(f: &PhysicalField, pos: &[f64]) -> f64 {
    let grid = f.grid;
    let n = grid.points() as i64;
    let dim = grid.dim();
    let mut base = [0i64; 3];
    let mut w = [[0.0f64; 4]; 3];
    for ax in 0..dim {
        let p = pos[ax];
        let i0 = p.floor() as i64;
        let t = p - i0 as f64;
        base[ax] = i0 - 1;
        // cubic Lagrange weights on the stencil {-1, 0, 1, 2}
        w[ax][0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
        w[ax][1] = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
        w[ax][2] = -(t + 1.0) * t * (t - 2.0) / 2.0;
        w[ax][3] = (t + 1.0) * t * (t - 1.0) / 6.0;
    }
    let mut acc = 0.0;
    let mut offs = [0usize; 3];
    loop {
        let mut weight = 1.0;
        let mut idx = [0usize; 3];
        for ax in 0..dim {
            weight *= w[ax][offs[ax]];
            idx[ax] = (base[ax] + offs[ax] as i64).rem_euclid(n) as usize;
        }
        acc += weight * f.values[grid.ravel(&idx[..dim])];
        let mut ax = 0;
        loop {
            if ax == dim {
                return acc;
            }
            offs[ax] += 1;
            if offs[ax] < 4 {
                break;
            }
            offs[ax] = 0;
            ax += 1;
        }
    }
}

/// Fourth-order periodic central difference along one axis.
fn lattice_derivative(f: &PhysicalField, flat: usize, axis: usize) -> f64 {
    let grid = f.grid;
    let n = grid.points();
    let h = grid.spacing();
    let idx = grid.unravel(flat);
    let dim = grid.dim();
    let shift = |offset: i64| -> f64 {
        let mut j = idx;
        j[axis] = (idx[axis] as i64 + offset).rem_euclid(n as i64) as usize;
        f.values[grid.ravel(&j[..dim])]
    };
    (8.0 * (shift(1) - shift(-1)) - (shift(2) - shift(-2))) / (12.0 * h)
}

/// Second-order periodic central difference Laplacian at one point.
fn lattice_laplacian(f: &PhysicalField, flat: usize) -> f64 {
    let grid = f.grid;
    let n = grid.points();
    let h = grid.spacing();
    let idx = grid.unravel(flat);
    let dim = grid.dim();
    let center = f.values[flat];
    let mut acc = 0.0;
    for ax in 0..dim {
        let mut up = idx;
        let mut dn = idx;
        up[ax] = (idx[ax] + 1) % n;
        dn[ax] = (idx[ax] + n - 1) % n;
        acc += f.values[grid.ravel(&up[..dim])] + f.values[grid.ravel(&dn[..dim])] - 2.0 * center;
    }
    acc / (h * h)
}

/// Enumerate near offsets `|d|_inf <= r`, excluding the origin.
fn near_offsets(dim: usize, r: i64) -> Vec<[i64; 3]> {
    let mut offs = Vec::new();
    let mut d = [-r; 3];
    let active = dim;
    loop {
        let zero = (0..active).all(|ax| d[ax] == 0);
        let within = (0..active).all(|ax| d[ax].abs() <= r);
        if !zero && within {
            let mut o = [0i64; 3];
            o[..active].copy_from_slice(&d[..active]);
            offs.push(o);
        }
        let mut ax = 0;
        loop {
            if ax == active {
                return offs;
            }
            d[ax] += 1;
            if d[ax] <= r {
                break;
            }
            d[ax] = -r;
            ax += 1;
        }
    }
}

/// Relative sub-cell midpoints for one cell, `NEAR_SUBDIV^dim` of them.
fn subcell_points(dim: usize) -> Vec<[f64; 3]> {
    let g = NEAR_SUBDIV;
    let mut pts = Vec::with_capacity(g.pow(dim as u32));
    let mut idx = [0usize; 3];
    loop {
        let mut p = [0.0f64; 3];
        for ax in 0..dim {
            p[ax] = (idx[ax] as f64 + 0.5) / g as f64 - 0.5;
        }
        pts.push(p);
        let mut ax = 0;
        loop {
            if ax == dim {
                return pts;
            }
            idx[ax] += 1;
            if idx[ax] < g {
                break;
            }
            idx[ax] = 0;
            ax += 1;
        }
    }
}

/// Hypersingular-integral form of the fractional Laplacian,
/// `C_{n,s} P.V. integral (f(x) - f(y)) / |x-y|^{n+s} dy`, quadrature over
/// the periodic box. A slow oracle for [`crate::operators::fractional_laplacian`].
pub fn singular_integral_lambda(
    f: &PhysicalField,
    s: f64,
) -> Result<(PhysicalField, TailReport), QuadratureError> {
    if s <= 0.0 || s >= 2.0 {
        return Err(QuadratureError::OrderRange(s));
    }
    let grid = f.grid;
    let n = grid.points();
    let dim = grid.dim();
    let h = grid.spacing();
    let report = tail_report(f);
    let constant = lambda_constant(dim, s);
    let power = dim as f64 + s;

    let mut table = scalar_weight_table(grid, s);
    // near cells are re-integrated against the interpolant below; keep only
    // their image contributions in the table
    let near = near_offsets(dim, SCALAR_NEAR_CELLS);
    let cell = grid.cell_volume();
    for d in &near {
        let mut idx = [0usize; 3];
        for ax in 0..dim {
            idx[ax] = d[ax].rem_euclid(n as i64) as usize;
        }
        let mut zsq = 0.0;
        for ax in 0..dim {
            let z = d[ax] as f64 * h;
            zsq += z * z;
        }
        table[grid.ravel(&idx[..dim])] -= cell * zsq.sqrt().powf(-power);
    }
    let kernel_sum: f64 = table.iter().sum();

    let subs = subcell_points(dim);
    let subcell_vol = cell / subs.len() as f64;
    let m2 = singular_cell_second_moment(grid, s);

    let mut out = PhysicalField::zeros(grid);
    out.values
        .par_iter_mut()
        .enumerate()
        .for_each(|(xflat, slot)| {
            let xidx = grid.unravel(xflat);
            let fx = f.values[xflat];

            // far field: correlation against the periodized weight table
            let mut far = fx * kernel_sum;
            match dim {
                1 => {
                    for y1 in 0..n {
                        let d1 = (xidx[0] + n - y1) % n;
                        far -= f.values[y1] * table[d1];
                    }
                }
                2 => {
                    for y1 in 0..n {
                        let d1 = (xidx[0] + n - y1) % n;
                        let trow = &table[d1 * n..(d1 + 1) * n];
                        let frow = &f.values[y1 * n..(y1 + 1) * n];
                        for y2 in 0..n {
                            let d2 = (xidx[1] + n - y2) % n;
                            far -= frow[y2] * trow[d2];
                        }
                    }
                }
                _ => {
                    for yflat in 0..grid.len() {
                        let yidx = grid.unravel(yflat);
                        let mut didx = [0usize; 3];
                        for ax in 0..dim {
                            didx[ax] = (xidx[ax] + n - yidx[ax]) % n;
                        }
                        far -= f.values[yflat] * table[grid.ravel(&didx[..dim])];
                    }
                }
            }

            // near cells: kernel times cubic interpolant on subdivided cells
            let mut nearsum = 0.0;
            for d in &near {
                for p in &subs {
                    let mut zsq = 0.0;
                    let mut pos = [0.0f64; 3];
                    for ax in 0..dim {
                        let zcells = d[ax] as f64 + p[ax];
                        let z = zcells * h;
                        zsq += z * z;
                        pos[ax] = xidx[ax] as f64 - zcells;
                    }
                    let fy = cubic_interpolate(f, &pos[..dim]);
                    nearsum += (fx - fy) * zsq.sqrt().powf(-power) * subcell_vol;
                }
            }

            // singular cell: second-moment correction with the lattice Laplacian
            let core = -(lattice_laplacian(f, xflat) / (2.0 * dim as f64)) * m2;

            *slot = constant * (far + nearsum + core);
        });

    Ok((out, report))
}

/// Linear coefficient of the truncated image-sum remainder for the odd
/// velocity kernel. With symmetric truncation the zeroth-order image terms
/// cancel and the leading remainder is `tau z` with
/// `tau = -(2 alpha / n) sum over far images of |m L|^{-n-2 alpha}`,
/// because `sum grad K(w) = (div K / n) I` on the cubic image lattice.
fn image_remainder_slope(grid: Grid, alpha: f64) -> f64 {
    let dim = grid.dim();
    let length = grid.length();
    let power = dim as f64 + 2.0 * alpha;
    let shells = IMAGE_SHELLS;
    let wide = 64i64;
    let mut lattice = 0.0;
    let mut m = [-wide; 3];
    'outer: loop {
        let inside = (0..dim).all(|ax| m[ax].abs() <= shells);
        if !inside {
            let mut wsq = 0.0;
            for ax in 0..dim {
                let w = m[ax] as f64 * length;
                wsq += w * w;
            }
            lattice += wsq.sqrt().powf(-power);
        }
        let mut ax = 0;
        loop {
            if ax == dim {
                break 'outer;
            }
            m[ax] += 1;
            if m[ax] <= wide {
                break;
            }
            m[ax] = -wide;
            ax += 1;
        }
    }
    // continuum tail beyond the numerically summed images
    let r_far = (wide as f64 + 0.5) * length;
    let tail = unit_sphere_area(dim) * r_far.powf(-2.0 * alpha) / (2.0 * alpha)
        / length.powi(dim as i32);
    -(2.0 * alpha / dim as f64) * (lattice + tail)
}

/// Periodized antisymmetric weight table for the velocity kernel
/// `z / |z|^{n+2 alpha}`; one table per component. Symmetric image
/// truncation keeps the conditional sum antisymmetric (the folded table
/// has exactly zero mean) and the linear remainder slope from
/// [`image_remainder_slope`] restores the truncated far images.
fn vector_weight_table(grid: Grid, alpha: f64) -> Vec<Vec<f64>> {
    let n = grid.points();
    let dim = grid.dim();
    let h = grid.spacing();
    let len = grid.len();
    let power = dim as f64 + 2.0 * alpha;
    let cell = grid.cell_volume();
    let shells = IMAGE_SHELLS;
    let slope = image_remainder_slope(grid, alpha);

    let mut tables = vec![vec![0.0f64; len]; dim];
    let entries: Vec<(usize, [f64; 3])> = (0..len)
        .into_par_iter()
        .map(|flat| {
            let idx = grid.unravel(flat);
            let mut acc = [0.0f64; 3];
            let mut m = [-shells; 3];
            loop {
                let mut zsq = 0.0;
                let mut z = [0.0f64; 3];
                let mut is_origin = true;
                for ax in 0..dim {
                    let comp = wrapped_offset(idx[ax], n) + m[ax] * n as i64;
                    if comp != 0 {
                        is_origin = false;
                    }
                    z[ax] = comp as f64 * h;
                    zsq += z[ax] * z[ax];
                }
                if !is_origin {
                    let k = zsq.sqrt().powf(-power) * cell;
                    for ax in 0..dim {
                        acc[ax] += z[ax] * k;
                    }
                }
                let mut ax = 0;
                loop {
                    if ax == dim {
                        // truncated far images enter as the linear slope
                        for a2 in 0..dim {
                            let zmin = wrapped_offset(idx[a2], n) as f64 * h;
                            acc[a2] += slope * zmin * cell;
                        }
                        return (flat, acc);
                    }
                    m[ax] += 1;
                    if m[ax] <= shells {
                        break;
                    }
                    m[ax] = -shells;
                    ax += 1;
                }
            }
        })
        .collect();
    for (flat, acc) in entries {
        for ax in 0..dim {
            tables[ax][flat] = acc[ax];
        }
    }
    tables
}

/// Principal-value convolution form of the gradient-type velocity,
/// `u(x) = C_{n,alpha} P.V. integral (x-y) |x-y|^{-n-2 alpha} theta(y) dy`,
/// quadrature over the periodic box. A slow oracle for
/// [`crate::operators::velocity_gradient_type`].
pub fn kernel_velocity(
    theta: &PhysicalField,
    alpha: f64,
) -> Result<(VectorField<PhysicalField>, TailReport), QuadratureError> {
    if alpha <= 0.0 || alpha >= 1.0 {
        return Err(QuadratureError::AlphaRange(alpha));
    }
    let grid = theta.grid;
    let n = grid.points();
    let dim = grid.dim();
    let h = grid.spacing();
    let report = tail_report(theta);
    let constant = velocity_constant(dim, alpha);
    let power = dim as f64 + 2.0 * alpha;

    let mut tables = vector_weight_table(grid, alpha);
    let near = near_offsets(dim, VELOCITY_NEAR_CELLS);
    let cell = grid.cell_volume();
    for d in &near {
        let mut idx = [0usize; 3];
        let mut zsq = 0.0;
        for ax in 0..dim {
            idx[ax] = d[ax].rem_euclid(n as i64) as usize;
            let z = d[ax] as f64 * h;
            zsq += z * z;
        }
        let k = zsq.sqrt().powf(-power) * cell;
        let flat = grid.ravel(&idx[..dim]);
        for ax in 0..dim {
            tables[ax][flat] -= d[ax] as f64 * h * k;
        }
    }

    let subs = subcell_points(dim);
    let subcell_vol = cell / subs.len() as f64;
    // singular cell: the odd kernel kills the zeroth moment, but its first
    // moment against grad f survives:
    // integral over cell0 of K(z) f(x-z) dz ~= -(M2 / n) grad f(x)
    let m2 = singular_cell_second_moment(grid, 2.0 * alpha) / dim as f64;

    let results: Vec<Vec<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|xflat| {
            let xidx = grid.unravel(xflat);
            let mut u = vec![0.0f64; dim];

            // far field through the folded tables
            match dim {
                2 => {
                    for y1 in 0..n {
                        let d1 = (xidx[0] + n - y1) % n;
                        let t0 = &tables[0][d1 * n..(d1 + 1) * n];
                        let t1 = &tables[1][d1 * n..(d1 + 1) * n];
                        let frow = &theta.values[y1 * n..(y1 + 1) * n];
                        for y2 in 0..n {
                            let d2 = (xidx[1] + n - y2) % n;
                            u[0] += frow[y2] * t0[d2];
                            u[1] += frow[y2] * t1[d2];
                        }
                    }
                }
                _ => {
                    for yflat in 0..grid.len() {
                        let yidx = grid.unravel(yflat);
                        let mut didx = [0usize; 3];
                        for ax in 0..dim {
                            didx[ax] = (xidx[ax] + n - yidx[ax]) % n;
                        }
                        let flat = grid.ravel(&didx[..dim]);
                        for ax in 0..dim {
                            u[ax] += theta.values[yflat] * tables[ax][flat];
                        }
                    }
                }
            }

            for ax in 0..dim {
                u[ax] -= m2 * lattice_derivative(theta, xflat, ax);
            }

            // near cells against the interpolant
            for d in &near {
                for p in &subs {
                    let mut zsq = 0.0;
                    let mut z = [0.0f64; 3];
                    let mut pos = [0.0f64; 3];
                    for ax in 0..dim {
                        let zcells = d[ax] as f64 + p[ax];
                        z[ax] = zcells * h;
                        zsq += z[ax] * z[ax];
                        pos[ax] = xidx[ax] as f64 - zcells;
                    }
                    let fy = cubic_interpolate(theta, &pos[..dim]);
                    let k = zsq.sqrt().powf(-power) * subcell_vol;
                    for ax in 0..dim {
                        u[ax] += z[ax] * k * fy;
                    }
                }
            }

            for v in u.iter_mut() {
                *v *= constant;
            }
            u
        })
        .collect();

    let mut components = vec![PhysicalField::zeros(grid); dim];
    for (xflat, u) in results.iter().enumerate() {
        for ax in 0..dim {
            components[ax].values[xflat] = u[ax];
        }
    }
    Ok((VectorField::new(components), report))
}
