//! Initial-data catalog: Gaussians, compactly supported bumps, dipoles,
//! and seeded random band-limited fields.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fft::TransformPlan;
use crate::field::{PhysicalField, SpectralField};
use crate::grid::Grid;
use crate::operators;

/// Squared distance to `center` under the minimum-image convention.
fn periodic_dist_sq(x: &[f64], center: &[f64], length: f64) -> f64 {
    let mut acc = 0.0;
    for (xi, ci) in x.iter().zip(center.iter()) {
        let mut d = (xi - ci).rem_euclid(length);
        if d > length / 2.0 {
            d -= length;
        }
        acc += d * d;
    }
    acc
}

/// `A exp(-|x - c|^2 / (2 sigma^2))`.
pub fn gaussian(grid: Grid, amplitude: f64, sigma: f64, center: &[f64]) -> PhysicalField {
    let length = grid.length();
    PhysicalField::from_fn(grid, |x| {
        let r2 = periodic_dist_sq(x, center, length);
        amplitude * (-r2 / (2.0 * sigma * sigma)).exp()
    })
}

/// Compactly supported bump `A exp(-1 / (1 - |x-c|^2 / r^2))` inside radius
/// `r`, zero outside. Its maximum is `A / e` at the center.
pub fn smooth_bump(grid: Grid, amplitude: f64, radius: f64, center: &[f64]) -> PhysicalField {
    let length = grid.length();
    PhysicalField::from_fn(grid, |x| {
        let q = periodic_dist_sq(x, center, length) / (radius * radius);
        if q < 1.0 {
            amplitude * (-1.0 / (1.0 - q)).exp()
        } else {
            0.0
        }
    })
}

/// Two signed Gaussians: `+A` at `center_pos`, `-A` at `center_neg`.
pub fn dipole(
    grid: Grid,
    amplitude: f64,
    sigma: f64,
    center_pos: &[f64],
    center_neg: &[f64],
) -> PhysicalField {
    let length = grid.length();
    PhysicalField::from_fn(grid, |x| {
        let rp = periodic_dist_sq(x, center_pos, length);
        let rn = periodic_dist_sq(x, center_neg, length);
        amplitude * ((-rp / (2.0 * sigma * sigma)).exp() - (-rn / (2.0 * sigma * sigma)).exp())
    })
}

/// Mean-zero random real field with modes `0 < |k|_inf <= k_cut`, scaled so
/// the maximum absolute value equals `amplitude`. Deterministic per seed.
pub fn random_bandlimited(
    grid: Grid,
    k_cut: usize,
    amplitude: f64,
    seed: u64,
    plan: &TransformPlan,
) -> PhysicalField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fhat = SpectralField::zeros(grid);
    let cut = k_cut as i64;
    for flat in 0..grid.len() {
        let k = grid.wavevector(flat);
        let within = (0..grid.dim()).all(|ax| k[ax].abs() <= cut);
        let zero = (0..grid.dim()).all(|ax| k[ax] == 0);
        if !within || zero {
            continue;
        }
        let conj_at = grid.conjugate_index(flat);
        if conj_at < flat {
            continue;
        }
        let re = rng.gen_range(-1.0..1.0);
        let im = if conj_at == flat { 0.0 } else { rng.gen_range(-1.0..1.0) };
        let c = Complex64::new(re, im);
        fhat.coeffs[flat] = c;
        fhat.coeffs[conj_at] = c.conj();
    }
    let mut f = plan.inverse_unchecked(&fhat);
    let peak = f.max_abs();
    if peak > 0.0 {
        let scale = amplitude / peak;
        for v in f.values.iter_mut() {
            *v *= scale;
        }
    }
    f
}

/// Random Hermitian spectrum band-limited to the 2/3 cutoff; handy for
/// operator identity sweeps. Deterministic per seed.
pub fn random_spectrum(grid: Grid, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fhat = SpectralField::zeros(grid);
    for flat in 0..grid.len() {
        let conj_at = grid.conjugate_index(flat);
        if conj_at < flat {
            continue;
        }
        let re = rng.gen_range(-1.0..1.0);
        let im = if conj_at == flat { 0.0 } else { rng.gen_range(-1.0..1.0) };
        let c = Complex64::new(re, im);
        fhat.coeffs[flat] = c;
        fhat.coeffs[conj_at] = c.conj();
    }
    operators::dealias(&mut fhat);
    fhat
}
