//! Fourier multiplier operators: fractional Laplacian, gradient, the two
//! nonlocal velocity laws, Riesz tensors, and the 2/3 dealiasing mask.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::field::{SpectralField, VectorField};

#[derive(Debug, Error, PartialEq)]
pub enum OperatorError {
    #[error("perpendicular velocity requires dimension 2, got {0}")]
    NotTwoDimensional(usize),
    #[error("fractional order {0} outside (0, 1)")]
    AlphaRange(f64),
}

/// `|2 pi k / L|` of the flat index.
#[inline]
fn mode_magnitude(field: &SpectralField, flat: usize) -> f64 {
    2.0 * PI * field.grid.wavevector_norm_sq(flat).sqrt() / field.grid.length()
}

/// Fractional Laplacian: multiply `coeff(k)` by `(2 pi |k| / L)^s`.
///
/// The zero mode is sent to zero for every `s != 0`; this pins the
/// otherwise singular `s < 0` case and is immaterial for gradients of the
/// result. `s = 0` is the identity.
pub fn fractional_laplacian(fhat: &SpectralField, s: f64) -> SpectralField {
    if s == 0.0 {
        return fhat.clone();
    }
    let mut out = SpectralField::zeros(fhat.grid);
    for (flat, c) in fhat.coeffs.iter().enumerate() {
        let m = mode_magnitude(fhat, flat);
        out.coeffs[flat] = if m == 0.0 { Complex64::new(0.0, 0.0) } else { c * m.powf(s) };
    }
    out
}

/// Derivative along one axis: multiplier `2 pi i k_j / L`.
///
/// The self-conjugate Nyquist row (`k_j = -N/2`) is zeroed so that real
/// fields stay real under differentiation.
pub fn derivative(fhat: &SpectralField, axis: usize) -> SpectralField {
    let grid = fhat.grid;
    assert!(axis < grid.dim());
    let nyquist = -((grid.points() / 2) as i64);
    let mut out = SpectralField::zeros(grid);
    for (flat, c) in fhat.coeffs.iter().enumerate() {
        let k = grid.wavevector(flat)[axis];
        if k == nyquist {
            continue;
        }
        let factor = Complex64::new(0.0, 2.0 * PI * k as f64 / grid.length());
        out.coeffs[flat] = c * factor;
    }
    out
}

/// Spectral gradient, one derivative per axis.
pub fn gradient(fhat: &SpectralField) -> VectorField<SpectralField> {
    VectorField::new((0..fhat.grid.dim()).map(|axis| derivative(fhat, axis)).collect())
}

/// Spectral divergence of a vector field.
pub fn divergence(v: &VectorField<SpectralField>) -> SpectralField {
    let grid = v.components[0].grid;
    let mut out = SpectralField::zeros(grid);
    for (axis, comp) in v.components.iter().enumerate() {
        let d = derivative(comp, axis);
        for (o, c) in out.coeffs.iter_mut().zip(d.coeffs.iter()) {
            *o += c;
        }
    }
    out
}

fn check_alpha(alpha: f64) -> Result<(), OperatorError> {
    if alpha <= 0.0 || alpha >= 1.0 {
        Err(OperatorError::AlphaRange(alpha))
    } else {
        Ok(())
    }
}

/// Gradient-type nonlocal velocity `u = grad Lambda^{-2+2 alpha} theta`.
///
/// Component `j` carries the multiplier
/// `2 pi i (k_j / L) (2 pi |k| / L)^{-2+2 alpha}` with the zero mode set to
/// zero. The identity `div u = -Lambda^{2 alpha} theta` holds exactly in
/// coefficients.
pub fn velocity_gradient_type(
    theta_hat: &SpectralField,
    alpha: f64,
) -> Result<VectorField<SpectralField>, OperatorError> {
    check_alpha(alpha)?;
    let potential = fractional_laplacian(theta_hat, -2.0 + 2.0 * alpha);
    Ok(gradient(&potential))
}

/// Divergence-free comparison velocity `u = grad^perp Lambda^{-2+2 alpha} theta`
/// with `grad^perp = (d_2, -d_1)`; two-dimensional grids only.
pub fn velocity_perp_type(
    theta_hat: &SpectralField,
    alpha: f64,
) -> Result<VectorField<SpectralField>, OperatorError> {
    check_alpha(alpha)?;
    if theta_hat.grid.dim() != 2 {
        return Err(OperatorError::NotTwoDimensional(theta_hat.grid.dim()));
    }
    let potential = fractional_laplacian(theta_hat, -2.0 + 2.0 * alpha);
    let d1 = derivative(&potential, 0);
    let d2 = derivative(&potential, 1);
    let mut m1 = d1;
    for c in m1.coeffs.iter_mut() {
        *c = -*c;
    }
    Ok(VectorField::new(vec![d2, m1]))
}

/// The `n x n` tensor `(R tensor R) Lambda^{2 alpha} theta` of Riesz
/// transforms applied to the fractional Laplacian: entry `(j, l)` carries
/// the multiplier `(-k_j k_l / |k|^2) (2 pi |k| / L)^{2 alpha}`, zero mode
/// zero. Row-major `n^2` entries; symmetric by construction.
pub fn riesz_tensor_lambda2alpha(
    theta_hat: &SpectralField,
    alpha: f64,
) -> Result<Vec<SpectralField>, OperatorError> {
    check_alpha(alpha)?;
    let grid = theta_hat.grid;
    let n = grid.dim();
    let mut entries = vec![SpectralField::zeros(grid); n * n];
    for (flat, c) in theta_hat.coeffs.iter().enumerate() {
        let k = grid.wavevector(flat);
        let ksq = grid.wavevector_norm_sq(flat);
        if ksq == 0.0 {
            continue;
        }
        let lam = mode_magnitude(theta_hat, flat).powf(2.0 * alpha);
        for j in 0..n {
            for l in j..n {
                let mult = -(k[j] * k[l]) as f64 / ksq * lam;
                let value = c * mult;
                entries[j * n + l].coeffs[flat] = value;
                if l != j {
                    entries[l * n + j].coeffs[flat] = value;
                }
            }
        }
    }
    Ok(entries)
}

/// True when the mode survives the 2/3 rule (`|k_j| <= N/3` on every axis).
#[inline]
pub fn mode_retained(field: &SpectralField, flat: usize) -> bool {
    let grid = field.grid;
    let cutoff = grid.dealias_cutoff();
    let k = grid.wavevector(flat);
    (0..grid.dim()).all(|axis| (k[axis].unsigned_abs() as f64) <= cutoff)
}

/// Zero all modes with any `|k_j| > N/3`.
pub fn dealias(fhat: &mut SpectralField) {
    for flat in 0..fhat.coeffs.len() {
        if !mode_retained(fhat, flat) {
            fhat.coeffs[flat] = Complex64::new(0.0, 0.0);
        }
    }
}

/// Share of spectral energy sitting above the 2/3 cutoff. Zero for an
/// empty spectrum.
pub fn tail_fraction(fhat: &SpectralField) -> f64 {
    let mut tail = 0.0;
    let mut total = 0.0;
    for (flat, c) in fhat.coeffs.iter().enumerate() {
        let e = c.norm_sqr();
        total += e;
        if !mode_retained(fhat, flat) {
            tail += e;
        }
    }
    if total > 0.0 {
        tail / total
    } else {
        0.0
    }
}
