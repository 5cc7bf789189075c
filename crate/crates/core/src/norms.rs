//! Lattice quadrature norms and the Plancherel-consistent homogeneous
//! Sobolev seminorm.
//!
//! Sums run sequentially in row-major index order so results are
//! bit-reproducible.

use std::f64::consts::PI;

use crate::fft::TransformPlan;
use crate::field::{PhysicalField, SpectralField};

/// The monitored norms of one scalar field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub l1: f64,
    pub l1_positive_part: f64,
    pub l2: f64,
    pub linf: f64,
    pub hdot_alpha_sq: f64,
}

/// `integral of f dx` by lattice quadrature.
pub fn integral(f: &PhysicalField) -> f64 {
    f.values.iter().sum::<f64>() * f.grid.cell_volume()
}

/// `(L/N)^n sum max(f, 0)`.
pub fn positive_mass(f: &PhysicalField) -> f64 {
    f.values.iter().map(|v| v.max(0.0)).sum::<f64>() * f.grid.cell_volume()
}

pub fn l1_norm(f: &PhysicalField) -> f64 {
    f.values.iter().map(|v| v.abs()).sum::<f64>() * f.grid.cell_volume()
}

pub fn l2_norm(f: &PhysicalField) -> f64 {
    (f.values.iter().map(|v| v * v).sum::<f64>() * f.grid.cell_volume()).sqrt()
}

/// Squared L2 norm from the spectrum: `sum |c_k|^2 / L^n` (Parseval).
pub fn l2_sq_spectral(fhat: &SpectralField) -> f64 {
    fhat.energy() / fhat.grid.volume()
}

/// Squared homogeneous Sobolev seminorm
/// `sum_k (2 pi |k| / L)^{2 alpha} |c_k|^2 / L^n`.
pub fn hdot_alpha_sq_spectral(fhat: &SpectralField, alpha: f64) -> f64 {
    let grid = fhat.grid;
    let base = 2.0 * PI / grid.length();
    let mut acc = 0.0;
    for (flat, c) in fhat.coeffs.iter().enumerate() {
        let ksq = grid.wavevector_norm_sq(flat);
        if ksq == 0.0 {
            continue;
        }
        acc += (base * ksq.sqrt()).powf(2.0 * alpha) * c.norm_sqr();
    }
    acc / grid.volume()
}

/// All monitored norms of `f`; the Sobolev seminorm is computed through
/// the transform plan.
pub fn norms(f: &PhysicalField, alpha: f64, plan: &TransformPlan) -> Norms {
    let fhat = plan.forward(f);
    Norms {
        l1: l1_norm(f),
        l1_positive_part: positive_mass(f),
        l2: l2_norm(f),
        linf: f.max_abs(),
        hdot_alpha_sq: hdot_alpha_sq_spectral(&fhat, alpha),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn zero_field_has_zero_norms() {
        let grid = Grid::new(2, 8, 1.0).unwrap();
        let plan = TransformPlan::new(grid);
        let n = norms(&PhysicalField::zeros(grid), 0.5, &plan);
        assert_eq!(
            (n.l1, n.l1_positive_part, n.l2, n.linf, n.hdot_alpha_sq),
            (0.0, 0.0, 0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn single_mode_seminorm_is_multiplier_squared_times_mass() {
        // cos(2 pi k x / L): L2 mass squared is L/2, seminorm picks up
        // (2 pi k / L)^{2 alpha}
        let grid = Grid::new(1, 32, 4.0).unwrap();
        let plan = TransformPlan::new(grid);
        let k = 3.0;
        let f = PhysicalField::from_fn(grid, |x| (2.0 * PI * k * x[0] / 4.0).cos());
        let fhat = plan.forward(&f);
        let alpha = 0.5;
        let expected = (2.0 * PI * k / 4.0).powf(2.0 * alpha) * (4.0 / 2.0);
        let got = hdot_alpha_sq_spectral(&fhat, alpha);
        assert!((got - expected).abs() < 1e-10 * expected);
    }
}
