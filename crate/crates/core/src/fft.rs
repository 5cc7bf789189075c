//! Discrete Fourier transforms with the integral normalization.
//!
//! The forward transform approximates `f_hat(xi) = \int e^{-2 pi i x.xi} f dx`
//! so that `coeff(0) = (L/N)^n sum(values)` is the quadrature of `\int f dx`.
//! The inverse divides the unnormalized synthesis sum by `L^n`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::field::{FieldError, PhysicalField, SpectralField};
use crate::grid::Grid;

/// Tolerance for the Hermitian-symmetry check in [`TransformPlan::inverse`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// Cached FFT plans for one grid.
pub struct TransformPlan {
    grid: Grid,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl TransformPlan {
    pub fn new(grid: Grid) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(grid.points());
        let inv = planner.plan_fft_inverse(grid.points());
        TransformPlan { grid, fwd, inv }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Apply the 1-D plan along every axis of the row-major cube.
    fn transform_all_axes(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.grid.points();
        let dim = self.grid.dim();
        let total = data.len();
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for axis in 0..dim {
            // stride between consecutive entries along `axis`
            let stride = n.pow((dim - 1 - axis) as u32);
            let lines = total / n;
            for l in 0..lines {
                // base offset of line `l`: enumerate all index tuples with
                // the `axis` coordinate fixed to zero
                let block = stride * n;
                let base = (l / stride) * block + (l % stride);
                if stride == 1 {
                    fft.process(&mut data[base..base + n]);
                } else {
                    for (j, slot) in line.iter_mut().enumerate() {
                        *slot = data[base + j * stride];
                    }
                    fft.process(&mut line);
                    for (j, slot) in line.iter().enumerate() {
                        data[base + j * stride] = *slot;
                    }
                }
            }
        }
    }

    pub fn forward(&self, f: &PhysicalField) -> SpectralField {
        assert_eq!(f.grid, self.grid, "field grid does not match plan");
        let mut data: Vec<Complex64> =
            f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform_all_axes(&mut data, &self.fwd);
        let scale = self.grid.cell_volume();
        for c in data.iter_mut() {
            *c *= scale;
        }
        SpectralField { grid: self.grid, coeffs: data }
    }

    /// Inverse transform; rejects input whose Hermitian defect exceeds
    /// [`HERMITIAN_TOLERANCE`].
    pub fn inverse(&self, fhat: &SpectralField) -> Result<PhysicalField, FieldError> {
        fhat.check_hermitian(HERMITIAN_TOLERANCE)?;
        Ok(self.inverse_unchecked(fhat))
    }

    /// Inverse transform of data known to be Hermitian; the imaginary part
    /// of the synthesis is dropped.
    pub fn inverse_unchecked(&self, fhat: &SpectralField) -> PhysicalField {
        assert_eq!(fhat.grid, self.grid, "field grid does not match plan");
        let mut data = fhat.coeffs.clone();
        self.transform_all_axes(&mut data, &self.inv);
        let scale = 1.0 / self.grid.volume();
        let values = data.iter().map(|c| c.re * scale).collect();
        PhysicalField { grid: self.grid, values }
    }
}
