//! Scalar and vector fields in physical and spectral representation.

use num_complex::Complex64;
use thiserror::Error;

use crate::grid::Grid;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("value count {found} does not match grid size {expected}")]
    Length { expected: usize, found: usize },
    #[error("field contains a non-finite value at index {0}")]
    NonFinite(usize),
    #[error("Hermitian symmetry violated: relative defect {defect:.3e} exceeds {tolerance:.1e}")]
    Symmetry { defect: f64, tolerance: f64 },
    #[error("fields live on different grids")]
    GridMismatch,
}

/// A real scalar sampled on the grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl PhysicalField {
    pub fn zeros(grid: Grid) -> Self {
        PhysicalField { grid, values: vec![0.0; grid.len()] }
    }

    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self, FieldError> {
        if values.len() != grid.len() {
            return Err(FieldError::Length { expected: grid.len(), found: values.len() });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(FieldError::NonFinite(i));
        }
        Ok(PhysicalField { grid, values })
    }

    /// Build a field by evaluating `f` at every sample point.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(&[f64]) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|flat| {
                let x = grid.coordinates(flat);
                f(&x[..grid.dim()])
            })
            .collect();
        PhysicalField { grid, values }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Complex Fourier coefficients indexed by wavevector, row-major in the
/// storage layout of [`Grid::wavenumber`].
///
/// Fields representing real functions satisfy `coeff(-k) = conj(coeff(k))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub grid: Grid,
    pub coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        SpectralField { grid, coeffs: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    /// Relative Hermitian-symmetry defect, `max |c(-k) - conj(c(k))| / max |c|`.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for flat in 0..self.coeffs.len() {
            let conj_at = self.grid.conjugate_index(flat);
            if conj_at < flat {
                continue;
            }
            let defect = (self.coeffs[conj_at] - self.coeffs[flat].conj()).norm();
            worst = worst.max(defect);
        }
        worst / scale
    }

    pub fn check_hermitian(&self, tolerance: f64) -> Result<(), FieldError> {
        let defect = self.hermitian_defect();
        if defect > tolerance {
            Err(FieldError::Symmetry { defect, tolerance })
        } else {
            Ok(())
        }
    }

    /// Energy `sum |c_k|^2` (unnormalized).
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// `n` field components sharing one grid.
#[derive(Debug, Clone)]
pub struct VectorField<F> {
    pub components: Vec<F>,
}

impl<F> VectorField<F> {
    pub fn new(components: Vec<F>) -> Self {
        VectorField { components }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }
}

impl VectorField<PhysicalField> {
    /// Pointwise Euclidean magnitude maximum.
    pub fn max_magnitude(&self) -> f64 {
        let len = self.components[0].values.len();
        let mut worst = 0.0f64;
        for i in 0..len {
            let mut sq = 0.0;
            for c in &self.components {
                sq += c.values[i] * c.values[i];
            }
            worst = worst.max(sq);
        }
        worst.sqrt()
    }
}
