//! Uniform periodic grids and their integer wavevector lattices.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("dimension must be 1, 2 or 3, got {0}")]
    Dimension(usize),
    #[error("points per axis must be even and at least 4, got {0}")]
    Points(usize),
    #[error("box length must be positive and finite, got {0}")]
    Length(f64),
}

/// A periodic box `[0, L)^n` sampled with `N` points per axis.
///
/// Sample points are `x_j = (j/N) L` componentwise and the wavevector
/// lattice is `k in {-N/2, ..., N/2 - 1}^n` with physical frequency
/// `xi = k / L`. `N` must be even so the dealiasing cutoff and the
/// Hermitian layout line up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    points: usize,
    length: f64,
}

impl Grid {
    pub fn new(dim: usize, points: usize, length: f64) -> Result<Self, GridError> {
        if !(1..=3).contains(&dim) {
            return Err(GridError::Dimension(dim));
        }
        if points < 4 || points % 2 != 0 {
            return Err(GridError::Points(points));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(GridError::Length(length));
        }
        Ok(Grid { dim, points, length })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Samples per axis.
    pub fn points(&self) -> usize {
        self.points
    }

    /// Physical box side length.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Total number of samples `N^n`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid spacing `L / N`.
    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    /// Volume of one grid cell, `(L/N)^n`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Box volume `L^n`.
    pub fn volume(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    /// Signed wavevector component for storage index `m` on one axis.
    #[inline]
    pub fn wavenumber(&self, m: usize) -> i64 {
        if m < self.points / 2 {
            m as i64
        } else {
            m as i64 - self.points as i64
        }
    }

    /// Storage index holding wavevector component `k` (may be negative).
    #[inline]
    pub fn storage_index(&self, k: i64) -> usize {
        k.rem_euclid(self.points as i64) as usize
    }

    /// Decompose a flat row-major index into per-axis indices.
    #[inline]
    pub fn unravel(&self, mut flat: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        for axis in (0..self.dim).rev() {
            idx[axis] = flat % self.points;
            flat /= self.points;
        }
        idx
    }

    /// Flatten per-axis indices (row-major, last axis fastest).
    #[inline]
    pub fn ravel(&self, idx: &[usize]) -> usize {
        let mut flat = 0usize;
        for axis in 0..self.dim {
            flat = flat * self.points + idx[axis];
        }
        flat
    }

    /// Signed wavevector of the flat spectral index.
    #[inline]
    pub fn wavevector(&self, flat: usize) -> [i64; 3] {
        let idx = self.unravel(flat);
        let mut k = [0i64; 3];
        for axis in 0..self.dim {
            k[axis] = self.wavenumber(idx[axis]);
        }
        k
    }

    /// `|k|^2` of the flat spectral index.
    #[inline]
    pub fn wavevector_norm_sq(&self, flat: usize) -> f64 {
        let k = self.wavevector(flat);
        let mut s = 0.0;
        for axis in 0..self.dim {
            s += (k[axis] * k[axis]) as f64;
        }
        s
    }

    /// Physical coordinates of the flat sample index.
    #[inline]
    pub fn coordinates(&self, flat: usize) -> [f64; 3] {
        let idx = self.unravel(flat);
        let h = self.spacing();
        let mut x = [0.0; 3];
        for axis in 0..self.dim {
            x[axis] = idx[axis] as f64 * h;
        }
        x
    }

    /// Flat index of the conjugate wavevector `-k`.
    #[inline]
    pub fn conjugate_index(&self, flat: usize) -> usize {
        let idx = self.unravel(flat);
        let mut conj = [0usize; 3];
        for axis in 0..self.dim {
            conj[axis] = (self.points - idx[axis]) % self.points;
        }
        self.ravel(&conj[..self.dim])
    }

    /// Largest retained `|k_j|` under the 2/3 dealiasing rule: modes with
    /// any `|k_j| > N/3` are zeroed.
    pub fn dealias_cutoff(&self) -> f64 {
        self.points as f64 / 3.0
    }
}
