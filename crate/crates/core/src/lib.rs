//! Pseudo-spectral simulation and verification kernels for the
//! multi-dimensional transport equation with nonlocal velocity
//! `theta_t + u . grad theta + kappa Lambda^gamma theta = 0`,
//! `u = grad Lambda^{-2+2 alpha} theta`, on a periodic box.
//!
//! The crate is organized around five concerns:
//!
//! * [`grid`], [`field`], [`fft`], [`operators`], [`norms`], [`quadrature`],
//!   [`initial`] — grids, transforms, fractional operators in both Fourier
//!   and singular-integral form, nonlocal velocities, and norms;
//! * [`solver`], [`tracer`] — time integration with dealiasing, stability
//!   control, blow-up monitors, and Lagrangian characteristics;
//! * [`diagnostics`], [`degiorgi`], [`scaling`] — checkable functionals:
//!   mass dissipation, extrema monotonicity, interpolation and decay
//!   bounds, scaling invariance, the De Giorgi truncation pipeline, and
//!   the regularity-criterion integral;
//! * [`recurrence`] — the abstract superlinear iteration
//!   `W_{k+1} <= C^k W_k^beta` and its convergence threshold.

pub mod degiorgi;
pub mod diagnostics;
pub mod fft;
pub mod field;
pub mod grid;
pub mod initial;
pub mod norms;
pub mod operators;
pub mod quadrature;
pub mod recurrence;
pub mod scaling;
pub mod solver;
pub mod tracer;

pub use fft::TransformPlan;
pub use field::{FieldError, PhysicalField, SpectralField, VectorField};
pub use grid::{Grid, GridError};
pub use norms::Norms;
