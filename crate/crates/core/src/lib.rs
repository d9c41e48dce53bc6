//! Numerical toolkit for fractional Fourier analysis of sampled functions:
//! N-dimensional grids with quadrature and derivatives, the Fourier and
//! fractional Fourier transforms by direct kernel quadrature, moment/spread/
//! covariance functionals, the full family of uncertainty lower bounds with
//! slack reporting, the closed-form Gaussian-chirp families that attain
//! them, and spread estimators for quadratic-phase optical systems.

pub mod bounds;
pub mod chirp;
pub mod error;
pub mod grid;
pub mod gridio;
pub mod moments;
pub mod optics;
pub mod transform;

pub use error::{Error, Result};
pub use grid::{Axis, GridFunction};
pub use moments::MomentReport;
pub use transform::Angle;
