#![allow(dead_code)]

use frft_uncertainty::chirp::GaussianChirp2D;
use frft_uncertainty::{Axis, GridFunction};
use num_complex::Complex64;
use std::f64::consts::PI;

pub const ALPHA: f64 = 2.0 * PI / 3.0;
pub const BETA: f64 = PI / 6.0;

/// Reference grid: fine enough for moments, bounds, and transforms at
/// orders whose alias-free threshold 4 h^2 |csc a| stays under 256.
pub const REF_POINTS: usize = 256;
/// Grid for orders near a multiple of pi (pi/6, 5pi/6 need 512 on [-8, 8]).
pub const WIDE_POINTS: usize = 512;
pub const HALF_WIDTH: f64 = 8.0;

pub fn axes2(points: usize) -> Vec<Axis> {
    let ax = Axis::centered_box(HALF_WIDTH, points).unwrap();
    vec![ax, ax]
}

pub fn case_a(points: usize) -> GridFunction {
    GaussianChirp2D::case_a().sample(&axes2(points)).unwrap()
}

pub fn case_b(points: usize) -> GridFunction {
    GaussianChirp2D::case_b().sample(&axes2(points)).unwrap()
}

pub fn real_gaussian(points: usize) -> GridFunction {
    GridFunction::from_fn(axes2(points), |x| {
        Complex64::new((-PI * (x[0] * x[0] + x[1] * x[1])).exp(), 0.0)
    })
    .unwrap()
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(f64::MIN_POSITIVE)
}

/// Relative error against `want`, with `scale` as the denominator floor for
/// targets at or near zero.
pub fn scaled_err(got: f64, want: f64, scale: f64) -> f64 {
    (got - want).abs() / want.abs().max(scale)
}

#[macro_export]
macro_rules! assert_within {
    ($err:expr, $tol:expr, $($msg:tt)+) => {{
        let err = $err;
        let tol = $tol;
        assert!(err <= tol, "{}: error {err:.3e} exceeds {tol:.1e}", format!($($msg)+));
    }};
}
