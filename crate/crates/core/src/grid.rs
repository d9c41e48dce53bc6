//! Uniformly sampled complex functions on N-dimensional boxes (1 <= N <= 4),
//! with Riemann quadrature, finite-difference gradients, and the phase-free
//! density combination used by the covariance functionals.

use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Maximum supported number of dimensions.
pub const MAX_DIM: usize = 4;

/// One uniform sampling axis: sample `j` sits at `start + j * step`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Axis {
    start: f64,
    step: f64,
    count: usize,
}

impl Axis {
    pub fn new(start: f64, step: f64, count: usize) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() || !start.is_finite() {
            return Err(Error::Argument(format!(
                "axis requires finite start and step > 0, got start={start}, step={step}"
            )));
        }
        if count < 2 {
            return Err(Error::Argument(format!(
                "axis requires count >= 2, got {count}"
            )));
        }
        Ok(Self { start, step, count })
    }

    /// Cell-centered axis covering `[-half_width, half_width]` with `count`
    /// samples. Such axes are symmetric about 0, which the reflection branch
    /// of the fractional transform requires.
    pub fn centered_box(half_width: f64, count: usize) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(Error::Argument(format!(
                "half_width must be > 0, got {half_width}"
            )));
        }
        let step = 2.0 * half_width / count as f64;
        Axis::new(-half_width + step / 2.0, step, count)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Coordinate of sample `j`.
    pub fn coord(&self, j: usize) -> f64 {
        self.start + self.step * j as f64
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.count).map(|j| self.coord(j)).collect()
    }

    /// True when the sample set maps onto itself under `x -> -x`.
    pub fn is_symmetric(&self) -> bool {
        let mid = self.start + self.step * (self.count - 1) as f64 / 2.0;
        mid.abs() <= 1e-9 * self.step
    }
}

/// A complex-valued function sampled on the tensor grid of its axes,
/// stored row-major (the last axis varies fastest).
#[derive(Debug, Clone)]
pub struct GridFunction {
    axes: Vec<Axis>,
    values: ArrayD<Complex64>,
}

impl GridFunction {
    pub fn new(axes: Vec<Axis>, values: ArrayD<Complex64>) -> Result<Self> {
        if axes.is_empty() || axes.len() > MAX_DIM {
            return Err(Error::Argument(format!(
                "grids support 1..={MAX_DIM} dimensions, got {}",
                axes.len()
            )));
        }
        let shape: Vec<usize> = axes.iter().map(Axis::count).collect();
        if values.shape() != shape.as_slice() {
            return Err(Error::Data(format!(
                "value shape {:?} does not match axis counts {:?}",
                values.shape(),
                shape
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Data("grid contains non-finite samples".into()));
        }
        Ok(Self { axes, values })
    }

    /// Sample `f` at every grid point.
    pub fn from_fn(axes: Vec<Axis>, mut f: impl FnMut(&[f64]) -> Complex64) -> Result<Self> {
        if axes.is_empty() || axes.len() > MAX_DIM {
            return Err(Error::Argument(format!(
                "grids support 1..={MAX_DIM} dimensions, got {}",
                axes.len()
            )));
        }
        let shape: Vec<usize> = axes.iter().map(Axis::count).collect();
        let mut coords = vec![0.0; axes.len()];
        let mut values = ArrayD::zeros(IxDyn(&shape));
        for (idx, v) in values.indexed_iter_mut() {
            for (k, axis) in axes.iter().enumerate() {
                coords[k] = axis.coord(idx[k]);
            }
            *v = f(&coords);
        }
        Self::new(axes, values)
    }

    pub fn ndim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn values(&self) -> &ArrayD<Complex64> {
        &self.values
    }

    /// Quadrature weight of one cell, `prod_k step_k`.
    pub fn volume_element(&self) -> f64 {
        self.axes.iter().map(Axis::step).product()
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> GridFunction {
        GridFunction {
            axes: self.axes.clone(),
            values: self.values.mapv(&f),
        }
    }

    pub fn conj(&self) -> GridFunction {
        self.map(|v| v.conj())
    }

    /// |f|^2 at every sample.
    pub fn abs_sq(&self) -> ArrayD<f64> {
        self.values.mapv(|v| v.norm_sqr())
    }
}

/// Riemann sum `sum(values) * prod(step_k)`, the discrete box integral.
/// Linear in the integrand; summation order is fixed (ndarray pairwise sum).
pub fn integrate(g: &GridFunction) -> Result<Complex64> {
    let s = g.values.sum() * Complex64::new(g.volume_element(), 0.0);
    if !s.re.is_finite() || !s.im.is_finite() {
        return Err(Error::Data("integrand contains non-finite values".into()));
    }
    Ok(s)
}

/// Integral of a real-valued sample array over the grid of `g`.
pub(crate) fn integrate_samples(g: &GridFunction, samples: &ArrayD<f64>) -> f64 {
    samples.sum() * g.volume_element()
}

/// Discrete squared L2 norm, `integral |f|^2`.
pub fn l2_norm_sq(f: &GridFunction) -> Result<f64> {
    let s = f.abs_sq().sum() * f.volume_element();
    if !s.is_finite() {
        return Err(Error::Data("norm is non-finite".into()));
    }
    Ok(s)
}

/// L2 distance between two functions on the same grid.
pub fn l2_distance(a: &GridFunction, b: &GridFunction) -> Result<f64> {
    if a.axes != b.axes {
        return Err(Error::Argument("grids do not match".into()));
    }
    let mut acc = 0.0;
    for (x, y) in a.values.iter().zip(b.values.iter()) {
        acc += (x - y).norm_sqr();
    }
    Ok((acc * a.volume_element()).sqrt())
}

/// Partial derivative along dimension `k` by central differences
/// (sixth-order deep in the interior, falling back to fourth/second order
/// near the edges, second-order one-sided at the boundary samples).
pub fn gradient(f: &GridFunction, k: usize) -> Result<GridFunction> {
    if k >= f.ndim() {
        return Err(Error::Argument(format!(
            "dimension index {k} out of range for {}-d grid",
            f.ndim()
        )));
    }
    let n = f.axes[k].count();
    if n < 3 {
        return Err(Error::Argument(format!(
            "gradient needs at least 3 samples along dimension {k}, got {n}"
        )));
    }
    let h = f.axes[k].step();
    let mut out = ArrayD::zeros(f.values.raw_dim());
    let src = f.values.view();
    let lanes_in = src.lanes(ndarray::Axis(k));
    let lanes_out = out.lanes_mut(ndarray::Axis(k));
    for (lane_in, mut lane_out) in lanes_in.into_iter().zip(lanes_out) {
        diff_lane(lane_in.as_slice().map_or_else(
            || lane_in.iter().copied().collect::<Vec<_>>(),
            |s| s.to_vec(),
        ), h, &mut lane_out);
    }
    GridFunction::new(f.axes.clone(), out)
}

fn diff_lane(a: Vec<Complex64>, h: f64, out: &mut ndarray::ArrayViewMut1<Complex64>) {
    let n = a.len();
    let two_h = 2.0 * h;
    out[0] = (-3.0 * a[0] + 4.0 * a[1] - a[2]) / two_h;
    out[n - 1] = (3.0 * a[n - 1] - 4.0 * a[n - 2] + a[n - 3]) / two_h;
    if n >= 4 {
        out[1] = (a[2] - a[0]) / two_h;
        out[n - 2] = (a[n - 1] - a[n - 3]) / two_h;
    } else if n == 3 {
        out[1] = (a[2] - a[0]) / two_h;
        return;
    }
    let twelve_h = 12.0 * h;
    if n >= 7 {
        out[2] = (-a[4] + 8.0 * a[3] - 8.0 * a[1] + a[0]) / twelve_h;
        out[n - 3] = (-a[n - 1] + 8.0 * a[n - 2] - 8.0 * a[n - 4] + a[n - 5]) / twelve_h;
        let sixty_h = 60.0 * h;
        for i in 3..n - 3 {
            out[i] = (a[i + 3] - 9.0 * a[i + 2] + 45.0 * a[i + 1] - 45.0 * a[i - 1]
                + 9.0 * a[i - 2]
                - a[i - 3])
                / sixty_h;
        }
    } else {
        for i in 2..n - 2 {
            out[i] = (-a[i + 2] + 8.0 * a[i + 1] - 8.0 * a[i - 1] + a[i - 2]) / twelve_h;
        }
    }
}

/// `Im(conj(f) * df/dx_k) / (2 pi)` at every sample.
///
/// For `f = lambda * exp(2 pi i phi)` this equals `lambda^2 * dphi/dx_k`
/// wherever the derivatives exist, without ever unwrapping the phase. At
/// samples where `f = 0` it returns 0, consistent with the `lambda^2` weight.
pub fn phase_density(f: &GridFunction, k: usize) -> Result<GridFunction> {
    let raw = phase_density_samples(f, k)?;
    let values = raw.mapv(|x| Complex64::new(x, 0.0));
    GridFunction::new(f.axes().to_vec(), values)
}

pub(crate) fn phase_density_samples(f: &GridFunction, k: usize) -> Result<ArrayD<f64>> {
    let df = gradient(f, k)?;
    let mut out = ArrayD::zeros(f.values.raw_dim());
    let inv_two_pi = 1.0 / (2.0 * std::f64::consts::PI);
    for ((o, v), d) in out.iter_mut().zip(f.values.iter()).zip(df.values.iter()) {
        *o = (v.conj() * d).im * inv_two_pi;
    }
    Ok(out)
}

/// Fraction of `||f||_2^2` carried by samples in the outermost 5% shell of
/// the box (within 5% of the span of any axis). A small value certifies that
/// the box truncation does not pollute moment integrals.
pub fn tail_mass(f: &GridFunction) -> Result<f64> {
    let total = l2_norm_sq(f)?;
    if total == 0.0 {
        return Err(Error::Domain("tail mass of the zero function".into()));
    }
    let margins: Vec<usize> = f
        .axes
        .iter()
        .map(|ax| ((0.05 * ax.count() as f64).ceil() as usize).max(1))
        .collect();
    let mut shell = 0.0;
    for (idx, v) in f.values.indexed_iter() {
        let in_shell = (0..f.ndim()).any(|k| {
            let m = margins[k];
            idx[k] < m || idx[k] >= f.axes[k].count() - m
        });
        if in_shell {
            shell += v.norm_sqr();
        }
    }
    Ok(shell * f.volume_element() / total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn axis_01() -> Axis {
        Axis::new(0.005, 0.01, 100).unwrap()
    }

    #[test]
    fn integrate_constant_is_exact() {
        let g = GridFunction::from_fn(vec![axis_01()], |_| Complex64::new(1.0, 0.0)).unwrap();
        let v = integrate(&g).unwrap();
        assert!((v.re - 1.0).abs() < 1e-12, "got {}", v.re);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn integrate_unit_gaussian_1d() {
        let ax = Axis::centered_box(8.0, 2048).unwrap();
        let g = GridFunction::from_fn(vec![ax], |x| {
            Complex64::new((-PI * x[0] * x[0]).exp(), 0.0)
        })
        .unwrap();
        let v = integrate(&g).unwrap();
        assert!((v.re - 1.0).abs() < 1e-9, "got {}", v.re);
    }

    #[test]
    fn integrate_unit_gaussian_2d() {
        let ax = Axis::centered_box(8.0, 512).unwrap();
        let g = GridFunction::from_fn(vec![ax, ax], |x| {
            Complex64::new((-PI * (x[0] * x[0] + x[1] * x[1])).exp(), 0.0)
        })
        .unwrap();
        let v = integrate(&g).unwrap();
        assert!((v.re - 1.0).abs() < 1e-8, "got {}", v.re);
    }

    #[test]
    fn integrate_is_linear() {
        let ax = Axis::centered_box(4.0, 64).unwrap();
        let f = GridFunction::from_fn(vec![ax], |x| Complex64::new(x[0].sin(), x[0] * 0.25)).unwrap();
        let g = GridFunction::from_fn(vec![ax], |x| Complex64::new((x[0] * 0.3).cos(), -1.0)).unwrap();
        let (a, b) = (Complex64::new(1.25, -0.5), Complex64::new(-0.75, 2.0));
        let mixed_values = f.values().mapv(|v| a * v) + g.values().mapv(|v| b * v);
        let mixed = GridFunction::new(f.axes().to_vec(), mixed_values).unwrap();
        let lhs = integrate(&mixed).unwrap();
        let rhs = a * integrate(&f).unwrap() + b * integrate(&g).unwrap();
        assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn l2_norm_zero_and_scaling() {
        let ax = Axis::centered_box(4.0, 32).unwrap();
        let zero = GridFunction::from_fn(vec![ax], |_| Complex64::ZERO).unwrap();
        assert_eq!(l2_norm_sq(&zero).unwrap(), 0.0);
        let f = GridFunction::from_fn(vec![ax], |x| Complex64::new(x[0], -0.5 * x[0])).unwrap();
        let c = Complex64::new(-2.0, 1.5);
        let scaled = f.map(|v| c * v);
        let ratio = l2_norm_sq(&scaled).unwrap() / l2_norm_sq(&f).unwrap();
        assert!((ratio - c.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn gradient_linear_and_quadratic() {
        let ax = Axis::centered_box(2.0, 64).unwrap();
        let lin = GridFunction::from_fn(vec![ax], |x| Complex64::new(x[0], 0.0)).unwrap();
        let dlin = gradient(&lin, 0).unwrap();
        for v in dlin.values().iter() {
            assert!((v.re - 1.0).abs() < 1e-12 && v.im.abs() < 1e-15);
        }
        // every stencil in use is exact on quadratics
        let quad = GridFunction::from_fn(vec![ax], |x| Complex64::new(x[0] * x[0], 0.0)).unwrap();
        let dquad = gradient(&quad, 0).unwrap();
        for (j, v) in dquad.values().iter().enumerate() {
            let want = 2.0 * ax.coord(j);
            assert!((v.re - want).abs() < 1e-10, "j={j} got {} want {want}", v.re);
        }
    }

    #[test]
    fn gradient_of_complex_exponential() {
        let ax = Axis::centered_box(4.0, 256).unwrap();
        let c = 0.8;
        let f = GridFunction::from_fn(vec![ax], |x| {
            Complex64::from_polar(1.0, 2.0 * PI * c * x[0])
        })
        .unwrap();
        let df = gradient(&f, 0).unwrap();
        let step2 = ax.step() * ax.step();
        for j in 2..ax.count() - 2 {
            let est = df.values()[j] / (Complex64::new(0.0, 2.0 * PI) * f.values()[j]);
            assert!((est.re - c).abs() < step2, "interior estimate off: {}", est.re);
        }
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        let ax = Axis::centered_box(1.0, 17).unwrap();
        let f = GridFunction::from_fn(vec![ax, ax], |_| Complex64::new(3.25, -1.5)).unwrap();
        for k in 0..2 {
            let d = gradient(&f, k).unwrap();
            for v in d.values().iter() {
                assert!(v.norm() < 1e-13);
            }
        }
    }

    #[test]
    fn gradient_rejects_bad_dimension() {
        let ax = Axis::centered_box(1.0, 8).unwrap();
        let f = GridFunction::from_fn(vec![ax], |_| Complex64::ZERO).unwrap();
        assert!(matches!(gradient(&f, 1), Err(Error::Argument(_))));
    }

    #[test]
    fn phase_density_real_function_vanishes() {
        let ax = Axis::centered_box(6.0, 128).unwrap();
        let f = GridFunction::from_fn(vec![ax], |x| {
            Complex64::new((-x[0] * x[0]).exp(), 0.0)
        })
        .unwrap();
        let pd = phase_density(&f, 0).unwrap();
        for v in pd.values().iter() {
            assert!(v.re.abs() < 1e-14);
        }
    }

    #[test]
    fn phase_density_of_modulated_gaussian() {
        let ax = Axis::centered_box(8.0, 512).unwrap();
        let b = 0.7;
        let f = GridFunction::from_fn(vec![ax], |x| {
            Complex64::from_polar((-PI * x[0] * x[0]).exp(), 2.0 * PI * b * x[0])
        })
        .unwrap();
        let pd = phase_density(&f, 0).unwrap();
        let step2 = ax.step() * ax.step();
        for j in 0..ax.count() {
            let x = ax.coord(j);
            let want = b * (-2.0 * PI * x * x).exp();
            assert!((pd.values()[j].re - want).abs() < step2, "x={x}");
        }
    }

    #[test]
    fn phase_density_conjugation_flips_sign() {
        let ax = Axis::centered_box(5.0, 96).unwrap();
        let f = GridFunction::from_fn(vec![ax], |x| {
            Complex64::from_polar((-0.3 * x[0] * x[0]).exp(), 0.4 * x[0] * x[0] + x[0])
        })
        .unwrap();
        let pd = phase_density(&f, 0).unwrap();
        let pd_conj = phase_density(&f.conj(), 0).unwrap();
        for (a, b) in pd.values().iter().zip(pd_conj.values().iter()) {
            assert!((a.re + b.re).abs() < 1e-14);
        }
    }

    #[test]
    fn construction_rejects_invalid_input() {
        assert!(Axis::new(0.0, 0.0, 10).is_err());
        assert!(Axis::new(0.0, 1.0, 1).is_err());
        let ax = Axis::centered_box(1.0, 4).unwrap();
        let bad_shape = ArrayD::zeros(IxDyn(&[5]));
        assert!(matches!(
            GridFunction::new(vec![ax], bad_shape),
            Err(Error::Data(_))
        ));
        let mut nan_values: ArrayD<Complex64> = ArrayD::zeros(IxDyn(&[4]));
        nan_values[0] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(
            GridFunction::new(vec![ax], nan_values),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn tail_mass_detects_truncation() {
        let ax = Axis::centered_box(8.0, 128).unwrap();
        let tight = GridFunction::from_fn(vec![ax], |x| {
            Complex64::new((-x[0] * x[0]).exp(), 0.0)
        })
        .unwrap();
        assert!(tail_mass(&tight).unwrap() < 1e-12);
        let flat = GridFunction::from_fn(vec![ax], |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!(tail_mass(&flat).unwrap() > 0.05);
    }

    #[test]
    fn centered_box_is_symmetric() {
        for n in [100, 101, 256] {
            assert!(Axis::centered_box(8.0, n).unwrap().is_symmetric());
        }
        assert!(!Axis::new(0.0, 0.1, 64).unwrap().is_symmetric());
    }
}
