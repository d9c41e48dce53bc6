//! Closed-form Gaussian-chirp families.
//!
//! [`GaussianChirp2D`] is the two-dimensional family
//!
//! ```text
//! f(x1, x2) = exp(-(x1-x0_1)^2/(2 zeta_1) - (x2-x0_2)^2/(2 zeta_2) + d)
//!           * exp(2 pi i ((x1-x0_1)^2/(2 eps_1) - (x2-x0_2)^2/(2 eps_2)
//!                         + w0 . x + d1))
//! ```
//!
//! (positive chirp in dimension 1, negative in dimension 2 — the sign of the
//! covariance formula depends on it). Its moments, spreads, covariances, and
//! uncertainty products all have closed forms, which this module evaluates
//! exactly; sampling onto a grid gives the matching quadrature input.
//!
//! [`ExtremalChirpNd`] is the N-dimensional equality family
//!
//! ```text
//! f(x) = exp(-||x - a||^2/(2 zeta) + d)
//!      * exp(2 pi i ((1/(2 eps)) sum_m eta(x_m) (x_m - a_m)^2 + b . x + d_pattern))
//! ```
//!
//! where each dimension's `eta` is one of `+1`, `-1`, `sgn(x_m - a_m)`,
//! `-sgn(x_m - a_m)` and `d_pattern` is a constant phase per realized sign
//! pattern. With all functionals referenced at `(a, b)` the family attains
//! the sharpened product bound exactly, for every partition; the bound value
//! does not depend on the partition. (For sgn-type dimensions the family's
//! own frequency moment sits at `b_k + sqrt(zeta/pi)/eps`, not `b_k`, so the
//! self-moment form of the bound is not attained — reference at `(a, b)` is
//! the meaningful check.)

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Axis, GridFunction};
use crate::moments::MomentReport;

fn require_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Argument(format!("{name} must be > 0, got {v}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianChirp2D {
    zeta: [f64; 2],
    eps: [f64; 2],
    x0: [f64; 2],
    w0: [f64; 2],
    d: f64,
    d1: f64,
}

impl GaussianChirp2D {
    pub fn new(zeta: [f64; 2], eps: [f64; 2], x0: [f64; 2], w0: [f64; 2], d: f64, d1: f64) -> Result<Self> {
        for k in 0..2 {
            require_positive("zeta", zeta[k])?;
            require_positive("eps", eps[k])?;
        }
        if !d.is_finite() || !d1.is_finite() {
            return Err(Error::Argument("d and d1 must be finite".into()));
        }
        Ok(Self { zeta, eps, x0, w0, d, d1 })
    }

    /// Solve `exp(2d) sqrt(pi zeta_1) sqrt(pi zeta_2) = 1` for `d`, so the
    /// family has unit squared norm.
    pub fn unit_norm(zeta: [f64; 2], eps: [f64; 2], x0: [f64; 2], w0: [f64; 2], d1: f64) -> Result<Self> {
        for k in 0..2 {
            require_positive("zeta", zeta[k])?;
        }
        let d = -0.25 * (PI * PI * zeta[0] * zeta[1]).ln();
        Self::new(zeta, eps, x0, w0, d, d1)
    }

    /// The worked parameter set with distinct widths and rates
    /// (`zeta = (1, 1/2)`, `eps = (2, 1)`): strict inequality in the product
    /// bounds.
    pub fn case_a() -> Self {
        Self::unit_norm([1.0, 0.5], [2.0, 1.0], [0.0; 2], [0.0; 2], 0.0).unwrap()
    }

    /// The equal-parameter set (`zeta = (1, 1)`, `eps = (2, 2)`): attains the
    /// sharpened bounds with equality.
    pub fn case_b() -> Self {
        Self::unit_norm([1.0, 1.0], [2.0, 2.0], [0.0; 2], [0.0; 2], 0.0).unwrap()
    }

    pub fn zeta(&self) -> [f64; 2] {
        self.zeta
    }

    pub fn eps(&self) -> [f64; 2] {
        self.eps
    }

    pub fn x0(&self) -> [f64; 2] {
        self.x0
    }

    pub fn w0(&self) -> [f64; 2] {
        self.w0
    }

    /// `||f||_2^2 = exp(2d) sqrt(pi zeta_1) sqrt(pi zeta_2)`.
    pub fn norm_sq(&self) -> f64 {
        (2.0 * self.d).exp() * (PI * self.zeta[0]).sqrt() * (PI * self.zeta[1]).sqrt()
    }

    /// `(zeta_1 + zeta_2)/2 * ||f||^2`.
    pub fn spread_x(&self) -> f64 {
        (self.zeta[0] + self.zeta[1]) / 2.0 * self.norm_sq()
    }

    /// `sum_k zeta_k/2 (1/(4 pi^2 zeta_k^2) + 1/eps_k^2) * ||f||^2`.
    pub fn spread_w(&self) -> f64 {
        let term = |k: usize| {
            self.zeta[k] / 2.0
                * (1.0 / (4.0 * PI * PI * self.zeta[k] * self.zeta[k])
                    + 1.0 / (self.eps[k] * self.eps[k]))
        };
        (term(0) + term(1)) * self.norm_sq()
    }

    /// `(zeta_1/(2 eps_1) - zeta_2/(2 eps_2)) * ||f||^2` — the minus sign
    /// comes from the opposite chirp signs of the two dimensions.
    pub fn cov(&self) -> f64 {
        (self.zeta[0] / (2.0 * self.eps[0]) - self.zeta[1] / (2.0 * self.eps[1])) * self.norm_sq()
    }

    /// `(zeta_1/(2 eps_1) + zeta_2/(2 eps_2)) * ||f||^2`.
    pub fn abs_cov(&self) -> f64 {
        (self.zeta[0] / (2.0 * self.eps[0]) + self.zeta[1] / (2.0 * self.eps[1])) * self.norm_sq()
    }

    /// Fractional-domain spread by the rotation relation:
    /// `cos^2 a spread_x + sin^2 a spread_w + 2 sin a cos a cov`.
    pub fn frft_spread(&self, alpha: f64) -> f64 {
        let (s, c) = alpha.sin_cos();
        c * c * self.spread_x() + s * s * self.spread_w() + 2.0 * s * c * self.cov()
    }

    /// Closed-form moment report (the fractional entries evaluated at `alpha`).
    pub fn report(&self, alpha: f64) -> MomentReport {
        let (s, c) = alpha.sin_cos();
        MomentReport {
            x0: self.x0.to_vec(),
            w0: self.w0.to_vec(),
            u0_alpha: (0..2).map(|k| c * self.x0[k] + s * self.w0[k]).collect(),
            alpha,
            spread_x: self.spread_x(),
            spread_w: self.spread_w(),
            spread_u_alpha: self.frft_spread(alpha),
            cov: self.cov(),
            abs_cov: self.abs_cov(),
            norm_sq: self.norm_sq(),
            warnings: Vec::new(),
        }
    }

    /// The three closed-form uncertainty products.
    pub fn products(&self, alpha: f64, beta: f64) -> ChirpProducts {
        ChirpProducts {
            xw: self.spread_x() * self.spread_w(),
            xu: self.spread_x() * self.frft_spread(alpha),
            uu: self.frft_spread(alpha) * self.frft_spread(beta),
        }
    }

    pub fn value(&self, x: &[f64]) -> Complex64 {
        let t1 = x[0] - self.x0[0];
        let t2 = x[1] - self.x0[1];
        let amp = (-t1 * t1 / (2.0 * self.zeta[0]) - t2 * t2 / (2.0 * self.zeta[1]) + self.d).exp();
        let phase = 2.0
            * PI
            * (t1 * t1 / (2.0 * self.eps[0]) - t2 * t2 / (2.0 * self.eps[1])
                + self.w0[0] * x[0]
                + self.w0[1] * x[1]
                + self.d1);
        Complex64::from_polar(amp, phase)
    }

    pub fn sample(&self, axes: &[Axis]) -> Result<GridFunction> {
        if axes.len() != 2 {
            return Err(Error::Argument(format!(
                "the 2-d family needs 2 axes, got {}",
                axes.len()
            )));
        }
        GridFunction::from_fn(axes.to_vec(), |x| self.value(x))
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChirpProducts {
    pub xw: f64,
    pub xu: f64,
    pub uu: f64,
}

/// Phase sign class of one dimension of the extremal family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EtaClass {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "sgn")]
    Sgn,
    #[serde(rename = "-sgn")]
    NegSgn,
}

impl EtaClass {
    /// `eta(x_m)` for a displacement `t = x_m - a_m`; the `x >= a` branch
    /// owns the boundary sample.
    fn eta(&self, t: f64) -> f64 {
        let sgn = if t >= 0.0 { 1.0 } else { -1.0 };
        match self {
            EtaClass::Plus => 1.0,
            EtaClass::Minus => -1.0,
            EtaClass::Sgn => sgn,
            EtaClass::NegSgn => -sgn,
        }
    }

    fn pattern_char(&self, t: f64) -> char {
        if self.eta(t) >= 0.0 {
            '+'
        } else {
            '-'
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalChirpNd {
    a: Vec<f64>,
    b: Vec<f64>,
    zeta: f64,
    eps: f64,
    d: f64,
    eta: Vec<EtaClass>,
    /// Constant phase per realized sign pattern, keyed by strings like
    /// `"+-"`. Empty means zero everywhere; a non-empty map must cover every
    /// realized pattern.
    phases: BTreeMap<String, f64>,
}

impl ExtremalChirpNd {
    pub fn new(
        a: Vec<f64>,
        b: Vec<f64>,
        zeta: f64,
        eps: f64,
        d: f64,
        eta: Vec<EtaClass>,
        phases: BTreeMap<String, f64>,
    ) -> Result<Self> {
        let n = a.len();
        if n == 0 || n > crate::grid::MAX_DIM {
            return Err(Error::Argument(format!(
                "extremal family supports 1..={} dimensions, got {n}",
                crate::grid::MAX_DIM
            )));
        }
        if b.len() != n || eta.len() != n {
            return Err(Error::Argument(
                "a, b, and eta must have the same length".into(),
            ));
        }
        require_positive("zeta", zeta)?;
        require_positive("eps", eps)?;
        if !d.is_finite() {
            return Err(Error::Argument("d must be finite".into()));
        }
        for key in phases.keys() {
            if key.len() != n || key.chars().any(|c| c != '+' && c != '-') {
                return Err(Error::Argument(format!(
                    "phase pattern {key:?} is not a +/- string of length {n}"
                )));
            }
        }
        Ok(Self { a, b, zeta, eps, d, eta, phases })
    }

    /// Unit-squared-norm member: `exp(2d) (pi zeta)^{N/2} = 1`.
    pub fn unit_norm(
        a: Vec<f64>,
        b: Vec<f64>,
        zeta: f64,
        eps: f64,
        eta: Vec<EtaClass>,
        phases: BTreeMap<String, f64>,
    ) -> Result<Self> {
        require_positive("zeta", zeta)?;
        let n = a.len() as f64;
        let d = -n / 4.0 * (PI * zeta).ln();
        Self::new(a, b, zeta, eps, d, eta, phases)
    }

    pub fn ndim(&self) -> usize {
        self.a.len()
    }

    pub fn reference_points(&self) -> (&[f64], &[f64]) {
        (&self.a, &self.b)
    }

    pub fn norm_sq(&self) -> f64 {
        (2.0 * self.d).exp() * (PI * self.zeta).powf(self.a.len() as f64 / 2.0)
    }

    fn phase_offset(&self, pattern: &str) -> Result<f64> {
        if self.phases.is_empty() {
            return Ok(0.0);
        }
        self.phases.get(pattern).copied().ok_or_else(|| {
            Error::Argument(format!(
                "no phase constant supplied for realized sign pattern {pattern:?}"
            ))
        })
    }

    pub fn value(&self, x: &[f64]) -> Result<Complex64> {
        let mut q_amp = 0.0;
        let mut q_phase = 0.0;
        let mut pattern = String::with_capacity(self.ndim());
        for k in 0..self.ndim() {
            let t = x[k] - self.a[k];
            q_amp += t * t;
            q_phase += self.eta[k].eta(t) * t * t;
            pattern.push(self.eta[k].pattern_char(t));
        }
        let b_dot_x: f64 = self.b.iter().zip(x.iter()).map(|(&bk, &xk)| bk * xk).sum();
        let offset = self.phase_offset(&pattern)?;
        let amp = (-q_amp / (2.0 * self.zeta) + self.d).exp();
        let phase = 2.0 * PI * (q_phase / (2.0 * self.eps) + b_dot_x + offset);
        Ok(Complex64::from_polar(amp, phase))
    }

    pub fn sample(&self, axes: &[Axis]) -> Result<GridFunction> {
        if axes.len() != self.ndim() {
            return Err(Error::Argument(format!(
                "family has {} dimensions, got {} axes",
                self.ndim(),
                axes.len()
            )));
        }
        // resolve the lookup for every realized pattern first so a missing
        // constant fails before any sampling work
        let mut realized: Vec<String> = Vec::new();
        for bits in 0..(1usize << self.ndim()) {
            let mut pat = String::with_capacity(self.ndim());
            for (k, cls) in self.eta.iter().enumerate() {
                let sign = if bits >> k & 1 == 0 { 1.0 } else { -1.0 };
                pat.push(cls.pattern_char(sign));
            }
            if !realized.contains(&pat) {
                realized.push(pat);
            }
        }
        for pat in &realized {
            self.phase_offset(pat)?;
        }
        let mut result = Ok(());
        let g = GridFunction::from_fn(axes.to_vec(), |x| match self.value(x) {
            Ok(v) => v,
            Err(e) => {
                if result.is_ok() {
                    result = Err(e);
                }
                Complex64::ZERO
            }
        })?;
        result?;
        Ok(g)
    }

    /// Closed-form report referenced at the family's own `(a, b)`:
    /// time spread about `a`, frequency spread about `b`, fractional spread
    /// about `cos(alpha) a + sin(alpha) b`, covariances about `(a, b)`.
    ///
    /// Per dimension the covariance contribution is `+zeta/(2 eps)` for a
    /// plus class, `-zeta/(2 eps)` for a minus class, and 0 for the sgn
    /// classes (odd integrand); the absolute covariance is `zeta/(2 eps)`
    /// regardless, which is why the sharpened bound value is
    /// partition-independent.
    pub fn report(&self, alpha: f64) -> MomentReport {
        let n = self.ndim() as f64;
        let norm_sq = self.norm_sq();
        let spread_x = n * self.zeta / 2.0 * norm_sq;
        let spread_w = n * self.zeta / 2.0
            * (1.0 / (4.0 * PI * PI * self.zeta * self.zeta) + 1.0 / (self.eps * self.eps))
            * norm_sq;
        let per_dim = self.zeta / (2.0 * self.eps) * norm_sq;
        let cov: f64 = self
            .eta
            .iter()
            .map(|cls| match cls {
                EtaClass::Plus => per_dim,
                EtaClass::Minus => -per_dim,
                EtaClass::Sgn | EtaClass::NegSgn => 0.0,
            })
            .sum();
        let abs_cov = n * per_dim;
        let (s, c) = alpha.sin_cos();
        let spread_u_alpha = c * c * spread_x + s * s * spread_w + 2.0 * s * c * cov;
        MomentReport {
            x0: self.a.clone(),
            w0: self.b.clone(),
            u0_alpha: self
                .a
                .iter()
                .zip(self.b.iter())
                .map(|(&ak, &bk)| c * ak + s * bk)
                .collect(),
            alpha,
            spread_x,
            spread_w,
            spread_u_alpha,
            cov,
            abs_cov,
            norm_sq,
            warnings: Vec::new(),
        }
    }

    pub fn products(&self, alpha: f64, beta: f64) -> ChirpProducts {
        let r = self.report(alpha);
        let (s, c) = beta.sin_cos();
        let su_beta = c * c * r.spread_x + s * s * r.spread_w + 2.0 * s * c * r.cov;
        ChirpProducts {
            xw: r.spread_x * r.spread_w,
            xu: r.spread_x * r.spread_u_alpha,
            uu: r.spread_u_alpha * su_beta,
        }
    }

    pub fn with_phases(&self, phases: BTreeMap<String, f64>) -> Result<Self> {
        Self::new(
            self.a.clone(),
            self.b.clone(),
            self.zeta,
            self.eps,
            self.d,
            self.eta.clone(),
            phases,
        )
    }
}

/// JSON parameter file for either family.
///
/// Two-dimensional: `{"zeta": [z1, z2], "eps": [e1, e2], "x0": [..], "w0": [..], "d": .., "d1": ..}`
/// (omitting `d` selects the unit-norm member; `x0`, `w0`, `d1` default to 0).
///
/// N-dimensional: `{"a": [..], "b": [..], "zeta": z, "eps": e, "d": ..,
/// "eta": ["+", "-", "sgn", "-sgn"], "phases": {"+-": 0.1, ..}}`.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ChirpSpecFile {
    TwoD {
        zeta: [f64; 2],
        eps: [f64; 2],
        #[serde(default)]
        x0: [f64; 2],
        #[serde(default)]
        w0: [f64; 2],
        d: Option<f64>,
        #[serde(default)]
        d1: f64,
    },
    Nd {
        a: Vec<f64>,
        b: Vec<f64>,
        zeta: f64,
        eps: f64,
        d: Option<f64>,
        eta: Vec<EtaClass>,
        #[serde(default)]
        phases: BTreeMap<String, f64>,
    },
}

/// A parsed chirp parameter file.
#[derive(Debug, Clone)]
pub enum ChirpSpec {
    TwoD(GaussianChirp2D),
    Nd(ExtremalChirpNd),
}

impl ChirpSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ChirpSpecFile =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        match file {
            ChirpSpecFile::TwoD { zeta, eps, x0, w0, d, d1 } => Ok(ChirpSpec::TwoD(match d {
                Some(d) => GaussianChirp2D::new(zeta, eps, x0, w0, d, d1)?,
                None => GaussianChirp2D::unit_norm(zeta, eps, x0, w0, d1)?,
            })),
            ChirpSpecFile::Nd { a, b, zeta, eps, d, eta, phases } => Ok(ChirpSpec::Nd(match d {
                Some(d) => ExtremalChirpNd::new(a, b, zeta, eps, d, eta, phases)?,
                None => ExtremalChirpNd::unit_norm(a, b, zeta, eps, eta, phases)?,
            })),
        }
    }

    pub fn ndim(&self) -> usize {
        match self {
            ChirpSpec::TwoD(_) => 2,
            ChirpSpec::Nd(p) => p.ndim(),
        }
    }

    pub fn sample(&self, axes: &[Axis]) -> Result<GridFunction> {
        match self {
            ChirpSpec::TwoD(p) => p.sample(axes),
            ChirpSpec::Nd(p) => p.sample(axes),
        }
    }

    /// Closed-form report: self-moment-referenced for the 2-d family,
    /// `(a, b)`-referenced for the extremal family.
    pub fn report(&self, alpha: f64) -> MomentReport {
        match self {
            ChirpSpec::TwoD(p) => p.report(alpha),
            ChirpSpec::Nd(p) => p.report(alpha),
        }
    }

    pub fn products(&self, alpha: f64, beta: f64) -> ChirpProducts {
        match self {
            ChirpSpec::TwoD(p) => p.products(alpha, beta),
            ChirpSpec::Nd(p) => p.products(alpha, beta),
        }
    }
}
