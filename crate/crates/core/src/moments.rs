//! Moment vectors, spreads, covariance and absolute covariance of a sampled
//! function in the time, frequency, and fractional-transform domains, plus
//! the two exact identities relating them (the amplitude/phase decomposition
//! of the frequency spread, and the spread rotation relation).
//!
//! Spreads are unnormalized second central moments (no division by the
//! squared norm); moment vectors are normalized. Covariances are evaluated
//! through [`crate::grid::phase_density`], never through an unwrapped phase.

use ndarray::ArrayD;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{
    integrate_samples, l2_norm_sq, phase_density_samples, tail_mass, GridFunction,
};
use crate::transform::{frft_nd, ft_nd, Angle};

/// Tail-mass fraction above which reports carry an accuracy warning.
pub const TAIL_MASS_WARN: f64 = 1e-10;

/// Relative floor under which `|f|^2` is treated as an exact zero when a
/// division by it is required.
const DENSITY_FLOOR_REL: f64 = 1e-30;

/// Every first/second-moment functional of one function, with the
/// fractional-domain entries tagged by the order `alpha` they were
/// evaluated at.
#[derive(Debug, Clone, Serialize)]
pub struct MomentReport {
    pub x0: Vec<f64>,
    pub w0: Vec<f64>,
    pub u0_alpha: Vec<f64>,
    pub alpha: f64,
    pub spread_x: f64,
    pub spread_w: f64,
    pub spread_u_alpha: f64,
    pub cov: f64,
    pub abs_cov: f64,
    pub norm_sq: f64,
    pub warnings: Vec<String>,
}

impl MomentReport {
    pub fn ndim(&self) -> usize {
        self.x0.len()
    }
}

fn check_norm(f: &GridFunction) -> Result<f64> {
    let n = l2_norm_sq(f)?;
    if n <= 0.0 {
        return Err(Error::Domain(
            "moments of the zero function are undefined".into(),
        ));
    }
    Ok(n)
}

fn coords_per_axis(f: &GridFunction) -> Vec<Vec<f64>> {
    f.axes().iter().map(|a| a.coords()).collect()
}

/// First moment of a density (already |values|^2-like weights) per dimension.
fn density_moment(f: &GridFunction, density: &ArrayD<f64>, norm_sq: f64) -> Vec<f64> {
    let coords = coords_per_axis(f);
    let mut acc = vec![0.0; f.ndim()];
    for (idx, &p) in density.indexed_iter() {
        for k in 0..f.ndim() {
            acc[k] += coords[k][idx[k]] * p;
        }
    }
    let vol = f.volume_element();
    acc.iter().map(|a| a * vol / norm_sq).collect()
}

fn density_spread_about(f: &GridFunction, density: &ArrayD<f64>, center: &[f64]) -> f64 {
    let coords = coords_per_axis(f);
    let mut acc = 0.0;
    for (idx, &p) in density.indexed_iter() {
        let mut r2 = 0.0;
        for k in 0..f.ndim() {
            let t = coords[k][idx[k]] - center[k];
            r2 += t * t;
        }
        acc += r2 * p;
    }
    acc * f.volume_element()
}

/// Normalized first moment of `|f|^2` per dimension.
pub fn moment_vector_time(f: &GridFunction) -> Result<Vec<f64>> {
    let norm_sq = check_norm(f)?;
    Ok(density_moment(f, &f.abs_sq(), norm_sq))
}

/// Unnormalized second central moment of `|f|^2` about its own moment vector.
pub fn spread_time(f: &GridFunction) -> Result<f64> {
    let x0 = moment_vector_time(f)?;
    Ok(density_spread_about(f, &f.abs_sq(), &x0))
}

/// Second moment of `|f|^2` about an arbitrary center.
pub fn spread_time_about(f: &GridFunction, center: &[f64]) -> Result<f64> {
    if center.len() != f.ndim() {
        return Err(Error::Argument("center has wrong dimension".into()));
    }
    check_norm(f)?;
    Ok(density_spread_about(f, &f.abs_sq(), center))
}

/// Frequency-domain moment vector, evaluated in the transform domain.
pub fn moment_vector_freq(f: &GridFunction) -> Result<Vec<f64>> {
    let norm_sq = check_norm(f)?;
    let fh = ft_nd(f, None)?;
    Ok(density_moment(&fh, &fh.abs_sq(), norm_sq))
}

/// Unnormalized frequency spread about the frequency moment vector.
pub fn spread_freq(f: &GridFunction) -> Result<f64> {
    let norm_sq = check_norm(f)?;
    let fh = ft_nd(f, None)?;
    let w0 = density_moment(&fh, &fh.abs_sq(), norm_sq);
    Ok(density_spread_about(&fh, &fh.abs_sq(), &w0))
}

/// Unnormalized fractional-domain spread about its own moment vector.
pub fn spread_frft(f: &GridFunction, alpha: Angle) -> Result<f64> {
    let norm_sq = check_norm(f)?;
    let g = frft_nd(f, alpha, None)?;
    let u0 = density_moment(&g, &g.abs_sq(), norm_sq);
    Ok(density_spread_about(&g, &g.abs_sq(), &u0))
}

/// Fractional-domain spread about a pinned reference point.
pub fn spread_frft_about(f: &GridFunction, alpha: Angle, center: &[f64]) -> Result<f64> {
    if center.len() != f.ndim() {
        return Err(Error::Argument("center has wrong dimension".into()));
    }
    check_norm(f)?;
    let g = frft_nd(f, alpha, None)?;
    Ok(density_spread_about(&g, &g.abs_sq(), center))
}

/// Time-domain route to the frequency moment along dimension `k`:
/// `integral lambda^2 dphi/dx_k / ||f||^2`. Cross-check for
/// [`moment_vector_freq`]; quadrature plus one differentiation instead of a
/// transform.
pub fn freq_moment_time_route(f: &GridFunction, k: usize) -> Result<f64> {
    let norm_sq = check_norm(f)?;
    let pd = phase_density_samples(f, k)?;
    Ok(integrate_samples(f, &pd) / norm_sq)
}

fn covariance_impl(f: &GridFunction, a: &[f64], b: &[f64], absolute: bool) -> Result<f64> {
    check_norm(f)?;
    let coords = coords_per_axis(f);
    let p = f.abs_sq();
    let mut total = 0.0;
    for k in 0..f.ndim() {
        let pd = phase_density_samples(f, k)?;
        let mut acc = 0.0;
        for ((idx, &pd_v), &p_v) in pd.indexed_iter().zip(p.iter()) {
            let t = coords[k][idx[k]] - a[k];
            let dev = pd_v - b[k] * p_v;
            acc += if absolute {
                t.abs() * dev.abs()
            } else {
                t * dev
            };
        }
        total += acc;
    }
    Ok(total * f.volume_element())
}

/// Signed position/instantaneous-frequency coupling about the function's own
/// moment vectors:
/// `sum_k integral (x_k - x0_k) (lambda^2 dphi/dx_k - w0_k lambda^2) dx`.
pub fn covariance(f: &GridFunction) -> Result<f64> {
    let x0 = moment_vector_time(f)?;
    let w0 = moment_vector_freq(f)?;
    covariance_impl(f, &x0, &w0, false)
}

/// Same coupling with element-wise absolute values; always `>= |covariance|`.
pub fn abs_covariance(f: &GridFunction) -> Result<f64> {
    let x0 = moment_vector_time(f)?;
    let w0 = moment_vector_freq(f)?;
    covariance_impl(f, &x0, &w0, true)
}

/// Covariance about pinned reference points instead of the moments.
pub fn covariance_about(f: &GridFunction, a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != f.ndim() || b.len() != f.ndim() {
        return Err(Error::Argument("reference points have wrong dimension".into()));
    }
    covariance_impl(f, a, b, false)
}

/// Absolute covariance about pinned reference points.
pub fn abs_covariance_about(f: &GridFunction, a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != f.ndim() || b.len() != f.ndim() {
        return Err(Error::Argument("reference points have wrong dimension".into()));
    }
    covariance_impl(f, a, b, true)
}

/// Both routes to the dimension-`k` frequency spread about `b`.
///
/// `ft_side` integrates `(w_k - b)^2 |fhat|^2` in the transform domain;
/// `time_side = amplitude_term + phase_term` evaluates the same quantity in
/// the time domain as
/// `(1/4pi^2) integral (d|f|/dx_k)^2 + integral (dphi/dx_k - b)^2 |f|^2`.
/// The two agree identically in the continuum; `difference` is the
/// discretization residual.
#[derive(Debug, Clone, Serialize)]
pub struct FreqSpreadDecomposition {
    pub ft_side: f64,
    pub amplitude_term: f64,
    pub phase_term: f64,
    pub time_side: f64,
    pub difference: f64,
}

pub fn freq_spread_about(f: &GridFunction, b: f64, k: usize) -> Result<FreqSpreadDecomposition> {
    check_norm(f)?;
    if k >= f.ndim() {
        return Err(Error::Argument(format!(
            "dimension index {k} out of range for {}-d grid",
            f.ndim()
        )));
    }
    let fh = ft_nd(f, None)?;
    let coords_k = fh.axes()[k].coords();
    let mut ft_side = 0.0;
    for (idx, &p) in fh.abs_sq().indexed_iter() {
        let t = coords_k[idx[k]] - b;
        ft_side += t * t * p;
    }
    ft_side *= fh.volume_element();

    let lam = f.map(|v| num_complex::Complex64::new(v.norm(), 0.0));
    let dlam = crate::grid::gradient(&lam, k)?;
    let amplitude_term = dlam.values().iter().map(|v| v.re * v.re).sum::<f64>()
        * f.volume_element()
        / (4.0 * std::f64::consts::PI * std::f64::consts::PI);

    let p = f.abs_sq();
    let floor = p.iter().cloned().fold(0.0f64, f64::max) * DENSITY_FLOOR_REL;
    let pd = phase_density_samples(f, k)?;
    let mut phase_term = 0.0;
    for (&pd_v, &p_v) in pd.iter().zip(p.iter()) {
        if p_v > floor {
            let dev = pd_v - b * p_v;
            phase_term += dev * dev / p_v;
        }
    }
    phase_term *= f.volume_element();

    let time_side = amplitude_term + phase_term;
    Ok(FreqSpreadDecomposition {
        ft_side,
        amplitude_term,
        phase_term,
        time_side,
        difference: ft_side - time_side,
    })
}

/// Residual of the spread rotation relation
/// `spread_u(alpha) - (cos^2 a spread_x + sin^2 a spread_w + 2 sin a cos a cov)`,
/// all terms evaluated by quadrature. Zero in the continuum.
pub fn spread_relation_check(f: &GridFunction, alpha: Angle) -> Result<f64> {
    let r = moment_report(f, alpha)?;
    let (s, c) = alpha.radians().sin_cos();
    Ok(r.spread_u_alpha - (c * c * r.spread_x + s * s * r.spread_w + 2.0 * s * c * r.cov))
}

fn accuracy_warnings(f: &GridFunction, alpha: Angle) -> Result<Vec<String>> {
    let mut warnings = Vec::new();
    let tm = tail_mass(f)?;
    if tm > TAIL_MASS_WARN {
        warnings.push(format!(
            "tail mass {tm:.3e} above {TAIL_MASS_WARN:.0e}: box truncation may pollute moments"
        ));
    }
    if alpha.snapped() {
        warnings.push(format!(
            "order {:.17} within {TAU:.0e} of a multiple of pi: exact branch substituted",
            alpha.radians(),
            TAU = crate::transform::TAU_ANGLE,
        ));
    }
    Ok(warnings)
}

/// Warn when a transform-domain density has weight near the box edge: the
/// transform was either truncated or, below the alias-free threshold
/// (count < 4 h^2 |csc a|), folded a ghost copy into the box. Both corrupt
/// the spread.
pub(crate) fn domain_tail_warning(g: &GridFunction, label: &str) -> Result<Option<String>> {
    let tm = tail_mass(g)?;
    Ok((tm > TAIL_MASS_WARN).then(|| {
        format!(
            "{label} density carries tail mass {tm:.3e} near the box edge \
             (truncated or under the alias-free threshold); its spread is unreliable"
        )
    }))
}

/// Full report about the function's own moment vectors, with the
/// fractional-domain entries evaluated at `alpha`.
pub fn moment_report(f: &GridFunction, alpha: Angle) -> Result<MomentReport> {
    let norm_sq = check_norm(f)?;
    let p = f.abs_sq();
    let x0 = density_moment(f, &p, norm_sq);
    let spread_x = density_spread_about(f, &p, &x0);

    let fh = ft_nd(f, None)?;
    let ph = fh.abs_sq();
    let w0 = density_moment(&fh, &ph, norm_sq);
    let spread_w = density_spread_about(&fh, &ph, &w0);

    let g = frft_nd(f, alpha, None)?;
    let pg = g.abs_sq();
    let u0_alpha = density_moment(&g, &pg, norm_sq);
    let spread_u_alpha = density_spread_about(&g, &pg, &u0_alpha);

    let cov = covariance_impl(f, &x0, &w0, false)?;
    let abs_cov = covariance_impl(f, &x0, &w0, true)?;

    let mut warnings = accuracy_warnings(f, alpha)?;
    warnings.extend(domain_tail_warning(&fh, "frequency-domain")?);
    warnings.extend(domain_tail_warning(&g, "fractional-domain")?);
    if spread_x == 0.0 {
        warnings.push("time spread is zero: degenerate (delta-like) input".into());
    }

    Ok(MomentReport {
        x0,
        w0,
        u0_alpha,
        alpha: alpha.radians(),
        spread_x,
        spread_w,
        spread_u_alpha,
        cov,
        abs_cov,
        norm_sq,
        warnings,
    })
}

/// Report with every functional referenced at pinned points `(a, b)` instead
/// of the function's own moments: time spread about `a`, frequency spread
/// about `b`, fractional spread about the rotated point
/// `cos(alpha) a + sin(alpha) b`, covariances about `(a, b)`. This is the
/// form under which the equality family of the sharpened bounds attains
/// equality for every sign partition.
pub fn moment_report_about(
    f: &GridFunction,
    alpha: Angle,
    a: &[f64],
    b: &[f64],
) -> Result<MomentReport> {
    if a.len() != f.ndim() || b.len() != f.ndim() {
        return Err(Error::Argument("reference points have wrong dimension".into()));
    }
    let norm_sq = check_norm(f)?;
    let spread_x = density_spread_about(f, &f.abs_sq(), a);

    let fh = ft_nd(f, None)?;
    let spread_w = density_spread_about(&fh, &fh.abs_sq(), b);

    let (s, c) = alpha.radians().sin_cos();
    let u_ref: Vec<f64> = a.iter().zip(b.iter()).map(|(&ak, &bk)| c * ak + s * bk).collect();
    let g = frft_nd(f, alpha, None)?;
    let spread_u_alpha = density_spread_about(&g, &g.abs_sq(), &u_ref);

    let cov = covariance_impl(f, a, b, false)?;
    let abs_cov = covariance_impl(f, a, b, true)?;
    let mut warnings = accuracy_warnings(f, alpha)?;
    warnings.extend(domain_tail_warning(&fh, "frequency-domain")?);
    warnings.extend(domain_tail_warning(&g, "fractional-domain")?);

    Ok(MomentReport {
        x0: a.to_vec(),
        w0: b.to_vec(),
        u0_alpha: u_ref,
        alpha: alpha.radians(),
        spread_x,
        spread_w,
        spread_u_alpha,
        cov,
        abs_cov,
        norm_sq,
        warnings,
    })
}
