//! Spread estimators for quadratic-phase optical systems.
//!
//! Free-space (Fresnel) propagation over a distance `d` from a reference
//! plane with scale parameter `s` acts as a fractional transform of order
//! `alpha` with `tan(alpha) = d/s^2`; a symmetric two-lens system acts with
//! `sin(alpha) = d/s^2` and `tan(alpha/2) = z/s^2` (`z` the focal length).
//! Substituting those angles into the sharpened single-order product bound
//! and dividing by the source spread gives a floor on the observed field's
//! spread; this module evaluates the floors in their geometric
//! parameterizations and exposes the bandwidth floors from known duration.

use serde::Serialize;

use crate::bounds::{bound_frft_single, bound_ft_classical, bound_ft_sharper};
use crate::error::{Error, Result};
use crate::moments::MomentReport;
use crate::transform::Angle;

/// Tolerance for the lens geometry consistency check
/// `(d/s^2)^2 + (d/z - 1)^2 = 1`.
pub const LENS_CONSISTENCY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OpticalVariant {
    Fresnel,
    Lens,
}

/// A validated optical geometry with its recovered transform order.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OpticalSetup {
    pub variant: OpticalVariant,
    /// Scale parameter (length units).
    pub s: f64,
    /// Propagation distance / lens separation.
    pub dist: f64,
    /// Focal length (lens variant only).
    pub focal: Option<f64>,
    /// Recovered order, principal branch in (0, pi/2].
    pub alpha: f64,
}

impl OpticalSetup {
    /// Free-space geometry: `alpha = atan(d/s^2)` in `(0, pi/2)`.
    pub fn fresnel(s: f64, dist: f64) -> Result<Self> {
        check_positive(s, dist)?;
        Ok(Self {
            variant: OpticalVariant::Fresnel,
            s,
            dist,
            focal: None,
            alpha: (dist / (s * s)).atan(),
        })
    }

    /// Two-lens geometry. With `focal` absent the focal length is derived
    /// from `tan(alpha/2) = z/s^2`; with it present the pair of constraints
    /// is validated to [`LENS_CONSISTENCY_TOL`]. Requires `d/s^2 <= 1`.
    pub fn lens(s: f64, dist: f64, focal: Option<f64>) -> Result<Self> {
        check_positive(s, dist)?;
        let sin_a = dist / (s * s);
        if sin_a > 1.0 {
            return Err(Error::Domain(format!(
                "no real order: d/s^2 = {sin_a} exceeds 1"
            )));
        }
        let alpha = sin_a.asin();
        let derived_focal = s * s * (alpha / 2.0).tan();
        let focal = match focal {
            None => derived_focal,
            Some(z) => {
                if !(z > 0.0) {
                    return Err(Error::Argument(format!("focal length must be > 0, got {z}")));
                }
                let residual = (sin_a * sin_a + (dist / z - 1.0) * (dist / z - 1.0) - 1.0).abs();
                if residual > LENS_CONSISTENCY_TOL {
                    return Err(Error::Domain(format!(
                        "inconsistent lens geometry: sin(a) = d/s^2 and tan(a/2) = z/s^2 \
                         disagree (residual {residual:.3e}, consistent focal length {derived_focal:.12})"
                    )));
                }
                z
            }
        };
        Ok(Self {
            variant: OpticalVariant::Lens,
            s,
            dist,
            focal: Some(focal),
            alpha,
        })
    }

    pub fn alpha(&self) -> Angle {
        Angle::new(self.alpha).expect("finite order")
    }
}

fn check_positive(s: f64, dist: f64) -> Result<()> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::Argument(format!("scale parameter must be > 0, got {s}")));
    }
    if !(dist > 0.0) || !dist.is_finite() {
        return Err(Error::Argument(format!("distance must be > 0, got {dist}")));
    }
    Ok(())
}

fn check_spread(r: &MomentReport) -> Result<()> {
    if !(r.spread_x > 0.0) {
        return Err(Error::Domain(
            "bandwidth floors need a positive time spread".into(),
        ));
    }
    Ok(())
}

/// Frequency-spread floors from a known duration.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BandwidthFloors {
    /// `(N^2/(16 pi^2) |f|^4 + COV^2) / spread_x`
    pub freq_floor: f64,
    /// `N^2/(16 pi^2) |f|^4 / spread_x`
    pub freq_floor_classical: f64,
}

pub fn bandwidth_floor(r: &MomentReport) -> Result<BandwidthFloors> {
    check_spread(r)?;
    Ok(BandwidthFloors {
        freq_floor: bound_ft_sharper(r) / r.spread_x,
        freq_floor_classical: bound_ft_classical(r) / r.spread_x,
    })
}

/// The three-term chain of fractional-domain spread floors, strongest first.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FrftFloors {
    /// Sharpened complex-function floor.
    pub floor_main: f64,
    /// `(N^2/(16 pi^2)|f|^4 sin^2 a + cos^2 a spread_x^2) / spread_x`.
    pub floor_real: f64,
    /// `N^2/(16 pi^2)|f|^4 sin^2 a / spread_x`.
    pub floor_classical: f64,
}

pub fn frft_bandwidth_floor(r: &MomentReport, alpha: Angle) -> Result<FrftFloors> {
    check_spread(r)?;
    let single = bound_frft_single(r, alpha);
    let (s, c) = alpha.radians().sin_cos();
    let base = bound_ft_classical(r);
    Ok(FrftFloors {
        floor_main: single.sharper / r.spread_x,
        floor_real: (base * s * s + c * c * r.spread_x * r.spread_x) / r.spread_x,
        floor_classical: single.classical / r.spread_x,
    })
}

/// Floor on the observed field's spread for the given geometry.
///
/// Fresnel (`tan a = d/s^2`):
/// `[1/(1+(s^2/d)^2)] (N^2/(16 pi^2)|f|^4 + COV^2)/spread_x
///  + [1/(1+(d/s^2)^2)] spread_x + [2/(d/s^2 + s^2/d)] Cov`.
///
/// Lens (`sin a = d/s^2`, `tan(a/2) = z/s^2`):
/// `(d^2/s^4) (N^2/(16 pi^2)|f|^4 + COV^2)/spread_x
///  + (d/z - 1)^2 spread_x + 2 (d/s^2)(d/z - 1) Cov`.
///
/// Both are the sharpened single-order floor re-expressed through the
/// geometry; agreement with [`frft_bandwidth_floor`] at the recovered order
/// is a two-route identity check.
pub fn optical_spread_floor(setup: &OpticalSetup, r: &MomentReport) -> Result<f64> {
    check_spread(r)?;
    let sharp = bound_ft_sharper(r);
    match setup.variant {
        OpticalVariant::Fresnel => {
            let t = setup.dist / (setup.s * setup.s);
            let inv_t = (setup.s * setup.s) / setup.dist;
            Ok(1.0 / (1.0 + inv_t * inv_t) * sharp / r.spread_x
                + 1.0 / (1.0 + t * t) * r.spread_x
                + 2.0 / (t + inv_t) * r.cov)
        }
        OpticalVariant::Lens => {
            let z = setup.focal.expect("lens setup has a focal length");
            let sin_a = setup.dist / (setup.s * setup.s);
            let defocus = setup.dist / z - 1.0;
            Ok(sin_a * sin_a * sharp / r.spread_x
                + defocus * defocus * r.spread_x
                + 2.0 * sin_a * defocus * r.cov)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chirp::GaussianChirp2D;
    use std::f64::consts::PI;

    fn case_a_report() -> MomentReport {
        GaussianChirp2D::case_a().report(2.0 * PI / 3.0)
    }

    #[test]
    fn bandwidth_floor_values() {
        let r = case_a_report();
        let f = bandwidth_floor(&r).unwrap();
        assert!((f.freq_floor - 0.275330295910584 / 0.75).abs() < 1e-12);
        assert!((f.freq_floor_classical - 0.025330295910584 / 0.75).abs() < 1e-12);
        // with zero absolute covariance the floors coincide
        let mut r0 = r.clone();
        r0.abs_cov = 0.0;
        let f0 = bandwidth_floor(&r0).unwrap();
        assert_eq!(f0.freq_floor, f0.freq_floor_classical);
        // equal-parameter family attains its floor exactly
        let rb = GaussianChirp2D::case_b().report(0.0);
        let fb = bandwidth_floor(&rb).unwrap();
        assert!((rb.spread_w - fb.freq_floor).abs() < 1e-14);
    }

    #[test]
    fn frft_floor_values_and_chain() {
        let r = case_a_report();
        let alpha = Angle::new(2.0 * PI / 3.0).unwrap();
        let f = frft_bandwidth_floor(&r, alpha).unwrap();
        assert!((f.floor_main - 0.347122721932938 / 0.75).abs() < 1e-12);
        // cov = 0 for this family: the chain is ordered
        assert!(f.floor_main >= f.floor_real && f.floor_real >= f.floor_classical);
        let at_zero = frft_bandwidth_floor(&r, Angle::new(0.0).unwrap()).unwrap();
        assert!((at_zero.floor_main - r.spread_x).abs() < 1e-15);
        assert_eq!(at_zero.floor_classical, 0.0);
    }

    #[test]
    fn fresnel_floor_equals_the_single_order_floor() {
        let r = case_a_report();
        for (s, d) in [(1.0, 0.5), (1.3, 2.0), (0.7, 0.1)] {
            let setup = OpticalSetup::fresnel(s, d).unwrap();
            let via_geometry = optical_spread_floor(&setup, &r).unwrap();
            let via_order = frft_bandwidth_floor(&r, setup.alpha()).unwrap().floor_main;
            assert!(
                (via_geometry - via_order).abs() < 1e-12,
                "s={s} d={d}: {via_geometry} vs {via_order}"
            );
        }
    }

    #[test]
    fn fresnel_limits() {
        let r = case_a_report();
        let near = optical_spread_floor(&OpticalSetup::fresnel(1.0, 1e-8).unwrap(), &r).unwrap();
        assert!((near - r.spread_x).abs() < 1e-6);
        let far = optical_spread_floor(&OpticalSetup::fresnel(1.0, 1e8).unwrap(), &r).unwrap();
        assert!((far - bound_ft_sharper(&r) / r.spread_x).abs() < 1e-6);
    }

    #[test]
    fn lens_constructor_validates_geometry() {
        // d/s^2 > 1 has no real order
        assert!(matches!(
            OpticalSetup::lens(1.0, 1.5, None),
            Err(Error::Domain(_))
        ));
        let derived = OpticalSetup::lens(1.2, 0.9, None).unwrap();
        let z = derived.focal.unwrap();
        // feeding the derived focal back in validates
        assert!(OpticalSetup::lens(1.2, 0.9, Some(z)).is_ok());
        // an inconsistent triple is rejected
        assert!(matches!(
            OpticalSetup::lens(1.2, 0.9, Some(z * 1.01)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn lens_floor_at_matched_focal_length() {
        let r = case_a_report();
        // d = z forces sin a = 1 (a = pi/2): only the first term survives
        let setup = OpticalSetup::lens(2.0, 4.0, None).unwrap();
        let z = setup.focal.unwrap();
        assert!((z - 4.0).abs() < 1e-12, "focal {z}");
        let floor = optical_spread_floor(&setup, &r).unwrap();
        let want = bound_ft_sharper(&r) / r.spread_x;
        assert!((floor - want).abs() < 1e-9, "floor {floor} want {want}");
    }

    #[test]
    fn zero_spread_is_rejected() {
        let mut r = case_a_report();
        r.spread_x = 0.0;
        assert!(matches!(bandwidth_floor(&r), Err(Error::Domain(_))));
        assert!(matches!(
            optical_spread_floor(&OpticalSetup::fresnel(1.0, 1.0).unwrap(), &r),
            Err(Error::Domain(_))
        ));
    }
}
