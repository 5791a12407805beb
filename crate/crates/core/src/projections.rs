//! Constructors for the reference K-theory classes used by the pairing and
//! index machinery: a Powers-Rieffel style projection inside the deformed
//! torus algebra and a rank-one Bott projection over the commutative torus.
//!
//! Both are built from a smooth bump `g` on the circle (mollified indicator
//! of an interval) and its companion `f = sqrt(g(1-g))` restricted to a
//! single transition, truncated to a finite Fourier window. The projection
//! identities hold exactly for the continuous profiles, so the idempotency
//! defect of the truncated output is governed by Fourier tail mass and
//! decreases spectrally in the cutoff.

use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

use crate::graded_core::{
    deformed_product, star, GradedElement, MatrixGradedElement, Weight,
};

/// Errors from the projection constructors.
#[derive(Debug, Error)]
pub enum ProjectionError {
    /// The deformation parameter must lie strictly between 0 and 1.
    #[error("theta = {theta} outside the open interval (0, 1)")]
    InfeasibleTheta { theta: f64 },
    /// Transition too wide relative to the plateau it must fit against.
    #[error("sigma_frac = {sigma_frac} below the feasible minimum 2.0")]
    InfeasibleWidth { sigma_frac: f64 },
    /// Fourier cutoff too small to carry the transition bumps.
    #[error("fourier cutoff {cutoff} below the minimum {min}")]
    CutoffTooSmall { cutoff: u32, min: u32 },
}

/// Shape of the step used for the bump transitions.
///
/// `Mollified` is a Gaussian-smoothed step (infinitely smooth profile,
/// spectral Fourier decay). `RaisedCosine` is the half-cosine step over the
/// same stated width; it is only C^1, so its Fourier tails decay
/// polynomially and the idempotency defect plateaus near 1e-3 regardless of
/// cutoff. Mollified is the default for that reason.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProfileKind {
    /// Gaussian-mollified step; transition scale sigma.
    #[default]
    Mollified,
    /// Half-cosine step over a finite width (7 sigma).
    RaisedCosine,
}

/// Parameters of the bump profile behind [`powers_rieffel`].
///
/// The transition scale is `sigma = min(theta, 1-theta) / sigma_frac`; the
/// default `sigma_frac = 14` puts the full transition comfortably inside
/// the shorter plateau. `sharpen` applies functional-calculus rounding
/// passes `p -> 3p^2 - 2p^3` under the deformed product, which drives the
/// element toward the nearest spectral projection; useful at small cutoffs
/// where the raw truncation defect is large.
#[derive(Debug, Clone, Copy)]
pub struct BumpProfile {
    /// Transition shape.
    pub kind: ProfileKind,
    /// Fourier cutoff M: output terms satisfy |m| <= M.
    pub fourier_cutoff: u32,
    /// Transition sharpness; sigma = min(theta, 1-theta) / sigma_frac.
    pub sigma_frac: f64,
    /// Circle sample count for the quadrature of the Fourier coefficients.
    pub samples: usize,
    /// Functional-calculus rounding passes applied after assembly.
    pub sharpen: u32,
}

impl BumpProfile {
    /// Gaussian-mollified profile at cutoff `fourier_cutoff` with the
    /// default transition width.
    pub fn mollified(fourier_cutoff: u32) -> Self {
        BumpProfile {
            kind: ProfileKind::Mollified,
            fourier_cutoff,
            sigma_frac: 14.0,
            samples: 8192,
            sharpen: 0,
        }
    }

    /// Raised-cosine profile at cutoff `fourier_cutoff`.
    pub fn raised_cosine(fourier_cutoff: u32) -> Self {
        BumpProfile {
            kind: ProfileKind::RaisedCosine,
            ..Self::mollified(fourier_cutoff)
        }
    }

    /// Replaces the transition sharpness divisor.
    pub fn with_sigma_frac(mut self, sigma_frac: f64) -> Self {
        self.sigma_frac = sigma_frac;
        self
    }

    /// Sets the number of rounding passes.
    pub fn with_sharpen(mut self, rounds: u32) -> Self {
        self.sharpen = rounds;
        self
    }
}

impl Default for BumpProfile {
    fn default() -> Self {
        Self::mollified(64)
    }
}

/// Gaussian CDF via erfc; erfc keeps relative accuracy on the left tail
/// where 0.5*(1 + erf) would cancel.
fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Unit step with transition scale `sigma` in the requested shape. The
/// raised-cosine variant spreads its half-cosine over width 7 sigma so both
/// kinds share the stated transition extent.
fn step(kind: ProfileKind, x: f64, sigma: f64) -> f64 {
    match kind {
        ProfileKind::Mollified => normal_cdf(x / sigma),
        ProfileKind::RaisedCosine => {
            let w = 7.0 * sigma;
            if x <= -0.5 * w {
                0.0
            } else if x >= 0.5 * w {
                1.0
            } else {
                0.5 * (1.0 + (PI * x / w).sin())
            }
        }
    }
}

/// Samples the periodized bump `g` (indicator of [0, width] smoothed at
/// scale sigma) and its complement on the uniform grid t_i = i/S.
///
/// The complement is summed directly as its own pair of steps instead of
/// computing 1 - g: the plain subtraction has a 1e-16 cancellation floor
/// where g is near 1, which white-noises sqrt profiles at the 1e-8 level.
fn sample_bump(kind: ProfileKind, width: f64, sigma: f64, s: usize) -> (Vec<f64>, Vec<f64>) {
    let mut g = vec![0.0; s];
    let mut gm1 = vec![0.0; s];
    for (i, (gi, ci)) in g.iter_mut().zip(gm1.iter_mut()).enumerate() {
        let t = i as f64 / s as f64;
        for per in -2..=2 {
            let x = t + per as f64;
            *gi += step(kind, x, sigma) - step(kind, x - width, sigma);
            *ci += step(kind, x - width, sigma) - step(kind, x - 1.0, sigma);
        }
    }
    (g, gm1)
}

/// Periodized window of half-width `hw` centered at `c`, transition scale
/// `sigma`. Values clipped to [0, 1] by the caller where needed.
fn sample_window(kind: ProfileKind, c: f64, hw: f64, sigma: f64, s: usize) -> Vec<f64> {
    let mut w = vec![0.0; s];
    for (i, wi) in w.iter_mut().enumerate() {
        let t = i as f64 / s as f64;
        for per in -2..=2 {
            let x = t + per as f64 - c;
            *wi += step(kind, x + hw, sigma) - step(kind, x - hw, sigma);
        }
    }
    w
}

/// Fourier coefficients hat(v)(k) = (1/S) sum_j v_j e^{-2 pi i k j / S} for
/// |k| <= m, returned as an element with terms along the first axis. The
/// angle is reduced modulo S in exact integer arithmetic before the trig
/// call, and coefficients below 1e-17 are dropped. Negative frequencies are
/// mirrored from the positive ones (the samples are real), which makes the
/// resulting circle function bit-exactly star-symmetric.
fn fourier_element(vals: &[f64], m: u32) -> GradedElement {
    let s = vals.len() as i64;
    let mut e = GradedElement::zero();
    for k in 0..=(m as i64) {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &v) in vals.iter().enumerate() {
            let r = (k * j as i64).rem_euclid(s);
            let ang = -2.0 * PI * r as f64 / s as f64;
            acc += v * Complex64::new(ang.cos(), ang.sin());
        }
        acc /= s as f64;
        if acc.norm() > 1e-17 {
            e.add_term(Weight::new(k as i32, 0), acc);
            if k > 0 {
                e.add_term(Weight::new(-k as i32, 0), acc.conj());
            }
        }
    }
    e
}

fn validate_profile(profile: &BumpProfile, min_cutoff: u32) -> Result<(), ProjectionError> {
    if profile.fourier_cutoff < min_cutoff {
        return Err(ProjectionError::CutoffTooSmall {
            cutoff: profile.fourier_cutoff,
            min: min_cutoff,
        });
    }
    if !(profile.sigma_frac >= 2.0) {
        return Err(ProjectionError::InfeasibleWidth {
            sigma_frac: profile.sigma_frac,
        });
    }
    Ok(())
}

/// Builds a Powers-Rieffel style projection of trace `theta` in the deformed
/// torus algebra, returned as a 1x1 matrix element.
///
/// The scalar entry is `g(u) + f(u) v^{-1} + (f(u) v^{-1})^*` with both
/// circle functions truncated at the profile's Fourier cutoff, so its terms
/// occupy weights |m| <= M, |n| <= 1. The constant coefficient equals the
/// quadrature mean of `g`, hence the canonical trace reproduces `theta` to
/// quadrature accuracy independent of the cutoff.
///
/// # Example
///
/// ```
/// use thetadef::{powers_rieffel, BumpProfile, Weight};
/// let p = powers_rieffel(0.5, &BumpProfile::mollified(32)).unwrap();
/// let trace = p.entry(0, 0).coeff(Weight::ZERO);
/// assert!((trace.re - 0.5).abs() < 1e-8);
/// ```
pub fn powers_rieffel(
    theta: f64,
    profile: &BumpProfile,
) -> Result<MatrixGradedElement, ProjectionError> {
    if !(theta > 0.0 && theta < 1.0) || !theta.is_finite() {
        return Err(ProjectionError::InfeasibleTheta { theta });
    }
    validate_profile(profile, 1)?;
    let m = profile.fourier_cutoff;
    let s = profile.samples.max(64);
    let delta = theta.min(1.0 - theta);
    let sigma = delta / profile.sigma_frac;

    let (g, gm1) = sample_bump(profile.kind, theta, sigma, s);
    // The window edge must clear both transitions of g(1-g) (at 0 and at
    // theta); for theta > 1/2 a theta/2 half-width would reach the second
    // one. The window transition is sharper than g's, so its tail past the
    // edge, where g(1-g) returns to O(1), is dead.
    let hw = delta / 2.0;
    let w0 = sample_window(profile.kind, 0.0, hw, sigma / 2.0, s);
    let f: Vec<f64> = g
        .iter()
        .zip(gm1.iter())
        .zip(w0.iter())
        .map(|((&gi, &ci), &wi)| ((gi * ci).max(0.0) * wi.clamp(0.0, 1.0)).sqrt())
        .collect();

    let gd = fourier_element(&g, m);
    let fd = fourier_element(&f, m);
    let vinv = GradedElement::monomial(Weight::new(0, -1), Complex64::new(1.0, 0.0));
    let q = deformed_product(&fd, &vinv, theta);
    let mut p = gd.add(&q).add(&star(&q));
    for _ in 0..profile.sharpen {
        p = round_once(&p, theta, m);
    }
    Ok(MatrixGradedElement::from_scalar(p))
}

/// One functional-calculus rounding pass `p -> 3p^2 - 2p^3` under the
/// deformed product, truncated back to the profile support |m| <= M,
/// |n| <= 1 with negligible coefficients dropped.
fn round_once(p: &GradedElement, theta: f64, m: u32) -> GradedElement {
    let p2 = deformed_product(p, p, theta);
    let p3 = deformed_product(&p2, p, theta);
    let raw = p2
        .scale(Complex64::new(3.0, 0.0))
        .sub(&p3.scale(Complex64::new(2.0, 0.0)));
    let mut out = GradedElement::zero();
    for (w, c) in raw.iter_terms() {
        if w.m.unsigned_abs() <= m && w.n.unsigned_abs() <= 1 && c.norm() > 1e-18 {
            out.add_term(w, c);
        }
    }
    out
}

/// Builds the rank-one Bott projection over the commutative torus as a 2x2
/// matrix of graded elements, `[[g, q], [q*, 1-g]]` with
/// `q = f_+(u) + f_-(u) v`.
///
/// The first Chern number of the underlying line bundle is -1. The internal
/// transition scale follows the cutoff (`sigma_frac = 0.375 M`, floored at
/// 4) so the Fourier tail and the transition-overlap error shrink together;
/// at M = 32 the curvature integral is reproduced to about 3e-12.
pub fn bott_projection(fourier_cutoff: u32) -> Result<MatrixGradedElement, ProjectionError> {
    if fourier_cutoff < 4 {
        return Err(ProjectionError::CutoffTooSmall {
            cutoff: fourier_cutoff,
            min: 4,
        });
    }
    let m = fourier_cutoff;
    let s = 8192;
    let kind = ProfileKind::Mollified;
    let sigma_frac = (0.375 * m as f64).max(4.0);
    let sigma = 0.5 / sigma_frac;

    let (g, gm1) = sample_bump(kind, 0.5, sigma, s);
    let w0 = sample_window(kind, 0.0, 0.25, sigma / 2.0, s);
    let w1 = sample_window(kind, 0.5, 0.25, sigma / 2.0, s);
    let bump = |wi: f64, gi: f64, ci: f64| ((gi * ci).max(0.0) * wi.clamp(0.0, 1.0)).sqrt();
    let fp: Vec<f64> = g
        .iter()
        .zip(gm1.iter())
        .zip(w0.iter())
        .map(|((&gi, &ci), &wi)| bump(wi, gi, ci))
        .collect();
    let fm: Vec<f64> = g
        .iter()
        .zip(gm1.iter())
        .zip(w1.iter())
        .map(|((&gi, &ci), &wi)| bump(wi, gi, ci))
        .collect();

    let gd = fourier_element(&g, m);
    let fpd = fourier_element(&fp, m);
    let fmd = fourier_element(&fm, m);
    // q = f_+(t1) + f_-(t1) e^{2 pi i t2}: shift the f_- terms to second
    // weight 1.
    let mut q = fpd;
    for (w, c) in fmd.iter_terms() {
        q.add_term(Weight::new(w.m, 1), c);
    }
    let p11 = gd.clone();
    let p22 = GradedElement::one().sub(&gd);
    let p21 = star(&q);
    MatrixGradedElement::from_entries(2, vec![p11, q, p21, p22])
        .map_err(|_| ProjectionError::CutoffTooSmall { cutoff: m, min: 4 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded_core::verify_projection;

    fn scalar(p: &MatrixGradedElement) -> &GradedElement {
        p.entry(0, 0)
    }

    #[test]
    fn trace_matches_theta_across_grid() {
        for &theta in &[0.25, 1.0 / 3.0, 0.7] {
            let p = powers_rieffel(theta, &BumpProfile::mollified(64)).unwrap();
            let tau = scalar(&p).coeff(Weight::ZERO);
            assert!((tau.re - theta).abs() < 1e-12, "theta={theta}: tau={tau}");
            assert!(tau.im.abs() < 1e-15);
        }
    }

    #[test]
    fn symmetric_theta_half_trace() {
        let p = powers_rieffel(0.5, &BumpProfile::mollified(32)).unwrap();
        assert!((scalar(&p).coeff(Weight::ZERO).re - 0.5).abs() < 1e-8);
    }

    #[test]
    fn default_profile_defect_small_at_m64() {
        let theta = 1.0 / 3.0;
        let p = powers_rieffel(theta, &BumpProfile::default()).unwrap();
        let report = verify_projection(&p, theta, 1e-8).unwrap();
        assert!(report.pass, "defect {}", report.idempotency_defect);
    }

    #[test]
    fn defect_decreases_as_cutoff_doubles() {
        let theta = 1.0 / 3.0;
        let mut last = f64::INFINITY;
        for &m in &[8u32, 16, 32, 64] {
            let p = powers_rieffel(theta, &BumpProfile::mollified(m)).unwrap();
            let report = verify_projection(&p, theta, 1.0).unwrap();
            assert!(
                report.idempotency_defect < last,
                "defect did not drop at M={m}: {} vs {last}",
                report.idempotency_defect
            );
            last = report.idempotency_defect;
        }
        assert!(last < 1e-8);
    }

    #[test]
    fn self_adjoint_exactly_by_construction() {
        let p = powers_rieffel(0.7, &BumpProfile::mollified(24)).unwrap();
        let defect = p.sub(&p.star()).unwrap().norm_inf();
        assert_eq!(defect, 0.0);
    }

    #[test]
    fn sharpening_reduces_defect_at_small_cutoff() {
        let theta = 0.25;
        let raw = BumpProfile::mollified(16).with_sigma_frac(5.0);
        let sharpened = raw.with_sharpen(1);
        let d0 = verify_projection(&powers_rieffel(theta, &raw).unwrap(), theta, 1.0)
            .unwrap()
            .idempotency_defect;
        let d1 = verify_projection(&powers_rieffel(theta, &sharpened).unwrap(), theta, 1.0)
            .unwrap()
            .idempotency_defect;
        // At this width the defect is structural (window clipping), so one
        // rounding pass trims it rather than collapsing it.
        assert!(d1 < d0, "sharpening did not help: {d1} vs {d0}");
        assert!(d1 < 1e-3);
    }

    #[test]
    fn raised_cosine_tails_limit_the_defect() {
        let theta = 1.0 / 3.0;
        let p = powers_rieffel(theta, &BumpProfile::raised_cosine(64)).unwrap();
        let report = verify_projection(&p, theta, 1.0).unwrap();
        // C^1 transitions: polynomial Fourier tails, far from the mollified
        // 1e-10 scale but still a projection to a few decimal places.
        assert!(report.idempotency_defect < 1e-2);
        let tau = scalar(&p).coeff(Weight::ZERO);
        assert!((tau.re - theta).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_theta_and_width() {
        assert!(matches!(
            powers_rieffel(0.0, &BumpProfile::default()),
            Err(ProjectionError::InfeasibleTheta { .. })
        ));
        assert!(matches!(
            powers_rieffel(1.2, &BumpProfile::default()),
            Err(ProjectionError::InfeasibleTheta { .. })
        ));
        let narrow = BumpProfile::mollified(32).with_sigma_frac(1.0);
        assert!(matches!(
            powers_rieffel(0.3, &narrow),
            Err(ProjectionError::InfeasibleWidth { .. })
        ));
    }

    #[test]
    fn bott_trace_is_exactly_one() {
        let p = bott_projection(16).unwrap();
        let tr = p.entry(0, 0).coeff(Weight::ZERO) + p.entry(1, 1).coeff(Weight::ZERO);
        assert!((tr.re - 1.0).abs() < 1e-15);
        assert!(tr.im.abs() < 1e-15);
    }

    #[test]
    fn bott_is_a_projection_under_the_plain_product() {
        let p = bott_projection(16).unwrap();
        let report = verify_projection(&p, 0.0, 5e-3).unwrap();
        assert!(report.pass, "defect {}", report.idempotency_defect);
        let tighter = bott_projection(32).unwrap();
        let report = verify_projection(&tighter, 0.0, 1e-6).unwrap();
        assert!(report.pass, "defect {}", report.idempotency_defect);
    }

    #[test]
    fn bott_off_diagonal_star_symmetry() {
        let p = bott_projection(12).unwrap();
        let d = p.entry(0, 1).sub(&star(p.entry(1, 0))).norm_inf();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn bott_rejects_tiny_cutoff() {
        assert!(matches!(
            bott_projection(3),
            Err(ProjectionError::CutoffTooSmall { .. })
        ));
    }
}
