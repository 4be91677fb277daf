//! Hyperbolic density and distance: closed forms on model domains and
//! two-sided bounds on general simply connected domains.
//!
//! Curvature `-4` throughout: `λ_D(z) = 1/(1-|z|²)`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::domains::Domain;
use crate::error::{Error, Result};
use crate::ext::{ln_sinh, log_add_exp, ExtComplex};
use crate::interval::Interval;

/// Points closer than this to the boundary are treated as boundary points.
pub const NEAR_BOUNDARY: f64 = 1e-13;

/// `1 - |z|²` computed without cancellation near the circle.
pub fn one_minus_abs2(z: Complex64) -> f64 {
    let r = z.norm();
    (1.0 - r) * (1.0 + r)
}

pub fn disk_density(z: Complex64) -> Result<f64> {
    let r = z.norm();
    if !(r < 1.0) {
        return Err(Error::domain(format!("{z} is not in the unit disk")));
    }
    Ok(1.0 / one_minus_abs2(z))
}

/// Poincaré distance `½ log((|1-z̄w|+|z-w|)/(|1-z̄w|-|z-w|))`, written as
/// `log(|1-z̄w|+|z-w|) - ½log(1-|z|²) - ½log(1-|w|²)`.
pub fn disk_distance(z: Complex64, w: Complex64) -> Result<f64> {
    if !(z.norm() < 1.0) || !(w.norm() < 1.0) {
        return Err(Error::domain(format!("{z} or {w} is not in the unit disk")));
    }
    let a = (1.0 - z.conj() * w).norm();
    let b = (z - w).norm();
    let k = (a + b).ln() - 0.5 * one_minus_abs2(z).ln() - 0.5 * one_minus_abs2(w).ln();
    Ok(k.max(0.0))
}

/// Density of the right half-plane, `1/(2 Re v)`.
pub fn right_half_plane_density(v: Complex64) -> f64 {
    0.5 / v.re
}

/// Distance in the right half-plane.
pub fn right_half_plane_distance(p: Complex64, q: Complex64) -> f64 {
    let a = (p + q.conj()).norm();
    let b = (p - q).norm();
    ((a + b).ln() - 0.5 * (4.0 * p.re * q.re).ln()).max(0.0)
}

/// Right half-plane distance on extended-range points; `ln_re_*` are the
/// logarithms of the (positive) real parts, supplied by the caller.
pub fn right_half_plane_distance_ext(p: ExtComplex, ln_re_p: f64, q: ExtComplex, ln_re_q: f64) -> f64 {
    let a = p.add(&q.conj()).ln_abs();
    let b = p.sub(&q).ln_abs();
    (log_add_exp(a, b) - 0.5 * (4f64.ln() + ln_re_p + ln_re_q)).max(0.0)
}

/// Upper half-plane distance on extended-range points; `ln_im_*` are the
/// logarithms of the imaginary parts.
pub fn upper_half_plane_distance_ext(p: ExtComplex, ln_im_p: f64, q: ExtComplex, ln_im_q: f64) -> f64 {
    let a = p.sub(&q.conj()).ln_abs();
    let b = p.sub(&q).ln_abs();
    (log_add_exp(a, b) - 0.5 * (4f64.ln() + ln_im_p + ln_im_q)).max(0.0)
}

/// Density of the strip `|Im w - center| < a`.
pub fn strip_density(w: Complex64, half_width: f64, center: f64) -> f64 {
    let eta = FRAC_PI_2 * (w.im - center) / half_width;
    PI / (4.0 * half_width * eta.cos())
}

/// Distance in the strip `|Im w - center| < a`, through `e^ζ` with
/// `ζ = π(w - i·center)/(2a)`, evaluated in extended range.
pub fn strip_distance(z: Complex64, w: Complex64, half_width: f64, center: f64) -> f64 {
    let k = FRAC_PI_2 / half_width;
    let zeta1 = (z - Complex64::new(0.0, center)) * k;
    let zeta2 = (w - Complex64::new(0.0, center)) * k;
    let shift = 0.5 * (zeta1.re + zeta2.re);
    let p = ExtComplex::exp(zeta1 - shift);
    let q = ExtComplex::exp(zeta2 - shift);
    let lp = zeta1.re - shift + zeta1.im.cos().ln();
    let lq = zeta2.re - shift + zeta2.im.cos().ln();
    right_half_plane_distance_ext(p, lp, q, lq)
}

/// `sin(iu)` for `Re u > 0`, `|Im u| < π/2`, with `ln Im sin(iu)`.
fn half_strip_image(u: Complex64) -> (ExtComplex, f64) {
    let (x, y) = (u.re, u.im);
    let decay = (-2.0 * x).exp();
    let m = Complex64::new(-y.sin() * (1.0 + decay) * 0.5, y.cos() * -(-2.0 * x).exp_m1() * 0.5);
    let ln_im = y.cos().ln() + ln_sinh(x);
    (ExtComplex::new(m, x), ln_im)
}

fn half_strip_coordinate(w: Complex64, left: f64, half_width: f64, center: f64) -> Complex64 {
    (w - Complex64::new(left, center)) * (FRAC_PI_2 / half_width)
}

/// Density of the half-strip `Re w > left`, `|Im w - center| < a`, via
/// `g = sin(iπ(w - left - i·center)/(2a))` onto the upper half-plane.
pub fn half_strip_density(w: Complex64, left: f64, half_width: f64, center: f64) -> f64 {
    let u = half_strip_coordinate(w, left, half_width, center);
    let (x, y) = (u.re, u.im);
    let coth = 1.0 / x.tanh();
    let ratio = (y.cos().powi(2) * coth * coth + y.sin().powi(2)).sqrt() / y.cos();
    0.5 * (FRAC_PI_2 / half_width) * ratio
}

/// Distance in the half-strip; exact through `g` with extended-range `sinh`.
pub fn half_strip_distance(z: Complex64, w: Complex64, left: f64, half_width: f64, center: f64) -> f64 {
    let (p, lp) = half_strip_image(half_strip_coordinate(z, left, half_width, center));
    let (q, lq) = half_strip_image(half_strip_coordinate(w, left, half_width, center));
    upper_half_plane_distance_ext(p, lp, q, lq)
}

/// Lower bound `c · log(1 + |z-w| / min(δ(z), δ(w)))`, `c = ½` on convex
/// domains and `¼` otherwise.
pub fn distance_lower_bound(dz: f64, dw: f64, sep: f64, convex: bool) -> f64 {
    let c = if convex { 0.5 } else { 0.25 };
    c * (sep / dz.min(dw)).ln_1p()
}

fn check_inside(dom: &Domain, w: Complex64) -> Result<f64> {
    if !dom.contains(w) {
        return Err(Error::domain(format!("{w} is not in the domain")));
    }
    let d = dom.boundary_distance(w)?;
    if d < NEAR_BOUNDARY {
        return Err(Error::domain(format!(
            "{w} is numerically on the boundary (distance {d:e})"
        )));
    }
    Ok(d)
}

/// Hyperbolic density: exact when the domain has a closed-form Riemann map,
/// otherwise `[1/(4δ), 1/δ]`.
pub fn domain_density(dom: &Domain, w: Complex64) -> Result<Interval> {
    let d = check_inside(dom, w)?;
    if let Some(v) = dom.exact_density(w) {
        return Ok(Interval::point(v));
    }
    Ok(Interval::new(0.25 / d, 1.0 / d))
}

/// Hyperbolic distance: exact through a closed form when available,
/// otherwise a two-sided enclosure. The upper bound comes from `enclosure`
/// (a subdomain with a closed form containing both points) or from the
/// domain's own candidate subdomains; `+inf` when none applies.
pub fn domain_distance(
    dom: &Domain,
    z: Complex64,
    w: Complex64,
    enclosure: Option<&Domain>,
) -> Result<Interval> {
    let dz = check_inside(dom, z)?;
    let dw = check_inside(dom, w)?;
    if let Some(v) = dom.exact_distance(z, w) {
        return Ok(Interval::point(v));
    }
    let lo = distance_lower_bound(dz, dw, (z - w).norm(), dom.convex());
    let mut hi = f64::INFINITY;
    let candidates: Vec<Domain> = match enclosure {
        Some(e) => vec![e.clone()],
        None => dom.enclosures(),
    };
    for e in &candidates {
        if e.contains(z) && e.contains(w) {
            if let Some(v) = e.exact_distance(z, w) {
                hi = hi.min(v);
            }
        }
    }
    let hi = if hi.is_finite() { hi * (1.0 + crate::interval::INFLATION) } else { hi };
    Ok(Interval::new(lo.min(hi), hi))
}
