//! Koenigs domains: canonical regions with closed-form Riemann maps and the
//! slit-strip and channel regions of the worked examples.

pub mod geometry;

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::confmap::{MapExpr, Primitive, StripChannel};
use crate::error::{Error, Result};
use crate::hypgeo;
use geometry::{curve_distance, ray_distance};

/// Default number of slit pairs kept from the infinite slit family.
pub const DEFAULT_SLIT_PAIRS: u32 = 40;
/// Largest admissible number of slit pairs (`2^60` is still exact in `f64`).
pub const MAX_SLIT_PAIRS: u32 = 60;
/// Tolerance of the refined boundary-distance searches.
pub const DISTANCE_TOL: f64 = 1e-9;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Horizontal half-line `{Re w ≤ x, Im w = y}` removed from a strip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Slit {
    pub x: f64,
    pub y: f64,
}

/// Boundary graph of a channel left of the splice abscissa.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    /// `y = shift + sign / ln(-x)` for `x < -1`.
    Log { sign: f64, shift: f64 },
    /// `y = shift + sign · e^x`.
    Exp { sign: f64, shift: f64 },
}

impl Profile {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Profile::Log { sign, shift } => {
                if x >= -1.0 {
                    sign * f64::INFINITY
                } else {
                    shift + sign / (-x).ln()
                }
            }
            Profile::Exp { sign, shift } => shift + sign * x.exp(),
        }
    }

    fn sign(&self) -> f64 {
        match *self {
            Profile::Log { sign, .. } | Profile::Exp { sign, .. } => sign,
        }
    }

    fn shift(&self) -> f64 {
        match *self {
            Profile::Log { shift, .. } | Profile::Exp { shift, .. } => shift,
        }
    }

    /// Limit of the profile far to the left.
    pub fn far_value(&self) -> f64 {
        self.shift()
    }

    /// Parametrization `u ↦ point` with the admissible parameter range for a
    /// channel spliced at `splice`.
    fn curve(&self, u: f64) -> Complex64 {
        match *self {
            Profile::Log { sign, shift } => c(-u.exp(), shift + sign / u),
            Profile::Exp { sign, shift } => c(u, shift + sign * u.exp()),
        }
    }

    fn param_range(&self, splice: f64) -> (f64, f64) {
        match self {
            Profile::Log { .. } => {
                let lo = if splice < -1.0 { (-splice).ln() } else { 1e-300 };
                (lo, 700.0)
            }
            Profile::Exp { .. } => (-745.0, splice),
        }
    }

    fn param_of_x(&self, x: f64) -> f64 {
        match self {
            Profile::Log { .. } => (-x).ln(),
            Profile::Exp { .. } => x,
        }
    }

    /// Parameter interval of curve points within `d` of `w`, if any.
    fn window(&self, splice: f64, w: Complex64, d: f64) -> Option<(f64, f64)> {
        let (plo, phi) = self.param_range(splice);
        let xr = (w.re - d, (w.re + d).min(splice));
        if xr.0 >= xr.1 {
            return None;
        }
        let (mut lo, mut hi) = match self {
            Profile::Log { .. } => {
                if xr.1 >= -1.0 && xr.0 >= -1.0 {
                    return None;
                }
                let a = if xr.1 >= -1.0 { plo } else { self.param_of_x(xr.1) };
                (a, self.param_of_x(xr.0))
            }
            Profile::Exp { .. } => (xr.0, xr.1),
        };
        lo = lo.max(plo);
        hi = hi.min(phi);
        if let Profile::Log { sign, shift } = *self {
            // 1/u = sign·(y - shift) must lie within sign·(Im w - shift) ± d.
            let a = sign * (w.im - shift) - d;
            let b = sign * (w.im - shift) + d;
            if b <= 0.0 {
                return None;
            }
            lo = lo.max(1.0 / b);
            if a > 0.0 {
                hi = hi.min(1.0 / a);
            }
        }
        (lo < hi).then_some((lo, hi))
    }

    /// Distance from `w` to the graph, given an upper bound `d0` attained
    /// by some boundary point.
    fn distance(&self, splice: f64, w: Complex64, d0: f64) -> f64 {
        match self.window(splice, w, d0) {
            None => d0,
            Some((lo, hi)) => match self {
                Profile::Log { .. } => {
                    let (a, b) = (lo.ln(), hi.ln());
                    curve_distance(|v| self.curve(v.exp()), a, b, w, DISTANCE_TOL, 64).min(d0)
                }
                Profile::Exp { .. } => {
                    curve_distance(|u| self.curve(u), lo, hi, w, DISTANCE_TOL, 64).min(d0)
                }
            },
        }
    }

    /// A few explicit boundary points used to seed distance searches.
    fn probe_points(&self, splice: f64, w: Complex64) -> Vec<Complex64> {
        let (plo, phi) = self.param_range(splice);
        let mut pts = Vec::new();
        if w.re < splice {
            pts.push(c(w.re, self.value(w.re)));
        }
        match self {
            Profile::Log { .. } => {
                for k in 0..48 {
                    let s = 1e-3 * (7e5f64).powf(k as f64 / 47.0);
                    if s > plo && s < phi {
                        pts.push(self.curve(s));
                    }
                }
            }
            Profile::Exp { .. } => {
                for k in 0..32 {
                    let x = splice - 0.5 * k as f64;
                    pts.push(self.curve(x));
                }
            }
        }
        pts.retain(|p| p.re.is_finite() && p.im.is_finite());
        pts
    }
}

/// Shape of a domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainKind {
    /// The whole plane.
    Plane,
    /// `{Re(w e^{-iθ}) > offset}` with `θ = normal_angle`.
    HalfPlane { normal_angle: f64, offset: f64 },
    /// `{|Im w - center| < half_width}`.
    Strip { half_width: f64, center: f64 },
    /// `{Re w > left, |Im w - center| < half_width}`.
    HalfStrip {
        left: f64,
        half_width: f64,
        #[serde(default)]
        center: f64,
    },
    /// `{|Im w| < half_width}` minus horizontal half-lines.
    SlitStrip { half_width: f64, slits: Vec<Slit> },
    /// `{Re w ≥ splice}` joined to `{lower(x) < y < upper(x)}` on `x < splice`.
    Channel {
        splice: f64,
        upper: Profile,
        lower: Profile,
    },
    /// Image of the strip `|Im ζ| < π/2` under `offset + F(ζ)`.
    StripImage {
        map: Arc<StripChannel>,
        offset: f64,
    },
    /// `exp` of the oblique strip `{-μt + is : |s - center_angle| < width/2}`.
    SpiralSector {
        mu: Complex64,
        width: f64,
        #[serde(default)]
        center_angle: f64,
    },
    Disk { center: Complex64, radius: f64 },
}

/// A planar simply connected region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DomainKind", into = "DomainKind")]
pub struct Domain {
    kind: DomainKind,
    convex: bool,
}

impl From<Domain> for DomainKind {
    fn from(d: Domain) -> Self {
        d.kind
    }
}

impl TryFrom<DomainKind> for Domain {
    type Error = Error;

    fn try_from(k: DomainKind) -> Result<Self> {
        Domain::new(k)
    }
}

fn finite(v: f64, what: &str) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("{what} must be finite")))
    }
}

fn positive(v: f64, what: &str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("{what} must be positive and finite")))
    }
}

/// Chain sending the strip `|Im w - center| < a` onto the unit disk.
fn strip_to_disk(a: f64, center: f64) -> Vec<Primitive> {
    let k = FRAC_PI_2 / a;
    vec![
        Primitive::Affine { a: c(k, 0.0), b: c(0.0, -k * center) },
        Primitive::Exp { center: 0.0 },
        Primitive::Mobius { a: c(1.0, 0.0), b: c(-1.0, 0.0), c: c(1.0, 0.0), d: c(1.0, 0.0) },
    ]
}

impl Domain {
    pub fn new(kind: DomainKind) -> Result<Self> {
        let convex = match &kind {
            DomainKind::Plane => true,
            DomainKind::HalfPlane { normal_angle, offset } => {
                finite(*normal_angle, "half-plane angle")?;
                finite(*offset, "half-plane offset")?;
                true
            }
            DomainKind::Strip { half_width, center } => {
                positive(*half_width, "strip half-width")?;
                finite(*center, "strip center")?;
                true
            }
            DomainKind::HalfStrip { left, half_width, center } => {
                positive(*half_width, "half-strip half-width")?;
                finite(*left, "half-strip left edge")?;
                finite(*center, "half-strip center")?;
                true
            }
            DomainKind::SlitStrip { half_width, slits } => {
                positive(*half_width, "slit strip half-width")?;
                for s in slits {
                    finite(s.x, "slit abscissa")?;
                    if !(s.y.abs() < *half_width) {
                        return Err(Error::param("slit height outside the strip"));
                    }
                }
                slits.is_empty()
            }
            DomainKind::Channel { splice, upper, lower } => {
                finite(*splice, "channel splice")?;
                for p in [upper, lower] {
                    if !(p.sign().abs() == 1.0) || !p.shift().is_finite() {
                        return Err(Error::param("profile sign must be ±1 with a finite shift"));
                    }
                    if matches!(p, Profile::Log { .. }) && *splice > -1.0 {
                        return Err(Error::param("logarithmic profiles need splice ≤ -1"));
                    }
                }
                if upper.sign() < 0.0 || lower.sign() > 0.0 {
                    return Err(Error::param(
                        "upper profile must widen upward and lower profile downward",
                    ));
                }
                if upper.far_value() < lower.far_value() {
                    return Err(Error::param("channel profiles cross"));
                }
                false
            }
            DomainKind::StripImage { offset, .. } => {
                finite(*offset, "strip image offset")?;
                false
            }
            DomainKind::SpiralSector { mu, width, center_angle } => {
                if !(mu.re > 0.0) || !mu.im.is_finite() {
                    return Err(Error::param("spiral sector needs Re μ > 0"));
                }
                if !(*width > 0.0 && *width < 2.0 * PI) {
                    return Err(Error::param("spiral sector width must lie in (0, 2π)"));
                }
                finite(*center_angle, "spiral sector center")?;
                false
            }
            DomainKind::Disk { center, radius } => {
                positive(*radius, "disk radius")?;
                finite(center.re, "disk center")?;
                finite(center.im, "disk center")?;
                true
            }
        };
        Ok(Domain { kind, convex })
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    /// Convexity flag; analytic for every kind, conservative (`false`) where
    /// convexity is not guaranteed.
    pub fn convex(&self) -> bool {
        self.convex
    }

    pub fn plane() -> Self {
        Domain::new(DomainKind::Plane).unwrap()
    }

    pub fn unit_disk() -> Self {
        Domain::disk(c(0.0, 0.0), 1.0).unwrap()
    }

    pub fn disk(center: Complex64, radius: f64) -> Result<Self> {
        Domain::new(DomainKind::Disk { center, radius })
    }

    pub fn right_half_plane() -> Self {
        Domain::half_plane(0.0, 0.0).unwrap()
    }

    pub fn upper_half_plane() -> Self {
        Domain::half_plane(FRAC_PI_2, 0.0).unwrap()
    }

    pub fn half_plane(normal_angle: f64, offset: f64) -> Result<Self> {
        Domain::new(DomainKind::HalfPlane { normal_angle, offset })
    }

    pub fn strip(half_width: f64, center: f64) -> Result<Self> {
        Domain::new(DomainKind::Strip { half_width, center })
    }

    pub fn half_strip(left: f64, half_width: f64) -> Result<Self> {
        Domain::new(DomainKind::HalfStrip { left, half_width, center: 0.0 })
    }

    pub fn spiral_sector(mu: Complex64, width: f64) -> Result<Self> {
        Domain::new(DomainKind::SpiralSector { mu, width, center_angle: 0.0 })
    }

    /// Number of slit pairs for slit strips.
    pub fn truncation(&self) -> Option<u32> {
        match &self.kind {
            DomainKind::SlitStrip { slits, .. } => Some((slits.len() / 2) as u32),
            _ => None,
        }
    }

    pub fn contains(&self, w: Complex64) -> bool {
        if !(w.re.is_finite() && w.im.is_finite()) {
            return false;
        }
        match &self.kind {
            DomainKind::Plane => true,
            DomainKind::HalfPlane { normal_angle, offset } => {
                (w * Complex64::from_polar(1.0, -normal_angle)).re > *offset
            }
            DomainKind::Strip { half_width, center } => (w.im - center).abs() < *half_width,
            DomainKind::HalfStrip { left, half_width, center } => {
                w.re > *left && (w.im - center).abs() < *half_width
            }
            DomainKind::SlitStrip { half_width, slits } => {
                w.im.abs() < *half_width && !slits.iter().any(|s| w.im == s.y && w.re <= s.x)
            }
            DomainKind::Channel { splice, upper, lower } => {
                if w.re > *splice {
                    true
                } else {
                    w.im < upper.value(w.re) && w.im > lower.value(w.re)
                }
            }
            DomainKind::StripImage { map, offset } => {
                match map.edge_parameter_for_re(w.re - offset).and_then(|xi| map.upper_edge(xi)) {
                    Ok(p) => w.im.abs() < p.im,
                    Err(_) => false,
                }
            }
            DomainKind::SpiralSector { mu, width, center_angle } => {
                if w.norm() == 0.0 {
                    return false;
                }
                let s = self.spiral_coordinate(w, *mu, *center_angle);
                (s - center_angle).abs() < 0.5 * width
            }
            DomainKind::Disk { center, radius } => (w - center).norm() < *radius,
        }
    }

    /// Oblique-strip coordinate `s` of `w` in a spiral sector, lifted into
    /// `(center - π, center + π]`.
    fn spiral_coordinate(&self, w: Complex64, mu: Complex64, center: f64) -> f64 {
        let lr = w.norm().ln();
        let shear = mu.im / mu.re;
        let theta = crate::confmap::wrap_angle(w.arg(), center + shear * lr);
        theta - shear * lr
    }

    /// Horizontal-strip coordinate of `w` in a spiral sector and the strip half-width.
    fn spiral_strip_point(&self, w: Complex64) -> Option<(Complex64, f64)> {
        if let DomainKind::SpiralSector { mu, width, center_angle } = &self.kind {
            let s = self.spiral_coordinate(w, *mu, *center_angle);
            let lr = w.norm().ln();
            let zeta = c(lr, s + mu.im / mu.re * lr);
            let rot = Complex64::from_polar(1.0, -mu.arg());
            let psi = (zeta - c(0.0, *center_angle)) * rot;
            let a = 0.5 * width * mu.arg().cos();
            Some((psi, a))
        } else {
            None
        }
    }

    /// Euclidean distance to the boundary.
    pub fn boundary_distance(&self, w: Complex64) -> Result<f64> {
        if !self.contains(w) {
            return Err(Error::domain(format!("{w} is not in the domain")));
        }
        Ok(match &self.kind {
            DomainKind::Plane => f64::INFINITY,
            DomainKind::HalfPlane { normal_angle, offset } => {
                (w * Complex64::from_polar(1.0, -normal_angle)).re - offset
            }
            DomainKind::Strip { half_width, center } => half_width - (w.im - center).abs(),
            DomainKind::HalfStrip { left, half_width, center } => {
                (w.re - left).min(half_width - (w.im - center).abs())
            }
            DomainKind::SlitStrip { half_width, slits } => {
                let mut d = half_width - w.im.abs();
                for s in slits {
                    let ds = if w.re <= s.x {
                        (w.im - s.y).abs()
                    } else {
                        (w - c(s.x, s.y)).norm()
                    };
                    d = d.min(ds);
                }
                d
            }
            DomainKind::Channel { splice, upper, lower } => {
                let mut d0 = f64::INFINITY;
                let mut rays = Vec::new();
                for (p, dir) in [(upper, 1.0), (lower, -1.0)] {
                    for q in p.probe_points(*splice, w) {
                        d0 = d0.min((q - w).norm());
                    }
                    let v = p.value(*splice - 1e-300_f64.max(0.0));
                    let lim = if matches!(p, Profile::Log { .. }) && *splice == -1.0 {
                        f64::INFINITY
                    } else {
                        v
                    };
                    if lim.is_finite() {
                        rays.push(ray_distance(w, c(*splice, lim), c(0.0, dir)));
                    }
                }
                for r in &rays {
                    d0 = d0.min(*r);
                }
                let du = upper.distance(*splice, w, d0);
                let dl = lower.distance(*splice, w, d0.min(du));
                du.min(dl)
            }
            DomainKind::StripImage { map, offset } => strip_image_distance(map, *offset, w)?,
            DomainKind::SpiralSector { mu, width, center_angle } => {
                let r = w.norm();
                let mut best = r;
                let rot_lo = -(2.0 * r).ln() / mu.re;
                let rot_hi = -(1e-12 * r).ln() / mu.re;
                for side in [-1.0, 1.0] {
                    let s = center_angle + side * 0.5 * width;
                    let curve = |t: f64| (c(0.0, s) - mu * t).exp();
                    best = best.min(curve_distance(curve, rot_lo, rot_hi, w, DISTANCE_TOL, 256));
                }
                best
            }
            DomainKind::Disk { center, radius } => radius - (w - center).norm(),
        })
    }

    /// Closed-form Riemann map onto the unit disk, when one exists.
    pub fn exact_map(&self) -> Option<MapExpr> {
        let chain = match &self.kind {
            DomainKind::HalfPlane { normal_angle, offset } => vec![
                Primitive::Affine {
                    a: Complex64::from_polar(1.0, -normal_angle),
                    b: c(-offset, 0.0),
                },
                Primitive::Mobius { a: c(1.0, 0.0), b: c(-1.0, 0.0), c: c(1.0, 0.0), d: c(1.0, 0.0) },
            ],
            DomainKind::Strip { half_width, center } => strip_to_disk(*half_width, *center),
            DomainKind::HalfStrip { left, half_width, center } => {
                let k = FRAC_PI_2 / half_width;
                vec![
                    Primitive::Affine { a: c(0.0, k), b: c(0.0, -k) * c(*left, *center) },
                    Primitive::Sin,
                    Primitive::Mobius { a: c(1.0, 0.0), b: c(0.0, -1.0), c: c(1.0, 0.0), d: c(0.0, 1.0) },
                ]
            }
            DomainKind::SpiralSector { mu, width, center_angle } => {
                let rot = Complex64::from_polar(1.0, -mu.arg());
                let a = 0.5 * width * mu.arg().cos();
                let mut chain = vec![
                    Primitive::SpiralLog { mu: *mu, center: *center_angle },
                    Primitive::Affine { a: rot, b: -c(0.0, *center_angle) * rot },
                ];
                chain.extend(strip_to_disk(a, 0.0));
                chain
            }
            DomainKind::Disk { center, radius } => vec![Primitive::Affine {
                a: c(1.0 / radius, 0.0),
                b: -center / *radius,
            }],
            _ => return None,
        };
        Some(MapExpr {
            chain,
            source: self.clone(),
            target: Domain::unit_disk(),
        })
    }

    /// Closed-form hyperbolic density, when available.
    pub fn exact_density(&self, w: Complex64) -> Option<f64> {
        match &self.kind {
            DomainKind::HalfPlane { normal_angle, offset } => {
                let v = w * Complex64::from_polar(1.0, -normal_angle) - offset;
                Some(hypgeo::right_half_plane_density(v))
            }
            DomainKind::Strip { half_width, center } => {
                Some(hypgeo::strip_density(w, *half_width, *center))
            }
            DomainKind::HalfStrip { left, half_width, center } => {
                Some(hypgeo::half_strip_density(w, *left, *half_width, *center))
            }
            DomainKind::SpiralSector { .. } => {
                let (psi, a) = self.spiral_strip_point(w)?;
                Some(hypgeo::strip_density(psi, a, 0.0) / w.norm())
            }
            DomainKind::StripImage { map, offset } => {
                let zeta = map.invert_raw(w - offset, None).ok()?;
                Some(hypgeo::strip_density(zeta, FRAC_PI_2, 0.0) / map.derivative_raw(zeta).norm())
            }
            DomainKind::Disk { center, radius } => {
                let v = (w - center) / *radius;
                Some(1.0 / (hypgeo::one_minus_abs2(v) * radius))
            }
            _ => None,
        }
    }

    /// Closed-form hyperbolic distance, when available.
    pub fn exact_distance(&self, z: Complex64, w: Complex64) -> Option<f64> {
        match &self.kind {
            DomainKind::HalfPlane { normal_angle, offset } => {
                let rot = Complex64::from_polar(1.0, -normal_angle);
                Some(hypgeo::right_half_plane_distance(z * rot - offset, w * rot - offset))
            }
            DomainKind::Strip { half_width, center } => {
                Some(hypgeo::strip_distance(z, w, *half_width, *center))
            }
            DomainKind::HalfStrip { left, half_width, center } => {
                Some(hypgeo::half_strip_distance(z, w, *left, *half_width, *center))
            }
            DomainKind::SpiralSector { .. } => {
                let (p, a) = self.spiral_strip_point(z)?;
                let (q, _) = self.spiral_strip_point(w)?;
                Some(hypgeo::strip_distance(p, q, a, 0.0))
            }
            DomainKind::StripImage { map, offset } => {
                let p = map.invert_raw(z - offset, None).ok()?;
                let q = map.invert_raw(w - offset, None).ok()?;
                Some(hypgeo::strip_distance(p, q, FRAC_PI_2, 0.0))
            }
            DomainKind::Disk { center, radius } => {
                hypgeo::disk_distance((z - center) / *radius, (w - center) / *radius).ok()
            }
            _ => None,
        }
    }

    /// Subdomains with closed-form distances, used for upper distance bounds.
    pub fn enclosures(&self) -> Vec<Domain> {
        let mut out = Vec::new();
        match &self.kind {
            DomainKind::SlitStrip { half_width, slits } => {
                let mut lefts: Vec<f64> = slits.iter().map(|s| s.x).collect();
                lefts.sort_by(|a, b| a.partial_cmp(b).unwrap());
                lefts.dedup();
                for &left in &lefts {
                    let b = slits
                        .iter()
                        .filter(|s| s.x > left)
                        .map(|s| s.y.abs())
                        .fold(*half_width, f64::min);
                    if b > 0.0 {
                        out.push(Domain::new(DomainKind::HalfStrip { left, half_width: b, center: 0.0 }).unwrap());
                    }
                }
                let b = slits.iter().map(|s| s.y.abs()).fold(*half_width, f64::min);
                if b > 0.0 {
                    out.push(Domain::strip(b, 0.0).unwrap());
                }
            }
            DomainKind::Channel { splice, upper, lower } => {
                out.push(Domain::half_plane(0.0, *splice).unwrap());
                let (hi, lo) = (upper.far_value(), lower.far_value());
                if hi > lo {
                    out.push(Domain::strip(0.5 * (hi - lo), 0.5 * (hi + lo)).unwrap());
                }
            }
            DomainKind::StripImage { map, .. } => {
                out.push(Domain::strip(map.far_half_width(), 0.0).unwrap());
            }
            _ => {}
        }
        out
    }

    /// Whether `w + t` stays inside for `t ≥ 0`: analytic for every kind.
    pub fn convex_in_positive_direction(&self) -> Option<bool> {
        match &self.kind {
            DomainKind::Plane
            | DomainKind::Strip { .. }
            | DomainKind::HalfStrip { .. }
            | DomainKind::SlitStrip { .. }
            | DomainKind::Channel { .. }
            | DomainKind::StripImage { .. } => Some(true),
            DomainKind::HalfPlane { normal_angle, .. } => Some(normal_angle.cos() >= -1e-15),
            DomainKind::Disk { .. } => Some(false),
            DomainKind::SpiralSector { .. } => None,
        }
    }

    /// Exact answer for `e^{-μt}Ω ⊆ Ω`, when one is known.
    fn spirallike_exact(&self, mu: Complex64) -> Option<bool> {
        match &self.kind {
            DomainKind::Plane => Some(true),
            DomainKind::Disk { center, .. } if center.norm() == 0.0 => Some(true),
            DomainKind::SpiralSector { mu: m, .. } => Some((mu / m).im.abs() < 1e-12),
            _ => None,
        }
    }

    /// Interior sample points, deterministic for a given generator state.
    pub fn sample_points<R: Rng>(&self, rng: &mut R, n: usize) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(n);
        let mut guard = 0;
        while out.len() < n && guard < 1000 * n.max(1) {
            guard += 1;
            let w = self.sample_candidate(rng);
            if let Some(w) = w {
                if self.contains(w) {
                    out.push(w);
                }
            }
        }
        out
    }

    fn sample_candidate<R: Rng>(&self, rng: &mut R) -> Option<Complex64> {
        Some(match &self.kind {
            DomainKind::Plane => c(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)),
            DomainKind::HalfPlane { normal_angle, offset } => {
                let v = c(offset + rng.gen_range(0.0..5.0), rng.gen_range(-5.0..5.0));
                v * Complex64::from_polar(1.0, *normal_angle)
            }
            DomainKind::Strip { half_width, center } => c(
                rng.gen_range(-10.0..10.0),
                center + half_width * rng.gen_range(-1.0..1.0),
            ),
            DomainKind::HalfStrip { left, half_width, center } => c(
                left + rng.gen_range(0.0..(10.0 * half_width).max(2.0)),
                center + half_width * rng.gen_range(-1.0..1.0),
            ),
            DomainKind::SlitStrip { half_width, slits } => {
                let far = slits.iter().map(|s| s.x).fold(0.0, f64::min).max(-64.0);
                c(rng.gen_range(far - 4.0..4.0), half_width * rng.gen_range(-1.0..1.0))
            }
            DomainKind::Channel { splice, upper, lower } => {
                let x = rng.gen_range(-20.0..5.0);
                if x > *splice {
                    c(x, rng.gen_range(-5.0..5.0))
                } else {
                    let hi = upper.value(x).min(lower.value(x) + 10.0);
                    let lo = lower.value(x).max(upper.value(x) - 10.0);
                    if !(lo < hi) {
                        return None;
                    }
                    c(x, rng.gen_range(lo..hi))
                }
            }
            DomainKind::StripImage { map, offset } => {
                let z = c(rng.gen_range(-8.0..4.0), 0.999 * FRAC_PI_2 * rng.gen_range(-1.0..1.0));
                offset + map.eval_raw(z).ok()?
            }
            DomainKind::SpiralSector { mu, width, center_angle } => {
                let t = rng.gen_range(-2.0..4.0);
                let s = center_angle + 0.5 * width * rng.gen_range(-1.0..1.0);
                (c(0.0, s) - mu * t).exp()
            }
            DomainKind::Disk { center, radius } => {
                let r = radius * rng.gen::<f64>().sqrt();
                center + Complex64::from_polar(r, rng.gen_range(0.0..2.0 * PI))
            }
        })
    }

    /// Sampled (or analytic) check that the domain is convex in the positive
    /// direction: `w + t` stays inside for `t ∈ {0.1, 1, 10}`.
    pub fn is_convex_positive_direction(&self, budget: usize) -> bool {
        if let Some(v) = self.convex_in_positive_direction() {
            return v;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0xc0417e5);
        self.sample_points(&mut rng, budget)
            .into_iter()
            .all(|w| [0.1, 1.0, 10.0].iter().all(|t| self.contains(w + t)))
    }

    /// Sampled (or analytic) check that `e^{-μt}Ω ⊆ Ω` for `t ∈ {0.1, 1, 10}`.
    pub fn is_spirallike(&self, mu: Complex64, budget: usize) -> Result<bool> {
        if !(mu.re > 0.0) {
            return Err(Error::param("spirallikeness needs Re μ > 0"));
        }
        if let Some(v) = self.spirallike_exact(mu) {
            return Ok(v);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5b17a1);
        let mut pts = self.sample_points(&mut rng, budget);
        if let DomainKind::Strip { half_width, center } = &self.kind {
            // Rotation-dilation of a far point in the strip direction exits.
            pts.push(c(1e3, *center + 0.5 * half_width));
        }
        Ok(pts
            .into_iter()
            .all(|w| [0.1, 1.0, 10.0].iter().all(|t| self.contains((-mu * *t).exp() * w))))
    }
}

/// Distance from `w` to the edges of `offset + F(strip)`.
fn strip_image_distance(map: &StripChannel, offset: f64, w: Complex64) -> Result<f64> {
    let v = c(w.re - offset, w.im.abs());
    let xi = map.edge_parameter_for_re(v.re)?;
    let above = map.upper_edge(xi)?;
    let d0 = above.im - v.im;
    let a = map.edge_parameter_for_re(v.re - d0)?;
    let b = map.edge_parameter_for_im(v.im + d0)?.max(xi);
    let a = a.min(xi);
    // Far to the left the edge is a horizontal half-line at the far half-width.
    let d_far = if a < -1e3 {
        let start = map.upper_edge(-1e3)?;
        ray_distance(v, c(start.re, map.far_half_width()), c(-1.0, 0.0))
    } else {
        f64::INFINITY
    };
    let a = a.max(-1e3);
    let d = curve_distance(|u| map.upper_edge(u).unwrap_or(c(f64::INFINITY, f64::INFINITY)), a, b, v, DISTANCE_TOL, 32);
    Ok(d.min(d0).min(d_far))
}

/// Strip `|Im w| < 2` minus the half-lines `{Re ≤ -2^n, Im = ±1/n}`,
/// `n = 1..=pairs`.
pub fn example1_domain(pairs: u32) -> Result<Domain> {
    if pairs == 0 {
        return Err(Error::param("at least one slit pair is required"));
    }
    if pairs > MAX_SLIT_PAIRS {
        return Err(Error::param(format!(
            "slit truncation {pairs} exceeds the cap {MAX_SLIT_PAIRS}"
        )));
    }
    let mut slits = Vec::with_capacity(2 * pairs as usize);
    for n in 1..=pairs {
        let x = -(2f64.powi(n as i32));
        let y = 1.0 / n as f64;
        slits.push(Slit { x, y });
        slits.push(Slit { x, y: -y });
    }
    Domain::new(DomainKind::SlitStrip { half_width: 2.0, slits })
}

/// `{Re w ≥ -1} ∪ {x < -1, |y| < 1/ln|x|}`.
pub fn example2_domain() -> Domain {
    Domain::new(DomainKind::Channel {
        splice: -1.0,
        upper: Profile::Log { sign: 1.0, shift: 0.0 },
        lower: Profile::Log { sign: -1.0, shift: 0.0 },
    })
    .unwrap()
}

/// `{Re w ≥ -1} ∪ {x < -1, -1/ln|x| - 1 < y < 1/ln|x|}`.
pub fn example3_domain() -> Domain {
    Domain::new(DomainKind::Channel {
        splice: -1.0,
        upper: Profile::Log { sign: 1.0, shift: 0.0 },
        lower: Profile::Log { sign: -1.0, shift: -1.0 },
    })
    .unwrap()
}

/// `{Re w > -1} ∪ {x ≤ -1, |y| < e^x}`.
pub fn exp_channel_domain() -> Domain {
    Domain::new(DomainKind::Channel {
        splice: -1.0,
        upper: Profile::Exp { sign: 1.0, shift: 0.0 },
        lower: Profile::Exp { sign: -1.0, shift: 0.0 },
    })
    .unwrap()
}

/// Canonical domain with its closed-form map; rejects non-canonical kinds.
pub fn canonical_domain(kind: DomainKind) -> Result<Domain> {
    match kind {
        DomainKind::HalfPlane { .. }
        | DomainKind::Strip { .. }
        | DomainKind::HalfStrip { .. }
        | DomainKind::SpiralSector { .. }
        | DomainKind::Disk { .. } => Domain::new(kind),
        _ => Err(Error::param("not a canonical domain kind")),
    }
}

impl Domain {
    /// `Σ_n = {Re w > -2^n, |Im w| < 1/n}`.
    pub fn sigma_half_strip(n: u32) -> Result<Domain> {
        if n == 0 || n > MAX_SLIT_PAIRS {
            return Err(Error::param("half-strip index out of range"));
        }
        Domain::half_strip(-(2f64.powi(n as i32)), 1.0 / n as f64)
    }

    /// Half-plane `{Re w > x}`.
    pub fn right_of(x: f64) -> Domain {
        Domain::half_plane(0.0, x).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example1_membership_and_distance() {
        let d = example1_domain(10).unwrap();
        assert!(d.contains(c(-6.0, 0.0)));
        assert!(!d.contains(c(-6.0, 0.5)));
        assert!(!d.contains(c(-2000.0, 0.1)));
        assert!(d.contains(c(1.0, 0.0)));
        assert_eq!(d.boundary_distance(c(0.0, 0.0)).unwrap(), 2.0);
        assert_eq!(d.boundary_distance(c(-6.0, 0.0)).unwrap(), 0.5);
        assert!(example1_domain(61).is_err());
        assert_eq!(d.truncation(), Some(10));
    }

    #[test]
    fn channel_examples() {
        let e2 = example2_domain();
        let x = -(2f64.exp());
        assert!(e2.contains(c(x, 0.4)));
        assert!(!e2.contains(c(x, 0.6)));
        let t = 4f64.exp();
        let d = e2.boundary_distance(c(-t, 0.0)).unwrap();
        assert!((d - 0.25).abs() < 1e-3, "{d}");
        assert!(d <= 0.25);
        let e3 = example3_domain();
        assert!(e3.contains(c(-t, -0.9)));
        assert!(e3.contains(c(-1e6, -0.5)));
        assert!(e2.contains(c(-1.0, 5.0)));
        assert!(e2.contains(c(-1.0 - 1e-9, 5.0)));
        assert!(!e2.contains(c(-1.5, 5.0)));
    }

    #[test]
    fn channel_distance_near_splice() {
        let e = exp_channel_domain();
        let w = c(-1.5, 0.0);
        let d = e.boundary_distance(w).unwrap();
        assert!(d > 0.0 && d <= (-1.5f64).exp());
        let right = e.boundary_distance(c(0.0, 3.0)).unwrap();
        let ray = 1.0;
        assert!((right - ray).abs() < 1e-9, "{right}");
    }

    #[test]
    fn positive_direction_and_spirallike() {
        assert!(example1_domain(10).unwrap().is_convex_positive_direction(100));
        assert!(Domain::strip(1.0, 0.0).unwrap().is_convex_positive_direction(100));
        assert!(!Domain::unit_disk().is_convex_positive_direction(100));
        let disk = Domain::unit_disk();
        assert!(disk.is_spirallike(c(1.0, 0.0), 100).unwrap());
        assert!(disk.is_spirallike(c(1.0, 1.0), 100).unwrap());
        let strip = Domain::strip(1.0, 0.0).unwrap();
        assert!(strip.is_spirallike(c(1.0, 0.0), 100).unwrap());
        assert!(!strip.is_spirallike(c(1.0, 1.0), 100).unwrap());
        assert!(!Domain::strip(1.0, 2.0).unwrap().is_spirallike(c(1.0, 0.0), 100).unwrap());
        assert!(disk.is_spirallike(c(-1.0, 0.0), 10).is_err());
    }

    #[test]
    fn exact_maps_match_densities() {
        let doms = [
            Domain::right_half_plane(),
            Domain::strip(1.0, 0.5).unwrap(),
            Domain::half_strip(-3.0, 0.5).unwrap(),
            Domain::spiral_sector(c(1.0, 1.0), 1.0).unwrap(),
            Domain::disk(c(0.5, 0.5), 2.0).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in &doms {
            let m = d.exact_map().unwrap();
            for w in d.sample_points(&mut rng, 50) {
                let (v, dv) = m.eval_with_derivative(w).unwrap();
                assert!(v.norm() < 1.0, "{d:?} {w} {v}");
                if v.norm() > 0.999 {
                    continue;
                }
                let pull = dv.norm() / hypgeo::one_minus_abs2(v);
                let exact = d.exact_density(w).unwrap();
                assert!((pull - exact).abs() < 1e-9 * exact, "{d:?} {w} {pull} {exact}");
            }
        }
    }

    #[test]
    fn spiral_sector_distance_is_bounded_by_geometry() {
        let d = Domain::spiral_sector(c(1.0, 0.5), 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for w in d.sample_points(&mut rng, 20) {
            let r = d.boundary_distance(w).unwrap();
            assert!(r > 0.0 && r <= w.norm());
            let dens = d.exact_density(w).unwrap();
            assert!(dens >= 0.25 / r * (1.0 - 1e-9) && dens <= 1.0 / r * (1.0 + 1e-9));
        }
    }

    #[test]
    fn serde_roundtrip() {
        let d = example1_domain(3).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        let back: Domain = serde_json::from_str(&s).unwrap();
        assert_eq!(d, back);
        assert!(serde_json::from_str::<Domain>(r#"{"kind":"strip","half_width":-1,"center":0}"#).is_err());
    }

    #[test]
    fn sigma_containment() {
        let d = example1_domain(40).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [4, 8, 16] {
            let s = Domain::sigma_half_strip(n).unwrap();
            assert!(s.sample_points(&mut rng, 500).iter().all(|w| d.contains(*w)));
        }
    }
}
