//! Composable conformal-map expressions with analytic derivatives and
//! primitive-by-primitive inverses.

pub mod channel;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domains::Domain;
use crate::error::{Error, Result};
use crate::ext::ExtComplex;
pub use channel::{Atom, StripChannel, StripChannelSpec};

/// Distance below which a point counts as lying on a branch cut.
pub const BRANCH_CUT_TOL: f64 = 1e-13;
/// Roundtrip tolerance of [`MapExpr::invert`].
pub const INVERT_TOL: f64 = 1e-10;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// One link of a map chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Primitive {
    /// `(a z + b) / (c z + d)`.
    Mobius {
        a: Complex64,
        b: Complex64,
        c: Complex64,
        d: Complex64,
    },
    /// `a z + b`.
    Affine { a: Complex64, b: Complex64 },
    /// `e^z`; inverses land in `center - π < Im < center + π`.
    Exp {
        #[serde(default)]
        center: f64,
    },
    /// Logarithm with arguments in `(branch - π, branch + π]`.
    Log {
        #[serde(default)]
        branch: f64,
    },
    /// `z^p` on the same branch convention as `Log`.
    Power {
        p: f64,
        #[serde(default)]
        branch: f64,
    },
    /// Logarithm lifted into the oblique strip
    /// `center - π < Im ζ - (Im μ / Re μ) Re ζ ≤ center + π`; its cut is a
    /// logarithmic spiral.
    SpiralLog { mu: Complex64, center: f64 },
    Sin,
    Tanh,
    /// Strip `|Im ζ| < π/2` onto a channel, see [`StripChannel`].
    StripChannel(Arc<StripChannel>),
}

/// Wraps `theta` into `(center - π, center + π]`.
pub fn wrap_angle(theta: f64, center: f64) -> f64 {
    let mut t = theta;
    while t - center > PI {
        t -= 2.0 * PI;
    }
    while t - center <= -PI {
        t += 2.0 * PI;
    }
    t
}

fn spiral_log(z: Complex64, mu: Complex64, center: f64) -> Result<Complex64> {
    let r = z.norm();
    if r == 0.0 {
        return Err(Error::Evaluation("logarithm at 0".into()));
    }
    let lr = r.ln();
    let shear = mu.im / mu.re;
    let window = center + shear * lr;
    let theta = wrap_angle(z.arg(), window);
    let off = (theta - window).abs();
    if off > PI / 2.0 && r * (PI - off).sin() < BRANCH_CUT_TOL {
        return Err(Error::Evaluation(format!("{z} lies on the spiral branch cut")));
    }
    Ok(c(lr, theta))
}

fn branch_log(z: Complex64, branch: f64) -> Result<Complex64> {
    let r = z.norm();
    if r == 0.0 {
        return Err(Error::Evaluation("logarithm at 0".into()));
    }
    let theta = wrap_angle(z.arg(), branch);
    let off = (theta - branch).abs();
    let cut_distance = if off > PI / 2.0 { r * (PI - off).sin() } else { r };
    if cut_distance < BRANCH_CUT_TOL {
        return Err(Error::Evaluation(format!(
            "{z} lies on the branch cut at angle {}",
            branch + PI
        )));
    }
    Ok(c(r.ln(), theta))
}

impl Primitive {
    pub fn mobius(a: Complex64, b: Complex64, cc: Complex64, d: Complex64) -> Result<Self> {
        if (a * d - b * cc).norm() < 1e-300 {
            return Err(Error::param("degenerate Möbius coefficients (ad - bc = 0)"));
        }
        Ok(Primitive::Mobius { a, b, c: cc, d })
    }

    pub fn affine(a: Complex64, b: Complex64) -> Result<Self> {
        if a.norm() == 0.0 {
            return Err(Error::param("affine map with zero slope"));
        }
        Ok(Primitive::Affine { a, b })
    }

    /// `(1 + z) / (1 - z)`, disk onto the right half-plane.
    pub fn cayley() -> Self {
        Primitive::Mobius {
            a: c(1.0, 0.0),
            b: c(1.0, 0.0),
            c: c(-1.0, 0.0),
            d: c(1.0, 0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Primitive::Mobius { a, b, c, d } => {
                if (a * d - b * c).norm() < 1e-300 {
                    return Err(Error::param("degenerate Möbius coefficients (ad - bc = 0)"));
                }
            }
            Primitive::Affine { a, .. } => {
                if a.norm() == 0.0 {
                    return Err(Error::param("affine map with zero slope"));
                }
            }
            Primitive::SpiralLog { mu, .. } => {
                if !(mu.re > 0.0) {
                    return Err(Error::param("spiral logarithm needs Re μ > 0"));
                }
            }
            Primitive::Power { p, .. } => {
                if *p == 0.0 || !p.is_finite() {
                    return Err(Error::param("power exponent must be finite and nonzero"));
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let v = match self {
            Primitive::Mobius { a, b, c, d } => {
                let den = c * z + d;
                if den.norm() < 1e-300 {
                    return Err(Error::Evaluation(format!("Möbius pole at {z}")));
                }
                (a * z + b) / den
            }
            Primitive::Affine { a, b } => a * z + b,
            Primitive::Exp { .. } => z.exp(),
            Primitive::Log { branch } => branch_log(z, *branch)?,
            Primitive::Power { p, branch } => (branch_log(z, *branch)? * *p).exp(),
            Primitive::SpiralLog { mu, center } => spiral_log(z, *mu, *center)?,
            Primitive::Sin => z.sin(),
            Primitive::Tanh => {
                let ch = z.cosh();
                if ch.norm() < 1e-300 {
                    return Err(Error::Evaluation(format!("tanh pole at {z}")));
                }
                z.tanh()
            }
            Primitive::StripChannel(m) => m.eval_raw(z)?,
        };
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Evaluation(format!("non-finite image of {z}")));
        }
        Ok(v)
    }

    pub fn deriv(&self, z: Complex64) -> Result<Complex64> {
        Ok(match self {
            Primitive::Mobius { a, b, c, d } => {
                let den = c * z + d;
                (a * d - b * c) / (den * den)
            }
            Primitive::Affine { a, .. } => *a,
            Primitive::Exp { .. } => z.exp(),
            Primitive::Log { branch } => {
                branch_log(z, *branch)?;
                1.0 / z
            }
            Primitive::Power { p, branch } => {
                let l = branch_log(z, *branch)?;
                *p * (l * (*p - 1.0)).exp()
            }
            Primitive::SpiralLog { mu, center } => {
                spiral_log(z, *mu, *center)?;
                1.0 / z
            }
            Primitive::Sin => z.cos(),
            Primitive::Tanh => {
                let t = z.tanh();
                1.0 - t * t
            }
            Primitive::StripChannel(m) => m.derivative_raw(z),
        })
    }

    /// Preimage of `w`; `seed` selects the branch where the inverse is multivalued.
    pub fn inverse(&self, w: Complex64, seed: Option<Complex64>) -> Result<Complex64> {
        Ok(match self {
            Primitive::Mobius { a, b, c, d } => {
                let den = -c * w + a;
                if den.norm() < 1e-300 {
                    return Err(Error::Domain(format!("{w} is the omitted value of a Möbius map")));
                }
                (d * w - b) / den
            }
            Primitive::Affine { a, b } => (w - b) / a,
            Primitive::Exp { center } => {
                if w.norm() == 0.0 {
                    return Err(Error::Domain("0 is not a value of exp".into()));
                }
                let center = seed.map(|s| s.im).unwrap_or(*center);
                c(w.norm().ln(), wrap_angle(w.arg(), center))
            }
            Primitive::Log { branch } => {
                if (w.im - branch).abs() > PI + 1e-15 {
                    return Err(Error::Domain(format!(
                        "{w} lies outside the image of the logarithm branch centred at {branch}"
                    )));
                }
                w.exp()
            }
            Primitive::Power { p, branch } => {
                if w.norm() == 0.0 {
                    return Ok(c(0.0, 0.0));
                }
                let center = match seed {
                    Some(s) if s.norm() > 0.0 => p * wrap_angle(s.arg(), *branch),
                    _ => p * branch,
                };
                let theta = wrap_angle(w.arg(), center) / p;
                if (theta - branch).abs() > PI + 1e-15 {
                    return Err(Error::Domain(format!(
                        "{w} lies outside the image of the power branch"
                    )));
                }
                Complex64::from_polar(w.norm().powf(1.0 / p), theta)
            }
            Primitive::SpiralLog { mu, center } => {
                let s = w.im - mu.im / mu.re * w.re;
                if (s - center).abs() > PI + 1e-15 {
                    return Err(Error::Domain(format!(
                        "{w} lies outside the image of the spiral logarithm"
                    )));
                }
                w.exp()
            }
            Primitive::Sin => w.asin(),
            Primitive::Tanh => {
                if (w - 1.0).norm() == 0.0 || (w + 1.0).norm() == 0.0 {
                    return Err(Error::Domain("±1 are not values of tanh".into()));
                }
                w.atanh()
            }
            Primitive::StripChannel(m) => m.invert_raw(w, seed)?,
        })
    }

    /// Derivative of the inverse at `w`, given the preimage `z`; uses
    /// output-side formulas where they are better conditioned.
    pub fn inverse_deriv(&self, w: Complex64, z: Complex64) -> Result<Complex64> {
        Ok(match self {
            Primitive::Mobius { a, b, c, d } => {
                let den = -c * w + a;
                (a * d - b * c) / (den * den)
            }
            Primitive::Affine { a, .. } => 1.0 / a,
            Primitive::Exp { .. } => 1.0 / w,
            Primitive::Log { .. } | Primitive::SpiralLog { .. } => z,
            Primitive::Power { p, .. } => z / (w * *p),
            _ => 1.0 / self.deriv(z)?,
        })
    }

    /// The primitive realizing the inverse map, where it exists in closed form.
    pub fn inverse_primitive(&self) -> Option<Primitive> {
        match self {
            Primitive::Mobius { a, b, c, d } => Some(Primitive::Mobius {
                a: *d,
                b: -b,
                c: -c,
                d: *a,
            }),
            Primitive::Affine { a, b } => Some(Primitive::Affine {
                a: 1.0 / a,
                b: -b / a,
            }),
            Primitive::Exp { center } => Some(Primitive::Log { branch: *center }),
            Primitive::Log { branch } => Some(Primitive::Exp { center: *branch }),
            Primitive::Power { p, branch } => Some(Primitive::Power {
                p: 1.0 / p,
                branch: p * branch,
            }),
            _ => None,
        }
    }

    fn as_mobius(&self) -> Option<[Complex64; 4]> {
        match self {
            Primitive::Mobius { a, b, c, d } => Some([*a, *b, *c, *d]),
            Primitive::Affine { a, b } => Some([*a, *b, c(0.0, 0.0), c(1.0, 0.0)]),
            _ => None,
        }
    }

    /// Evaluation on extended-exponent numbers.
    pub fn eval_ext(&self, z: ExtComplex) -> Result<ExtComplex> {
        match self {
            Primitive::Mobius { .. } | Primitive::Affine { .. } => {
                let [a, b, cc, d] = self.as_mobius().unwrap();
                let num = z.scale(a).add(&ExtComplex::from_complex(b));
                let den = z.scale(cc).add(&ExtComplex::from_complex(d));
                if den.is_zero() {
                    return Err(Error::Evaluation("Möbius pole in extended evaluation".into()));
                }
                Ok(num.div(&den))
            }
            Primitive::Exp { .. } => {
                let v = z.to_complex();
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::Evaluation("exp of an out-of-range argument".into()));
                }
                Ok(ExtComplex::exp(v))
            }
            Primitive::Log { branch } => {
                if z.is_zero() {
                    return Err(Error::Evaluation("logarithm at 0".into()));
                }
                Ok(ExtComplex::from_complex(c(z.ln_abs(), wrap_angle(z.arg(), *branch))))
            }
            Primitive::Power { p, branch } => Ok(z.powf(*p, *branch)),
            Primitive::SpiralLog { mu, center } => {
                if z.is_zero() {
                    return Err(Error::Evaluation("logarithm at 0".into()));
                }
                let lr = z.ln_abs();
                let window = center + mu.im / mu.re * lr;
                Ok(ExtComplex::from_complex(c(lr, wrap_angle(z.arg(), window))))
            }
            _ => {
                let v = z.to_complex();
                if !(v.re.is_finite() && v.im.is_finite()) || (v.norm() == 0.0 && !z.is_zero()) {
                    return Err(Error::Unsupported(
                        "extended-range evaluation of this primitive".into(),
                    ));
                }
                Ok(ExtComplex::from_complex(self.eval(v)?))
            }
        }
    }
}

/// Merges runs of Möbius/affine links into single Möbius links.
pub fn fuse_chain(chain: &[Primitive]) -> Vec<Primitive> {
    let mut out: Vec<Primitive> = Vec::with_capacity(chain.len());
    for p in chain {
        if let (Some(m2), Some(last)) = (p.as_mobius(), out.last().and_then(|q| q.as_mobius())) {
            let [a1, b1, c1, d1] = last;
            let [a2, b2, c2, d2] = m2;
            let fused = [
                a2 * a1 + b2 * c1,
                a2 * b1 + b2 * d1,
                c2 * a1 + d2 * c1,
                c2 * b1 + d2 * d1,
            ];
            let n = fused.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let [a, b, cc, d] = fused.map(|v| v / n);
            *out.last_mut().unwrap() = Primitive::Mobius { a, b, c: cc, d };
        } else {
            out.push(p.clone());
        }
    }
    out
}

/// Evaluates a chain in extended range after fusing Möbius runs.
pub fn eval_chain_ext(chain: &[Primitive], z: ExtComplex) -> Result<ExtComplex> {
    fuse_chain(chain)
        .iter()
        .try_fold(z, |acc, p| p.eval_ext(acc))
}

/// A conformal map given as a chain of primitives applied left to right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapExpr {
    pub chain: Vec<Primitive>,
    #[serde(default = "Domain::unit_disk")]
    pub source: Domain,
    #[serde(default = "Domain::plane")]
    pub target: Domain,
}

impl MapExpr {
    pub fn new(chain: Vec<Primitive>, source: Domain, target: Domain) -> Result<Self> {
        for p in &chain {
            p.validate()?;
        }
        Ok(MapExpr {
            chain,
            source,
            target,
        })
    }

    pub fn identity(domain: Domain) -> Self {
        MapExpr {
            chain: Vec::new(),
            source: domain.clone(),
            target: domain,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.chain.is_empty()
    }

    /// Image without the source-membership check.
    pub fn eval_unchecked(&self, z: Complex64) -> Result<Complex64> {
        self.chain.iter().try_fold(z, |acc, p| p.eval(acc))
    }

    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        if !self.source.contains(z) {
            return Err(Error::Domain(format!("{z} is outside the map source")));
        }
        self.eval_unchecked(z)
    }

    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        if !self.source.contains(z) {
            return Err(Error::Domain(format!("{z} is outside the map source")));
        }
        self.derivative_unchecked(z)
    }

    pub fn derivative_unchecked(&self, z: Complex64) -> Result<Complex64> {
        let mut x = z;
        let mut d = c(1.0, 0.0);
        for p in &self.chain {
            d *= p.deriv(x)?;
            x = p.eval(x)?;
        }
        Ok(d)
    }

    /// Image and derivative in one pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let mut x = z;
        let mut d = c(1.0, 0.0);
        for p in &self.chain {
            d *= p.deriv(x)?;
            x = p.eval(x)?;
        }
        Ok((x, d))
    }

    fn intermediate_seeds(&self, seed: Option<Complex64>) -> Vec<Option<Complex64>> {
        let mut seeds = Vec::with_capacity(self.chain.len());
        let mut cur = seed;
        for p in &self.chain {
            seeds.push(cur);
            cur = cur.and_then(|s| p.eval(s).ok());
        }
        seeds
    }

    /// Preimage of `w` without the target-membership check, together with the
    /// derivative of the inverse at `w`.
    pub fn invert_with_derivative(
        &self,
        w: Complex64,
        seed: Option<Complex64>,
    ) -> Result<(Complex64, Complex64)> {
        let seeds = self.intermediate_seeds(seed);
        let mut x = w;
        let mut d = c(1.0, 0.0);
        for (p, s) in self.chain.iter().zip(seeds).rev() {
            let z = p.inverse(x, s)?;
            d *= p.inverse_deriv(x, z)?;
            x = z;
        }
        if !(x.re.is_finite() && x.im.is_finite()) {
            return Err(Error::Inversion {
                message: format!("non-finite preimage of {w}"),
                residual: f64::INFINITY,
            });
        }
        Ok((x, d))
    }

    fn residual_ok(&self, z: Complex64, w: Complex64) -> Result<bool> {
        let (v, d) = self.eval_with_derivative(z)?;
        let tol = INVERT_TOL * w.norm().max(1.0) + 64.0 * f64::EPSILON * d.norm() * z.norm().max(1.0);
        Ok((v - w).norm() <= tol)
    }

    /// Preimage of `w` with a roundtrip check; falls back to damped Newton
    /// iteration from `seed` when the closed-form branch misses.
    pub fn invert(&self, w: Complex64, seed: Option<Complex64>) -> Result<Complex64> {
        if !self.target.contains(w) {
            return Err(Error::Domain(format!("{w} is outside the map target")));
        }
        match self.invert_with_derivative(w, seed) {
            Ok((z, _)) if self.source.contains(z) && self.residual_ok(z, w).unwrap_or(false) => Ok(z),
            Ok((z, _)) => self.newton(w, seed.unwrap_or(z)),
            Err(e) => match seed {
                Some(s) => self.newton(w, s),
                None => Err(e),
            },
        }
    }

    /// Newton iteration on `evaluate(x) - w` with step halving.
    pub fn newton(&self, w: Complex64, seed: Complex64) -> Result<Complex64> {
        let mut z = seed;
        let mut r = match self.evaluate(z) {
            Ok(v) => (v - w).norm(),
            Err(e) => {
                return Err(Error::Inversion {
                    message: format!("Newton seed rejected: {e}"),
                    residual: f64::INFINITY,
                })
            }
        };
        for _ in 0..100 {
            if self.residual_ok(z, w).unwrap_or(false) {
                return Ok(z);
            }
            let (v, d) = self.eval_with_derivative(z)?;
            let step = (v - w) / d;
            let mut lambda = 1.0;
            let mut moved = false;
            for _ in 0..20 {
                let cand = z - step * lambda;
                if let Ok(vc) = self.evaluate(cand) {
                    let rc = (vc - w).norm();
                    if rc < r {
                        z = cand;
                        r = rc;
                        moved = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !moved {
                break;
            }
        }
        if self.residual_ok(z, w).unwrap_or(false) {
            Ok(z)
        } else {
            Err(Error::Inversion {
                message: format!("Newton iteration did not converge for {w}"),
                residual: r,
            })
        }
    }

    /// Inverse chain, when every link has a closed-form inverse primitive.
    pub fn inverse_chain(&self) -> Option<Vec<Primitive>> {
        self.chain.iter().rev().map(|p| p.inverse_primitive()).collect()
    }

    /// `outer ∘ inner`, validated on sampled points of `inner.source`: images
    /// must land in `outer.source` and the composite must not jump across a
    /// branch cut along segments between samples.
    pub fn compose(outer: &MapExpr, inner: &MapExpr) -> Result<MapExpr> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c0de);
        let samples = inner.source.sample_points(&mut rng, 100);
        for z in &samples {
            let v = inner.eval_unchecked(*z)?;
            if !outer.source.contains(v) {
                return Err(Error::Composition(format!(
                    "inner image {v} of {z} is outside the outer source"
                )));
            }
        }
        let mut chain = inner.chain.clone();
        chain.extend(outer.chain.iter().cloned());
        let composed = MapExpr {
            chain,
            source: inner.source.clone(),
            target: outer.target.clone(),
        };
        for pair in samples.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let inside = (1..8).all(|k| inner.source.contains(a + (b - a) * (k as f64 / 8.0)));
            if inside {
                composed.check_path_continuity(a, b, 64)?;
            }
        }
        Ok(composed)
    }

    fn check_path_continuity(&self, a: Complex64, b: Complex64, n: usize) -> Result<()> {
        let step = (b - a) / n as f64;
        let (mut prev, mut dprev) = self.eval_with_derivative(a)?;
        for k in 1..=n {
            let x = a + step * k as f64;
            let (v, d) = self.eval_with_derivative(x)?;
            let allowed = 4.0 * (d.norm().max(dprev.norm())) * step.norm() + 1e-9 * (1.0 + v.norm());
            if (v - prev).norm() > allowed {
                return Err(Error::Composition(format!(
                    "composite jumps between {} and {x}: branch cut crossed",
                    x - step
                )));
            }
            prev = v;
            dprev = d;
        }
        Ok(())
    }
}
