use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{par, Complex64, Error, Result};

/// Logarithmic spiral `t ↦ w0·e^{(α+iβ)t}`, `t ∈ ℝ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpiralSpec {
    pub w0: Complex64,
    pub alpha: f64,
    pub beta: f64,
}

impl SpiralSpec {
    pub fn new(w0: Complex64, alpha: f64, beta: f64) -> Result<Self> {
        if !(w0.norm() > 0.0) || !w0.re.is_finite() || !w0.im.is_finite() {
            return Err(Error::param("spiral base point must be nonzero and finite"));
        }
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::param("spiral exponents must be finite"));
        }
        Ok(SpiralSpec { w0, alpha, beta })
    }

    pub fn point(&self, t: f64) -> Complex64 {
        self.w0 * (Complex64::new(self.alpha, self.beta) * t).exp()
    }

    /// `2√(α²+β²)/|α|`; `2π` for the circle `α = 0`.
    pub fn bound(&self) -> f64 {
        if self.alpha == 0.0 {
            2.0 * PI
        } else {
            2.0 * self.alpha.hypot(self.beta) / self.alpha.abs()
        }
    }

    /// Point of the trace at modulus `ρ`.
    fn at_modulus(&self, s: f64) -> Complex64 {
        let theta = self.w0.arg() + self.beta / self.alpha * (s - self.w0.norm().ln());
        Complex64::from_polar(s.exp(), theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AhlforsOptions {
    pub trials: usize,
    /// Disk radii relative to the modulus of the disk center's trace point.
    pub radius_range: (f64, f64),
    pub seed: u64,
}

impl Default for AhlforsOptions {
    fn default() -> Self {
        AhlforsOptions {
            trials: 1000,
            radius_range: (1e-3, 10.0),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AhlforsReport {
    pub spec: SpiralSpec,
    pub measured_sup: f64,
    pub bound: f64,
    pub pass: bool,
    pub trials: usize,
    /// The circle case, where the verdict is immediate.
    pub trivial: bool,
}

/// Length of the trace inside `Δ(c, r)`.
///
/// Along the trace `ds = (|α+iβ|/|α|)·dρ` with `ρ = |γ|`, so the length is that
/// factor times the measure of moduli whose trace point lies in the disk.
fn length_in_disk(spec: &SpiralSpec, center: Complex64, r: f64) -> f64 {
    if spec.alpha == 0.0 {
        return circle_arc_in_disk(spec.w0.norm(), center, r);
    }
    let factor = Complex64::new(spec.alpha, spec.beta).norm() / spec.alpha.abs();
    let cn = center.norm();
    let rho_hi = cn + r;
    let mut measure = 0.0;
    let mut rho_lo = cn - r;
    if rho_lo <= 0.0 {
        // Every circle |w| = ρ with ρ ≤ r - |c| lies in the disk.
        measure += -rho_lo;
        rho_lo = -rho_lo;
    }
    rho_lo = rho_lo.max(1e-12 * rho_hi);
    if rho_hi <= rho_lo {
        return factor * measure;
    }
    let inside = |s: f64| (spec.at_modulus(s) - center).norm_sqr() - r * r;
    let ds = if spec.beta == 0.0 {
        0.01
    } else {
        (0.05 * (spec.alpha / spec.beta).abs()).min(0.01)
    };
    let (s0, s1) = (rho_lo.ln(), rho_hi.ln());
    let n = ((s1 - s0) / ds).ceil().max(1.0) as usize;
    let mut a = s0;
    let mut fa = inside(a);
    for k in 1..=n {
        let b = if k == n { s1 } else { s0 + (s1 - s0) * k as f64 / n as f64 };
        let fb = inside(b);
        match (fa < 0.0, fb < 0.0) {
            (true, true) => measure += b.exp() - a.exp(),
            (true, false) => measure += bisect(&inside, a, b).exp() - a.exp(),
            (false, true) => measure += b.exp() - bisect(&inside, a, b).exp(),
            (false, false) => {}
        }
        a = b;
        fa = fb;
    }
    factor * measure
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let fa_neg = f(a) < 0.0;
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        if (f(m) < 0.0) == fa_neg {
            a = m;
        } else {
            b = m;
        }
        if b - a <= 1e-15 * a.abs().max(1.0) {
            break;
        }
    }
    0.5 * (a + b)
}

/// Arc of `|w| = R` inside `Δ(c, r)`.
fn circle_arc_in_disk(radius: f64, center: Complex64, r: f64) -> f64 {
    let d = center.norm();
    if d + radius <= r {
        return 2.0 * PI * radius;
    }
    if radius + r <= d || radius >= d + r || d == 0.0 {
        return 0.0;
    }
    let cos_half = ((radius * radius + d * d - r * r) / (2.0 * radius * d)).clamp(-1.0, 1.0);
    2.0 * radius * cos_half.acos()
}

/// Sup over random disks of `ℓ(trace ∩ Δ)/r`, against the spiral's bound.
pub fn ahlfors_audit(spec: &SpiralSpec, opts: &AhlforsOptions) -> Result<AhlforsReport> {
    let (rmin, rmax) = opts.radius_range;
    if !(rmin > 0.0 && rmax >= rmin) {
        return Err(Error::param("radius range must be positive and ordered"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let base = spec.w0.norm().ln();
    let disks: Vec<(Complex64, f64)> = (0..opts.trials)
        .map(|k| {
            let s = base + rng.gen_range(-5.0..5.0);
            let p = if spec.alpha == 0.0 {
                spec.w0 * Complex64::from_polar(1.0, rng.gen_range(-PI..PI))
            } else {
                spec.at_modulus(s)
            };
            let u = Complex64::from_polar(0.5 * rng.gen::<f64>().sqrt(), rng.gen_range(-PI..PI));
            let center = match k % 10 {
                0 => Complex64::new(0.0, 0.0),
                1..=3 => p,
                _ => p * (1.0 + u),
            };
            let r = p.norm() * 10f64.powf(rng.gen_range(rmin.log10()..=rmax.log10()));
            (center, r)
        })
        .collect();
    let ratios = par::map(&disks, |&(c, r)| length_in_disk(spec, c, r) / r);
    let measured_sup = ratios.into_iter().fold(0.0, f64::max);
    let bound = spec.bound();
    Ok(AhlforsReport {
        spec: *spec,
        measured_sup,
        bound,
        pass: measured_sup <= bound * (1.0 + 1e-3),
        trials: opts.trials,
        trivial: spec.alpha == 0.0,
    })
}
