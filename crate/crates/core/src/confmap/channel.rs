//! Conformal maps of the strip `|Im ζ| < π/2` whose derivative is a product
//! `F'(ζ) = scale · Π (1 + e^{ζ - a_j})^{c_j}` with `c_j ≥ 0`, `Σ c_j = 1`.
//!
//! On the strip `|arg F' - Im ζ| ≤ π/2`, so `F` is univalent and its image is
//! convex in the positive direction. The image is a channel of half-width
//! `scale · π/2` far to the left that opens like `e^ζ` to the right.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

const HALF_PI: f64 = std::f64::consts::FRAC_PI_2;
/// Spacing of the precomputed anchors along the real direction.
const ANCHOR_STEP: f64 = 0.125;
/// Number of anchor rows between the real axis and the upper edge.
const ROWS: usize = 8;
/// Margin beyond the extreme atoms where the asymptotic forms take over.
const TAIL_MARGIN: f64 = 40.0;
/// Edge height beyond which the real part of the edge is not resolved.
const EDGE_RE_TRUST: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub a: f64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StripChannelSpec {
    pub scale: f64,
    pub atoms: Vec<Atom>,
}

/// Strip-to-channel map with precomputed anchor tables.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "StripChannelSpec", into = "StripChannelSpec")]
pub struct StripChannel {
    scale: f64,
    atoms: Vec<Atom>,
    lo: f64,
    hi: f64,
    /// `F` on the real anchors `lo + k·ANCHOR_STEP`.
    real_anchors: Vec<f64>,
    /// `F` on the upper edge `lo + k·ANCHOR_STEP + iπ/2`.
    edge_anchors: Vec<Complex64>,
    /// `F` at `lo + k·ANCHOR_STEP + i·j·π/(2·ROWS)`, row-major in `j`.
    grid: Vec<Vec<Complex64>>,
    /// `(e^{a_j}, e^{-a_j})` per atom.
    atom_exp: Vec<(f64, f64)>,
    /// Last edge anchor whose real part is trusted to increase.
    edge_re_end: usize,
    /// `scale · e^{-Σ c_j a_j}`, the coefficient of `e^ζ` far right.
    right_k: f64,
    /// `Σ c_j e^{a_j}`, the drift coefficient far right.
    right_b: f64,
}

impl PartialEq for StripChannel {
    fn eq(&self, other: &Self) -> bool {
        self.scale == other.scale && self.atoms == other.atoms
    }
}

impl From<StripChannel> for StripChannelSpec {
    fn from(m: StripChannel) -> Self {
        StripChannelSpec {
            scale: m.scale,
            atoms: m.atoms,
        }
    }
}

impl TryFrom<StripChannelSpec> for StripChannel {
    type Error = Error;

    fn try_from(s: StripChannelSpec) -> Result<Self> {
        StripChannel::new(s.scale, s.atoms)
    }
}

/// `ln(1 + e^v)` on `|Im v| ≤ π/2`, principal branch, overflow free.
fn ln1p_exp(v: Complex64) -> Complex64 {
    if v.re > 0.0 {
        v + ln1p((-v).exp())
    } else {
        ln1p(v.exp())
    }
}

fn ln1p(x: Complex64) -> Complex64 {
    if x.norm() < 1e-5 {
        x - x * x / 2.0 + x * x * x / 3.0
    } else {
        (1.0 + x).ln()
    }
}

impl StripChannel {
    pub fn new(scale: f64, mut atoms: Vec<Atom>) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::param("strip channel scale must be positive"));
        }
        if atoms.is_empty() {
            return Err(Error::param("strip channel needs at least one atom"));
        }
        if atoms.iter().any(|t| !(t.c >= 0.0) || !t.a.is_finite()) {
            return Err(Error::param("strip channel weights must be nonnegative"));
        }
        let total: f64 = atoms.iter().map(|t| t.c).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::param(format!(
                "strip channel weights must sum to 1 (got {total})"
            )));
        }
        atoms.retain(|t| t.c > 0.0);
        let amin = atoms.iter().map(|t| t.a).fold(f64::INFINITY, f64::min);
        let amax = atoms.iter().map(|t| t.a).fold(f64::NEG_INFINITY, f64::max);
        let lo = ((amin - TAIL_MARGIN).min(-1.0) / ANCHOR_STEP).floor() * ANCHOR_STEP;
        let hi = ((amax + TAIL_MARGIN).max(1.0) / ANCHOR_STEP).ceil() * ANCHOR_STEP;
        let right_k = scale * (-atoms.iter().map(|t| t.c * t.a).sum::<f64>()).exp();
        let right_b = atoms.iter().map(|t| t.c * t.a.exp()).sum();
        let mut m = StripChannel {
            scale,
            atoms,
            lo,
            hi,
            real_anchors: Vec::new(),
            edge_anchors: Vec::new(),
            grid: Vec::new(),
            atom_exp: Vec::new(),
            edge_re_end: 0,
            right_k,
            right_b,
        };
        m.atom_exp = m.atoms.iter().map(|t| (t.a.exp(), (-t.a).exp())).collect();
        m.build_anchors();
        Ok(m)
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Half-width of the image far to the left.
    pub fn far_half_width(&self) -> f64 {
        self.scale * HALF_PI
    }

    fn n_anchors(&self) -> usize {
        ((self.hi - self.lo) / ANCHOR_STEP).round() as usize + 1
    }

    fn anchor(&self, k: usize) -> f64 {
        self.lo + k as f64 * ANCHOR_STEP
    }

    fn build_anchors(&mut self) {
        let n = self.n_anchors();
        let mut real = vec![0.0; n];
        let k0 = ((0.0 - self.lo) / ANCHOR_STEP).round() as usize;
        for k in k0 + 1..n {
            let seg = self.segment(
                Complex64::new(self.anchor(k - 1), 0.0),
                Complex64::new(self.anchor(k), 0.0),
                8,
            );
            real[k] = real[k - 1] + seg.re;
        }
        for k in (0..k0).rev() {
            let seg = self.segment(
                Complex64::new(self.anchor(k + 1), 0.0),
                Complex64::new(self.anchor(k), 0.0),
                8,
            );
            real[k] = real[k + 1] + seg.re;
        }
        let top = Complex64::new(0.0, HALF_PI);
        let mut edge = vec![Complex64::new(0.0, 0.0); n];
        let base = Complex64::new(real[0], 0.0) + self.segment(Complex64::new(self.lo, 0.0), Complex64::new(self.lo, 0.0) + top, 16);
        edge[0] = base;
        for k in 1..n {
            let a = Complex64::new(self.anchor(k - 1), 0.0) + top;
            let b = Complex64::new(self.anchor(k), 0.0) + top;
            edge[k] = edge[k - 1] + self.segment(a, b, 8);
        }
        let dy = HALF_PI / ROWS as f64;
        let mut grid = vec![real.iter().map(|&v| Complex64::new(v, 0.0)).collect::<Vec<_>>()];
        for j in 1..ROWS {
            let prev = &grid[j - 1];
            let row = (0..n)
                .map(|k| {
                    let a = Complex64::new(self.anchor(k), (j - 1) as f64 * dy);
                    prev[k] + self.segment(a, a + Complex64::new(0.0, dy), 8)
                })
                .collect();
            grid.push(row);
        }
        grid.push(edge.clone());
        let mut end = 0;
        while end + 1 < n && edge[end + 1].re > edge[end].re && edge[end + 1].im <= EDGE_RE_TRUST {
            end += 1;
        }
        self.edge_re_end = end;
        self.real_anchors = real;
        self.edge_anchors = edge;
        self.grid = grid;
    }

    /// `ln(F'(ζ)/scale)`.
    fn log_derivative_ratio(&self, z: Complex64) -> Complex64 {
        let (ez, emz) = (z.exp(), (-z).exp());
        let finite = |v: Complex64| v.re.is_finite() && v.im.is_finite();
        if !finite(ez) || !finite(emz) || self.atom_exp.iter().any(|e| !e.0.is_finite() || !e.1.is_finite()) {
            return self.atoms.iter().map(|t| t.c * ln1p_exp(z - t.a)).sum();
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (t, &(ea, ema)) in self.atoms.iter().zip(&self.atom_exp) {
            let term = if z.re > t.a {
                (z - t.a) + ln1p(emz * ea)
            } else {
                ln1p(ez * ema)
            };
            acc += t.c * term;
        }
        acc
    }

    pub fn derivative_raw(&self, z: Complex64) -> Complex64 {
        self.scale * self.log_derivative_ratio(z).exp()
    }

    /// Integral of `F'` along the segment `[a, b]` with an `n`-point rule.
    fn segment(&self, a: Complex64, b: Complex64, n: usize) -> Complex64 {
        let (x, w) = gauss_legendre(n);
        let mid = (a + b) * 0.5;
        let half = (b - a) * 0.5;
        let mut acc = Complex64::new(0.0, 0.0);
        for (xi, wi) in x.iter().zip(w.iter()) {
            acc += self.derivative_raw(mid + half * *xi) * *wi;
        }
        acc * half
    }

    fn in_strip(z: Complex64) -> bool {
        z.im.abs() <= HALF_PI && z.re.is_finite()
    }

    pub fn eval_raw(&self, z: Complex64) -> Result<Complex64> {
        if !Self::in_strip(z) {
            return Err(Error::Evaluation(format!(
                "strip channel evaluated outside the strip at {z}"
            )));
        }
        if z.re < self.lo {
            let lo = Complex64::new(self.lo, 0.0);
            let corr: Complex64 = self
                .atoms
                .iter()
                .map(|t| t.c * ((z - t.a).exp() - (lo - t.a).exp()))
                .sum();
            return Ok(self.real_anchors[0] + self.scale * (z - lo + corr));
        }
        if z.re > self.hi {
            let hi = Complex64::new(self.hi, 0.0);
            if z.re > 700.0 {
                return Err(Error::Evaluation(format!(
                    "strip channel argument {z} overflows"
                )));
            }
            let last = *self.real_anchors.last().unwrap();
            return Ok(last + self.right_k * (z.exp() - hi.exp() + self.right_b * (z - hi)));
        }
        let k = (((z.re - self.lo) / ANCHOR_STEP).round() as usize).min(self.n_anchors() - 1);
        let dy = HALF_PI / ROWS as f64;
        let j = ((z.im.abs() / dy).round() as usize).min(ROWS);
        let start = Complex64::new(self.anchor(k), j as f64 * dy);
        let upper = Complex64::new(z.re, z.im.abs());
        let v = self.grid[j][k] + self.segment(start, upper, 8);
        Ok(if z.im < 0.0 { v.conj() } else { v })
    }

    /// Point on the upper edge `ξ + iπ/2`.
    pub fn upper_edge(&self, xi: f64) -> Result<Complex64> {
        if xi >= self.lo && xi <= self.hi {
            let k = (((xi - self.lo) / ANCHOR_STEP).round() as usize).min(self.n_anchors() - 1);
            let start = Complex64::new(self.anchor(k), HALF_PI);
            return Ok(self.edge_anchors[k] + self.segment(start, Complex64::new(xi, HALF_PI), 8));
        }
        self.eval_raw(Complex64::new(xi, HALF_PI))
    }

    /// Edge parameter where a monotone coordinate of the upper edge reaches
    /// `target`; `coord` selects the real (`true`) or imaginary part.
    fn edge_parameter(&self, target: f64, real: bool) -> Result<f64> {
        let part = |p: Complex64| if real { p.re } else { p.im };
        let n = if real { self.edge_re_end + 1 } else { self.n_anchors() };
        if real && n < self.n_anchors() && target >= part(self.edge_anchors[n - 1]) {
            // The edge turns vertical here; further real parts are lost to rounding.
            return Ok(self.anchor(n - 1));
        }
        let (mut lo, mut hi);
        if target <= part(self.edge_anchors[0]) {
            if !real {
                return Ok(f64::NEG_INFINITY);
            }
            let guess = self.lo + (target - self.edge_anchors[0].re) / self.scale;
            lo = guess - 1.0;
            hi = self.lo;
            while self.upper_edge(lo)?.re > target {
                lo -= 2.0 * (self.lo - lo);
            }
        } else if target >= part(self.edge_anchors[n - 1]) {
            lo = self.hi;
            hi = self.hi + 1.0;
            while part(self.upper_edge(hi)?) < target {
                lo = hi;
                hi = self.hi + 2.0 * (hi - self.hi);
                if hi > 690.0 {
                    return Err(Error::Evaluation(format!(
                        "edge coordinate {target} beyond the representable range"
                    )));
                }
            }
        } else {
            let idx = self.edge_anchors[..n].partition_point(|p| part(*p) < target);
            lo = self.anchor(idx - 1);
            hi = self.anchor(idx);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if part(self.upper_edge(mid)?) < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-13 * (1.0 + mid.abs()) {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Edge parameter whose upper-edge point has real part `x`.
    pub fn edge_parameter_for_re(&self, x: f64) -> Result<f64> {
        self.edge_parameter(x, true)
    }

    /// Edge parameter whose upper-edge point has height `y`
    /// (`-inf` when `y` is below the far-left half-width).
    pub fn edge_parameter_for_im(&self, y: f64) -> Result<f64> {
        self.edge_parameter(y, false)
    }

    /// Real `ξ` with `F(ξ) ≈ x`, interpolated between anchors where possible.
    fn real_preimage(&self, x: f64) -> f64 {
        let n = self.n_anchors();
        if x <= self.real_anchors[0] {
            return self.lo + (x - self.real_anchors[0]) / self.scale;
        }
        if x >= self.real_anchors[n - 1] {
            let mut lo = self.hi;
            let mut hi = self.hi + 1.0;
            while self.eval_raw(Complex64::new(hi, 0.0)).map(|v| v.re).unwrap_or(f64::INFINITY) < x {
                lo = hi;
                hi = self.hi + 2.0 * (hi - self.hi);
                if hi > 700.0 {
                    return 700.0;
                }
            }
            return self.bisect_real(lo, hi, x);
        }
        let idx = self.real_anchors.partition_point(|&v| v < x);
        let (v0, v1) = (self.real_anchors[idx - 1], self.real_anchors[idx]);
        self.anchor(idx - 1) + ANCHOR_STEP * (x - v0) / (v1 - v0)
    }

    fn bisect_real(&self, mut lo: f64, mut hi: f64, x: f64) -> f64 {
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let v = self.eval_raw(Complex64::new(mid, 0.0)).map(|v| v.re).unwrap_or(f64::INFINITY);
            if v < x {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-14 * (1.0 + mid.abs()) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Newton iteration with step halving that keeps iterates in the strip.
    fn newton(&self, w: Complex64, start: Complex64) -> std::result::Result<Complex64, (Complex64, f64)> {
        let tol = 1e-13 * (1.0 + w.norm());
        let mut z = start;
        let mut r = match self.eval_raw(z) {
            Ok(v) => (v - w).norm(),
            Err(_) => return Err((z, f64::INFINITY)),
        };
        let mut fz = self.eval_raw(z).map_err(|_| (z, r))?;
        for _ in 0..100 {
            let d = self.derivative_raw(z);
            // Near the edge the residual must also be small against the edge distance.
            if r <= tol && r <= 1e-6 * (HALF_PI - z.im.abs()) * d.norm() {
                return Ok(z);
            }
            let step = (fz - w) / d;
            let mut lambda = 1.0;
            let mut accepted = false;
            for _ in 0..20 {
                let cand = z - step * lambda;
                if cand.im.abs() < HALF_PI {
                    if let Ok(v) = self.eval_raw(cand) {
                        let rc = (v - w).norm();
                        if rc < r {
                            z = cand;
                            r = rc;
                            fz = v;
                            accepted = true;
                            break;
                        }
                    }
                }
                lambda *= 0.5;
            }
            if !accepted {
                break;
            }
            if (step * lambda).norm() < 1e-15 * (1.0 + z.norm()) && r <= 1e3 * tol {
                return Ok(z);
            }
        }
        if r <= 1e3 * tol {
            Ok(z)
        } else {
            Err((z, r))
        }
    }

    /// Preimage of `w`, continuing from `seed` when given and otherwise
    /// tracking the segment from the real-axis point with the same real part.
    pub fn invert_raw(&self, w: Complex64, seed: Option<Complex64>) -> Result<Complex64> {
        if let Some(s) = seed {
            if s.im.abs() < HALF_PI {
                if let Ok(z) = self.newton(w, s) {
                    return Ok(z);
                }
            }
        }
        let xi0 = self.real_preimage(w.re);
        let w0 = self.eval_raw(Complex64::new(xi0, 0.0))?;
        let guess = Complex64::new(
            xi0,
            (w.im / self.derivative_raw(Complex64::new(xi0, 0.0)).re).clamp(-0.9 * HALF_PI, 0.9 * HALF_PI),
        );
        if let Ok(z) = self.newton(w, guess) {
            return Ok(z);
        }
        let mut z = Complex64::new(xi0, 0.0);
        let mut s: f64 = 0.0;
        let mut ds: f64 = 0.125;
        let mut best = f64::INFINITY;
        while s < 1.0 {
            let s_next = (s + ds).min(1.0);
            let target = w0 + (w - w0) * s_next;
            match self.newton(target, z) {
                Ok(zn) => {
                    z = zn;
                    s = s_next;
                    ds = (ds * 2.0).min(0.25);
                }
                Err((_, r)) => {
                    best = best.min(r);
                    ds *= 0.5;
                    if ds < 1e-6 {
                        return Err(Error::Inversion {
                            message: format!("strip channel continuation stalled at {w}"),
                            residual: best,
                        });
                    }
                }
            }
        }
        Ok(z)
    }

    /// Fits a channel whose upper edge follows `y = 1/ln(-x)` for
    /// `-truncation < x < -1`, with constant half-width `1/ln(truncation)`
    /// further left. Returns the map together with the real offset that
    /// places the edge point at height 1 over `x = -e`.
    pub fn fit_log_channel(truncation: f64) -> Result<(StripChannel, f64)> {
        if !(truncation > std::f64::consts::E && truncation <= 1e3) {
            return Err(Error::param(format!(
                "channel truncation must lie in (e, 1000], got {truncation}"
            )));
        }
        let w_inf = 1.0 / truncation.ln();
        let scale = w_inf / HALF_PI;
        let atoms_a: Vec<f64> = (0..=120).map(|j| -30.0 + 0.5 * j as f64).collect();
        let nk = atoms_a.len();
        let (gx, gw) = gauss_legendre(4);
        let xi_lo = -70.0;
        let h = 0.1;
        let nx = 1151;
        let xs: Vec<f64> = (0..nx).map(|i| xi_lo + h * i as f64).collect();
        // ln(1 + e^{u - a_j}) at every quadrature node of the upper edge.
        let mut nodes = Vec::with_capacity((nx - 1) * gx.len());
        for i in 0..nx - 1 {
            for &x in gx.iter() {
                nodes.push(Complex64::new(xs[i] + 0.5 * h * (1.0 + x), HALF_PI));
            }
        }
        let table: Vec<Complex64> = nodes
            .iter()
            .flat_map(|u| atoms_a.iter().map(move |&a| ln1p_exp(*u - a)))
            .collect();
        let edge_slope = |y: f64| -> f64 {
            if y <= w_inf {
                0.0
            } else {
                (y * y * (-1.0 / y).exp()).atan()
            }
        };
        let heights = |c: &[f64]| -> Vec<f64> {
            let mut y = vec![scale * HALF_PI; nx];
            for i in 0..nx - 1 {
                let mut acc = 0.0;
                for (q, wq) in gw.iter().enumerate() {
                    let row = &table[(i * gx.len() + q) * nk..(i * gx.len() + q + 1) * nk];
                    let s: Complex64 = row.iter().zip(c).map(|(l, cj)| l * *cj).sum();
                    acc += wq * (scale * s.exp()).im;
                }
                y[i + 1] = y[i] + 0.5 * h * acc;
            }
            y
        };
        let mut c: Vec<f64> = atoms_a.iter().map(|&a| (-0.5 * a.max(0.0)).exp()).collect();
        let total: f64 = c.iter().sum();
        c.iter_mut().for_each(|v| *v /= total);
        let edges: Vec<f64> = (0..=nk)
            .map(|j| match j {
                0 => f64::NEG_INFINITY,
                j if j == nk => f64::INFINITY,
                j => 0.5 * (atoms_a[j - 1] + atoms_a[j]),
            })
            .collect();
        let mut converged = false;
        for _ in 0..400 {
            let y = heights(&c);
            let slope: Vec<f64> = y.iter().map(|&v| edge_slope(v)).collect();
            let at = |x: f64| -> f64 {
                if x <= xs[0] {
                    0.0
                } else if x >= xs[nx - 1] {
                    HALF_PI
                } else {
                    let i = ((x - xi_lo) / h).floor() as usize;
                    let f = (x - xs[i]) / h;
                    slope[i] * (1.0 - f) + slope[i + 1] * f
                }
            };
            let mut next: Vec<f64> = (0..nk)
                .map(|j| ((at(edges[j + 1]) - at(edges[j])) / HALF_PI).max(0.0))
                .collect();
            let s: f64 = next.iter().sum();
            next.iter_mut().for_each(|v| *v /= s);
            let change = next
                .iter()
                .zip(&c)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            for (cj, nj) in c.iter_mut().zip(&next) {
                *cj = 0.5 * *cj + 0.5 * nj;
            }
            if change < 1e-10 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Evaluation("channel fit did not converge".into()));
        }
        let y = heights(&c);
        let i = y.partition_point(|&v| v < 1.0).clamp(1, nx - 1);
        let f = (1.0 - y[i - 1]) / (y[i] - y[i - 1]);
        let xi_star = xs[i - 1] + f * h;
        let atoms: Vec<Atom> = atoms_a
            .iter()
            .zip(&c)
            .map(|(&a, &cj)| Atom { a: a - xi_star, c: cj })
            .collect();
        let total: f64 = atoms.iter().map(|t| t.c).sum();
        let atoms = atoms
            .into_iter()
            .map(|t| Atom { a: t.a, c: t.c / total })
            .collect();
        let map = StripChannel::new(scale, atoms)?;
        // Pin the edge point at height 1 above x = -e.
        let mut xi = 0.0;
        for _ in 0..60 {
            let p = map.upper_edge(xi)?;
            let d = map.derivative_raw(Complex64::new(xi, HALF_PI));
            let step = (p.im - 1.0) / d.im;
            xi -= step;
            if step.abs() < 1e-14 {
                break;
            }
        }
        let offset = -std::f64::consts::E - map.upper_edge(xi)?.re;
        Ok((map, offset))
    }
}

/// Shared handle used by map expressions and domains.
pub type SharedChannel = Arc<StripChannel>;

#[cfg(test)]
mod tests {
    use super::*;

    fn two_atom() -> StripChannel {
        StripChannel::new(
            0.4,
            vec![Atom { a: -2.0, c: 0.3 }, Atom { a: 1.5, c: 0.7 }],
        )
        .unwrap()
    }

    #[test]
    fn single_atom_closed_form() {
        // F' = s(1 + e^ζ) integrates to s(ζ + e^ζ - 1).
        let m = StripChannel::new(0.5, vec![Atom { a: 0.0, c: 1.0 }]).unwrap();
        for z in [
            Complex64::new(0.3, 0.2),
            Complex64::new(-12.0, 1.4),
            Complex64::new(4.0, -1.5),
            Complex64::new(-80.0, 0.5),
            Complex64::new(60.0, 1.0),
        ] {
            let exact = 0.5 * (z + z.exp() - 1.0);
            let v = m.eval_raw(z).unwrap();
            assert!((v - exact).norm() < 1e-11 * (1.0 + exact.norm()), "{z}: {v} vs {exact}");
        }
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let m = two_atom();
        let z = Complex64::new(0.7, 0.9);
        let h = 1e-5;
        let fd = (m.eval_raw(z + h).unwrap() - m.eval_raw(z - h).unwrap()) / (2.0 * h);
        assert!((fd - m.derivative_raw(z)).norm() < 1e-7);
    }

    #[test]
    fn inverse_roundtrip() {
        let m = two_atom();
        for z in [
            Complex64::new(0.0, 0.0),
            Complex64::new(-15.0, 1.2),
            Complex64::new(8.0, -1.5),
            Complex64::new(2.0, 1.5699),
        ] {
            let w = m.eval_raw(z).unwrap();
            let back = m.invert_raw(w, None).unwrap();
            assert!((back - z).norm() < 1e-10, "{z} -> {back}");
        }
    }

    #[test]
    fn upper_edge_is_increasing() {
        let m = two_atom();
        let mut prev = m.upper_edge(-30.0).unwrap();
        for k in 1..200 {
            let p = m.upper_edge(-30.0 + 0.25 * k as f64).unwrap();
            assert!(p.re >= prev.re - 1e-12 && p.im >= prev.im - 1e-12);
            prev = p;
        }
        let far = m.upper_edge(-60.0).unwrap();
        assert!((far.im - m.far_half_width()).abs() < 1e-12);
    }
}
