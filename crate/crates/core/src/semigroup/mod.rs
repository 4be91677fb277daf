//! Continuous semigroups built from Koenigs data and their orbits.
//!
//! Orbits are traced twice: by pulling the Koenigs-side motion back through
//! the Koenigs map, and by integrating the generator field. The two traces
//! must agree before samples are returned.

pub mod ode;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::confmap::{eval_chain_ext, fuse_chain, MapExpr};
use crate::domains::{Domain, DomainKind, Profile};
use crate::error::{Error, Result};
use crate::ext::ExtComplex;
use crate::hypgeo::one_minus_abs2;

/// Probe horizon standing in for `+∞`.
pub const DEFAULT_TMAX: f64 = 1e4;
/// Sup-norm agreement required between pullback and integrated orbits.
pub const CROSS_CHECK_TOL: f64 = 1e-6;
/// Exit-time tolerance.
pub const HORIZON_TOL: f64 = 1e-10;
/// Successive Denjoy–Wolff iterates closer than this count as converged.
pub const DW_TOL: f64 = 1e-8;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SemigroupKind {
    #[serde(rename = "nonelliptic")]
    NonElliptic,
    Elliptic { mu: Complex64 },
}

/// A starting point given in the disk or, for semigroups known only through
/// their Koenigs domain, by its Koenigs image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Start {
    Disk(Complex64),
    Koenigs(Complex64),
}

impl From<Complex64> for Start {
    fn from(z: Complex64) -> Self {
        Start::Disk(z)
    }
}

/// Semigroup of holomorphic self-maps of the disk given by Koenigs data.
#[derive(Debug, Clone)]
pub struct Semigroup {
    kind: SemigroupKind,
    koenigs: Option<MapExpr>,
    omega: Domain,
    tau: Option<Complex64>,
    tmax: f64,
}

/// One point of an orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitSample {
    pub t: f64,
    pub z: Complex64,
    pub w: Complex64,
    pub g: Complex64,
    pub delta_disk: f64,
    pub delta_omega: f64,
}

/// Backward horizon `T_z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Horizon {
    /// Exit time, `+∞` encoded as `null` in JSON.
    #[serde(with = "crate::interval::inf_as_null")]
    pub value: f64,
    /// Whether the value comes from a closed form rather than a probe.
    pub analytic: bool,
    /// Probe horizon used for `+∞` verdicts.
    pub probe: f64,
}

impl Horizon {
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

/// Estimate of the Denjoy–Wolff point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DenjoyWolff {
    pub point: Complex64,
    pub converged: bool,
    /// Largest time reached by the iteration.
    pub time: f64,
    /// Distance between the last two iterates.
    pub last_step: f64,
}

/// Serializable Koenigs data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemigroupSpec {
    #[serde(rename = "type")]
    pub kind: KindTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Complex64>,
    /// Koenigs map; omitted for semigroups known only through their domain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub koenigs: Option<MapExpr>,
    pub domain: Domain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindTag {
    Elliptic,
    Nonelliptic,
}

impl SemigroupSpec {
    pub fn build(&self) -> Result<Semigroup> {
        let kind = match (self.kind, self.mu) {
            (KindTag::Elliptic, Some(mu)) => SemigroupKind::Elliptic { mu },
            (KindTag::Elliptic, None) => return Err(Error::param("elliptic semigroups need mu")),
            (KindTag::Nonelliptic, None) => SemigroupKind::NonElliptic,
            (KindTag::Nonelliptic, Some(_)) => {
                return Err(Error::param("mu is only meaningful for elliptic semigroups"))
            }
        };
        match &self.koenigs {
            Some(h) => Semigroup::new(kind, h.clone(), self.domain.clone()),
            None => Semigroup::anchored(kind, self.domain.clone()),
        }
    }
}

impl Semigroup {
    /// Semigroup with Koenigs map `h: D → omega`.
    pub fn new(kind: SemigroupKind, koenigs: MapExpr, omega: Domain) -> Result<Self> {
        let mut h = koenigs;
        h.source = Domain::unit_disk();
        h.target = omega.clone();
        let mut sg = Semigroup {
            kind,
            koenigs: Some(h),
            omega,
            tau: None,
            tmax: DEFAULT_TMAX,
        };
        sg.check_koenigs_domain()?;
        if let SemigroupKind::Elliptic { .. } = kind {
            let h = sg.koenigs.as_ref().unwrap();
            let tau = h.invert(c(0.0, 0.0), Some(c(0.0, 0.0)))?;
            if h.evaluate(tau)?.norm() > 1e-10 {
                return Err(Error::param("Koenigs map does not vanish at its fixed point"));
            }
            sg.tau = Some(tau);
        }
        Ok(sg)
    }

    /// Semigroup known only through its Koenigs domain; starting points are
    /// given by their Koenigs images and disk-side quantities are unavailable.
    pub fn anchored(kind: SemigroupKind, omega: Domain) -> Result<Self> {
        let sg = Semigroup {
            kind,
            koenigs: None,
            omega,
            tau: None,
            tmax: DEFAULT_TMAX,
        };
        sg.check_koenigs_domain()?;
        Ok(sg)
    }

    fn check_koenigs_domain(&self) -> Result<()> {
        match self.kind {
            SemigroupKind::NonElliptic => {
                if !self.omega.is_convex_positive_direction(200) {
                    return Err(Error::param(
                        "Koenigs domain of a non-elliptic semigroup must be convex in the positive direction",
                    ));
                }
            }
            SemigroupKind::Elliptic { mu } => {
                if !(mu.re > 0.0) {
                    return Err(Error::param("spectral value needs Re μ > 0"));
                }
                if !self.omega.contains(c(0.0, 0.0)) {
                    return Err(Error::param("Koenigs domain of an elliptic semigroup must contain 0"));
                }
                if !self.omega.is_spirallike(mu, 200)? {
                    return Err(Error::param("Koenigs domain is not μ-spirallike"));
                }
            }
        }
        Ok(())
    }

    pub fn with_tmax(mut self, tmax: f64) -> Result<Self> {
        if !(tmax > 0.0 && tmax.is_finite()) {
            return Err(Error::param("probe horizon must be positive and finite"));
        }
        self.tmax = tmax;
        Ok(self)
    }

    /// Serializable description of this semigroup.
    pub fn spec(&self) -> SemigroupSpec {
        let (kind, mu) = match self.kind {
            SemigroupKind::NonElliptic => (KindTag::Nonelliptic, None),
            SemigroupKind::Elliptic { mu } => (KindTag::Elliptic, Some(mu)),
        };
        SemigroupSpec {
            kind,
            mu,
            koenigs: self.koenigs.clone(),
            domain: self.omega.clone(),
        }
    }

    pub fn kind(&self) -> SemigroupKind {
        self.kind
    }

    pub fn is_elliptic(&self) -> bool {
        matches!(self.kind, SemigroupKind::Elliptic { .. })
    }

    pub fn mu(&self) -> Option<Complex64> {
        match self.kind {
            SemigroupKind::Elliptic { mu } => Some(mu),
            SemigroupKind::NonElliptic => None,
        }
    }

    pub fn koenigs(&self) -> Option<&MapExpr> {
        self.koenigs.as_ref()
    }

    pub fn omega(&self) -> &Domain {
        &self.omega
    }

    pub fn tmax(&self) -> f64 {
        self.tmax
    }

    /// Interior fixed point of an elliptic semigroup.
    pub fn tau(&self) -> Option<Complex64> {
        self.tau
    }

    fn h(&self) -> Result<&MapExpr> {
        self.koenigs.as_ref().ok_or_else(|| {
            Error::Unsupported("semigroup is known only through its Koenigs domain".into())
        })
    }

    /// Koenigs image of a starting point.
    pub fn koenigs_image(&self, start: Start) -> Result<Complex64> {
        let w = match start {
            Start::Disk(z) => self.h()?.evaluate(z)?,
            Start::Koenigs(w) => w,
        };
        if !self.omega.contains(w) {
            return Err(Error::domain(format!("{w} is outside the Koenigs domain")));
        }
        Ok(w)
    }

    /// Koenigs-side forward motion: `w + t` or `e^{-μt} w`.
    pub fn forward_image(&self, w: Complex64, t: f64) -> Complex64 {
        match self.kind {
            SemigroupKind::NonElliptic => w + t,
            SemigroupKind::Elliptic { mu } => (-mu * t).exp() * w,
        }
    }

    /// Koenigs-side backward motion: `w - t` or `e^{μt} w`, evaluated directly.
    pub fn backward_image(&self, w: Complex64, t: f64) -> Complex64 {
        match self.kind {
            SemigroupKind::NonElliptic => w - t,
            SemigroupKind::Elliptic { mu } => (mu * t).exp() * w,
        }
    }

    /// Generator value in terms of the Koenigs image `w` and `(h⁻¹)'(w)`.
    fn generator_from_inverse(&self, w: Complex64, dinv: Complex64) -> Complex64 {
        match self.kind {
            SemigroupKind::NonElliptic => dinv,
            SemigroupKind::Elliptic { mu } => -mu * w * dinv,
        }
    }

    /// `φ_t(z)`.
    pub fn phi(&self, t: f64, z: Complex64) -> Result<Complex64> {
        if !(t >= 0.0) {
            return Err(Error::param("φ_t needs t ≥ 0"));
        }
        let h = self.h()?;
        let w = h.evaluate(z)?;
        let path = self.pullback(z, &[0.0, t], |s| self.forward_image(w, s))?;
        Ok(path[1])
    }

    /// Infinitesimal generator `G(z)`.
    pub fn generator(&self, z: Complex64) -> Result<Complex64> {
        let (w, d) = self.h()?.eval_with_derivative(z)?;
        if d.norm() == 0.0 {
            return Err(Error::Evaluation(format!("Koenigs map is critical at {z}")));
        }
        Ok(match self.kind {
            SemigroupKind::NonElliptic => 1.0 / d,
            SemigroupKind::Elliptic { mu } => -mu * w / d,
        })
    }

    fn generator_in_disk(&self, z: Complex64) -> Result<Complex64> {
        if !(z.norm() < 1.0) {
            return Err(Error::domain(format!("{z} left the disk")));
        }
        self.generator(z)
    }

    /// Generator at the point whose Koenigs image is `w`, through the
    /// output-side derivative `(h⁻¹)'(w)`. Preimages that round onto the unit
    /// circle are kept: the derivative stays accurate there.
    pub fn generator_at_image(&self, w: Complex64, seed: Option<Complex64>) -> Result<(Complex64, Complex64)> {
        let h = self.h()?;
        if let Ok((z, dinv)) = h.invert_with_derivative(w, seed) {
            let finite = z.re.is_finite() && z.im.is_finite() && dinv.re.is_finite() && dinv.im.is_finite();
            if finite {
                let on_edge = z.norm() >= 1.0 - 1e-15;
                let accurate = !on_edge
                    && h.eval_unchecked(z).map_or(false, |v| (v - w).norm() <= 1e-9 * w.norm().max(1.0));
                if on_edge || accurate {
                    return Ok((z, self.generator_from_inverse(w, dinv)));
                }
            }
        }
        let z = h.invert(w, seed)?;
        let d = h.derivative(z)?;
        Ok((z, self.generator_from_inverse(w, 1.0 / d)))
    }

    /// Pulls the Koenigs-side path `times ↦ target(t)` back to the disk with
    /// continuation seeding, halving the time step on failure.
    /// `times[0]` is the time of `z0`.
    fn pullback<F>(&self, z0: Complex64, times: &[f64], target: F) -> Result<Vec<Complex64>>
    where
        F: Fn(f64) -> Complex64,
    {
        let h = self.h()?;
        let mut out = vec![z0];
        let mut z = z0;
        for pair in times.windows(2) {
            z = Self::pullback_step(h, &target, pair[0], pair[1], z, 0)?;
            out.push(z);
        }
        Ok(out)
    }

    fn pullback_step<F>(h: &MapExpr, target: &F, t0: f64, t1: f64, seed: Complex64, depth: u32) -> Result<Complex64>
    where
        F: Fn(f64) -> Complex64,
    {
        match h.invert(target(t1), Some(seed)) {
            Ok(z) => Ok(z),
            Err(_) if depth < 30 => {
                let tm = 0.5 * (t0 + t1);
                let zm = Self::pullback_step(h, target, t0, tm, seed, depth + 1)?;
                Self::pullback_step(h, target, tm, t1, zm, depth + 1)
            }
            Err(e) => Err(e),
        }
    }

    fn check_grid(grid: &[f64]) -> Result<()> {
        if grid.is_empty() {
            return Err(Error::param("time grid is empty"));
        }
        if grid[0] != 0.0 {
            return Err(Error::param("time grid must start at 0"));
        }
        if grid.windows(2).any(|p| !(p[1] > p[0])) || grid.iter().any(|t| !t.is_finite()) {
            return Err(Error::param("time grid must be finite and strictly increasing"));
        }
        Ok(())
    }

    fn sample(&self, t: f64, z: Complex64, w: Complex64, g: Complex64) -> Result<OrbitSample> {
        Ok(OrbitSample {
            t,
            z,
            w,
            g,
            delta_disk: one_minus_abs2(z),
            delta_omega: self.omega.boundary_distance(w)?,
        })
    }

    fn motion(&self, w0: Complex64, backward: bool) -> impl Fn(f64) -> Complex64 + '_ {
        move |s| {
            if backward {
                self.backward_image(w0, s)
            } else {
                self.forward_image(w0, s)
            }
        }
    }

    /// Pullback orbit with its sup deviation from the integrated generator flow
    /// and the time where the deviation peaks.
    fn pullback_checked(&self, z0: Complex64, grid: &[f64], backward: bool) -> Result<(Vec<Complex64>, f64, f64)> {
        Self::check_grid(grid)?;
        let w0 = self.h()?.evaluate(z0)?;
        let pulled = self.pullback(z0, grid, self.motion(w0, backward))?;
        let sign = if backward { -1.0 } else { 1.0 };
        let integrated = ode::integrate(
            |y| Ok(self.generator_in_disk(y)? * sign),
            z0,
            grid,
            ode::OdeOptions::default(),
        )?;
        let mut worst = (0.0, 0.0);
        for ((t, a), b) in grid.iter().zip(&pulled).zip(&integrated) {
            let d = (a - b).norm();
            if d > worst.0 {
                worst = (d, *t);
            }
        }
        Ok((pulled, worst.0, worst.1))
    }

    /// Sup-norm distance between the pullback orbit and the integrated
    /// generator flow on `grid`.
    pub fn orbit_deviation(&self, z: Complex64, grid: &[f64], backward: bool) -> Result<f64> {
        if backward {
            let horizon = self.backward_horizon(Start::Disk(z))?;
            if let Some(&t) = grid.iter().find(|&&t| t >= horizon.value) {
                return Err(Error::Horizon { t, horizon: horizon.value });
            }
        }
        Ok(self.pullback_checked(z, grid, backward)?.1)
    }

    fn trace(&self, z0: Complex64, grid: &[f64], backward: bool) -> Result<Vec<OrbitSample>> {
        let (pulled, deviation, t) = self.pullback_checked(z0, grid, backward)?;
        if deviation > CROSS_CHECK_TOL {
            return Err(Error::CrossValidation { deviation, t });
        }
        let motion = self.motion(self.h()?.evaluate(z0)?, backward);
        grid.iter()
            .zip(pulled)
            .map(|(&t, z)| {
                let w = motion(t);
                let (_, g) = self.generator_at_image(w, Some(z))?;
                self.sample(t, z, w, g)
            })
            .collect()
    }

    /// Forward orbit `γ_z(t) = φ_t(z)` on `grid`, cross-validated.
    pub fn forward_orbit(&self, z: Complex64, grid: &[f64]) -> Result<Vec<OrbitSample>> {
        self.trace(z, grid, false)
    }

    /// Backward orbit `γ̃_z(t) = φ_t^{-1}(z)` on `grid ⊂ [0, T_z)`, cross-validated.
    pub fn backward_orbit(&self, z: Complex64, grid: &[f64]) -> Result<Vec<OrbitSample>> {
        Self::check_grid(grid)?;
        let horizon = self.backward_horizon(Start::Disk(z))?;
        if let Some(&t) = grid.iter().find(|&&t| t >= horizon.value) {
            return Err(Error::Horizon {
                t,
                horizon: horizon.value,
            });
        }
        self.trace(z, grid, true)
    }

    /// Full orbit on a grid inside `(-T_z, +∞)`; negative times follow the
    /// backward orbit.
    pub fn full_orbit(&self, z: Complex64, grid: &[f64]) -> Result<Vec<OrbitSample>> {
        if grid.windows(2).any(|p| !(p[1] > p[0])) {
            return Err(Error::param("time grid must be strictly increasing"));
        }
        let mut back: Vec<f64> = grid.iter().filter(|&&t| t < 0.0).map(|t| -t).rev().collect();
        back.insert(0, 0.0);
        let mut fwd: Vec<f64> = grid.iter().copied().filter(|&t| t > 0.0).collect();
        fwd.insert(0, 0.0);
        let b = self.backward_orbit(z, &back)?;
        let f = self.forward_orbit(z, &fwd)?;
        let mut out: Vec<OrbitSample> = b
            .into_iter()
            .skip(1)
            .rev()
            .map(|mut s| {
                s.t = -s.t;
                s
            })
            .collect();
        let has_zero = grid.iter().any(|&t| t == 0.0);
        for s in f {
            if s.t == 0.0 && !has_zero {
                continue;
            }
            out.push(s);
        }
        Ok(out)
    }

    /// Backward horizon: analytic for the built-in domain kinds, otherwise by
    /// safe stepping against the boundary distance up to the probe horizon.
    pub fn backward_horizon(&self, start: Start) -> Result<Horizon> {
        let w = self.koenigs_image(start)?;
        if self.is_elliptic() && w.norm() < 1e-14 {
            return Err(Error::param(
                "the fixed point has a constant backward orbit and is excluded",
            ));
        }
        if let Some(value) = self.analytic_horizon(w) {
            return Ok(Horizon {
                value,
                analytic: true,
                probe: self.tmax,
            });
        }
        let value = self.probe_horizon(w)?;
        Ok(Horizon {
            value,
            analytic: false,
            probe: self.tmax,
        })
    }

    fn analytic_horizon(&self, w: Complex64) -> Option<f64> {
        match self.kind {
            SemigroupKind::NonElliptic => nonelliptic_exit(self.omega.kind(), w),
            SemigroupKind::Elliptic { mu } => match self.omega.kind() {
                DomainKind::Plane => Some(f64::INFINITY),
                DomainKind::Disk { center, radius } if center.norm() == 0.0 => {
                    Some((radius / w.norm()).ln() / mu.re)
                }
                DomainKind::SpiralSector { mu: m, .. } if (mu / m).im.abs() < 1e-12 => {
                    Some(f64::INFINITY)
                }
                _ => None,
            },
        }
    }

    fn probe_horizon(&self, w: Complex64) -> Result<f64> {
        let mut t = 0.0;
        for _ in 0..2_000_000 {
            let p = self.backward_image(w, t);
            if !self.omega.contains(p) {
                return Ok(t);
            }
            let d = self.omega.boundary_distance(p)?;
            let dt = match self.kind {
                SemigroupKind::NonElliptic => d,
                SemigroupKind::Elliptic { mu } => {
                    let speed = mu.norm() * p.norm();
                    (1.0 + d * mu.re / speed).ln() / mu.re
                }
            };
            if dt < HORIZON_TOL * 1e-1 {
                return Ok(t + dt);
            }
            t += dt;
            if t >= self.tmax {
                return Ok(f64::INFINITY);
            }
        }
        Err(Error::Evaluation("exit-time probe did not settle".into()))
    }

    /// Denjoy–Wolff point: `h⁻¹(0)` for elliptic semigroups, otherwise the
    /// limit of `φ_t(0)` along doubling times.
    pub fn denjoy_wolff_estimate(&self) -> Result<DenjoyWolff> {
        if let Some(tau) = self.tau {
            return Ok(DenjoyWolff {
                point: tau,
                converged: true,
                time: 0.0,
                last_step: 0.0,
            });
        }
        let h = self.h()?;
        let z0 = c(0.0, 0.0);
        let w0 = h.evaluate(z0)?;
        let mut prev = z0;
        let mut z = z0;
        let mut t_prev = 0.0;
        let mut t = 1.0;
        let mut last_step = f64::INFINITY;
        while t <= self.tmax {
            z = self.pullback(prev, &[t_prev, t], |s| w0 + s)?[1];
            last_step = (z - prev).norm();
            if last_step < DW_TOL {
                return Ok(DenjoyWolff { point: z, converged: true, time: t, last_step });
            }
            prev = z;
            t_prev = t;
            t *= 2.0;
        }
        // Closed-form inverse chains can be evaluated far beyond the probe
        // horizon; keep doubling until the point stops moving.
        if let Some(inv) = h.inverse_chain() {
            let chain = fuse_chain(&inv);
            let mut tt = t;
            let mut best = (z, last_step, t_prev);
            while tt.is_finite() {
                let shifted = ExtComplex::from_complex(w0).add(&ExtComplex::from_complex(c(tt, 0.0)));
                let Ok(v) = eval_chain_ext(&chain, shifted) else { break };
                let zz = v.to_complex();
                if !(zz.re.is_finite() && zz.im.is_finite()) {
                    break;
                }
                let step = (zz - best.0).norm();
                best = (zz, step, tt);
                if step == 0.0 {
                    break;
                }
                tt *= 2.0;
            }
            let (point, last_step, time) = best;
            return Ok(DenjoyWolff { point, converged: last_step < DW_TOL, time, last_step });
        }
        Ok(DenjoyWolff {
            point: z,
            converged: false,
            time: t_prev,
            last_step,
        })
    }

    /// Conjugate semigroup `f ∘ φ_t ∘ f⁻¹` on `f(D)`.
    pub fn conjugate_version(&self, f: MapExpr) -> Result<Conjugated<'_>> {
        self.h()?;
        let mut f = f;
        f.source = Domain::unit_disk();
        Ok(Conjugated { sg: self, f })
    }
}

/// Exit time of `w - t` for the built-in kinds, when it has a closed form.
fn nonelliptic_exit(kind: &DomainKind, w: Complex64) -> Option<f64> {
    Some(match kind {
        DomainKind::Plane | DomainKind::Strip { .. } => f64::INFINITY,
        DomainKind::HalfPlane { normal_angle, offset } => {
            let rot = Complex64::from_polar(1.0, -normal_angle);
            let rate = normal_angle.cos();
            if rate > 1e-15 {
                ((w * rot).re - offset) / rate
            } else {
                f64::INFINITY
            }
        }
        DomainKind::HalfStrip { left, .. } => w.re - left,
        DomainKind::SlitStrip { slits, .. } => slits
            .iter()
            .filter(|s| s.y == w.im && s.x < w.re)
            .map(|s| w.re - s.x)
            .fold(f64::INFINITY, f64::min),
        DomainKind::Channel { splice, upper, lower } => {
            let mut x_exit = f64::NEG_INFINITY;
            let y = w.im;
            for (p, above) in [(upper, true), (lower, false)] {
                let gap = if above { y - p.far_value() } else { p.far_value() - y };
                if gap <= 0.0 {
                    continue;
                }
                let x = match p {
                    Profile::Log { .. } => -(1.0 / gap).exp(),
                    Profile::Exp { .. } => gap.ln(),
                };
                x_exit = x_exit.max(x.min(*splice));
            }
            if w.re <= x_exit {
                return None;
            }
            w.re - x_exit
        }
        DomainKind::StripImage { map, offset } => {
            let y = w.im.abs();
            if y < map.far_half_width() {
                f64::INFINITY
            } else {
                let xi = map.edge_parameter_for_im(y).ok()?;
                w.re - (map.upper_edge(xi).ok()?.re + offset)
            }
        }
        _ => return None,
    })
}

/// Semigroup conjugated by a conformal map `f` of the disk.
#[derive(Debug, Clone)]
pub struct Conjugated<'a> {
    sg: &'a Semigroup,
    f: MapExpr,
}

impl Conjugated<'_> {
    pub fn map(&self) -> &MapExpr {
        &self.f
    }

    fn pull(&self, zeta: Complex64) -> Result<Complex64> {
        self.f.invert_with_derivative(zeta, None).map(|(z, _)| z).and_then(|z| {
            if (self.f.eval_unchecked(z)? - zeta).norm() <= 1e-9 * zeta.norm().max(1.0) {
                Ok(z)
            } else {
                self.f.newton(zeta, z)
            }
        })
    }

    pub fn phi(&self, t: f64, zeta: Complex64) -> Result<Complex64> {
        let z = self.pull(zeta)?;
        self.f.evaluate(self.sg.phi(t, z)?)
    }

    /// Generator on `f(D)`: `f'(z) G(z)` with `z = f⁻¹(ζ)`.
    pub fn generator(&self, zeta: Complex64) -> Result<Complex64> {
        let z = self.pull(zeta)?;
        Ok(self.f.derivative(z)? * self.sg.generator(z)?)
    }

    /// Forward orbit of `ζ`; samples carry the conjugated point in `z` and the
    /// conjugated generator in `g`.
    pub fn forward_orbit(&self, zeta: Complex64, grid: &[f64]) -> Result<Vec<OrbitSample>> {
        let z0 = self.pull(zeta)?;
        let base = self.sg.forward_orbit(z0, grid)?;
        base.into_iter()
            .map(|s| {
                let (p, d) = self.f.eval_with_derivative(s.z)?;
                Ok(OrbitSample {
                    z: p,
                    g: d * s.g,
                    ..s
                })
            })
            .collect()
    }

    /// `f(φ_t(f⁻¹(ζ)))` in extended range, through the fused chain
    /// `f ∘ h⁻¹` applied to `h(z) + t` (non-elliptic) or `e^{-μt}h(z)`.
    pub fn forward_point_ext(&self, zeta: Complex64, t: f64) -> Result<ExtComplex> {
        let h = self.sg.h()?;
        let inv = h.inverse_chain().ok_or_else(|| {
            Error::Unsupported("Koenigs map has no closed-form inverse chain".into())
        })?;
        let z0 = self.pull(zeta)?;
        let w0 = h.evaluate(z0)?;
        let mut chain = inv;
        chain.extend(self.f.chain.iter().cloned());
        let chain = fuse_chain(&chain);
        let w = match self.sg.kind {
            SemigroupKind::NonElliptic => ExtComplex::from_complex(w0).add(&ExtComplex::from_complex(c(t, 0.0))),
            SemigroupKind::Elliptic { mu } => ExtComplex::exp(-mu * t).mul(&ExtComplex::from_complex(w0)),
        };
        eval_chain_ext(&chain, w)
    }
}
