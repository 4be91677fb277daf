use serde::{Deserialize, Serialize};

use super::CUTOFF;
use crate::interval::inf_as_null;
use crate::quadrature::adaptive;
use crate::semigroup::{Semigroup, SemigroupKind, Start};
use crate::{par, Complex64, Error, Result};

/// Default number of base sample times for [`lipschitz_quotient`].
pub const DEFAULT_PAIR_BUDGET: usize = 256;

const LENGTH_REL_TOL: f64 = 1e-10;
const LENGTH_ABS_TOL: f64 = 1e-15;
const TAIL_TOL: f64 = 1e-4;
const MAX_TIME: f64 = 1e18;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Length {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
    /// Last time reached by the integration.
    #[serde(with = "inf_as_null")]
    pub end_time: f64,
}

/// `∫|γ'|` over consecutive grid panels, each integrated adaptively.
pub fn arc_length<F: Fn(f64) -> Result<f64>>(speed: F, grid: &[f64]) -> Result<Length> {
    if grid.len() < 2 {
        return Err(Error::param("arc length needs at least two grid points"));
    }
    if grid.windows(2).any(|p| !(p[1] > p[0])) {
        return Err(Error::param("arc length grid must be strictly increasing"));
    }
    let mut value = 0.0;
    let mut error = 0.0;
    let mut converged = true;
    for p in grid.windows(2) {
        let q = panel(&speed, p[0], p[1])?;
        value += q.0;
        error += q.1;
        converged &= q.2;
    }
    Ok(Length {
        value,
        error,
        converged,
        end_time: grid[grid.len() - 1],
    })
}

fn panel<F: Fn(f64) -> Result<f64>>(speed: &F, a: f64, b: f64) -> Result<(f64, f64, bool)> {
    let mut failure = None;
    let q = adaptive(
        |t| match speed(t) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        a,
        b,
        LENGTH_ABS_TOL,
        LENGTH_REL_TOL,
        4000,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok((q.value, q.error, q.converged)),
    }
}

fn image(sg: &Semigroup, w0: Complex64, dir: Direction, t: f64) -> Complex64 {
    match dir {
        Direction::Forward => sg.forward_image(w0, t),
        Direction::Backward => sg.backward_image(w0, t),
    }
}

/// Orbit point at time `t`, recovered from its Koenigs image.
pub fn orbit_point(sg: &Semigroup, w0: Complex64, dir: Direction, t: f64) -> Result<Complex64> {
    sg.generator_at_image(image(sg, w0, dir, t), None).map(|(z, _)| z)
}

fn speed_at(sg: &Semigroup, w0: Complex64, dir: Direction, t: f64) -> Result<f64> {
    sg.generator_at_image(image(sg, w0, dir, t), None).map(|(_, g)| g.norm())
}

/// Whether the image at `t` is usable: away from both boundaries and invertible.
fn usable(sg: &Semigroup, w0: Complex64, dir: Direction, t: f64) -> Result<bool> {
    let p = image(sg, w0, dir, t);
    if !sg.omega().contains(p) {
        return Ok(false);
    }
    if sg.omega().boundary_distance(p)? < CUTOFF {
        return Ok(false);
    }
    Ok(match sg.generator_at_image(p, None) {
        Ok((z, g)) => 1.0 - z.norm() >= CUTOFF && g.re.is_finite() && g.im.is_finite(),
        Err(_) => false,
    })
}

/// Length of the forward or backward orbit on `[0, until]`; `None` runs to
/// the end of the orbit (the horizon, or `+∞`).
pub fn orbit_length(
    sg: &Semigroup,
    start: Start,
    dir: Direction,
    until: Option<f64>,
) -> Result<Length> {
    let w0 = sg.koenigs_image(start)?;
    let horizon = match dir {
        Direction::Forward => f64::INFINITY,
        Direction::Backward => sg.backward_horizon(start)?.value,
    };
    let speed = |t: f64| speed_at(sg, w0, dir, t);
    if let Some(end) = until {
        if !(end > 0.0) {
            return Err(Error::param("orbit length needs a positive end time"));
        }
        if end >= horizon {
            return Err(Error::Horizon { t: end, horizon });
        }
        let mut grid = vec![0.0];
        let mut t = 1.0;
        while t < end {
            grid.push(t);
            t *= 2.0;
        }
        grid.push(end);
        return arc_length(speed, &grid);
    }

    let mut panels: Vec<(f64, f64, f64)> = Vec::new();
    let mut total = 0.0;
    let mut error = 0.0;
    let mut quad_ok = true;
    let mut a = 0.0;
    let mut negligible = 0;
    for j in 0..4000 {
        let b = if horizon.is_finite() {
            horizon * (1.0 - (-(j as f64 + 1.0)).exp2())
        } else if j == 0 {
            1.0
        } else {
            2.0 * a
        };
        if b <= a || b > MAX_TIME || !usable(sg, w0, dir, b)? {
            break;
        }
        let (v, e, ok) = panel(&speed, a, b)?;
        panels.push((a, b, v));
        total += v;
        error += e;
        quad_ok &= ok;
        a = b;
        if !horizon.is_finite() {
            negligible = if v <= 1e-16 * total { negligible + 1 } else { 0 };
            if negligible >= 3 {
                break;
            }
        }
    }
    if panels.is_empty() {
        return Err(Error::Evaluation("orbit starts too close to the boundary".into()));
    }
    let last = panels.last().map_or(0.0, |p| p.2);
    Ok(Length {
        value: total,
        error,
        converged: quad_ok && last <= TAIL_TOL * total,
        end_time: a,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HaymanWu {
    pub forward: Length,
    pub backward: Length,
    pub length: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Length of the full orbit of `z`, compared with `4π`.
pub fn hayman_wu_audit(sg: &Semigroup, z: Complex64) -> Result<HaymanWu> {
    if sg.is_elliptic() {
        return Err(Error::param("the length bound applies to non-elliptic semigroups"));
    }
    let forward = orbit_length(sg, Start::Disk(z), Direction::Forward, None)?;
    let backward = orbit_length(sg, Start::Disk(z), Direction::Backward, None)?;
    let length = forward.value + backward.value;
    let bound = 4.0 * std::f64::consts::PI;
    Ok(HaymanWu {
        forward,
        backward,
        length,
        bound,
        pass: length <= bound + 1e-6,
    })
}

/// Sup of `|γ(t) - γ(s)| / |t - s|` over a family of sample pairs on `[a, b]`:
/// a uniform grid, offsets log-spaced toward both ends, and a close partner
/// for each of these. Pairs closer than the partner spacing are skipped.
pub fn lipschitz_quotient<F>(sampler: F, a: f64, b: f64, budget: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<Complex64> + Sync + Send,
{
    if !(b > a) || !a.is_finite() || !b.is_finite() {
        return Err(Error::param("quotient interval must be finite and nonempty"));
    }
    let budget = budget.max(8);
    let len = b - a;
    let mut times = Vec::with_capacity(4 * budget);
    let uniform = budget / 2;
    for k in 0..=uniform {
        times.push(a + len * k as f64 / uniform as f64);
    }
    let logs = budget / 4;
    for k in 0..logs {
        let off = len * 10f64.powf(-8.0 + 8.0 * k as f64 / logs as f64);
        times.push(a + off);
        times.push(b - off);
    }
    let sep = 1e-8 * len;
    let base = times.len();
    for k in 0..base {
        let t = times[k];
        if t + sep <= b {
            times.push(t + sep);
        } else {
            times.push(t - sep);
        }
    }
    times.retain(|t| (a..=b).contains(t));
    times.sort_by(|x, y| x.partial_cmp(y).unwrap());
    times.dedup();
    let points: Vec<Result<Complex64>> = par::map(&times, |&t| sampler(t));
    let points: Vec<Complex64> = points.into_iter().collect::<Result<_>>()?;
    let rows: Vec<f64> = par::map(&(0..times.len()).collect::<Vec<_>>(), |&i| {
        let mut best = 0.0f64;
        for j in i + 1..times.len() {
            if times[j] - times[i] < 0.5 * sep {
                continue;
            }
            let q = (points[j] - points[i]).norm() / (times[j] - times[i]);
            best = best.max(q);
        }
        best
    });
    Ok(rows.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForwardCertificate {
    pub constant: f64,
    pub measured: f64,
    pub pass: bool,
}

/// Lipschitz constant of the forward orbit guaranteed by the Koenigs-domain
/// geometry: `1/δ_Ω(h(z))`, or `|μ h(z)|` over the distance from the spiral
/// `e^{-μt}h(z)` to `∂Ω` in the elliptic case.
pub fn forward_constant(sg: &Semigroup, start: Start) -> Result<f64> {
    let w0 = sg.koenigs_image(start)?;
    let omega = sg.omega();
    match sg.kind() {
        SemigroupKind::NonElliptic => Ok(1.0 / omega.boundary_distance(w0)?),
        SemigroupKind::Elliptic { mu } => {
            if w0.norm() == 0.0 {
                return Ok(0.0);
            }
            let dt = 0.01 / mu.norm().max(1.0);
            let mut min_d = f64::INFINITY;
            let mut max_seg = 0.0f64;
            let mut prev = w0;
            let mut k = 0u64;
            loop {
                let t = k as f64 * dt;
                let p = sg.forward_image(w0, t);
                min_d = min_d.min(omega.boundary_distance(p)?);
                max_seg = max_seg.max((p - prev).norm());
                prev = p;
                if p.norm() < 1e-6 * w0.norm() || k > 10_000_000 {
                    break;
                }
                k += 1;
            }
            let d = min_d - 0.5 * max_seg;
            if !(d > 0.0) {
                return Err(Error::Evaluation("spiral orbit reaches the boundary".into()));
            }
            Ok((mu * w0).norm() / d)
        }
    }
}

/// Forward Lipschitz constant against the quotient measured on `[0, 50]`.
pub fn forward_certificate(sg: &Semigroup, z: Complex64) -> Result<ForwardCertificate> {
    let constant = forward_constant(sg, Start::Disk(z))?;
    let w0 = sg.koenigs_image(Start::Disk(z))?;
    let measured = lipschitz_quotient(
        |t| orbit_point(sg, w0, Direction::Forward, t),
        0.0,
        50.0,
        DEFAULT_PAIR_BUDGET,
    )?;
    Ok(ForwardCertificate {
        constant,
        measured,
        pass: measured <= constant * 1.05,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BiLipschitzVerdict {
    #[serde(rename = "not bi-Lipschitz (inf→0)")]
    NotBiLipschitz,
    #[serde(rename = "bi-Lipschitz on range")]
    BiLipschitzOnRange,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiLipschitz {
    pub inf_g: f64,
    /// Lower speed bound on the sampled range, when one is claimed.
    pub epsilon: Option<f64>,
    pub verdict: BiLipschitzVerdict,
}

/// Infimum of the orbit speed over `(t, |G|)` samples with a trend verdict.
pub fn bilipschitz_probe(samples: &[(f64, f64)]) -> Result<BiLipschitz> {
    if samples.len() < 2 {
        return Err(Error::param("bi-Lipschitz probe needs at least two samples"));
    }
    let inf_g = samples.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let tail = &samples[samples.len() - (samples.len() / 4).max(2)..];
    let falling = tail[tail.len() - 1].1 < tail[0].1;
    let (verdict, epsilon) = if inf_g < 1e-3 && falling {
        (BiLipschitzVerdict::NotBiLipschitz, None)
    } else if inf_g >= 1e-3 {
        (BiLipschitzVerdict::BiLipschitzOnRange, Some(inf_g))
    } else {
        (BiLipschitzVerdict::Inconclusive, None)
    };
    Ok(BiLipschitz {
        inf_g,
        epsilon,
        verdict,
    })
}
