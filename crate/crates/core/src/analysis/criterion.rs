use serde::{Deserialize, Serialize};

use super::{growth_per_decade, strictly_increasing, tail_coordinate, tail_grid, Heuristic, CUTOFF};
use crate::hypgeo::{domain_density, domain_distance};
use crate::interval::{inf_as_null, Interval, INFLATION};
use crate::semigroup::{Horizon, Semigroup, SemigroupKind, Start};
use crate::{par, Complex64, Error, Result};

const SANDWICH_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionSample {
    pub t: f64,
    pub ratio: Interval,
    pub g_abs: Option<f64>,
    /// Whether `|G|` lies between the two ratio-based bounds.
    pub sandwich: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum Verdict {
    Certified { bound: f64 },
    RefutedTrend,
    Inconclusive,
}

impl Verdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, Verdict::Certified { .. })
    }
}

/// How the sampled problem departs from the exact one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    /// Slit pairs kept in a slit-strip domain.
    pub slit_pairs: Option<u32>,
    /// Truncation of a fitted channel map.
    pub channel: Option<f64>,
    #[serde(with = "inf_as_null")]
    pub horizon: f64,
    pub horizon_analytic: bool,
    pub probe_horizon: f64,
    pub cutoff: f64,
}

impl Truncation {
    pub(crate) fn new(sg: &Semigroup, horizon: &Horizon) -> Self {
        Truncation {
            slit_pairs: sg.omega().truncation(),
            channel: None,
            horizon: horizon.value,
            horizon_analytic: horizon.analytic,
            probe_horizon: horizon.probe,
            cutoff: CUTOFF,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    #[serde(flatten)]
    pub verdict: Verdict,
    /// Sup of `ratio.hi` over the tail window.
    pub tail_sup: f64,
    pub samples: Vec<CriterionSample>,
    pub heuristic: Heuristic,
    pub truncation: Truncation,
    /// True when every sample with a generator value satisfies the sandwich.
    pub sandwich_holds: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl CriterionReport {
    /// `t,ratio_lo,ratio_hi,g_abs` rows; missing values are empty fields.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,ratio_lo,ratio_hi,g_abs\n");
        for s in &self.samples {
            let hi = if s.ratio.hi.is_finite() { s.ratio.hi.to_string() } else { "inf".into() };
            let g = s.g_abs.map(|g| g.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{},{}\n", s.t, s.ratio.lo, hi, g));
        }
        out
    }
}

/// Backward tail times before the machine cutoff, with their images.
fn tail_images(sg: &Semigroup, w0: Complex64, horizon: f64) -> Result<Vec<(f64, Complex64)>> {
    let grid = tail_grid(horizon, sg.tmax());
    let ok: Vec<Result<bool>> = par::map(&grid, |&t| {
        let p = sg.backward_image(w0, t);
        if !sg.omega().contains(p) {
            return Ok(false);
        }
        Ok(sg.omega().boundary_distance(p)? >= CUTOFF)
    });
    let mut out = Vec::new();
    for (t, ok) in grid.iter().zip(ok) {
        if !ok? {
            break;
        }
        out.push((*t, sg.backward_image(w0, *t)));
    }
    Ok(out)
}

fn horizon_for(sg: &Semigroup, start: Start) -> Result<Horizon> {
    sg.backward_horizon(start)
}

/// The ratio `e^{Re μ t} λ_Ω(b) / e^{2 k_Ω(w0, b)}` (weight 1 when non-elliptic),
/// evaluated in log space from the metric enclosures.
fn ratio(sg: &Semigroup, w0: Complex64, t: f64, b: Complex64) -> Result<Interval> {
    let lam = domain_density(sg.omega(), b)?;
    let k = if t == 0.0 {
        Interval::point(0.0)
    } else {
        domain_distance(sg.omega(), w0, b, None)?
    };
    let weight = match sg.kind() {
        SemigroupKind::NonElliptic => 0.0,
        SemigroupKind::Elliptic { mu } => mu.re * t,
    };
    let ln_lo = lam.lo.ln() + weight - 2.0 * k.hi;
    let ln_hi = lam.hi.ln() + weight - 2.0 * k.lo;
    Ok(Interval::new(
        ln_lo.exp() * (1.0 - INFLATION),
        ln_hi.exp() * (1.0 + INFLATION),
    ))
}

/// Backward-orbit criterion on the tail grid with sandwich checks and a
/// heuristic verdict.
pub fn backward_criterion(sg: &Semigroup, start: Start, heuristic: &Heuristic) -> Result<CriterionReport> {
    let w0 = sg.koenigs_image(start)?;
    let horizon = horizon_for(sg, start)?;
    let images = tail_images(sg, w0, horizon.value)?;
    let z = match start {
        Start::Disk(z) => Some(z),
        Start::Koenigs(w) if sg.koenigs().is_some() => Some(sg.generator_at_image(w, None)?.0),
        Start::Koenigs(_) => None,
    };
    let scale = match sg.kind() {
        SemigroupKind::NonElliptic => 1.0,
        SemigroupKind::Elliptic { mu } => (mu * w0).norm(),
    };
    let samples: Vec<Result<CriterionSample>> = par::map(&images, |&(t, b)| {
        let ratio = ratio(sg, w0, t, b)?;
        let g_abs = match sg.koenigs() {
            Some(_) => Some(sg.generator_at_image(b, None)?.1.norm()),
            None => None,
        };
        let sandwich = match (g_abs, z) {
            (Some(g), Some(z)) => {
                let r = z.norm();
                let lower = (1.0 - r) / (1.0 + r) * scale * ratio.lo;
                let upper = 4.0 * (1.0 + r) / (1.0 - r) * scale * ratio.hi;
                Some(lower - SANDWICH_SLACK <= g && g <= upper + SANDWICH_SLACK)
            }
            _ => None,
        };
        Ok(CriterionSample {
            t,
            ratio,
            g_abs,
            sandwich,
        })
    });
    let samples: Vec<CriterionSample> = samples.into_iter().collect::<Result<_>>()?;
    let (verdict, tail_sup) = decide(&samples, horizon.value, heuristic);
    Ok(CriterionReport {
        verdict,
        tail_sup,
        sandwich_holds: samples.iter().all(|s| s.sandwich != Some(false)),
        samples,
        heuristic: *heuristic,
        truncation: Truncation::new(sg, &horizon),
        note: None,
    })
}

fn tail_window<T: Copy>(items: &[T], times: impl Fn(&T) -> f64, window: usize) -> Vec<T> {
    let positive: Vec<T> = items.iter().copied().filter(|s| times(s) > 0.0).collect();
    positive[positive.len().saturating_sub(window.max(2))..].to_vec()
}

fn decide(samples: &[CriterionSample], horizon: f64, h: &Heuristic) -> (Verdict, f64) {
    let tail = tail_window(samples, |s| s.t, h.window);
    if tail.len() < 2 {
        return (Verdict::Inconclusive, f64::NAN);
    }
    let coords: Vec<f64> = tail.iter().map(|s| tail_coordinate(s.t, horizon)).collect();
    let ln_hi: Vec<f64> = tail.iter().map(|s| s.ratio.hi.ln()).collect();
    let ln_lo: Vec<f64> = tail.iter().map(|s| s.ratio.lo.ln()).collect();
    let tail_sup = tail.iter().map(|s| s.ratio.hi).fold(0.0, f64::max);
    let growth_hi = growth_per_decade(&coords, &ln_hi);
    if tail_sup <= h.threshold && growth_hi <= 1.0 + h.flat_tol {
        let bound = samples.iter().map(|s| s.ratio.hi).fold(0.0, f64::max);
        return (Verdict::Certified { bound }, tail_sup);
    }
    let lo: Vec<f64> = tail.iter().map(|s| s.ratio.lo).collect();
    let growth_lo = growth_per_decade(&coords, &ln_lo);
    if strictly_increasing(&lo) && growth_lo >= h.rho && lo[lo.len() - 1] > h.threshold {
        return (Verdict::RefutedTrend, tail_sup);
    }
    (Verdict::Inconclusive, tail_sup)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorLimsup {
    /// `(t, |G|)` along the backward tail grid.
    pub samples: Vec<(f64, f64)>,
    pub sup_tail: f64,
    /// Per-decade growth of `|G|` across the tail window.
    pub growth: f64,
    pub bounded: bool,
    #[serde(with = "inf_as_null")]
    pub horizon: f64,
}

/// `|G|` along the backward orbit toward the horizon.
pub fn backward_generator_limsup(sg: &Semigroup, start: Start, heuristic: &Heuristic) -> Result<GeneratorLimsup> {
    if sg.koenigs().is_none() {
        return Err(Error::Unsupported("generator values need a Koenigs map".into()));
    }
    let w0 = sg.koenigs_image(start)?;
    let horizon = horizon_for(sg, start)?.value;
    let images = tail_images(sg, w0, horizon)?;
    let g: Vec<Result<f64>> = par::map(&images, |&(_, b)| Ok(sg.generator_at_image(b, None)?.1.norm()));
    let samples: Vec<(f64, f64)> = images
        .iter()
        .zip(g)
        .map(|(&(t, _), g)| g.map(|g| (t, g)))
        .collect::<Result<_>>()?;
    let tail = tail_window(&samples, |s| s.0, heuristic.window);
    let sup_tail = tail.iter().map(|s| s.1).fold(0.0, f64::max);
    let coords: Vec<f64> = tail.iter().map(|s| tail_coordinate(s.0, horizon)).collect();
    let ln_g: Vec<f64> = tail.iter().map(|s| s.1.ln()).collect();
    let growth = growth_per_decade(&coords, &ln_g);
    Ok(GeneratorLimsup {
        bounded: sup_tail <= heuristic.threshold && growth <= 1.0 + heuristic.flat_tol,
        samples,
        sup_tail,
        growth,
        horizon,
    })
}
