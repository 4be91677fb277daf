use serde::{Deserialize, Serialize};

use super::length::{lipschitz_quotient, orbit_point, Direction, DEFAULT_PAIR_BUDGET};
use super::{growth_per_decade, strictly_increasing, tail_coordinate, Heuristic, CUTOFF};
use crate::domains::DomainKind;
use crate::hypgeo::domain_distance;
use crate::interval::{inf_as_null, Interval};
use crate::semigroup::{Semigroup, Start};
use crate::{par, Complex64, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegularityClass {
    FiniteHorizon,
    Regular,
    NonRegular,
    /// Neither bounded nor monotonically growing steps were detected.
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitStep {
    pub t: f64,
    /// Hyperbolic distance between the orbit at `t` and at `t + 1`.
    pub distance: Interval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub class: RegularityClass,
    #[serde(with = "inf_as_null")]
    pub horizon: f64,
    pub steps: Vec<UnitStep>,
}

fn usable(sg: &Semigroup, p: Complex64) -> Result<bool> {
    Ok(sg.omega().contains(p) && sg.omega().boundary_distance(p)? >= CUTOFF)
}

/// Doubling times `1, 2, 4, …, ≤ tmax`.
fn doubling(tmax: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut t = 1.0;
    while t <= tmax {
        out.push(t);
        t *= 2.0;
    }
    out
}

/// Unit-step hyperbolic distances along the backward orbit at doubling times.
pub fn regularity_classify(sg: &Semigroup, start: Start, heuristic: &Heuristic) -> Result<RegularityReport> {
    let w0 = sg.koenigs_image(start)?;
    let horizon = sg.backward_horizon(start)?.value;
    if horizon.is_finite() {
        return Ok(RegularityReport {
            class: RegularityClass::FiniteHorizon,
            horizon,
            steps: Vec::new(),
        });
    }
    let times = doubling(sg.tmax());
    let steps: Vec<Result<Option<UnitStep>>> = par::map(&times, |&t| {
        let a = sg.backward_image(w0, t);
        let b = sg.backward_image(w0, t + 1.0);
        if !usable(sg, a)? || !usable(sg, b)? {
            return Ok(None);
        }
        Ok(Some(UnitStep {
            t,
            distance: domain_distance(sg.omega(), a, b, None)?,
        }))
    });
    let mut kept = Vec::new();
    for s in steps {
        match s? {
            Some(s) => kept.push(s),
            None => break,
        }
    }
    let tail = &kept[kept.len().saturating_sub(heuristic.window.max(2))..];
    let class = if tail.len() < 2 {
        RegularityClass::Undetermined
    } else {
        let coords: Vec<f64> = tail.iter().map(|s| s.t).collect();
        let ln_hi: Vec<f64> = tail.iter().map(|s| s.distance.hi.ln()).collect();
        let sup_hi = kept.iter().map(|s| s.distance.hi).fold(0.0, f64::max);
        let lo: Vec<f64> = tail.iter().map(|s| s.distance.lo).collect();
        if sup_hi < heuristic.regular_threshold && growth_per_decade(&coords, &ln_hi) <= 1.0 + heuristic.flat_tol {
            RegularityClass::Regular
        } else if strictly_increasing(&lo) {
            RegularityClass::NonRegular
        } else {
            RegularityClass::Undetermined
        }
    };
    Ok(RegularityReport {
        class,
        horizon,
        steps: kept,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EuclideanTest {
    /// `(t, t·δ_Ω(h(z) - t))` on doubling times.
    pub samples: Vec<(f64, f64)>,
    /// Running minimum over the tail `t ≥ 1`.
    pub liminf_estimate: f64,
    pub pass: bool,
}

/// Checks that `t·δ_Ω(h(z) - t)` stays away from zero along the backward orbit.
pub fn euclidean_sufficient_test(sg: &Semigroup, start: Start, heuristic: &Heuristic) -> Result<EuclideanTest> {
    if sg.is_elliptic() {
        return Err(Error::param("the Euclidean test applies to non-elliptic semigroups"));
    }
    let w0 = sg.koenigs_image(start)?;
    let horizon = sg.backward_horizon(start)?.value;
    if horizon.is_finite() {
        return Err(Error::param(format!(
            "the Euclidean test needs an infinite backward horizon, found {horizon}"
        )));
    }
    let times = doubling(sg.tmax());
    let values: Vec<Result<Option<f64>>> = par::map(&times, |&t| {
        let p = sg.backward_image(w0, t);
        if !sg.omega().contains(p) {
            return Ok(None);
        }
        let d = sg.omega().boundary_distance(p)?;
        Ok((d >= CUTOFF).then_some(t * d))
    });
    let mut samples = Vec::new();
    for (t, v) in times.iter().zip(values) {
        match v? {
            Some(v) => samples.push((*t, v)),
            None => break,
        }
    }
    // Samples end at the cutoff; a collapsed distance counts as zero.
    let truncated = samples.len() < times.len();
    let mut liminf = samples.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    if truncated {
        liminf = 0.0;
    }
    Ok(EuclideanTest {
        pass: liminf >= heuristic.epsilon,
        liminf_estimate: liminf,
        samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShiftClass {
    Finite,
    Infinite,
    NotApplicable,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftReport {
    pub class: ShiftClass,
    /// Denjoy–Wolff point on the unit circle.
    pub denjoy_wolff: Option<Complex64>,
    /// `(t, Re C(γ(t)))` on doubling times.
    pub samples: Vec<(f64, f64)>,
    pub sup: Option<f64>,
    /// Lipschitz quotient of `C ∘ γ` on `[0, 50]`.
    pub quotient: Option<f64>,
    /// Whether the class agrees with a bounded quotient.
    pub consistent: Option<bool>,
}

impl ShiftReport {
    fn not_applicable() -> Self {
        ShiftReport {
            class: ShiftClass::NotApplicable,
            denjoy_wolff: None,
            samples: Vec::new(),
            sup: None,
            quotient: None,
            consistent: None,
        }
    }
}

/// Whether the Koenigs domain lies in a horizontal half-plane and in no
/// horizontal strip.
fn shift_applicable(kind: &DomainKind) -> bool {
    match kind {
        DomainKind::HalfPlane { normal_angle, .. } => normal_angle.cos().abs() < 1e-12,
        _ => false,
    }
}

/// Finite/infinite shift through `Re C(γ(t))` with `C(z) = (τ+z)/(τ-z)`.
pub fn shift_classify(sg: &Semigroup, z: Complex64, heuristic: &Heuristic) -> Result<ShiftReport> {
    if sg.is_elliptic() || !shift_applicable(sg.omega().kind()) {
        return Ok(ShiftReport::not_applicable());
    }
    let dw = sg.denjoy_wolff_estimate()?;
    let tau = dw.point / dw.point.norm();
    let w0 = sg.koenigs_image(Start::Disk(z))?;
    let cayley = |p: Complex64| (tau + p) / (tau - p);
    let mut times = vec![0.0];
    times.extend(doubling(sg.tmax()));
    let values: Vec<Result<f64>> = par::map(&times, |&t| {
        Ok(cayley(orbit_point(sg, w0, Direction::Forward, t)?).re)
    });
    let samples: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .map(|(&t, v)| v.map(|v| (t, v)))
        .collect::<Result<_>>()?;
    let sup = samples.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    let tail = &samples[samples.len().saturating_sub(heuristic.window.max(2))..];
    let coords: Vec<f64> = tail.iter().map(|s| tail_coordinate(s.0, f64::INFINITY)).collect();
    let ln_v: Vec<f64> = tail.iter().map(|s| s.1.abs().ln()).collect();
    let growth = growth_per_decade(&coords, &ln_v);
    let vals: Vec<f64> = tail.iter().map(|s| s.1).collect();
    let class = if sup <= heuristic.threshold && growth <= 1.0 + heuristic.flat_tol {
        ShiftClass::Finite
    } else if strictly_increasing(&vals) && growth >= heuristic.rho {
        ShiftClass::Infinite
    } else {
        ShiftClass::Undetermined
    };
    let quotient = lipschitz_quotient(
        |t| Ok(cayley(orbit_point(sg, w0, Direction::Forward, t)?)),
        0.0,
        50.0,
        DEFAULT_PAIR_BUDGET,
    )?;
    let consistent = match class {
        ShiftClass::Finite => Some(quotient <= heuristic.threshold),
        ShiftClass::Infinite => Some(quotient.is_finite()),
        _ => None,
    };
    Ok(ShiftReport {
        class,
        denjoy_wolff: Some(tau),
        samples,
        sup: Some(sup),
        quotient: Some(quotient),
        consistent,
    })
}
