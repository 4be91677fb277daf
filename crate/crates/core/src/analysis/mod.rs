//! Orbit lengths, Lipschitz certificates, the backward criterion, orbit
//! classification and spiral regularity audits.

mod ahlfors;
mod conjugation;
mod criterion;
mod length;
mod regularity;

pub use ahlfors::{ahlfors_audit, AhlforsOptions, AhlforsReport, SpiralSpec};
pub use conjugation::{
    conjugated_forward_check, conjugated_growth, ConjugatedBound, ConjugatedGrowth,
};
pub use criterion::{
    backward_criterion, backward_generator_limsup, CriterionReport, CriterionSample,
    GeneratorLimsup, Truncation, Verdict,
};
pub use length::{
    arc_length, bilipschitz_probe, forward_certificate, forward_constant, hayman_wu_audit,
    lipschitz_quotient, orbit_length, orbit_point, BiLipschitz, BiLipschitzVerdict,
    Direction, ForwardCertificate, HaymanWu, Length, DEFAULT_PAIR_BUDGET,
};
pub use regularity::{
    euclidean_sufficient_test, regularity_classify, shift_classify, EuclideanTest,
    RegularityClass, RegularityReport, ShiftClass, ShiftReport, UnitStep,
};

use serde::{Deserialize, Serialize};

/// Samples closer than this to the Koenigs-domain boundary are dropped.
pub const CUTOFF: f64 = 1e-13;

/// Trend-detection parameters recorded in every report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Heuristic {
    /// Number of trailing samples forming the tail window.
    pub window: usize,
    /// Per-decade growth factor that counts as divergence.
    pub rho: f64,
    /// Absolute threshold `M`.
    pub threshold: f64,
    /// Per-decade growth tolerated by a flat trend.
    pub flat_tol: f64,
    /// Bound on unit-step distances for a regular orbit.
    pub regular_threshold: f64,
    /// Floor for the running minimum of the Euclidean test.
    pub epsilon: f64,
}

impl Default for Heuristic {
    fn default() -> Self {
        Heuristic {
            window: 5,
            rho: 1.2,
            threshold: 1e3,
            flat_tol: 1e-3,
            regular_threshold: 50.0,
            epsilon: 1e-3,
        }
    }
}

/// Sampling times accumulating at the horizon: `T(1 - 2^{-j})` when it is
/// finite, `2^j ≤ tmax` otherwise. Always starts at 0.
pub fn tail_grid(horizon: f64, tmax: f64) -> Vec<f64> {
    let mut out = vec![0.0];
    if horizon.is_finite() {
        for j in 1..=60 {
            let t = horizon * (1.0 - (-(j as f64)).exp2());
            if t >= horizon || t <= *out.last().unwrap() {
                break;
            }
            out.push(t);
        }
    } else {
        let mut t = 0.25;
        while t <= tmax {
            out.push(t);
            t *= 2.0;
        }
    }
    out
}

/// Coordinate that grows without bound toward the horizon.
pub(crate) fn tail_coordinate(t: f64, horizon: f64) -> f64 {
    if horizon.is_finite() {
        1.0 / (horizon - t)
    } else {
        t
    }
}

/// Multiplicative growth per decade of the tail coordinate, from log values.
/// Returns 1 for constant data and 0 when the data collapse to zero.
pub(crate) fn growth_per_decade(coords: &[f64], ln_values: &[f64]) -> f64 {
    let n = coords.len();
    if n < 2 {
        return f64::NAN;
    }
    let (s0, s1) = (coords[0], coords[n - 1]);
    let (v0, v1) = (ln_values[0], ln_values[n - 1]);
    let decades = (s1 / s0).log10();
    if !(decades > 0.0) {
        return f64::NAN;
    }
    if v0 == f64::NEG_INFINITY && v1 == f64::NEG_INFINITY {
        return 1.0;
    }
    if v1 == f64::NEG_INFINITY {
        return 0.0;
    }
    if v0 == f64::NEG_INFINITY || v1 == f64::INFINITY {
        return f64::INFINITY;
    }
    ((v1 - v0) / decades).exp()
}

pub(crate) fn strictly_increasing(v: &[f64]) -> bool {
    v.len() >= 2 && v.windows(2).all(|p| p[1] > p[0])
}
