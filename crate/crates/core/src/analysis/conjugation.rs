use std::f64::consts::{LN_10, PI};

use serde::{Deserialize, Serialize};

use super::length::{lipschitz_quotient, orbit_point, Direction, DEFAULT_PAIR_BUDGET};
use crate::confmap::MapExpr;
use crate::semigroup::{Semigroup, Start};
use crate::{par, Complex64, Error, Result};

const BOUNDARY_SAMPLES: usize = 4096;
const HORIZON: f64 = 50.0;
/// Radius of the sampled boundary circle, inside any boundary singularity.
const RIM: f64 = 1.0 - 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjugatedBound {
    /// Starting point in the disk before conjugation.
    pub z: Complex64,
    /// Lipschitz quotient of `f ∘ γ_z` on `[0, 50]`.
    pub measured: f64,
    /// `4·sup δ_{f(D)}(f(γ_z)) / inf δ_Ω(h(γ_z))` over the sampled orbit.
    pub bound: f64,
    pub pass: bool,
}

/// For a bounded target `f(D)`, compares the conjugated orbit quotient with
/// the Koebe-type bound built from boundary distances.
pub fn conjugated_forward_check(sg: &Semigroup, f: &MapExpr, starts: &[Complex64]) -> Result<Vec<ConjugatedBound>> {
    let rim: Vec<Complex64> = (0..BOUNDARY_SAMPLES)
        .map(|k| f.eval_unchecked(Complex64::from_polar(RIM, 2.0 * PI * k as f64 / BOUNDARY_SAMPLES as f64)))
        .collect::<Result<_>>()?;
    if rim.iter().any(|p| !(p.re.is_finite() && p.im.is_finite())) {
        return Err(Error::param("conjugating map must have a bounded image"));
    }
    let times: Vec<f64> = (0..=500).map(|k| HORIZON * k as f64 / 500.0).collect();
    let rows: Vec<Result<ConjugatedBound>> = par::map(starts, |&z| {
        let w0 = sg.koenigs_image(Start::Disk(z))?;
        let mut sup_target = 0.0f64;
        let mut inf_source = f64::INFINITY;
        for &t in &times {
            let p = f.evaluate(orbit_point(sg, w0, Direction::Forward, t)?)?;
            let d = rim.iter().map(|q| (q - p).norm()).fold(f64::INFINITY, f64::min);
            sup_target = sup_target.max(d);
            inf_source = inf_source.min(sg.omega().boundary_distance(sg.forward_image(w0, t))?);
        }
        let bound = 4.0 * sup_target / inf_source;
        let measured = lipschitz_quotient(
            |t| f.evaluate(orbit_point(sg, w0, Direction::Forward, t)?),
            0.0,
            HORIZON,
            DEFAULT_PAIR_BUDGET,
        )?;
        Ok(ConjugatedBound {
            z,
            measured,
            bound,
            pass: measured <= bound,
        })
    });
    rows.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugatedGrowth {
    pub times: Vec<f64>,
    /// `log10` of a lower estimate of the quotient on `[0, T]`: the largest
    /// unit-time secant `|ζ(s) - ζ(s-1)|` seen at the listed times up to `T`.
    pub log10_quotient: Vec<f64>,
    pub increasing: bool,
}

/// Growth of the conjugated orbit quotient across the given times, evaluated
/// in extended range.
pub fn conjugated_growth(sg: &Semigroup, f: &MapExpr, z: Complex64, times: &[f64]) -> Result<ConjugatedGrowth> {
    if times.iter().any(|&t| !(t >= 1.0)) || times.windows(2).any(|p| !(p[1] > p[0])) {
        return Err(Error::param("growth times must be increasing and at least 1"));
    }
    let conj = sg.conjugate_version(f.clone())?;
    let zeta = f.evaluate(z)?;
    let mut running = f64::NEG_INFINITY;
    let mut log10_quotient = Vec::with_capacity(times.len());
    for &t in times {
        let a = conj.forward_point_ext(zeta, t)?;
        let b = conj.forward_point_ext(zeta, t - 1.0)?;
        running = running.max(a.sub(&b).ln_abs());
        log10_quotient.push(running / LN_10);
    }
    let increasing = log10_quotient.windows(2).all(|p| p[1] > p[0]);
    Ok(ConjugatedGrowth {
        times: times.to_vec(),
        log10_quotient,
        increasing,
    })
}
