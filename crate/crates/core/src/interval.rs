//! Two-sided enclosures carried by the hyperbolic kernel.
//!
//! Plain floating point with a fixed relative inflation of `1e-12` applied
//! after each arithmetic step. An upper endpoint of `+inf` means "no upper
//! bound is available".

use serde::{Deserialize, Serialize};

/// Relative widening applied after every interval operation.
pub const INFLATION: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    #[serde(with = "inf_as_null")]
    pub hi: f64,
}

/// Serializes `+∞` as JSON `null`.
pub mod inf_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

fn widen_down(v: f64) -> f64 {
    if v.is_finite() {
        v - INFLATION * v.abs()
    } else {
        v
    }
}

fn widen_up(v: f64) -> f64 {
    if v.is_finite() {
        v + INFLATION * v.abs()
    } else {
        v
    }
}

impl Interval {
    /// Builds `[lo, hi]`; panics in debug builds when the endpoints are out of order.
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "interval endpoints out of order: {lo} > {hi}");
        debug_assert!(!lo.is_nan() && !hi.is_nan());
        Interval { lo, hi }
    }

    pub fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    /// Lower bound only.
    pub fn at_least(lo: f64) -> Self {
        Interval {
            lo,
            hi: f64::INFINITY,
        }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.hi.is_finite()
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        if self.hi.is_finite() {
            0.5 * (self.lo + self.hi)
        } else {
            self.lo
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    /// Contains `v` up to an absolute slack.
    pub fn contains_within(&self, v: f64, slack: f64) -> bool {
        self.lo - slack <= v && v <= self.hi + slack
    }

    fn widened(lo: f64, hi: f64) -> Self {
        Interval::new(widen_down(lo), widen_up(hi))
    }

    pub fn add(self, other: Interval) -> Interval {
        Interval::widened(self.lo + other.lo, self.hi + other.hi)
    }

    /// Multiplication by a nonnegative scalar.
    pub fn scale(self, k: f64) -> Interval {
        assert!(k >= 0.0, "scale factor must be nonnegative");
        if k == 0.0 {
            return Interval::point(0.0);
        }
        Interval::widened(self.lo * k, self.hi * k)
    }

    /// Product of two nonnegative intervals.
    pub fn mul_nonneg(self, other: Interval) -> Interval {
        assert!(self.lo >= 0.0 && other.lo >= 0.0);
        let hi = if self.hi == 0.0 || other.hi == 0.0 {
            0.0
        } else {
            self.hi * other.hi
        };
        Interval::widened(self.lo * other.lo, hi)
    }

    pub fn exp(self) -> Interval {
        Interval::widened(self.lo.exp(), self.hi.exp())
    }

    /// Natural logarithm of a positive interval.
    pub fn ln(self) -> Interval {
        assert!(self.lo >= 0.0, "log of an interval reaching below zero");
        Interval::widened(self.lo.ln(), self.hi.ln())
    }

    /// Reciprocal of a positive interval; `1/0 = +inf`, `1/inf = 0`.
    pub fn recip(self) -> Interval {
        assert!(self.lo >= 0.0, "reciprocal of an interval reaching below zero");
        let lo = if self.hi.is_finite() { 1.0 / self.hi } else { 0.0 };
        let hi = if self.lo > 0.0 { 1.0 / self.lo } else { f64::INFINITY };
        Interval::widened(lo, hi)
    }

    /// Quotient of nonnegative intervals.
    pub fn div_nonneg(self, other: Interval) -> Interval {
        self.mul_nonneg(other.recip())
    }

    pub fn neg(self) -> Interval {
        Interval::new(-self.hi, -self.lo)
    }

    pub fn hull(self, other: Interval) -> Interval {
        Interval::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    /// Intersection; `None` when disjoint.
    pub fn intersect(self, other: Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then(|| Interval::new(lo, hi))
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
