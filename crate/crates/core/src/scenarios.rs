//! Built-in semigroups with closed-form or fitted Koenigs maps, and the
//! domain-only semigroups of the worked examples.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::confmap::{MapExpr, Primitive, StripChannel};
use crate::domains::{example1_domain, example2_domain, example3_domain, exp_channel_domain, DomainKind};
use crate::semigroup::{Semigroup, SemigroupKind};
use crate::{Complex64, Domain, Result};

/// Default truncation of the fitted logarithmic channel.
pub const DEFAULT_CHANNEL_TRUNCATION: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    /// `h` = Cayley map onto the right half-plane.
    HalfPlane,
    /// `h = (2/π) log((1+z)/(1-z))` onto `|Im w| < 1`.
    Strip,
    /// `h = i(1+z)/(1-z)` onto the upper half-plane.
    UpperHalfPlane,
    /// `h = id`, `μ = 1`.
    EllipticDilation,
    /// `h = id`, `μ = 1 + i`.
    EllipticSpiral,
    /// Fitted map onto a logarithmically narrowing channel.
    Example2Channel,
}

impl Builtin {
    pub const ALL: [Builtin; 6] = [
        Builtin::HalfPlane,
        Builtin::Strip,
        Builtin::UpperHalfPlane,
        Builtin::EllipticDilation,
        Builtin::EllipticSpiral,
        Builtin::Example2Channel,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Builtin::HalfPlane => "half_plane",
            Builtin::Strip => "strip",
            Builtin::UpperHalfPlane => "upper_half_plane",
            Builtin::EllipticDilation => "elliptic_dilation",
            Builtin::EllipticSpiral => "elliptic_spiral",
            Builtin::Example2Channel => "example2_channel",
        }
    }

    pub fn from_name(name: &str) -> Option<Builtin> {
        Builtin::ALL.into_iter().find(|b| b.name() == name)
    }

    pub fn is_elliptic(&self) -> bool {
        matches!(self, Builtin::EllipticDilation | Builtin::EllipticSpiral)
    }

    /// Whether the Koenigs domain is convex.
    pub fn convex(&self) -> bool {
        !matches!(self, Builtin::Example2Channel)
    }

    /// The semigroup; `channel_truncation` only affects the fitted channel.
    pub fn semigroup(&self, channel_truncation: f64) -> Result<Semigroup> {
        let disk = Domain::unit_disk;
        let koenigs = |chain: Vec<Primitive>| MapExpr::new(chain, disk(), Domain::plane());
        match self {
            Builtin::HalfPlane => Semigroup::new(
                SemigroupKind::NonElliptic,
                koenigs(vec![Primitive::cayley()])?,
                Domain::right_half_plane(),
            ),
            Builtin::Strip => Semigroup::new(
                SemigroupKind::NonElliptic,
                koenigs(vec![
                    Primitive::cayley(),
                    Primitive::Log { branch: 0.0 },
                    Primitive::affine(c(2.0 / PI, 0.0), c(0.0, 0.0))?,
                ])?,
                Domain::strip(1.0, 0.0)?,
            ),
            Builtin::UpperHalfPlane => Semigroup::new(
                SemigroupKind::NonElliptic,
                koenigs(vec![Primitive::cayley(), Primitive::affine(c(0.0, 1.0), c(0.0, 0.0))?])?,
                Domain::upper_half_plane(),
            ),
            Builtin::EllipticDilation => Semigroup::new(
                SemigroupKind::Elliptic { mu: c(1.0, 0.0) },
                MapExpr::identity(disk()),
                disk(),
            ),
            Builtin::EllipticSpiral => Semigroup::new(
                SemigroupKind::Elliptic { mu: c(1.0, 1.0) },
                MapExpr::identity(disk()),
                disk(),
            ),
            Builtin::Example2Channel => channel_semigroup(channel_truncation),
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Non-elliptic semigroup onto the exact image of the fitted channel map.
pub fn channel_semigroup(truncation: f64) -> Result<Semigroup> {
    let (map, offset) = StripChannel::fit_log_channel(truncation)?;
    let map = Arc::new(map);
    let h = MapExpr::new(
        vec![
            Primitive::cayley(),
            Primitive::Log { branch: 0.0 },
            Primitive::StripChannel(map.clone()),
            Primitive::affine(c(1.0, 0.0), c(offset, 0.0))?,
        ],
        Domain::unit_disk(),
        Domain::plane(),
    )?;
    let omega = Domain::new(DomainKind::StripImage { map, offset })?;
    Semigroup::new(SemigroupKind::NonElliptic, h, omega)
}

/// Worked examples known through their Koenigs domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Anchored {
    /// Strip `|Im w| < 2` with slit pairs at `±1/n` from `-2^n` leftward.
    SlitStrip,
    /// Half-plane joined to a channel of half-width `1/ln|x|`.
    LogChannel,
    /// As above with the lower edge shifted down by one.
    ShiftedLogChannel,
    /// Half-plane joined to a channel of half-width `e^x`.
    ExpChannel,
}

impl Anchored {
    pub fn semigroup(&self, slit_pairs: u32) -> Result<Semigroup> {
        let omega = match self {
            Anchored::SlitStrip => example1_domain(slit_pairs)?,
            Anchored::LogChannel => example2_domain(),
            Anchored::ShiftedLogChannel => example3_domain(),
            Anchored::ExpChannel => exp_channel_domain(),
        };
        Semigroup::anchored(SemigroupKind::NonElliptic, omega)
    }
}
