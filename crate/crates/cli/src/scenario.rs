//! Scenario files: which semigroup, which starting points, which grids.

use std::path::PathBuf;

use koenigs_core::analysis::Heuristic;
use koenigs_core::scenarios::{Anchored, Builtin, DEFAULT_CHANNEL_TRUNCATION};
use koenigs_core::semigroup::{Semigroup, SemigroupSpec, Start};
use koenigs_core::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub semigroup: SemigroupSource,
    /// Starting points as `[re, im]`.
    pub starts: Vec<Complex64>,
    #[serde(default)]
    pub start_space: StartSpace,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default)]
    pub analyses: Analyses,
    #[serde(default)]
    pub heuristic: Heuristic,
    /// Probe horizon override.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tmax: Option<f64>,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SemigroupSource {
    Builtin {
        name: Builtin,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        channel_truncation: Option<f64>,
    },
    Anchored {
        example: Anchored,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        slit_pairs: Option<u32>,
    },
    Custom(SemigroupSpec),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartSpace {
    /// Points in the unit disk.
    #[default]
    Disk,
    /// Points of the Koenigs domain.
    Koenigs,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Grids {
    pub forward: Vec<f64>,
    pub backward: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Analyses {
    pub criterion: bool,
    pub generator_limsup: bool,
    pub regularity: bool,
    pub euclidean: bool,
    pub forward_certificate: bool,
    pub hayman_wu: bool,
    pub shift: bool,
}

impl Default for Analyses {
    fn default() -> Self {
        Analyses {
            criterion: true,
            generator_limsup: false,
            regularity: false,
            euclidean: false,
            forward_certificate: false,
            hayman_wu: false,
            shift: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Outputs {
    /// Directory for emitted files; `--out` takes precedence.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

impl Scenario {
    pub fn parse(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Canonical JSON form.
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("scenario serializes")
    }

    /// Applies the command-line truncation to whichever truncation the
    /// semigroup has.
    pub fn set_truncation(&mut self, n: f64) {
        match &mut self.semigroup {
            SemigroupSource::Builtin { channel_truncation, .. } => *channel_truncation = Some(n),
            SemigroupSource::Anchored { slit_pairs, .. } => *slit_pairs = Some(n as u32),
            SemigroupSource::Custom(_) => {}
        }
    }

    pub fn channel_truncation(&self) -> Option<f64> {
        match &self.semigroup {
            SemigroupSource::Builtin {
                name: Builtin::Example2Channel,
                channel_truncation,
            } => Some(channel_truncation.unwrap_or(DEFAULT_CHANNEL_TRUNCATION)),
            _ => None,
        }
    }

    pub fn build(&self) -> koenigs_core::Result<Semigroup> {
        let sg = match &self.semigroup {
            SemigroupSource::Builtin { name, channel_truncation } => {
                name.semigroup(channel_truncation.unwrap_or(DEFAULT_CHANNEL_TRUNCATION))?
            }
            SemigroupSource::Anchored { example, slit_pairs } => {
                example.semigroup(slit_pairs.unwrap_or(koenigs_core::domains::DEFAULT_SLIT_PAIRS))?
            }
            SemigroupSource::Custom(spec) => spec.build()?,
        };
        match self.tmax {
            Some(t) => sg.with_tmax(t),
            None => Ok(sg),
        }
    }

    pub fn start(&self, p: Complex64) -> Start {
        match self.start_space {
            StartSpace::Disk => Start::Disk(p),
            StartSpace::Koenigs => Start::Koenigs(p),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_unknown_keys() {
        let text = r#"{"semigroup":{"builtin":{"name":"half_plane"}},"starts":[[0,0]],"grids":{"forward":[0,1,2]}}"#;
        let s = Scenario::parse(text).unwrap();
        let again = Scenario::parse(&s.canonical()).unwrap();
        assert_eq!(s, again);
        assert_eq!(again.canonical(), s.canonical());
        let bad = r#"{"semigroup":{"builtin":{"name":"half_plane"}},"starts":[],"colour":1}"#;
        assert!(Scenario::parse(bad).is_err());
    }
}
