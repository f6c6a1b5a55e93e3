//! Sequence files: one TOML object per file, angles in units of π.
//!
//! ```toml
//! name = "my-x3"
//! theta_pi = 1.0
//! claimed_order = 1
//!
//! [[pulses]]
//! area_pi = 1.0
//! phase_pi = 0.1666666666666667
//! ```

use std::f64::consts::PI;
use std::path::Path;

use cpulse_core::{CompositeSequence, Family};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseEntry {
    pub area_pi: f64,
    pub phase_pi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceFile {
    pub name: String,
    pub theta_pi: f64,
    /// Layout used when the sequence is refined; defaults to `custom`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed_range_pi: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed_total_area_pi: Option<f64>,
    pub pulses: Vec<PulseEntry>,
}

impl SequenceFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn from_sequence(name: &str, seq: &CompositeSequence) -> Self {
        SequenceFile {
            name: name.to_string(),
            theta_pi: seq.target_theta() / PI,
            family: Some(seq.family().as_str().to_string()),
            claimed_order: None,
            claimed_range_pi: None,
            claimed_total_area_pi: None,
            pulses: seq
                .pairs()
                .into_iter()
                .map(|(a, p)| PulseEntry {
                    area_pi: a / PI,
                    phase_pi: p / PI,
                })
                .collect(),
        }
    }

    pub fn family(&self) -> Result<Family> {
        match &self.family {
            None => Ok(Family::Custom),
            Some(s) => Family::parse(s).ok_or_else(|| Error::Record {
                name: self.name.clone(),
                reason: format!("unknown family `{s}`"),
            }),
        }
    }

    pub fn sequence(&self) -> Result<CompositeSequence> {
        let pairs: Vec<(f64, f64)> = self
            .pulses
            .iter()
            .map(|p| (p.area_pi * PI, p.phase_pi * PI))
            .collect();
        Ok(CompositeSequence::from_pairs(
            &pairs,
            self.theta_pi * PI,
            self.family()?,
        )?)
    }
}
