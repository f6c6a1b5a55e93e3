//! Published sequences, embedded as `data/catalog.toml`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;
use std::sync::{Mutex, OnceLock};

use cpulse_core::solver::{polish, symmetric_x_phase_relations, Polished};
use cpulse_core::{CompositeSequence, Family};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Value;

const BUILTIN: &str = include_str!("../data/catalog.toml");

/// Which printed list a [`Correction`] applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    AreasPi,
    PhasesPi,
}

/// Replacement of a misprinted value; the printed value stays in the record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Correction {
    pub field: Field,
    pub index: usize,
    pub value: f64,
    pub note: String,
}

/// How the centre phase of a `symmetric-x` row is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Centre {
    /// Use the printed value.
    Printed,
    /// Rebuild it from the other phases through the zero-error condition.
    Reconstruct,
}

/// One record of the data file, exactly as stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Record {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alias_of: Option<String>,
    pub family: String,
    pub theta_pi: Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub areas_pi: Vec<Value>,
    pub phases_pi: Vec<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centre: Option<Centre>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame_offset_pi: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed_range_pi: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed_total_area_pi: Option<f64>,
    pub source: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub corrections: Vec<Correction>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CatalogFile {
    sequence: Vec<Record>,
}

impl Record {
    fn fail(&self, reason: impl Into<String>) -> Error {
        Error::Record {
            name: self.name.clone(),
            reason: reason.into(),
        }
    }

    pub fn family(&self) -> Result<Family> {
        Family::parse(&self.family)
            .ok_or_else(|| self.fail(format!("unknown family `{}`", self.family)))
    }

    pub fn theta(&self) -> Result<f64> {
        Ok(self.theta_pi.eval()? * PI)
    }

    /// Printed areas and phases with corrections applied, in units of π.
    pub fn corrected_values(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut areas = Vec::with_capacity(self.areas_pi.len());
        let mut phases = Vec::with_capacity(self.phases_pi.len());
        for (list, out, field) in [
            (&self.areas_pi, &mut areas, Field::AreasPi),
            (&self.phases_pi, &mut phases, Field::PhasesPi),
        ] {
            for (i, v) in list.iter().enumerate() {
                let fixed = self
                    .corrections
                    .iter()
                    .find(|c| c.field == field && c.index == i);
                out.push(match fixed {
                    Some(c) => c.value,
                    None => v.eval()?,
                });
            }
        }
        for c in &self.corrections {
            let len = match c.field {
                Field::AreasPi => self.areas_pi.len(),
                Field::PhasesPi => self.phases_pi.len(),
            };
            if c.index >= len {
                return Err(self.fail("correction index out of range"));
            }
        }
        Ok((areas, phases))
    }

    /// The sequence the record describes, in this crate's propagator convention.
    pub fn build(&self) -> Result<CompositeSequence> {
        let family = self.family()?;
        let theta = self.theta()?;
        let (areas, mut phases) = self.corrected_values()?;
        if phases.is_empty() {
            return Err(self.fail("no phases"));
        }
        if self.centre == Some(Centre::Reconstruct) {
            if family != Family::SymmetricX {
                return Err(self.fail("centre reconstruction needs the symmetric-x layout"));
            }
            let m = phases.len();
            let half: Vec<f64> = phases[..m - 1].iter().map(|p| p * PI).collect();
            let centre = if half.is_empty() {
                PI / 2.0
            } else {
                symmetric_x_phase_relations(&half)?.0
            };
            phases[m - 1] = centre / PI;
        }
        let offset = match &self.frame_offset_pi {
            Some(v) => v.eval()?,
            None => 0.0,
        };
        let ph: Vec<f64> = phases.iter().map(|p| (p + offset) * PI).collect();
        let ar: Vec<f64> = areas.iter().map(|a| a * PI).collect();
        let expect_areas = |n: usize| {
            if ar.len() == n {
                Ok(())
            } else {
                Err(self.fail(format!(
                    "family {} expects {n} areas, found {}",
                    self.family,
                    ar.len()
                )))
            }
        };
        let seq = match family {
            Family::SymmetricX => {
                expect_areas(0)?;
                CompositeSequence::symmetric_x(&ph)?.with_target(theta)?
            }
            Family::SymmetricRot => {
                expect_areas(1)?;
                CompositeSequence::symmetric_rot(ar[0], &ph, theta)?
            }
            Family::AsymTheta => {
                expect_areas(0)?;
                CompositeSequence::asym_theta(theta, &ph)?
            }
            Family::AsymAlphaBeta => {
                expect_areas(2)?;
                CompositeSequence::asym_alpha_beta(ar[0], ar[1], &ph, theta)?
            }
            Family::Custom => {
                expect_areas(ph.len())?;
                let pairs: Vec<_> = ar.iter().copied().zip(ph.iter().copied()).collect();
                CompositeSequence::from_pairs(&pairs, theta, Family::Custom)?
            }
        };
        Ok(seq)
    }
}

/// A catalog entry resolved to a sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedSequence {
    pub name: String,
    pub sequence: CompositeSequence,
    pub claimed_order: usize,
    /// Pulse-area interval `[lo, hi]` in units of π.
    pub claimed_range_pi: Option<(f64, f64)>,
    pub claimed_total_area_pi: Option<f64>,
    pub source: String,
    pub record: Record,
}

impl NamedSequence {
    pub fn family(&self) -> Family {
        self.sequence.family()
    }

    pub fn theta(&self) -> f64 {
        self.sequence.target_theta()
    }

    /// Printed centre of a reconstructed `symmetric-x` row, in units of π.
    pub fn printed_centre_pi(&self) -> Option<f64> {
        if self.record.centre != Some(Centre::Reconstruct) {
            return None;
        }
        self.record.phases_pi.last().and_then(|v| v.eval().ok())
    }
}

/// Filter for [`Catalog::list`]; `None` fields match everything.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Filter {
    pub family: Option<Family>,
    pub order: Option<usize>,
    pub theta_pi: Option<f64>,
}

impl Filter {
    fn matches(&self, e: &NamedSequence) -> bool {
        self.family.is_none_or(|f| f == e.family())
            && self.order.is_none_or(|o| o == e.claimed_order)
            && self
                .theta_pi
                .is_none_or(|t| (t - e.theta() / PI).abs() <= 1e-9)
    }
}

/// Name-indexed set of published sequences.
#[derive(Debug)]
pub struct Catalog {
    records: Vec<Record>,
    entries: Vec<NamedSequence>,
    index: BTreeMap<String, usize>,
    aliases: BTreeMap<String, String>,
    polished: Mutex<BTreeMap<String, Polished>>,
}

impl Catalog {
    /// The embedded catalog.
    pub fn builtin() -> &'static Catalog {
        static CATALOG: OnceLock<Catalog> = OnceLock::new();
        CATALOG.get_or_init(|| {
            Catalog::from_toml(BUILTIN).unwrap_or_else(|e| panic!("embedded catalog: {e}"))
        })
    }

    pub fn from_toml(text: &str) -> Result<Catalog> {
        let file: CatalogFile = toml::from_str(text)?;
        let mut entries = Vec::new();
        let mut index = BTreeMap::new();
        let mut aliases = BTreeMap::new();
        let mut seen = std::collections::BTreeSet::new();
        for r in &file.sequence {
            if !seen.insert(r.name.clone()) {
                return Err(r.fail("duplicate name"));
            }
            // Build every record, aliases included, so all writings are validated.
            let sequence = r.build()?;
            if let Some(target) = &r.alias_of {
                aliases.insert(r.name.clone(), target.clone());
                continue;
            }
            let claimed_order = r
                .claimed_order
                .ok_or_else(|| r.fail("missing claimed_order"))?;
            index.insert(r.name.clone(), entries.len());
            entries.push(NamedSequence {
                name: r.name.clone(),
                sequence,
                claimed_order,
                claimed_range_pi: r.claimed_range_pi.map(|[a, b]| (a, b)),
                claimed_total_area_pi: r.claimed_total_area_pi,
                source: r.source.clone(),
                record: r.clone(),
            });
        }
        for (alias, target) in &aliases {
            if !index.contains_key(target) {
                return Err(Error::Record {
                    name: alias.clone(),
                    reason: format!("alias target `{target}` is not a primary record"),
                });
            }
        }
        Ok(Catalog {
            records: file.sequence,
            entries,
            index,
            aliases,
            polished: Mutex::new(BTreeMap::new()),
        })
    }

    /// Looks up a name or alias.
    pub fn get(&self, name: &str) -> Result<&NamedSequence> {
        let key = self.aliases.get(name).map(String::as_str).unwrap_or(name);
        self.index
            .get(key)
            .map(|&i| &self.entries[i])
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    /// Primary entries in file order.
    pub fn entries(&self) -> &[NamedSequence] {
        &self.entries
    }

    /// All stored records, aliases included.
    pub fn records(&self) -> &[Record] {
        &self.records
    }

    /// `(alias, target)` pairs.
    pub fn aliases(&self) -> impl Iterator<Item = (&str, &str)> {
        self.aliases.iter().map(|(a, t)| (a.as_str(), t.as_str()))
    }

    /// The alternative writing stored under an alias name.
    pub fn alias_writing(&self, alias: &str) -> Result<CompositeSequence> {
        self.records
            .iter()
            .find(|r| r.name == alias && r.alias_of.is_some())
            .ok_or_else(|| Error::UnknownName(alias.to_string()))?
            .build()
    }

    pub fn list(&self, filter: &Filter) -> Vec<&NamedSequence> {
        self.entries.iter().filter(|e| filter.matches(e)).collect()
    }

    /// Entry refined to machine precision at its claimed order. Results are
    /// cached; the printed data is never modified.
    pub fn polished(&self, name: &str) -> Result<Polished> {
        let entry = self.get(name)?;
        if let Some(p) = self.polished.lock().expect("cache lock").get(&entry.name) {
            return Ok(p.clone());
        }
        let p = polish(&entry.sequence, entry.claimed_order)?;
        self.polished
            .lock()
            .expect("cache lock")
            .insert(entry.name.clone(), p.clone());
        Ok(p)
    }

    /// The records as a TOML data file.
    pub fn to_toml(&self) -> Result<String> {
        let file = CatalogFile {
            sequence: self.records.clone(),
        };
        Ok(toml::to_string(&file)?)
    }

    /// One CSV row per primary entry; pulses expanded, angles in units of π.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record([
            "name",
            "family",
            "theta_pi",
            "areas_pi",
            "phases_pi",
            "claimed_order",
            "claimed_range_lo_pi",
            "claimed_range_hi_pi",
            "claimed_total_area_pi",
            "source",
        ])?;
        let join = |v: Vec<f64>| {
            v.iter()
                .map(|x| format!("{:.12}", x / PI))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let opt = |x: Option<f64>| x.map(|v| format!("{v}")).unwrap_or_default();
        for e in &self.entries {
            w.write_record([
                e.name.clone(),
                e.family().to_string(),
                format!("{:.12}", e.theta() / PI),
                join(e.sequence.areas()),
                join(e.sequence.phases()),
                e.claimed_order.to_string(),
                opt(e.claimed_range_pi.map(|r| r.0)),
                opt(e.claimed_range_pi.map(|r| r.1)),
                opt(e.claimed_total_area_pi),
                e.source.clone(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
