use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::lattice::{LatticeSignal, SignalFile, TileSet, TileSetFile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Violated,
    NotApplicable,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Holds => "holds",
            Status::Violated => "violated",
            Status::NotApplicable => "not applicable",
        })
    }
}

/// Inputs that reproduce a report.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub signals: Vec<(String, SignalFile)>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub sets: Vec<(String, TileSetFile)>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub params: BTreeMap<String, f64>,
}

impl Witness {
    pub fn signal(mut self, name: &str, s: &LatticeSignal) -> Self {
        self.signals.push((name.to_string(), SignalFile::from_signal(s)));
        self
    }

    pub fn set(mut self, name: &str, s: &TileSet) -> Self {
        self.sets.push((name.to_string(), TileSetFile::from_tileset(s)));
        self
    }

    pub fn param(mut self, name: &str, v: f64) -> Self {
        self.params.insert(name.to_string(), v);
        self
    }
}

/// One verification outcome. `slack ≥ -tolerance` means the inequality holds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub details: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
    pub witness: Witness,
}

impl InequalityReport {
    pub fn new(name: &str, lhs: f64, rhs: f64, slack: f64, tolerance: f64) -> Self {
        let status = if slack >= -tolerance {
            Status::Holds
        } else {
            Status::Violated
        };
        Self {
            name: name.to_string(),
            lhs,
            rhs,
            slack,
            tolerance,
            status,
            seed: None,
            details: BTreeMap::new(),
            notes: Vec::new(),
            witness: Witness::default(),
        }
    }

    /// Hypothesis not met; the conclusion is not tested.
    pub fn not_applicable(name: &str, reason: impl Into<String>) -> Self {
        let mut r = Self::new(name, 0.0, 0.0, 0.0, 0.0);
        r.status = Status::NotApplicable;
        r.notes.push(reason.into());
        r
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Violated
    }

    pub fn detail(mut self, key: &str, value: f64) -> Self {
        self.details.insert(key.to_string(), value);
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    pub fn with_witness(mut self, witness: Witness) -> Self {
        self.witness = witness;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub const CSV_HEADER: [&'static str; 6] = ["name", "lhs", "rhs", "slack", "tolerance", "seed"];

    pub fn csv_record(&self) -> [String; 6] {
        [
            self.name.clone(),
            format_float(self.lhs),
            format_float(self.rhs),
            format_float(self.slack),
            format_float(self.tolerance),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
        ]
    }
}

/// 17 significant digits, locale-free.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}
