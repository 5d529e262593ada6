//! JSON formats for signals and tile sets.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::index::{MultiIndex, SupportBox};
use super::signal::LatticeSignal;
use super::tiles::{Tile, TileSet};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalEntry {
    pub index: Vec<i64>,
    pub re: f64,
    pub im: f64,
}

/// `{dimension, half_width, entries: [{index, re, im}]}`; omitted entries are zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalFile {
    pub dimension: usize,
    pub half_width: usize,
    pub entries: Vec<SignalEntry>,
}

impl SignalFile {
    /// Every sample of the box, zeros included, in box order.
    pub fn from_signal(signal: &LatticeSignal) -> Self {
        Self {
            dimension: signal.dim(),
            half_width: signal.support().half_width(),
            entries: signal
                .iter()
                .map(|(index, v)| SignalEntry {
                    index,
                    re: v.re,
                    im: v.im,
                })
                .collect(),
        }
    }

    pub fn to_signal(&self) -> Result<LatticeSignal> {
        if self.dimension == 0 {
            return Err(Error::InvalidParameter("signal file: dimension must be at least 1".into()));
        }
        let support = SupportBox::new(self.dimension, self.half_width);
        let mut signal = LatticeSignal::zeros(support);
        for (i, e) in self.entries.iter().enumerate() {
            if e.index.len() != self.dimension {
                return Err(Error::InvalidParameter(format!(
                    "signal file: entries[{i}].index has {} coordinates, expected {}",
                    e.index.len(),
                    self.dimension
                )));
            }
            if !e.re.is_finite() || !e.im.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "signal file: entries[{i}] has a non-finite value"
                )));
            }
            signal
                .set(&e.index, Complex64::new(e.re, e.im))
                .map_err(|_| {
                    Error::InvalidParameter(format!(
                        "signal file: entries[{i}].index {:?} outside half_width {}",
                        e.index, self.half_width
                    ))
                })?;
        }
        Ok(signal)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TileEntry {
    pub m: Vec<i64>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

/// `{tiles: [{m, lo, hi}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TileSetFile {
    pub tiles: Vec<TileEntry>,
}

impl TileSetFile {
    pub fn from_tileset(set: &TileSet) -> Self {
        Self {
            tiles: set
                .tiles()
                .iter()
                .map(|t| TileEntry {
                    m: t.m.coords().to_vec(),
                    lo: t.lo.clone(),
                    hi: t.hi.clone(),
                })
                .collect(),
        }
    }

    pub fn to_tileset(&self) -> Result<TileSet> {
        let mut tiles = Vec::with_capacity(self.tiles.len());
        for (i, t) in self.tiles.iter().enumerate() {
            let m = MultiIndex::try_new(t.m.clone()).map_err(|_| {
                Error::InvalidParameter(format!("tile file: tiles[{i}].m is empty"))
            })?;
            tiles.push(Tile::new(m, t.lo.clone(), t.hi.clone()));
        }
        TileSet::new(tiles)
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    std::fs::write(path, text + "\n")
        .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))
}

pub fn read_signal(path: &Path) -> Result<LatticeSignal> {
    read_json::<SignalFile>(path)?.to_signal()
}

pub fn read_tileset(path: &Path) -> Result<TileSet> {
    read_json::<TileSetFile>(path)?.to_tileset()
}
