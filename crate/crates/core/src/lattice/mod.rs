//! Value types for the phase space ℤⁿ × 𝕋ⁿ.

pub mod field;
pub mod files;
pub mod index;
pub mod signal;
pub mod tiles;
pub mod torus;

pub use field::PhaseSpaceField;
pub use files::{SignalFile, TileSetFile};
pub use index::{MultiIndex, SupportBox};
pub use signal::LatticeSignal;
pub use tiles::{ball_tileset, grid_measure, indicator_on_grid, measure, Tile, TileSet};
pub use torus::{next_pow2, wrap_centered, TorusGrid};
