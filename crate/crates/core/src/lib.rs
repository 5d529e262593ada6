//! Short-time Fourier transform for finitely supported sequences on ℤⁿ,
//! with frequency variable on the torus 𝕋ⁿ, together with numerical checks
//! of the uncertainty inequalities it satisfies.
//!
//! Torus integrals are computed by equispaced quadrature, which is exact for
//! trigonometric polynomials of low enough degree. Every L² identity in this
//! crate is therefore exact up to rounding.

pub mod cli;
pub mod error;
pub mod fourier;
pub mod lattice;
pub mod operators;
pub mod quadrature;
pub mod stft;
pub mod uncertainty;

pub use error::{Error, Result};
pub use lattice::{
    LatticeSignal, MultiIndex, PhaseSpaceField, SupportBox, Tile, TileSet, TorusGrid,
};
