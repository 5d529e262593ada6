//! Finite unions of `{m} × box` tiles describing subsets of ℤⁿ × 𝕋ⁿ.
//!
//! Torus boxes are half-open, `∏ [lo_i, hi_i)`, with `0 ≤ hi_i - lo_i ≤ 1` and
//! arbitrary real endpoints read modulo 1. Construction normalizes every
//! lattice fiber into pairwise disjoint boxes inside `[0, 1)ⁿ`, so the measure
//! is a plain sum of box volumes.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::PhaseSpaceField;
use super::index::{MultiIndex, SupportBox};
use super::torus::TorusGrid;
use crate::error::{Error, Result};

/// Boundary slack used when deciding node membership and wrap-around.
const SNAP: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tile {
    pub m: MultiIndex,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Tile {
    pub fn new(m: MultiIndex, lo: Vec<f64>, hi: Vec<f64>) -> Self {
        Self { m, lo, hi }
    }

    /// `{m} × 𝕋ⁿ`.
    pub fn full_fiber(m: MultiIndex) -> Self {
        let n = m.dim();
        Self::new(m, vec![0.0; n], vec![1.0; n])
    }

    pub fn volume(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| (b - a).max(0.0))
            .product()
    }

    fn validate(&self) -> Result<()> {
        let n = self.m.dim();
        if self.lo.len() != n || self.hi.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: if self.lo.len() != n { self.lo.len() } else { self.hi.len() },
            });
        }
        for (a, b) in self.lo.iter().zip(&self.hi) {
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::InvalidParameter("tile endpoints must be finite".into()));
            }
            let w = b - a;
            if !(-SNAP..=1.0 + SNAP).contains(&w) {
                return Err(Error::InvalidParameter(format!(
                    "tile width {w} outside [0, 1] at {}",
                    self.m
                )));
            }
        }
        Ok(())
    }
}

/// Normalized finite union of tiles.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TileSet {
    tiles: Vec<Tile>,
}

impl TileSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds the union of `tiles`, normalizing overlaps away.
    pub fn new(tiles: Vec<Tile>) -> Result<Self> {
        let mut fibers: BTreeMap<MultiIndex, Vec<Vec<(f64, f64)>>> = BTreeMap::new();
        let mut dim = None;
        for tile in &tiles {
            tile.validate()?;
            match dim {
                None => dim = Some(tile.m.dim()),
                Some(d) if d != tile.m.dim() => {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: tile.m.dim(),
                    })
                }
                _ => {}
            }
            if tile.volume() <= 0.0 {
                continue;
            }
            let entry = fibers.entry(tile.m.clone()).or_default();
            entry.extend(unwrap_box(&tile.lo, &tile.hi));
        }
        let mut out = Vec::new();
        for (m, boxes) in fibers {
            for (lo, hi) in disjoint_cover(&boxes) {
                out.push(Tile::new(m.clone(), lo, hi));
            }
        }
        Ok(Self { tiles: out })
    }

    pub fn full_fibers(points: impl IntoIterator<Item = MultiIndex>) -> Result<Self> {
        Self::new(points.into_iter().map(Tile::full_fiber).collect())
    }

    /// `Z × T` with one torus box shared by every lattice point of `z`.
    pub fn product(z: impl IntoIterator<Item = MultiIndex>, lo: &[f64], hi: &[f64]) -> Result<Self> {
        Self::new(
            z.into_iter()
                .map(|m| Tile::new(m, lo.to_vec(), hi.to_vec()))
                .collect(),
        )
    }

    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.tiles.first().map(|t| t.m.dim())
    }

    /// Distinct lattice points carrying positive measure.
    pub fn lattice_points(&self) -> Vec<MultiIndex> {
        let mut pts: Vec<MultiIndex> = self.tiles.iter().map(|t| t.m.clone()).collect();
        pts.dedup();
        pts
    }

    /// Largest absolute lattice coordinate among the tiles.
    pub fn max_abs_coord(&self) -> usize {
        self.tiles.iter().map(|t| t.m.max_abs() as usize).max().unwrap_or(0)
    }

    pub fn fiber<'a>(&'a self, m: &'a MultiIndex) -> impl Iterator<Item = &'a Tile> + 'a {
        self.tiles.iter().filter(move |t| &t.m == m)
    }

    /// Torus measure of the fiber over `m`.
    pub fn fiber_measure(&self, m: &MultiIndex) -> f64 {
        self.fiber(m).map(Tile::volume).sum()
    }

    /// Whether the union has the form `Z × T`.
    pub fn is_product_form(&self) -> bool {
        let pts = self.lattice_points();
        let Some(first) = pts.first() else {
            return true;
        };
        let reference: Vec<&Tile> = self.fiber(first).collect();
        let ref_measure: f64 = reference.iter().map(|t| t.volume()).sum();
        pts.iter().skip(1).all(|m| {
            let other: Vec<&Tile> = self.fiber(m).collect();
            let other_measure: f64 = other.iter().map(|t| t.volume()).sum();
            let overlap: f64 = reference
                .iter()
                .flat_map(|a| other.iter().map(move |b| overlap_volume(a, b)))
                .sum();
            (ref_measure + other_measure - 2.0 * overlap).abs() <= 1e-12
        })
    }

    /// Copy with every torus box scaled about its lower corner by `factor ∈ [0, 1]`.
    pub fn shrunk(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.tiles
                .iter()
                .map(|t| {
                    let hi = t
                        .lo
                        .iter()
                        .zip(&t.hi)
                        .map(|(a, b)| a + factor * (b - a))
                        .collect();
                    Tile::new(t.m.clone(), t.lo.clone(), hi)
                })
                .collect(),
        )
    }
}

fn overlap_volume(a: &Tile, b: &Tile) -> f64 {
    a.lo.iter()
        .zip(&a.hi)
        .zip(b.lo.iter().zip(&b.hi))
        .map(|((a0, a1), (b0, b1))| (a1.min(*b1) - a0.max(*b0)).max(0.0))
        .product()
}

/// Reduce `[a, b)` modulo 1 to at most two intervals inside `[0, 1]`.
fn unwrap_interval(a: f64, b: f64) -> Vec<(f64, f64)> {
    let w = b - a;
    if w >= 1.0 - SNAP {
        return vec![(0.0, 1.0)];
    }
    let mut start = a.rem_euclid(1.0);
    if start > 1.0 - SNAP {
        start = 0.0;
    }
    let end = start + w;
    if end <= 1.0 + SNAP {
        vec![(start, end.min(1.0))]
    } else {
        vec![(start, 1.0), (0.0, end - 1.0)]
    }
}

fn unwrap_box(lo: &[f64], hi: &[f64]) -> Vec<Vec<(f64, f64)>> {
    let mut boxes: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
    for (a, b) in lo.iter().zip(hi) {
        let pieces = unwrap_interval(*a, *b);
        boxes = boxes
            .into_iter()
            .flat_map(|prefix| {
                pieces.iter().map(move |p| {
                    let mut next = prefix.clone();
                    next.push(*p);
                    next
                })
            })
            .filter(|bx| bx.iter().all(|(s, e)| e > s))
            .collect();
    }
    boxes
}

/// Disjoint boxes covering the union of `boxes` (all inside `[0, 1]ⁿ`).
///
/// Coordinate compression over the box edges, then runs of covered cells
/// along the last axis are merged.
fn disjoint_cover(boxes: &[Vec<(f64, f64)>]) -> Vec<(Vec<f64>, Vec<f64>)> {
    if boxes.is_empty() {
        return Vec::new();
    }
    let n = boxes[0].len();
    let cuts: Vec<Vec<f64>> = (0..n)
        .map(|axis| {
            let mut c: Vec<f64> = boxes
                .iter()
                .flat_map(|b| [b[axis].0, b[axis].1])
                .collect();
            c.sort_by(f64::total_cmp);
            c.dedup();
            c
        })
        .collect();
    let counts: Vec<usize> = cuts.iter().map(|c| c.len() - 1).collect();
    if counts.iter().any(|&c| c == 0) {
        return Vec::new();
    }
    let outer: usize = counts[..n - 1].iter().product();
    let last = counts[n - 1];
    let mut out = Vec::new();
    let mut prefix = vec![0usize; n - 1];
    for flat in 0..outer {
        let mut rem = flat;
        for axis in (0..n - 1).rev() {
            prefix[axis] = rem % counts[axis];
            rem /= counts[axis];
        }
        let mut run_start: Option<usize> = None;
        for j in 0..=last {
            let covered = j < last && {
                let centre: Vec<f64> = (0..n)
                    .map(|axis| {
                        let i = if axis == n - 1 { j } else { prefix[axis] };
                        0.5 * (cuts[axis][i] + cuts[axis][i + 1])
                    })
                    .collect();
                boxes.iter().any(|b| {
                    b.iter()
                        .zip(&centre)
                        .all(|((s, e), c)| *s <= *c && *c < *e)
                })
            };
            match (covered, run_start) {
                (true, None) => run_start = Some(j),
                (false, Some(s)) => {
                    let mut lo: Vec<f64> = (0..n - 1).map(|a| cuts[a][prefix[a]]).collect();
                    let mut hi: Vec<f64> = (0..n - 1).map(|a| cuts[a][prefix[a] + 1]).collect();
                    lo.push(cuts[n - 1][s]);
                    hi.push(cuts[n - 1][j]);
                    out.push((lo, hi));
                    run_start = None;
                }
                _ => {}
            }
        }
    }
    out
}

/// `(ν⊗μ)(Σ)`: counting measure on ℤⁿ times Lebesgue measure on 𝕋ⁿ.
pub fn measure(sigma: &TileSet) -> f64 {
    sigma.tiles.iter().map(Tile::volume).sum()
}

/// 0/1 samples of `χ_Σ` on `box × grid`; node `x` of a fiber belongs to `[lo, hi)` iff `lo ≤ x < hi`.
pub fn indicator_on_grid(
    sigma: &TileSet,
    lattice: SupportBox,
    grid: TorusGrid,
) -> Result<PhaseSpaceField> {
    let mut field = PhaseSpaceField::zeros(lattice, grid);
    let nodes = grid.len();
    let one = Complex64::new(1.0, 0.0);
    for tile in sigma.tiles() {
        if tile.m.dim() != lattice.dim() {
            return Err(Error::DimensionMismatch {
                expected: lattice.dim(),
                found: tile.m.dim(),
            });
        }
        let row = lattice
            .linear_index(tile.m.coords())
            .ok_or_else(|| Error::TileOutsideBox {
                m: tile.m.coords().to_vec(),
                half_width: lattice.half_width(),
            })?;
        // Per-axis node ranges, then their product.
        let ranges: Vec<Vec<usize>> = tile
            .lo
            .iter()
            .zip(&tile.hi)
            .map(|(a, b)| {
                (0..grid.points_per_axis())
                    .filter(|&j| {
                        let x = grid.axis_value(j);
                        x >= a - SNAP && x < b - SNAP
                    })
                    .collect()
            })
            .collect();
        let values = field.values_mut();
        for node in 0..nodes {
            let idx = grid.node_indices(node);
            if idx.iter().zip(&ranges).all(|(j, r)| r.binary_search(j).is_ok()) {
                values[row * nodes + node] = one;
            }
        }
    }
    Ok(field)
}

/// Grid quadrature of the indicator, `Σ M⁻ⁿ χ_Σ(m, w_j)`.
pub fn grid_measure(sigma: &TileSet, lattice: SupportBox, grid: TorusGrid) -> Result<f64> {
    let ind = indicator_on_grid(sigma, lattice, grid)?;
    Ok(ind.values().iter().map(|v| v.re).sum::<f64>() * grid.weight())
}

/// Lattice points with `|m| ≤ r`, decided exactly.
pub fn lattice_ball_points(r: f64, dim: usize) -> Vec<MultiIndex> {
    if r < 0.0 {
        return Vec::new();
    }
    let reach = r.floor() as usize;
    SupportBox::new(dim, reach)
        .iter()
        .filter(|m| radius_covers(r, m.norm_sq()))
        .collect()
}

/// `k ≤ r²` with a single rounding, so the sign is exact.
pub(crate) fn radius_covers(r: f64, k: i64) -> bool {
    r.mul_add(r, -(k as f64)) >= 0.0
}

/// `r² - k` with a single rounding.
pub(crate) fn radius_gap(r: f64, k: i64) -> f64 {
    r.mul_add(r, -(k as f64)).max(0.0)
}

/// Inner approximation of the phase-space ball `B_r` by torus boxes.
///
/// In one dimension each fiber is the exact interval `|w| ≤ min(√(r² - m²), 1/2)`.
/// In higher dimensions the first `n - 1` torus axes of each fiber are cut into
/// `resolution` cells over `[-ρ, ρ]`, `ρ = min(√(r² - |m|²), 1/2)`, and the last axis gets the largest interval that keeps the whole
/// column inside the ball. Doubling `resolution` never shrinks the set.
pub fn ball_tileset(r: f64, dim: usize, resolution: usize) -> Result<TileSet> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("ball radius must be positive, got {r}")));
    }
    let resolution = resolution.max(1);
    let mut tiles = Vec::new();
    for m in lattice_ball_points(r, dim) {
        let rho_sq = radius_gap(r, m.norm_sq());
        if dim == 1 {
            let half = rho_sq.sqrt().min(0.5);
            if half > 0.0 {
                tiles.push(Tile::new(m, vec![-half], vec![half]));
            }
            continue;
        }
        let span = rho_sq.sqrt().min(0.5);
        let cell = 2.0 * span / resolution as f64;
        let columns = resolution.pow((dim - 1) as u32);
        for c in 0..columns {
            let mut rem = c;
            let mut lo = vec![0.0; dim];
            let mut hi = vec![0.0; dim];
            let mut far_sq = 0.0;
            for axis in (0..dim - 1).rev() {
                let i = rem % resolution;
                rem /= resolution;
                let a = -span + i as f64 * cell;
                let b = a + cell;
                lo[axis] = a;
                hi[axis] = b;
                far_sq += (a * a).max(b * b);
            }
            if far_sq > rho_sq {
                continue;
            }
            let half = (rho_sq - far_sq).sqrt().min(0.5);
            if half <= 0.0 {
                continue;
            }
            lo[dim - 1] = -half;
            hi[dim - 1] = half;
            tiles.push(Tile::new(m.clone(), lo, hi));
        }
    }
    TileSet::new(tiles)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m1(k: i64) -> MultiIndex {
        MultiIndex::new(vec![k])
    }

    #[test]
    fn empty_set_has_zero_measure() {
        assert_eq!(measure(&TileSet::empty()), 0.0);
    }

    #[test]
    fn full_fiber_has_unit_measure() {
        let s = TileSet::full_fibers([MultiIndex::zero(2)]).unwrap();
        assert_eq!(measure(&s), 1.0);
    }

    #[test]
    fn measure_sums_interval_lengths() {
        let s = TileSet::new(vec![
            Tile::new(m1(0), vec![0.0], vec![0.5]),
            Tile::new(m1(3), vec![0.25], vec![0.5]),
        ])
        .unwrap();
        assert!((measure(&s) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn overlaps_are_normalized_away() {
        let s = TileSet::new(vec![
            Tile::new(m1(0), vec![0.0], vec![0.5]),
            Tile::new(m1(0), vec![0.25], vec![0.75]),
            Tile::new(m1(0), vec![-0.1], vec![0.1]),
        ])
        .unwrap();
        // [0, 0.75) ∪ [0.9, 1)
        assert!((measure(&s) - 0.85).abs() < 1e-12);
        assert_eq!(s.tiles().len(), 2);
    }

    #[test]
    fn overlapping_boxes_in_two_dimensions() {
        let z = MultiIndex::zero(2);
        let s = TileSet::new(vec![
            Tile::new(z.clone(), vec![0.0, 0.0], vec![0.5, 0.5]),
            Tile::new(z.clone(), vec![0.25, 0.25], vec![0.75, 0.75]),
        ])
        .unwrap();
        assert!((measure(&s) - (0.25 + 0.25 - 0.0625)).abs() < 1e-12);
    }

    #[test]
    fn normalization_is_idempotent() {
        let s = TileSet::new(vec![
            Tile::new(m1(1), vec![0.7], vec![1.3]),
            Tile::new(m1(1), vec![0.2], vec![0.4]),
        ])
        .unwrap();
        let again = TileSet::new(s.tiles().to_vec()).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn widths_above_one_are_rejected() {
        assert!(TileSet::new(vec![Tile::new(m1(0), vec![0.0], vec![1.5])]).is_err());
    }

    #[test]
    fn indicator_uses_half_open_membership() {
        let s = TileSet::new(vec![Tile::new(m1(0), vec![0.0], vec![0.5])]).unwrap();
        let field = indicator_on_grid(&s, SupportBox::new(1, 1), TorusGrid::new(1, 4)).unwrap();
        let row0: Vec<f64> = field.row(1).iter().map(|v| v.re).collect();
        assert_eq!(row0, vec![1.0, 1.0, 0.0, 0.0]);
        assert!(field.row(0).iter().chain(field.row(2)).all(|v| v.re == 0.0));
    }

    #[test]
    fn indicator_full_fiber_and_empty() {
        let bx = SupportBox::new(1, 2);
        let grid = TorusGrid::new(1, 8);
        let full = TileSet::full_fibers([m1(-1)]).unwrap();
        let f = indicator_on_grid(&full, bx, grid).unwrap();
        assert!(f.row(1).iter().all(|v| v.re == 1.0));
        let e = indicator_on_grid(&TileSet::empty(), bx, grid).unwrap();
        assert!(e.values().iter().all(|v| v.re == 0.0));
    }

    #[test]
    fn indicator_rejects_tiles_outside_box() {
        let s = TileSet::full_fibers([m1(5)]).unwrap();
        let err = indicator_on_grid(&s, SupportBox::new(1, 2), TorusGrid::new(1, 8)).unwrap_err();
        assert!(err.to_string().contains("tile outside truncation box"));
    }

    #[test]
    fn grid_measure_is_exact_for_grid_aligned_tiles() {
        let s = TileSet::new(vec![
            Tile::new(m1(0), vec![0.0], vec![0.5]),
            Tile::new(m1(1), vec![-0.25], vec![0.125]),
        ])
        .unwrap();
        let gm = grid_measure(&s, SupportBox::new(1, 1), TorusGrid::new(1, 8)).unwrap();
        assert!((gm - measure(&s)).abs() < 1e-15);
    }

    #[test]
    fn product_form_detection() {
        let p = TileSet::product([m1(0), m1(2)], &[0.1], &[0.6]).unwrap();
        assert!(p.is_product_form());
        let q = TileSet::new(vec![
            Tile::new(m1(0), vec![0.1], vec![0.6]),
            Tile::new(m1(2), vec![0.1], vec![0.5]),
        ])
        .unwrap();
        assert!(!q.is_product_form());
    }

    #[test]
    fn ball_tileset_one_dimension_closed_forms() {
        let small = ball_tileset(0.25, 1, 1).unwrap();
        assert_eq!(small.lattice_points(), vec![m1(0)]);
        assert!((measure(&small) - 0.5).abs() < 1e-15);
        let big = ball_tileset(1.5, 1, 1).unwrap();
        assert_eq!(big.lattice_points().len(), 3);
        assert!((measure(&big) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn ball_tileset_two_dimensions_approaches_disk_area() {
        let target = std::f64::consts::PI * 0.01;
        let mut prev = 0.0;
        for res in [8, 16, 32, 64, 128, 256] {
            let s = ball_tileset(0.1, 2, res).unwrap();
            assert_eq!(s.lattice_points(), vec![MultiIndex::zero(2)]);
            let mu = measure(&s);
            assert!(mu >= prev - 1e-15, "refinement shrank the inner approximation");
            assert!(mu <= target + 1e-15);
            prev = mu;
        }
        assert!((target - prev) / target < 1e-2);
    }
}
