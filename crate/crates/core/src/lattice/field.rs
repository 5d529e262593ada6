use num_complex::Complex64;

use super::index::SupportBox;
use super::torus::TorusGrid;
use crate::error::{Error, Result};

/// Samples of a complex function on `[-L, L]ⁿ × 𝕋ⁿ`, one row of grid nodes per lattice point.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpaceField {
    lattice: SupportBox,
    grid: TorusGrid,
    /// Per-axis bound on the torus frequencies of every row, when known.
    bandwidth: usize,
    values: Vec<Complex64>,
}

impl PhaseSpaceField {
    pub fn zeros(lattice: SupportBox, grid: TorusGrid) -> Self {
        assert_eq!(lattice.dim(), grid.dim(), "lattice and torus dimensions differ");
        Self {
            lattice,
            grid,
            bandwidth: full_bandwidth(&grid),
            values: vec![Complex64::new(0.0, 0.0); lattice.len() * grid.len()],
        }
    }

    pub fn from_values(
        lattice: SupportBox,
        grid: TorusGrid,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        if lattice.dim() != grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: lattice.dim(),
                found: grid.dim(),
            });
        }
        if values.len() != lattice.len() * grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} samples for {} rows of {} nodes",
                values.len(),
                lattice.len(),
                grid.len()
            )));
        }
        Ok(Self {
            lattice,
            grid,
            bandwidth: full_bandwidth(&grid),
            values,
        })
    }

    /// Declare that every row is a trigonometric polynomial of per-axis degree ≤ `bandwidth`.
    pub(crate) fn with_bandwidth(mut self, bandwidth: usize) -> Self {
        self.bandwidth = bandwidth.min(full_bandwidth(&self.grid));
        self
    }

    pub fn lattice(&self) -> SupportBox {
        self.lattice
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn row(&self, m: usize) -> &[Complex64] {
        let n = self.grid.len();
        &self.values[m * n..(m + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex64]> {
        self.values.chunks(self.grid.len())
    }

    /// Sample at lattice point `m` and node `j`; zero for `m` outside the box.
    pub fn get(&self, m: &[i64], node: usize) -> Complex64 {
        self.lattice
            .linear_index(m)
            .map_or(Complex64::new(0.0, 0.0), |r| self.values[r * self.grid.len() + node])
    }

    pub fn same_shape(&self, other: &PhaseSpaceField) -> bool {
        self.lattice == other.lattice && self.grid == other.grid
    }

    pub fn ensure_same_shape(&self, other: &PhaseSpaceField) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "fields on ({:?}, {:?}) and ({:?}, {:?})",
                self.lattice, self.grid, other.lattice, other.grid
            )))
        }
    }

    /// `‖F‖²` by grid quadrature.
    pub fn norm_sq(&self) -> f64 {
        self.grid.weight() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    pub fn norm_l2(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `‖F‖_p` by grid quadrature.
    pub fn norm_lp(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.norm_inf();
        }
        let s: f64 = self.values.iter().map(|v| v.norm().powf(p)).sum();
        (self.grid.weight() * s).powf(1.0 / p)
    }

    /// `Σ_m Σ_j M⁻ⁿ F(m, w_j) conj(G(m, w_j))`.
    pub fn inner(&self, other: &PhaseSpaceField) -> Result<Complex64> {
        self.ensure_same_shape(other)?;
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum();
        Ok(s * self.grid.weight())
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            lattice: self.lattice,
            grid: self.grid,
            bandwidth: self.bandwidth,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// Pointwise product; the result carries no bandwidth guarantee.
    pub fn pointwise_mul(&self, other: &PhaseSpaceField) -> Result<Self> {
        self.ensure_same_shape(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        Self::from_values(self.lattice, self.grid, values)
    }

    pub fn sub(&self, other: &PhaseSpaceField) -> Result<Self> {
        self.ensure_same_shape(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self::from_values(self.lattice, self.grid, values)?
            .with_bandwidth(self.bandwidth.max(other.bandwidth)))
    }
}

/// Largest per-axis degree whose coefficients are recoverable from `M` equispaced samples.
pub fn full_bandwidth(grid: &TorusGrid) -> usize {
    (grid.points_per_axis() - 1) / 2
}
