use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the integer lattice ℤⁿ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct MultiIndex(Vec<i64>);

impl MultiIndex {
    /// Panics if `coords` is empty; use [`MultiIndex::try_new`] for untrusted input.
    pub fn new(coords: impl Into<Vec<i64>>) -> Self {
        Self::try_new(coords).expect("lattice index needs at least one coordinate")
    }

    pub fn try_new(coords: impl Into<Vec<i64>>) -> Result<Self> {
        let coords = coords.into();
        if coords.is_empty() {
            return Err(Error::InvalidParameter(
                "lattice index needs at least one coordinate".into(),
            ));
        }
        Ok(Self(coords))
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    /// Squared Euclidean norm, exact in integer arithmetic.
    pub fn norm_sq(&self) -> i64 {
        self.0.iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        (self.norm_sq() as f64).sqrt()
    }

    /// Largest absolute coordinate.
    pub fn max_abs(&self) -> u64 {
        self.0.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), other.dim());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), other.dim());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl TryFrom<Vec<i64>> for MultiIndex {
    type Error = Error;

    fn try_from(coords: Vec<i64>) -> Result<Self> {
        Self::try_new(coords)
    }
}

impl From<MultiIndex> for Vec<i64> {
    fn from(m: MultiIndex) -> Self {
        m.0
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// The cube `[-N, N]ⁿ` that truncates the support of lattice functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SupportBox {
    dim: usize,
    half_width: usize,
}

impl SupportBox {
    pub fn new(dim: usize, half_width: usize) -> Self {
        assert!(dim >= 1, "lattice dimension must be at least 1");
        Self { dim, half_width }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    /// Points per axis, `2N + 1`.
    pub fn side(&self) -> usize {
        2 * self.half_width + 1
    }

    /// Cardinality `(2N + 1)ⁿ`.
    pub fn len(&self) -> usize {
        self.side().pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, coords: &[i64]) -> bool {
        coords.len() == self.dim
            && coords
                .iter()
                .all(|c| c.unsigned_abs() <= self.half_width as u64)
    }

    /// Row-major position of `coords`, axis 0 most significant.
    pub fn linear_index(&self, coords: &[i64]) -> Option<usize> {
        if !self.contains(coords) {
            return None;
        }
        let side = self.side();
        let n = self.half_width as i64;
        Some(
            coords
                .iter()
                .fold(0usize, |acc, &c| acc * side + (c + n) as usize),
        )
    }

    pub fn coords_of(&self, mut linear: usize) -> Vec<i64> {
        let side = self.side();
        let n = self.half_width as i64;
        let mut coords = vec![0i64; self.dim];
        for slot in coords.iter_mut().rev() {
            *slot = (linear % side) as i64 - n;
            linear /= side;
        }
        coords
    }

    pub fn point(&self, linear: usize) -> MultiIndex {
        MultiIndex::new(self.coords_of(linear))
    }

    pub fn iter(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    /// Smallest box containing both.
    pub fn union(&self, other: &SupportBox) -> SupportBox {
        assert_eq!(self.dim, other.dim);
        SupportBox::new(self.dim, self.half_width.max(other.half_width))
    }
}
