use num_complex::Complex64;

use super::index::{MultiIndex, SupportBox};
use crate::error::{Error, Result};

/// A finitely supported complex sequence on ℤⁿ, stored densely on its box.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeSignal {
    support: SupportBox,
    values: Vec<Complex64>,
}

impl LatticeSignal {
    pub fn zeros(support: SupportBox) -> Self {
        Self {
            support,
            values: vec![Complex64::new(0.0, 0.0); support.len()],
        }
    }

    pub fn from_values(support: SupportBox, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != support.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a box of {} points",
                values.len(),
                support.len()
            )));
        }
        Ok(Self { support, values })
    }

    pub fn from_fn(support: SupportBox, mut f: impl FnMut(&[i64]) -> Complex64) -> Self {
        let values = (0..support.len())
            .map(|i| f(&support.coords_of(i)))
            .collect();
        Self { support, values }
    }

    /// Unit impulse at `at`; the box is grown to contain it.
    pub fn delta(support: SupportBox, at: &MultiIndex) -> Self {
        let support = SupportBox::new(
            support.dim(),
            support.half_width().max(at.max_abs() as usize),
        );
        let mut s = Self::zeros(support);
        let i = support.linear_index(at.coords()).expect("grown box holds the impulse");
        s.values[i] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn support(&self) -> SupportBox {
        self.support
    }

    pub fn dim(&self) -> usize {
        self.support.dim()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Value at `coords`; zero outside the box.
    pub fn get(&self, coords: &[i64]) -> Complex64 {
        self.support
            .linear_index(coords)
            .map_or(Complex64::new(0.0, 0.0), |i| self.values[i])
    }

    pub fn set(&mut self, coords: &[i64], value: Complex64) -> Result<()> {
        let i = self.support.linear_index(coords).ok_or_else(|| {
            Error::ShapeMismatch(format!("{coords:?} outside the signal box"))
        })?;
        self.values[i] = value;
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<i64>, Complex64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, v)| (self.support.coords_of(i), *v))
    }

    pub fn norm_l1(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn norm_l2(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == Complex64::new(0.0, 0.0))
    }

    /// ℓ² inner product `Σ f(k) conj(h(k))`.
    pub fn inner(&self, other: &LatticeSignal) -> Complex64 {
        assert_eq!(self.dim(), other.dim());
        if self.support == other.support {
            return self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b.conj())
                .sum();
        }
        self.iter()
            .map(|(k, v)| v * other.get(&k).conj())
            .sum()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            support: self.support,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// Copy onto a box of the given half-width. Errors if non-zero values would be dropped.
    pub fn embed(&self, half_width: usize) -> Result<Self> {
        if half_width == self.support.half_width() {
            return Ok(self.clone());
        }
        let target = SupportBox::new(self.dim(), half_width);
        let mut out = Self::zeros(target);
        for (k, v) in self.iter() {
            match target.linear_index(&k) {
                Some(i) => out.values[i] = v,
                None if v != Complex64::new(0.0, 0.0) => {
                    return Err(Error::ShapeMismatch(format!(
                        "non-zero value at {k:?} does not fit half-width {half_width}"
                    )))
                }
                None => {}
            }
        }
        Ok(out)
    }

    /// Half-width of the smallest centred box holding every non-zero value.
    pub fn effective_half_width(&self) -> usize {
        self.iter()
            .filter(|(_, v)| *v != Complex64::new(0.0, 0.0))
            .flat_map(|(k, _)| k.into_iter().map(|c| c.unsigned_abs() as usize))
            .max()
            .unwrap_or(0)
    }

    pub fn sub(&self, other: &LatticeSignal) -> LatticeSignal {
        let support = self.support.union(&other.support);
        LatticeSignal::from_fn(support, |k| self.get(k) - other.get(k))
    }
}
