use serde::{Deserialize, Serialize};

/// Equispaced product grid on 𝕋ⁿ with nodes `j/M` per axis and weights `M⁻ⁿ`.
///
/// The rule integrates exactly every trigonometric polynomial whose per-axis
/// frequencies lie strictly inside `(-M, M)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusGrid {
    dim: usize,
    points: usize,
}

impl TorusGrid {
    pub fn new(dim: usize, points_per_axis: usize) -> Self {
        assert!(dim >= 1, "torus dimension must be at least 1");
        assert!(points_per_axis >= 1, "torus grid needs at least one node per axis");
        Self {
            dim,
            points: points_per_axis,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.len() as f64
    }

    /// Per-axis node indices `j` of a linear node position.
    pub fn node_indices(&self, mut linear: usize) -> Vec<usize> {
        let mut idx = vec![0usize; self.dim];
        for slot in idx.iter_mut().rev() {
            *slot = linear % self.points;
            linear /= self.points;
        }
        idx
    }

    pub fn linear_of(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &j| acc * self.points + j)
    }

    /// Node value `j/M ∈ [0, 1)`.
    pub fn axis_value(&self, j: usize) -> f64 {
        j as f64 / self.points as f64
    }

    /// Node value mapped to the representative interval `[-1/2, 1/2)`.
    pub fn axis_representative(&self, j: usize) -> f64 {
        if 2 * j >= self.points {
            (j as f64 - self.points as f64) / self.points as f64
        } else {
            self.axis_value(j)
        }
    }

    pub fn node(&self, linear: usize) -> Vec<f64> {
        self.node_indices(linear)
            .into_iter()
            .map(|j| self.axis_value(j))
            .collect()
    }

    pub fn representative(&self, linear: usize) -> Vec<f64> {
        self.node_indices(linear)
            .into_iter()
            .map(|j| self.axis_representative(j))
            .collect()
    }

    /// Squared Euclidean norm of the `[-1/2, 1/2)ⁿ` representative.
    pub fn representative_norm_sq(&self, linear: usize) -> f64 {
        self.representative(linear).iter().map(|w| w * w).sum()
    }

    pub fn refined(&self, factor: usize) -> TorusGrid {
        TorusGrid::new(self.dim, self.points * factor)
    }
}

/// Representative of a torus coordinate in `[-1/2, 1/2)`.
pub fn wrap_centered(w: f64) -> f64 {
    let r = (w + 0.5).rem_euclid(1.0) - 0.5;
    if r >= 0.5 {
        r - 1.0
    } else {
        r
    }
}

/// Smallest power of two that is at least `n`.
pub fn next_pow2(n: usize) -> usize {
    n.max(1).next_power_of_two()
}
