//! Gauss–Legendre rules on the torus for integrands that are not trigonometric polynomials.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

/// Default Gauss–Legendre order per half-axis.
pub const DEFAULT_POINTS: usize = 48;

/// One-dimensional nodes and weights.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl AxisRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(*x))
            .sum()
    }
}

/// Gauss–Legendre rule with `points` nodes on `[a, b]`.
pub fn gauss_legendre(a: f64, b: f64, points: usize) -> AxisRule {
    let rule = GaussLegendre::new(NonZeroUsize::new(points.max(1)).expect("nonzero"));
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let (nodes, weights) = rule
        .iter()
        .map(|(x, w)| (mid + half * x, half * w))
        .unzip();
    AxisRule { nodes, weights }
}

/// Rule on `[-1/2, 1/2]` resolving the kink of `|w|^s` at the origin.
///
/// Each half-axis is mapped through `w = ±u²/2`, `u ∈ [0, 1]`, which turns
/// `|w|^s dw` into `2^{-s} u^{2s+1} du`.
pub fn centered_axis_rule(points: usize) -> AxisRule {
    let base = gauss_legendre(0.0, 1.0, points);
    let mut nodes = Vec::with_capacity(2 * base.len());
    let mut weights = Vec::with_capacity(2 * base.len());
    for sign in [-1.0, 1.0] {
        for (u, wu) in base.nodes.iter().zip(&base.weights) {
            nodes.push(sign * 0.5 * u * u);
            weights.push(wu * u);
        }
    }
    AxisRule { nodes, weights }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials() {
        let r = gauss_legendre(-1.0, 2.0, 5);
        let v = r.integrate(|x| x.powi(9) - 3.0 * x * x);
        // ∫_{-1}^{2} x⁹ - 3x² dx = (1024 - 1)/10 - 9
        assert!((v - (102.3 - 9.0)).abs() < 1e-11);
    }

    #[test]
    fn centered_rule_moments() {
        let r = centered_axis_rule(DEFAULT_POINTS);
        assert!((r.integrate(|_| 1.0) - 1.0).abs() < 1e-14);
        assert!((r.integrate(|w| w * w) - 1.0 / 12.0).abs() < 1e-14);
        assert!((r.integrate(f64::abs) - 0.25).abs() < 1e-14);
        // ∫ |w|^{1/2} dw over [-1/2, 1/2] = 2 · (1/2)^{3/2} / (3/2)
        let exact = 2.0 * 0.5f64.powf(1.5) / 1.5;
        assert!((r.integrate(|w| w.abs().sqrt()) - exact).abs() < 1e-10);
    }
}
