//! Explicit constants for the moment and local uncertainty inequalities.

use serde::{Deserialize, Serialize};

use super::functionals::{ball_measure, BALL_QUAD_POINTS};
use crate::error::{Error, Result};

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Maximizer of `φ` on `[a, b]` for unimodal `φ`.
pub fn golden_section_max(phi: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = phi(x1);
    let mut f2 = phi(x2);
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = phi(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = phi(x1);
        }
    }
    0.5 * (a + b)
}

fn check_order(s: f64) -> Result<()> {
    if s > 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("moment order s must be positive, got {s}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergConstant {
    /// `c(s) = ε₀^{2s} 2^{-s} (1 - (ν⊗μ)(B_{ε₀}))`.
    pub c: f64,
    pub eps0: f64,
    /// `(ν⊗μ)(B_{ε₀})`.
    pub ball: f64,
    /// `ε₀^{2s} (1 - (ν⊗μ)(B_{ε₀}))`, the bound for the joint moment.
    pub joint: f64,
}

/// `ε₀` maximizes `ε^{2s}(1 - (ν⊗μ)(B_ε))` over `(0, 1/2]`.
pub fn heisenberg_constant(s: f64, dim: usize) -> Result<HeisenbergConstant> {
    check_order(s)?;
    let phi = |e: f64| e.powf(2.0 * s) * (1.0 - ball_measure(e, dim, BALL_QUAD_POINTS));
    let interior = golden_section_max(phi, 0.0, 0.5, 1e-12);
    let eps0 = if phi(0.5) > phi(interior) { 0.5 } else { interior };
    let ball = ball_measure(eps0, dim, BALL_QUAD_POINTS);
    let joint = phi(eps0);
    Ok(HeisenbergConstant {
        c: joint * 2f64.powf(-s),
        eps0,
        ball,
        joint,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalConstant {
    /// `c(s) = ε₀^{-s} (1 - (ν⊗μ)(B_{ε₀}))^{-1/2}`.
    pub c: f64,
    pub eps0: f64,
}

/// Local uncertainty constant at the same `ε₀` as [`heisenberg_constant`].
pub fn local_uncertainty_constant(s: f64, dim: usize) -> Result<LocalConstant> {
    let h = heisenberg_constant(s, dim)?;
    Ok(LocalConstant {
        c: h.eps0.powf(-s) / (1.0 - h.ball).sqrt(),
        eps0: h.eps0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorollaryConstant {
    /// `c_s = h(r*)^{-1/2}`.
    pub c_s: f64,
    pub r_star: f64,
    /// `h(r*) = c(s)² (ν⊗μ)(B_{r*}) + r*^{-2s}`.
    pub h_min: f64,
}

/// Lower and upper ends of the radius search.
pub const COROLLARY_RANGE: (f64, f64) = (1e-3, 10.0);

fn corollary_objective(s: f64, dim: usize, c_sq: f64) -> impl Fn(f64) -> f64 {
    move |r: f64| c_sq * ball_measure(r, dim, BALL_QUAD_POINTS) + r.powf(-2.0 * s)
}

/// Minimizer of `h` over a logarithmic grid of `count` radii in `[lo, hi]`.
pub fn corollary_grid_minimum(s: f64, dim: usize, lo: f64, hi: f64, count: usize) -> Result<(f64, f64)> {
    let c = local_uncertainty_constant(s, dim)?.c;
    let h = corollary_objective(s, dim, c * c);
    let count = count.max(2);
    let step = (hi / lo).ln() / (count - 1) as f64;
    Ok((0..count)
        .map(|i| {
            let r = lo * (step * i as f64).exp();
            (r, h(r))
        })
        .fold((f64::NAN, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best }))
}

/// `c_s` with `‖|(m, w)|^s V_g f‖ ≥ c_s ‖f‖ ‖g‖`, minimizing `h(r)` over `r ∈ [10⁻³, 10]`.
///
/// A coarse logarithmic scan brackets the minimum and golden-section search refines it.
pub fn local_uncertainty_corollary_constant(s: f64, dim: usize) -> Result<CorollaryConstant> {
    let c = local_uncertainty_constant(s, dim)?.c;
    let h = corollary_objective(s, dim, c * c);
    let (lo, hi) = COROLLARY_RANGE;
    let count = 400;
    let step = (hi / lo).ln() / (count - 1) as f64;
    let radius = |i: usize| lo * (step * i as f64).exp();
    let best = (0..count)
        .min_by(|a, b| h(radius(*a)).total_cmp(&h(radius(*b))))
        .expect("non-empty scan");
    let a = radius(best.saturating_sub(1));
    let b = radius((best + 1).min(count - 1));
    let r_star = golden_section_max(|r| -h(r), a, b, 1e-12);
    let h_min = h(r_star);
    Ok(CorollaryConstant {
        c_s: h_min.powf(-0.5),
        r_star,
        h_min,
    })
}
