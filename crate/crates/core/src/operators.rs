//! The projections `P_Σ` and `P_g`, and norms of the concentration operator `P_Σ P_g`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{character, character_integral, lattice_sum_on_nodes, NdFft};
use crate::lattice::{indicator_on_grid, LatticeSignal, PhaseSpaceField, SupportBox, TileSet, TorusGrid};
use crate::stft::{stft, stft_adjoint, StftPlan};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Default relative tolerance for [`op_norm`].
pub const DEFAULT_TOL: f64 = 1e-12;
/// Default iteration cap for [`op_norm`].
pub const DEFAULT_MAX_ITER: usize = 20_000;
/// Operator norms at or above `1 - NEAR_ONE` make [`benedicks_constant`] meaningless.
pub const NEAR_ONE: f64 = 1e-9;

/// `P_Σ P_g` for a fixed window, set and plan.
#[derive(Clone, Debug)]
pub struct ConcentrationOperator {
    g: LatticeSignal,
    sigma: TileSet,
    plan: StftPlan,
    indicator: PhaseSpaceField,
}

impl ConcentrationOperator {
    pub fn new(g: &LatticeSignal, sigma: &TileSet, plan: &StftPlan) -> Result<Self> {
        let g = plan.fit_window(g)?;
        let indicator = indicator_on_grid(sigma, plan.output_box(), plan.grid())?;
        Ok(Self {
            g,
            sigma: sigma.clone(),
            plan: plan.clone(),
            indicator,
        })
    }

    pub fn window(&self) -> &LatticeSignal {
        &self.g
    }

    pub fn sigma(&self) -> &TileSet {
        &self.sigma
    }

    pub fn plan(&self) -> &StftPlan {
        &self.plan
    }

    pub fn indicator(&self) -> &PhaseSpaceField {
        &self.indicator
    }

    pub fn project_sigma(&self, field: &PhaseSpaceField) -> Result<PhaseSpaceField> {
        field.pointwise_mul(&self.indicator)
    }

    pub fn project_g(&self, field: &PhaseSpaceField) -> Result<PhaseSpaceField> {
        project_g(field, &self.g, &self.plan)
    }

    /// `P_g P_Σ P_g F`.
    pub fn apply_gram(&self, field: &PhaseSpaceField) -> Result<PhaseSpaceField> {
        self.project_g(&self.project_sigma(&self.project_g(field)?)?)
    }

    /// `Σ_j M⁻ⁿ χ_Σ(m, w_j)` for every lattice row.
    fn row_grid_measures(&self) -> Vec<f64> {
        let w = self.plan.grid().weight();
        self.indicator
            .rows()
            .map(|row| row.iter().map(|v| v.re).sum::<f64>() * w)
            .collect()
    }
}

/// `χ_Σ F` sampled on the field's grid.
pub fn project_sigma(field: &PhaseSpaceField, sigma: &TileSet) -> Result<PhaseSpaceField> {
    let indicator = indicator_on_grid(sigma, field.lattice(), field.grid())?;
    field.pointwise_mul(&indicator)
}

/// Orthogonal projection onto `V_g(ℓ²)`, as `V_g(V_g* F) / ‖g‖²`.
pub fn project_g(field: &PhaseSpaceField, g: &LatticeSignal, plan: &StftPlan) -> Result<PhaseSpaceField> {
    let g = plan.fit_window(g)?;
    let h = stft_adjoint(field, &g, plan)?;
    Ok(stft(&h, &g, plan)?.scaled(Complex64::new(1.0 / g.norm_sq(), 0.0)))
}

/// `‖K_g(·; (m, 0))‖²` by grid quadrature over the kernel's lattice support.
fn kernel_norm_sq(g: &LatticeSignal, m: &[i64], grid: TorusGrid) -> f64 {
    let ng = g.support().half_width();
    let fft = NdFft::new(grid);
    let reach = SupportBox::new(g.dim(), 2 * ng);
    let norm_sq = g.norm_sq();
    let total: f64 = reach
        .iter()
        .map(|d| {
            let mp: Vec<i64> = m.iter().zip(d.coords()).map(|(a, b)| a + b).collect();
            let terms = g.iter().filter_map(|(x, v)| {
                // k = x + m ranges over supp T_m g.
                let k: Vec<i64> = x.iter().zip(m).map(|(a, b)| a + b).collect();
                let shifted: Vec<i64> = k.iter().zip(&mp).map(|(a, b)| a - b).collect();
                let gv = g.get(&shifted);
                (v != ZERO && gv != ZERO).then(|| (k, v * gv.conj()))
            });
            lattice_sum_on_nodes(&fft, terms)
                .iter()
                .map(|v| v.norm_sqr())
                .sum::<f64>()
        })
        .sum();
    total * grid.weight() / (norm_sq * norm_sq)
}

/// `‖P_Σ P_g‖²_HS = Σ_{(m, w_j) ∈ Σ} M⁻ⁿ ‖K_g(·; (m, w_j))‖²`.
///
/// Kernel norms are independent of `w`, so each row uses its value at `w = 0`
/// on a grid fine enough to integrate it exactly.
pub fn hs_norm_sq(op: &ConcentrationOperator) -> f64 {
    let ng = op.g.support().half_width();
    let points = op.plan.grid().points_per_axis().max(4 * ng + 1);
    let kgrid = TorusGrid::new(op.plan.dim(), points);
    let out = op.plan.output_box();
    op.row_grid_measures()
        .iter()
        .enumerate()
        .filter(|(_, mu)| **mu > 0.0)
        .map(|(r, mu)| mu * kernel_norm_sq(&op.g, &out.coords_of(r), kgrid))
        .sum()
}

/// Outcome of [`op_norm`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerIteration {
    /// `‖P_Σ P_g‖_op = √λ_max(P_g P_Σ P_g)`.
    pub op_norm: f64,
    pub eigenvalue: f64,
    pub iterations: usize,
    pub residual: f64,
    pub seed: u64,
}

/// Power iteration for the top eigenvalue of `P_g P_Σ P_g` from a seeded random field.
///
/// Stops when the Rayleigh quotient changes by less than `tol` relative.
pub fn op_norm(op: &ConcentrationOperator, tol: f64, max_iter: usize, seed: u64) -> Result<PowerIteration> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let done = |eigenvalue: f64, iterations, residual| PowerIteration {
        op_norm: eigenvalue.max(0.0).sqrt(),
        eigenvalue,
        iterations,
        residual,
        seed,
    };
    if op.sigma.is_empty() {
        return Ok(done(0.0, 0, 0.0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let out = op.plan.output_box();
    let grid = op.plan.grid();
    let start: Vec<Complex64> = (0..out.len() * grid.len())
        .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect();
    let mut f = op.project_g(&PhaseSpaceField::from_values(out, grid, start)?)?;
    let norm = f.norm_l2();
    if norm == 0.0 {
        return Ok(done(0.0, 0, 0.0));
    }
    f = f.scaled(Complex64::new(1.0 / norm, 0.0));
    let mut previous = f64::NAN;
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let next = op.project_g(&op.project_sigma(&f)?)?;
        let lambda = next.inner(&f)?.re;
        residual = next.sub(&f.scaled(Complex64::new(lambda, 0.0)))?.norm_l2();
        let norm = next.norm_l2();
        if norm == 0.0 {
            return Ok(done(0.0, it, 0.0));
        }
        if (lambda - previous).abs() <= tol * lambda.abs().max(f64::MIN_POSITIVE) {
            return Ok(done(lambda, it, residual));
        }
        previous = lambda;
        f = next.scaled(Complex64::new(1.0 / norm, 0.0));
    }
    Err(Error::NotConverged {
        iterations: max_iter,
        eigenvalue: previous,
        residual,
    })
}

/// Torus integration used by [`dense_matrix`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DenseRule {
    /// The plan's grid rule applied to the sampled indicator.
    Grid,
    /// Closed-form integrals over the tile boxes.
    Exact,
}

/// `B = V_g* P_Σ V_g / ‖g‖²` as a matrix on `ℓ²` of the plan's signal box.
///
/// `B_{k', k} = ‖g‖⁻² Σ_m g(k' - m) conj(g(k - m)) ∫_{Σ_m} e^{2πi w·(k' - k)} dw`;
/// its eigenvalues are those of `P_g P_Σ P_g` on the range.
pub fn dense_matrix(op: &ConcentrationOperator, rule: DenseRule) -> DMatrix<Complex64> {
    let signal = op.plan.signal_box();
    let out = op.plan.output_box();
    let grid = op.plan.grid();
    let s = signal.len();
    let norm_sq = op.g.norm_sq();
    let mut b = DMatrix::from_element(s, s, ZERO);
    for r in 0..out.len() {
        let m = out.coords_of(r);
        let row = op.indicator.row(r);
        let mi = crate::lattice::MultiIndex::new(m.clone());
        let has_mass = match rule {
            DenseRule::Grid => row.iter().any(|v| v.re != 0.0),
            DenseRule::Exact => op.sigma.fiber(&mi).next().is_some(),
        };
        if !has_mass {
            continue;
        }
        let integral = |d: &[i64]| -> Complex64 {
            match rule {
                DenseRule::Grid => {
                    row.iter()
                        .enumerate()
                        .filter(|(_, v)| v.re != 0.0)
                        .map(|(j, _)| character(d, &grid.node(j)))
                        .sum::<Complex64>()
                        * grid.weight()
                }
                DenseRule::Exact => op
                    .sigma
                    .fiber(&mi)
                    .map(|t| {
                        d.iter()
                            .zip(t.lo.iter().zip(&t.hi))
                            .map(|(q, (a, bb))| character_integral(*q, *a, *bb))
                            .product::<Complex64>()
                    })
                    .sum(),
            }
        };
        for kp in 0..s {
            let kpc = signal.coords_of(kp);
            let gkp = op.g.get(&diff(&kpc, &m));
            if gkp == ZERO {
                continue;
            }
            for k in 0..s {
                let kc = signal.coords_of(k);
                let gk = op.g.get(&diff(&kc, &m));
                if gk == ZERO {
                    continue;
                }
                b[(kp, k)] += gkp * gk.conj() * integral(&diff(&kpc, &kc)) / norm_sq;
            }
        }
    }
    b
}

fn diff(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `√λ_max` of [`dense_matrix`] by a Hermitian eigensolve.
pub fn dense_op_norm(op: &ConcentrationOperator, rule: DenseRule) -> f64 {
    let b = dense_matrix(op, rule);
    let eig = SymmetricEigen::new(b);
    eig.eigenvalues.iter().cloned().fold(0.0, f64::max).sqrt()
}

/// `c(Σ, g) = 1/√(1 - ‖P_Σ P_g‖²)`.
pub fn benedicks_constant(op_norm: f64) -> Result<f64> {
    if !(op_norm < 1.0 - NEAR_ONE) {
        return Err(Error::NearUnitNorm { op_norm });
    }
    Ok(1.0 / (1.0 - op_norm * op_norm).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{MultiIndex, Tile};

    fn delta0(n: usize) -> LatticeSignal {
        LatticeSignal::delta(SupportBox::new(n, 0), &MultiIndex::zero(n))
    }

    #[test]
    fn benedicks_formula() {
        assert_eq!(benedicks_constant(0.0).unwrap(), 1.0);
        assert!((benedicks_constant(0.5f64.sqrt()).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        let err = benedicks_constant(1.0).unwrap_err();
        assert!(err.to_string().contains("operator norm too close to 1; bound vacuous"));
    }

    #[test]
    fn empty_sigma_has_zero_norms() {
        let plan = StftPlan::new(1, 2, 0);
        let op = ConcentrationOperator::new(&delta0(1), &TileSet::empty(), &plan).unwrap();
        assert_eq!(hs_norm_sq(&op), 0.0);
        assert_eq!(op_norm(&op, 1e-12, 100, 1).unwrap().op_norm, 0.0);
    }

    #[test]
    fn full_fiber_is_a_fixed_point_for_delta_window() {
        let plan = StftPlan::new(1, 2, 0);
        let sigma = TileSet::full_fibers([MultiIndex::zero(1)]).unwrap();
        let op = ConcentrationOperator::new(&delta0(1), &sigma, &plan).unwrap();
        let r = op_norm(&op, 1e-12, 1000, 3).unwrap();
        assert!((r.op_norm - 1.0).abs() < 1e-10);
        assert!((hs_norm_sq(&op) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_fiber_gives_root_half() {
        let plan = StftPlan::new(1, 4, 0);
        let sigma = TileSet::new(vec![Tile::new(MultiIndex::zero(1), vec![0.0], vec![0.5])]).unwrap();
        let op = ConcentrationOperator::new(&delta0(1), &sigma, &plan).unwrap();
        let r = op_norm(&op, 1e-14, 1000, 9).unwrap();
        assert!((r.op_norm - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((dense_op_norm(&op, DenseRule::Exact) - 0.5f64.sqrt()).abs() < 1e-12);
    }
}
