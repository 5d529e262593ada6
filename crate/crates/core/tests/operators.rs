mod common;

use std::f64::consts::PI;

use common::*;
use num_complex::Complex64;
use rand::Rng;
use ztstft::lattice::{grid_measure, PhaseSpaceField};
use ztstft::operators::{
    benedicks_constant, dense_op_norm, hs_norm_sq, op_norm, project_g, project_sigma, ConcentrationOperator,
    DenseRule, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
use ztstft::stft::{stft, StftPlan};
use ztstft::uncertainty::{check_benedicks, whole_box, Status, StftContext};
use ztstft::{Error, LatticeSignal, TileSet};

fn random_field(r: &mut rand_chacha::ChaCha8Rng, plan: &StftPlan) -> PhaseSpaceField {
    let values = (0..plan.output_box().len() * plan.grid().len())
        .map(|_| c(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
        .collect();
    PhaseSpaceField::from_values(plan.output_box(), plan.grid(), values).unwrap()
}

#[test]
fn sigma_projection_is_an_idempotent_indicator() {
    let mut r = rng(300);
    let plan = StftPlan::new(2, 1, 1);
    let f = random_field(&mut r, &plan);
    let all = whole_box(plan.output_box()).unwrap();
    assert_eq!(project_sigma(&f, &all).unwrap().values(), f.values());
    assert!(project_sigma(&f, &TileSet::empty()).unwrap().values().iter().all(|v| v.norm() == 0.0));
    for _ in 0..20 {
        let s = random_small_set(&mut r, 2, 2);
        let once = project_sigma(&f, &s).unwrap();
        let twice = project_sigma(&once, &s).unwrap();
        assert_eq!(once.values(), twice.values());
    }
    let outside = set(vec![fiber_tile(&[5, 0], &[0.0, 0.0], &[1.0, 1.0])]);
    assert!(project_sigma(&f, &outside).is_err());
}

#[test]
fn range_projection_fixes_transforms_and_contracts() {
    let mut r = rng(301);
    for n in 1..=2 {
        let plan = StftPlan::new(n, 2, 1);
        let g = random_signal(&mut r, n, 1);
        let v = stft(&random_signal(&mut r, n, 2), &g, &plan).unwrap();
        let pv = project_g(&v, &g, &plan).unwrap();
        assert!(pv.sub(&v).unwrap().norm_l2() <= 1e-10 * v.norm_l2());
        for _ in 0..100 / n {
            let f = random_field(&mut r, &plan);
            let pf = project_g(&f, &g, &plan).unwrap();
            assert!(pf.norm_l2() <= f.norm_l2() * (1.0 + 1e-12));
            let ppf = project_g(&pf, &g, &plan).unwrap();
            assert!(ppf.sub(&pf).unwrap().norm_l2() <= 1e-10 * f.norm_l2());
            // The residual is orthogonal to the range.
            let residual = f.sub(&pf).unwrap();
            assert!(project_g(&residual, &g, &plan).unwrap().norm_l2() <= 1e-10 * f.norm_l2());
            let h = random_field(&mut r, &plan);
            let a = pf.inner(&h).unwrap();
            let b = f.inner(&project_g(&h, &g, &plan).unwrap()).unwrap();
            assert!((a - b).norm() <= 1e-10 * f.norm_l2() * h.norm_l2());
        }
    }
}

#[test]
fn character_row_is_orthogonal_to_the_delta_range() {
    // With g = δ₀ the range is {f(m) e^{-2πi w m}}; e^{2πi w} on the zero fiber has no component in it.
    let plan = StftPlan::new(1, 2, 0);
    let grid = plan.grid();
    let out = plan.output_box();
    let mut f = PhaseSpaceField::zeros(out, grid);
    let row = out.linear_index(&[0]).unwrap();
    for j in 0..grid.len() {
        f.values_mut()[row * grid.len() + j] = Complex64::from_polar(1.0, 2.0 * PI * grid.node(j)[0]);
    }
    let p = project_g(&f, &delta(1, &[0]), &plan).unwrap();
    assert!(p.norm_l2() < 1e-14);
}

#[test]
fn hs_norm_of_full_fiber_and_empty_set() {
    let plan = StftPlan::new(1, 2, 1);
    let g = ones(1, 1);
    let full = TileSet::full_fibers([ztstft::MultiIndex::new(vec![0])]).unwrap();
    let op = ConcentrationOperator::new(&g, &full, &plan).unwrap();
    assert_close(hs_norm_sq(&op), 1.0, 1e-10, "full fiber");
    let op = ConcentrationOperator::new(&g, &TileSet::empty(), &plan).unwrap();
    assert_eq!(hs_norm_sq(&op), 0.0);
}

/// `Σ_{(m, w_j) ∈ Σ} M⁻¹ Σ_{m'} Σ_{j'} M⁻¹ |K_g((m', w_j'); (m, w_j))|²` with `K` from the term-by-term transform.
fn hs_double_sum(g: &LatticeSignal, sigma: &TileSet, points: usize, reach: i64) -> f64 {
    let nodes: Vec<f64> = (0..points).map(|j| j as f64 / points as f64).collect();
    let weight = 1.0 / points as f64;
    let mut total = 0.0;
    for m in -reach..=reach {
        for &w in &nodes {
            let inside = sigma.tiles().iter().any(|t| {
                t.m.coords() == [m] && {
                    let x = w - t.lo[0];
                    let x = x - x.floor();
                    x < t.hi[0] - t.lo[0]
                }
            });
            if !inside {
                continue;
            }
            let atom = LatticeSignal::from_fn(ztstft::SupportBox::new(1, (reach + 2) as usize), |k| {
                g.get(&[k[0] - m]) * Complex64::from_polar(1.0, 2.0 * PI * w * k[0] as f64)
            });
            let mut norm = 0.0;
            for mp in -(2 * reach + 4)..=(2 * reach + 4) {
                for &wp in &nodes {
                    norm += (naive_stft(&atom, g, &[mp], &[wp]) / g.norm_sq()).norm_sqr() * weight;
                }
            }
            total += norm * weight;
        }
    }
    total
}

#[test]
fn hs_norm_matches_kernel_double_sum_on_a_small_instance() {
    // Measure 0.75 with tile endpoints off the M = 8 grid.
    let plan = StftPlan::with_grid(1, 1, 1, 8).unwrap();
    let sigma = set(vec![fiber_tile(&[0], &[0.1], &[0.6]), fiber_tile(&[1], &[0.3], &[0.55])]);
    assert_close(ztstft::lattice::measure(&sigma), 0.75, 1e-15, "measure");
    let mut r = rng(302);
    for g in [delta(1, &[0]), ones(1, 1), random_signal(&mut r, 1, 1)] {
        let op = ConcentrationOperator::new(&g, &sigma, &plan).unwrap();
        let oracle = hs_double_sum(&g, &sigma, 8, 2);
        assert_close(oracle, 0.75, 1e-8, "oracle");
        assert_close(hs_norm_sq(&op), oracle, 1e-8, "hs");
    }
}

#[test]
fn hs_equals_grid_measure_and_dominates_op_norm() {
    let mut r = rng(303);
    for trial in 0..20 {
        let n = 1 + trial % 2;
        let plan = StftPlan::new(n, 2, 1);
        let g = random_signal(&mut r, n, 1);
        let sigma = random_small_set(&mut r, n, 3);
        let op = ConcentrationOperator::new(&g, &sigma, &plan).unwrap();
        let hs = hs_norm_sq(&op);
        let gm = grid_measure(&sigma, plan.output_box(), plan.grid()).unwrap();
        assert_close(hs, gm, 1e-8, "hs vs grid measure");
        let p = op_norm(&op, DEFAULT_TOL, DEFAULT_MAX_ITER, trial as u64).unwrap();
        assert!(p.op_norm <= hs.sqrt() + 1e-6);
        assert!(p.op_norm <= 1.0 + 1e-9);
    }
}

#[test]
fn op_norm_fixed_point_and_empty_set() {
    let plan = StftPlan::new(1, 2, 0);
    let g = delta(1, &[0]);
    let full = set(vec![fiber_tile(&[0], &[0.0], &[1.0])]);
    let op = ConcentrationOperator::new(&g, &full, &plan).unwrap();
    assert_close(op_norm(&op, 1e-12, 1000, 1).unwrap().op_norm, 1.0, 1e-10, "full fiber");
    let op = ConcentrationOperator::new(&g, &TileSet::empty(), &plan).unwrap();
    assert_eq!(op_norm(&op, 1e-12, 1000, 1).unwrap().op_norm, 0.0);
}

/// Top singular value of `χ_Σ V_g` with the box window of ones, `Σ = {0}×[0, 1/2)`,
/// from `A_{k', k} = ∫_0^{1/2} e^{2πi w (k' - k)} dw / (2N + 1)` on `|k|, |k'| ≤ N`.
/// With `points` set, the integral is the grid sum `M⁻¹ Σ_{j < M/2} e^{2πi j (k' - k)/M}`.
fn prolate_box_norm(n: i64, points: Option<usize>) -> f64 {
    let size = (2 * n + 1) as usize;
    let mut entries = Vec::with_capacity(size * size);
    for kp in -n..=n {
        for k in -n..=n {
            let integral = match points {
                None => exp_integral(kp - k, 0.0, 0.5),
                Some(m) => (0..m / 2)
                    .map(|j| Complex64::from_polar(1.0 / m as f64, 2.0 * PI * (j as i64 * (kp - k)) as f64 / m as f64))
                    .sum(),
            };
            entries.push(integral / size as f64);
        }
    }
    hermitian_max_eigenvalue(size, entries).sqrt()
}

#[derive(serde::Deserialize)]
struct ProlateCase {
    window: String,
    half_width: usize,
    window_half_width: usize,
    grid: usize,
    op_norm: f64,
    exact_op_norm: f64,
}

#[derive(serde::Deserialize)]
struct Prolate {
    sigma: ztstft::lattice::TileSetFile,
    cases: Vec<ProlateCase>,
}

#[test]
fn prolate_fixture_matches_dense_eigensolves() {
    let golden: Prolate = serde_json::from_str(include_str!("golden/prolate.json")).unwrap();
    let sigma = golden.sigma.to_tileset().unwrap();
    assert_eq!(sigma.tiles(), set(vec![fiber_tile(&[0], &[0.0], &[0.5])]).tiles());
    for case in &golden.cases {
        let (n, ng) = (case.half_width, case.window_half_width);
        let plan = StftPlan::new(1, n, ng);
        assert_eq!(plan.grid().points_per_axis(), case.grid);
        let g = match case.window.as_str() {
            "delta" => delta(1, &[0]),
            _ => ones(1, ng),
        };
        let op = ConcentrationOperator::new(&g, &sigma, &plan).unwrap();
        // The box window at N = 4 has λ₂/λ₁ ≈ 0.99984, so convergence takes about 6·10⁴ steps.
        let power = op_norm(&op, DEFAULT_TOL, 200_000, 7).unwrap().op_norm;
        let (grid_oracle, exact_oracle) = match case.window.as_str() {
            "delta" => (0.5f64.sqrt(), 0.5f64.sqrt()),
            _ => (prolate_box_norm(n as i64, Some(case.grid)), prolate_box_norm(n as i64, None)),
        };
        assert_close(grid_oracle, case.op_norm, 1e-12, "golden grid value");
        assert_close(exact_oracle, case.exact_op_norm, 1e-12, "golden exact value");
        assert_close(power, grid_oracle, 1e-8, "power iteration");
        assert_close(dense_op_norm(&op, DenseRule::Grid), grid_oracle, 1e-10, "dense grid rule");
        assert_close(dense_op_norm(&op, DenseRule::Exact), exact_oracle, 1e-10, "dense exact rule");
    }
}

#[test]
fn op_norm_does_not_depend_on_the_seed() {
    let mut r = rng(304);
    let plan = StftPlan::new(2, 1, 1);
    let g = random_signal(&mut r, 2, 1);
    let sigma = random_small_set(&mut r, 2, 2);
    let op = ConcentrationOperator::new(&g, &sigma, &plan).unwrap();
    let base = op_norm(&op, DEFAULT_TOL, DEFAULT_MAX_ITER, 0).unwrap();
    assert_eq!(base.seed, 0);
    for seed in [1, 2, 99, u64::MAX] {
        let other = op_norm(&op, DEFAULT_TOL, DEFAULT_MAX_ITER, seed).unwrap();
        assert_close(other.op_norm, base.op_norm, 1e-8, "seed");
        assert_eq!(other.seed, seed);
    }
    assert_close(base.op_norm, dense_op_norm(&op, DenseRule::Grid), 1e-8, "dense grid rule");
}

#[test]
fn non_convergence_is_reported() {
    let mut r = rng(305);
    let plan = StftPlan::new(1, 3, 2);
    let op = ConcentrationOperator::new(&random_signal(&mut r, 1, 2), &random_small_set(&mut r, 1, 4), &plan).unwrap();
    match op_norm(&op, 1e-15, 2, 0) {
        Err(Error::NotConverged { iterations, residual, .. }) => {
            assert_eq!(iterations, 2);
            assert!(residual.is_finite());
        }
        other => panic!("expected non-convergence, got {other:?}"),
    }
    assert!(op_norm(&op, 0.0, 10, 0).is_err());
}

#[test]
fn benedicks_constant_values() {
    assert_eq!(benedicks_constant(0.0).unwrap(), 1.0);
    assert_close(benedicks_constant(0.5f64.sqrt()).unwrap(), 2f64.sqrt(), 1e-12, "c");
    assert!(matches!(benedicks_constant(1.0 - 1e-10), Err(Error::NearUnitNorm { .. })));
}

#[test]
fn benedicks_bound_over_500_signals() {
    let mut r = rng(306);
    let plan = StftPlan::new(1, 2, 1);
    let g = random_signal(&mut r, 1, 1);
    let sigma = set(vec![fiber_tile(&[0], &[0.1], &[0.6]), fiber_tile(&[1], &[0.0], &[0.3])]);
    let op = ConcentrationOperator::new(&g, &sigma, &plan).unwrap();
    let c_sigma = benedicks_constant(op_norm(&op, DEFAULT_TOL, DEFAULT_MAX_ITER, 3).unwrap().op_norm).unwrap();
    for _ in 0..500 {
        let f = random_signal(&mut r, 1, 2);
        let v = stft(&f, &g, &plan).unwrap();
        let off = v.sub(&project_sigma(&v, &sigma).unwrap()).unwrap().norm_l2();
        assert!(f.norm_l2() * g.norm_l2() - c_sigma * off <= 1e-9);
    }
    let ctx = StftContext::new(&random_signal(&mut r, 1, 2), &g, &plan).unwrap();
    assert_eq!(check_benedicks(&ctx, &sigma, DEFAULT_TOL, DEFAULT_MAX_ITER, 3).unwrap().status, Status::Holds);
    // A set holding the whole range makes the bound vacuous.
    let whole = whole_box(plan.output_box()).unwrap();
    let report = check_benedicks(&ctx, &whole, DEFAULT_TOL, DEFAULT_MAX_ITER, 3).unwrap();
    assert_eq!(report.status, Status::NotApplicable);
}
