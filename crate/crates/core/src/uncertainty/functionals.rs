//! Phase-space functionals: lattice counts, ball measures, masses, moments and entropy.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::fourier::{refine, row_power, TrigPoly};
use crate::lattice::tiles::{lattice_ball_points, radius_covers, radius_gap};
use crate::lattice::{MultiIndex, PhaseSpaceField, TileSet};
use crate::quadrature::{centered_axis_rule, gauss_legendre, DEFAULT_POINTS};

/// Default quadrature order for fiber volumes in three or more dimensions.
pub const BALL_QUAD_POINTS: usize = 64;

/// Grid refinement factor for the entropy integrand.
pub const ENTROPY_REFINE: usize = 4;

/// `Card{m ∈ ℤⁿ : |m| ≤ r}`.
pub fn lattice_count(r: f64, dim: usize) -> u64 {
    if r < 0.0 {
        return 0;
    }
    if dim == 1 {
        return 2 * r.floor() as u64 + 1;
    }
    lattice_ball_points(r, dim).len() as u64
}

/// `vol{w ∈ [-1/2, 1/2]ⁿ : |w|² ≤ ρ²}`, which never exceeds 1.
pub fn fiber_volume(rho_sq: f64, dim: usize, quad_points: usize) -> f64 {
    if rho_sq <= 0.0 {
        return 0.0;
    }
    if rho_sq >= 0.25 * dim as f64 {
        return 1.0;
    }
    match dim {
        1 => (2.0 * rho_sq.sqrt()).min(1.0),
        2 => disk_square_area(rho_sq),
        _ => {
            // Slice along one axis; the cross-section volume has kinks where
            // its squared radius crosses a multiple of 1/4, so split there.
            let top = rho_sq.sqrt().min(0.5);
            let mut cuts = vec![0.0, top];
            for j in 1..dim {
                let u_sq = rho_sq - 0.25 * j as f64;
                if u_sq > 0.0 && u_sq.sqrt() < top {
                    cuts.push(u_sq.sqrt());
                }
            }
            cuts.sort_by(f64::total_cmp);
            let total: f64 = cuts
                .windows(2)
                .filter(|w| w[1] > w[0])
                .map(|w| {
                    gauss_legendre(w[0], w[1], quad_points.max(2))
                        .integrate(|u| fiber_volume(rho_sq - u * u, dim - 1, quad_points))
                })
                .sum();
            (2.0 * total).min(1.0)
        }
    }
}

/// Area of the disk `|w| ≤ ρ` inside the square `[-1/2, 1/2]²`.
fn disk_square_area(rho_sq: f64) -> f64 {
    if rho_sq <= 0.0 {
        return 0.0;
    }
    if rho_sq >= 0.5 {
        return 1.0;
    }
    let rho = rho_sq.sqrt();
    let a = rho.min(0.5);
    let c = (rho_sq - 0.25).max(0.0).sqrt().min(a);
    // ∫ √(ρ² - x²) dx
    let prim = |x: f64| 0.5 * (x * (rho_sq - x * x).max(0.0).sqrt() + rho_sq * (x / rho).clamp(-1.0, 1.0).asin());
    2.0 * c + 4.0 * (prim(a) - prim(c))
}

/// `(ν⊗μ)(B_r) = Σ_{|m| ≤ r} vol{w : |w|² ≤ r² - |m|²}` with torus representatives in `[-1/2, 1/2)ⁿ`.
pub fn ball_measure(r: f64, dim: usize, quad_points: usize) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    if dim == 1 {
        let reach = r.floor() as i64;
        return (-reach..=reach)
            .filter(|m| radius_covers(r, m * m))
            .map(|m| fiber_volume(radius_gap(r, m * m), 1, quad_points))
            .sum();
    }
    lattice_ball_points(r, dim)
        .iter()
        .map(|m| fiber_volume(radius_gap(r, m.norm_sq()), dim, quad_points))
        .sum()
}

/// `Σ_m ∫_{Σ_m} |F(m, w)|² dw`, exact for band-limited rows; tiles off the field's box carry no mass.
pub fn mass_on(field: &PhaseSpaceField, sigma: &TileSet) -> f64 {
    let lattice = field.lattice();
    let mut total = 0.0;
    let mut current: Option<(MultiIndex, Option<TrigPoly>, usize)> = None;
    for tile in sigma.tiles() {
        let Some(row) = lattice.linear_index(tile.m.coords()) else {
            continue;
        };
        if field.row(row).iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
            continue;
        }
        if current.as_ref().map(|(m, _, _)| m != &tile.m).unwrap_or(true) {
            current = Some((tile.m.clone(), row_power(field, row), row));
        }
        let (_, poly, row) = current.as_ref().expect("set above");
        total += match poly {
            Some(p) => p.integrate_box(&tile.lo, &tile.hi).re,
            None => grid_box_mass(field, *row, &tile.lo, &tile.hi),
        };
    }
    total.max(0.0)
}

fn grid_box_mass(field: &PhaseSpaceField, row: usize, lo: &[f64], hi: &[f64]) -> f64 {
    let grid = field.grid();
    let set = TileSet::new(vec![crate::lattice::Tile::new(
        MultiIndex::new(vec![0; grid.dim()]),
        lo.to_vec(),
        hi.to_vec(),
    )])
    .expect("tile already validated");
    let single = crate::lattice::SupportBox::new(grid.dim(), 0);
    let ind = crate::lattice::indicator_on_grid(&set, single, grid).expect("origin fiber");
    field
        .row(row)
        .iter()
        .zip(ind.values())
        .map(|(v, c)| v.norm_sqr() * c.re)
        .sum::<f64>()
        * grid.weight()
}

/// `Σ_m ∫ W(|m|², |w|²) |F(m, w)|² dw` with `w` in `[-1/2, 1/2)ⁿ`.
///
/// Each row power is a trigonometric polynomial `Σ_q c_q e^{2πi q·w}`, so the
/// row integral is `Σ_q c_q I_q` with `I_q = ∫ W Π cos(2π q_i w_i) dw`, taken by
/// a Gauss–Legendre rule split at the origin and shared by rows of equal `|m|²`.
/// Rows the grid cannot resolve fall back to the grid rule.
pub fn weighted_mass(field: &PhaseSpaceField, weight: impl Fn(f64, f64) -> f64) -> f64 {
    let n = field.dim();
    let rule = centered_axis_rule(DEFAULT_POINTS);
    let k = rule.len();
    let count = k.pow(n as u32);
    let mut tensor_w = vec![1.0; count];
    let mut tensor_wsq = vec![0.0; count];
    for (flat, (tw, tsq)) in tensor_w.iter_mut().zip(tensor_wsq.iter_mut()).enumerate() {
        let mut rem = flat;
        for _ in 0..n {
            let i = rem % k;
            rem /= k;
            *tw *= rule.weights[i];
            *tsq += rule.nodes[i] * rule.nodes[i];
        }
    }
    let degree = 2 * field.bandwidth() as i64;
    let cosines: Vec<Vec<f64>> = (-degree..=degree)
        .map(|q| {
            rule.nodes
                .iter()
                .map(|u| (2.0 * std::f64::consts::PI * q as f64 * u).cos())
                .collect()
        })
        .collect();
    let mut kernels: BTreeMap<i64, Vec<f64>> = BTreeMap::new();
    let lattice = field.lattice();
    let grid = field.grid();
    let mut total = 0.0;
    for row in 0..lattice.len() {
        let samples = field.row(row);
        if samples.iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
            continue;
        }
        let m_sq = lattice.point(row).norm_sq();
        total += match row_power(field, row) {
            Some(p) => {
                let kernel = kernels.entry(m_sq).or_insert_with(|| {
                    let mut data: Vec<f64> = tensor_w
                        .iter()
                        .zip(&tensor_wsq)
                        .map(|(tw, wsq)| tw * weight(m_sq as f64, *wsq))
                        .collect();
                    for _ in 0..n {
                        data = contract_last_axis(&data, k, &cosines);
                    }
                    data
                });
                p.coeffs().iter().zip(kernel.iter()).map(|(c, i)| c.re * i).sum::<f64>()
            }
            None => {
                samples
                    .iter()
                    .enumerate()
                    .map(|(j, v)| weight(m_sq as f64, grid.representative_norm_sq(j)) * v.norm_sqr())
                    .sum::<f64>()
                    * grid.weight()
            }
        };
    }
    total
}

/// Contracts the last axis of a row-major array against `table[q][node]` and
/// moves the new axis to the front.
fn contract_last_axis(data: &[f64], k: usize, table: &[Vec<f64>]) -> Vec<f64> {
    let rest = data.len() / k;
    let mut out = vec![0.0; table.len() * rest];
    for (q, row) in table.iter().enumerate() {
        for i in 0..rest {
            out[q * rest + i] = data[i * k..(i + 1) * k].iter().zip(row).map(|(a, b)| a * b).sum();
        }
    }
    out
}

/// `Σ_m ∫ |(m, w)|^s |F|² dw`.
pub fn moment(field: &PhaseSpaceField, s: f64) -> f64 {
    weighted_mass(field, |m_sq, w_sq| (m_sq + w_sq).powf(0.5 * s))
}

/// `ρ_s(F) = (Σ_m ∫ |(m, w)|^s |F(m, w)|² dw)^{1/s}`.
pub fn dispersion(field: &PhaseSpaceField, s: f64) -> f64 {
    moment(field, s).max(0.0).powf(1.0 / s)
}

/// `E_k(|F|²) = -Σ_m ∫ |F|² ln |F|² dw` on a refined grid, with `0 · ln 0 = 0`.
pub fn entropy_k(field: &PhaseSpaceField) -> f64 {
    let fine = if 2 * field.bandwidth() < field.grid().points_per_axis() {
        refine(field, ENTROPY_REFINE).unwrap_or_else(|_| field.clone())
    } else {
        field.clone()
    };
    let s: f64 = fine
        .values()
        .iter()
        .map(|v| {
            let rho = v.norm_sqr();
            if rho < 1e-300 {
                0.0
            } else {
                -rho * rho.ln()
            }
        })
        .sum();
    s * fine.grid().weight()
}

/// `‖F‖_{L^p}` by grid quadrature on a grid refined by `factor` (`p = ∞` takes the sample maximum).
pub fn lp_norm(field: &PhaseSpaceField, p: f64, factor: usize) -> f64 {
    if factor <= 1 || 2 * field.bandwidth() >= field.grid().points_per_axis() {
        return field.norm_lp(p);
    }
    refine(field, factor)
        .map(|f| f.norm_lp(p))
        .unwrap_or_else(|_| field.norm_lp(p))
}
