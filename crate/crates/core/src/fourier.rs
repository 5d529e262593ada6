//! Fourier transforms between ℤⁿ and 𝕋ⁿ, and exact trigonometric-polynomial helpers.
//!
//! `F_ℤⁿ f(w) = Σ_k f(k) e^{-2πi k·w}` and `F_𝕋ⁿ h(k) = ∫ h(w) e^{2πi k·w} dw`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::lattice::{LatticeSignal, PhaseSpaceField, SupportBox, TorusGrid};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Samples of a function on the torus grid.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusSamples {
    pub grid: TorusGrid,
    pub values: Vec<Complex64>,
}

/// Separable n-dimensional FFT on a `Mⁿ` grid, row-major layout.
#[derive(Clone)]
pub struct NdFft {
    grid: TorusGrid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for NdFft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NdFft").field("grid", &self.grid).finish()
    }
}

impl NdFft {
    pub fn new(grid: TorusGrid) -> Self {
        let mut planner = FftPlanner::new();
        let m = grid.points_per_axis();
        Self {
            grid,
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(m),
        }
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    /// `X_j = Σ_x a_x e^{-2πi x·j/M}`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, self.forward.as_ref());
    }

    /// `X_j = Σ_x a_x e^{2πi x·j/M}` (unnormalized).
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, self.inverse.as_ref());
    }

    fn transform(&self, data: &mut [Complex64], fft: &dyn Fft<f64>) {
        let m = self.grid.points_per_axis();
        let dim = self.grid.dim();
        assert_eq!(data.len(), self.grid.len(), "buffer does not match grid");
        let mut scratch = vec![ZERO; fft.get_inplace_scratch_len()];
        let mut line = vec![ZERO; m];
        for axis in 0..dim {
            let stride = m.pow((dim - 1 - axis) as u32);
            if stride == 1 {
                for chunk in data.chunks_exact_mut(m) {
                    fft.process_with_scratch(chunk, &mut scratch);
                }
                continue;
            }
            let block = m * stride;
            for outer in (0..data.len()).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for (i, slot) in line.iter_mut().enumerate() {
                        *slot = data[base + i * stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for (i, v) in line.iter().enumerate() {
                        data[base + i * stride] = *v;
                    }
                }
            }
        }
    }
}

/// Grid position of the lattice frequency `k` reduced modulo `M`.
pub fn wrapped_node(grid: &TorusGrid, coords: &[i64]) -> usize {
    let m = grid.points_per_axis() as i64;
    coords
        .iter()
        .fold(0usize, |acc, &c| acc * m as usize + c.rem_euclid(m) as usize)
}

/// Node values of `w ↦ Σ_k a(k) e^{-2πi k·w}` for any finitely supported `a`.
///
/// Frequencies that collide modulo `M` are summed, which leaves node values unchanged.
pub(crate) fn lattice_sum_on_nodes(
    fft: &NdFft,
    terms: impl IntoIterator<Item = (Vec<i64>, Complex64)>,
) -> Vec<Complex64> {
    let grid = fft.grid();
    let mut buf = vec![ZERO; grid.len()];
    for (k, v) in terms {
        buf[wrapped_node(&grid, &k)] += v;
    }
    fft.forward(&mut buf);
    buf
}

fn ensure_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// `F_ℤⁿ f` sampled on the grid by FFT. Requires `M ≥ 2N + 1`.
pub fn fourier_lattice_to_torus(f: &LatticeSignal, grid: TorusGrid) -> Result<TorusSamples> {
    ensure_dim(grid.dim(), f.dim())?;
    let required = f.support().side();
    if grid.points_per_axis() < required {
        return Err(Error::UnderResolved {
            points: grid.points_per_axis(),
            required,
        });
    }
    let fft = NdFft::new(grid);
    Ok(TorusSamples {
        grid,
        values: lattice_sum_on_nodes(&fft, f.iter()),
    })
}

/// `F_ℤⁿ f` sampled on the grid by direct summation.
pub fn fourier_lattice_to_torus_direct(f: &LatticeSignal, grid: TorusGrid) -> Result<TorusSamples> {
    ensure_dim(grid.dim(), f.dim())?;
    let required = f.support().side();
    if grid.points_per_axis() < required {
        return Err(Error::UnderResolved {
            points: grid.points_per_axis(),
            required,
        });
    }
    let terms: Vec<(Vec<i64>, Complex64)> = f.iter().filter(|(_, v)| *v != ZERO).collect();
    let values = (0..grid.len())
        .map(|j| {
            let w = grid.node(j);
            terms
                .iter()
                .map(|(k, v)| v * character(k, &w).conj())
                .sum()
        })
        .collect();
    Ok(TorusSamples { grid, values })
}

/// `e^{2πi k·w}`.
pub fn character(k: &[i64], w: &[f64]) -> Complex64 {
    let phase: f64 = k.iter().zip(w).map(|(a, b)| *a as f64 * b).sum();
    Complex64::from_polar(1.0, 2.0 * PI * phase)
}

/// `Σ_j M⁻ⁿ e^{2πi k·w_j} h(w_j)`; exact when `k` plus the bandwidth of `h` stays below `M`.
pub fn fourier_torus_to_lattice(h: &TorusSamples, k: &[i64]) -> Complex64 {
    let grid = h.grid;
    let m = grid.points_per_axis() as i64;
    // Reduce phases modulo M to keep arguments small.
    let reduced: Vec<i64> = k.iter().map(|c| c.rem_euclid(m)).collect();
    let s: Complex64 = h
        .values
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let idx = grid.node_indices(j);
            let phase: i64 = idx
                .iter()
                .zip(&reduced)
                .map(|(a, b)| (*a as i64 * b) % m)
                .sum::<i64>()
                % m;
            v * Complex64::from_polar(1.0, 2.0 * PI * phase as f64 / m as f64)
        })
        .sum();
    s * grid.weight()
}

/// `F_𝕋ⁿ h` on every point of `support`, by inverse FFT.
pub fn fourier_torus_to_lattice_box(h: &TorusSamples, support: SupportBox) -> Result<LatticeSignal> {
    ensure_dim(h.grid.dim(), support.dim())?;
    let fft = NdFft::new(h.grid);
    let mut buf = h.values.clone();
    fft.inverse(&mut buf);
    let w = h.grid.weight();
    Ok(LatticeSignal::from_fn(support, |k| {
        buf[wrapped_node(&h.grid, k)] * w
    }))
}

/// `(‖F_ℤⁿ f‖²_{L²(𝕋ⁿ)}, ‖f‖²_{ℓ²})`. Requires `M ≥ 4N + 1`.
pub fn plancherel_lattice(f: &LatticeSignal, grid: TorusGrid) -> Result<(f64, f64)> {
    ensure_dim(grid.dim(), f.dim())?;
    let required = 4 * f.support().half_width() + 1;
    if grid.points_per_axis() < required {
        return Err(Error::UnderResolved {
            points: grid.points_per_axis(),
            required,
        });
    }
    let h = fourier_lattice_to_torus(f, grid)?;
    let lhs = grid.weight() * h.values.iter().map(|v| v.norm_sqr()).sum::<f64>();
    Ok((lhs, f.norm_sq()))
}

/// Trigonometric polynomial `p(w) = Σ_{|q|∞ ≤ D} c_q e^{2πi q·w}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    support: SupportBox,
    coeffs: Vec<Complex64>,
}

impl TrigPoly {
    pub fn new(dim: usize, degree: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        let support = SupportBox::new(dim, degree);
        if coeffs.len() != support.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} coefficients for degree {degree} in dimension {dim}",
                coeffs.len()
            )));
        }
        Ok(Self { support, coeffs })
    }

    /// `F_ℤⁿ f` as a polynomial: `c_q = f(-q)`.
    pub fn from_lattice(f: &LatticeSignal) -> Self {
        let support = f.support();
        let coeffs = (0..support.len())
            .map(|i| {
                let q: Vec<i64> = support.coords_of(i).iter().map(|c| -c).collect();
                f.get(&q)
            })
            .collect();
        Self { support, coeffs }
    }

    /// Coefficients recovered from grid samples. Requires `M ≥ 2D + 1`.
    pub fn from_samples(samples: &[Complex64], grid: TorusGrid, degree: usize) -> Result<Self> {
        if grid.points_per_axis() < 2 * degree + 1 {
            return Err(Error::UnderResolved {
                points: grid.points_per_axis(),
                required: 2 * degree + 1,
            });
        }
        if samples.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} samples for a grid of {} nodes",
                samples.len(),
                grid.len()
            )));
        }
        let fft = NdFft::new(grid);
        let mut buf = samples.to_vec();
        fft.forward(&mut buf);
        let w = grid.weight();
        let support = SupportBox::new(grid.dim(), degree);
        let coeffs = (0..support.len())
            .map(|i| buf[wrapped_node(&grid, &support.coords_of(i))] * w)
            .collect();
        Ok(Self { support, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.support.dim()
    }

    pub fn degree(&self) -> usize {
        self.support.half_width()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, q: &[i64]) -> Complex64 {
        self.support.linear_index(q).map_or(ZERO, |i| self.coeffs[i])
    }

    /// `∫_𝕋ⁿ p dμ`.
    pub fn mean(&self) -> Complex64 {
        self.coeff(&vec![0; self.dim()])
    }

    pub fn evaluate(&self, w: &[f64]) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * character(&self.support.coords_of(i), w))
            .sum()
    }

    /// Values on the product of per-axis point lists, row-major.
    pub fn evaluate_tensor(&self, axes: &[Vec<f64>]) -> Vec<Complex64> {
        let d = self.degree() as i64;
        let weights: Vec<Vec<Vec<Complex64>>> = axes
            .iter()
            .map(|pts| {
                pts.iter()
                    .map(|x| {
                        (-d..=d)
                            .map(|q| Complex64::from_polar(1.0, 2.0 * PI * q as f64 * x))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        self.contract(&weights)
    }

    /// `∫_{∏[lo_i, hi_i)} p dw`.
    pub fn integrate_box(&self, lo: &[f64], hi: &[f64]) -> Complex64 {
        let d = self.degree() as i64;
        let weights: Vec<Vec<Vec<Complex64>>> = lo
            .iter()
            .zip(hi)
            .map(|(a, b)| vec![(-d..=d).map(|q| character_integral(q, *a, *b)).collect()])
            .collect();
        self.contract(&weights)[0]
    }

    /// Node values on `grid`; frequencies are folded modulo `M`.
    pub fn sample_on(&self, grid: TorusGrid) -> Vec<Complex64> {
        let fft = NdFft::new(grid);
        let mut buf = vec![ZERO; grid.len()];
        for (i, c) in self.coeffs.iter().enumerate() {
            buf[wrapped_node(&grid, &self.support.coords_of(i))] += c;
        }
        fft.inverse(&mut buf);
        buf
    }

    /// Applies one linear map per axis to the coefficient tensor.
    ///
    /// `weights[a][p][q]` maps coefficient `q - D` on axis `a` to output point `p`.
    fn contract(&self, weights: &[Vec<Vec<Complex64>>]) -> Vec<Complex64> {
        let n = self.dim();
        assert_eq!(weights.len(), n, "one weight matrix per axis");
        let side = self.support.side();
        let mut dims = vec![side; n];
        let mut cur = self.coeffs.clone();
        for (axis, w) in weights.iter().enumerate() {
            let outer: usize = dims[..axis].iter().product();
            let inner: usize = dims[axis + 1..].iter().product();
            let points = w.len();
            let mut next = vec![ZERO; outer * points * inner];
            for o in 0..outer {
                for (p, row) in w.iter().enumerate() {
                    let dst = &mut next[(o * points + p) * inner..(o * points + p + 1) * inner];
                    for (q, wq) in row.iter().enumerate() {
                        if *wq == ZERO {
                            continue;
                        }
                        let src = &cur[(o * side + q) * inner..(o * side + q + 1) * inner];
                        for (d, s) in dst.iter_mut().zip(src) {
                            *d += wq * s;
                        }
                    }
                }
            }
            dims[axis] = points;
            cur = next;
        }
        cur
    }
}

/// `∫_a^b e^{2πi q w} dw`.
pub fn character_integral(q: i64, a: f64, b: f64) -> Complex64 {
    if q == 0 {
        return Complex64::new(b - a, 0.0);
    }
    let t = 2.0 * PI * q as f64;
    // (e^{itb} - e^{ita}) / (it) = e^{it(a+b)/2} · 2 sin(t(b-a)/2) / t
    let mid = Complex64::from_polar(1.0, t * 0.5 * (a + b));
    mid * (2.0 * (t * 0.5 * (b - a)).sin() / t)
}

/// Coefficients of `|F(m, ·)|²` for one row of a field.
///
/// `None` when the grid cannot resolve the doubled bandwidth.
pub fn row_power(field: &PhaseSpaceField, row: usize) -> Option<TrigPoly> {
    let degree = 2 * field.bandwidth();
    let sq: Vec<Complex64> = field
        .row(row)
        .iter()
        .map(|v| Complex64::new(v.norm_sqr(), 0.0))
        .collect();
    TrigPoly::from_samples(&sq, field.grid(), degree).ok()
}

/// Resamples every row of a band-limited field onto a grid `factor` times finer.
pub fn refine(field: &PhaseSpaceField, factor: usize) -> Result<PhaseSpaceField> {
    let grid = field.grid().refined(factor.max(1));
    let mut values = Vec::with_capacity(field.lattice().len() * grid.len());
    for row in field.rows() {
        let poly = TrigPoly::from_samples(row, field.grid(), field.bandwidth())?;
        values.extend(poly.sample_on(grid));
    }
    Ok(PhaseSpaceField::from_values(field.lattice(), grid, values)?.with_bandwidth(field.bandwidth()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn delta_transforms_to_constant() {
        let f = LatticeSignal::delta(SupportBox::new(1, 2), &crate::MultiIndex::zero(1));
        let h = fourier_lattice_to_torus(&f, TorusGrid::new(1, 8)).unwrap();
        assert!(h.values.iter().all(|v| (v - c(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn shifted_delta_is_a_single_phase() {
        let f = LatticeSignal::delta(SupportBox::new(1, 1), &crate::MultiIndex::new(vec![1]));
        let grid = TorusGrid::new(1, 8);
        let h = fourier_lattice_to_torus(&f, grid).unwrap();
        for (j, v) in h.values.iter().enumerate() {
            let w = grid.axis_value(j);
            assert!((v - Complex64::from_polar(1.0, -2.0 * PI * w)).norm() < 1e-14);
        }
    }

    #[test]
    fn under_resolved_grid_is_rejected() {
        let f = LatticeSignal::zeros(SupportBox::new(1, 4));
        let err = fourier_lattice_to_torus(&f, TorusGrid::new(1, 8)).unwrap_err();
        assert!(err.to_string().contains("grid under-resolves signal bandwidth"));
        assert!(plancherel_lattice(&LatticeSignal::zeros(SupportBox::new(1, 2)), TorusGrid::new(1, 8)).is_err());
    }

    #[test]
    fn characters_are_orthogonal_under_the_grid_rule() {
        let grid = TorusGrid::new(2, 6);
        let one = TorusSamples {
            grid,
            values: vec![c(1.0, 0.0); grid.len()],
        };
        assert!((fourier_torus_to_lattice(&one, &[0, 0]) - c(1.0, 0.0)).norm() < 1e-15);
        assert!(fourier_torus_to_lattice(&one, &[1, -2]).norm() < 1e-15);
    }

    #[test]
    fn nd_fft_matches_direct_transform_in_three_dimensions() {
        let grid = TorusGrid::new(3, 4);
        let data: Vec<Complex64> = (0..grid.len()).map(|i| c(i as f64, (i * i % 7) as f64)).collect();
        let mut fast = data.clone();
        NdFft::new(grid).forward(&mut fast);
        for j in 0..grid.len() {
            let jj = grid.node_indices(j);
            let direct: Complex64 = data
                .iter()
                .enumerate()
                .map(|(x, v)| {
                    let xx = grid.node_indices(x);
                    let ph: f64 = xx.iter().zip(&jj).map(|(a, b)| (a * b) as f64).sum();
                    v * Complex64::from_polar(1.0, -2.0 * PI * ph / 4.0)
                })
                .sum();
            assert!((direct - fast[j]).norm() < 1e-10);
        }
    }

    #[test]
    fn character_integral_closed_form() {
        // ∫_0^{1/4} e^{2πi w} dw = (i - 1)/(2πi)
        let expect = (c(0.0, 1.0) - c(1.0, 0.0)) / c(0.0, 2.0 * PI);
        assert!((character_integral(1, 0.0, 0.25) - expect).norm() < 1e-15);
        assert!((character_integral(3, 0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn trig_poly_round_trips_through_samples() {
        let coeffs: Vec<Complex64> = (0..25).map(|i| c((i as f64).sin(), (i as f64).cos())).collect();
        let p = TrigPoly::new(2, 2, coeffs).unwrap();
        let grid = TorusGrid::new(2, 5);
        let samples = p.sample_on(grid);
        let back = TrigPoly::from_samples(&samples, grid, 2).unwrap();
        for (a, b) in p.coeffs().iter().zip(back.coeffs()) {
            assert!((a - b).norm() < 1e-13);
        }
        let w = [0.3, -0.17];
        let direct = p.evaluate(&w);
        let tensor = p.evaluate_tensor(&[vec![0.3], vec![-0.17]])[0];
        assert!((direct - tensor).norm() < 1e-13);
    }

    #[test]
    fn box_integral_matches_fine_midpoint_rule() {
        let p = TrigPoly::new(1, 2, vec![c(0.1, 0.2), c(-0.3, 0.0), c(1.0, 0.0), c(0.5, -0.5), c(0.0, 0.7)]).unwrap();
        let (a, b) = (-0.3, 0.45);
        let n = 200_000;
        let h = (b - a) / n as f64;
        let mid: Complex64 = (0..n).map(|i| p.evaluate(&[a + (i as f64 + 0.5) * h])).sum::<Complex64>() * h;
        assert!((p.integrate_box(&[a], &[b]) - mid).norm() < 1e-9);
    }

    #[test]
    fn refine_preserves_band_limited_rows() {
        let grid = TorusGrid::new(1, 8);
        let lattice = SupportBox::new(1, 0);
        let p = TrigPoly::new(1, 2, vec![c(0.0, 1.0), c(2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.5, 0.5)]).unwrap();
        let field = PhaseSpaceField::from_values(lattice, grid, p.sample_on(grid)).unwrap().with_bandwidth(2);
        let fine = refine(&field, 4).unwrap();
        for (j, v) in fine.row(0).iter().enumerate() {
            let w = fine.grid().axis_value(j);
            assert!((v - p.evaluate(&[w])).norm() < 1e-12);
        }
    }
}
