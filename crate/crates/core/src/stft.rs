//! The short-time Fourier transform `V_g f(m, w) = Σ_k f(k) conj(g(k - m)) e^{-2πi w·k}`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fourier::{character, lattice_sum_on_nodes, wrapped_node, NdFft};
use crate::lattice::{next_pow2, LatticeSignal, MultiIndex, PhaseSpaceField, SupportBox, TorusGrid};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Truncation boxes and torus grid shared by a family of transforms.
#[derive(Clone, Debug)]
pub struct StftPlan {
    signal: SupportBox,
    window: SupportBox,
    output: SupportBox,
    fft: NdFft,
}

impl StftPlan {
    /// Plan on the default grid [`StftPlan::default_points`].
    pub fn new(dim: usize, signal_half_width: usize, window_half_width: usize) -> Self {
        let points = Self::default_points(signal_half_width, window_half_width);
        Self::with_grid(dim, signal_half_width, window_half_width, points)
            .expect("default grid satisfies the resolution bound")
    }

    /// Smallest power of two that is at least `4N_f + 2` and `2N_f + 2N_g + 1`.
    ///
    /// The first bound makes `|V_g f(m, ·)|²` exactly integrable; the second
    /// makes pairings against the reproducing kernel exact.
    pub fn default_points(signal_half_width: usize, window_half_width: usize) -> usize {
        next_pow2((4 * signal_half_width + 2).max(2 * signal_half_width + 2 * window_half_width + 1))
    }

    /// Plan with `points` nodes per axis; `0` selects the default. Requires `M ≥ 4N_f + 2`.
    pub fn with_grid(
        dim: usize,
        signal_half_width: usize,
        window_half_width: usize,
        points: usize,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        let points = if points == 0 {
            Self::default_points(signal_half_width, window_half_width)
        } else {
            points
        };
        let required = 4 * signal_half_width + 2;
        if points < required {
            return Err(Error::UnderResolved { points, required });
        }
        Ok(Self {
            signal: SupportBox::new(dim, signal_half_width),
            window: SupportBox::new(dim, window_half_width),
            output: SupportBox::new(dim, signal_half_width + window_half_width),
            fft: NdFft::new(TorusGrid::new(dim, points)),
        })
    }

    pub fn dim(&self) -> usize {
        self.signal.dim()
    }

    pub fn signal_box(&self) -> SupportBox {
        self.signal
    }

    pub fn window_box(&self) -> SupportBox {
        self.window
    }

    /// `[-(N_f + N_g), N_f + N_g]ⁿ`, outside of which every transform vanishes.
    pub fn output_box(&self) -> SupportBox {
        self.output
    }

    pub fn grid(&self) -> TorusGrid {
        self.fft.grid()
    }

    pub fn fft(&self) -> &NdFft {
        &self.fft
    }

    /// Whether kernel pairings are integrated exactly on this grid.
    pub fn kernel_exact(&self) -> bool {
        self.grid().points_per_axis() > 2 * (self.signal.half_width() + self.window.half_width())
    }

    pub(crate) fn fit_signal(&self, f: &LatticeSignal) -> Result<LatticeSignal> {
        self.fit(f, self.signal, "signal")
    }

    pub(crate) fn fit_window(&self, g: &LatticeSignal) -> Result<LatticeSignal> {
        let g = self.fit(g, self.window, "window")?;
        if g.is_zero() {
            return Err(Error::ZeroWindow);
        }
        Ok(g)
    }

    fn fit(&self, s: &LatticeSignal, target: SupportBox, what: &str) -> Result<LatticeSignal> {
        if s.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: s.dim(),
            });
        }
        s.embed(target.half_width()).map_err(|_| {
            Error::ShapeMismatch(format!(
                "{what} support exceeds the plan half-width {}",
                target.half_width()
            ))
        })
    }
}

/// `T_k f(m) = f(m - k)`; the box grows to hold the shifted support.
pub fn translate(f: &LatticeSignal, k: &MultiIndex) -> LatticeSignal {
    let support = SupportBox::new(f.dim(), f.support().half_width() + k.max_abs() as usize);
    LatticeSignal::from_fn(support, |m| {
        let src: Vec<i64> = m.iter().zip(k.coords()).map(|(a, b)| a - b).collect();
        f.get(&src)
    })
}

/// `M_w f(m) = e^{2πi w·m} f(m)`.
pub fn modulate(f: &LatticeSignal, w: &[f64]) -> LatticeSignal {
    LatticeSignal::from_fn(f.support(), |m| character(m, w) * f.get(m))
}

/// `g*(x) = conj(g(-x))`.
pub fn involution(g: &LatticeSignal) -> LatticeSignal {
    LatticeSignal::from_fn(g.support(), |x| {
        let neg: Vec<i64> = x.iter().map(|c| -c).collect();
        g.get(&neg).conj()
    })
}

fn window_row_terms<'a>(
    f: &'a LatticeSignal,
    g: &'a LatticeSignal,
    m: &'a [i64],
) -> impl Iterator<Item = (Vec<i64>, Complex64)> + 'a {
    f.iter().filter_map(move |(k, v)| {
        if v == ZERO {
            return None;
        }
        let shifted: Vec<i64> = k.iter().zip(m).map(|(a, b)| a - b).collect();
        let gv = g.get(&shifted);
        (gv != ZERO).then(|| (k, v * gv.conj()))
    })
}

/// `V_g f` on the plan's output box and grid, one FFT per lattice row.
pub fn stft(f: &LatticeSignal, g: &LatticeSignal, plan: &StftPlan) -> Result<PhaseSpaceField> {
    let g = plan.fit_window(g)?;
    let f = plan.fit_signal(f)?;
    let out = plan.output_box();
    let rows: Vec<Vec<Complex64>> = (0..out.len())
        .into_par_iter()
        .map(|r| {
            let m = out.coords_of(r);
            lattice_sum_on_nodes(plan.fft(), window_row_terms(&f, &g, &m))
        })
        .collect();
    let values = rows.concat();
    Ok(PhaseSpaceField::from_values(out, plan.grid(), values)?
        .with_bandwidth(plan.signal_box().half_width()))
}

/// `V_g f(m, w)` at an arbitrary phase-space point, by direct summation.
pub fn stft_point(f: &LatticeSignal, g: &LatticeSignal, m: &[i64], w: &[f64]) -> Complex64 {
    window_row_terms(f, g, m)
        .map(|(k, v)| v * character(&k, w).conj())
        .sum()
}

/// `⟨F, G⟩ = Σ_m Σ_j M⁻ⁿ F(m, w_j) conj(G(m, w_j))`.
pub fn phase_space_inner(a: &PhaseSpaceField, b: &PhaseSpaceField) -> Result<Complex64> {
    a.inner(b)
}

/// `k ↦ Σ_m Σ_j M⁻ⁿ F(m, w_j) e^{2πi w_j·k} γ(k - m)` on the plan's signal box.
///
/// This is the exact adjoint of `h ↦ V_γ h` for `h` supported in the signal box.
pub fn stft_adjoint(
    field: &PhaseSpaceField,
    gamma: &LatticeSignal,
    plan: &StftPlan,
) -> Result<LatticeSignal> {
    if field.lattice() != plan.output_box() || field.grid() != plan.grid() {
        return Err(Error::ShapeMismatch(
            "field does not live on the plan's output box and grid".into(),
        ));
    }
    let gamma = plan.fit(gamma, plan.window_box(), "window")?;
    let signal = plan.signal_box();
    let grid = plan.grid();
    let weight = grid.weight();
    let out = plan.output_box();
    let partials: Vec<Vec<Complex64>> = (0..out.len())
        .into_par_iter()
        .map(|r| {
            let row = field.row(r);
            let mut acc = vec![ZERO; signal.len()];
            if row.iter().all(|v| *v == ZERO) {
                return acc;
            }
            let m = out.coords_of(r);
            let mut buf = row.to_vec();
            plan.fft().inverse(&mut buf);
            for (i, slot) in acc.iter_mut().enumerate() {
                let k = signal.coords_of(i);
                let shifted: Vec<i64> = k.iter().zip(&m).map(|(a, b)| a - b).collect();
                let gv = gamma.get(&shifted);
                if gv != ZERO {
                    *slot = buf[wrapped_node(&grid, &k)] * weight * gv;
                }
            }
            acc
        })
        .collect();
    let mut values = vec![ZERO; signal.len()];
    for part in partials {
        for (v, p) in values.iter_mut().zip(part) {
            *v += p;
        }
    }
    LatticeSignal::from_values(signal, values)
}

/// `stft_adjoint(F, γ) / ⟨γ, g⟩`; recovers `f` from `F = V_g f`.
pub fn invert(
    field: &PhaseSpaceField,
    g: &LatticeSignal,
    gamma: &LatticeSignal,
    plan: &StftPlan,
) -> Result<LatticeSignal> {
    let g = plan.fit_window(g)?;
    let gamma = plan.fit(gamma, plan.window_box(), "window")?;
    let inner = gamma.inner(&g);
    let threshold = 1e-10 * g.norm_l2() * gamma.norm_l2();
    if !(inner.norm() > threshold) {
        return Err(Error::UnstableInversion {
            inner: inner.norm(),
            threshold,
        });
    }
    Ok(stft_adjoint(field, &gamma, plan)?.scaled(inner.inv()))
}

/// `K_g((m', w'); (m, w)) = V_g(M_w T_m g)(m', w') / ‖g‖²`, evaluated directly.
pub fn reproducing_kernel(
    g: &LatticeSignal,
    at: (&[i64], &[f64]),
    eval_at: (&[i64], &[f64]),
) -> Result<Complex64> {
    if g.is_zero() {
        return Err(Error::ZeroWindow);
    }
    let (m, w) = at;
    let shifted = modulate(&translate(g, &MultiIndex::try_new(m.to_vec())?), w);
    Ok(stft_point(&shifted, g, eval_at.0, eval_at.1) / g.norm_sq())
}

/// `(m', w_j) ↦ K_g((m', w_j); (m, w))` on the plan's output box and grid.
pub fn kernel_field(
    g: &LatticeSignal,
    m: &[i64],
    w: &[f64],
    plan: &StftPlan,
) -> Result<PhaseSpaceField> {
    let g = plan.fit_window(g)?;
    let atom = modulate(&translate(&g, &MultiIndex::try_new(m.to_vec())?), w);
    let norm_sq = g.norm_sq();
    let out = plan.output_box();
    let rows: Vec<Vec<Complex64>> = (0..out.len())
        .into_par_iter()
        .map(|r| {
            let mp = out.coords_of(r);
            let mut row = lattice_sum_on_nodes(plan.fft(), window_row_terms(&atom, &g, &mp));
            for v in &mut row {
                *v /= norm_sq;
            }
            row
        })
        .collect();
    PhaseSpaceField::from_values(out, plan.grid(), rows.concat())
}

/// Candidate convolution expressions for `V_g f(m, w)` at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvolutionForms {
    /// The defining sum.
    pub definition: Complex64,
    /// `e^{-2πi w·m} (f ∗ M_w g*)(m)` with `g*(x) = conj(g(-x))`.
    pub involution: Complex64,
    /// `e^{-2πi w·m} (f ∗ conj(M_w g))(m)`.
    pub conjugated_window: Complex64,
    /// `conj((M_w conj(f) ∗ g)(m))`.
    pub conjugated_signal: Complex64,
}

fn convolve_at(a: &LatticeSignal, b: &LatticeSignal, m: &[i64]) -> Complex64 {
    a.iter()
        .map(|(k, v)| {
            let d: Vec<i64> = m.iter().zip(&k).map(|(x, y)| x - y).collect();
            v * b.get(&d)
        })
        .sum()
}

pub fn convolution_forms(f: &LatticeSignal, g: &LatticeSignal, m: &[i64], w: &[f64]) -> ConvolutionForms {
    let phase = character(m, w).conj();
    let mw_gstar = modulate(&involution(g), w);
    let mw_g = modulate(g, w);
    let conj_mw_g = LatticeSignal::from_fn(mw_g.support(), |x| mw_g.get(x).conj());
    let conj_f = LatticeSignal::from_fn(f.support(), |x| f.get(x).conj());
    ConvolutionForms {
        definition: stft_point(f, g, m, w),
        involution: phase * convolve_at(f, &mw_gstar, m),
        conjugated_window: phase * convolve_at(f, &conj_mw_g, m),
        conjugated_signal: convolve_at(&modulate(&conj_f, w), g, m).conj(),
    }
}

/// Largest deviation of each convolution form from the transform over the plan's nodes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvolutionDiscrepancy {
    pub involution: f64,
    pub conjugated_window: f64,
    pub conjugated_signal: f64,
}

pub fn convolution_discrepancy(
    f: &LatticeSignal,
    g: &LatticeSignal,
    plan: &StftPlan,
) -> Result<ConvolutionDiscrepancy> {
    let field = stft(f, g, plan)?;
    let out = plan.output_box();
    let grid = plan.grid();
    let mut d = ConvolutionDiscrepancy {
        involution: 0.0,
        conjugated_window: 0.0,
        conjugated_signal: 0.0,
    };
    for r in 0..out.len() {
        let m = out.coords_of(r);
        for j in 0..grid.len() {
            let w = grid.node(j);
            let v = field.row(r)[j];
            let forms = convolution_forms(f, g, &m, &w);
            d.involution = d.involution.max((forms.involution - v).norm());
            d.conjugated_window = d.conjugated_window.max((forms.conjugated_window - v).norm());
            d.conjugated_signal = d.conjugated_signal.max((forms.conjugated_signal - v).norm());
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn delta(n: usize, at: &[i64]) -> LatticeSignal {
        LatticeSignal::delta(SupportBox::new(n, 0), &MultiIndex::new(at.to_vec()))
    }

    #[test]
    fn default_grid_bounds() {
        assert_eq!(StftPlan::default_points(0, 0), 2);
        assert_eq!(StftPlan::default_points(2, 1), 16);
        assert_eq!(StftPlan::default_points(1, 5), 16);
        assert!(StftPlan::with_grid(1, 2, 0, 8).is_err());
        assert!(StftPlan::with_grid(1, 2, 0, 10).is_ok());
    }

    #[test]
    fn delta_delta_transform() {
        let plan = StftPlan::new(1, 0, 0);
        let d = delta(1, &[0]);
        let v = stft(&d, &d, &plan).unwrap();
        assert!(v.row(0).iter().all(|x| (x - c(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn shifted_delta_transform() {
        let plan = StftPlan::new(1, 1, 0);
        let v = stft(&delta(1, &[1]), &delta(1, &[0]), &plan).unwrap();
        let grid = plan.grid();
        for r in 0..plan.output_box().len() {
            let m = plan.output_box().coords_of(r);
            for j in 0..grid.len() {
                let expect = if m == [1] {
                    Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * grid.axis_value(j))
                } else {
                    ZERO
                };
                assert!((v.row(r)[j] - expect).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_window_is_rejected() {
        let plan = StftPlan::new(1, 1, 1);
        let z = LatticeSignal::zeros(SupportBox::new(1, 1));
        assert_eq!(stft(&delta(1, &[0]), &z, &plan).unwrap_err(), Error::ZeroWindow);
        assert!(reproducing_kernel(&z, (&[0], &[0.0]), (&[0], &[0.0])).is_err());
    }

    #[test]
    fn translate_and_modulate_basics() {
        let d0 = delta(1, &[0]);
        let t = translate(&d0, &MultiIndex::new(vec![1]));
        assert_eq!(t.get(&[1]), c(1.0, 0.0));
        assert_eq!(t.get(&[0]), ZERO);
        let m = modulate(&delta(1, &[1]), &[0.3]);
        assert!((m.get(&[1]) - Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * 0.3)).norm() < 1e-15);
    }

    #[test]
    fn inversion_requires_non_orthogonal_pair() {
        let plan = StftPlan::new(1, 1, 1);
        let g = delta(1, &[0]);
        let gamma = delta(1, &[1]);
        let v = stft(&delta(1, &[0]), &g, &plan).unwrap();
        let err = invert(&v, &g, &gamma, &plan).unwrap_err();
        assert!(err.to_string().contains("too small for stable inversion"));
    }

    #[test]
    fn kernel_diagonal_is_one() {
        let g = delta(1, &[0]);
        let k = reproducing_kernel(&g, (&[0], &[0.0]), (&[0], &[0.0])).unwrap();
        assert!((k - c(1.0, 0.0)).norm() < 1e-15);
    }
}
