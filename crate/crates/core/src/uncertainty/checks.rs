//! One checker per identity or inequality, each returning an [`InequalityReport`].

use num_complex::Complex64;

use super::constants::{heisenberg_constant, local_uncertainty_constant, local_uncertainty_corollary_constant};
use super::functionals::{ball_measure, dispersion, entropy_k, lp_norm, mass_on, moment, weighted_mass, BALL_QUAD_POINTS};
use super::report::{InequalityReport, Status, Witness};
use crate::error::{Error, Result};
use crate::lattice::{ball_tileset, measure, LatticeSignal, MultiIndex, PhaseSpaceField, SupportBox, TileSet};
use crate::operators::{benedicks_constant, op_norm, ConcentrationOperator};
use crate::stft::{
    convolution_discrepancy, invert, kernel_field, modulate, reproducing_kernel, stft, stft_point, translate, StftPlan,
};

/// Relative tolerance for exact L² identities.
pub const TOL_IDENTITY: f64 = 1e-12;
/// Relative tolerance for inversion.
pub const TOL_INVERSION: f64 = 1e-10;
/// Tolerance for inequalities whose sides are integrated exactly.
pub const TOL_EXACT: f64 = 1e-8;
/// Tolerance for inequalities involving `|·|^s`, `ln` or `L^p` quadrature.
pub const TOL_QUADRATURE: f64 = 1e-6;
/// Gram-matrix tolerance for orthonormal families.
pub const TOL_ORTHONORMAL: f64 = 1e-10;

/// A signal, a window, their transform and the plan that produced it.
#[derive(Clone, Debug)]
pub struct StftContext {
    f: LatticeSignal,
    g: LatticeSignal,
    plan: StftPlan,
    field: PhaseSpaceField,
}

impl StftContext {
    pub fn new(f: &LatticeSignal, g: &LatticeSignal, plan: &StftPlan) -> Result<Self> {
        let field = stft(f, g, plan)?;
        Ok(Self {
            f: plan.fit_signal(f)?,
            g: plan.fit_window(g)?,
            plan: plan.clone(),
            field,
        })
    }

    /// Multiplies the stored transform by `scale`; used to test that checkers catch faults.
    pub fn with_fault_scale(mut self, scale: f64) -> Self {
        self.field = self.field.scaled(Complex64::new(scale, 0.0));
        self
    }

    pub fn signal(&self) -> &LatticeSignal {
        &self.f
    }

    pub fn window(&self) -> &LatticeSignal {
        &self.g
    }

    pub fn plan(&self) -> &StftPlan {
        &self.plan
    }

    pub fn field(&self) -> &PhaseSpaceField {
        &self.field
    }

    /// `‖f‖² ‖g‖²`.
    pub fn energy(&self) -> f64 {
        self.f.norm_sq() * self.g.norm_sq()
    }

    /// `‖V‖²` of the stored transform.
    pub fn total_mass(&self) -> f64 {
        self.field.norm_sq()
    }

    /// `‖χ_Σ V‖²`, integrated exactly.
    pub fn mass_on(&self, sigma: &TileSet) -> f64 {
        mass_on(&self.field, sigma).min(self.total_mass())
    }

    /// `‖χ_{Σᶜ} V‖²`.
    pub fn mass_off(&self, sigma: &TileSet) -> f64 {
        (self.total_mass() - self.mass_on(sigma)).max(0.0)
    }

    fn witness(&self) -> Witness {
        Witness::default().signal("f", &self.f).signal("g", &self.g)
    }

    fn ensure_nonzero(&self) -> Result<()> {
        if self.f.is_zero() {
            return Err(Error::ZeroInput("signal"));
        }
        Ok(())
    }
}

fn identity_report(name: &str, lhs: f64, rhs: f64, deviation: f64, tolerance: f64) -> InequalityReport {
    InequalityReport::new(name, lhs, rhs, -deviation, tolerance).detail("deviation", deviation)
}

/// `‖V_g f‖² = ‖f‖² ‖g‖²`.
pub fn check_plancherel(ctx: &StftContext) -> InequalityReport {
    let lhs = ctx.total_mass();
    let rhs = ctx.energy();
    identity_report("plancherel", lhs, rhs, (lhs - rhs).abs(), TOL_IDENTITY * rhs.max(f64::MIN_POSITIVE))
        .with_witness(ctx.witness())
}

/// `⟨V_{g₁} f₁, V_{g₂} f₂⟩ = ⟨f₁, f₂⟩ ⟨g₂, g₁⟩`.
pub fn check_orthogonality(
    f1: &LatticeSignal,
    g1: &LatticeSignal,
    f2: &LatticeSignal,
    g2: &LatticeSignal,
    plan: &StftPlan,
) -> Result<InequalityReport> {
    let v1 = stft(f1, g1, plan)?;
    let v2 = stft(f2, g2, plan)?;
    let lhs = v1.inner(&v2)?;
    let rhs = f1.inner(f2) * g2.inner(g1);
    let scale = f1.norm_l2() * f2.norm_l2() * g1.norm_l2() * g2.norm_l2();
    let deviation = (lhs - rhs).norm();
    Ok(identity_report("orthogonality", lhs.norm(), rhs.norm(), deviation, TOL_IDENTITY * scale.max(f64::MIN_POSITIVE))
        .detail("lhs_re", lhs.re)
        .detail("lhs_im", lhs.im)
        .detail("rhs_re", rhs.re)
        .detail("rhs_im", rhs.im)
        .with_witness(
            Witness::default()
                .signal("f1", f1)
                .signal("g1", g1)
                .signal("f2", f2)
                .signal("g2", g2),
        ))
}

/// `‖invert(V_g f, g, γ) - f‖ ≤ 10⁻¹⁰ ‖f‖`.
pub fn check_inversion(
    f: &LatticeSignal,
    g: &LatticeSignal,
    gamma: &LatticeSignal,
    plan: &StftPlan,
) -> Result<InequalityReport> {
    let field = stft(f, g, plan)?;
    let recovered = invert(&field, g, gamma, plan)?;
    let f = plan.fit_signal(f)?;
    let error = recovered.sub(&f).norm_l2();
    let norm = f.norm_l2();
    Ok(identity_report("inversion", error, norm, error, TOL_INVERSION * norm.max(f64::MIN_POSITIVE))
        .with_witness(Witness::default().signal("f", &f).signal("g", g).signal("gamma", gamma)))
}

/// A pair of phase-space points `((m, w), (m', w'))`.
pub type KernelArgs = ((Vec<i64>, Vec<f64>), (Vec<i64>, Vec<f64>));

/// `|K_g((m', w'); (m, w))| ≤ 1` over the given argument pairs.
pub fn check_kernel_bound(g: &LatticeSignal, pairs: &[KernelArgs]) -> Result<InequalityReport> {
    let mut worst: f64 = 0.0;
    for ((m, w), (mp, wp)) in pairs {
        let k = reproducing_kernel(g, (m, w), (mp, wp))?;
        worst = worst.max(k.norm());
    }
    Ok(InequalityReport::new("kernel_bound", worst, 1.0, 1.0 - worst, TOL_IDENTITY)
        .detail("pairs", pairs.len() as f64)
        .with_witness(Witness::default().signal("g", g)))
}

/// `V_g f(m, w) = ⟨V_g f, K_g(·; (m, w))⟩` at the given points of the output box.
pub fn check_reproducing(ctx: &StftContext, points: &[(Vec<i64>, Vec<f64>)]) -> Result<InequalityReport> {
    let mut worst: f64 = 0.0;
    for (m, w) in points {
        let kernel = kernel_field(&ctx.g, m, w, &ctx.plan)?;
        let paired = ctx.field.inner(&kernel)?;
        let direct = stft_point(&ctx.f, &ctx.g, m, w);
        worst = worst.max((paired - direct).norm());
    }
    let scale = ctx.energy().sqrt();
    let mut report = identity_report("reproducing", worst, 0.0, worst, TOL_INVERSION * scale.max(f64::MIN_POSITIVE))
        .detail("points", points.len() as f64)
        .with_witness(ctx.witness());
    if !ctx.plan.kernel_exact() {
        report = report.note("grid too coarse for exact kernel pairings");
    }
    Ok(report)
}

/// `‖V_g f‖_{L^p} ≤ ‖f‖ ‖g‖`; `p = ∞` uses the sample maximum.
pub fn check_lp_bound(ctx: &StftContext, p: f64) -> Result<InequalityReport> {
    if !(p >= 2.0) {
        return Err(Error::InvalidParameter(format!("L^p bound needs p ≥ 2, got {p}")));
    }
    let exact = p == 2.0 || p.is_infinite();
    let lhs = lp_norm(&ctx.field, p, if exact { 1 } else { 2 });
    let rhs = ctx.energy().sqrt();
    let tol = if exact { TOL_IDENTITY } else { TOL_EXACT } * rhs.max(1.0);
    Ok(InequalityReport::new("lp_bound", lhs, rhs, rhs - lhs, tol)
        .with_witness(ctx.witness().param("p", p)))
}

/// Convolution form `V_g f(m, w) = e^{-2πi w·m} (f ∗ M_w g*)(m)` on every node.
///
/// The two other forms in circulation are reported as details; they differ in general.
pub fn check_convolution(ctx: &StftContext) -> Result<InequalityReport> {
    let d = convolution_discrepancy(&ctx.f, &ctx.g, &ctx.plan)?;
    let scale = ctx.energy().sqrt();
    let mut report = identity_report("convolution", d.involution, 0.0, d.involution, TOL_IDENTITY * scale.max(1.0))
        .detail("conjugated_window", d.conjugated_window)
        .detail("conjugated_signal", d.conjugated_signal)
        .with_witness(ctx.witness());
    let limit = TOL_IDENTITY * scale.max(1.0);
    if d.conjugated_window > limit {
        report = report.note("e^{-2πi w·m}(f ∗ conj(M_w g))(m) does not match the transform");
    }
    if d.conjugated_signal > limit {
        report = report.note("conj((M_w conj(f) ∗ g)(m)) does not match the transform");
    }
    Ok(report)
}

/// `|V_g(M_{w₀} T_{m₀} f)(m, w)| = |V_g f(m - m₀, w - w₀)|` with `w₀` the grid node `node`.
pub fn check_covariance(ctx: &StftContext, m0: &MultiIndex, node: usize) -> Result<InequalityReport> {
    let n = ctx.plan.dim();
    let shifted_half = ctx.plan.signal_box().half_width() + m0.max_abs() as usize;
    let plan = StftPlan::with_grid(
        n,
        shifted_half,
        ctx.plan.window_box().half_width(),
        StftPlan::default_points(shifted_half, ctx.plan.window_box().half_width())
            .max(ctx.plan.grid().points_per_axis()),
    )?;
    let grid = plan.grid();
    let w0 = grid.node(node % grid.len());
    let moved = modulate(&translate(&ctx.f, m0), &w0);
    let field = stft(&moved, &ctx.g, &plan)?;
    let out = plan.output_box();
    let mut worst: f64 = 0.0;
    for r in 0..out.len() {
        let m = out.coords_of(r);
        let back: Vec<i64> = m.iter().zip(m0.coords()).map(|(a, b)| a - b).collect();
        for j in 0..grid.len() {
            let w: Vec<f64> = grid.node(j).iter().zip(&w0).map(|(a, b)| a - b).collect();
            let expect = stft_point(&ctx.f, &ctx.g, &back, &w).norm();
            worst = worst.max((field.row(r)[j].norm() - expect).abs());
        }
    }
    let scale = ctx.energy().sqrt();
    Ok(identity_report("covariance", worst, 0.0, worst, TOL_IDENTITY * scale.max(1.0))
        .with_witness(ctx.witness().param("node", node as f64)))
}

fn ensure_orthonormal(phis: &[LatticeSignal]) -> Result<()> {
    for (i, a) in phis.iter().enumerate() {
        for (j, b) in phis.iter().enumerate().skip(i) {
            let target = if i == j { 1.0 } else { 0.0 };
            let v = a.inner(b);
            if (v - Complex64::new(target, 0.0)).norm() > TOL_ORTHONORMAL {
                return Err(Error::NotOrthonormal { i, j, value: v.norm() });
            }
        }
    }
    Ok(())
}

fn unit_window(g: &LatticeSignal) -> Result<LatticeSignal> {
    let norm = g.norm_l2();
    if norm == 0.0 {
        return Err(Error::ZeroWindow);
    }
    Ok(g.scaled(Complex64::new(1.0 / norm, 0.0)))
}

fn family_witness(phis: &[LatticeSignal], g: &LatticeSignal) -> Witness {
    phis.iter()
        .enumerate()
        .fold(Witness::default().signal("g", g), |w, (i, p)| w.signal(&format!("phi{i}"), p))
}

/// `Σ_n (1 - ‖χ_{Σᶜ} V_g φ_n‖) ≤ (ν⊗μ)(Σ)` for an orthonormal family and unit window.
pub fn check_orthonormal_sum(
    phis: &[LatticeSignal],
    g: &LatticeSignal,
    sigma: &TileSet,
    plan: &StftPlan,
) -> Result<InequalityReport> {
    ensure_orthonormal(phis)?;
    let g = unit_window(g)?;
    let mut lhs = 0.0;
    for phi in phis {
        let ctx = StftContext::new(phi, &g, plan)?;
        lhs += 1.0 - ctx.mass_off(sigma).sqrt();
    }
    let rhs = measure(sigma);
    Ok(InequalityReport::new("orthonormal_sum", lhs, rhs, rhs - lhs, TOL_EXACT * (phis.len() as f64).max(1.0))
        .detail("family_size", phis.len() as f64)
        .with_witness(family_witness(phis, &g).set("sigma", sigma)))
}

/// If `‖χ_Σ V_g f‖² ≥ (1 - ε) ‖f‖² ‖g‖²` then `(ν⊗μ)(Σ) ≥ 1 - ε`, for `Σ = Z × T`.
pub fn check_donoho_stark(ctx: &StftContext, sigma: &TileSet, eps: f64) -> Result<InequalityReport> {
    if !sigma.is_product_form() {
        return Err(Error::NotProductForm);
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InvalidParameter(format!("ε must lie in [0, 1), got {eps}")));
    }
    let energy = ctx.energy();
    let mass = ctx.mass_on(sigma);
    let witness = ctx.witness().set("sigma", sigma).param("eps", eps);
    if mass < (1.0 - eps) * energy - 1e-10 * energy.max(1.0) {
        return Ok(InequalityReport::not_applicable("donoho_stark", "concentration hypothesis fails")
            .detail("mass_on_sigma", mass)
            .detail("required_mass", (1.0 - eps) * energy)
            .with_witness(witness));
    }
    let lhs = measure(sigma);
    let rhs = 1.0 - eps;
    Ok(InequalityReport::new("donoho_stark", lhs, rhs, lhs - rhs, TOL_EXACT)
        .detail("mass_on_sigma", mass)
        .with_witness(witness))
}

/// `‖χ_{Σᶜ} V_g f‖ ≥ √(1 - (ν⊗μ)(Σ)) ‖f‖ ‖g‖` when `(ν⊗μ)(Σ) < 1`.
pub fn check_small_set(ctx: &StftContext, sigma: &TileSet) -> Result<InequalityReport> {
    let mu = measure(sigma);
    if mu >= 1.0 {
        return Err(Error::MeasureTooLarge { measure: mu });
    }
    let lhs = ctx.mass_off(sigma).sqrt();
    let rhs = (1.0 - mu).sqrt() * ctx.energy().sqrt();
    Ok(InequalityReport::new("small_set", lhs, rhs, lhs - rhs, TOL_EXACT * ctx.energy().sqrt().max(1.0))
        .detail("measure_sigma", mu)
        .with_witness(ctx.witness().set("sigma", sigma)))
}

fn eps_sigma_sq(ctx: &StftContext, sigma: &TileSet) -> f64 {
    let total = ctx.total_mass();
    if total == 0.0 {
        0.0
    } else {
        (ctx.mass_off(sigma) / total).clamp(0.0, 1.0)
    }
}

/// `(ν⊗μ)(Σ) ≥ 1 - ε_Σ²` with `ε_Σ = ‖χ_{Σᶜ} V‖ / ‖V‖`.
pub fn check_support_bound(ctx: &StftContext, sigma: &TileSet) -> Result<InequalityReport> {
    ctx.ensure_nonzero()?;
    let e2 = eps_sigma_sq(ctx, sigma);
    let lhs = measure(sigma);
    let rhs = 1.0 - e2;
    Ok(InequalityReport::new("support_bound", lhs, rhs, lhs - rhs, TOL_EXACT)
        .detail("eps_sigma", e2.sqrt())
        .with_witness(ctx.witness().set("sigma", sigma)))
}

/// `(ν⊗μ)(Σ) ≥ (1 - ε_Σ²)^{p/(p-2)}` for `p > 2`.
pub fn check_support_bound_p(ctx: &StftContext, sigma: &TileSet, p: f64) -> Result<InequalityReport> {
    if !(p > 2.0) {
        return Err(Error::InvalidParameter(format!("support bound needs p > 2, got {p}")));
    }
    ctx.ensure_nonzero()?;
    let e2 = eps_sigma_sq(ctx, sigma);
    let lhs = measure(sigma);
    let rhs = (1.0 - e2).powf(p / (p - 2.0));
    let lp = if p.is_finite() && p <= 64.0 {
        lp_norm(&ctx.field, p, 2)
    } else {
        ctx.field.norm_inf()
    };
    Ok(InequalityReport::new("support_bound_p", lhs, rhs, lhs - rhs, TOL_QUADRATURE)
        .detail("eps_sigma", e2.sqrt())
        .detail("lp_norm", lp)
        .detail("lp_bound", ctx.energy().sqrt())
        .with_witness(ctx.witness().set("sigma", sigma).param("p", p)))
}

/// `ν(E) (ν⊗μ)(Σ) ≥ (1 - ε_E)² (1 - ε_Σ²)` with `ε_E` measured in `ℓ¹` and `‖V_g f‖ = 1`.
pub fn check_joint_concentration(
    f: &LatticeSignal,
    g: &LatticeSignal,
    e_set: &[MultiIndex],
    sigma: &TileSet,
    plan: &StftPlan,
) -> Result<InequalityReport> {
    if f.is_zero() {
        return Err(Error::ZeroInput("signal"));
    }
    if g.is_zero() {
        return Err(Error::ZeroWindow);
    }
    // Rescale the window so that ‖V_g f‖ = ‖f‖ ‖g‖ = 1.
    let g = g.scaled(Complex64::new(1.0 / (f.norm_l2() * g.norm_l2()), 0.0));
    let ctx = StftContext::new(f, &g, plan)?;
    let mut e: Vec<MultiIndex> = e_set.to_vec();
    e.sort();
    e.dedup();
    let l1 = f.norm_l1();
    let inside: f64 = e.iter().map(|k| f.get(k.coords()).norm()).sum();
    let eps_e = ((l1 - inside) / l1).clamp(0.0, 1.0);
    let e2 = eps_sigma_sq(&ctx, sigma);
    let nu = e.len() as f64;
    let mu = measure(sigma);
    let lhs = nu * mu;
    let rhs = (1.0 - eps_e).powi(2) * (1.0 - e2);
    let e_witness = TileSet::full_fibers(e.iter().cloned())?;
    Ok(InequalityReport::new("joint_concentration", lhs, rhs, lhs - rhs, TOL_EXACT)
        .detail("eps_e", eps_e)
        .detail("eps_sigma", e2.sqrt())
        .detail("nu_e", nu)
        .detail("nu_bound", (1.0 - eps_e).powi(2) * l1 * l1 * g.norm_sq())
        .detail("sigma_bound", 1.0 - e2)
        .with_witness(
            Witness::default()
                .signal("f", f)
                .signal("g", &g)
                .set("sigma", sigma)
                .set("e", &e_witness),
        ))
}

/// `Card(K) ≤ (ν⊗μ)(B_r) / (1 - ε)` over the members of an orthonormal family that are
/// `ε`-concentrated on an inner tile approximation of `B_r`.
pub fn check_cardinality(
    phis: &[LatticeSignal],
    g: &LatticeSignal,
    r: f64,
    eps: f64,
    plan: &StftPlan,
    resolution: usize,
) -> Result<InequalityReport> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InvalidParameter(format!("ε must lie in [0, 1), got {eps}")));
    }
    ensure_orthonormal(phis)?;
    let g = unit_window(g)?;
    let ball = ball_tileset(r, plan.dim(), resolution)?;
    let mut excluded = Vec::new();
    let mut qualifying = 0usize;
    for (i, phi) in phis.iter().enumerate() {
        let ctx = StftContext::new(phi, &g, plan)?;
        if eps_sigma_sq(&ctx, &ball).sqrt() <= eps {
            qualifying += 1;
        } else {
            excluded.push(i);
        }
    }
    let bm = ball_measure(r, plan.dim(), BALL_QUAD_POINTS);
    let rhs = bm / (1.0 - eps);
    let lhs = qualifying as f64;
    let mut report = InequalityReport::new("cardinality", lhs, rhs, rhs - lhs, TOL_EXACT)
        .detail("ball_measure", bm)
        .detail("ball_inner_measure", measure(&ball))
        .detail("excluded", excluded.len() as f64)
        .with_witness(family_witness(phis, &g).param("r", r).param("eps", eps));
    if !excluded.is_empty() {
        report = report.note(format!("not concentrated on the ball: {excluded:?}"));
    }
    Ok(report)
}

/// `Card(K) ≤ 2 (ν⊗μ)(B_{A 2^{2/s}})` over family members with `ρ_s(V_g φ) ≤ A`.
pub fn check_dispersion_cardinality(
    phis: &[LatticeSignal],
    g: &LatticeSignal,
    s: f64,
    a: f64,
    plan: &StftPlan,
) -> Result<InequalityReport> {
    if !(s > 0.0) || !(a > 0.0) {
        return Err(Error::InvalidParameter(format!("need s > 0 and A > 0, got s = {s}, A = {a}")));
    }
    ensure_orthonormal(phis)?;
    let g = unit_window(g)?;
    let mut excluded = Vec::new();
    let mut qualifying = 0usize;
    for (i, phi) in phis.iter().enumerate() {
        let v = stft(phi, &g, plan)?;
        if dispersion(&v, s) <= a {
            qualifying += 1;
        } else {
            excluded.push(i);
        }
    }
    let radius = a * 2f64.powf(2.0 / s);
    let bm = ball_measure(radius, plan.dim(), BALL_QUAD_POINTS);
    let rhs = 2.0 * bm;
    let lhs = qualifying as f64;
    let mut report = InequalityReport::new("dispersion_cardinality", lhs, rhs, rhs - lhs, TOL_QUADRATURE)
        .detail("radius", radius)
        .detail("ball_measure", bm)
        .detail("excluded", excluded.len() as f64)
        .with_witness(family_witness(phis, &g).param("s", s).param("a", a));
    if !excluded.is_empty() {
        report = report.note(format!("dispersion above A: {excluded:?}"));
    }
    Ok(report)
}

/// `‖|m|^s V_g f‖² + ‖|w|^s V_g f‖² ≥ c(s) ‖f‖² ‖g‖²`.
pub fn check_heisenberg(ctx: &StftContext, s: f64) -> Result<InequalityReport> {
    let h = heisenberg_constant(s, ctx.plan.dim())?;
    let m_part = weighted_mass(&ctx.field, |m_sq, _| m_sq.powf(s));
    let w_part = weighted_mass(&ctx.field, |_, w_sq| w_sq.powf(s));
    let lhs = m_part + w_part;
    let energy = ctx.energy();
    let rhs = h.c * energy;
    let joint = moment(&ctx.field, 2.0 * s);
    Ok(InequalityReport::new("heisenberg", lhs, rhs, lhs - rhs, TOL_QUADRATURE * energy.max(1.0))
        .detail("c", h.c)
        .detail("eps0", h.eps0)
        .detail("m_moment", m_part)
        .detail("w_moment", w_part)
        .detail("joint_moment", joint)
        .detail("joint_bound", h.joint * energy)
        .with_witness(ctx.witness().param("s", s)))
}

/// `‖V_g f‖_{L²(Σ)} ≤ c(s) (ν⊗μ)(Σ)^{1/2} ‖|(m, w)|^s V_g f‖`.
pub fn check_local_uncertainty(ctx: &StftContext, s: f64, sigma: &TileSet) -> Result<InequalityReport> {
    let c = local_uncertainty_constant(s, ctx.plan.dim())?;
    let lhs = ctx.mass_on(sigma).sqrt();
    let joint = moment(&ctx.field, 2.0 * s).max(0.0).sqrt();
    let rhs = c.c * measure(sigma).sqrt() * joint;
    Ok(InequalityReport::new("local_uncertainty", lhs, rhs, rhs - lhs, TOL_QUADRATURE * ctx.energy().sqrt().max(1.0))
        .detail("c", c.c)
        .detail("eps0", c.eps0)
        .detail("joint_moment_root", joint)
        .with_witness(ctx.witness().set("sigma", sigma).param("s", s)))
}

/// `‖|(m, w)|^s V_g f‖ ≥ c_s ‖f‖ ‖g‖`.
pub fn check_corollary(ctx: &StftContext, s: f64) -> Result<InequalityReport> {
    let k = local_uncertainty_corollary_constant(s, ctx.plan.dim())?;
    let lhs = moment(&ctx.field, 2.0 * s).max(0.0).sqrt();
    let rhs = k.c_s * ctx.energy().sqrt();
    Ok(InequalityReport::new("corollary", lhs, rhs, lhs - rhs, TOL_QUADRATURE * ctx.energy().sqrt().max(1.0))
        .detail("c_s", k.c_s)
        .detail("r_star", k.r_star)
        .with_witness(ctx.witness().param("s", s)))
}

/// `E_k(|V_g f|²) ≥ -2 ln(‖f‖ ‖g‖) ‖f‖² ‖g‖²`.
pub fn check_entropy(ctx: &StftContext) -> Result<InequalityReport> {
    ctx.ensure_nonzero()?;
    let lhs = entropy_k(&ctx.field);
    let energy = ctx.energy();
    let rhs = -energy.ln() * energy;
    Ok(InequalityReport::new("entropy", lhs, rhs, lhs - rhs, TOL_QUADRATURE * energy.max(1.0))
        .with_witness(ctx.witness()))
}

/// `‖f‖ ‖g‖ ≤ c(Σ, g) ‖χ_{Σᶜ} V_g f‖` with `c(Σ, g) = (1 - ‖P_Σ P_g‖²)^{-1/2}`.
///
/// Masses use the grid indicator, matching the discrete operator.
pub fn check_benedicks(
    ctx: &StftContext,
    sigma: &TileSet,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<InequalityReport> {
    let op = ConcentrationOperator::new(&ctx.g, sigma, &ctx.plan)?;
    let power = op_norm(&op, tol, max_iter, seed)?;
    let witness = ctx.witness().set("sigma", sigma).param("seed", seed as f64);
    let c = match benedicks_constant(power.op_norm) {
        Ok(c) => c,
        Err(e) => {
            return Ok(InequalityReport::not_applicable("benedicks", e.to_string())
                .detail("op_norm", power.op_norm)
                .with_witness(witness))
        }
    };
    let inside = op.project_sigma(&ctx.field)?.norm_sq();
    let off = (ctx.total_mass() - inside).max(0.0).sqrt();
    let lhs = ctx.energy().sqrt();
    let rhs = c * off;
    Ok(InequalityReport::new("benedicks", lhs, rhs, rhs - lhs, TOL_EXACT * lhs.max(1.0))
        .detail("op_norm", power.op_norm)
        .detail("constant", c)
        .detail("iterations", power.iterations as f64)
        .note("finite truncation only certifies the quantitative bound")
        .with_witness(witness))
}

/// Status counts for a batch of reports.
pub fn summarize(reports: &[InequalityReport]) -> (usize, usize, usize) {
    reports.iter().fold((0, 0, 0), |(h, v, n), r| match r.status {
        Status::Holds => (h + 1, v, n),
        Status::Violated => (h, v + 1, n),
        Status::NotApplicable => (h, v, n + 1),
    })
}

/// Full-fiber set over every point of `support`.
pub fn whole_box(support: SupportBox) -> Result<TileSet> {
    TileSet::full_fibers(support.iter())
}
