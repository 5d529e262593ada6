//! Randomized trials behind the `verify` command.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::generators::{
    make_family, make_sigma, make_signal, parse_sigma_spec, parse_signal_spec, random_signal, RandomSet,
    SigmaSpec, SignalSpec,
};
use crate::error::{Error, Result};
use crate::lattice::{LatticeSignal, MultiIndex, SupportBox, TileSet};
use crate::stft::StftPlan;
use crate::uncertainty::checks::*;
use crate::uncertainty::functionals::dispersion;
use crate::uncertainty::{InequalityReport, Status};

/// Parsed, validated inputs shared by every trial.
#[derive(Clone, Debug)]
pub struct TrialSetup {
    pub config: ExperimentConfig,
    pub root_seed: u64,
    pub signal: SignalSpec,
    pub window: SignalSpec,
    pub sigma: SigmaSpec,
    pub plan: StftPlan,
}

impl TrialSetup {
    pub fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let plan = StftPlan::with_grid(
            config.dimension,
            config.half_width,
            config.window_half_width(),
            config.grid,
        )?;
        Ok(Self {
            root_seed: config.resolved_seed()?,
            signal: parse_signal_spec(&config.signal)?,
            window: parse_signal_spec(&config.window)?,
            sigma: parse_sigma_spec(&config.sigma)?,
            plan,
            config: config.clone(),
        })
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of trial `trial` of `check`; independent of which other checks run.
pub fn trial_seed(root: u64, check: &str, trial: usize) -> u64 {
    let name = check
        .bytes()
        .fold(0xCBF2_9CE4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01B3));
    splitmix64(splitmix64(root ^ name) ^ trial as u64)
}

/// Seed for an independent stream derived from a trial seed.
pub fn stream_seed(seed: u64, stream: &str) -> u64 {
    trial_seed(seed, stream, 0)
}

/// Draws `f` and `g` from separate streams of the trial seed.
pub fn draw_pair(setup: &TrialSetup, seed: u64) -> Result<(LatticeSignal, LatticeSignal)> {
    let n = setup.config.dimension;
    let mut rf = ChaCha8Rng::seed_from_u64(stream_seed(seed, "signal"));
    let mut rg = ChaCha8Rng::seed_from_u64(stream_seed(seed, "window"));
    let f = make_signal(&setup.signal, n, setup.config.half_width, &mut rf)?;
    let g = make_signal(&setup.window, n, setup.config.window_half_width(), &mut rg)?;
    Ok((f, g))
}

pub fn draw_sigma(setup: &TrialSetup, seed: u64, kind: RandomSet) -> Result<TileSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, "sigma"));
    make_sigma(&setup.sigma, setup.plan.output_box(), kind, &mut rng)
}

fn random_point<R: Rng>(lattice: SupportBox, rng: &mut R) -> (Vec<i64>, Vec<f64>) {
    let m = lattice.coords_of(rng.random_range(0..lattice.len()));
    let w = (0..lattice.dim()).map(|_| rng.random::<f64>()).collect();
    (m, w)
}

/// Runs one trial of one check; trial errors become not-applicable reports.
pub fn run_trial(setup: &TrialSetup, check: &str, trial: usize) -> InequalityReport {
    let seed = trial_seed(setup.root_seed, check, trial);
    let report = match trial_inner(setup, check, trial, seed) {
        Ok(r) => r,
        Err(e) => InequalityReport::not_applicable(check, e.to_string()),
    };
    report.with_seed(seed).detail("trial", trial as f64)
}

fn trial_inner(setup: &TrialSetup, check: &str, trial: usize, seed: u64) -> Result<InequalityReport> {
    let cfg = &setup.config;
    let plan = &setup.plan;
    let mut extra = ChaCha8Rng::seed_from_u64(stream_seed(seed, "extra"));
    let (f, g) = draw_pair(setup, seed)?;
    let context = || -> Result<StftContext> {
        Ok(StftContext::new(&f, &g, plan)?.with_fault_scale(cfg.fault_scale))
    };
    let family = |rng: &mut ChaCha8Rng| make_family(&setup.signal, plan.signal_box(), cfg.family_size, rng);
    match check {
        "plancherel" => Ok(check_plancherel(&context()?)),
        "orthogonality" => {
            let f2 = random_signal(plan.signal_box(), &mut extra);
            let g2 = random_signal(plan.window_box(), &mut extra);
            check_orthogonality(&f, &g, &f2, &g2, plan)
        }
        "inversion" => {
            let gamma = if trial % 2 == 0 {
                g.clone()
            } else {
                random_signal(plan.window_box(), &mut extra)
            };
            check_inversion(&f, &g, &gamma, plan)
        }
        "kernel_bound" => {
            let out = plan.output_box();
            let pairs: Vec<KernelArgs> = (0..100)
                .map(|_| (random_point(out, &mut extra), random_point(out, &mut extra)))
                .collect();
            check_kernel_bound(&g, &pairs)
        }
        "reproducing" => {
            let pts: Vec<_> = (0..5).map(|_| random_point(plan.output_box(), &mut extra)).collect();
            check_reproducing(&context()?, &pts)
        }
        "lp_bound" => check_lp_bound(&context()?, cfg.exponent(trial)),
        "convolution" => check_convolution(&context()?),
        "covariance" => {
            let shift = SupportBox::new(cfg.dimension, cfg.window_half_width().max(1));
            let m0 = shift.point(extra.random_range(0..shift.len()));
            let node = extra.random_range(0..plan.grid().len());
            check_covariance(&context()?, &m0, node)
        }
        "orthonormal_sum" => {
            let phis = family(&mut extra)?;
            check_orthonormal_sum(&phis, &g, &draw_sigma(setup, seed, RandomSet::Small)?, plan)
        }
        "donoho_stark" => {
            let sigma = draw_sigma(setup, seed, RandomSet::Product)?;
            let ctx = context()?;
            let ratio = if ctx.energy() > 0.0 { ctx.mass_on(&sigma) / ctx.energy() } else { 0.0 };
            let eps = (1.0 - ratio).clamp(0.0, 1.0 - 1e-12);
            check_donoho_stark(&ctx, &sigma, eps)
        }
        "small_set" => check_small_set(&context()?, &draw_sigma(setup, seed, RandomSet::Small)?),
        "support_bound" => check_support_bound(&context()?, &draw_sigma(setup, seed, RandomSet::Small)?),
        "support_bound_p" => check_support_bound_p(
            &context()?,
            &draw_sigma(setup, seed, RandomSet::Small)?,
            cfg.exponent(trial),
        ),
        "joint_concentration" => {
            let support = plan.signal_box();
            let size = extra.random_range(1..=support.len());
            let mut idx: Vec<usize> = (0..support.len()).collect();
            for i in 0..size {
                let j = extra.random_range(i..idx.len());
                idx.swap(i, j);
            }
            let e: Vec<MultiIndex> = idx[..size].iter().map(|&i| support.point(i)).collect();
            check_joint_concentration(&f, &g, &e, &draw_sigma(setup, seed, RandomSet::Small)?, plan)
        }
        "cardinality" => {
            let phis = family(&mut extra)?;
            check_cardinality(&phis, &g, cfg.radius, cfg.eps, plan, cfg.resolution)
        }
        "dispersion_cardinality" => {
            let phis = family(&mut extra)?;
            let s = cfg.moment_order(trial);
            let a = if cfg.dispersion_bound > 0.0 {
                cfg.dispersion_bound
            } else {
                let unit = g.scaled(num_complex::Complex64::new(1.0 / g.norm_l2().max(f64::MIN_POSITIVE), 0.0));
                let v = crate::stft::stft(&phis[0], &unit, plan)?;
                dispersion(&v, s) * extra.random_range(0.8..1.5)
            };
            check_dispersion_cardinality(&phis, &g, s, a, plan)
        }
        "heisenberg" => check_heisenberg(&context()?, cfg.moment_order(trial)),
        "local_uncertainty" => check_local_uncertainty(
            &context()?,
            cfg.moment_order(trial),
            &draw_sigma(setup, seed, RandomSet::Small)?,
        ),
        "corollary" => check_corollary(&context()?, cfg.moment_order(trial)),
        "entropy" => check_entropy(&context()?),
        "benedicks" => check_benedicks(
            &context()?,
            &draw_sigma(setup, seed, RandomSet::Small)?,
            cfg.tol,
            cfg.max_iter,
            stream_seed(seed, "power"),
        ),
        other => Err(Error::InvalidParameter(format!("unknown check {other:?}"))),
    }
}

/// Reports of one check, ordered by trial.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub check: String,
    pub reports: Vec<InequalityReport>,
}

impl CheckOutcome {
    pub fn counts(&self) -> (usize, usize, usize) {
        summarize(&self.reports)
    }

    pub fn min_slack(&self) -> Option<f64> {
        self.reports
            .iter()
            .filter(|r| r.status != Status::NotApplicable)
            .map(|r| r.slack)
            .min_by(f64::total_cmp)
    }

    pub fn summary_line(&self) -> String {
        let (h, v, n) = self.counts();
        let slack = self
            .min_slack()
            .map(|s| format!("{s:.3e}"))
            .unwrap_or_else(|| "-".into());
        let verdict = if v == 0 { "PASS" } else { "FAIL" };
        format!(
            "{verdict} {}: trials={} holds={h} violated={v} not_applicable={n} min_slack={slack}",
            self.check,
            self.reports.len()
        )
    }
}

/// Runs every configured check; output order is independent of scheduling.
pub fn run_all(setup: &TrialSetup) -> Vec<CheckOutcome> {
    let cfg = &setup.config;
    let jobs: Vec<(usize, usize)> = (0..cfg.checks.len())
        .flat_map(|c| (0..cfg.trials).map(move |t| (c, cfg.first_trial + t)))
        .collect();
    let reports: Vec<InequalityReport> = jobs
        .par_iter()
        .map(|&(c, t)| run_trial(setup, &cfg.checks[c], t))
        .collect();
    let mut chunks = reports.into_iter();
    cfg.checks
        .iter()
        .map(|name| CheckOutcome {
            check: name.clone(),
            reports: chunks.by_ref().take(cfg.trials).collect(),
        })
        .collect()
}
